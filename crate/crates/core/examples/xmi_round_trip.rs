//! SCDL to XMI and back: both parse to the same chart.

use statebdd::fixtures::{SEMINAR_SCDL, SEMINAR_XMI};
use statebdd::{parse_scdl, parse_xmi, render_scdl, render_xmi};

fn main() -> statebdd::Result<()> {
    let chart = parse_scdl(SEMINAR_SCDL)?;
    let xmi = render_xmi(&chart)?;
    assert_eq!(xmi, SEMINAR_XMI);

    let back = parse_xmi(&xmi)?;
    assert_eq!(back, chart);
    assert_eq!(render_scdl(&back)?, SEMINAR_SCDL);

    println!(
        "{} bytes of XMI, {} transitions, round trip exact",
        xmi.len(),
        back.transitions.len()
    );
    Ok(())
}
