//! Validate a model file and print its report.
//!
//! ```text
//! cargo run --example validate_model -- fixtures/invalid/final_outgoing.scdl
//! ```

use statebdd::fixtures::SEMINAR_SCDL;
use statebdd::formats::scdl::parse_scdl_unchecked;
use statebdd::formats::xmi::parse_xmi_unchecked;
use statebdd::validate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (name, text) = match std::env::args().nth(1) {
        Some(path) => (path.clone(), std::fs::read_to_string(&path)?),
        None => ("seminar.scdl".to_string(), SEMINAR_SCDL.to_string()),
    };
    let chart = if name.ends_with(".xmi") {
        parse_xmi_unchecked(&text)?
    } else {
        parse_scdl_unchecked(&text)?
    };
    let report = validate(&chart);
    println!(
        "{name}: {} states, {} transitions",
        chart.states.len(),
        chart.transitions.len()
    );
    println!("{report}");
    if !report.is_ok() {
        std::process::exit(2);
    }
    Ok(())
}
