//! Transition-simple paths from the initial state, and the multi-step
//! scenarios they produce.

use statebdd::{enumerate_paths, fixtures, generate_path_suite, render_feature};

fn main() -> statebdd::Result<()> {
    let chart = fixtures::seminar();
    let max_len = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(10);
    for path in enumerate_paths(&chart, max_len)? {
        let ids: Vec<&str> = path.0.iter().map(|t| t.as_str()).collect();
        eprintln!("[{}]", ids.join(", "));
    }
    print!("{}", render_feature(&generate_path_suite(&chart, max_len)?));
    Ok(())
}
