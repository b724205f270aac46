//! One GIVEN-WHEN-THEN scenario per transition of the seminar process.

use statebdd::{fixtures, generate_transition_suite, render_feature};

fn main() -> statebdd::Result<()> {
    let chart = fixtures::seminar();
    let suite = generate_transition_suite(&chart)?;
    for scenario in &suite.scenarios {
        let params: Vec<String> = scenario.parameters.iter().map(|p| p.to_string()).collect();
        eprintln!("{:<70} params: {}", scenario.name, params.join(", "));
    }
    print!("{}", render_feature(&suite));
    Ok(())
}
