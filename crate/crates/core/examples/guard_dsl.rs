//! Guard expressions: parsing, precedence, placeholders and binding.

use statebdd::guard::{bind_placeholders, Bindings};
use statebdd::{parse_guard, render_guard, GuardExpr};

fn main() -> statebdd::Result<()> {
    for text in [
        "there is a seat available",
        "not seat available",
        "a AND b OR c",
        "a AND (b OR c)",
        "NOT (the room is booked or the teacher is ill) and fewer than <max> students",
    ] {
        let expr = parse_guard(text)?;
        println!(
            "{text:?}\n  -> {}  {:?}",
            render_guard(&expr),
            expr.placeholders()
        );
        assert_eq!(parse_guard(&render_guard(&expr))?, expr);
    }

    let built = GuardExpr::and([
        GuardExpr::atom("budget remains")?,
        GuardExpr::not(GuardExpr::atom("audit pending")?),
    ]);
    println!("built: {built}");

    let bindings: Bindings = [("max".to_string(), "30".to_string())].into();
    println!(
        "{}",
        bind_placeholders("fewer than <max> students", &bindings)?
    );

    if let Err(e) = parse_guard("a AND") {
        println!("{e}");
    }
    Ok(())
}
