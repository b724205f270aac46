//! Step through the seminar process, undo a step and print the trace.

use std::sync::Arc;

use statebdd::{fixtures, Bindings, Session, TransitionId};

fn bindings(pairs: &[(&str, &str)]) -> Bindings {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn main() -> statebdd::Result<()> {
    let mut session = Session::create(Arc::new(fixtures::seminar()))?;
    let script: [(&str, Bindings); 4] = [
        ("t1", Bindings::new()),
        (
            "t2",
            bindings(&[
                ("mm1/dd1/yyyy1", "03/01/2027"),
                ("mm2/dd2/yyyy2", "06/30/2027"),
            ]),
        ),
        ("t3", Bindings::new()),
        ("t4", bindings(&[("logsize", "25")])),
    ];
    for (id, values) in script {
        if id == "t4" {
            session = session.undo();
            println!("undo -> {}", session.chart.state_name(&session.current));
        }
        for choice in session.choices() {
            println!(
                "  can fire {} {:?} -> {}",
                choice.transition, choice.event_text, choice.target_name
            );
        }
        session = session.fire(&TransitionId::from(id), values)?;
        println!(
            "fired {id} -> {}",
            session.chart.state_name(&session.current)
        );
    }
    assert_eq!(session.replay()?, session.current);
    println!();
    print!("{}", session.render_trace()?);
    Ok(())
}
