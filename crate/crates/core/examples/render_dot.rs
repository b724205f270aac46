//! Graphviz output with the current state highlighted.
//!
//! ```text
//! cargo run --example render_dot -- scheduled | dot -Tsvg > seminar.svg
//! ```

use statebdd::formats::dot::{render_dot_with, DotOptions};
use statebdd::{fixtures, StateId};

fn main() -> statebdd::Result<()> {
    let chart = fixtures::seminar();
    let options = DotOptions {
        highlight: std::env::args().nth(1).map(StateId),
        hide_effects: false,
    };
    print!("{}", render_dot_with(&chart, &options)?);
    Ok(())
}
