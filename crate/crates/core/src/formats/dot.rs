use std::fmt::Write;

use crate::error::{Code, Error, Result};
use crate::model::{StateId, StateKind, Statechart};

#[derive(Debug, Clone, Default)]
pub struct DotOptions {
    /// State drawn with a distinguishing fill.
    pub highlight: Option<StateId>,
    /// Leave effect phrases out of edge labels.
    pub hide_effects: bool,
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Edge label in `event [guard] / effect; effect` notation.
pub fn edge_label(event: &str, guard: Option<&str>, effects: &[String]) -> String {
    let mut label = event.to_string();
    if let Some(g) = guard {
        write!(label, " [{g}]").unwrap();
    }
    if !effects.is_empty() {
        write!(label, " / {}", effects.join("; ")).unwrap();
    }
    label
}

/// Renders the chart as a Graphviz digraph.
pub fn render_dot(chart: &Statechart, highlight: Option<&StateId>) -> Result<String> {
    render_dot_with(
        chart,
        &DotOptions {
            highlight: highlight.cloned(),
            hide_effects: false,
        },
    )
}

pub fn render_dot_with(chart: &Statechart, options: &DotOptions) -> Result<String> {
    chart.ensure_valid()?;
    if let Some(h) = &options.highlight {
        if chart.state(h).is_none() {
            return Err(Error::new(Code::UnknownState, format!("unknown state {h}")));
        }
    }

    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(&chart.name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [fontname=\"Helvetica\"];").unwrap();
    writeln!(out, "  edge [fontname=\"Helvetica\"];").unwrap();
    for s in &chart.states {
        let mut attrs = match s.kind {
            StateKind::Initial => {
                "shape=point, style=filled, fillcolor=black, width=0.2, label=\"\"".to_string()
            }
            StateKind::Final => format!("shape=doublecircle, label=\"{}\"", escape(&s.name)),
            StateKind::Simple => {
                format!("shape=box, style=rounded, label=\"{}\"", escape(&s.name))
            }
        };
        if options.highlight.as_ref() == Some(&s.id) {
            attrs.push_str(", color=red, penwidth=3, class=\"current\"");
        }
        writeln!(out, "  \"{}\" [{}];", escape(s.id.as_str()), attrs).unwrap();
    }
    for t in &chart.transitions {
        let guard = t.rendered_guard();
        let effects: &[String] = if options.hide_effects {
            &[]
        } else {
            &t.effects
        };
        let label = edge_label(&t.event, guard.as_deref(), effects);
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [id=\"{}\", label=\"{}\"];",
            escape(t.source.as_str()),
            escape(t.target.as_str()),
            escape(t.id.as_str()),
            escape(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}
