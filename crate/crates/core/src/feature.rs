//! Feature text: rendering scenario sets, parsing them back, and recovering
//! a statechart from single-step scenarios.
//!
//! ```text
//! Process: <chart name>
//! Subject: <subject>
//!
//! Scenario: <name>
//!   GIVEN <clause>
//!     AND <clause>
//!   WHEN <clause>
//!   THEN <clause>
//!     AND <clause>
//! ```
//!
//! Multi-step scenarios repeat the WHEN/THEN block. Inside a WHEN block the
//! last clause is the event and any earlier ones are guard conditions.

use std::collections::HashMap;

use crate::error::{Code, Error, Result};
use crate::guard::{parse_guard, GuardExpr};
use crate::model::{validate, StateId, StateKind, Statechart};
use crate::scenario::{Clause, Scenario, ScenarioSet, ScenarioStep};

const DEFAULT_NAME: &str = "Recovered";
const DEFAULT_SUBJECT: &str = "process";

fn push_block(out: &mut String, keyword: &str, texts: impl IntoIterator<Item = String>) {
    for (i, text) in texts.into_iter().enumerate() {
        if i == 0 {
            out.push_str(&format!("  {keyword} {text}\n"));
        } else {
            out.push_str(&format!("    AND {text}\n"));
        }
    }
}

/// Canonical feature text for a scenario set. Output uses LF line endings.
pub fn render_feature(set: &ScenarioSet) -> String {
    let mut out = format!("Process: {}\nSubject: {}\n", set.chart_name, set.subject);
    for scenario in &set.scenarios {
        out.push('\n');
        render_scenario(&mut out, scenario, &set.subject);
    }
    out
}

fn render_scenario(out: &mut String, scenario: &Scenario, subject: &str) {
    out.push_str(&format!("Scenario: {}\n", scenario.name));
    push_block(out, "GIVEN", scenario.given.iter().map(|c| c.text(subject)));
    for step in &scenario.steps {
        push_block(
            out,
            "WHEN",
            step.conditions
                .iter()
                .chain(std::iter::once(&step.when))
                .map(|c| c.text(subject)),
        );
        push_block(out, "THEN", step.then.iter().map(|c| c.text(subject)));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Named,
    Given,
    When,
    Then,
}

struct Draft {
    name: String,
    line: usize,
    phase: Phase,
    given: Vec<String>,
    steps: Vec<(Vec<String>, Vec<String>)>,
}

/// Strips `prefix` ignoring ASCII case.
fn strip_prefix_ci<'a>(text: &'a str, prefix: &str) -> Option<&'a str> {
    if text.len() >= prefix.len()
        && text.is_char_boundary(prefix.len())
        && text[..prefix.len()].eq_ignore_ascii_case(prefix)
    {
        Some(&text[prefix.len()..])
    } else {
        None
    }
}

fn strip_suffix_ci<'a>(text: &'a str, suffix: &str) -> Option<&'a str> {
    let cut = text.len().checked_sub(suffix.len())?;
    if text.is_char_boundary(cut) && text[cut..].eq_ignore_ascii_case(suffix) {
        Some(&text[..cut])
    } else {
        None
    }
}

fn non_empty(s: &str) -> Option<String> {
    let s = s.trim();
    (!s.is_empty()).then(|| s.to_string())
}

fn given_state(text: &str, subject: &str) -> Option<Clause> {
    let rest = strip_prefix_ci(text, &format!("the {subject} "))?;
    if rest.eq_ignore_ascii_case("does not exist yet") {
        return Some(Clause::NotYetExisting);
    }
    strip_prefix_ci(rest, "is ")
        .and_then(non_empty)
        .map(Clause::InState)
}

fn outcome_state(text: &str, subject: &str) -> Option<Clause> {
    if text.eq_ignore_ascii_case("the process is finished") {
        return Some(Clause::Finished(None));
    }
    let rest = strip_prefix_ci(text, &format!("the {subject} "))?;
    if let Some(name) = strip_prefix_ci(rest, "is ")
        .and_then(|r| strip_suffix_ci(r, " and the process is finished"))
        .and_then(non_empty)
    {
        return Some(Clause::Finished(Some(name)));
    }
    if let Some(name) = strip_prefix_ci(rest, "remains ").and_then(non_empty) {
        return Some(Clause::Remains(name));
    }
    strip_prefix_ci(rest, "is ")
        .and_then(non_empty)
        .map(Clause::InState)
}

impl Draft {
    fn finish(self, subject: &str, at_line: usize) -> Result<Scenario> {
        if self.given.is_empty() || self.steps.is_empty() {
            return Err(Error::at_line(
                Code::FeatureOrder,
                at_line,
                format!(
                    "scenario {:?} (line {}) needs GIVEN, WHEN and THEN",
                    self.name, self.line
                ),
            ));
        }
        if self.steps.last().is_some_and(|(_, then)| then.is_empty()) {
            return Err(Error::at_line(
                Code::FeatureOrder,
                at_line,
                format!("scenario {:?} ends with a WHEN that has no THEN", self.name),
            ));
        }
        let mut given = Vec::with_capacity(self.given.len());
        for (i, text) in self.given.into_iter().enumerate() {
            let clause = if i == 0 {
                given_state(&text, subject)
            } else {
                None
            };
            given.push(clause.unwrap_or(Clause::Guard(text)));
        }
        let steps = self
            .steps
            .into_iter()
            .map(|(mut when, then)| {
                let event = when.pop().expect("a WHEN block has at least one clause");
                let then = then
                    .into_iter()
                    .enumerate()
                    .map(|(i, text)| {
                        let state = if i == 0 {
                            outcome_state(&text, subject)
                        } else {
                            None
                        };
                        state.unwrap_or(Clause::Effect(text))
                    })
                    .collect();
                ScenarioStep {
                    conditions: when.into_iter().map(Clause::Guard).collect(),
                    when: Clause::Event(event),
                    then,
                }
            })
            .collect();
        Ok(Scenario::new(self.name, given, steps))
    }
}

/// Parses feature text. Inverse of [`render_feature`] on canonical text;
/// tolerates blank lines, indentation, keyword case and CRLF line endings.
pub fn parse_feature(text: &str) -> Result<ScenarioSet> {
    let mut name: Option<String> = None;
    let mut subject: Option<String> = None;
    let mut drafts: Vec<Draft> = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let order = |msg: String| Error::at_line(Code::FeatureOrder, line_no, msg);
        let syntax = |msg: String| Error::at_line(Code::FeatureSyntax, line_no, msg);

        for (prefix, slot) in [("Process:", &mut name), ("Subject:", &mut subject)] {
            if let Some(value) = strip_prefix_ci(line, prefix) {
                if !drafts.is_empty() {
                    return Err(order(format!("{prefix} header after the first scenario")));
                }
                if slot.is_some() {
                    return Err(syntax(format!("duplicate {prefix} header")));
                }
                *slot = Some(value.trim().to_string());
            }
        }
        if strip_prefix_ci(line, "Process:").is_some()
            || strip_prefix_ci(line, "Subject:").is_some()
        {
            continue;
        }

        if let Some(scenario_name) = strip_prefix_ci(line, "Scenario:") {
            let scenario_name = scenario_name.trim().to_string();
            if drafts.iter().any(|d| d.name == scenario_name) {
                return Err(syntax(format!("duplicate scenario name {scenario_name:?}")));
            }
            drafts.push(Draft {
                name: scenario_name,
                line: line_no,
                phase: Phase::Named,
                given: Vec::new(),
                steps: Vec::new(),
            });
            continue;
        }

        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        let keyword = keyword.to_ascii_uppercase();
        if !matches!(keyword.as_str(), "GIVEN" | "WHEN" | "THEN" | "AND") {
            return Err(syntax(format!("unrecognised line {line:?}")));
        }
        if rest.is_empty() {
            return Err(syntax(format!("{keyword} without a clause")));
        }
        let Some(draft) = drafts.last_mut() else {
            return Err(order(format!("{keyword} before any Scenario:")));
        };
        let clause = rest.to_string();
        match (keyword.as_str(), draft.phase) {
            ("GIVEN", Phase::Named) => {
                draft.given.push(clause);
                draft.phase = Phase::Given;
            }
            ("WHEN", Phase::Given | Phase::Then) => {
                draft.steps.push((vec![clause], Vec::new()));
                draft.phase = Phase::When;
            }
            ("THEN", Phase::When) => {
                draft.steps.last_mut().unwrap().1.push(clause);
                draft.phase = Phase::Then;
            }
            ("AND", Phase::Given) => draft.given.push(clause),
            ("AND", Phase::When) => draft.steps.last_mut().unwrap().0.push(clause),
            ("AND", Phase::Then) => draft.steps.last_mut().unwrap().1.push(clause),
            (keyword, phase) => {
                return Err(order(format!(
                    "{keyword} is not allowed here ({phase:?} block)"
                )));
            }
        }
    }

    if name.is_none() || subject.is_none() {
        tracing::warn!("feature text lacks Process:/Subject: headers; using defaults");
    }
    let subject = subject.unwrap_or_else(|| DEFAULT_SUBJECT.to_string());
    let mut set = ScenarioSet::new(
        name.unwrap_or_else(|| DEFAULT_NAME.to_string()),
        subject.clone(),
    );

    let total_lines = text.lines().count().max(1);
    let ends: Vec<usize> = drafts
        .iter()
        .skip(1)
        .map(|d| d.line)
        .chain(std::iter::once(total_lines))
        .collect();
    for (draft, end) in drafts.into_iter().zip(ends) {
        set.scenarios.push(draft.finish(&subject, end)?);
    }
    Ok(set)
}

/// Rebuilds a statechart from single-step scenarios.
pub fn recover_statechart(set: &ScenarioSet) -> Result<Statechart> {
    let mut chart = Statechart::new(set.chart_name.clone(), set.subject.clone());
    let initial = chart.add_state(StateKind::Initial, StateKind::Initial.default_name());
    let mut anonymous_final: Option<StateId> = None;
    let mut keys: HashMap<(StateId, String, Option<String>), (StateId, &str)> = HashMap::new();

    let state = |chart: &mut Statechart, name: &str, kind: StateKind| -> StateId {
        match chart.state_by_name(name) {
            Some(s) => s.id.clone(),
            None => chart.add_state(kind, name),
        }
    };

    for scenario in &set.scenarios {
        let [step] = scenario.steps.as_slice() else {
            return Err(Error::new(
                Code::MultiStepUnsupported,
                format!(
                    "scenario {:?} has {} steps",
                    scenario.name,
                    scenario.steps.len()
                ),
            ));
        };

        let (source, guard_texts): (StateId, Vec<&str>) = match scenario.given.first() {
            Some(Clause::InState(name)) => (
                state(&mut chart, name, StateKind::Simple),
                scenario.given[1..].iter().filter_map(free_text).collect(),
            ),
            Some(Clause::NotYetExisting) => (
                initial.clone(),
                scenario.given[1..].iter().filter_map(free_text).collect(),
            ),
            _ => (
                initial.clone(),
                scenario.given.iter().filter_map(free_text).collect(),
            ),
        };

        let target = match step.then.first() {
            Some(Clause::InState(name)) | Some(Clause::Remains(name)) => {
                state(&mut chart, name, StateKind::Simple)
            }
            Some(Clause::Finished(Some(name))) => state(&mut chart, name, StateKind::Final),
            Some(Clause::Finished(None)) => anonymous_final
                .get_or_insert_with(|| {
                    state(
                        &mut chart,
                        StateKind::Final.default_name(),
                        StateKind::Final,
                    )
                })
                .clone(),
            _ => {
                return Err(Error::new(
                    Code::NoTargetState,
                    format!("scenario {:?} has no THEN state clause", scenario.name),
                ))
            }
        };

        let mut conjuncts = Vec::new();
        for text in guard_texts
            .into_iter()
            .chain(step.conditions.iter().filter_map(free_text))
        {
            conjuncts.push(parse_guard(text).map_err(|e| {
                Error::new(
                    e.code,
                    format!("scenario {:?}: {}", scenario.name, e.message),
                )
            })?);
        }
        let guard = (!conjuncts.is_empty()).then(|| GuardExpr::and(conjuncts));

        let Clause::Event(event) = &step.when else {
            return Err(Error::new(
                Code::FeatureSyntax,
                format!("scenario {:?} has no WHEN event", scenario.name),
            ));
        };
        let effects: Vec<String> = step.then[1..]
            .iter()
            .filter_map(free_text)
            .map(str::to_string)
            .collect();

        let key = (
            source.clone(),
            event.clone(),
            guard.as_ref().map(GuardExpr::to_string),
        );
        if let Some((other_target, other_name)) = keys.get(&key) {
            if *other_target != target {
                return Err(Error::new(
                    Code::ConflictingTransition,
                    format!(
                        "scenarios {other_name:?} and {:?} leave the same state on the same event and guard but reach different states",
                        scenario.name
                    ),
                ));
            }
        }
        keys.insert(key, (target.clone(), &scenario.name));
        chart.add_transition(source, target, event.clone(), guard, effects);
    }

    let report = validate(&chart);
    if let Some(first) = report.errors.first() {
        return Err(Error::new(first.code, report.summary()));
    }
    Ok(chart)
}

fn free_text(clause: &Clause) -> Option<&str> {
    match clause {
        Clause::Guard(t) | Clause::Event(t) | Clause::Effect(t) => Some(t),
        _ => None,
    }
}
