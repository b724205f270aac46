//! Statechart domain types and well-formedness checks.
//!
//! Only flat machines are modelled: one initial pseudostate, simple states,
//! final states and transitions between them.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Code, Error, Result};
use crate::guard::{extract_placeholders, GuardExpr, Placeholder};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransitionId(pub String);

impl StateId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TransitionId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for TransitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StateId {
    fn from(s: &str) -> Self {
        StateId(s.to_string())
    }
}

impl From<&str> for TransitionId {
    fn from(s: &str) -> Self {
        TransitionId(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Initial,
    Simple,
    Final,
}

impl StateKind {
    /// Name given to pseudostates and final states declared without one.
    pub fn default_name(self) -> &'static str {
        match self {
            StateKind::Initial => "initial",
            StateKind::Simple => "state",
            StateKind::Final => "final",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub id: StateId,
    pub name: String,
    pub kind: StateKind,
}

impl State {
    /// A final state carrying the default name.
    pub fn is_anonymous_final(&self) -> bool {
        self.kind == StateKind::Final && self.name == StateKind::Final.default_name()
    }
}

/// A transition in `event [guard] / effects` form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub id: TransitionId,
    pub source: StateId,
    pub target: StateId,
    pub event: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<GuardExpr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub effects: Vec<String>,
}

impl Transition {
    /// Placeholders over event, guard and effects, first occurrence first.
    pub fn placeholders(&self) -> Vec<Placeholder> {
        let mut out: Vec<Placeholder> = Vec::new();
        let mut push = |p: Placeholder| {
            if !out.contains(&p) {
                out.push(p);
            }
        };
        extract_placeholders(&self.event)
            .unwrap_or_default()
            .into_iter()
            .for_each(&mut push);
        if let Some(guard) = &self.guard {
            guard.placeholders().into_iter().for_each(&mut push);
        }
        for effect in &self.effects {
            extract_placeholders(effect)
                .unwrap_or_default()
                .into_iter()
                .for_each(&mut push);
        }
        out
    }

    pub fn rendered_guard(&self) -> Option<String> {
        self.guard.as_ref().map(GuardExpr::to_string)
    }
}

/// A named flat state machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statechart {
    pub name: String,
    /// Noun phrase used when wording scenarios, e.g. "course".
    pub subject: String,
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
}

impl Statechart {
    pub fn new(name: impl Into<String>, subject: impl Into<String>) -> Self {
        Statechart {
            name: name.into(),
            subject: subject.into(),
            states: Vec::new(),
            transitions: Vec::new(),
        }
    }

    /// Adds a state with an id derived from its name and returns the id.
    pub fn add_state(&mut self, kind: StateKind, name: impl Into<String>) -> StateId {
        let name = name.into();
        let id = self.fresh_state_id(&name);
        self.states.push(State {
            id: id.clone(),
            name,
            kind,
        });
        id
    }

    /// Appends a transition with id `t<n>`, n being its 1-based position.
    pub fn add_transition(
        &mut self,
        source: StateId,
        target: StateId,
        event: impl Into<String>,
        guard: Option<GuardExpr>,
        effects: Vec<String>,
    ) -> TransitionId {
        let mut n = self.transitions.len() + 1;
        let mut id = TransitionId(format!("t{n}"));
        while self.transitions.iter().any(|t| t.id == id) {
            n += 1;
            id = TransitionId(format!("t{n}"));
        }
        self.transitions.push(Transition {
            id: id.clone(),
            source,
            target,
            event: event.into(),
            guard,
            effects,
        });
        id
    }

    fn fresh_state_id(&self, name: &str) -> StateId {
        let base = sanitize_id(name);
        let taken = |candidate: &str| self.states.iter().any(|s| s.id.0 == candidate);
        if !taken(&base) {
            return StateId(base);
        }
        (2..)
            .map(|n| format!("{base}_{n}"))
            .find(|c| !taken(c))
            .map(StateId)
            .unwrap()
    }

    /// The first initial pseudostate, if any.
    pub fn initial(&self) -> Option<&State> {
        self.states.iter().find(|s| s.kind == StateKind::Initial)
    }

    pub fn state(&self, id: &StateId) -> Option<&State> {
        self.states.iter().find(|s| &s.id == id)
    }

    pub fn transition(&self, id: &TransitionId) -> Option<&Transition> {
        self.transitions.iter().find(|t| &t.id == id)
    }

    /// Looks up a non-initial state by name, ignoring case.
    pub fn state_by_name(&self, name: &str) -> Option<&State> {
        let wanted = name.to_lowercase();
        self.states
            .iter()
            .find(|s| s.kind != StateKind::Initial && s.name.to_lowercase() == wanted)
    }

    pub fn state_name<'a>(&'a self, id: &'a StateId) -> &'a str {
        self.state(id)
            .map(|s| s.name.as_str())
            .unwrap_or(id.as_str())
    }

    pub fn is_final(&self, id: &StateId) -> bool {
        self.state(id).is_some_and(|s| s.kind == StateKind::Final)
    }

    pub fn is_initial(&self, id: &StateId) -> bool {
        self.state(id).is_some_and(|s| s.kind == StateKind::Initial)
    }

    /// Fails with `E_INVALID_MODEL` unless the chart validates without errors.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate(self);
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::new(Code::InvalidModel, report.summary()))
        }
    }
}

/// Identifier derived from a display name: lowercase ASCII alphanumerics
/// separated by single underscores.
pub fn sanitize_id(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let out = out.trim_matches('_');
    if out.is_empty() {
        "state".to_string()
    } else if out.starts_with(|c: char| c.is_ascii_digit()) {
        format!("s_{out}")
    } else {
        out.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: Code,
    pub message: String,
    #[serde(rename = "subjectId", skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.subject {
            Some(s) => write!(f, "{} [{}]: {}", self.code, s, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn error_codes(&self) -> Vec<Code> {
        self.errors.iter().map(|i| i.code).collect()
    }

    pub fn warning_codes(&self) -> Vec<Code> {
        self.warnings.iter().map(|i| i.code).collect()
    }

    /// One line per error, for embedding in an [`Error`] message.
    pub fn summary(&self) -> String {
        self.errors
            .iter()
            .map(Issue::to_string)
            .collect::<Vec<_>>()
            .join("; ")
    }

    fn push(&mut self, code: Code, subject: Option<&str>, message: String) {
        let issue = Issue {
            code,
            message,
            subject: subject.map(str::to_string),
        };
        if code.is_warning() {
            self.warnings.push(issue);
        } else {
            self.errors.push(issue);
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.errors {
            writeln!(f, "error {issue}")?;
        }
        for issue in &self.warnings {
            writeln!(f, "warning {issue}")?;
        }
        write!(
            f,
            "{} error{}, {} warning{}",
            self.errors.len(),
            if self.errors.len() == 1 { "" } else { "s" },
            self.warnings.len(),
            if self.warnings.len() == 1 { "" } else { "s" },
        )
    }
}

fn text_problem(text: &str) -> Option<String> {
    if text.trim().is_empty() {
        Some("is empty".into())
    } else if text.trim() != text {
        Some("has leading or trailing whitespace".into())
    } else if text.contains(['\n', '\r']) {
        Some("contains a line break".into())
    } else {
        extract_placeholders(text).err().map(|e| e.message)
    }
}

/// Checks a chart against the supported statechart subset. Never fails;
/// every problem ends up in the report.
pub fn validate(chart: &Statechart) -> ValidationReport {
    let mut report = ValidationReport::default();

    if let Some(problem) = text_problem(&chart.name) {
        report.push(Code::InvalidText, None, format!("chart name {problem}"));
    }
    if let Some(problem) = text_problem(&chart.subject) {
        report.push(Code::InvalidText, None, format!("subject {problem}"));
    } else if chart.subject.contains(['<', '>']) {
        report.push(
            Code::InvalidText,
            None,
            "subject contains angle brackets".into(),
        );
    }

    let mut ids = HashSet::new();
    for s in &chart.states {
        if !ids.insert(&s.id) {
            report.push(
                Code::DuplicateStateId,
                Some(s.id.as_str()),
                format!("state id {} is declared more than once", s.id),
            );
        }
    }

    let initials: Vec<&State> = chart
        .states
        .iter()
        .filter(|s| s.kind == StateKind::Initial)
        .collect();
    match initials.len() {
        0 => report.push(
            Code::NoInitial,
            None,
            "chart has no initial pseudostate".into(),
        ),
        1 => {}
        _ => {
            for extra in &initials[1..] {
                report.push(
                    Code::MultiInitial,
                    Some(extra.id.as_str()),
                    format!("{} is an additional initial pseudostate", extra.id),
                );
            }
        }
    }

    let mut names: HashMap<String, &StateId> = HashMap::new();
    for s in &chart.states {
        if s.name.is_empty() || s.name.trim() != s.name || s.name.contains(['<', '>', '\n', '\r']) {
            report.push(
                Code::InvalidStateName,
                Some(s.id.as_str()),
                format!(
                    "state name {:?} is empty, padded or contains angle brackets or line breaks",
                    s.name
                ),
            );
        }
        if s.kind == StateKind::Initial {
            continue;
        }
        if let Some(first) = names.insert(s.name.to_lowercase(), &s.id) {
            report.push(
                Code::DuplicateStateName,
                Some(s.id.as_str()),
                format!("state name {:?} is already used by {}", s.name, first),
            );
        }
    }

    let mut transition_ids = HashSet::new();
    let mut seen: BTreeMap<(&StateId, &str, Option<String>), &TransitionId> = BTreeMap::new();
    let mut by_event: BTreeMap<(&StateId, &str), Vec<&Transition>> = BTreeMap::new();
    for t in &chart.transitions {
        let subject = Some(t.id.as_str());
        if !transition_ids.insert(&t.id) {
            report.push(
                Code::DuplicateTransitionId,
                subject,
                format!("transition id {} is declared more than once", t.id),
            );
        }
        let source = chart.state(&t.source);
        let target = chart.state(&t.target);
        if source.is_none() {
            report.push(
                Code::DanglingEndpoint,
                subject,
                format!("source {} of {} does not exist", t.source, t.id),
            );
        }
        if target.is_none() {
            report.push(
                Code::DanglingEndpoint,
                subject,
                format!("target {} of {} does not exist", t.target, t.id),
            );
        }
        if target.is_some_and(|s| s.kind == StateKind::Initial) {
            report.push(
                Code::InitialIncoming,
                subject,
                format!("{} enters the initial pseudostate {}", t.id, t.target),
            );
        }
        if source.is_some_and(|s| s.kind == StateKind::Final) {
            report.push(
                Code::FinalOutgoing,
                subject,
                format!("{} leaves the final state {}", t.id, t.source),
            );
        }
        if t.event.trim().is_empty() {
            report.push(Code::EmptyEvent, subject, format!("{} has no event", t.id));
        } else if let Some(problem) = text_problem(&t.event) {
            report.push(
                Code::InvalidText,
                subject,
                format!("event of {} {problem}", t.id),
            );
        }
        for (i, effect) in t.effects.iter().enumerate() {
            if let Some(problem) = text_problem(effect) {
                report.push(
                    Code::InvalidText,
                    subject,
                    format!("effect {} of {} {problem}", i + 1, t.id),
                );
            }
        }
        if let Some(guard) = &t.guard {
            if !guard.is_well_formed() {
                report.push(
                    Code::InvalidText,
                    subject,
                    format!("guard of {} is not in flattened form", t.id),
                );
            }
        }

        let key = (&t.source, t.event.as_str(), t.rendered_guard());
        if let Some(first) = seen.get(&key) {
            report.push(
                Code::DuplicateTransition,
                subject,
                format!("{} repeats source, event and guard of {}", t.id, first),
            );
        } else {
            seen.insert(key, &t.id);
        }
        by_event
            .entry((&t.source, t.event.as_str()))
            .or_default()
            .push(t);

        check_placeholders(t, &mut report);
    }

    for ((source, event), group) in &by_event {
        let guards: BTreeSet<Option<String>> = group.iter().map(|t| t.rendered_guard()).collect();
        if guards.len() > 1 {
            let ids: Vec<&str> = group.iter().map(|t| t.id.as_str()).collect();
            report.push(
                Code::EventOverlap,
                Some(group[0].id.as_str()),
                format!(
                    "transitions {} leave {} on {:?} with different guards",
                    ids.join(", "),
                    source,
                    event
                ),
            );
        }
    }

    let reachable = reachable_states(chart);
    let mut outgoing: HashSet<&StateId> = HashSet::new();
    for t in &chart.transitions {
        outgoing.insert(&t.source);
    }
    for s in &chart.states {
        if s.kind != StateKind::Initial && !reachable.contains(&s.id) {
            report.push(
                Code::UnreachableState,
                Some(s.id.as_str()),
                format!("{} cannot be reached from the initial pseudostate", s.id),
            );
        }
        if s.kind != StateKind::Final && !outgoing.contains(&s.id) {
            report.push(
                Code::Deadend,
                Some(s.id.as_str()),
                format!("{} is not final but has no outgoing transitions", s.id),
            );
        }
    }

    report
}

fn check_placeholders(t: &Transition, report: &mut ValidationReport) {
    let in_event = extract_placeholders(&t.event).unwrap_or_default();
    let all = t.placeholders();
    for p in &all {
        if !in_event.contains(p) {
            report.push(
                Code::PlaceholderNotInEvent,
                Some(t.id.as_str()),
                format!("placeholder {p} of {} is not introduced by its event", t.id),
            );
        }
    }
    let mut folded: HashMap<String, &Placeholder> = HashMap::new();
    for p in &all {
        if let Some(other) = folded.insert(p.token().to_lowercase(), p) {
            report.push(
                Code::PlaceholderCase,
                Some(t.id.as_str()),
                format!(
                    "placeholders {other} and {p} of {} differ only by case",
                    t.id
                ),
            );
        }
    }
}

/// Transitions leaving `state`, in declaration order.
pub fn enabled_transitions<'a>(
    chart: &'a Statechart,
    state: &StateId,
) -> Result<Vec<&'a Transition>> {
    if chart.state(state).is_none() {
        return Err(Error::new(
            Code::UnknownState,
            format!("unknown state {state}"),
        ));
    }
    Ok(chart
        .transitions
        .iter()
        .filter(|t| &t.source == state)
        .collect())
}

/// States reachable from the initial pseudostate(s), including them.
pub fn reachable_states(chart: &Statechart) -> BTreeSet<StateId> {
    let mut seen: BTreeSet<StateId> = chart
        .states
        .iter()
        .filter(|s| s.kind == StateKind::Initial)
        .map(|s| s.id.clone())
        .collect();
    let mut queue: VecDeque<StateId> = seen.iter().cloned().collect();
    while let Some(current) = queue.pop_front() {
        for t in chart.transitions.iter().filter(|t| t.source == current) {
            if chart.state(&t.target).is_some() && seen.insert(t.target.clone()) {
                queue.push_back(t.target.clone());
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn minimal() -> Statechart {
        let mut c = Statechart::new("X", "x");
        let i = c.add_state(StateKind::Initial, "initial");
        let a = c.add_state(StateKind::Simple, "A");
        c.add_transition(i, a, "go", None, vec![]);
        c
    }

    #[test]
    fn seminar_is_clean() {
        let report = validate(&fixtures::seminar());
        assert_eq!(report, ValidationReport::default(), "{report}");
        assert_eq!(report.to_string(), "0 errors, 0 warnings");
    }

    #[test]
    fn vacuous_chart_only_warns() {
        let mut c = Statechart::new("X", "x");
        c.add_state(StateKind::Initial, "initial");
        let f = c.add_state(StateKind::Final, "final");
        let report = validate(&c);
        assert!(report.errors.is_empty());
        assert!(report
            .warnings
            .iter()
            .any(|w| w.code == Code::UnreachableState && w.subject.as_deref() == Some(f.as_str())));
    }

    #[test]
    fn retargeted_cancel_enters_initial() {
        let mut c = fixtures::seminar();
        let cancel = c
            .transitions
            .iter_mut()
            .find(|t| t.event == "I cancel it")
            .unwrap();
        cancel.target = StateId::from("initial");
        assert!(validate(&c).error_codes().contains(&Code::InitialIncoming));
    }

    #[test]
    fn structural_errors() {
        let mut c = minimal();
        c.states.retain(|s| s.kind != StateKind::Initial);
        assert!(validate(&c).error_codes().contains(&Code::NoInitial));

        let mut c = minimal();
        c.add_state(StateKind::Initial, "other start");
        assert_eq!(validate(&c).error_codes(), [Code::MultiInitial]);

        let mut c = minimal();
        c.transitions[0].target = StateId::from("nowhere");
        assert!(validate(&c).error_codes().contains(&Code::DanglingEndpoint));

        let mut c = minimal();
        let f = c.add_state(StateKind::Final, "final");
        c.add_transition(StateId::from("a"), f.clone(), "stop", None, vec![]);
        c.add_transition(f, StateId::from("a"), "restart", None, vec![]);
        assert_eq!(validate(&c).error_codes(), [Code::FinalOutgoing]);

        let mut c = minimal();
        c.transitions[0].event = "  ".into();
        assert_eq!(validate(&c).error_codes(), [Code::EmptyEvent]);

        let mut c = minimal();
        c.add_transition(
            StateId::from("initial"),
            StateId::from("a"),
            "go",
            None,
            vec![],
        );
        assert_eq!(validate(&c).error_codes(), [Code::DuplicateTransition]);
    }

    #[test]
    fn names_are_unique_ignoring_case() {
        let mut c = minimal();
        c.add_state(StateKind::Simple, "a");
        assert!(validate(&c)
            .error_codes()
            .contains(&Code::DuplicateStateName));
        let mut c = minimal();
        c.states[1].name = "A <x>".into();
        assert!(validate(&c).error_codes().contains(&Code::InvalidStateName));
    }

    #[test]
    fn overlap_is_a_warning() {
        let mut c = minimal();
        let b = c.add_state(StateKind::Final, "final");
        c.add_transition(StateId::from("a"), b.clone(), "e", None, vec![]);
        c.add_transition(
            StateId::from("a"),
            b,
            "e",
            Some(GuardExpr::atom("g").unwrap()),
            vec![],
        );
        let report = validate(&c);
        assert!(report.is_ok());
        assert_eq!(report.warning_codes(), [Code::EventOverlap]);
    }

    #[test]
    fn placeholder_warnings() {
        let mut c = minimal();
        c.transitions[0].effects = vec!["uses <n> and <N>".into()];
        let codes = validate(&c).warning_codes();
        assert!(codes.contains(&Code::PlaceholderNotInEvent));
        assert!(codes.contains(&Code::PlaceholderCase));
    }

    #[test]
    fn enabled_in_declaration_order() {
        let c = fixtures::seminar();
        let events: Vec<_> = enabled_transitions(&c, &StateId::from("scheduled"))
            .unwrap()
            .iter()
            .map(|t| t.event.clone())
            .collect();
        assert_eq!(
            events,
            ["I cancel it", "I open it to enrolment with <logsize>"]
        );
        assert!(enabled_transitions(&c, &StateId::from("final"))
            .unwrap()
            .is_empty());
        assert_eq!(
            enabled_transitions(&c, &StateId::from("NoSuchState"))
                .unwrap_err()
                .code,
            Code::UnknownState
        );
    }

    #[test]
    fn reachability() {
        let c = fixtures::seminar();
        let all: BTreeSet<_> = c.states.iter().map(|s| s.id.clone()).collect();
        assert_eq!(reachable_states(&c), all);

        let mut c = minimal();
        c.add_state(StateKind::Simple, "B");
        let got: Vec<_> = reachable_states(&c).into_iter().map(|s| s.0).collect();
        assert_eq!(got, ["a", "initial"]);

        let mut c = Statechart::new("X", "x");
        c.add_state(StateKind::Initial, "initial");
        assert_eq!(reachable_states(&c).len(), 1);
    }

    #[test]
    fn sanitized_ids() {
        assert_eq!(sanitize_id("Open For Enrollment"), "open_for_enrollment");
        assert_eq!(sanitize_id("  42 things!"), "s_42_things");
        assert_eq!(sanitize_id("--"), "state");
        let mut c = Statechart::new("X", "x");
        assert_eq!(c.add_state(StateKind::Simple, "A b").0, "a_b");
        assert_eq!(c.add_state(StateKind::Simple, "A-b").0, "a_b_2");
    }
}
