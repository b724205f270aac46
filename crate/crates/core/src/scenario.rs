//! Compiles statecharts into GIVEN-WHEN-THEN scenarios.
//!
//! Wording follows fixed templates keyed on the chart subject and state
//! names so that the text can be parsed back into the same structure:
//!
//! | clause                    | text                                     |
//! |---------------------------|------------------------------------------|
//! | not yet created           | `the {subject} does not exist yet`       |
//! | in a state                | `the {subject} is {State}`               |
//! | self-loop outcome         | `the {subject} remains {State}`          |
//! | default final state       | `the process is finished`                |
//! | named final state         | `the {subject} is {State} and the process is finished` |

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Code, Error, Result};
use crate::guard::{extract_placeholders, strip_placeholders, Placeholder};
use crate::model::{Statechart, Transition, TransitionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClauseKind {
    State,
    Guard,
    Event,
    Effect,
}

/// One GIVEN, WHEN or THEN line. State clauses refer to states by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "camelCase")]
pub enum Clause {
    /// The process instance has not been created: the initial pseudostate.
    NotYetExisting,
    InState(String),
    Remains(String),
    /// Final state; `None` for the default anonymous final state.
    Finished(Option<String>),
    Guard(String),
    Event(String),
    Effect(String),
}

impl Clause {
    pub fn kind(&self) -> ClauseKind {
        match self {
            Clause::NotYetExisting
            | Clause::InState(_)
            | Clause::Remains(_)
            | Clause::Finished(_) => ClauseKind::State,
            Clause::Guard(_) => ClauseKind::Guard,
            Clause::Event(_) => ClauseKind::Event,
            Clause::Effect(_) => ClauseKind::Effect,
        }
    }

    /// Name of the state a state clause refers to.
    pub fn state_name(&self) -> Option<&str> {
        match self {
            Clause::InState(n) | Clause::Remains(n) | Clause::Finished(Some(n)) => Some(n),
            _ => None,
        }
    }

    /// Clause wording for `subject`.
    pub fn text(&self, subject: &str) -> String {
        match self {
            Clause::NotYetExisting => format!("the {subject} does not exist yet"),
            Clause::InState(state) => format!("the {subject} is {state}"),
            Clause::Remains(state) => format!("the {subject} remains {state}"),
            Clause::Finished(None) => "the process is finished".to_string(),
            Clause::Finished(Some(state)) => {
                format!("the {subject} is {state} and the process is finished")
            }
            Clause::Guard(t) | Clause::Event(t) | Clause::Effect(t) => t.clone(),
        }
    }

    /// Applies `f` to free-text clauses; state clauses are returned as is.
    pub fn try_map_text(&self, f: impl FnOnce(&str) -> Result<String>) -> Result<Clause> {
        Ok(match self {
            Clause::Guard(t) => Clause::Guard(f(t)?),
            Clause::Event(t) => Clause::Event(f(t)?),
            Clause::Effect(t) => Clause::Effect(f(t)?),
            other => other.clone(),
        })
    }

    fn free_text(&self) -> Option<&str> {
        match self {
            Clause::Guard(t) | Clause::Event(t) | Clause::Effect(t) => Some(t),
            _ => None,
        }
    }
}

/// One WHEN block and its THEN clauses. `conditions` holds guard clauses
/// that precede the event in multi-step scenarios.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioStep {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<Clause>,
    pub when: Clause,
    pub then: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub given: Vec<Clause>,
    pub steps: Vec<ScenarioStep>,
    pub parameters: Vec<Placeholder>,
}

impl Scenario {
    /// Builds a scenario, deriving its parameter list from the clauses.
    pub fn new(name: impl Into<String>, given: Vec<Clause>, steps: Vec<ScenarioStep>) -> Self {
        let mut scenario = Scenario {
            name: name.into(),
            given,
            steps,
            parameters: Vec::new(),
        };
        scenario.parameters = scenario.collect_parameters();
        scenario
    }

    /// All clauses in reading order.
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.given.iter().chain(self.steps.iter().flat_map(|s| {
            s.conditions
                .iter()
                .chain(std::iter::once(&s.when))
                .chain(&s.then)
        }))
    }

    fn collect_parameters(&self) -> Vec<Placeholder> {
        let mut out: Vec<Placeholder> = Vec::new();
        for text in self.clauses().filter_map(Clause::free_text) {
            for p in extract_placeholders(text).unwrap_or_default() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioSet {
    pub chart_name: String,
    pub subject: String,
    pub scenarios: Vec<Scenario>,
}

impl ScenarioSet {
    pub fn new(chart_name: impl Into<String>, subject: impl Into<String>) -> Self {
        ScenarioSet {
            chart_name: chart_name.into(),
            subject: subject.into(),
            scenarios: Vec::new(),
        }
    }
}

/// A walk from the initial pseudostate that uses each transition at most
/// once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(pub Vec<TransitionId>);

impl Path {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn given_clauses(chart: &Statechart, t: &Transition) -> Vec<Clause> {
    if chart.is_initial(&t.source) {
        return vec![match &t.guard {
            Some(g) => Clause::Guard(g.to_string()),
            None => Clause::NotYetExisting,
        }];
    }
    let mut given = vec![Clause::InState(chart.state_name(&t.source).to_string())];
    given.extend(guard_clauses(t));
    given
}

fn guard_clauses(t: &Transition) -> Vec<Clause> {
    t.guard
        .iter()
        .flat_map(|g| g.conjuncts())
        .map(|c| Clause::Guard(c.to_string()))
        .collect()
}

fn outcome_clause(chart: &Statechart, t: &Transition) -> Clause {
    let target = chart.state(&t.target).expect("validated chart");
    if chart.is_final(&t.target) {
        if target.is_anonymous_final() {
            Clause::Finished(None)
        } else {
            Clause::Finished(Some(target.name.clone()))
        }
    } else if t.target == t.source {
        Clause::Remains(target.name.clone())
    } else {
        Clause::InState(target.name.clone())
    }
}

fn step_for(chart: &Statechart, t: &Transition, conditions: Vec<Clause>) -> ScenarioStep {
    let mut then = vec![outcome_clause(chart, t)];
    then.extend(t.effects.iter().cloned().map(Clause::Effect));
    ScenarioStep {
        conditions,
        when: Clause::Event(t.event.clone()),
        then,
    }
}

fn base_name(chart: &Statechart, t: &Transition) -> String {
    let event = strip_placeholders(&t.event);
    let span = format!(
        "({} -> {})",
        chart.state_name(&t.source),
        chart.state_name(&t.target)
    );
    if event.is_empty() {
        span
    } else {
        format!("{event} {span}")
    }
}

/// Appends `#2`, `#3`, ... to repeated names.
fn uniquify(names: Vec<String>) -> Vec<String> {
    let mut used: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::with_capacity(names.len());
    for name in &names {
        used.entry(name.clone()).or_insert(0);
    }
    for name in names {
        let count = used.get_mut(&name).unwrap();
        *count += 1;
        if *count == 1 {
            out.push(name);
            continue;
        }
        let mut n = *count;
        let mut candidate = format!("{name} #{n}");
        while used.contains_key(&candidate) {
            n += 1;
            candidate = format!("{name} #{n}");
        }
        used.insert(candidate.clone(), 1);
        out.push(candidate);
    }
    out
}

fn transition_names(chart: &Statechart) -> Vec<String> {
    uniquify(
        chart
            .transitions
            .iter()
            .map(|t| base_name(chart, t))
            .collect(),
    )
}

fn single_step(chart: &Statechart, t: &Transition, name: String) -> Scenario {
    Scenario::new(
        name,
        given_clauses(chart, t),
        vec![step_for(chart, t, Vec::new())],
    )
}

/// Scenario describing one transition.
pub fn scenario_for_transition(chart: &Statechart, id: &TransitionId) -> Result<Scenario> {
    chart.ensure_valid()?;
    let index = chart
        .transitions
        .iter()
        .position(|t| &t.id == id)
        .ok_or_else(|| Error::new(Code::UnknownTransition, format!("unknown transition {id}")))?;
    let name = transition_names(chart).swap_remove(index);
    Ok(single_step(chart, &chart.transitions[index], name))
}

/// One scenario per transition, in declaration order.
pub fn generate_transition_suite(chart: &Statechart) -> Result<ScenarioSet> {
    chart.ensure_valid()?;
    let mut set = ScenarioSet::new(chart.name.clone(), chart.subject.clone());
    for (t, name) in chart.transitions.iter().zip(transition_names(chart)) {
        set.scenarios.push(single_step(chart, t, name));
    }
    Ok(set)
}

/// Maximal transition-simple paths from the initial pseudostate, at most
/// `max_len` long, in lexicographic order of transition positions.
pub fn enumerate_paths(chart: &Statechart, max_len: usize) -> Result<Vec<Path>> {
    chart.ensure_valid()?;
    if max_len == 0 {
        return Err(Error::new(
            Code::InvalidArgument,
            "maximum path length must be at least 1",
        ));
    }
    let initial = &chart.initial().expect("validated chart").id;
    let mut out = Vec::new();
    let mut used = vec![false; chart.transitions.len()];
    let mut stack = Vec::new();
    extend_paths(chart, initial, max_len, &mut used, &mut stack, &mut out);
    Ok(out)
}

fn extend_paths(
    chart: &Statechart,
    at: &crate::model::StateId,
    max_len: usize,
    used: &mut [bool],
    stack: &mut Vec<usize>,
    out: &mut Vec<Path>,
) {
    let next: Vec<usize> = if stack.len() == max_len {
        Vec::new()
    } else {
        chart
            .transitions
            .iter()
            .enumerate()
            .filter(|(i, t)| !used[*i] && &t.source == at)
            .map(|(i, _)| i)
            .collect()
    };
    if next.is_empty() {
        if !stack.is_empty() {
            out.push(Path(
                stack
                    .iter()
                    .map(|&i| chart.transitions[i].id.clone())
                    .collect(),
            ));
        }
        return;
    }
    for i in next {
        used[i] = true;
        stack.push(i);
        let target = chart.transitions[i].target.clone();
        extend_paths(chart, &target, max_len, used, stack, out);
        stack.pop();
        used[i] = false;
    }
}

/// Resolves and checks a path: starts at the initial pseudostate, each step
/// leaves where the previous one arrived, and no transition repeats.
fn resolve_path<'a>(chart: &'a Statechart, path: &Path) -> Result<Vec<&'a Transition>> {
    let walk = resolve_walk(chart, &path.0)?;
    for (i, id) in path.0.iter().enumerate() {
        if path.0[..i].contains(id) {
            return Err(Error::new(
                Code::BrokenPath,
                format!("transition {id} repeats at step {}", i + 1),
            ));
        }
    }
    Ok(walk)
}

/// Like [`resolve_path`] but allows transitions to repeat.
pub(crate) fn resolve_walk<'a>(
    chart: &'a Statechart,
    ids: &[TransitionId],
) -> Result<Vec<&'a Transition>> {
    if ids.is_empty() {
        return Err(Error::new(Code::BrokenPath, "path is empty"));
    }
    let mut at = chart.initial().expect("validated chart").id.clone();
    let mut out = Vec::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        let t = chart.transition(id).ok_or_else(|| {
            Error::new(Code::UnknownTransition, format!("unknown transition {id}"))
        })?;
        if t.source != at {
            return Err(Error::new(
                Code::BrokenPath,
                format!(
                    "step {} ({id}) leaves {} but the path is at {at}",
                    i + 1,
                    t.source
                ),
            ));
        }
        at = t.target.clone();
        out.push(t);
    }
    Ok(out)
}

pub(crate) fn walk_scenario(chart: &Statechart, walk: &[&Transition]) -> Scenario {
    let first = walk[0];
    let mut visited = vec![chart.state_name(&first.source)];
    visited.extend(walk.iter().map(|t| chart.state_name(&t.target)));
    let name = format!("Path: {}", visited.join(" -> "));
    let mut steps = vec![step_for(chart, first, Vec::new())];
    for t in &walk[1..] {
        steps.push(step_for(chart, t, guard_clauses(t)));
    }
    Scenario::new(name, given_clauses(chart, first), steps)
}

/// Multi-step scenario for a path.
pub fn scenario_for_path(chart: &Statechart, path: &Path) -> Result<Scenario> {
    chart.ensure_valid()?;
    let walk = resolve_path(chart, path)?;
    Ok(walk_scenario(chart, &walk))
}

/// Path scenarios for every enumerated path, names made unique.
pub fn generate_path_suite(chart: &Statechart, max_len: usize) -> Result<ScenarioSet> {
    let paths = enumerate_paths(chart, max_len)?;
    let mut scenarios = paths
        .iter()
        .map(|p| scenario_for_path(chart, p))
        .collect::<Result<Vec<_>>>()?;
    let names = uniquify(scenarios.iter().map(|s| s.name.clone()).collect());
    for (s, name) in scenarios.iter_mut().zip(names) {
        s.name = name;
    }
    Ok(ScenarioSet {
        chart_name: chart.name.clone(),
        subject: chart.subject.clone(),
        scenarios,
    })
}
