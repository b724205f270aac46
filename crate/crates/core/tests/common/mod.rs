//! Shared test support: a seeded random chart generator and independent
//! oracles for chart isomorphism and path enumeration.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statebdd::{validate, GuardExpr, StateKind, Statechart};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const STATE_WORDS: &[&str] = &[
    "Draft",
    "Submitted",
    "Under Review",
    "Approved",
    "Rejected",
    "Archived",
    "Paused",
    "Active",
    "Waiting For Payment",
    "Shipped",
    "Delivered",
    "Returned",
    "On Hold",
    "Escalated",
];
const SUBJECTS: &[&str] = &["ticket", "order", "claim", "loan request"];
const VERBS: &[&str] = &[
    "submit", "review", "approve", "reject", "ship", "pay for", "escalate", "pause", "resume",
    "cancel",
];
const OBJECTS: &[&str] = &["it", "the form", "the item", "the request", "everything"];
const CONDITION_WORDS: &[&str] = &[
    "stock is low",
    "manager is present",
    "budget remains",
    "payment cleared",
    "user is verified",
    "deadline passed",
    "queue is empty",
    "fraud suspected",
];
const EFFECT_WORDS: &[&str] = &[
    "an email is sent",
    "the audit log grows",
    "a refund is issued",
    "stock is reserved",
    "the clock stops",
    "a badge appears",
];
const TOKENS: &[&str] = &["size", "amount", "due date", "who"];

fn with_placeholder(rng: &mut ChaCha8Rng, text: &str, tokens: &[&str]) -> String {
    match tokens.choose(rng) {
        Some(token) if rng.random_bool(0.5) => format!("{text} <{token}>"),
        _ => text.to_string(),
    }
}

/// A random guard of at most `depth` operator levels over condition atoms.
pub fn random_guard(rng: &mut ChaCha8Rng, depth: u32, tokens: &[&str]) -> GuardExpr {
    let leaf = depth == 0 || rng.random_bool(0.35);
    if leaf {
        let words = CONDITION_WORDS.choose(rng).unwrap();
        return GuardExpr::atom(&with_placeholder(rng, words, tokens)).unwrap();
    }
    match rng.random_range(0..3) {
        0 => GuardExpr::not(random_guard(rng, depth - 1, tokens)),
        op => {
            let n = rng.random_range(2..=3);
            let children: Vec<_> = (0..n)
                .map(|_| random_guard(rng, depth - 1, tokens))
                .collect();
            if op == 1 {
                GuardExpr::and(children)
            } else {
                GuardExpr::or(children)
            }
        }
    }
}

/// A valid flat chart: at most 8 states, 16 transitions, guard depth 3 and
/// 2 distinct placeholders per transition. Every state touches a transition.
pub fn random_chart(rng: &mut ChaCha8Rng, index: usize) -> Statechart {
    loop {
        if let Some(chart) = try_random_chart(rng, index) {
            return chart;
        }
    }
}

fn try_random_chart(rng: &mut ChaCha8Rng, index: usize) -> Option<Statechart> {
    let subject = SUBJECTS.choose(rng).unwrap();
    let mut chart = Statechart::new(format!("Random {index}"), *subject);
    let initial = chart.add_state(StateKind::Initial, "initial");

    let n_simple = rng.random_range(1..=5);
    let n_final = rng.random_range(0..=2);
    let mut names: Vec<&str> = STATE_WORDS.to_vec();
    names.shuffle(rng);
    let simple: Vec<_> = (0..n_simple)
        .map(|i| chart.add_state(StateKind::Simple, names[i]))
        .collect();
    let mut finals = Vec::new();
    for i in 0..n_final {
        let name = if i == 0 && rng.random_bool(0.5) {
            "final"
        } else {
            names[n_simple + i]
        };
        finals.push(chart.add_state(StateKind::Final, name));
    }

    let n_transitions = rng.random_range(1..=16usize);
    let mut sources = vec![initial.clone()];
    sources.extend(simple.iter().cloned());
    let mut targets = simple.clone();
    targets.extend(finals.iter().cloned());

    for i in 0..n_transitions {
        let source = if i == 0 {
            initial.clone()
        } else {
            sources.choose(rng).unwrap().clone()
        };
        let target = targets.choose(rng).unwrap().clone();
        let mut tokens: Vec<&str> = TOKENS.to_vec();
        tokens.shuffle(rng);
        let tokens = &tokens[..rng.random_range(0..=2)];

        let verb = VERBS.choose(rng).unwrap();
        let object = OBJECTS.choose(rng).unwrap();
        let event = with_placeholder(rng, &format!("I {verb} {object}"), tokens);
        let depth = rng.random_range(0..=3);
        let guard = rng
            .random_bool(0.6)
            .then(|| random_guard(rng, depth, tokens));
        let effects = (0..rng.random_range(0..=2))
            .map(|_| {
                let words = EFFECT_WORDS.choose(rng).unwrap();
                with_placeholder(rng, words, tokens)
            })
            .collect();
        chart.add_transition(source, target, event, guard, effects);
    }

    let touched: BTreeSet<_> = chart
        .transitions
        .iter()
        .flat_map(|t| [t.source.clone(), t.target.clone()])
        .collect();
    let all_touched = chart.states.iter().all(|s| touched.contains(&s.id));
    (all_touched && validate(&chart).is_ok()).then_some(chart)
}

/// Canonical form with ids replaced by state names; the initial
/// pseudostate is keyed by its kind since not every format keeps its name.
/// (source, target, event, guard, effects) with states given by name.
pub type CanonicalTransition = (String, String, String, Option<String>, Vec<String>);

#[derive(Debug, PartialEq, Eq)]
pub struct Canonical {
    pub name: String,
    pub subject: String,
    pub states: BTreeSet<(String, String)>,
    pub transitions: Vec<CanonicalTransition>,
}

pub fn canonical(chart: &Statechart) -> Canonical {
    let label = |id| {
        let s = chart.state(id).expect("endpoint exists");
        match s.kind {
            StateKind::Initial => "<initial>".to_string(),
            _ => s.name.clone(),
        }
    };
    let states = chart
        .states
        .iter()
        .map(|s| (format!("{:?}", s.kind), label(&s.id)))
        .collect();
    let mut transitions: Vec<_> = chart
        .transitions
        .iter()
        .map(|t| {
            (
                label(&t.source),
                label(&t.target),
                t.event.clone(),
                t.guard.as_ref().map(|g| format!("{g:?}")),
                t.effects.clone(),
            )
        })
        .collect();
    transitions.sort();
    Canonical {
        name: chart.name.clone(),
        subject: chart.subject.clone(),
        states,
        transitions,
    }
}

pub fn isomorphic(a: &Statechart, b: &Statechart) -> bool {
    canonical(a) == canonical(b)
}

/// Counts maximal transition-simple paths of length at most `max_len` by
/// generating every index sequence breadth first and filtering.
pub fn brute_force_path_count(chart: &Statechart, max_len: usize) -> usize {
    let n = chart.transitions.len();
    let initial = chart
        .states
        .iter()
        .find(|s| s.kind == StateKind::Initial)
        .unwrap()
        .id
        .clone();
    let end_of = |seq: &[usize]| -> Option<statebdd::StateId> {
        let mut at = initial.clone();
        for (k, &i) in seq.iter().enumerate() {
            if seq[..k].contains(&i) || chart.transitions[i].source != at {
                return None;
            }
            at = chart.transitions[i].target.clone();
        }
        Some(at)
    };
    let mut count = 0;
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            for i in 0..n {
                let mut candidate = seq.clone();
                candidate.push(i);
                if end_of(&candidate).is_some() {
                    next.push(candidate);
                }
            }
        }
        for seq in &next {
            let at = end_of(seq).unwrap();
            let extendable = (0..n).any(|i| !seq.contains(&i) && chart.transitions[i].source == at);
            if len == max_len || !extendable {
                count += 1;
            }
        }
        frontier = next;
    }
    count
}
