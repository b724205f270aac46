//! Interactive step-by-step execution of a statechart.
//!
//! Guards are free text and cannot be evaluated, so picking a guarded
//! choice asserts that its guard holds. Every operation returns a new
//! [`Session`] value and leaves the input untouched.

pub mod service;
pub mod store;

use std::fmt;
use std::sync::Arc;
use std::time::SystemTime;

use serde::{Deserialize, Serialize};

use crate::error::{Code, Error, Result};
use crate::feature::render_feature;
use crate::guard::{bind_placeholders, Bindings, Placeholder};
use crate::model::{enabled_transitions, StateId, Statechart, TransitionId};
use crate::scenario::{resolve_walk, walk_scenario, Scenario, ScenarioSet, ScenarioStep};

/// Random 128-bit session token in lowercase hex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SessionId(pub String);

impl SessionId {
    pub fn random() -> Self {
        SessionId(format!("{:032x}", rand::random::<u128>()))
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Step {
    #[serde(rename = "transitionId")]
    pub transition: TransitionId,
    pub bindings: Bindings,
}

/// An enabled transition offered to the user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Choice {
    #[serde(rename = "transitionId")]
    pub transition: TransitionId,
    pub event_text: String,
    pub guard_text: Option<String>,
    pub effect_texts: Vec<String>,
    pub required_placeholders: Vec<Placeholder>,
    pub target_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Session {
    pub id: SessionId,
    pub chart: Arc<Statechart>,
    pub current: StateId,
    pub steps: Vec<Step>,
    pub created_at: SystemTime,
    pub updated_at: SystemTime,
}

impl Session {
    /// Fresh session at the initial pseudostate.
    pub fn create(chart: Arc<Statechart>) -> Result<Session> {
        chart.ensure_valid()?;
        let current = chart.initial().expect("validated chart").id.clone();
        let now = SystemTime::now();
        Ok(Session {
            id: SessionId::random(),
            chart,
            current,
            steps: Vec::new(),
            created_at: now,
            updated_at: now,
        })
    }

    /// One choice per transition leaving the current state.
    pub fn choices(&self) -> Vec<Choice> {
        enabled_transitions(&self.chart, &self.current)
            .unwrap_or_default()
            .into_iter()
            .map(|t| Choice {
                transition: t.id.clone(),
                event_text: t.event.clone(),
                guard_text: t.rendered_guard(),
                effect_texts: t.effects.clone(),
                required_placeholders: t.placeholders(),
                target_name: self.chart.state_name(&t.target).to_string(),
            })
            .collect()
    }

    /// Takes transition `id` with `bindings` for exactly its placeholders.
    pub fn fire(&self, id: &TransitionId, bindings: Bindings) -> Result<Session> {
        let transition = self
            .chart
            .transition(id)
            .filter(|t| t.source == self.current)
            .ok_or_else(|| {
                Error::new(
                    Code::NotEnabled,
                    format!(
                        "transition {id} does not leave the current state {}",
                        self.current
                    ),
                )
            })?;
        let required = transition.placeholders();
        if let Some(missing) = required.iter().find(|p| !bindings.contains_key(p.token())) {
            return Err(Error::new(
                Code::UnboundPlaceholder,
                format!("no value bound for placeholder {missing}"),
            ));
        }
        if let Some(extra) = bindings
            .keys()
            .find(|k| !required.iter().any(|p| p.token() == k.as_str()))
        {
            return Err(Error::new(
                Code::ExtraBinding,
                format!("transition {id} has no placeholder <{extra}>"),
            ));
        }
        if let Some((token, _)) = bindings
            .iter()
            .find(|(_, v)| v.contains(['<', '>', '\n', '\r']))
        {
            return Err(Error::new(
                Code::InvalidBinding,
                format!("value for <{token}> contains angle brackets or line breaks"),
            ));
        }
        let mut next = self.clone();
        next.steps.push(Step {
            transition: id.clone(),
            bindings,
        });
        next.current = transition.target.clone();
        next.updated_at = SystemTime::now();
        Ok(next)
    }

    /// Drops the last step; a fresh session is returned unchanged.
    pub fn undo(&self) -> Session {
        let mut next = self.clone();
        if next.steps.pop().is_some() {
            next.current = match next.steps.last() {
                Some(step) => self
                    .chart
                    .transition(&step.transition)
                    .expect("replayed step")
                    .target
                    .clone(),
                None => self.chart.initial().expect("validated chart").id.clone(),
            };
            next.updated_at = SystemTime::now();
        }
        next
    }

    /// State reached by replaying the steps from the initial pseudostate.
    pub fn replay(&self) -> Result<StateId> {
        let initial = self.chart.initial().expect("validated chart").id.clone();
        if self.steps.is_empty() {
            return Ok(initial);
        }
        let ids: Vec<TransitionId> = self.steps.iter().map(|s| s.transition.clone()).collect();
        let walk = resolve_walk(&self.chart, &ids)?;
        Ok(walk.last().unwrap().target.clone())
    }

    /// The steps so far as one bound multi-step scenario.
    pub fn trace_scenario(&self) -> Result<Scenario> {
        if self.steps.is_empty() {
            return Err(Error::new(Code::EmptyTrace, "no steps have been taken"));
        }
        let ids: Vec<TransitionId> = self.steps.iter().map(|s| s.transition.clone()).collect();
        let walk = resolve_walk(&self.chart, &ids)?;
        let scenario = walk_scenario(&self.chart, &walk);

        let bind = |bindings: &Bindings, clauses: &[crate::scenario::Clause]| {
            clauses
                .iter()
                .map(|c| c.try_map_text(|t| bind_placeholders(t, bindings)))
                .collect::<Result<Vec<_>>>()
        };
        let given = bind(&self.steps[0].bindings, &scenario.given)?;
        let mut steps = Vec::with_capacity(scenario.steps.len());
        for (step, taken) in scenario.steps.iter().zip(&self.steps) {
            steps.push(ScenarioStep {
                conditions: bind(&taken.bindings, &step.conditions)?,
                when: step
                    .when
                    .try_map_text(|t| bind_placeholders(t, &taken.bindings))?,
                then: bind(&taken.bindings, &step.then)?,
            });
        }
        Ok(Scenario::new(scenario.name, given, steps))
    }

    /// Feature text for the trace, as a single-scenario document.
    pub fn render_trace(&self) -> Result<String> {
        let mut set = ScenarioSet::new(self.chart.name.clone(), self.chart.subject.clone());
        set.scenarios.push(self.trace_scenario()?);
        Ok(render_feature(&set))
    }
}
