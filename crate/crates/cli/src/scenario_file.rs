//! JSON scenario files.
//!
//! ```json
//! {
//!   "name": "ghz-protocol",
//!   "initial_state": "ghz3x2",
//!   "parties": ["A", "B", "C"],
//!   "qubit_map": [{ "observer": "A", "slot": "primary", "qubit": 0 }, ...],
//!   "steps": [
//!     { "observer": "A", "slot": "aux", "basis": "x" },
//!     { "observer": "A", "slot": "primary",
//!       "conditional": { "on": "aux", "if_plus": "y", "if_minus": "x" } }
//!   ],
//!   "checks": ["constraints", { "world_count": 16 }, { "no_signaling": ["C"] }, "census"]
//! }
//! ```
//!
//! `initial_state` is `"ghz3"`, `"ghz3x2"` or `{ "amplitudes": [[re, im], ...] }`.

use std::collections::BTreeMap;

use ghz_worlds::ghz::{
    canonical_scenario, Experiment, Preparation, ALICE_BOB_ONLY, ALL_Z, CHARLEY_DEVIATION,
    GHZ_PROTOCOL,
};
use ghz_worlds::scenario::RecordKey;
use ghz_worlds::{Basis, BasisRule, MeasurementStep, Observer, Scenario, Slot, StateVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::SchemaError;

/// Explicit amplitude lists must have squared norm within this of 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub initial_state: InitialState,
    pub parties: Vec<Observer>,
    pub qubit_map: Vec<QubitAssignment>,
    pub steps: Vec<StepSpec>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialState {
    Ghz3,
    Ghz3x2,
    Amplitudes(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitAssignment {
    pub observer: Observer,
    pub slot: Slot,
    pub qubit: usize,
}

/// Exactly one of `basis` and `conditional` must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub observer: Observer,
    pub slot: Slot,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Basis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditional: Option<ConditionalSpec>,
}

/// Chooses the basis from the same observer's earlier outcome in slot `on`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalSpec {
    pub on: Slot,
    pub if_plus: Basis,
    pub if_minus: Basis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// The GHZ constraint equations hold in every applicable world.
    Constraints,
    /// The run yields exactly this many worlds.
    WorldCount(usize),
    /// The listed observers' nonselective reduced state is unchanged by the
    /// steps of every other observer.
    NoSignaling(Vec<Observer>),
    /// No local hidden-variable assignment satisfies all constraint equations.
    Census,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<ScenarioFile, SchemaError> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| SchemaError::new(vec![e.to_string()]))?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario files serialize")
    }

    /// Structural checks beyond what deserialization enforces. Collects every
    /// offending field rather than stopping at the first.
    pub fn validate(&self) -> Result<(), SchemaError> {
        let mut problems = Vec::new();
        if self.name.trim().is_empty() {
            problems.push("name: must not be empty".to_string());
        }
        if self.parties.is_empty() {
            problems.push("parties: must not be empty".to_string());
        }
        for (i, step) in self.steps.iter().enumerate() {
            match (&step.basis, &step.conditional) {
                (Some(_), Some(_)) => problems.push(format!(
                    "steps[{i}]: give either basis or conditional, not both"
                )),
                (None, None) => problems.push(format!("steps[{i}]: missing basis or conditional")),
                _ => {}
            }
        }
        for (i, check) in self.checks.iter().enumerate() {
            if let Check::NoSignaling(obs) = check {
                if obs.is_empty() {
                    problems.push(format!("checks[{i}].no_signaling: observer list is empty"));
                }
                for o in obs {
                    if !self.parties.contains(o) {
                        problems.push(format!("checks[{i}].no_signaling: unknown observer {o}"));
                    }
                }
            }
        }
        match self.initial() {
            Ok(state) => {
                for (i, qa) in self.qubit_map.iter().enumerate() {
                    if qa.qubit >= state.n_qubits() {
                        problems.push(format!(
                            "qubit_map[{i}].qubit: {} is out of range for a {}-qubit initial state",
                            qa.qubit,
                            state.n_qubits()
                        ));
                    }
                }
            }
            Err(e) => problems.extend(e.problems),
        }
        if problems.is_empty() {
            if let Err(e) = self.scenario() {
                problems.extend(e.problems);
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SchemaError::new(problems))
        }
    }

    pub fn initial(&self) -> Result<StateVector, SchemaError> {
        let field = |msg: String| SchemaError::new(vec![format!("initial_state: {msg}")]);
        match &self.initial_state {
            InitialState::Ghz3 => Ok(Preparation::Ghz3.state()),
            InitialState::Ghz3x2 => Ok(Preparation::Ghz3x2.state()),
            InitialState::Amplitudes(raw) => {
                let amps: Vec<Complex64> =
                    raw.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                let state = StateVector::from_amplitudes(amps).map_err(|e| field(e.to_string()))?;
                let norm = state.norm_sqr();
                if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
                    return Err(field(format!(
                        "squared norm {norm} is not within {NORMALIZATION_TOLERANCE} of 1"
                    )));
                }
                state.normalized().map_err(|e| field(e.to_string()))
            }
        }
    }

    pub fn scenario(&self) -> Result<Scenario, SchemaError> {
        let mut map = BTreeMap::new();
        for (i, qa) in self.qubit_map.iter().enumerate() {
            let key = RecordKey::new(qa.observer.clone(), qa.slot);
            if map.insert(key.clone(), qa.qubit).is_some() {
                return Err(SchemaError::new(vec![format!(
                    "qubit_map[{i}]: {key} listed twice"
                )]));
            }
        }
        let steps = self
            .steps
            .iter()
            .map(|s| MeasurementStep {
                key: RecordKey::new(s.observer.clone(), s.slot),
                rule: match (&s.basis, &s.conditional) {
                    (Some(b), _) => BasisRule::Fixed(*b),
                    (None, Some(c)) => BasisRule::Conditional {
                        on: RecordKey::new(s.observer.clone(), c.on),
                        if_plus: c.if_plus,
                        if_minus: c.if_minus,
                    },
                    // Rejected by validate(); treated as z so this stays total.
                    (None, None) => BasisRule::Fixed(Basis::Z),
                },
            })
            .collect();
        Scenario::new(self.parties.clone(), map, steps)
            .map_err(|e| SchemaError::new(vec![format!("steps/qubit_map: {e}")]))
    }

    /// Builds the file form of a built-in experiment with the given checks.
    pub fn from_experiment(exp: &Experiment, checks: Vec<Check>) -> ScenarioFile {
        let scenario = &exp.scenario;
        ScenarioFile {
            name: exp.name.clone(),
            initial_state: match exp.preparation {
                Preparation::Ghz3 => InitialState::Ghz3,
                Preparation::Ghz3x2 => InitialState::Ghz3x2,
            },
            parties: scenario.parties().to_vec(),
            qubit_map: scenario
                .qubit_map()
                .iter()
                .map(|(k, &q)| (q, k))
                .collect::<BTreeMap<_, _>>()
                .into_iter()
                .map(|(qubit, k)| QubitAssignment {
                    observer: k.observer.clone(),
                    slot: k.slot,
                    qubit,
                })
                .collect(),
            steps: scenario
                .steps()
                .iter()
                .map(|s| {
                    let (basis, conditional) = match &s.rule {
                        BasisRule::Fixed(b) => (Some(*b), None),
                        BasisRule::Conditional {
                            on,
                            if_plus,
                            if_minus,
                        } => (
                            None,
                            Some(ConditionalSpec {
                                on: on.slot,
                                if_plus: *if_plus,
                                if_minus: *if_minus,
                            }),
                        ),
                    };
                    StepSpec {
                        observer: s.key.observer.clone(),
                        slot: s.key.slot,
                        basis,
                        conditional,
                    }
                })
                .collect(),
            checks,
        }
    }
}

/// Built-in scenario names accepted by `run` and `dump-scenario`.
pub const BUILTIN_NAMES: [&str; 4] = [GHZ_PROTOCOL, CHARLEY_DEVIATION, ALL_Z, ALICE_BOB_ONLY];

pub fn builtin(name: &str) -> Option<ScenarioFile> {
    let charley = || Check::NoSignaling(vec![Observer::new("C")]);
    let checks = match name {
        GHZ_PROTOCOL => vec![
            Check::WorldCount(16),
            Check::Constraints,
            charley(),
            Check::Census,
        ],
        CHARLEY_DEVIATION => vec![Check::WorldCount(32), Check::Constraints, charley()],
        ALL_Z => vec![Check::WorldCount(4), charley()],
        ALICE_BOB_ONLY => vec![Check::WorldCount(16), charley()],
        _ => return None,
    };
    Some(ScenarioFile::from_experiment(
        &canonical_scenario(name)?,
        checks,
    ))
}
