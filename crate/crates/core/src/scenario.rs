//! Declarative measurement programs.
//!
//! A [`Scenario`] names the parties, says which qubit each (observer, slot)
//! pair holds, and lists measurement steps in program order. A step's basis is
//! either fixed or chosen from one of the same observer's earlier outcomes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::quantum::{Basis, Outcome};
use crate::{Error, Result};

/// Party identifier, e.g. `A`, `B`, `C`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Observer(String);

impl Observer {
    pub fn new(name: impl Into<String>) -> Self {
        Observer(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Observer {
    fn from(s: &str) -> Self {
        Observer::new(s)
    }
}

impl fmt::Display for Observer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Which of an observer's particles a step acts on. `Aux` sorts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Aux,
    Primary,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Aux => f.write_str("aux"),
            Slot::Primary => f.write_str("primary"),
        }
    }
}

/// An (observer, slot) pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordKey {
    pub observer: Observer,
    pub slot: Slot,
}

impl RecordKey {
    pub fn new(observer: impl Into<Observer>, slot: Slot) -> Self {
        RecordKey {
            observer: observer.into(),
            slot,
        }
    }
}

impl fmt::Display for RecordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.observer, self.slot)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisRule {
    Fixed(Basis),
    /// Basis picked from the outcome already recorded at `on`.
    Conditional {
        on: RecordKey,
        if_plus: Basis,
        if_minus: Basis,
    },
}

impl BasisRule {
    pub fn resolve(&self, lookup: impl Fn(&RecordKey) -> Option<Outcome>) -> Result<Basis> {
        match self {
            BasisRule::Fixed(b) => Ok(*b),
            BasisRule::Conditional {
                on,
                if_plus,
                if_minus,
            } => match lookup(on) {
                Some(Outcome::Plus) => Ok(*if_plus),
                Some(Outcome::Minus) => Ok(*if_minus),
                None => Err(Error::ScenarioDefinition(format!(
                    "condition references {on}, which has not been recorded"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementStep {
    pub key: RecordKey,
    pub rule: BasisRule,
}

impl MeasurementStep {
    pub fn fixed(observer: &str, slot: Slot, basis: Basis) -> Self {
        MeasurementStep {
            key: RecordKey::new(observer, slot),
            rule: BasisRule::Fixed(basis),
        }
    }

    /// Measures `slot` in `if_plus` or `if_minus` depending on the observer's
    /// earlier outcome at `on`.
    pub fn conditional(
        observer: &str,
        slot: Slot,
        on: Slot,
        if_plus: Basis,
        if_minus: Basis,
    ) -> Self {
        MeasurementStep {
            key: RecordKey::new(observer, slot),
            rule: BasisRule::Conditional {
                on: RecordKey::new(observer, on),
                if_plus,
                if_minus,
            },
        }
    }
}

/// A validated measurement program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    parties: Vec<Observer>,
    qubit_map: BTreeMap<RecordKey, usize>,
    steps: Vec<MeasurementStep>,
}

impl Scenario {
    pub fn new(
        parties: Vec<Observer>,
        qubit_map: BTreeMap<RecordKey, usize>,
        steps: Vec<MeasurementStep>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &parties {
            if !seen.insert(p) {
                return Err(Error::ScenarioDefinition(format!("party {p} listed twice")));
            }
        }
        let mut used_qubits = BTreeMap::new();
        for (key, &qubit) in &qubit_map {
            if !parties.contains(&key.observer) {
                return Err(Error::ScenarioDefinition(format!(
                    "qubit map entry {key} names an unknown party"
                )));
            }
            if let Some(prev) = used_qubits.insert(qubit, key) {
                return Err(Error::ScenarioDefinition(format!(
                    "qubit {qubit} assigned to both {prev} and {key}"
                )));
            }
        }
        let scenario = Scenario {
            parties,
            qubit_map,
            steps,
        };
        scenario.check_steps(&scenario.steps)?;
        Ok(scenario)
    }

    fn check_steps(&self, steps: &[MeasurementStep]) -> Result<()> {
        for (i, step) in steps.iter().enumerate() {
            if !self.qubit_map.contains_key(&step.key) {
                return Err(Error::ScenarioDefinition(format!(
                    "step {i} measures {}, which has no qubit assigned",
                    step.key
                )));
            }
            if let BasisRule::Conditional { on, .. } = &step.rule {
                if on.observer != step.key.observer {
                    return Err(Error::ScenarioDefinition(format!(
                        "step {i} for {} is conditioned on another observer's record {on}",
                        step.key.observer
                    )));
                }
                if !steps[..i].iter().any(|s| &s.key == on) {
                    return Err(Error::ScenarioDefinition(format!(
                        "step {i} is conditioned on {on}, which no earlier step measures"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn parties(&self) -> &[Observer] {
        &self.parties
    }

    pub fn qubit_map(&self) -> &BTreeMap<RecordKey, usize> {
        &self.qubit_map
    }

    pub fn steps(&self) -> &[MeasurementStep] {
        &self.steps
    }

    pub fn qubit(&self, key: &RecordKey) -> Option<usize> {
        self.qubit_map.get(key).copied()
    }

    /// Qubits held by any of `observers`, ascending.
    pub fn qubits_of<'a>(&self, observers: impl IntoIterator<Item = &'a Observer>) -> Vec<usize> {
        let wanted: BTreeSet<&Observer> = observers.into_iter().collect();
        let mut qubits: Vec<usize> = self
            .qubit_map
            .iter()
            .filter(|(k, _)| wanted.contains(&k.observer))
            .map(|(_, &q)| q)
            .collect();
        qubits.sort_unstable();
        qubits
    }

    /// Same parties and qubit map with a different step list.
    pub fn with_steps(&self, steps: Vec<MeasurementStep>) -> Result<Scenario> {
        self.check_steps(&steps)?;
        Ok(Scenario {
            parties: self.parties.clone(),
            qubit_map: self.qubit_map.clone(),
            steps,
        })
    }

    /// Keeps only the steps of `observers`, in their original order.
    pub fn restricted_to(&self, observers: &[Observer]) -> Scenario {
        let steps = self
            .steps
            .iter()
            .filter(|s| observers.contains(&s.key.observer))
            .cloned()
            .collect();
        // Conditions never cross observers, so dropping whole observers keeps the program valid.
        Scenario {
            parties: self.parties.clone(),
            qubit_map: self.qubit_map.clone(),
            steps,
        }
    }

    /// The first `n` steps.
    pub fn truncated(&self, n: usize) -> Scenario {
        Scenario {
            parties: self.parties.clone(),
            qubit_map: self.qubit_map.clone(),
            steps: self.steps[..n.min(self.steps.len())].to_vec(),
        }
    }
}
