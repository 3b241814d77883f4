//! Non-collapsing measurement semantics.
//!
//! A measurement never picks an outcome. It splits each live branch into one
//! sub-branch per outcome, each carrying the projected (unnormalized) residual
//! state and the macroscopic record of what was seen. A world is identified by
//! its full record list; the residual rides along but does not distinguish
//! worlds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::quantum::{Basis, DensityMatrix, Outcome, StateVector};
use crate::scenario::{Observer, RecordKey, Scenario, Slot};
use crate::{Error, Result};

/// Branches whose Born weight is at or below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// One macroscopic measurement record.
///
/// The derived ordering (observer, slot, basis, outcome) is the canonical
/// world order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub observer: Observer,
    pub slot: Slot,
    pub basis: Basis,
    pub outcome: Outcome,
}

impl OutcomeRecord {
    pub fn new(observer: &str, slot: Slot, basis: Basis, outcome: Outcome) -> Self {
        OutcomeRecord {
            observer: Observer::new(observer),
            slot,
            basis,
            outcome,
        }
    }

    pub fn key(&self) -> RecordKey {
        RecordKey {
            observer: self.observer.clone(),
            slot: self.slot,
        }
    }

    fn matches(&self, key: &RecordKey) -> bool {
        self.observer == key.observer && self.slot == key.slot
    }

    /// Compact label such as `↑xA`.
    pub fn label(&self) -> String {
        format!(
            "{}{}{}",
            self.outcome.arrow(),
            self.basis.symbol(),
            self.observer
        )
    }
}

/// One Everett branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    records: Vec<OutcomeRecord>,
    residual: StateVector,
    weight: f64,
}

impl Branch {
    /// The unsplit world before any measurement.
    pub fn root(state: StateVector) -> Self {
        let weight = state.norm_sqr();
        Branch {
            records: Vec::new(),
            residual: state,
            weight,
        }
    }

    /// Assembles a branch directly, e.g. to inject a hand-built world into a
    /// verification run. Record keys must be unique.
    pub fn from_parts(records: Vec<OutcomeRecord>, residual: StateVector) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if records[..i].iter().any(|p| p.matches(&r.key())) {
                return Err(Error::ProtocolViolation(format!(
                    "{} recorded twice in one branch",
                    r.key()
                )));
            }
        }
        let weight = residual.norm_sqr();
        Ok(Branch {
            records,
            residual,
            weight,
        })
    }

    pub fn records(&self) -> &[OutcomeRecord] {
        &self.records
    }

    pub fn residual(&self) -> &StateVector {
        &self.residual
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn record(&self, key: &RecordKey) -> Option<&OutcomeRecord> {
        self.records.iter().find(|r| r.matches(key))
    }

    pub fn outcome(&self, key: &RecordKey) -> Option<Outcome> {
        self.record(key).map(|r| r.outcome)
    }

    /// Records belonging to `observer`, in canonical order.
    pub fn local_records(&self, observer: &Observer) -> Vec<LocalRecord> {
        let mut local: Vec<LocalRecord> = self
            .records
            .iter()
            .filter(|r| &r.observer == observer)
            .map(|r| LocalRecord {
                slot: r.slot,
                basis: r.basis,
                outcome: r.outcome,
            })
            .collect();
        local.sort();
        local
    }

    /// Compact label such as `(↑xA, ↓yB, ↓yC)`; `slot` filters the records shown.
    pub fn label(&self, slot: Option<Slot>) -> String {
        let parts: Vec<String> = self
            .records
            .iter()
            .filter(|r| slot.is_none_or(|s| r.slot == s))
            .map(OutcomeRecord::label)
            .collect();
        format!("({})", parts.join(", "))
    }

    fn canonicalize(&mut self) {
        self.records.sort();
    }
}

/// Splits `branch` by measuring `qubit` in `basis`, recording the result under `key`.
///
/// Returns the surviving sub-branches, `+1` first. Sub-branches with weight at
/// or below [`PRUNE_THRESHOLD`] are dropped.
pub fn split(branch: &Branch, key: &RecordKey, qubit: usize, basis: Basis) -> Result<Vec<Branch>> {
    if branch.record(key).is_some() {
        return Err(Error::ProtocolViolation(format!(
            "{key} has already been measured in this branch"
        )));
    }
    let mut out = Vec::with_capacity(2);
    for outcome in Outcome::BOTH {
        let residual = branch.residual.apply_projector(qubit, basis, outcome)?;
        let weight = residual.norm_sqr();
        if weight <= PRUNE_THRESHOLD {
            continue;
        }
        let mut records = branch.records.clone();
        records.push(OutcomeRecord {
            observer: key.observer.clone(),
            slot: key.slot,
            basis,
            outcome,
        });
        out.push(Branch {
            records,
            residual,
            weight,
        });
    }
    Ok(out)
}

/// All nonzero-weight branches after a scenario, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldSet {
    branches: Vec<Branch>,
}

impl WorldSet {
    /// Canonicalizes `branches`: records sorted within each branch, branches
    /// sorted by record list, negligible branches dropped. Two branches with
    /// the same record list are rejected.
    pub fn from_branches(branches: Vec<Branch>) -> Result<Self> {
        let mut branches: Vec<Branch> = branches
            .into_iter()
            .filter(|b| b.weight > PRUNE_THRESHOLD)
            .collect();
        for b in &mut branches {
            b.canonicalize();
        }
        branches.sort_by(|a, b| a.records.cmp(&b.records));
        if let Some(pair) = branches.windows(2).find(|w| w[0].records == w[1].records) {
            return Err(Error::ProtocolViolation(format!(
                "two branches share the record list {}",
                pair[0].label(None)
            )));
        }
        Ok(WorldSet { branches })
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Branch> {
        self.branches.iter()
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(Branch::weight).sum()
    }
}

impl<'a> IntoIterator for &'a WorldSet {
    type Item = &'a Branch;
    type IntoIter = std::slice::Iter<'a, Branch>;

    fn into_iter(self) -> Self::IntoIter {
        self.branches.iter()
    }
}

/// Runs `scenario` on `initial`, splitting every live branch at every step.
///
/// Conditional bases are resolved per branch against that branch's own records.
pub fn run_scenario(initial: &StateVector, scenario: &Scenario) -> Result<WorldSet> {
    let mut live = vec![Branch::root(initial.clone())];
    for step in scenario.steps() {
        let qubit = scenario.qubit(&step.key).ok_or_else(|| {
            Error::ScenarioDefinition(format!("{} has no qubit assigned", step.key))
        })?;
        if qubit >= initial.n_qubits() {
            return Err(Error::InvalidArgument(format!(
                "{} maps to qubit {qubit}, but the initial state has {} qubits",
                step.key,
                initial.n_qubits()
            )));
        }
        let mut next = Vec::with_capacity(live.len() * 2);
        for branch in &live {
            let basis = step.rule.resolve(|k| branch.outcome(k))?;
            next.extend(split(branch, &step.key, qubit, basis)?);
        }
        live = next;
    }
    WorldSet::from_branches(live)
}

/// One record as seen by its owner, without the observer label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocalRecord {
    pub slot: Slot,
    pub basis: Basis,
    pub outcome: Outcome,
}

/// The distinct local record tuples one observer has across a [`WorldSet`],
/// each with the number of global worlds it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalWorldSet {
    pub observer: Observer,
    worlds: BTreeMap<Vec<LocalRecord>, LocalWorld>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalWorld {
    pub members: usize,
    pub weight: f64,
}

impl LocalWorldSet {
    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<LocalRecord>, &LocalWorld)> {
        self.worlds.iter()
    }

    pub fn contains(&self, records: &[LocalRecord]) -> bool {
        self.worlds.contains_key(records)
    }

    pub fn get(&self, records: &[LocalRecord]) -> Option<&LocalWorld> {
        self.worlds.get(records)
    }
}

pub fn local_worlds(ws: &WorldSet, observer: &Observer) -> LocalWorldSet {
    let mut worlds: BTreeMap<Vec<LocalRecord>, LocalWorld> = BTreeMap::new();
    for branch in ws {
        let entry = worlds
            .entry(branch.local_records(observer))
            .or_insert(LocalWorld {
                members: 0,
                weight: 0.0,
            });
        entry.members += 1;
        entry.weight += branch.weight();
    }
    LocalWorldSet {
        observer: observer.clone(),
        worlds,
    }
}

/// (product of local world counts, number of global worlds).
pub fn joint_vs_product_count(ws: &WorldSet, observers: &[Observer]) -> (usize, usize) {
    let product = observers
        .iter()
        .map(|o| local_worlds(ws, o).len())
        .product();
    (product, ws.len())
}

/// Σ over the resulting worlds of the reduced state of each residual on `keep`.
pub fn nonselective_reduced_state(
    initial: &StateVector,
    scenario: &Scenario,
    keep: &[usize],
) -> Result<DensityMatrix> {
    let ws = run_scenario(initial, scenario)?;
    let mut total: Option<DensityMatrix> = None;
    for branch in &ws {
        let rho = branch.residual().partial_trace(keep)?;
        match total.as_mut() {
            Some(t) => *t += &rho,
            None => total = Some(rho),
        }
    }
    match total {
        Some(t) => Ok(t),
        // Every branch pruned: only possible for a (near) zero initial state.
        None => initial.partial_trace(keep),
    }
}
