//! The canonical three-party GHZ experiments and their checks.
//!
//! The two-set protocol distributes two GHZ triples. Each observer measures
//! their auxiliary spin along x; on +1 they measure their primary spin along y,
//! on −1 along x. Because the auxiliary triple only admits odd-parity x
//! outcomes, the surviving setting patterns are exactly xxx, xyy, yxy and yyx,
//! the four patterns of the GHZ constraint equations.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::branching::{run_scenario, Branch, WorldSet};
use crate::quantum::{ghz_state, Basis, Outcome, StateVector};
use crate::scenario::{MeasurementStep, Observer, RecordKey, Scenario, Slot};
use crate::{Error, Result};

pub const GHZ_PROTOCOL: &str = "ghz-protocol";
pub const CHARLEY_DEVIATION: &str = "charley-deviation";
pub const ALL_Z: &str = "all-z";
pub const ALICE_BOB_ONLY: &str = "alice-bob-only";

/// Names of the built-in experiments, in the order [`canonical_scenarios`] returns them.
pub const CANONICAL_NAMES: [&str; 4] = [GHZ_PROTOCOL, CHARLEY_DEVIATION, ALL_Z, ALICE_BOB_ONLY];

/// Axes an observer may pick for a primary measurement.
pub const PRIMARY_AXES: [Basis; 2] = [Basis::X, Basis::Y];

/// Relative weight below which an outcome counts as impossible for a prediction.
pub const CERTAINTY_THRESHOLD: f64 = 1e-12;

pub fn parties() -> Vec<Observer> {
    vec!["A".into(), "B".into(), "C".into()]
}

/// Initial states the built-in experiments start from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preparation {
    /// One GHZ triple on qubits 0..3 (A, B, C).
    Ghz3,
    /// Two GHZ triples: primary spins on qubits 0..3, auxiliary spins on 3..6.
    Ghz3x2,
}

impl Preparation {
    pub fn state(self) -> StateVector {
        let g = ghz_state(3).expect("three parties");
        match self {
            Preparation::Ghz3 => g,
            Preparation::Ghz3x2 => g.tensor(&g).expect("six qubits fit"),
        }
    }
}

/// A named scenario together with its initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub preparation: Preparation,
    pub scenario: Scenario,
}

impl Experiment {
    pub fn initial_state(&self) -> StateVector {
        self.preparation.state()
    }

    pub fn run(&self) -> Result<WorldSet> {
        run_scenario(&self.initial_state(), &self.scenario)
    }
}

fn triple_map() -> BTreeMap<RecordKey, usize> {
    ["A", "B", "C"]
        .into_iter()
        .enumerate()
        .map(|(q, o)| (RecordKey::new(o, Slot::Primary), q))
        .collect()
}

fn pair_map() -> BTreeMap<RecordKey, usize> {
    let mut map = triple_map();
    for (q, o) in ["A", "B", "C"].into_iter().enumerate() {
        map.insert(RecordKey::new(o, Slot::Aux), q + 3);
    }
    map
}

/// Aux x, then primary y on +1 and x on −1 (or the reverse when `swapped`).
fn protocol_steps(observer: &str, swapped: bool) -> [MeasurementStep; 2] {
    let (if_plus, if_minus) = if swapped {
        (Basis::X, Basis::Y)
    } else {
        (Basis::Y, Basis::X)
    };
    [
        MeasurementStep::fixed(observer, Slot::Aux, Basis::X),
        MeasurementStep::conditional(observer, Slot::Primary, Slot::Aux, if_plus, if_minus),
    ]
}

fn pair_experiment(name: &str, steps: Vec<MeasurementStep>) -> Experiment {
    Experiment {
        name: name.to_string(),
        preparation: Preparation::Ghz3x2,
        scenario: Scenario::new(parties(), pair_map(), steps).expect("built-in scenario is valid"),
    }
}

/// The built-in experiments: the two-set protocol, Charley's swapped-rule
/// deviation, the all-z variant and the protocol with Charley idle.
pub fn canonical_scenarios() -> Vec<Experiment> {
    CANONICAL_NAMES
        .iter()
        .map(|n| canonical_scenario(n).expect("known name"))
        .collect()
}

pub fn canonical_scenario(name: &str) -> Option<Experiment> {
    let steps: Vec<MeasurementStep> = match name {
        GHZ_PROTOCOL => ["A", "B", "C"]
            .iter()
            .flat_map(|o| protocol_steps(o, false))
            .collect(),
        CHARLEY_DEVIATION => ["A", "B", "C"]
            .iter()
            .flat_map(|&o| protocol_steps(o, o == "C"))
            .collect(),
        ALL_Z => ["A", "B", "C"]
            .iter()
            .flat_map(|o| {
                [
                    MeasurementStep::fixed(o, Slot::Aux, Basis::Z),
                    MeasurementStep::fixed(o, Slot::Primary, Basis::Z),
                ]
            })
            .collect(),
        ALICE_BOB_ONLY => ["A", "B"]
            .iter()
            .flat_map(|o| protocol_steps(o, false))
            .collect(),
        _ => return None,
    };
    Some(pair_experiment(name, steps))
}

/// One GHZ triple with each observer measuring a fixed axis, e.g. `[X, Y, Y]`.
pub fn ghz3_settings_experiment(settings: [Basis; 3]) -> Experiment {
    let steps = ["A", "B", "C"]
        .iter()
        .zip(settings)
        .map(|(o, b)| MeasurementStep::fixed(o, Slot::Primary, b))
        .collect();
    let pattern: String = settings.iter().map(|b| b.symbol()).collect();
    Experiment {
        name: format!("ghz3-{pattern}"),
        preparation: Preparation::Ghz3,
        scenario: Scenario::new(parties(), triple_map(), steps)
            .expect("built-in scenario is valid"),
    }
}

/// A perfect-correlation condition: measuring `settings` yields outcomes
/// whose product is `required_product`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintEquation {
    pub settings: BTreeMap<Observer, Basis>,
    pub required_product: Outcome,
}

impl ConstraintEquation {
    pub fn new(settings: &[(&str, Basis)], required_product: Outcome) -> Self {
        ConstraintEquation {
            settings: settings
                .iter()
                .map(|&(o, b)| (Observer::new(o), b))
                .collect(),
            required_product,
        }
    }

    /// Axis letters in observer order, e.g. `xyy`.
    pub fn pattern(&self) -> String {
        self.settings.values().map(|b| b.symbol()).collect()
    }

    /// e.g. `xyy = +1`.
    pub fn label(&self) -> String {
        format!("{} = {}", self.pattern(), self.required_product)
    }
}

/// xxx → −1, xyy → +1, yxy → +1, yyx → +1.
pub fn ghz_constraints() -> Vec<ConstraintEquation> {
    use Basis::{X, Y};
    vec![
        ConstraintEquation::new(&[("A", X), ("B", X), ("C", X)], Outcome::Minus),
        ConstraintEquation::new(&[("A", X), ("B", Y), ("C", Y)], Outcome::Plus),
        ConstraintEquation::new(&[("A", Y), ("B", X), ("C", Y)], Outcome::Plus),
        ConstraintEquation::new(&[("A", Y), ("B", Y), ("C", X)], Outcome::Plus),
    ]
}

fn primary_record<'a>(branch: &'a Branch, observer: &Observer) -> Result<&'a crate::OutcomeRecord> {
    branch
        .record(&RecordKey::new(observer.clone(), Slot::Primary))
        .ok_or_else(|| {
            Error::IncompleteWorld(format!(
                "world {} has no primary record for {observer}",
                branch.label(None)
            ))
        })
}

/// Whether every observer of `eq` measured their primary spin along the axis `eq` names.
pub fn applicable(eq: &ConstraintEquation, branch: &Branch) -> Result<bool> {
    let mut all = true;
    for (observer, basis) in &eq.settings {
        all &= primary_record(branch, observer)?.basis == *basis;
    }
    Ok(all)
}

/// Product of the primary outcomes of `eq`'s observers in `branch`.
pub fn outcome_product(eq: &ConstraintEquation, branch: &Branch) -> Result<Outcome> {
    let mut product = 1i8;
    for observer in eq.settings.keys() {
        product *= primary_record(branch, observer)?.outcome.value();
    }
    Ok(Outcome::from_value(product).expect("product of ±1 values"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationCheck {
    /// Index into the equation list.
    pub equation: usize,
    pub product: Outcome,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorldCheck {
    /// Index into the world set.
    pub world: usize,
    pub label: String,
    pub weight: f64,
    /// Equations applicable in this world, with the observed product.
    pub checks: Vec<EquationCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationSummary {
    pub equation: ConstraintEquation,
    pub applicable_worlds: usize,
    pub weight: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub worlds: Vec<WorldCheck>,
    pub equations: Vec<EquationSummary>,
    /// Worlds lacking a primary record for some equation's observer.
    pub incomplete_worlds: Vec<usize>,
    pub passed: bool,
}

/// Checks every applicable (world, equation) pairing. Failures are report
/// content, not errors; an incomplete world also fails the report.
pub fn verify_worldset(ws: &WorldSet, eqs: &[ConstraintEquation]) -> VerificationReport {
    let mut equations: Vec<EquationSummary> = eqs
        .iter()
        .map(|eq| EquationSummary {
            equation: eq.clone(),
            applicable_worlds: 0,
            weight: 0.0,
            violations: 0,
        })
        .collect();
    let mut worlds = Vec::with_capacity(ws.len());
    let mut incomplete_worlds = Vec::new();

    'worlds: for (w, branch) in ws.iter().enumerate() {
        let mut checks = Vec::new();
        for (e, eq) in eqs.iter().enumerate() {
            let (is_applicable, product) =
                match (applicable(eq, branch), outcome_product(eq, branch)) {
                    (Ok(a), Ok(p)) => (a, p),
                    _ => {
                        incomplete_worlds.push(w);
                        continue 'worlds;
                    }
                };
            if !is_applicable {
                continue;
            }
            let satisfied = product == eq.required_product;
            let summary = &mut equations[e];
            summary.applicable_worlds += 1;
            summary.weight += branch.weight();
            if !satisfied {
                summary.violations += 1;
            }
            checks.push(EquationCheck {
                equation: e,
                product,
                satisfied,
            });
        }
        worlds.push(WorldCheck {
            world: w,
            label: branch.label(Some(Slot::Primary)),
            weight: branch.weight(),
            checks,
        });
    }

    let passed = incomplete_worlds.is_empty() && equations.iter().all(|s| s.violations == 0);
    VerificationReport {
        worlds,
        equations,
        incomplete_worlds,
        passed,
    }
}

/// What can be predicted with certainty about an observer's next primary measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Prediction {
    Definite { basis: Basis, outcome: Outcome },
    Undetermined,
}

/// For each world, whether `target`'s primary spin (on `qubit`) is already an
/// eigenstate of one of the [`PRIMARY_AXES`], and with which eigenvalue.
///
/// An outcome is certain when the opposite outcome's weight, relative to the
/// branch weight, is below [`CERTAINTY_THRESHOLD`].
pub fn epr_prediction(ws: &WorldSet, target: &Observer, qubit: usize) -> Result<Vec<Prediction>> {
    let key = RecordKey::new(target.clone(), Slot::Primary);
    ws.iter()
        .map(|branch| {
            if branch.record(&key).is_some() {
                return Err(Error::ProtocolViolation(format!(
                    "{key} is already measured in world {}",
                    branch.label(None)
                )));
            }
            for basis in PRIMARY_AXES {
                let plus = branch
                    .residual()
                    .outcome_weight(qubit, basis, Outcome::Plus)?
                    / branch.weight();
                let minus = branch
                    .residual()
                    .outcome_weight(qubit, basis, Outcome::Minus)?
                    / branch.weight();
                if minus < CERTAINTY_THRESHOLD {
                    return Ok(Prediction::Definite {
                        basis,
                        outcome: Outcome::Plus,
                    });
                }
                if plus < CERTAINTY_THRESHOLD {
                    return Ok(Prediction::Definite {
                        basis,
                        outcome: Outcome::Minus,
                    });
                }
            }
            Ok(Prediction::Undetermined)
        })
        .collect()
}

/// `(basis, outcome)` per observer for the given slot, in observer order.
/// `None` if any of `observers` lacks a record there.
pub fn slot_tuple(
    branch: &Branch,
    observers: &[Observer],
    slot: Slot,
) -> Option<Vec<(Basis, Outcome)>> {
    observers
        .iter()
        .map(|o| {
            branch
                .record(&RecordKey::new(o.clone(), slot))
                .map(|r| (r.basis, r.outcome))
        })
        .collect()
}

/// Parses a world written as space-separated `↑x`/`↓y`-style tokens.
pub fn parse_world(text: &str) -> Result<Vec<(Basis, Outcome)>> {
    text.split_whitespace()
        .map(|tok| {
            let mut chars = tok.chars();
            let outcome = match chars.next() {
                Some('↑') => Outcome::Plus,
                Some('↓') => Outcome::Minus,
                _ => return Err(Error::InvalidArgument(format!("bad world token {tok:?}"))),
            };
            let basis = match chars.next() {
                Some('x') => Basis::X,
                Some('y') => Basis::Y,
                Some('z') => Basis::Z,
                _ => return Err(Error::InvalidArgument(format!("bad world token {tok:?}"))),
            };
            if chars.next().is_some() {
                return Err(Error::InvalidArgument(format!("bad world token {tok:?}")));
            }
            Ok((basis, outcome))
        })
        .collect()
}

/// Reference world tables for the built-in experiments, written out by hand.
pub mod tables {
    use super::*;

    /// Primary outcomes (A, B, C) of the sixteen protocol worlds.
    pub const PROTOCOL_WORLDS: [&str; 16] = [
        "↓x ↓x ↓x",
        "↓x ↑x ↑x",
        "↑x ↓x ↑x",
        "↑x ↑x ↓x",
        "↑x ↑y ↑y",
        "↑x ↓y ↓y",
        "↓x ↑y ↓y",
        "↓x ↓y ↑y",
        "↑y ↑x ↑y",
        "↑y ↓x ↓y",
        "↓y ↑x ↓y",
        "↓y ↓x ↑y",
        "↑y ↑y ↑x",
        "↑y ↓y ↓x",
        "↓y ↑y ↓x",
        "↓y ↓y ↑x",
    ];

    /// Primary outcomes (A, B) of the sixteen worlds before Charley measures.
    pub const ALICE_BOB_WORLDS: [&str; 16] = [
        "↓x ↓x",
        "↓x ↑x",
        "↑x ↓x",
        "↑x ↑x",
        "↑x ↑y",
        "↑x ↓y",
        "↓x ↑y",
        "↓x ↓y",
        "↑y ↑x",
        "↑y ↓x",
        "↓y ↑x",
        "↓y ↓x",
        "↑y ↑y",
        "↑y ↓y",
        "↓y ↑y",
        "↓y ↓y",
    ];

    /// Both z outcomes of each observer, A then B then C, for the all-z worlds.
    pub const ALL_Z_WORLDS: [&str; 4] = [
        "↓z ↓z ↓z ↓z ↓z ↓z",
        "↓z ↑z ↓z ↑z ↓z ↑z",
        "↑z ↓z ↑z ↓z ↑z ↓z",
        "↑z ↑z ↑z ↑z ↑z ↑z",
    ];

    pub fn as_set(rows: &[&str]) -> BTreeSet<Vec<(Basis, Outcome)>> {
        rows.iter()
            .map(|r| parse_world(r).expect("table rows are well formed"))
            .collect()
    }
}
