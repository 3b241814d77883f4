//! Local deterministic hidden-variable models for the GHZ constraints.
//!
//! An [`Assignment`] fixes in advance the ±1 outcome each of A, B and C would
//! get along x and along y. [`impossibility_census`] checks all 64 of them by
//! brute force; [`parity_certificate`] reaches the same conclusion
//! symbolically. Mixtures of assignments need no separate search: a mixture
//! reproduces a perfect correlation only if every assignment in its support
//! does.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::branching::{Branch, WorldSet};
use crate::ghz::{applicable, ghz_constraints, ConstraintEquation};
use crate::quantum::{Basis, Outcome};
use crate::scenario::{Observer, Slot};

pub const LHV_OBSERVERS: [&str; 3] = ["A", "B", "C"];
pub const LHV_AXES: [Basis; 2] = [Basis::X, Basis::Y];

/// One ±1 value per (observer, axis), in the order Ax, Ay, Bx, By, Cx, Cy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    values: [Outcome; 6],
}

fn entry_index(observer: &Observer, axis: Basis) -> Option<usize> {
    let o = LHV_OBSERVERS.iter().position(|&n| n == observer.name())?;
    let a = LHV_AXES.iter().position(|&b| b == axis)?;
    Some(o * LHV_AXES.len() + a)
}

impl Assignment {
    pub fn new(values: [Outcome; 6]) -> Self {
        Assignment { values }
    }

    /// `None` for observers or axes outside the model (e.g. z).
    pub fn get(&self, observer: &Observer, axis: Basis) -> Option<Outcome> {
        entry_index(observer, axis).map(|i| self.values[i])
    }

    pub fn values(&self) -> &[Outcome; 6] {
        &self.values
    }

    pub fn entries(&self) -> impl Iterator<Item = (Observer, Basis, Outcome)> + '_ {
        LHV_OBSERVERS.iter().flat_map(move |&o| {
            LHV_AXES.iter().map(move |&a| {
                let obs = Observer::new(o);
                let v = self.get(&obs, a).expect("entry in range");
                (obs, a, v)
            })
        })
    }

    /// Agrees with every primary x/y record in `branch`.
    pub fn agrees_with(&self, branch: &Branch) -> bool {
        branch
            .records()
            .iter()
            .filter(|r| r.slot == Slot::Primary)
            .all(|r| match self.get(&r.observer, r.basis) {
                Some(v) => v == r.outcome,
                None => true,
            })
    }
}

/// All 64 assignments in lexicographic order (+1 before −1), starting with all +1.
pub fn enumerate_assignments() -> Vec<Assignment> {
    (0u32..64)
        .map(|k| {
            let mut values = [Outcome::Plus; 6];
            for (i, v) in values.iter_mut().enumerate() {
                if k >> (5 - i) & 1 == 1 {
                    *v = Outcome::Minus;
                }
            }
            Assignment { values }
        })
        .collect()
}

/// Whether the assigned values along `eq`'s settings multiply to its required product.
/// False if `eq` names an observer or axis outside the model.
pub fn satisfied(a: &Assignment, eq: &ConstraintEquation) -> bool {
    let mut product = 1i8;
    for (observer, &axis) in &eq.settings {
        match a.get(observer, axis) {
            Some(v) => product *= v.value(),
            None => return false,
        }
    }
    product == eq.required_product.value()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub assignments: usize,
    /// Assignments satisfying every equation.
    pub full_satisfiers: usize,
    /// Most equations any single assignment satisfies.
    pub max_simultaneous: usize,
    /// k → number of assignments satisfying exactly k equations.
    pub histogram: BTreeMap<usize, usize>,
}

pub fn census_for(eqs: &[ConstraintEquation]) -> Census {
    let all = enumerate_assignments();
    let mut histogram: BTreeMap<usize, usize> = (0..=eqs.len()).map(|k| (k, 0)).collect();
    for a in &all {
        let k = eqs.iter().filter(|eq| satisfied(a, eq)).count();
        *histogram.entry(k).or_default() += 1;
    }
    let max_simultaneous = histogram
        .iter()
        .filter(|(_, &n)| n > 0)
        .map(|(&k, _)| k)
        .max()
        .unwrap_or(0);
    Census {
        assignments: all.len(),
        full_satisfiers: histogram.get(&eqs.len()).copied().unwrap_or(0),
        max_simultaneous,
        histogram,
    }
}

/// Exhaustive search of the GHZ constraints over all 64 assignments.
pub fn impossibility_census() -> Census {
    census_for(&ghz_constraints())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exponent {
    pub observer: Observer,
    pub axis: Basis,
    pub exponent: u32,
}

/// Symbolic parity argument: if every variable appears an even number of
/// times across the equations, the product of the left-hand sides is +1 for
/// any assignment, so the equations are jointly unsatisfiable whenever the
/// right-hand sides multiply to −1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityCertificate {
    pub exponents: Vec<Exponent>,
    pub all_even: bool,
    pub required_product: Outcome,
    /// True when the exponent table proves the equations inconsistent.
    pub contradiction: bool,
}

pub fn parity_certificate_for(eqs: &[ConstraintEquation]) -> ParityCertificate {
    let mut counts: BTreeMap<(Observer, Basis), u32> = BTreeMap::new();
    for &o in &LHV_OBSERVERS {
        for &a in &LHV_AXES {
            counts.insert((Observer::new(o), a), 0);
        }
    }
    for eq in eqs {
        for (observer, &axis) in &eq.settings {
            *counts.entry((observer.clone(), axis)).or_default() += 1;
        }
    }
    let exponents: Vec<Exponent> = counts
        .into_iter()
        .map(|((observer, axis), exponent)| Exponent {
            observer,
            axis,
            exponent,
        })
        .collect();
    let all_even = exponents.iter().all(|e| e.exponent % 2 == 0);
    let sign: i8 = eqs.iter().map(|e| e.required_product.value()).product();
    let required_product = Outcome::from_value(sign).expect("product of ±1 values");
    ParityCertificate {
        exponents,
        all_even,
        required_product,
        contradiction: all_even && required_product == Outcome::Minus,
    }
}

pub fn parity_certificate() -> ParityCertificate {
    parity_certificate_for(&ghz_constraints())
}

/// Assignments that agree with `branch`'s primary records and satisfy every
/// equation applicable in it.
pub fn local_extensions(branch: &Branch, eqs: &[ConstraintEquation]) -> Vec<Assignment> {
    enumerate_assignments()
        .into_iter()
        .filter(|a| a.agrees_with(branch))
        .filter(|a| {
            eqs.iter()
                .all(|eq| !matches!(applicable(eq, branch), Ok(true)) || satisfied(a, eq))
        })
        .collect()
}

/// An assignment that, for every equation, agrees with at least one world in
/// which that equation applies. Exists only if one set of predetermined values
/// could underlie all setting patterns at once.
pub fn covering_assignment(ws: &WorldSet, eqs: &[ConstraintEquation]) -> Option<Assignment> {
    enumerate_assignments().into_iter().find(|a| {
        eqs.iter().all(|eq| {
            ws.iter()
                .any(|b| matches!(applicable(eq, b), Ok(true)) && a.agrees_with(b))
        })
    })
}
