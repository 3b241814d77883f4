use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Amplitude;

/// Spin measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn symbol(self) -> char {
        match self {
            Basis::X => 'x',
            Basis::Y => 'y',
            Basis::Z => 'z',
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A ±1 spin measurement result. Serialized as the integers `1` and `-1`.
///
/// `Plus` sorts before `Minus`, which gives the canonical world order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(value: i8) -> Option<Outcome> {
        match value {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }

    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    pub fn arrow(self) -> char {
        match self {
            Outcome::Plus => '↑',
            Outcome::Minus => '↓',
        }
    }
}

impl From<Outcome> for i8 {
    fn from(o: Outcome) -> i8 {
        o.value()
    }
}

impl TryFrom<i8> for Outcome {
    type Error = String;

    fn try_from(value: i8) -> Result<Self, Self::Error> {
        Outcome::from_value(value).ok_or_else(|| format!("outcome must be 1 or -1, got {value}"))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Plus => write!(f, "+1"),
            Outcome::Minus => write!(f, "-1"),
        }
    }
}

/// Single-qubit operator, row-major.
pub type Projector = [[Amplitude; 2]; 2];

/// Eigenvector of the Pauli operator for `basis` with eigenvalue `outcome`,
/// as (up_z, down_z) components.
///
/// Phase conventions: |↑x⟩ = (|↑z⟩ + |↓z⟩)/√2, |↓x⟩ = (|↑z⟩ − |↓z⟩)/√2,
/// |↑y⟩ = (|↑z⟩ + i|↓z⟩)/√2, |↓y⟩ = (|↑z⟩ − i|↓z⟩)/√2.
pub fn eigenvector(basis: Basis, outcome: Outcome) -> [Amplitude; 2] {
    let h = FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    match (basis, outcome) {
        (Basis::Z, Outcome::Plus) => [one, zero],
        (Basis::Z, Outcome::Minus) => [zero, one],
        (Basis::X, Outcome::Plus) => [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        (Basis::X, Outcome::Minus) => [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        (Basis::Y, Outcome::Plus) => [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
        (Basis::Y, Outcome::Minus) => [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
    }
}

/// |e⟩⟨e| for the eigenvector selected by `basis` and `outcome`.
///
/// Entries are written out exactly (halves and units) rather than formed from
/// the normalized eigenvectors, so the projector algebra holds to rounding.
pub fn basis_projector(basis: Basis, outcome: Outcome) -> Projector {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let s = f64::from(outcome.value());
    match basis {
        Basis::Z => match outcome {
            Outcome::Plus => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
            Outcome::Minus => [[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        },
        Basis::X => [
            [c(0.5, 0.0), c(0.5 * s, 0.0)],
            [c(0.5 * s, 0.0), c(0.5, 0.0)],
        ],
        Basis::Y => [
            [c(0.5, 0.0), c(0.0, -0.5 * s)],
            [c(0.0, 0.5 * s), c(0.5, 0.0)],
        ],
    }
}

#[cfg(test)]
pub(crate) fn mat_mul(a: &Projector, b: &Projector) -> Projector {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}
