use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{basis_projector, Amplitude, Basis, DensityMatrix, Outcome, DEFAULT_MAX_QUBITS};
use crate::{Error, Result};

/// Dense amplitude vector over `n_qubits` qubits.
///
/// The vector is not required to be normalized: branch residuals carry their
/// Born weight as their squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Amplitude>,
}

/// (|0…0⟩ − |1…1⟩)/√2 over `n_parties` qubits.
pub fn ghz_state(n_parties: usize) -> Result<StateVector> {
    if n_parties < 2 {
        return Err(Error::InvalidArgument(format!(
            "a GHZ state needs at least 2 parties, got {n_parties}"
        )));
    }
    if n_parties > DEFAULT_MAX_QUBITS {
        return Err(Error::Capacity {
            requested: n_parties,
            max: DEFAULT_MAX_QUBITS,
        });
    }
    let dim = 1usize << n_parties;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[dim - 1] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
    Ok(StateVector {
        n_qubits: n_parties,
        amps,
    })
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<Amplitude>) -> Result<Self> {
        if n_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::Capacity {
                requested: n_qubits,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        if amps.len() != 1usize << n_qubits {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes supplied for {} qubits (expected {})",
                amps.len(),
                n_qubits,
                1usize << n_qubits
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("amplitudes must be finite".into()));
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Builds a state from a flat amplitude list, inferring the qubit count.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count must be a power of two and at least 2, got {len}"
            )));
        }
        StateVector::new(len.trailing_zeros() as usize, amps)
    }

    /// Computational basis state |index⟩.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::Capacity {
                requested: n_qubits,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Product state with qubit `k` in the eigenstate named by `factors[k]`.
    pub fn product(factors: &[(Basis, Outcome)]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument(
                "product state needs at least one factor".into(),
            ));
        }
        let mut state = single_qubit(factors[0].0, factors[0].1);
        for &(basis, outcome) in &factors[1..] {
            state = state.tensor(&single_qubit(basis, outcome))?;
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tolerance: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tolerance
    }

    /// Rescaled copy with unit norm. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a / norm).collect(),
        })
    }

    /// Kronecker product; `self` occupies the low qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        self.tensor_with_limit(other, DEFAULT_MAX_QUBITS)
    }

    pub fn tensor_with_limit(&self, other: &StateVector, max_qubits: usize) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > max_qubits {
            return Err(Error::Capacity {
                requested: n,
                max: max_qubits,
            });
        }
        let mut amps = Vec::with_capacity(1usize << n);
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidArgument(format!(
                "qubit {qubit} out of range for a {}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Applies the single-qubit projector for `(basis, outcome)` on `qubit`.
    ///
    /// The result is not renormalized; its squared norm is the Born
    /// probability of the outcome (relative to the input's squared norm).
    pub fn apply_projector(&self, qubit: usize, basis: Basis, outcome: Outcome) -> Result<Self> {
        self.check_qubit(qubit)?;
        let p = basis_projector(basis, outcome);
        let mask = 1usize << qubit;
        let mut amps = self.amps.clone();
        for i in (0..self.amps.len()).filter(|i| i & mask == 0) {
            let a0 = self.amps[i];
            let a1 = self.amps[i | mask];
            amps[i] = p[0][0] * a0 + p[0][1] * a1;
            amps[i | mask] = p[1][0] * a0 + p[1][1] * a1;
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// Squared norm of the state after projecting `qubit` onto `(basis, outcome)`.
    pub fn outcome_weight(&self, qubit: usize, basis: Basis, outcome: Outcome) -> Result<f64> {
        Ok(self.apply_projector(qubit, basis, outcome)?.norm_sqr())
    }

    /// Reduced density matrix over `keep`, tracing out every other qubit.
    ///
    /// Kept qubits are taken in ascending order; the j-th smallest kept qubit
    /// becomes bit j of the reduced index. The trace equals `norm_sqr()`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("keep-set must not be empty".into()));
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        for &q in &kept {
            self.check_qubit(q)?;
        }
        let traced: Vec<usize> = (0..self.n_qubits).filter(|q| !kept.contains(q)).collect();

        let dim = 1usize << kept.len();
        let mut rho = DensityMatrix::zeros(dim);
        let mut local = vec![Complex64::new(0.0, 0.0); dim];
        for env in 0..(1usize << traced.len()) {
            let env_bits = scatter(env, &traced);
            for (k, slot) in local.iter_mut().enumerate() {
                *slot = self.amps[env_bits | scatter(k, &kept)];
            }
            rho.add_outer(&local);
        }
        Ok(rho)
    }
}

fn single_qubit(basis: Basis, outcome: Outcome) -> StateVector {
    StateVector {
        n_qubits: 1,
        amps: super::eigenvector(basis, outcome).to_vec(),
    }
}

/// Places bit j of `compact` at qubit position `positions[j]`.
fn scatter(compact: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .filter(|(j, _)| compact >> j & 1 == 1)
        .fold(0, |acc, (_, &q)| acc | 1 << q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ghz3_amplitudes() {
        let g = ghz_state(3).unwrap();
        assert_eq!(g.n_qubits(), 3);
        let h = 0.5f64.sqrt();
        for i in 0..8 {
            let expected = match i {
                0 => h,
                7 => -h,
                _ => 0.0,
            };
            assert_abs_diff_eq!(g.amplitude(i).re, expected, epsilon = TOL);
            assert_abs_diff_eq!(g.amplitude(i).im, 0.0, epsilon = TOL);
        }
        assert!(g.is_normalized(TOL));
    }

    #[test]
    fn ghz2_amplitudes() {
        let g = ghz_state(2).unwrap();
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(g.amplitude(0b00).re, h, epsilon = TOL);
        assert_abs_diff_eq!(g.amplitude(0b11).re, -h, epsilon = TOL);
        assert_eq!(g.amplitude(0b01), c(0.0, 0.0));
        assert_eq!(g.amplitude(0b10), c(0.0, 0.0));
    }

    #[test]
    fn ghz_rejects_fewer_than_two_parties() {
        assert!(matches!(ghz_state(1), Err(Error::InvalidArgument(_))));
        assert!(matches!(ghz_state(0), Err(Error::InvalidArgument(_))));
    }

    /// Overlap of GHZ₃ with every all-x product state, computed by brute force
    /// from the eigenvectors.
    #[test]
    fn ghz3_in_all_x_basis() {
        let g = ghz_state(3).unwrap();
        let mut nonzero = Vec::new();
        for oa in Outcome::BOTH {
            for ob in Outcome::BOTH {
                for oc in Outcome::BOTH {
                    let bra =
                        StateVector::product(&[(Basis::X, oa), (Basis::X, ob), (Basis::X, oc)])
                            .unwrap();
                    let overlap: Complex64 = bra
                        .amplitudes()
                        .iter()
                        .zip(g.amplitudes())
                        .map(|(b, a)| b.conj() * a)
                        .sum();
                    if overlap.norm() > TOL {
                        assert_abs_diff_eq!(overlap.norm(), 0.5, epsilon = TOL);
                        nonzero.push((oa, ob, oc, overlap));
                    }
                }
            }
        }
        use Outcome::{Minus as D, Plus as U};
        let patterns: Vec<_> = nonzero.iter().map(|&(a, b, c, _)| (a, b, c)).collect();
        assert_eq!(patterns, vec![(U, U, D), (U, D, U), (D, U, U), (D, D, D)]);
        for &(a, b, c, _) in &nonzero {
            assert_eq!(a.value() * b.value() * c.value(), -1);
        }
        // All four coefficients come out as +1/2 under the fixed phase conventions.
        for &(_, _, _, amp) in &nonzero {
            assert_abs_diff_eq!((amp - c(0.5, 0.0)).norm(), 0.0, epsilon = TOL);
        }
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        let t = zero.tensor(&one).unwrap();
        assert_eq!(t.n_qubits(), 2);
        // qubit 0 = 0, qubit 1 = 1 -> index 0b10
        assert_eq!(t.amplitude(0b10), c(1.0, 0.0));
        assert_abs_diff_eq!(t.norm_sqr(), 1.0, epsilon = TOL);
    }

    #[test]
    fn tensor_of_two_ghz_triples() {
        let g = ghz_state(3).unwrap();
        let t = g.tensor(&g).unwrap();
        assert_eq!(t.n_qubits(), 6);
        let nonzero: Vec<_> = t.amplitudes().iter().filter(|a| a.norm() > TOL).collect();
        assert_eq!(nonzero.len(), 4);
        for a in nonzero {
            assert_abs_diff_eq!(a.norm(), 0.5, epsilon = TOL);
        }
        assert_abs_diff_eq!(t.amplitude(0b000_000).re, 0.5, epsilon = TOL);
        assert_abs_diff_eq!(t.amplitude(0b000_111).re, -0.5, epsilon = TOL);
        assert_abs_diff_eq!(t.amplitude(0b111_000).re, -0.5, epsilon = TOL);
        assert_abs_diff_eq!(t.amplitude(0b111_111).re, 0.5, epsilon = TOL);
    }

    #[test]
    fn tensor_capacity() {
        let big = StateVector::basis_state(10, 0).unwrap();
        assert_eq!(
            big.tensor(&big),
            Err(Error::Capacity {
                requested: 20,
                max: DEFAULT_MAX_QUBITS
            })
        );
        let g = ghz_state(3).unwrap();
        assert!(matches!(
            g.tensor_with_limit(&g, 5),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn projector_on_ghz_alice_x_plus() {
        // Hand computation: P(x,+) on qubit 0 maps |000> -> (|000>+|001>)/2 and
        // |111> -> (|110>+|111>)/2, so the four surviving amplitudes are ±1/(2√2).
        let g = ghz_state(3).unwrap();
        let p = g.apply_projector(0, Basis::X, Outcome::Plus).unwrap();
        let q = 1.0 / (2.0 * 2f64.sqrt());
        let expected = [q, q, 0.0, 0.0, 0.0, 0.0, -q, -q];
        for (i, e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(p.amplitude(i).re, *e, epsilon = TOL);
        }
        assert_abs_diff_eq!(p.norm_sqr(), 0.5, epsilon = TOL);
    }

    #[test]
    fn projector_rejects_bad_qubit() {
        let g = ghz_state(3).unwrap();
        assert!(matches!(
            g.apply_projector(3, Basis::Z, Outcome::Plus),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn partial_trace_ghz_single_qubit_is_unpolarized() {
        let g = ghz_state(3).unwrap();
        for q in 0..3 {
            let rho = g.partial_trace(&[q]).unwrap();
            assert!(
                rho.max_abs_diff(&DensityMatrix::maximally_mixed(1))
                    .unwrap()
                    <= TOL
            );
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let s = StateVector::basis_state(2, 0).unwrap();
        let rho = s.partial_trace(&[0]).unwrap();
        assert_eq!(rho.get(0, 0), c(1.0, 0.0));
        assert_eq!(rho.get(0, 1), c(0.0, 0.0));
        assert_eq!(rho.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn partial_trace_ghz_pair() {
        let g = ghz_state(3).unwrap();
        let rho = g.partial_trace(&[1, 2]).unwrap();
        assert_eq!(rho.dim(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j && (i == 0 || i == 3) {
                    0.5
                } else {
                    0.0
                };
                assert_abs_diff_eq!(rho.get(i, j).re, expected, epsilon = TOL);
                assert_abs_diff_eq!(rho.get(i, j).im, 0.0, epsilon = TOL);
            }
        }
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let g = ghz_state(3).unwrap();
        assert!(matches!(
            g.partial_trace(&[]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            g.partial_trace(&[0, 3]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn from_amplitudes_infers_qubits() {
        let s =
            StateVector::from_amplitudes(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
                .unwrap();
        assert_eq!(s.n_qubits(), 2);
        assert!(StateVector::from_amplitudes(vec![c(1.0, 0.0); 3]).is_err());
        assert!(StateVector::from_amplitudes(vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
    }

    fn arb_state() -> impl Strategy<Value = StateVector> {
        (1usize..=4).prop_flat_map(|n| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map(
                "nonzero",
                move |raw| {
                    let amps = raw.into_iter().map(|(re, im)| c(re, im)).collect();
                    StateVector::new(n, amps).ok()?.normalized().ok()
                },
            )
        })
    }

    fn arb_basis() -> impl Strategy<Value = Basis> {
        prop_oneof![Just(Basis::X), Just(Basis::Y), Just(Basis::Z)]
    }

    proptest! {
        #[test]
        fn projector_completeness(state in arb_state(), basis in arb_basis(), q in 0usize..4) {
            let q = q % state.n_qubits();
            let total: f64 = Outcome::BOTH
                .iter()
                .map(|&o| state.apply_projector(q, basis, o).unwrap().norm_sqr())
                .sum();
            prop_assert!((total - state.norm_sqr()).abs() <= TOL);
        }

        #[test]
        fn projector_idempotent(state in arb_state(), basis in arb_basis(), q in 0usize..4, plus in any::<bool>()) {
            let q = q % state.n_qubits();
            let o = if plus { Outcome::Plus } else { Outcome::Minus };
            let once = state.apply_projector(q, basis, o).unwrap();
            let twice = once.apply_projector(q, basis, o).unwrap();
            for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
                prop_assert!((a - b).norm() <= TOL);
            }
        }

        #[test]
        fn partial_trace_consistency(state in arb_state(), mask in 1usize..16) {
            let keep: Vec<usize> = (0..state.n_qubits()).filter(|q| mask >> q & 1 == 1).collect();
            prop_assume!(!keep.is_empty());
            let rho = state.partial_trace(&keep).unwrap();
            prop_assert!((rho.trace().re - state.norm_sqr()).abs() <= TOL);
            prop_assert!(rho.trace().im.abs() <= TOL);
            prop_assert!(rho.is_hermitian(TOL));
            prop_assert!(rho.is_positive_semidefinite(TOL));
        }

        #[test]
        fn tensor_norm_is_multiplicative(a in arb_state(), b in arb_state(), sa in 0.1f64..2.0, sb in 0.1f64..2.0) {
            let a = StateVector::new(a.n_qubits(), a.amplitudes().iter().map(|x| x * sa).collect()).unwrap();
            let b = StateVector::new(b.n_qubits(), b.amplitudes().iter().map(|x| x * sb).collect()).unwrap();
            let t = a.tensor(&b).unwrap();
            prop_assert!((t.norm_sqr() - a.norm_sqr() * b.norm_sqr()).abs() <= 1e-10);
        }
    }
}
