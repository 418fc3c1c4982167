//! Validated bipartite density matrices and the measurement primitives built
//! on them: partial traces, von Neumann entropy, conditional states after a
//! local projective measurement, and the subsystem swap.
//!
//! Basis convention, fixed once for the whole crate: a state on an N-level
//! subsystem A and an M-level subsystem B lives in the product basis
//! {|1_A 1_B>, ..., |1_A M_B>, |2_A 1_B>, ..., |N_A M_B>} -- A is the slow
//! index, B the fast one. The block structure used by the discord criterion
//! depends on this ordering, so constructors check sizes against it.

use num_complex::Complex64;

use crate::eigen::hermitian_eig;
use crate::error::{DensityDefects, Error, Result};
use crate::matrix::ComplexMatrix;

/// Default tolerance for density-matrix validation.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-10;

/// Conditional outcomes with probability below this floor are excluded from
/// entropy averages; normalizing them is ill-conditioned and their weighted
/// contribution sits below numerical noise.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// A validated density matrix on an N \u{2297} M bipartite system.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteDensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix,
}

impl BipartiteDensityMatrix {
    /// Check hermiticity, unit trace and positive semidefiniteness at `tol`
    /// and wrap the matrix. Every defect magnitude is measured and reported
    /// together on failure.
    pub fn validate(matrix: ComplexMatrix, dim_a: usize, dim_b: usize, tol: f64) -> Result<Self> {
        assert!(
            dim_a > 0 && dim_b > 0,
            "subsystem dimensions must be positive"
        );
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let dim = dim_a * dim_b;
        if matrix.rows() != dim {
            return Err(Error::SizeMismatch {
                expected: dim,
                got: matrix.rows(),
            });
        }

        let norm = matrix.frobenius_norm();
        let hermiticity_defect = if norm > 0.0 {
            matrix.hermiticity_defect() / norm
        } else {
            0.0
        };
        let trace = matrix.trace();
        let trace_defect = ((trace.re - 1.0).powi(2) + trace.im.powi(2)).sqrt();
        // PSD check on the Hermitian part; tol = 1.0 because hermiticity is
        // judged separately above.
        let eig = hermitian_eig(&matrix.hermitian_part(), 1.0)?;
        let min_eigenvalue = eig.eigenvalues.last().copied().unwrap_or(0.0);

        let defects = DensityDefects {
            hermiticity_defect,
            trace_defect,
            min_eigenvalue,
            tol,
        };
        if !defects.all_ok() {
            return Err(Error::InvalidDensity(defects));
        }
        Ok(Self {
            dim_a,
            dim_b,
            matrix,
        })
    }

    /// Wrap without re-checking. For matrices whose validity is inherited
    /// from already-validated inputs (dephasing outputs, tensor products of
    /// valid states, permutation similarities), where re-validating at a
    /// fixed tolerance would wrongly reject inputs the caller accepted at a
    /// looser one.
    pub(crate) fn from_parts_unchecked(dim_a: usize, dim_b: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), dim_a * dim_b);
        debug_assert!(matrix.is_square());
        Self {
            dim_a,
            dim_b,
            matrix,
        }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Total dimension N*M.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Trace out subsystem A: the M x M reduced state of B, the sum of the
    /// N diagonal blocks.
    pub fn partial_trace_a(&self) -> ComplexMatrix {
        let (n, m) = (self.dim_a, self.dim_b);
        ComplexMatrix::from_fn(m, m, |k, l| {
            (0..n).map(|i| self.matrix.get(i * m + k, i * m + l)).sum()
        })
    }

    /// Trace out subsystem B: the N x N reduced state of A, the entrywise
    /// trace of each block.
    pub fn partial_trace_b(&self) -> ComplexMatrix {
        let (n, m) = (self.dim_a, self.dim_b);
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..m).map(|k| self.matrix.get(i * m + k, j * m + k)).sum()
        })
    }

    /// Exchange the roles of the two subsystems via the perfect-shuffle
    /// permutation; the result is an M \u{2297} N state and applying the
    /// swap twice is the identity.
    pub fn swap_subsystems(&self) -> BipartiteDensityMatrix {
        let (n, m) = (self.dim_a, self.dim_b);
        let matrix = ComplexMatrix::from_fn(self.dim(), self.dim(), |p, q| {
            let (k, i) = (p / n, p % n);
            let (l, j) = (q / n, q % n);
            self.matrix.get(i * m + k, j * m + l)
        });
        // a permutation similarity preserves all three density invariants
        // exactly
        BipartiteDensityMatrix::from_parts_unchecked(m, n, matrix)
    }

    /// Project onto |k_B> without normalizing: the N x N matrix
    /// <k_B| rho |k_B> whose trace is the outcome probability.
    pub(crate) fn project_b(&self, ket: &[Complex64]) -> ComplexMatrix {
        let (n, m) = (self.dim_a, self.dim_b);
        assert_eq!(ket.len(), m, "projector dimension must match dim_b");
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..m {
                for c in 0..m {
                    acc += ket[r].conj() * self.matrix.get(i * m + r, j * m + c) * ket[c];
                }
            }
            acc
        })
    }
}

/// An orthonormal measurement basis on the apparatus side: column k of
/// `basis` is |k_B>.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorBasis {
    dim: usize,
    basis: ComplexMatrix,
}

impl ProjectorBasis {
    /// Wrap a unitary whose columns are the projector kets. The unitarity
    /// defect must stay below 1e-10 * dim.
    pub fn new(basis: ComplexMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::NotSquare {
                rows: basis.rows(),
                cols: basis.cols(),
            });
        }
        let dim = basis.rows();
        let defect = basis
            .adjoint()
            .matmul(&basis)
            .sub(&ComplexMatrix::identity(dim))
            .frobenius_norm();
        let tol = 1e-10 * dim as f64;
        if defect > tol {
            return Err(Error::NotUnitary { defect, tol });
        }
        Ok(Self { dim, basis })
    }

    /// The computational basis.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            basis: ComplexMatrix::identity(dim),
        }
    }

    /// The qubit basis {(|1> + |2>)/sqrt(2), (|1> - |2>)/sqrt(2)}.
    pub fn hadamard() -> Self {
        let r = 1.0 / 2.0_f64.sqrt();
        Self {
            dim: 2,
            basis: ComplexMatrix::new(
                2,
                2,
                vec![
                    Complex64::new(r, 0.0),
                    Complex64::new(r, 0.0),
                    Complex64::new(r, 0.0),
                    Complex64::new(-r, 0.0),
                ],
            ),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn ket(&self, k: usize) -> Vec<Complex64> {
        self.basis.column(k)
    }

    /// The rank-one projector |k_B><k_B|.
    pub fn projector(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::outer(&self.ket(k))
    }
}

/// One outcome of a local projective measurement on B.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    pub probability: f64,
    /// Normalized conditional state of A; the zero matrix when the outcome
    /// probability sits below [`PROBABILITY_FLOOR`].
    pub state: ComplexMatrix,
    /// True for outcomes too unlikely to normalize.
    pub negligible: bool,
}

/// Post-measurement ensemble {(p_k, rho_k)} for a projective measurement of
/// B in `basis`: p_k = Tr <k_B| rho |k_B> and rho_k the normalized
/// projection. Probabilities sum to the trace of rho.
pub fn conditional_states(
    rho: &BipartiteDensityMatrix,
    basis: &ProjectorBasis,
) -> Vec<ConditionalState> {
    assert_eq!(basis.dim(), rho.dim_b(), "basis dimension must match dim_b");
    (0..basis.dim())
        .map(|k| {
            let projected = rho.project_b(&basis.ket(k));
            let p = projected.trace().re;
            if p < PROBABILITY_FLOOR {
                ConditionalState {
                    probability: 0.0,
                    state: ComplexMatrix::zeros(rho.dim_a(), rho.dim_a()),
                    negligible: true,
                }
            } else {
                ConditionalState {
                    probability: p,
                    state: projected.scale(1.0 / p),
                    negligible: false,
                }
            }
        })
        .collect()
}

/// Entropy -sum lambda log2 lambda of a clamped spectrum, with the 0 log 0 = 0
/// convention. Eigenvalues below zero are treated as zero.
pub(crate) fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Von Neumann entropy -Tr(rho log2 rho) in bits.
///
/// The input must be Hermitian, PSD and trace one at `tol`; eigenvalues in
/// [-tol, 0) are clamped to zero before taking logs.
pub fn von_neumann_entropy(h: &ComplexMatrix, tol: f64) -> Result<f64> {
    let eig = hermitian_eig(h, tol)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::InvalidSpectrum {
            min_eigenvalue: min,
            tol,
        });
    }
    let trace: f64 = eig.eigenvalues.iter().sum();
    if (trace - 1.0).abs() > tol {
        return Err(Error::InvalidTrace { trace, tol });
    }
    // spectra with an eigenvalue a rounding error above 1 can push the sum
    // microscopically negative
    Ok(spectrum_entropy(&eig.eigenvalues).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ComplexMatrix, ONE, ZERO};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn xstate_matrix(x: f64) -> ComplexMatrix {
        let s = (x * (0.5 - x)).sqrt();
        let z = |v: f64| c(v, 0.0);
        #[rustfmt::skip]
        let entries = vec![
            z(x), ZERO, ZERO, z(s),
            ZERO, z(0.5 - x), z(s), ZERO,
            ZERO, z(s), z(x), ZERO,
            z(s), ZERO, ZERO, z(0.5 - x),
        ];
        ComplexMatrix::new(4, 4, entries)
    }

    fn bell_matrix() -> ComplexMatrix {
        let r = 1.0 / 2.0_f64.sqrt();
        ComplexMatrix::outer(&[c(r, 0.0), ZERO, ZERO, c(r, 0.0)])
    }

    #[test]
    fn validate_accepts_x_state() {
        let rho = BipartiteDensityMatrix::validate(xstate_matrix(0.1), 2, 2, 1e-10).unwrap();
        assert_eq!(rho.dim(), 4);
    }

    #[test]
    fn validate_accepts_maximally_mixed() {
        let m = ComplexMatrix::identity(4).scale(0.25);
        assert!(BipartiteDensityMatrix::validate(m, 2, 2, 1e-10).is_ok());
    }

    #[test]
    fn validate_reports_defect_magnitudes() {
        let m = ComplexMatrix::diagonal_real(&[0.6, 0.6, -0.1, -0.1]);
        match BipartiteDensityMatrix::validate(m, 2, 2, 1e-10) {
            Err(Error::InvalidDensity(d)) => {
                // trace is exactly one here; positivity is what fails
                assert!(d.trace_ok());
                assert!(!d.psd_ok());
                assert!((d.min_eigenvalue + 0.1).abs() < 1e-12);
            }
            other => panic!("expected InvalidDensity, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_bad_trace() {
        let m = ComplexMatrix::diagonal_real(&[0.7, 0.7, 0.1, 0.1]);
        match BipartiteDensityMatrix::validate(m, 2, 2, 1e-10) {
            Err(Error::InvalidDensity(d)) => {
                assert!(!d.trace_ok());
                assert!((d.trace_defect - 0.6).abs() < 1e-12);
            }
            other => panic!("expected InvalidDensity, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_size_mismatch() {
        let m = ComplexMatrix::identity(4).scale(0.25);
        assert!(matches!(
            BipartiteDensityMatrix::validate(m, 2, 3, 1e-10),
            Err(Error::SizeMismatch {
                expected: 6,
                got: 4
            })
        ));
    }

    #[test]
    fn partial_trace_a_of_x_state() {
        for x in [0.0, 0.1, 0.25, 0.37] {
            let rho = BipartiteDensityMatrix::validate(xstate_matrix(x), 2, 2, 1e-10).unwrap();
            let rb = rho.partial_trace_a();
            assert!(rb.approx_eq(
                &ComplexMatrix::diagonal_real(&[2.0 * x, 1.0 - 2.0 * x]),
                1e-14
            ));
        }
    }

    #[test]
    fn partial_trace_b_of_x_state() {
        let rho = BipartiteDensityMatrix::validate(xstate_matrix(0.1), 2, 2, 1e-10).unwrap();
        assert!(rho
            .partial_trace_b()
            .approx_eq(&ComplexMatrix::diagonal_real(&[0.5, 0.5]), 1e-14));
    }

    #[test]
    fn partial_traces_of_product_state() {
        let ra = ComplexMatrix::diagonal_real(&[0.3, 0.7]);
        let rb = ComplexMatrix::new(
            2,
            2,
            vec![c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)],
        );
        let rho = BipartiteDensityMatrix::validate(ra.tensor(&rb), 2, 2, 1e-10).unwrap();
        assert!(rho.partial_trace_a().approx_eq(&rb, 1e-14));
        assert!(rho.partial_trace_b().approx_eq(&ra, 1e-14));
    }

    #[test]
    fn partial_traces_of_bell_state() {
        let rho = BipartiteDensityMatrix::validate(bell_matrix(), 2, 2, 1e-10).unwrap();
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(rho.partial_trace_a().approx_eq(&half, 1e-14));
        assert!(rho.partial_trace_b().approx_eq(&half, 1e-14));
    }

    #[test]
    fn entropy_values() {
        // pure state
        let pure = ComplexMatrix::outer(&[c(1.0, 0.0), ZERO]);
        assert!(von_neumann_entropy(&pure, 1e-10).unwrap().abs() < 1e-12);
        // maximally mixed qubit
        let mixed = ComplexMatrix::identity(2).scale(0.5);
        assert!((von_neumann_entropy(&mixed, 1e-10).unwrap() - 1.0).abs() < 1e-12);
        // diag(0.2, 0.8)
        let d = ComplexMatrix::diagonal_real(&[0.2, 0.8]);
        assert!((von_neumann_entropy(&d, 1e-10).unwrap() - 0.7219280948873623).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_bad_spectrum() {
        let d = ComplexMatrix::diagonal_real(&[1.2, -0.2]);
        assert!(matches!(
            von_neumann_entropy(&d, 1e-10),
            Err(Error::InvalidSpectrum { .. })
        ));
    }

    #[test]
    fn conditional_states_of_bell() {
        let rho = BipartiteDensityMatrix::validate(bell_matrix(), 2, 2, 1e-10).unwrap();
        let cs = conditional_states(&rho, &ProjectorBasis::identity(2));
        assert_eq!(cs.len(), 2);
        assert!((cs[0].probability - 0.5).abs() < 1e-14);
        assert!((cs[1].probability - 0.5).abs() < 1e-14);
        assert!(cs[0]
            .state
            .approx_eq(&ComplexMatrix::outer(&[ONE, ZERO]), 1e-14));
        assert!(cs[1]
            .state
            .approx_eq(&ComplexMatrix::outer(&[ZERO, ONE]), 1e-14));
    }

    #[test]
    fn conditional_states_of_product_state() {
        let ra = ComplexMatrix::new(
            2,
            2,
            vec![c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)],
        );
        let rb = ComplexMatrix::diagonal_real(&[0.5, 0.5]);
        let rho = BipartiteDensityMatrix::validate(ra.tensor(&rb), 2, 2, 1e-10).unwrap();
        for basis in [ProjectorBasis::identity(2), ProjectorBasis::hadamard()] {
            for out in conditional_states(&rho, &basis) {
                assert!(out.state.approx_eq(&ra, 1e-13));
            }
        }
    }

    #[test]
    fn conditional_states_of_x_quarter_in_hadamard() {
        let rho = BipartiteDensityMatrix::validate(xstate_matrix(0.25), 2, 2, 1e-10).unwrap();
        let cs = conditional_states(&rho, &ProjectorBasis::hadamard());
        let r = 1.0 / 2.0_f64.sqrt();
        let plus = ComplexMatrix::outer(&[c(r, 0.0), c(r, 0.0)]);
        let minus = ComplexMatrix::outer(&[c(r, 0.0), c(-r, 0.0)]);
        assert!((cs[0].probability - 0.5).abs() < 1e-14);
        assert!((cs[1].probability - 0.5).abs() < 1e-14);
        assert!(cs[0].state.approx_eq(&plus, 1e-13));
        assert!(cs[1].state.approx_eq(&minus, 1e-13));
    }

    #[test]
    fn zero_probability_outcomes_are_flagged() {
        // |0><0| (x) |0><0| measured in the computational basis: the second
        // outcome never fires.
        let m = ComplexMatrix::diagonal_real(&[1.0, 0.0, 0.0, 0.0]);
        let rho = BipartiteDensityMatrix::validate(m, 2, 2, 1e-10).unwrap();
        let cs = conditional_states(&rho, &ProjectorBasis::identity(2));
        assert!(!cs[0].negligible);
        assert!((cs[0].probability - 1.0).abs() < 1e-14);
        assert!(cs[1].negligible);
        assert_eq!(cs[1].probability, 0.0);
        assert_eq!(cs[1].state.frobenius_norm(), 0.0);
    }

    #[test]
    fn swap_is_involutive() {
        let rho = BipartiteDensityMatrix::validate(xstate_matrix(0.13), 2, 2, 1e-10).unwrap();
        let back = rho.swap_subsystems().swap_subsystems();
        assert!(back.matrix().approx_eq(rho.matrix(), 0.0));
    }

    #[test]
    fn swap_of_product_state() {
        let ra = ComplexMatrix::diagonal_real(&[0.3, 0.7]);
        #[rustfmt::skip]
        let rb = ComplexMatrix::new(
            3,
            3,
            vec![
                c(0.5, 0.0), c(0.1, 0.1), ZERO,
                c(0.1, -0.1), c(0.3, 0.0), ZERO,
                ZERO, ZERO, c(0.2, 0.0),
            ],
        );
        let rho = BipartiteDensityMatrix::validate(ra.tensor(&rb), 2, 3, 1e-10).unwrap();
        let swapped = rho.swap_subsystems();
        assert_eq!((swapped.dim_a(), swapped.dim_b()), (3, 2));
        assert!(swapped.matrix().approx_eq(&rb.tensor(&ra), 1e-14));
    }

    #[test]
    fn swap_fixes_x_state_only_at_the_symmetric_point() {
        // The reduced states differ for x != 0.25 (rho_A = I/2 but
        // rho_B = diag(2x, 1-2x)), so only x = 0.25 can be shuffle-symmetric.
        let quarter = BipartiteDensityMatrix::validate(xstate_matrix(0.25), 2, 2, 1e-10).unwrap();
        assert!(quarter
            .swap_subsystems()
            .matrix()
            .approx_eq(quarter.matrix(), 0.0));

        let tenth = BipartiteDensityMatrix::validate(xstate_matrix(0.1), 2, 2, 1e-10).unwrap();
        let swapped = tenth.swap_subsystems();
        assert!(swapped.matrix().max_abs_diff(tenth.matrix()) > 0.1);
        // the swap relabels which subsystem each partial trace sees
        assert!(swapped
            .partial_trace_b()
            .approx_eq(&tenth.partial_trace_a(), 1e-14));
        assert!(swapped
            .partial_trace_a()
            .approx_eq(&tenth.partial_trace_b(), 1e-14));
    }
}
