//! Generators for the state families used across the test suites and the
//! CLI: the two-qubit X-state family, pointer (zero-discord) states built
//! from explicit coefficients, the photon-pair mixture, product states,
//! seeded random densities and the Bell state.
//!
//! All randomness is ChaCha-seeded: one seed, one bit pattern, every time.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::{BipartiteDensityMatrix, DEFAULT_VALIDATION_TOL};
use crate::eigen::hermitian_eig;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// The coefficient array C_{i j k} of a pointer state: for each apparatus
/// direction k it holds an N x N slice acting on the system side.
#[derive(Debug, Clone)]
pub struct PointerCoefficients {
    dim_a: usize,
    dim_b: usize,
    values: Vec<Complex64>,
}

impl PointerCoefficients {
    /// Wrap a coefficient table, checking the three structural constraints a
    /// density matrix imposes: Hermiticity in (i, j), positive
    /// semidefiniteness of every k-slice, and unit total trace.
    pub fn new(dim_a: usize, dim_b: usize, values: Vec<Complex64>) -> Result<Self> {
        assert_eq!(
            values.len(),
            dim_a * dim_a * dim_b,
            "need dim_a^2 * dim_b coefficients"
        );
        let c = Self {
            dim_a,
            dim_b,
            values,
        };

        let mut herm_defect = 0.0f64;
        for i in 0..dim_a {
            for j in 0..dim_a {
                for k in 0..dim_b {
                    let d = (c.get(i, j, k) - c.get(j, i, k).conj()).norm();
                    herm_defect = herm_defect.max(d);
                }
            }
        }
        if herm_defect > 1e-10 {
            return Err(Error::BadPointerCoefficients {
                what: "hermiticity in (i, j)",
                defect: herm_defect,
            });
        }

        for k in 0..dim_b {
            let slice = c.slice(k);
            let eig = hermitian_eig(&slice.hermitian_part(), 1.0)?;
            let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
            if min < -1e-10 {
                return Err(Error::BadPointerCoefficients {
                    what: "positive semidefiniteness of a k-slice",
                    defect: min,
                });
            }
        }

        let total: Complex64 = (0..dim_a)
            .flat_map(|i| (0..dim_b).map(move |k| (i, k)))
            .map(|(i, k)| c.get(i, i, k))
            .sum();
        let trace_defect = ((total.re - 1.0).powi(2) + total.im.powi(2)).sqrt();
        if trace_defect > 1e-10 {
            return Err(Error::BadPointerCoefficients {
                what: "unit total trace",
                defect: trace_defect,
            });
        }
        Ok(c)
    }

    /// Build without the invariant checks. For coefficient tables read off an
    /// already-validated state, where the constraints hold by construction.
    pub(crate) fn from_raw(dim_a: usize, dim_b: usize, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), dim_a * dim_a * dim_b);
        Self {
            dim_a,
            dim_b,
            values,
        }
    }

    /// Seeded random coefficients: each k-slice is sampled as a Gaussian
    /// Gram matrix (PSD and Hermitian by construction) and the total trace
    /// is normalized to one.
    pub fn random(dim_a: usize, dim_b: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut slices: Vec<ComplexMatrix> = (0..dim_b)
            .map(|_| {
                let g = ginibre(dim_a, dim_a, &mut rng);
                g.matmul(&g.adjoint())
            })
            .collect();
        let total: f64 = slices.iter().map(|s| s.trace().re).sum();
        for s in &mut slices {
            *s = s.scale(1.0 / total);
        }
        let mut values = vec![ZERO; dim_a * dim_a * dim_b];
        for i in 0..dim_a {
            for j in 0..dim_a {
                for k in 0..dim_b {
                    values[(i * dim_a + j) * dim_b + k] = slices[k].get(i, j);
                }
            }
        }
        Self {
            dim_a,
            dim_b,
            values,
        }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.values[(i * self.dim_a + j) * self.dim_b + k]
    }

    /// The N x N system-side matrix [C_{i j k}]_{ij} for a fixed k.
    pub fn slice(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim_a, self.dim_a, |i, j| self.get(i, j, k))
    }
}

/// The two-qubit X-state with parameter x in [0, 0.5]: diagonal
/// (x, 0.5-x, x, 0.5-x) and anti-diagonal entries sqrt(x(0.5-x)). A rank-two
/// mixture, valid for the whole parameter range.
pub fn xstate(x: f64) -> Result<BipartiteDensityMatrix> {
    if !(0.0..=0.5).contains(&x) {
        return Err(Error::ParamOutOfRange {
            name: "x",
            value: x,
            min: 0.0,
            max: 0.5,
        });
    }
    let s = (x * (0.5 - x)).sqrt();
    let z = |v: f64| Complex64::new(v, 0.0);
    #[rustfmt::skip]
    let m = ComplexMatrix::new(
        4,
        4,
        vec![
            z(x), ZERO, ZERO, z(s),
            ZERO, z(0.5 - x), z(s), ZERO,
            ZERO, z(s), z(x), ZERO,
            z(s), ZERO, ZERO, z(0.5 - x),
        ],
    );
    BipartiteDensityMatrix::validate(m, 2, 2, DEFAULT_VALIDATION_TOL)
}

/// Assemble the zero-discord state sum_{i,j,k} C_{ijk} |i><j| (x) v_k v_k'
/// from a coefficient table and the unitary whose columns are the pointer
/// projectors.
pub fn pointer_state(c: &PointerCoefficients, v: &ComplexMatrix) -> Result<BipartiteDensityMatrix> {
    let (n, m) = (c.dim_a(), c.dim_b());
    if !v.is_square() {
        return Err(Error::NotSquare {
            rows: v.rows(),
            cols: v.cols(),
        });
    }
    if v.rows() != m {
        return Err(Error::SizeMismatch {
            expected: m,
            got: v.rows(),
        });
    }
    let unitarity = v
        .adjoint()
        .matmul(v)
        .sub(&ComplexMatrix::identity(m))
        .frobenius_norm();
    let tol = 1e-10 * m as f64;
    if unitarity > tol {
        return Err(Error::NotUnitary {
            defect: unitarity,
            tol,
        });
    }

    let projectors: Vec<ComplexMatrix> =
        (0..m).map(|k| ComplexMatrix::outer(&v.column(k))).collect();
    let mut matrix = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            // block (i_A, j_A) = sum_k C_{ijk} |k'><k'|
            let mut block = ComplexMatrix::zeros(m, m);
            for (k, p) in projectors.iter().enumerate() {
                block = block.add(&p.scale_complex(c.get(i, j, k)));
            }
            for r in 0..m {
                for col in 0..m {
                    matrix.set(i * m + r, j * m + col, block.get(r, col));
                }
            }
        }
    }
    BipartiteDensityMatrix::validate(matrix, n, m, DEFAULT_VALIDATION_TOL)
}

/// The photon-pair mixture 0.5|psi_1><psi_1| + 0.5|psi_2><psi_2| with
/// |psi_1> = cos(t)|H_A H_B> + sin(t)|V_A V_B> and
/// |psi_2> = cos(t)|V_A H_B> + sin(t)|H_A V_B>, in the basis order
/// {|HH>, |HV>, |VH>, |VV>}.
///
/// Equals the X-state at x = 0.5 cos^2(theta) entrywise for every real
/// theta: the amplitudes enter only through their magnitudes (flipping the
/// sign of cos(theta) sin(theta) is a local sigma_z on B, and the canonical
/// representative with non-negative anti-diagonal is generated).
pub fn photon_pair_state(theta: f64) -> BipartiteDensityMatrix {
    let cos = theta.cos().abs();
    let sin = theta.sin().abs();
    let z = |v: f64| Complex64::new(v, 0.0);
    let psi1 = [z(cos), ZERO, ZERO, z(sin)];
    let psi2 = [ZERO, z(sin), z(cos), ZERO];
    let m = ComplexMatrix::outer(&psi1)
        .scale(0.5)
        .add(&ComplexMatrix::outer(&psi2).scale(0.5));
    BipartiteDensityMatrix::validate(m, 2, 2, DEFAULT_VALIDATION_TOL)
        .expect("photon-pair mixture is a valid state for every theta")
}

/// Tensor product of two validated single-system densities.
pub fn product_state(
    rho_a: &ComplexMatrix,
    rho_b: &ComplexMatrix,
) -> Result<BipartiteDensityMatrix> {
    BipartiteDensityMatrix::validate(rho_a.clone(), 1, rho_a.rows(), DEFAULT_VALIDATION_TOL)?;
    BipartiteDensityMatrix::validate(rho_b.clone(), 1, rho_b.rows(), DEFAULT_VALIDATION_TOL)?;
    BipartiteDensityMatrix::validate(
        rho_a.tensor(rho_b),
        rho_a.rows(),
        rho_b.rows(),
        DEFAULT_VALIDATION_TOL,
    )
}

/// Seeded random density matrix G G' / Tr(G G') with G a dim x rank matrix
/// of standard complex Gaussians. `rank` bounds the rank of the output.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<ComplexMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::BadRank { rank, dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(dim, rank, &mut rng);
    let gram = g.matmul(&g.adjoint());
    let trace = gram.trace().re;
    Ok(gram.scale(1.0 / trace))
}

/// Seeded random unitary: the eigenbasis of a random Hermitian matrix.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = ginibre(dim, dim, &mut rng).hermitian_part();
    hermitian_eig(&h, 1.0)
        .expect("random Hermitian matrices decompose")
        .eigenvectors
}

/// The maximally entangled two-qubit state (|11> + |22>)/sqrt(2), as a
/// canonical maximal-discord reference.
pub fn bell_state() -> BipartiteDensityMatrix {
    let r = 1.0 / 2.0_f64.sqrt();
    let m = ComplexMatrix::outer(&[Complex64::new(r, 0.0), ZERO, ZERO, Complex64::new(r, 0.0)]);
    BipartiteDensityMatrix::validate(m, 2, 2, DEFAULT_VALIDATION_TOL)
        .expect("Bell projector is a valid state")
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}
