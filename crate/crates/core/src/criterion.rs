//! The block criterion for zero quantum discord.
//!
//! Slicing an N \u{2297} M density matrix along the A indices yields N^2
//! blocks of size M x M. The state has zero discord (with B as the
//! apparatus) exactly when every block is a normal matrix and all blocks
//! commute with each other; in that case one unitary diagonalizes the whole
//! family at once and its columns are the local projectors that measure B
//! without disturbing the state. This module implements the three-step test,
//! the pointer-basis extraction, the reconstruction identity used to verify
//! it, a sufficient separability check, and the ancilla-extension argument
//! that lifts the projective result to POVMs.
//!
//! Verdicts are computed with B as the apparatus; compose with
//! [`BipartiteDensityMatrix::swap_subsystems`] for the A-side question.

use num_complex::Complex64;

use crate::density::BipartiteDensityMatrix;
use crate::eigen::simultaneous_diag;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::states::PointerCoefficients;

/// Default relative tolerance for the criterion: comfortably above
/// eigensolver noise (~1e-12) and far below physically meaningful defects
/// (the X-state at x = 0.1 shows ~0.7 after normalization).
pub const DEFAULT_CRITERION_TOL: f64 = 1e-9;

/// The N^2 blocks of a bipartite density matrix, sliced along the A indices.
#[derive(Debug, Clone)]
pub struct BlockPartition {
    dim_a: usize,
    dim_b: usize,
    /// Row-major over (i_A, j_A); each block is dim_b x dim_b.
    blocks: Vec<ComplexMatrix>,
}

impl BlockPartition {
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Block (i_A, j_A), zero-indexed.
    pub fn block(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.blocks[i * self.dim_a + j]
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }
}

/// Slice a state into its N^2 blocks. Lossless: block (i, j) holds the
/// entries rho[i*M + r][j*M + c].
pub fn block_partition(rho: &BipartiteDensityMatrix) -> BlockPartition {
    let (n, m) = (rho.dim_a(), rho.dim_b());
    let blocks = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            ComplexMatrix::from_fn(m, m, |r, c| rho.matrix().get(i * m + r, j * m + c))
        })
        .collect();
    BlockPartition {
        dim_a: n,
        dim_b: m,
        blocks,
    }
}

/// Reassemble the full matrix from a partition. Exact inverse of
/// [`block_partition`]: entries are moved, never recomputed, so the
/// round-trip is bit-for-bit. The result is returned as a plain matrix; the
/// zero matrix (for instance) reassembles fine and is only rejected once
/// someone validates it as a state.
pub fn reconstruct(p: &BlockPartition) -> ComplexMatrix {
    let (n, m) = (p.dim_a, p.dim_b);
    ComplexMatrix::from_fn(n * m, n * m, |r, c| p.block(r / m, c / m).get(r % m, c % m))
}

/// Outcome of the zero-discord test, with the measured defects.
///
/// Defects are commutator norms normalized by the product of the operand
/// Frobenius norms (raw zero when an operand vanishes), so one tolerance is
/// meaningful across scales. Block labels are 1-based, matching the
/// superscripts in the partition.
#[derive(Debug, Clone)]
pub struct DiscordVerdict {
    pub is_zero: bool,
    /// Largest normalized \u{2016}[B, B\u{2020}]\u{2016}_F over the blocks.
    pub max_normality_defect: f64,
    /// Largest normalized \u{2016}[B, B']\u{2016}_F over unordered block pairs.
    pub max_commutation_defect: f64,
    /// Block labels behind the worst defect; `None` when every defect is
    /// exactly zero. A normality defect at block (i, j) reports the pair
    /// ((i, j), (i, j)).
    pub worst_pair: Option<((usize, usize), (usize, usize))>,
    /// Largest normalized \u{2016}[B, B'\u{2020}]\u{2016}_F over pairs. For a
    /// family passing the main checks this follows from Fuglede's theorem;
    /// it is measured anyway as a consistency diagnostic and does not enter
    /// `is_zero`.
    pub adjoint_commutation_defect: f64,
    pub tolerance_used: f64,
}

/// The three-step criterion: partition, check normality of every block,
/// check pairwise commutation. `is_zero` holds exactly when both maxima sit
/// at or below `tol`.
pub fn zero_discord_verdict(rho: &BipartiteDensityMatrix, tol: f64) -> DiscordVerdict {
    let partition = block_partition(rho);
    verdict_of_partition(&partition, tol)
}

fn verdict_of_partition(partition: &BlockPartition, tol: f64) -> DiscordVerdict {
    let n = partition.dim_a();
    let label = |idx: usize| (idx / n + 1, idx % n + 1);
    let blocks = partition.blocks();
    let norms: Vec<f64> = blocks.iter().map(|b| b.frobenius_norm()).collect();

    let mut max_normality = 0.0f64;
    let mut max_commutation = 0.0f64;
    let mut max_adjoint = 0.0f64;
    let mut worst: Option<((usize, usize), (usize, usize))> = None;
    let mut worst_defect = 0.0f64;

    for (idx, block) in blocks.iter().enumerate() {
        if norms[idx] == 0.0 {
            continue;
        }
        let defect =
            block.commutator(&block.adjoint()).frobenius_norm() / (norms[idx] * norms[idx]);
        if defect > max_normality {
            max_normality = defect;
        }
        if defect > worst_defect {
            worst_defect = defect;
            worst = Some((label(idx), label(idx)));
        }
    }

    for a in 0..blocks.len() {
        for b in a + 1..blocks.len() {
            if norms[a] == 0.0 || norms[b] == 0.0 {
                continue;
            }
            let scale = norms[a] * norms[b];
            let defect = blocks[a].commutator(&blocks[b]).frobenius_norm() / scale;
            if defect > max_commutation {
                max_commutation = defect;
            }
            if defect > worst_defect {
                worst_defect = defect;
                worst = Some((label(a), label(b)));
            }
            let adjoint_defect =
                blocks[a].commutator(&blocks[b].adjoint()).frobenius_norm() / scale;
            if adjoint_defect > max_adjoint {
                max_adjoint = adjoint_defect;
            }
        }
    }

    DiscordVerdict {
        is_zero: max_normality <= tol && max_commutation <= tol,
        max_normality_defect: max_normality,
        max_commutation_defect: max_commutation,
        worst_pair: worst,
        adjoint_commutation_defect: max_adjoint,
        tolerance_used: tol,
    }
}

/// The non-disturbing measurement basis of a zero-discord state.
#[derive(Debug, Clone)]
pub struct PointerBasis {
    /// Columns are the pointer projectors |k'_B>.
    pub unitary: ComplexMatrix,
    /// C_{i j k}: the diagonal of U\u{2020} rho^(i j) U.
    pub coefficients: PointerCoefficients,
    /// Off-diagonal residual of U\u{2020} rho^(i j) U per block, row-major
    /// over (i, j).
    pub eigen_diagnostics: Vec<f64>,
    /// Off-diagonal mass of U\u{2020} rho_B U: the reduced state must be
    /// diagonal in the same basis.
    pub rho_b_offdiag: f64,
}

impl PointerBasis {
    /// Best diagonal fit of a state in an arbitrary orthonormal basis: the
    /// coefficients are read off the diagonals of U\u{2020} rho^(i j) U with
    /// no zero-discord precondition, so the residual diagnostics measure how
    /// far the state is from pointer form in that basis. Used as the
    /// independent reference when exercising [`verify_pointer`].
    pub fn best_fit(rho: &BipartiteDensityMatrix, unitary: &ComplexMatrix) -> Result<Self> {
        assert_eq!(unitary.rows(), rho.dim_b(), "basis must act on B");
        let defect = unitary
            .adjoint()
            .matmul(unitary)
            .sub(&ComplexMatrix::identity(unitary.rows()))
            .frobenius_norm();
        let tol = 1e-10 * unitary.rows() as f64;
        if defect > tol {
            return Err(Error::NotUnitary { defect, tol });
        }
        Ok(Self::read_off(rho, unitary.clone()))
    }

    fn read_off(rho: &BipartiteDensityMatrix, unitary: ComplexMatrix) -> Self {
        let (n, m) = (rho.dim_a(), rho.dim_b());
        let partition = block_partition(rho);
        let u_adj = unitary.adjoint();
        let mut values = vec![Complex64::new(0.0, 0.0); n * n * m];
        let mut diagnostics = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let rotated = u_adj.matmul(partition.block(i, j)).matmul(&unitary);
                for k in 0..m {
                    values[(i * n + j) * m + k] = rotated.get(k, k);
                }
                diagnostics.push(rotated.offdiag_norm());
            }
        }
        let rho_b = rho.partial_trace_a();
        let rho_b_offdiag = u_adj.matmul(&rho_b).matmul(&unitary).offdiag_norm();
        Self {
            unitary,
            coefficients: PointerCoefficients::from_raw(n, m, values),
            eigen_diagnostics: diagnostics,
            rho_b_offdiag,
        }
    }

    pub fn max_block_residual(&self) -> f64 {
        self.eigen_diagnostics.iter().cloned().fold(0.0, f64::max)
    }
}

/// Extract the pointer basis of a zero-discord state.
///
/// The shared eigenbasis is found by simultaneous diagonalization of all
/// nonzero blocks; when the chosen block happens to be nondegenerate this
/// reduces to diagonalizing that single block, and degenerate spectra are
/// resolved by the rest of the family. Fails when the state has nonzero
/// discord at `tol`, or when some block keeps an off-diagonal residual above
/// `tol` times the largest block norm after refinement.
pub fn pointer_basis(rho: &BipartiteDensityMatrix, tol: f64) -> Result<PointerBasis> {
    let verdict = zero_discord_verdict(rho, tol);
    if !verdict.is_zero {
        return Err(Error::NonzeroDiscord {
            normality_defect: verdict.max_normality_defect,
            commutation_defect: verdict.max_commutation_defect,
            tol,
        });
    }

    let partition = block_partition(rho);
    let sd = simultaneous_diag(partition.blocks(), tol)?;
    let pb = PointerBasis::read_off(rho, sd.unitary);

    let max_block_norm = partition
        .blocks()
        .iter()
        .map(|b| b.frobenius_norm())
        .fold(0.0, f64::max);
    let residual = pb.max_block_residual();
    if residual > tol * max_block_norm {
        return Err(Error::DiagonalizationResidual {
            index: pb
                .eigen_diagnostics
                .iter()
                .position(|&r| r >= residual)
                .unwrap_or(0),
            residual,
            tol: tol * max_block_norm,
        });
    }
    let rho_b_norm = rho.partial_trace_a().frobenius_norm();
    if pb.rho_b_offdiag > tol * rho_b_norm {
        return Err(Error::ReducedStateNotDiagonal {
            residual: pb.rho_b_offdiag,
            tol: tol * rho_b_norm,
        });
    }
    Ok(pb)
}

/// \u{2016}rho - sum_{i,j,k} C_{ijk} |i><j| (x) U|k><k|U\u{2020}\u{2016}_F:
/// how far the pointer reconstruction sits from the state itself.
pub fn verify_pointer(rho: &BipartiteDensityMatrix, pb: &PointerBasis) -> f64 {
    let (n, m) = (rho.dim_a(), rho.dim_b());
    assert_eq!(pb.unitary.rows(), m, "pointer basis must act on B");
    let u = &pb.unitary;
    let u_adj = u.adjoint();
    let mut rebuilt = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let diag: Vec<Complex64> = (0..m).map(|k| pb.coefficients.get(i, j, k)).collect();
            let block = u.matmul(&ComplexMatrix::diagonal(&diag)).matmul(&u_adj);
            for r in 0..m {
                for c in 0..m {
                    rebuilt.set(i * m + r, j * m + c, block.get(r, c));
                }
            }
        }
    }
    rebuilt.sub(rho.matrix()).frobenius_norm()
}

/// Sufficient separability check: a state whose blocks are all diagonal is
/// separable. The converse does not hold, so `false` says nothing.
/// Off-diagonal mass is compared against `tol` times the total matrix norm.
pub fn separability_hint(p: &BlockPartition, tol: f64) -> bool {
    let total: f64 = p
        .blocks()
        .iter()
        .map(|b| b.frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt();
    p.blocks().iter().all(|b| b.offdiag_norm() <= tol * total)
}

/// Attach an ancilla to the apparatus side and re-run the criterion: the
/// blocks of rho (x) rho_C are rho^(i j) (x) rho_C, and
/// [B (x) C, B' (x) C] = [B, B'] (x) C^2, so the verdict cannot change. This
/// is the reason a POVM (a projective measurement on B plus ancilla) cannot
/// turn nonzero discord into zero. Returns the verdicts on the original and
/// on the extended state; callers assert the flags agree.
pub fn extend_with_ancilla(
    rho: &BipartiteDensityMatrix,
    rho_c: &ComplexMatrix,
    tol: f64,
) -> Result<(DiscordVerdict, DiscordVerdict)> {
    // Any square density is enough for the argument; validate it as a
    // trivially-bipartite 1 (x) d state.
    let d = rho_c.rows();
    BipartiteDensityMatrix::validate(rho_c.clone(), 1, d, crate::density::DEFAULT_VALIDATION_TOL)?;

    let base = zero_discord_verdict(rho, tol);
    // The tensor of two valid densities is valid (defects add, spectra
    // multiply); skip re-validation so states accepted at a looser
    // tolerance flow through unchanged.
    let extended = BipartiteDensityMatrix::from_parts_unchecked(
        rho.dim_a(),
        rho.dim_b() * d,
        rho.matrix().tensor(rho_c),
    );
    let ext = zero_discord_verdict(&extended, tol);
    Ok((base, ext))
}
