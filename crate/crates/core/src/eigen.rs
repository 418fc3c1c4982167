//! Hermitian eigendecomposition and simultaneous diagonalization of
//! commuting normal families.
//!
//! The eigensolver is a cyclic complex Jacobi iteration: each rotation is a
//! plane rotation combined with a phase that annihilates one off-diagonal
//! entry. Successive rotations disturb earlier zeros but the off-diagonal
//! mass decreases quadratically once sweeps settle, and the accumulated
//! rotations form the eigenvector matrix. For the matrix sizes this crate
//! targets (tens per side) it is simple and accurate enough that no external
//! solver is needed.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// Convergence target for the Jacobi sweep, relative to \u{2016}H\u{2016}_F.
const JACOBI_REL_TOL: f64 = 1e-14;
/// Hard cap on Jacobi sweeps.
const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this fraction of the spectral range are treated
/// as one degenerate cluster during refinement.
const DEGENERACY_REL: f64 = 1e-8;
/// Absolute floor for the cluster threshold so that blocks which are exactly
/// a multiple of the identity (spectral range at noise level) are not split.
const DEGENERACY_FLOOR_REL: f64 = 1e-12;

/// Spectrum of a Hermitian matrix: eigenvalues sorted descending, column k of
/// `eigenvectors` paired with `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenResult {
    /// \u{2016}U \u{39b} U\u{2020} - H\u{2016}_F, the reconstruction residual.
    pub fn reconstruction_residual(&self, h: &ComplexMatrix) -> f64 {
        let u = &self.eigenvectors;
        let lambda = ComplexMatrix::diagonal_real(&self.eigenvalues);
        u.matmul(&lambda)
            .matmul(&u.adjoint())
            .sub(h)
            .frobenius_norm()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// `tol` bounds the accepted hermiticity defect relative to \u{2016}H\u{2016}_F;
/// the input is symmetrized before iterating. Eigenvalues come out sorted
/// descending and each eigenvector is scaled so its largest-modulus component
/// is real and positive, which makes results reproducible across runs.
pub fn hermitian_eig(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigenResult> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let n = h.rows();
    let norm = h.frobenius_norm();
    let defect = h.hermiticity_defect();
    if defect > tol * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { defect, tol });
    }
    if norm == 0.0 {
        return Ok(HermitianEigenResult {
            eigenvalues: vec![0.0; n],
            eigenvectors: ComplexMatrix::identity(n),
        });
    }

    let mut a = h.hermitian_part();
    let mut u = ComplexMatrix::identity(n);
    let target = JACOBI_REL_TOL * norm;

    let mut converged = false;
    let mut last_off = f64::INFINITY;
    for _sweep in 0..MAX_SWEEPS {
        let off = a.offdiag_norm();
        last_off = off;
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut u, p, q);
            }
        }
    }
    if !converged && a.offdiag_norm() > target {
        return Err(Error::EigenNoConvergence {
            sweeps: MAX_SWEEPS,
            offdiag: last_off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors.set(r, dst, u.get(r, src));
        }
    }
    fix_column_phases(&mut eigenvectors);

    Ok(HermitianEigenResult {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating the (p, q) entry of the Hermitian
/// matrix `a`, accumulated into `u`.
fn rotate(a: &mut ComplexMatrix, u: &mut ComplexMatrix, p: usize, q: usize) {
    let beta = a.get(p, q);
    let babs = beta.norm();
    if babs == 0.0 {
        return;
    }
    let phase = beta / babs;
    let alpha = a.get(p, p).re;
    let gamma = a.get(q, q).re;

    // tan of the rotation angle from the stable quadratic root.
    let theta = (alpha - gamma) / (2.0 * babs);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = phase.conj() * (t * c);

    let n = a.rows();
    // A <- A V (columns p, q).
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * c + aiq * s);
        a.set(i, q, aiq * c - aip * s.conj());
    }
    // A <- V' A (rows p, q).
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * c + aqj * s.conj());
        a.set(q, j, aqj * c - apj * s);
    }
    // The rotation zeroes (p, q) analytically; pin it to kill roundoff and
    // keep the diagonal real.
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
    // U <- U V.
    for i in 0..u.rows() {
        let uip = u.get(i, p);
        let uiq = u.get(i, q);
        u.set(i, p, uip * c + uiq * s);
        u.set(i, q, uiq * c - uip * s.conj());
    }
}

/// Scale each column so its largest-modulus component (lowest index on ties)
/// is real and positive.
fn fix_column_phases(u: &mut ComplexMatrix) {
    let (n, m) = (u.rows(), u.cols());
    for j in 0..m {
        let mut best = 0usize;
        let mut best_mod = 0.0;
        for i in 0..n {
            let v = u.get(i, j).norm();
            if v > best_mod {
                best_mod = v;
                best = i;
            }
        }
        if best_mod == 0.0 {
            continue;
        }
        let pivot = u.get(best, j);
        let phase = pivot / pivot.norm();
        for i in 0..n {
            let v = u.get(i, j) * phase.conj();
            u.set(i, j, v);
        }
        // force the pivot exactly real
        let pv = u.get(best, j);
        u.set(best, j, Complex64::new(pv.norm() * pv.re.signum(), 0.0));
    }
}

/// Result of diagonalizing a commuting family with one shared unitary.
#[derive(Debug, Clone)]
pub struct SimultaneousDiag {
    /// Columns are the shared eigenbasis.
    pub unitary: ComplexMatrix,
    /// True when every family member was numerically zero: any unitary
    /// works, the identity is returned.
    pub trivial: bool,
    /// Largest off-diagonal mass of U\u{2020} A U over the family, relative
    /// to \u{2016}A\u{2016}_F.
    pub max_residual: f64,
}

/// Find one unitary U such that U\u{2020} A U is diagonal for every member of
/// a pairwise-commuting family of normal matrices.
///
/// Each member is split into its Hermitian part (A + A\u{2020})/2 and
/// anti-Hermitian part (A - A\u{2020})/(2i); when the preconditions hold the
/// whole split collection pairwise commutes, so refinement can proceed
/// Hermitian matrix by Hermitian matrix. The first member with norm above
/// the noise floor fixes a basis, and every degenerate eigenvalue cluster is
/// recursively refined by the restriction of the next member until all
/// clusters are one-dimensional or the members are exhausted. A single
/// nondegenerate member therefore determines U on its own, matching the
/// cheap path; the recursion only matters for repeated eigenvalues.
///
/// Preconditions (normality of each member, commutation of every pair) are
/// re-verified here at `tol` and reported with the raw commutator norm of
/// the offending pair when violated.
pub fn simultaneous_diag(family: &[ComplexMatrix], tol: f64) -> Result<SimultaneousDiag> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let n = family[0].rows();
    for m in family {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: m.rows(),
            });
        }
    }

    let norms: Vec<f64> = family.iter().map(|m| m.frobenius_norm()).collect();
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    if max_norm == 0.0 {
        return Ok(SimultaneousDiag {
            unitary: ComplexMatrix::identity(n),
            trivial: true,
            max_residual: 0.0,
        });
    }

    // Precondition sweep: normality of each member, commutation of each pair.
    for (i, m) in family.iter().enumerate() {
        if norms[i] == 0.0 {
            continue;
        }
        let defect = m.commutator(&m.adjoint()).frobenius_norm();
        if defect > tol * norms[i] * norms[i] {
            return Err(Error::NonNormalMember { index: i, defect });
        }
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let comm = family[i].commutator(&family[j]).frobenius_norm();
            if comm > tol * norms[i] * norms[j] {
                return Err(Error::NonCommutingFamily {
                    first: i,
                    second: j,
                    commutator_norm: comm,
                });
            }
        }
    }

    // Split into Hermitian pieces, skipping numerically-zero parts: they
    // constrain nothing.
    let mut members: Vec<ComplexMatrix> = Vec::new();
    for m in family {
        for part in [m.hermitian_part(), m.anti_hermitian_part()] {
            if part.frobenius_norm() > tol * max_norm {
                members.push(part);
            }
        }
    }
    if members.is_empty() {
        return Ok(SimultaneousDiag {
            unitary: ComplexMatrix::identity(n),
            trivial: true,
            max_residual: 0.0,
        });
    }

    let mut u = ComplexMatrix::identity(n);
    refine(&mut u, 0, n, &members, 0)?;
    fix_column_phases(&mut u);

    // Verify every original member comes out diagonal in the final basis.
    let mut max_residual = 0.0f64;
    for (i, m) in family.iter().enumerate() {
        if norms[i] == 0.0 {
            continue;
        }
        let residual = u.adjoint().matmul(m).matmul(&u).offdiag_norm();
        let rel = residual / norms[i];
        max_residual = max_residual.max(rel);
        if rel > tol {
            return Err(Error::DiagonalizationResidual {
                index: i,
                residual,
                tol: tol * norms[i],
            });
        }
    }

    Ok(SimultaneousDiag {
        unitary: u,
        trivial: false,
        max_residual,
    })
}

/// Refine columns [start, start+len) of `u` using `members[next..]`.
fn refine(
    u: &mut ComplexMatrix,
    start: usize,
    len: usize,
    members: &[ComplexMatrix],
    next: usize,
) -> Result<()> {
    if len <= 1 || next >= members.len() {
        return Ok(());
    }
    let m = &members[next];
    let n = u.rows();

    // Restriction B = Uc' M Uc on the current cluster's column span.
    let mut uc = ComplexMatrix::zeros(n, len);
    for r in 0..n {
        for c in 0..len {
            uc.set(r, c, u.get(r, start + c));
        }
    }
    let b = uc.adjoint().matmul(m).matmul(&uc);
    // B is Hermitian up to roundoff because M is; symmetrize hard so the
    // eigensolver never rejects it.
    let eig = hermitian_eig(&b.hermitian_part(), 1.0)?;

    // Rotate the cluster columns into the refined basis.
    let refined = uc.matmul(&eig.eigenvectors);
    for r in 0..n {
        for c in 0..len {
            u.set(r, start + c, refined.get(r, c));
        }
    }

    // Cluster the (descending) eigenvalues and recurse into each degenerate
    // cluster with the next member.
    let scale = m.frobenius_norm();
    let range = eig.eigenvalues[0] - eig.eigenvalues[len - 1];
    let threshold = (DEGENERACY_REL * range).max(DEGENERACY_FLOOR_REL * scale);

    let mut cluster_start = 0usize;
    for k in 1..=len {
        let boundary = k == len || eig.eigenvalues[k - 1] - eig.eigenvalues[k] > threshold;
        if boundary {
            refine(
                u,
                start + cluster_start,
                k - cluster_start,
                members,
                next + 1,
            )?;
            cluster_start = k;
        }
    }
    Ok(())
}
