//! Crate-wide error type.
//!
//! Numeric failures carry the measured defect so callers (and the CLI) can
//! report how badly an invariant was violated, not just that it was.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix size {got} does not match dim_a*dim_b = {expected}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (\u{2016}A - A\u{2020}\u{2016}_F = {defect:.3e}, tolerance {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensity(DensityDefects),

    #[error("spectrum is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e}, tolerance {tol:.3e})")]
    InvalidSpectrum { min_eigenvalue: f64, tol: f64 },

    #[error("trace is {trace:.12} instead of 1 (tolerance {tol:.3e})")]
    InvalidTrace { trace: f64, tol: f64 },

    #[error("matrix is not unitary (\u{2016}B\u{2020}B - I\u{2016}_F = {defect:.3e}, tolerance {tol:.3e})")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {offdiag:.3e})")]
    EigenNoConvergence { sweeps: usize, offdiag: f64 },

    #[error(
        "family member {index} is not normal (\u{2016}[A, A\u{2020}]\u{2016}_F = {defect:.3e})"
    )]
    NonNormalMember { index: usize, defect: f64 },

    #[error("family members {first} and {second} do not commute (\u{2016}[A, B]\u{2016}_F = {commutator_norm:.6e})")]
    NonCommutingFamily {
        first: usize,
        second: usize,
        commutator_norm: f64,
    },

    #[error("cannot diagonalize an empty family")]
    EmptyFamily,

    #[error("simultaneous diagonalization left member {index} with off-diagonal residual {residual:.3e} (tolerance {tol:.3e})")]
    DiagonalizationResidual {
        index: usize,
        residual: f64,
        tol: f64,
    },

    #[error("reduced apparatus state is not diagonal in the pointer basis (off-diagonal mass {residual:.3e}, tolerance {tol:.3e})")]
    ReducedStateNotDiagonal { residual: f64, tol: f64 },

    #[error("state has nonzero discord (normality defect {normality_defect:.3e}, commutation defect {commutation_defect:.3e}, tolerance {tol:.3e})")]
    NonzeroDiscord {
        normality_defect: f64,
        commutation_defect: f64,
        tol: f64,
    },

    #[error("parameter {name} = {value} is outside [{min}, {max}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("rank {rank} is invalid for dimension {dim} (need 1 <= rank <= dim)")]
    BadRank { rank: usize, dim: usize },

    #[error(
        "apparatus subsystem has dimension {dim}, this operation requires a qubit (dimension 2)"
    )]
    ApparatusNotQubit { dim: usize },

    #[error("pointer coefficients violate {what} (defect {defect:.3e})")]
    BadPointerCoefficients { what: &'static str, defect: f64 },
}

/// Magnitudes of every density-matrix defect found by validation.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityDefects {
    /// \u{2016}\u{3c1} - \u{3c1}\u{2020}\u{2016}_F relative to \u{2016}\u{3c1}\u{2016}_F.
    pub hermiticity_defect: f64,
    /// |Tr \u{3c1} - 1|.
    pub trace_defect: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    /// Tolerance the checks ran at.
    pub tol: f64,
}

impl DensityDefects {
    pub fn hermitian_ok(&self) -> bool {
        self.hermiticity_defect <= self.tol
    }

    pub fn trace_ok(&self) -> bool {
        self.trace_defect <= self.tol
    }

    pub fn psd_ok(&self) -> bool {
        self.min_eigenvalue >= -self.tol
    }

    pub fn all_ok(&self) -> bool {
        self.hermitian_ok() && self.trace_ok() && self.psd_ok()
    }
}

impl std::fmt::Display for DensityDefects {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if !self.hermitian_ok() {
            parts.push(format!(
                "hermiticity defect {:.3e}",
                self.hermiticity_defect
            ));
        }
        if !self.trace_ok() {
            parts.push(format!("trace defect {:.3e}", self.trace_defect));
        }
        if !self.psd_ok() {
            parts.push(format!("min eigenvalue {:.3e}", self.min_eigenvalue));
        }
        if parts.is_empty() {
            parts.push("no defects".to_string());
        }
        write!(f, "{} (tolerance {:.3e})", parts.join(", "), self.tol)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
