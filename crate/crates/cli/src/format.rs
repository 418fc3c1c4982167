//! On-disk state format.
//!
//! Structured JSON with explicit [re, im] pairs: diff-able, bit-exact under
//! round-trips (floats serialize in shortest-roundtrip form), and trivially
//! portable. The basis ordering is the crate-wide convention, subsystem A
//! slow and B fast.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use qdiscord_core::Complex64;
use serde::{Deserialize, Serialize};

use qdiscord_core::{BipartiteDensityMatrix, ComplexMatrix};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    /// (dim_a, dim_b).
    pub dims: (usize, usize),
    /// NM x NM row-major entries, each as [re, im].
    pub entries: Vec<Vec<[f64; 2]>>,
    /// Free-form provenance: family, parameters, seeds.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl MatrixFile {
    pub fn from_state(rho: &BipartiteDensityMatrix, metadata: BTreeMap<String, String>) -> Self {
        let dim = rho.dim();
        let entries = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| {
                        let z = rho.matrix().get(r, c);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            dims: (rho.dim_a(), rho.dim_b()),
            entries,
            metadata,
        }
    }

    pub fn to_matrix(&self) -> anyhow::Result<ComplexMatrix> {
        let (n, m) = self.dims;
        if n == 0 || m == 0 {
            bail!("dims must be positive, got {:?}", self.dims);
        }
        let dim = n * m;
        if self.entries.len() != dim {
            bail!(
                "expected {dim} rows for dims {:?}, found {}",
                self.dims,
                self.entries.len()
            );
        }
        let mut flat = Vec::with_capacity(dim * dim);
        for (r, row) in self.entries.iter().enumerate() {
            if row.len() != dim {
                bail!("row {r} has {} entries, expected {dim}", row.len());
            }
            for &[re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    bail!("non-finite entry in row {r}");
                }
                flat.push(Complex64::new(re, im));
            }
        }
        Ok(ComplexMatrix::new(dim, dim, flat))
    }

    /// Parse and validate as a density matrix at `tol`.
    pub fn validate(&self, tol: f64) -> anyhow::Result<BipartiteDensityMatrix> {
        let matrix = self.to_matrix()?;
        BipartiteDensityMatrix::validate(matrix, self.dims.0, self.dims.1, tol)
            .map_err(anyhow::Error::from)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}
