//! On-disk JSON formats. Complex entries are `[re, im]` pairs; matrices are
//! row-major nested arrays. Numbers round-trip bit-exactly through
//! serde_json's shortest-representation float encoding.

use discrim_core::matrix::{CMatrix, CVector, HermitianOperator};
use discrim_core::registers::RegisterLayout;
use discrim_core::{Povm, PovmKind, StateVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Normalization slack accepted when loading program states.
pub const STATE_NORM_TOL: f64 = 1e-8;

/// A POVM on file: `n + 1` square matrices of dimension `m^(n+1)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmFile {
    pub n: usize,
    pub m: usize,
    pub kind: String,
    pub elements: Vec<Vec<Vec<[f64; 2]>>>,
}

/// A set of program states: one amplitude list per state, each of length `m`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSetFile {
    pub m: usize,
    pub states: Vec<Vec<[f64; 2]>>,
}

impl PovmFile {
    pub fn from_povm(p: &Povm) -> Self {
        let elements = p
            .elements()
            .iter()
            .map(|op| {
                let mat = op.matrix();
                (0..mat.nrows())
                    .map(|r| (0..mat.ncols()).map(|c| [mat[(r, c)].re, mat[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        Self {
            n: p.n(),
            m: p.m(),
            kind: p.kind().as_str().to_string(),
            elements,
        }
    }

    /// Validates shape and rebuilds the operators. The declared kind is
    /// returned separately: the reconstructed [`Povm`] carries the matrices
    /// only and makes no closed-form claims about them.
    pub fn into_povm(self) -> Result<(Povm, PovmKind), CliError> {
        let kind = PovmKind::parse(&self.kind)
            .ok_or_else(|| CliError::Format(format!("unknown device kind {:?}", self.kind)))?;
        if self.n < 1 || self.m < 1 {
            return Err(CliError::Format("n and m must be positive".into()));
        }
        let layout = RegisterLayout::new(self.n, self.m);
        let dim = layout.total_dim();
        if self.elements.len() != self.n + 1 {
            return Err(CliError::Format(format!(
                "expected {} elements, found {}",
                self.n + 1,
                self.elements.len()
            )));
        }
        let mut ops = Vec::with_capacity(self.elements.len());
        for (idx, rows) in self.elements.iter().enumerate() {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(CliError::Format(format!(
                    "element {idx} is not a {dim}x{dim} matrix"
                )));
            }
            let mat = CMatrix::from_shape_fn((dim, dim), |(r, c)| {
                Complex64::new(rows[r][c][0], rows[r][c][1])
            });
            ops.push(HermitianOperator::new(mat).map_err(|e| CliError::Format(e.to_string()))?);
        }
        let povm = Povm::custom(layout, ops).map_err(|e| CliError::Format(e.to_string()))?;
        Ok((povm, kind))
    }
}

impl StateSetFile {
    pub fn from_states(m: usize, states: &[StateVector]) -> Self {
        Self {
            m,
            states: states
                .iter()
                .map(|s| s.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn into_states(self) -> Result<Vec<StateVector>, CliError> {
        let mut out = Vec::with_capacity(self.states.len());
        for (idx, amps) in self.states.iter().enumerate() {
            if amps.len() != self.m {
                return Err(CliError::Format(format!(
                    "state {idx} has {} amplitudes, expected {}",
                    amps.len(),
                    self.m
                )));
            }
            let v: CVector = amps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            let s = StateVector::new(v);
            if (s.norm() - 1.0).abs() > STATE_NORM_TOL {
                return Err(CliError::Format(format!(
                    "state {idx} has norm {}, expected 1 within {STATE_NORM_TOL}",
                    s.norm()
                )));
            }
            out.push(s);
        }
        Ok(out)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Format(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Format(format!("cannot parse {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Format(format!("serialization failed: {e}")))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Format(format!("cannot write {}: {e}", path.display())))
}
