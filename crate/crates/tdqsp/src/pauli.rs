//! Pauli strings and their materialization as tensor-product matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron, ComplexMatrix, DIM_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn matrix(self) -> ComplexMatrix {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            PauliOp::I => ComplexMatrix::from_rows(&[vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(1., 0.)]]),
            PauliOp::X => ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]),
            PauliOp::Y => ComplexMatrix::from_rows(&[vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]]),
            PauliOp::Z => ComplexMatrix::from_rows(&[vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]]),
        }
    }

    pub fn from_char(ch: char) -> Result<Self> {
        match ch {
            'I' => Ok(PauliOp::I),
            'X' => Ok(PauliOp::X),
            'Y' => Ok(PauliOp::Y),
            'Z' => Ok(PauliOp::Z),
            other => Err(Error::Domain(format!("unknown Pauli label '{other}'"))),
        }
    }
}

/// Per-site Pauli labels on an `n_sites` register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    ops: Vec<PauliOp>,
}

impl PauliString {
    pub fn new(ops: Vec<PauliOp>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::Domain("PauliString needs at least one site".into()));
        }
        Ok(Self { ops })
    }

    /// Parses labels like `"XYI"`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.chars().map(PauliOp::from_char).collect::<Result<Vec<_>>>()?)
    }

    pub fn n_sites(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.ops
    }

    /// Number of sites where `self` and `other` carry distinct non-identity
    /// Paulis; the strings commute iff this count is even.
    pub fn anticommuting_sites(&self, other: &PauliString) -> usize {
        self.ops
            .iter()
            .zip(&other.ops)
            .filter(|(a, b)| **a != PauliOp::I && **b != PauliOp::I && a != b)
            .count()
    }
}

/// Materializes the ordered Kronecker product of the single-site Paulis.
pub fn pauli_matrix(p: &PauliString) -> Result<ComplexMatrix> {
    let dim = 1usize
        .checked_shl(p.n_sites() as u32)
        .filter(|&d| d <= DIM_CAP)
        .ok_or(Error::Sizing { dim: usize::MAX, cap: DIM_CAP })?;
    let _ = dim;
    let mut out = p.ops[0].matrix();
    for op in &p.ops[1..] {
        out = kron(&out, &op.matrix())?;
    }
    Ok(out)
}
