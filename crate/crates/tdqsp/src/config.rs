//! JSON run configuration and the CSV result row.
//!
//! Unknown keys are rejected so configs stay diffable and typos surface as
//! parse errors (exit 2).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::CoefficientFn;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::models::{floquet_hamiltonian, ising_quench, lattice_chain};
use crate::tdsim::{InputMode, SimMode, TDHamiltonian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ModeConfig {
    #[default]
    #[serde(rename = "effective-time")]
    EffectiveTime,
    #[serde(rename = "m-fold")]
    MFold,
}

impl From<ModeConfig> for SimMode {
    fn from(m: ModeConfig) -> Self {
        match m {
            ModeConfig::EffectiveTime => SimMode::EffectiveTime,
            ModeConfig::MFold => SimMode::MFold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum InputModeConfig {
    #[default]
    #[serde(rename = "evolution-oracle")]
    EvolutionOracle,
    #[serde(rename = "direct-encoding")]
    DirectEncoding,
}

impl From<InputModeConfig> for InputMode {
    fn from(m: InputModeConfig) -> Self {
        match m {
            InputModeConfig::EvolutionOracle => InputMode::EvolutionOracle,
            InputModeConfig::DirectEncoding => InputMode::DirectEncoding,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffConfig {
    Constant { value: f64 },
    Poly { monomial: Vec<f64> },
    Trig { m: i32, omega: f64 },
    Rect { t_on: f64, t_off: f64, amplitude: f64 },
}

impl CoeffConfig {
    pub fn build(&self) -> Result<CoefficientFn> {
        match self {
            CoeffConfig::Constant { value } => CoefficientFn::constant(*value),
            CoeffConfig::Poly { monomial } => CoefficientFn::poly_monomial(monomial),
            CoeffConfig::Trig { m, omega } => CoefficientFn::trig(*m, *omega),
            CoeffConfig::Rect { t_on, t_off, amplitude } => {
                CoefficientFn::rect(*t_on, *t_off, *amplitude)
            }
        }
    }
}

/// Complex matrix as rows of `[re, im]` pairs.
pub type MatrixConfig = Vec<Vec<[f64; 2]>>;

fn matrix_from_config(m: &MatrixConfig) -> Result<ComplexMatrix> {
    let dim = m.len();
    if dim == 0 || m.iter().any(|row| row.len() != dim) {
        return Err(Error::Config("matrix must be square and nonempty".into()));
    }
    let mut out = ComplexMatrix::zeros(dim);
    for (i, row) in m.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Lattice {
        n: usize,
        coefficients: Vec<CoeffConfig>,
        #[serde(default)]
        input_mode: InputModeConfig,
    },
    Floquet {
        period: f64,
        m_max: usize,
        /// Fourier modes keyed by the integer `m` as a string.
        h_terms: BTreeMap<String, MatrixConfig>,
        #[serde(default)]
        input_mode: InputModeConfig,
    },
    IsingQuench {
        n: usize,
        j: f64,
        h_amp: f64,
        t_on: f64,
        t_off: f64,
        delta: f64,
        eps_rect: f64,
        #[serde(default)]
        input_mode: InputModeConfig,
    },
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Lattice { .. } => "lattice",
            ModelConfig::Floquet { .. } => "floquet",
            ModelConfig::IsingQuench { .. } => "ising_quench",
        }
    }

    pub fn build(&self) -> Result<TDHamiltonian> {
        match self {
            ModelConfig::Lattice { n, coefficients, input_mode } => {
                let coeffs = coefficients.iter().map(|c| c.build()).collect::<Result<Vec<_>>>()?;
                lattice_chain(*n, coeffs, (*input_mode).into())
            }
            ModelConfig::Floquet { period, m_max, h_terms, input_mode } => {
                let mut map = BTreeMap::new();
                for (key, m) in h_terms {
                    let mode: i32 = key.parse().map_err(|_| {
                        Error::Config(format!("h_terms key '{key}' is not an integer"))
                    })?;
                    map.insert(mode, matrix_from_config(m)?);
                }
                floquet_hamiltonian(*period, *m_max, &map, (*input_mode).into())
            }
            ModelConfig::IsingQuench { n, j, h_amp, t_on, t_off, delta, eps_rect, input_mode } => {
                ising_quench(
                    *n,
                    *j,
                    *h_amp,
                    *t_on,
                    *t_off,
                    *delta,
                    *eps_rect,
                    (*input_mode).into(),
                )
            }
        }
    }

    /// Whether the builder's structure guarantees pairwise commutation.
    pub fn expected_commuting(&self) -> bool {
        match self {
            ModelConfig::Lattice { .. } | ModelConfig::Floquet { .. } => true,
            ModelConfig::IsingQuench { j, .. } => *j == 0.0,
        }
    }
}

fn default_oracle_steps() -> usize {
    10_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub t: f64,
    pub eps: f64,
    #[serde(default)]
    pub mode: ModeConfig,
    #[serde(default)]
    pub force_noncommuting: bool,
    #[serde(default = "default_oracle_steps")]
    pub oracle_steps: usize,
    #[serde(default)]
    pub output_path: Option<String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::Config(format!("t = {} outside [0, 1]", self.t)));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::Config(format!("eps = {} outside (0, 1/2)", self.eps)));
        }
        if self.oracle_steps == 0 {
            return Err(Error::Config("oracle_steps must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// One emitted result line; the column order is part of the interface.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub model: String,
    pub n: usize,
    pub t: f64,
    pub eps: f64,
    pub error_vs_expm: f64,
    pub error_vs_timeordered: f64,
    pub w_gate_uses: u64,
    pub encoding_uses: u64,
    pub jacobi_degree: usize,
    pub ancillas_peak: usize,
    pub commuting_pass: bool,
    /// Wall-clock metadata; nondeterministic, kept in the trailing column.
    pub runtime_ms: u128,
}

pub const CSV_HEADER: &str = "model,n,t,eps,error_vs_expm,error_vs_timeordered,w_gate_uses,\
encoding_uses,jacobi_degree,ancillas_peak,commuting_pass,runtime_ms";

impl ResultRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{},{},{},{},{},{}",
            self.model,
            self.n,
            self.t,
            self.eps,
            self.error_vs_expm,
            self.error_vs_timeordered,
            self.w_gate_uses,
            self.encoding_uses,
            self.jacobi_degree,
            self.ancillas_peak,
            self.commuting_pass,
            self.runtime_ms
        )
    }
}
