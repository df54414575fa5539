//! Builders for the three bundled application systems: the nearest-neighbor
//! lattice chain with shared-site couplings, the time-periodic (Floquet)
//! Hamiltonian, and the transverse-field Ising quench.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::cheb::ChebyshevPoly;
use crate::coeffs::CoefficientFn;
use crate::error::{Error, Result};
use crate::matrix::{spectral_norm, ComplexMatrix, C_ZERO};
use crate::pauli::{pauli_matrix, PauliOp, PauliString};
use crate::poly::rect_poly;
use crate::tdsim::{HamiltonianTerm, InputMode, TDHamiltonian};

/// Cyclic site labels X → Y → Z extending the shared-middle-operator
/// pattern to chains of any length.
const CYCLE: [PauliOp; 3] = [PauliOp::X, PauliOp::Y, PauliOp::Z];

fn two_site_term(n: usize, j: usize) -> Result<ComplexMatrix> {
    let mut ops = vec![PauliOp::I; n];
    ops[j] = CYCLE[j % 3];
    ops[j + 1] = CYCLE[(j + 1) % 3];
    let m = pauli_matrix(&PauliString::new(ops)?)?;
    // 1/2 norm fold so each term satisfies the evolution-oracle bound.
    Ok(m.scale(Complex64::new(0.5, 0.0)))
}

/// Chain of `n` qubits with nearest-neighbor two-site couplings whose
/// consecutive terms share the middle site's operator, so all terms commute.
pub fn lattice_chain(
    n: usize,
    coeffs: Vec<CoefficientFn>,
    mode: InputMode,
) -> Result<TDHamiltonian> {
    if !(2..=7).contains(&n) {
        return Err(Error::Model(format!("lattice size {n} outside the desk cap 2..=7")));
    }
    if coeffs.len() != n - 1 {
        return Err(Error::Model(format!(
            "lattice of {n} sites needs {} coefficients, got {}",
            n - 1,
            coeffs.len()
        )));
    }
    let terms = coeffs
        .into_iter()
        .enumerate()
        .map(|(j, coeff)| Ok(HamiltonianTerm { coeff, h: two_site_term(n, j)?, mode }))
        .collect::<Result<Vec<_>>>()?;
    TDHamiltonian::new(n, terms)
}

/// Time-periodic Hamiltonian `H(t) = Σ_m e^{−imωt} H_m`, `ω = 2π/T`, with
/// the Fourier modes cut off at `|m| ≤ m_max`.
///
/// Requires each `H_m` Hermitian with `H_{−m} = H_m†` (so `H(t)` is
/// Hermitian) and all modes pairwise commuting.
pub fn floquet_hamiltonian(
    period: f64,
    m_max: usize,
    h_terms: &BTreeMap<i32, ComplexMatrix>,
    mode: InputMode,
) -> Result<TDHamiltonian> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Model(format!("period {period} must be positive")));
    }
    if h_terms.is_empty() {
        return Err(Error::Model("at least one Fourier mode is required".into()));
    }
    let dim = h_terms.values().next().unwrap().dim();
    if !dim.is_power_of_two() {
        return Err(Error::Model(format!("mode dimension {dim} is not a power of two")));
    }
    for (&m, h) in h_terms {
        if m.unsigned_abs() as usize > m_max {
            return Err(Error::Model(format!("mode {m} exceeds the cutoff |m| ≤ {m_max}")));
        }
        if h.dim() != dim {
            return Err(Error::Model("Fourier modes disagree on dimension".into()));
        }
        if !h.is_hermitian(1e-10) {
            return Err(Error::Model(format!("mode H_{m} is not Hermitian")));
        }
        let partner = h_terms.get(&-m).ok_or_else(|| {
            Error::Model(format!("mode H_{m} lacks its conjugate partner H_{}", -m))
        })?;
        if h.conj_transpose().sub(partner).max_abs_entry() > 1e-10 {
            return Err(Error::Model(format!("H_{} differs from H_{m}† beyond tolerance", -m)));
        }
    }
    let modes: Vec<i32> = h_terms.keys().copied().collect();
    for (i, &m) in modes.iter().enumerate() {
        for &k in &modes[i + 1..] {
            let a = &h_terms[&m];
            let b = &h_terms[&k];
            let comm = a.matmul(b).sub(&b.matmul(a));
            if spectral_norm(&comm) > 1e-10 {
                return Err(Error::Model(format!("modes H_{m} and H_{k} do not commute")));
            }
        }
    }

    let omega = 2.0 * std::f64::consts::PI / period;
    let n = dim.trailing_zeros() as usize;
    let mut terms = Vec::new();
    for (&m, h) in h_terms {
        if h.max_abs_entry() < 1e-14 {
            continue;
        }
        let coeff = if m == 0 {
            CoefficientFn::constant(1.0)?
        } else {
            CoefficientFn::trig(m, omega)?
        };
        terms.push(HamiltonianTerm { coeff, h: h.clone(), mode });
    }
    TDHamiltonian::new(n, terms)
}

/// Even polynomial close to 1 on the pulse window `(t_on, t_off)` and close
/// to 0 on the rest of [−1, 1], built as a difference of two bounded
/// rectangle polynomials.
pub fn window_polynomial(t_on: f64, t_off: f64, delta: f64, eps: f64) -> Result<ChebyshevPoly> {
    if !(0.0 <= t_on && t_on < t_off && t_off + delta <= 1.0) {
        return Err(Error::Domain(format!(
            "pulse window [{t_on}, {t_off}] with transition {delta} must fit inside [0, 1]"
        )));
    }
    if t_off - t_on <= 2.0 * delta {
        return Err(Error::Domain(format!(
            "pulse window [{t_on}, {t_off}] narrower than twice the transition {delta}"
        )));
    }
    let hi = rect_poly(t_off, delta, eps)?;
    if t_on <= delta {
        return Ok(hi);
    }
    let lo = rect_poly(t_on, delta, eps)?;
    let len = hi.coeffs().len().max(lo.coeffs().len());
    let mut coeffs = vec![C_ZERO; len];
    for (k, c) in hi.coeffs().iter().enumerate() {
        coeffs[k] += c;
    }
    for (k, c) in lo.coeffs().iter().enumerate() {
        coeffs[k] -= c;
    }
    Ok(ChebyshevPoly::from_coeffs(coeffs).trimmed(1e-15))
}

/// Transverse-field Ising chain with a polynomial-realized pulse on the
/// field: ZZ couplings with constant weight `−j` plus per-site X terms whose
/// coefficient is the bounded window polynomial scaled by `h_amp`.
///
/// With `j = 0` only the mutually commuting X terms remain; any nonzero `j`
/// with a non-constant pulse makes the model noncommuting.
#[allow(clippy::too_many_arguments)]
pub fn ising_quench(
    n: usize,
    j: f64,
    h_amp: f64,
    t_on: f64,
    t_off: f64,
    delta: f64,
    eps_rect: f64,
    mode: InputMode,
) -> Result<TDHamiltonian> {
    if !(2..=6).contains(&n) {
        return Err(Error::Model(format!("quench size {n} outside the desk cap 2..=6")));
    }
    if j.abs() > 1.0 + 1e-12 || h_amp.abs() > 1.0 + 1e-12 {
        return Err(Error::Model(format!(
            "coupling |j| = {} and field |h_amp| = {} must stay within 1",
            j.abs(),
            h_amp.abs()
        )));
    }
    let window = window_polynomial(t_on, t_off, delta, eps_rect)?;
    // Keep the realized pulse coefficient within unit magnitude.
    let sup = window.grid_sup(2001).max(1e-12);
    let amp_scale = if sup * h_amp.abs() > 1.0 { 1.0 / sup } else { 1.0 };
    let pulse = window.scale(Complex64::new(h_amp * amp_scale, 0.0)).real_part();

    let mut terms = Vec::new();
    if j != 0.0 {
        for site in 0..n.saturating_sub(1) {
            let mut ops = vec![PauliOp::I; n];
            ops[site] = PauliOp::Z;
            ops[site + 1] = PauliOp::Z;
            let h = pauli_matrix(&PauliString::new(ops)?)?.scale(Complex64::new(0.5, 0.0));
            terms.push(HamiltonianTerm { coeff: CoefficientFn::constant(-j)?, h, mode });
        }
    }
    for site in 0..n {
        let mut ops = vec![PauliOp::I; n];
        ops[site] = PauliOp::X;
        let h = pauli_matrix(&PauliString::new(ops)?)?.scale(Complex64::new(0.5, 0.0));
        terms.push(HamiltonianTerm {
            coeff: CoefficientFn::poly_chebyshev(pulse.clone())?,
            h,
            mode,
        });
    }
    TDHamiltonian::new(n, terms)
}
