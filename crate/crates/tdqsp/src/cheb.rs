//! Chebyshev-basis polynomials: fitting, evaluation, parity bookkeeping,
//! and exact antiderivatives.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::C_ZERO;

/// Coefficient magnitude (relative to the largest) below which the
/// off-parity part is considered certified zero.
pub const PARITY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    NoParity,
}

/// Polynomial in the Chebyshev basis `P(x) = Σ c_k T_k(x)` with a declared
/// parity and a sup-norm bound taken on a 1001-point grid over [−1, 1].
#[derive(Debug, Clone)]
pub struct ChebyshevPoly {
    coeffs: Vec<Complex64>,
    parity: Parity,
    sup_bound: f64,
}

impl ChebyshevPoly {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        let parity = detect_parity(&coeffs);
        let mut poly = Self { coeffs, parity, sup_bound: 0.0 };
        poly.sup_bound = poly.grid_sup(1001);
        poly
    }

    pub fn from_real_coeffs(coeffs: &[f64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Largest index with a coefficient above `tol` relative to the largest.
    pub fn effective_degree(&self, tol: f64) -> usize {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > tol * scale)
            .unwrap_or(0)
    }

    /// Drops trailing coefficients below `tol` (relative), keeping parity.
    pub fn trimmed(&self, tol: f64) -> Self {
        let d = self.effective_degree(tol);
        Self::from_coeffs(self.coeffs[..=d].to_vec())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.norm() <= tol)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }

    /// Clenshaw evaluation at real `x`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut b1 = C_ZERO;
        let mut b2 = C_ZERO;
        for &c in self.coeffs.iter().skip(1).rev() {
            let next = c + b1 * (2.0 * x) - b2;
            b2 = b1;
            b1 = next;
        }
        self.coeffs[0] + b1 * x - b2
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(x).re
    }

    pub fn grid_sup(&self, points: usize) -> f64 {
        chebyshev_lobatto_grid(points)
            .into_iter()
            .map(|x| self.eval(x).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Real-part polynomial (same parity structure).
    pub fn real_part(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| Complex64::new(c.re, 0.0)).collect())
    }

    /// Imaginary-part polynomial.
    pub fn imag_part(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| Complex64::new(c.im, 0.0)).collect())
    }

    /// Even-index coefficients only.
    pub fn even_part(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c } else { C_ZERO })
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Odd-index coefficients only.
    pub fn odd_part(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 1 { c } else { C_ZERO })
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Exact antiderivative with `Q(0) = 0`, so `Q(t) = ∫₀ᵗ P(x) dx`.
    pub fn antiderivative(&self) -> Self {
        let d = self.coeffs.len() - 1;
        let mut b = vec![C_ZERO; d + 2];
        for (k, &c) in self.coeffs.iter().enumerate() {
            match k {
                0 => b[1] += c,
                1 => b[2] += c * 0.25,
                _ => {
                    b[k + 1] += c / (2.0 * (k as f64 + 1.0));
                    b[k - 1] -= c / (2.0 * (k as f64 - 1.0));
                }
            }
        }
        let mut q = Self::from_coeffs(b);
        let at_zero = q.eval(0.0);
        q.coeffs[0] -= at_zero;
        Self::from_coeffs(q.coeffs)
    }

    /// Requires the declared parity to be definite.
    pub fn require_parity(&self) -> Result<Parity> {
        match self.parity {
            Parity::NoParity => Err(Error::Parity(
                "polynomial has no definite parity; split even/odd parts first".into(),
            )),
            p => Ok(p),
        }
    }
}

fn detect_parity(coeffs: &[Complex64]) -> Parity {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Parity::Even;
    }
    let odd_small = coeffs.iter().skip(1).step_by(2).all(|c| c.norm() <= PARITY_TOL * scale);
    let even_small = coeffs.iter().step_by(2).all(|c| c.norm() <= PARITY_TOL * scale);
    if odd_small {
        Parity::Even
    } else if even_small {
        Parity::Odd
    } else {
        Parity::NoParity
    }
}

/// `points` Chebyshev–Lobatto nodes `cos(jπ/(points−1))`, including ±1.
pub fn chebyshev_lobatto_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|j| (std::f64::consts::PI * j as f64 / (points - 1) as f64).cos())
        .collect()
}

/// Zeros of `T_n`: `cos(π(k+½)/n)`, k = 0..n−1.
pub fn chebyshev_zeros(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// Chebyshev coefficients (length `n`) from values at the zeros of `T_n`,
/// exact for polynomials of degree < n.
pub fn coeffs_from_zero_values(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut coeffs = vec![C_ZERO; n];
    for (j, c) in coeffs.iter_mut().enumerate() {
        let mut acc = C_ZERO;
        for (k, &v) in values.iter().enumerate() {
            let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            acc += v * (j as f64 * theta).cos();
        }
        let weight = if j == 0 { 1.0 } else { 2.0 };
        *c = acc * (weight / n as f64);
    }
    coeffs
}

/// Chebyshev interpolant of `f` at `degree + 1` Chebyshev points.
///
/// The parity hint symmetrizes certified-tiny off-parity coefficients to
/// exact zeros; detection still decides the declared parity.
pub fn cheb_fit(
    f: impl Fn(f64) -> Complex64,
    degree: usize,
    hint: Option<Parity>,
) -> ChebyshevPoly {
    let n = degree + 1;
    let values: Vec<Complex64> = chebyshev_zeros(n).into_iter().map(f).collect();
    let mut coeffs = coeffs_from_zero_values(&values);
    if let Some(p) = hint {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let off_parity = |k: usize| match p {
            Parity::Even => k % 2 == 1,
            Parity::Odd => k % 2 == 0,
            Parity::NoParity => false,
        };
        let certifiable = coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| off_parity(*k))
            .all(|(_, c)| c.norm() <= 1e-13 * scale.max(1e-300));
        if certifiable {
            for (k, c) in coeffs.iter_mut().enumerate() {
                if off_parity(k) {
                    *c = C_ZERO;
                }
            }
        }
    }
    ChebyshevPoly::from_coeffs(coeffs)
}

/// Grows the fit degree until the interpolant matches `f` within `tol` on a
/// dense grid, starting from `start` and doubling up to `cap`.
pub fn cheb_fit_adaptive(
    f: impl Fn(f64) -> Complex64 + Copy,
    tol: f64,
    hint: Option<Parity>,
    start: usize,
    cap: usize,
) -> Result<ChebyshevPoly> {
    let grid = chebyshev_lobatto_grid(501);
    let mut degree = start.max(2);
    loop {
        let poly = cheb_fit(f, degree, hint);
        let err = grid
            .iter()
            .map(|&x| (poly.eval(x) - f(x)).norm())
            .fold(0.0, f64::max);
        if err <= tol {
            return Ok(poly.trimmed(1e-15));
        }
        if degree >= cap {
            return Err(Error::Convergence {
                what: format!("chebyshev fit stalled at degree {degree}"),
                residual: err,
            });
        }
        degree = (degree * 2).min(cap);
    }
}
