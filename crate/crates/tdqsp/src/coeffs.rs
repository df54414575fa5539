//! Time-dependent coefficient functions `γ(t)` with closed-form definite
//! integrals `α(t) = ∫₀ᵗ γ(s) ds`.
//!
//! Four kinds: constants, polynomials in `t` (stored in the Chebyshev basis
//! for conditioning at high degree), Fourier modes `e^{−imωt}`, and
//! rectangle pulses. Evaluation is defined on all of [−1, 1] so parity
//! splitting of the integrals works; the unit-magnitude invariant is
//! enforced on the physical domain [0, 1].

use num_complex::Complex64;

use crate::cheb::{cheb_fit, ChebyshevPoly};
use crate::error::{Error, Result};
use crate::matrix::{C_ONE, C_ZERO};

#[derive(Debug, Clone)]
pub enum CoefficientKind {
    Constant(f64),
    /// Real polynomial in `t` over [−1, 1], Chebyshev basis.
    Poly(ChebyshevPoly),
    /// `e^{−i m ω t}` with integer `m ≠ 0` and `ω > 0`.
    Trig { m: i32, omega: f64 },
    /// `amplitude` on `[t_on, t_off] ⊆ [0, 1]`, zero elsewhere.
    Rect { t_on: f64, t_off: f64, amplitude: f64 },
}

#[derive(Debug, Clone)]
pub struct CoefficientFn {
    kind: CoefficientKind,
}

fn check_time(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("time {t} outside [0, 1]")));
    }
    Ok(())
}

impl CoefficientFn {
    pub fn constant(c: f64) -> Result<Self> {
        Self::from_kind(CoefficientKind::Constant(c))
    }

    /// Monomial coefficients `(c₀, c₁, …)` for `Σ c_k t^k`.
    pub fn poly_monomial(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > 32 {
            return Err(Error::Domain(
                "monomial polynomial needs 1..=32 coefficients; use the Chebyshev form beyond"
                    .into(),
            ));
        }
        let cs = coeffs.to_vec();
        let eval = move |x: f64| {
            let mut acc = 0.0;
            for &c in cs.iter().rev() {
                acc = acc * x + c;
            }
            Complex64::new(acc, 0.0)
        };
        let poly = cheb_fit(&eval, coeffs.len() - 1, None);
        Self::from_kind(CoefficientKind::Poly(poly))
    }

    pub fn poly_chebyshev(poly: ChebyshevPoly) -> Result<Self> {
        if !poly.is_real(1e-12) {
            return Err(Error::Domain("polynomial coefficient must be real".into()));
        }
        Self::from_kind(CoefficientKind::Poly(poly.real_part()))
    }

    pub fn trig(m: i32, omega: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("trig mode m = 0 is a constant; use constant(1)".into()));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("trig omega {omega} must be positive")));
        }
        Self::from_kind(CoefficientKind::Trig { m, omega })
    }

    pub fn rect(t_on: f64, t_off: f64, amplitude: f64) -> Result<Self> {
        if !(0.0 <= t_on && t_on < t_off && t_off <= 1.0) {
            return Err(Error::Domain(format!(
                "rect window [{t_on}, {t_off}] must sit inside [0, 1]"
            )));
        }
        Self::from_kind(CoefficientKind::Rect { t_on, t_off, amplitude })
    }

    fn from_kind(kind: CoefficientKind) -> Result<Self> {
        let f = Self { kind };
        // |γ(t)| ≤ 1 on a 1001-point grid over the physical domain.
        let worst = (0..=1000)
            .map(|k| f.eval_extended(k as f64 / 1000.0).norm())
            .fold(0.0, f64::max);
        if worst > 1.0 + 1e-9 {
            return Err(Error::Domain(format!(
                "coefficient magnitude reaches {worst:.6} > 1 on [0, 1]"
            )));
        }
        Ok(f)
    }

    pub fn kind(&self) -> &CoefficientKind {
        &self.kind
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.kind, CoefficientKind::Trig { .. })
    }

    /// Closed-form value at `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        check_time(t)?;
        Ok(self.eval_extended(t))
    }

    /// Value under the analytic extension to [−1, 1].
    pub fn eval_extended(&self, t: f64) -> Complex64 {
        match &self.kind {
            CoefficientKind::Constant(c) => Complex64::new(*c, 0.0),
            CoefficientKind::Poly(p) => p.eval(t),
            CoefficientKind::Trig { m, omega } => {
                Complex64::from_polar(1.0, -(*m as f64) * omega * t)
            }
            CoefficientKind::Rect { t_on, t_off, amplitude } => {
                if t >= *t_on && t <= *t_off {
                    Complex64::new(*amplitude, 0.0)
                } else {
                    C_ZERO
                }
            }
        }
    }

    /// Exact definite integral `∫₀ᵗ γ(s) ds` at `t ∈ [0, 1]`.
    pub fn integral(&self, t: f64) -> Result<Complex64> {
        check_time(t)?;
        Ok(self.integral_extended(t))
    }

    /// Definite integral under the analytic extension to [−1, 1].
    pub fn integral_extended(&self, t: f64) -> Complex64 {
        match &self.kind {
            CoefficientKind::Constant(c) => Complex64::new(c * t, 0.0),
            CoefficientKind::Poly(p) => p.antiderivative().eval(t),
            CoefficientKind::Trig { m, omega } => {
                // ∫₀ᵗ e^{−imωs} ds = (1 − e^{−imωt}) / (imω)
                let imw = Complex64::new(0.0, *m as f64 * *omega);
                (C_ONE - Complex64::from_polar(1.0, -(*m as f64) * omega * t)) / imw
            }
            CoefficientKind::Rect { t_on, t_off, amplitude } => {
                let covered = (t.min(*t_off) - t_on).max(0.0);
                Complex64::new(amplitude * covered, 0.0)
            }
        }
    }
}
