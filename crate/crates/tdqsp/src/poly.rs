//! Polynomial approximation toolbox: Jacobi–Anger expansions of cos/sin,
//! the bounded rectangle polynomial, and the arcsin polynomial behind the
//! logarithm-of-unitary construction.

use num_complex::Complex64;
use statrs::function::erf::{erf, erfc_inv};

use crate::cheb::{cheb_fit, chebyshev_lobatto_grid, ChebyshevPoly, Parity};
use crate::error::{Error, Result};

/// Bessel function of the first kind `J_n(t)` by the ascending power series
/// with compensated summation; terms stop once the tail is below
/// `1e-16` relative to the accumulated value.
pub fn bessel_j(n: usize, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let half = 0.5 * t;
    // term_0 = (t/2)^n / n!, built factor-by-factor so large n underflows
    // gracefully instead of overflowing.
    let mut term = 1.0f64;
    for k in 1..=n {
        term *= half / k as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let mut sum = term;
    let mut comp = 0.0f64; // Kahan compensation
    let mut j = 1usize;
    loop {
        term *= -(half * half) / (j as f64 * (n + j) as f64);
        let y = term - comp;
        let t_new = sum + y;
        comp = (t_new - sum) - y;
        sum = t_new;
        if term.abs() <= 1e-17 * sum.abs().max(1e-280) && (half * half) < (j * (n + j)) as f64 {
            break;
        }
        j += 1;
        if j > 600 {
            break;
        }
    }
    sum
}

/// Jacobi–Anger truncations: even `cos_part ≈ cos(t_eff·x)` and odd
/// `sin_part ≈ sin(t_eff·x)`, each within `eps` in sup norm on [−1, 1].
///
/// Coefficients are Bessel values:
/// `cos(tx) = J₀(t) + 2 Σ_{k≥1} (−1)^k J_{2k}(t) T_{2k}(x)` and
/// `sin(tx) = 2 Σ_{k≥0} (−1)^k J_{2k+1}(t) T_{2k+1}(x)`.
pub fn jacobi_anger(t_eff: f64, eps: f64) -> Result<(ChebyshevPoly, ChebyshevPoly)> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("jacobi_anger eps {eps} outside (0, 1/2)")));
    }
    if !(t_eff >= 0.0 && t_eff.is_finite()) {
        return Err(Error::Domain(format!("jacobi_anger t_eff {t_eff} must be finite and ≥ 0")));
    }
    // Per-parity truncation: since |T_k| ≤ 1, dropping all coefficients past
    // degree K leaves an error of at most 2 Σ_{k>K, parity} |J_k(t)|. Work
    // out far enough that the factorial tail past the table is negligible.
    let half = 0.5 * t_eff;
    let mut table_len = (2.0 * half) as usize + 8;
    loop {
        let mut term = 1.0f64;
        for k in 1..=table_len {
            term *= half / k as f64;
        }
        let ratio = half / (table_len as f64 + 1.0);
        if ratio < 0.5 && 2.0 * term / (1.0 - ratio) < 1e-3 * eps {
            break;
        }
        table_len += 8;
        if table_len > 2000 {
            return Err(Error::Convergence {
                what: "jacobi_anger truncation order exceeded cap".into(),
                residual: term,
            });
        }
    }
    let magnitudes: Vec<f64> = (0..=table_len).map(|k| bessel_j(k, t_eff).abs()).collect();
    let parity_cutoff = |start: usize| -> usize {
        let mut degree = start;
        loop {
            let tail: f64 = (degree + 2..=table_len).step_by(2).map(|k| magnitudes[k]).sum();
            if 2.0 * tail <= eps || degree >= table_len {
                return degree;
            }
            degree += 2;
        }
    };
    let deg_cos = parity_cutoff(0);
    let deg_sin = parity_cutoff(1);

    let mut cos_coeffs = vec![0.0f64; deg_cos + 1];
    cos_coeffs[0] = bessel_j(0, t_eff);
    let mut sign = -1.0;
    let mut idx = 2;
    while idx <= deg_cos {
        cos_coeffs[idx] = 2.0 * sign * bessel_j(idx, t_eff);
        sign = -sign;
        idx += 2;
    }
    let mut sin_coeffs = vec![0.0f64; deg_sin + 1];
    sign = 1.0;
    idx = 1;
    while idx <= deg_sin {
        sin_coeffs[idx] = 2.0 * sign * bessel_j(idx, t_eff);
        sign = -sign;
        idx += 2;
    }
    Ok((
        ChebyshevPoly::from_real_coeffs(&cos_coeffs),
        ChebyshevPoly::from_real_coeffs(&sin_coeffs),
    ))
}

/// Even polynomial close to 1 on `[−t+δ, t−δ]`, close to 0 outside
/// `[−t−δ, t+δ]`, bounded by 1 on all of [−1, 1].
///
/// Built from the smoothed step `(erf(k(x+t)) + erf(k(t−x)))/2`, Chebyshev
/// projection, then a shift/renormalization that pins the range into [0, 1];
/// the three band constraints are re-verified on a dense grid afterwards.
pub fn rect_poly(t: f64, delta: f64, eps: f64) -> Result<ChebyshevPoly> {
    if !(delta > 0.0 && delta < 0.5 && eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!(
            "rect_poly needs delta, eps in (0, 1/2); got delta={delta}, eps={eps}"
        )));
    }
    if !(t > 0.0 && t < 1.0 && t + delta <= 1.0) {
        return Err(Error::Domain(format!(
            "rect_poly needs t in (0,1) with t + delta ≤ 1; got t={t}, delta={delta}"
        )));
    }
    if t - delta <= 0.0 {
        return Err(Error::Domain(format!(
            "rect_poly pass band empty: t - delta = {}",
            t - delta
        )));
    }
    let degree_cap = (4.0 / delta * (1.0 / eps).ln() + 20.0).floor() as usize;

    let mut slope = erfc_inv(0.5 * eps) / delta;
    let mut attempt = 0;
    loop {
        let f = move |x: f64| {
            Complex64::new(0.5 * (erf(slope * (x + t)) + erf(slope * (t - x))), 0.0)
        };
        let mut degree = ((2.0 * slope).ceil() as usize + 10).min(degree_cap);
        let grid = chebyshev_lobatto_grid(2001);
        let poly = loop {
            let fit = cheb_fit(f, degree, Some(Parity::Even));
            let resid = grid
                .iter()
                .map(|&x| (fit.eval(x).re - f(x).re).abs())
                .fold(0.0, f64::max);
            if resid <= eps / 8.0 {
                break Some((fit, resid));
            }
            if degree >= degree_cap {
                break None;
            }
            degree = (degree + degree / 2 + 8).min(degree_cap);
        };

        if let Some((fit, resid)) = poly {
            // Pin into [0, 1]: (P + η) / (1 + 2η) keeps all three bands.
            let eta = resid + 1e-15;
            let shifted: Vec<f64> = fit
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let base = if k == 0 { c.re + eta } else { c.re };
                    base / (1.0 + 2.0 * eta)
                })
                .collect();
            // Force exactly even coefficients.
            let coeffs: Vec<f64> = shifted
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 0 { c } else { 0.0 })
                .collect();
            let candidate = ChebyshevPoly::from_real_coeffs(&coeffs).trimmed(1e-15);
            if rect_bands_hold(&candidate, t, delta, eps) {
                return Ok(candidate);
            }
        }

        attempt += 1;
        if attempt >= 3 {
            return Err(Error::Convergence {
                what: format!(
                    "rect_poly bands unmet within degree cap {degree_cap} (t={t}, delta={delta}, eps={eps})"
                ),
                residual: eps,
            });
        }
        slope *= 1.2;
    }
}

/// Checks the three Lemma-style band constraints on a 2001-point grid.
pub fn rect_bands_hold(p: &ChebyshevPoly, t: f64, delta: f64, eps: f64) -> bool {
    for x in chebyshev_lobatto_grid(2001) {
        let v = p.eval(x).re;
        if v.abs() > 1.0 + 1e-12 {
            return false;
        }
        if x.abs() >= t + delta && !(-1e-12..=eps + 1e-12).contains(&v) {
            return false;
        }
        if x.abs() <= t - delta && !(1.0 - eps - 1e-12..=1.0 + 1e-12).contains(&v) {
            return false;
        }
    }
    true
}

/// Odd polynomial with `|P| ≤ 1` on [−1, 1] and
/// `|P(x) − (2/π)·arcsin(x)| ≤ eps` for `|x| ≤ 1 − margin`.
///
/// Truncated Maclaurin series of `(2/π)·arcsin`: its coefficients are
/// positive, so the partial sum is odd, increasing on [0, 1], and bounded by
/// `(2/π)·arcsin(1) = 1` everywhere on the interval.
pub fn arcsin_poly(eps: f64, margin: f64) -> Result<ChebyshevPoly> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("arcsin_poly eps {eps} outside (0, 1/2)")));
    }
    if !(margin > 0.0 && margin <= 0.5) {
        return Err(Error::Domain(format!("arcsin_poly margin {margin} outside (0, 1/2]")));
    }
    let r = 1.0 - margin;
    // a_k = C(2k, k) / (4^k (2k+1)); pick K with Σ_{k>K} a_k r^{2k+1} ≤ eps/2.
    let cap = 4000usize;
    let mut a = 1.0f64;
    let mut coeffs_monomial: Vec<f64> = vec![2.0 / std::f64::consts::PI];
    let mut truncation = None;
    for k in 1..=cap {
        a *= (2.0 * k as f64 - 1.0) / (2.0 * k as f64);
        let c = a / (2.0 * k as f64 + 1.0);
        coeffs_monomial.push(2.0 / std::f64::consts::PI * c);
        // Tail estimate at radius r: remaining terms decay at least
        // geometrically with ratio r², prefactor the next term.
        let next = a * r.powi(2 * k as i32 + 3) / (2.0 * k as f64 + 3.0) * 2.0
            / std::f64::consts::PI;
        let tail = next / (1.0 - r * r).max(1e-6);
        if tail <= 0.5 * eps {
            truncation = Some(k);
            break;
        }
    }
    let Some(k_max) = truncation else {
        return Err(Error::Convergence {
            what: format!("arcsin_poly degree cap hit for eps={eps}, margin={margin}"),
            residual: eps,
        });
    };

    // Horner evaluation of the odd partial sum in u = x².
    let eval = move |x: f64| {
        let u = x * x;
        let mut acc = 0.0;
        for &c in coeffs_monomial.iter().rev() {
            acc = acc * u + c;
        }
        Complex64::new(acc * x, 0.0)
    };
    let degree = 2 * k_max + 1;
    let poly = cheb_fit(eval, degree, Some(Parity::Odd));

    // The Maclaurin certificate keeps |P| ≤ 1; confirm on the grid.
    if poly.grid_sup(2001) > 1.0 {
        return Err(Error::Convergence {
            what: "arcsin_poly sup bound violated".into(),
            residual: poly.grid_sup(2001) - 1.0,
        });
    }
    let worst = chebyshev_lobatto_grid(2001)
        .into_iter()
        .filter(|x| x.abs() <= r)
        .map(|x| (poly.eval(x).re - 2.0 / std::f64::consts::PI * x.asin()).abs())
        .fold(0.0, f64::max);
    if worst > eps {
        return Err(Error::Convergence {
            what: "arcsin_poly accuracy unmet inside margin".into(),
            residual: worst,
        });
    }
    Ok(poly)
}
