//! Quantum signal processing: the signal operator, phase-sequence
//! application, and the phase-finding solver.
//!
//! Convention: `A_Φ(x) = e^{iθ₀σz} · ∏_{j=1..k} [ W(x) · e^{iθ_jσz} ]` with
//! `k + 1` independent angles. The top-left entry of `A_Φ` is a degree-≤k
//! polynomial `P(x)`; since `|P(±1)| = 1` identically, a generic bounded
//! target is matched through the real part `Re P(x)`, and callers that need
//! the exact value recover it by pairing `Φ` with `−Φ` (conjugating `P`).
//!
//! The solver works in the symmetric-phase parametrization
//! (`θ_j = θ_{k−j}`) and Newton-iterates the on-parity Chebyshev
//! coefficients of `Re P_Φ` toward the target's, starting from the
//! near-trivial point `(π/4, 0, …, 0, π/4)`.

use num_complex::Complex64;

use crate::cheb::{chebyshev_zeros, coeffs_from_zero_values, ChebyshevPoly, Parity};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C_I};

/// Ordered z-rotation angles `Φ = (θ₀, …, θ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSequence {
    angles: Vec<f64>,
}

impl PhaseSequence {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::Domain("phase sequence needs at least one angle".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("phase angles must be finite".into()));
        }
        Ok(Self { angles })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Polynomial degree `k` generated by this sequence.
    pub fn degree(&self) -> usize {
        self.angles.len() - 1
    }

    /// Sequence with every angle negated; generates the conjugate polynomial.
    pub fn negated(&self) -> Self {
        Self {
            angles: self.angles.iter().map(|a| -a).collect(),
        }
    }
}

fn check_signal_domain(x: f64) -> Result<f64> {
    if !(x.is_finite() && x.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("signal argument {x} outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Signal operator `W(x) = [[x, i√(1−x²)], [i√(1−x²), x]]`.
pub fn signal_w(x: f64) -> Result<ComplexMatrix> {
    let x = check_signal_domain(x)?;
    let s = (1.0 - x * x).max(0.0).sqrt();
    Ok(ComplexMatrix::from_rows(&[
        vec![Complex64::new(x, 0.0), Complex64::new(0.0, s)],
        vec![Complex64::new(0.0, s), Complex64::new(x, 0.0)],
    ]))
}

fn z_rotation(theta: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![Complex64::from_polar(1.0, theta), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, -theta)],
    ])
}

/// Interleaved product of z-rotations and `W(x)` under the crate convention.
pub fn apply_phases(phi: &PhaseSequence, x: f64) -> Result<ComplexMatrix> {
    let x = check_signal_domain(x)?;
    let w = signal_w(x)?;
    let mut out = z_rotation(phi.angles[0]);
    for &theta in &phi.angles[1..] {
        out = out.matmul(&w).matmul(&z_rotation(theta));
    }
    Ok(out)
}

/// Top-left entry of the phased sequence; the polynomial `P(x)`.
pub fn qsp_corner(phi: &PhaseSequence, x: f64) -> Result<Complex64> {
    Ok(apply_phases(phi, x)?[(0, 0)])
}

/// Fast 2×2 evaluation of `P(x)` without allocating matrices.
fn corner_fast(angles: &[f64], x: f64) -> Complex64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let (w00, w01) = (Complex64::new(x, 0.0), Complex64::new(0.0, s));
    // Row vector (e^{iθ0}, 0) pushed through the factors; track both entries.
    let mut r0 = Complex64::from_polar(1.0, angles[0]);
    let mut r1 = Complex64::new(0.0, 0.0);
    for &theta in &angles[1..] {
        let a = r0 * w00 + r1 * w01;
        let b = r0 * w01 + r1 * w00;
        let z = Complex64::from_polar(1.0, theta);
        r0 = a * z;
        r1 = b * z.conj();
    }
    r0
}

/// Reflection-convention phases for the same polynomial corner.
///
/// With `R(x) = [[x, √(1−x²)], [√(1−x²), −x]]`, the product
/// `e^{iφ₀σz} R e^{iφ₁σz} R ⋯ R e^{iφ_dσz}` has the same top-left entry as
/// `A_Φ`. The `dπ/4` end shifts keep a symmetric `Φ` symmetric, which QSVT
/// consumers rely on.
pub fn reflection_phases(phi: &PhaseSequence) -> Vec<f64> {
    let d = phi.degree();
    let theta = phi.angles();
    if d == 0 {
        return vec![theta[0]];
    }
    let shift = d as f64 * std::f64::consts::FRAC_PI_4;
    let mut out = Vec::with_capacity(d + 1);
    out.push(theta[0] - std::f64::consts::FRAC_PI_4 + shift);
    for &t in &theta[1..d] {
        out.push(t - std::f64::consts::FRAC_PI_2);
    }
    out.push(theta[d] - std::f64::consts::FRAC_PI_4 + shift);
    out
}

/// Sup-norm margin required of phase-finding targets.
pub const TARGET_MARGIN: f64 = 1e-6;

struct SymmetricProblem {
    degree: usize,
    free: usize,
    parity: Parity,
    nodes: Vec<f64>,
    target_onparity: Vec<f64>,
}

impl SymmetricProblem {
    fn untie(&self, free: &[f64]) -> Vec<f64> {
        let d = self.degree;
        let mut full = vec![0.0; d + 1];
        for (k, &v) in free.iter().enumerate() {
            full[k] = v;
            full[d - k] = v;
        }
        full
    }

    /// On-parity Chebyshev coefficients of `Re P_Φ` and the Jacobian with
    /// respect to the free symmetric angles.
    fn coeffs_and_jacobian(&self, free: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let d = self.degree;
        let full = self.untie(free);
        let n_nodes = self.nodes.len();
        let mut node_vals = vec![Complex64::new(0.0, 0.0); n_nodes];
        // node_grads[k][node]: ∂P/∂θ_free_k at each node.
        let mut node_grads = vec![vec![Complex64::new(0.0, 0.0); n_nodes]; self.free];

        for (ni, &x) in self.nodes.iter().enumerate() {
            let s = (1.0 - x * x).max(0.0).sqrt();
            let w = [
                [Complex64::new(x, 0.0), Complex64::new(0.0, s)],
                [Complex64::new(0.0, s), Complex64::new(x, 0.0)],
            ];
            let factor = |j: usize| -> [[Complex64; 2]; 2] {
                let z0 = Complex64::from_polar(1.0, full[j]);
                let z1 = z0.conj();
                if j == 0 {
                    [[z0, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), z1]]
                } else {
                    [[w[0][0] * z0, w[0][1] * z1], [w[1][0] * z0, w[1][1] * z1]]
                }
            };
            let mul = |a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]| {
                [
                    [
                        a[0][0] * b[0][0] + a[0][1] * b[1][0],
                        a[0][0] * b[0][1] + a[0][1] * b[1][1],
                    ],
                    [
                        a[1][0] * b[0][0] + a[1][1] * b[1][0],
                        a[1][0] * b[0][1] + a[1][1] * b[1][1],
                    ],
                ]
            };
            // Inclusive prefixes P_j = G_0…G_j and suffixes S_j = G_{j+1}…G_d.
            let mut prefixes = Vec::with_capacity(d + 1);
            let mut acc = factor(0);
            prefixes.push(acc);
            for j in 1..=d {
                acc = mul(&acc, &factor(j));
                prefixes.push(acc);
            }
            let mut suffixes = vec![[[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]]; d + 1];
            for j in (0..d).rev() {
                suffixes[j] = mul(&factor(j + 1), &suffixes[j + 1]);
            }
            node_vals[ni] = prefixes[d][0][0];
            for j in 0..=d {
                let p = &prefixes[j];
                let sfx = &suffixes[j];
                // ∂P/∂θ_j = [P_j (iσz) S_j]₀₀ = i (P₀₀S₀₀ − P₀₁S₁₀).
                let dp = C_I * (p[0][0] * sfx[0][0] - p[0][1] * sfx[1][0]);
                let k = j.min(d - j);
                if k < self.free {
                    node_grads[k][ni] += dp;
                }
            }
        }

        let select = |coeffs: &[Complex64]| -> Vec<f64> {
            let start = if self.parity == Parity::Even { 0 } else { 1 };
            (0..self.free).map(|l| coeffs[start + 2 * l].re).collect()
        };
        let vals = select(&coeffs_from_zero_values(&node_vals));
        let mut jac = vec![vec![0.0; self.free]; self.free];
        for k in 0..self.free {
            let col = select(&coeffs_from_zero_values(&node_grads[k]));
            for (l, &v) in col.iter().enumerate() {
                jac[l][k] = v;
            }
        }
        (vals, jac)
    }

    fn residual(&self, free: &[f64], scale: f64) -> (Vec<f64>, Vec<Vec<f64>>, f64) {
        let (vals, jac) = self.coeffs_and_jacobian(free);
        let r: Vec<f64> = vals
            .iter()
            .zip(&self.target_onparity)
            .map(|(v, t)| v - t * scale)
            .collect();
        let norm = r.iter().map(|x| x.abs()).fold(0.0, f64::max);
        (r, jac, norm)
    }
}

fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let (pivot, max) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if max < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for r in (col + 1)..n {
            let f = a[r][col] / pivot_row[col];
            for (entry, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= f * p;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in (r + 1)..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

/// Damped Newton pass toward `scale × target`; returns the best residual.
fn newton_pass(problem: &SymmetricProblem, free: &mut [f64], scale: f64, goal: f64) -> f64 {
    let (_, _, mut best) = problem.residual(free, scale);
    for _ in 0..300 {
        if best <= goal {
            break;
        }
        let (r, jac, _) = problem.residual(free, scale);
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let Some(step) = solve_linear(jac, neg_r) else { break };
        let mut alpha = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = free
                .iter()
                .zip(&step)
                .map(|(f, s)| f + alpha * s)
                .collect();
            let (_, _, norm) = problem.residual(&trial, scale);
            if norm < best {
                free.copy_from_slice(&trial);
                best = norm;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !improved {
            break;
        }
    }
    best
}

/// Finds symmetric phases whose `Re P_Φ` matches the target polynomial.
///
/// The target must carry definite parity, real coefficients, and grid sup
/// at most `1 − 1e−6`. The returned sequence satisfies
/// `|Re P_Φ(x_j) − target(x_j)| ≤ tol` at the Chebyshev nodes
/// `x_j = cos(jπ/(2d))`, `j = 0..2d`.
pub fn find_phases(target: &ChebyshevPoly, tol: f64) -> Result<PhaseSequence> {
    let parity = target.require_parity()?;
    if !target.is_real(1e-12) {
        return Err(Error::NonRealTarget(
            "phase finding needs real coefficients; split real/imaginary parts".into(),
        ));
    }
    if tol < 1e-12 {
        return Err(Error::Domain(format!("phase-finder tol {tol} below 1e-12 floor")));
    }
    if target.grid_sup(2001) > 1.0 - TARGET_MARGIN + 1e-12 {
        return Err(Error::Domain(format!(
            "target sup {:.6} exceeds 1 - 1e-6 margin; rescale and fold into λ",
            target.grid_sup(2001)
        )));
    }

    let trimmed = target.trimmed(1e-14);
    let mut degree = trimmed.effective_degree(1e-14);
    if parity == Parity::Even && degree % 2 == 1 {
        degree += 1;
    }
    if parity == Parity::Odd && degree % 2 == 0 {
        degree = degree.max(1);
        if degree % 2 == 0 {
            degree += 1;
        }
    }
    let free = degree / 2 + 1;
    let start = if parity == Parity::Even { 0 } else { 1 };
    let target_onparity: Vec<f64> = (0..free)
        .map(|l| {
            trimmed
                .coeffs()
                .get(start + 2 * l)
                .map(|c| c.re)
                .unwrap_or(0.0)
        })
        .collect();

    let problem = SymmetricProblem {
        degree,
        free,
        parity,
        nodes: chebyshev_zeros(degree + 1),
        target_onparity,
    };

    // Coefficient-space goal that guarantees the node criterion with margin.
    let goal = (tol / (2.0 * (degree as f64 + 1.0))).max(3e-16);
    let mut free_angles = vec![0.0; free];
    free_angles[0] = std::f64::consts::FRAC_PI_4;
    let direct = newton_pass(&problem, &mut free_angles, 1.0, goal);

    if direct > goal {
        // Homotopy restart: walk the target scale up from a comfortably
        // solvable region, warm-starting each stage.
        free_angles = vec![0.0; free];
        free_angles[0] = std::f64::consts::FRAC_PI_4;
        for &scale in &[0.25, 0.5, 0.75, 0.9, 1.0] {
            newton_pass(&problem, &mut free_angles, scale, goal);
        }
    }

    let phases = PhaseSequence::new(problem.untie(&free_angles))?;

    // Verify the promise directly at the documented nodes.
    let check_nodes: Vec<f64> = if degree == 0 {
        vec![1.0, 0.0, -1.0]
    } else {
        (0..=2 * degree)
            .map(|j| (std::f64::consts::PI * j as f64 / (2.0 * degree as f64)).cos())
            .collect()
    };
    let node_resid = check_nodes
        .iter()
        .map(|&x| (corner_fast(phases.angles(), x).re - target.eval(x).re).abs())
        .fold(0.0, f64::max);
    if node_resid > tol {
        return Err(Error::Convergence {
            what: format!("phase finding stalled at degree {degree}"),
            residual: node_resid,
        });
    }
    Ok(phases)
}

/// Max deviation of `Re P_Φ` from `f` over a uniform grid on [−1, 1].
pub fn re_corner_residual(phi: &PhaseSequence, f: impl Fn(f64) -> f64, points: usize) -> f64 {
    (0..points)
        .map(|j| -1.0 + 2.0 * j as f64 / (points - 1) as f64)
        .map(|x| (corner_fast(phi.angles(), x).re - f(x)).abs())
        .fold(0.0, f64::max)
}
