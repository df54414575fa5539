//! Block-encoding algebra: construction, verification, linear combination,
//! product, scalar multiplication, logarithm of a unitary, QSVT polynomial
//! application, and Hamiltonian exponentiation.
//!
//! A [`BlockEncoding`] holds a unitary on `s + a` qubits whose top-left
//! `2^s`-block, scaled by `λ`, approximates the encoded operator within `ε`.
//! Ancillas occupy the most significant qubits, so the encoded block is the
//! leading principal block of the matrix. "Controlled" structure required by
//! LCU select stages is materialized as explicit block-diagonal matrices.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::cheb::ChebyshevPoly;
use crate::error::{Error, Result};
use crate::matrix::{
    eig_hermitian, polar_unitary, spectral_norm, ComplexMatrix, C_ONE, C_ZERO, DIM_CAP,
};
use crate::poly::{arcsin_poly, jacobi_anger};
use crate::qsp::{apply_phases, find_phases, reflection_phases, PhaseSequence};

/// Sup-norm ceiling for quantum-signal-processing targets after rescaling;
/// the reciprocal scale folds into `λ`.
const QSP_SUP_CEILING: f64 = 0.999;
/// Parts with grid sup below this floor are treated as exact zeros.
const PART_FLOOR: f64 = 1e-9;
/// Scalar parts weaker than `QSP_SUP_FLOOR` are scaled up to it so their
/// subnormalization does not inflate effective simulation time.
const QSP_SUP_FLOOR: f64 = 0.9;
/// Phase-solver tolerance used by all internal constructions.
const SOLVER_TOL: f64 = 1e-12;

/// Unitary + ancilla count + scale `λ` + recorded error bound `ε`.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    unitary: ComplexMatrix,
    system_qubits: usize,
    ancilla_qubits: usize,
    lambda: f64,
    err: f64,
}

impl BlockEncoding {
    fn assemble(
        unitary: ComplexMatrix,
        system_qubits: usize,
        ancilla_qubits: usize,
        lambda: f64,
        err: f64,
    ) -> Self {
        debug_assert_eq!(unitary.dim(), 1 << (system_qubits + ancilla_qubits));
        debug_assert!(lambda > 0.0 && err >= 0.0);
        Self { unitary, system_qubits, ancilla_qubits, lambda, err }
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn system_qubits(&self) -> usize {
        self.system_qubits
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn system_dim(&self) -> usize {
        1 << self.system_qubits
    }

    /// Top-left block without the `λ` scale.
    pub fn raw_corner(&self) -> ComplexMatrix {
        self.unitary.top_left_block(self.system_dim())
    }

    /// Same unitary reinterpreted as encoding `new_lambda ×` the raw corner
    /// with error bound `new_err`.
    pub fn reinterpreted(self, new_lambda: f64, new_err: f64) -> Result<Self> {
        if !(new_lambda > 0.0 && new_err >= 0.0) {
            return Err(Error::Domain(format!(
                "reinterpreted needs λ > 0 and ε ≥ 0, got λ={new_lambda}, ε={new_err}"
            )));
        }
        Ok(Self { lambda: new_lambda, err: new_err, ..self })
    }
}

/// Embeds a unitary with `a = 0`: the corner is the unitary itself.
pub fn be_from_unitary(u: &ComplexMatrix) -> Result<BlockEncoding> {
    let dim = u.dim();
    if !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("unitary dim {dim} is not a power of two")));
    }
    if !u.is_unitary(1e-10) {
        return Err(Error::Contract(format!(
            "be_from_unitary needs a unitary input (defect {:.3e})",
            u.unitarity_defect()
        )));
    }
    Ok(BlockEncoding::assemble(u.clone(), dim.trailing_zeros() as usize, 0, 1.0, 0.0))
}

/// `λ ×` top-left `2^s` block: the operator the encoding claims to hold.
pub fn be_corner(be: &BlockEncoding) -> ComplexMatrix {
    be.raw_corner().scale(Complex64::new(be.lambda, 0.0))
}

/// Spectral-norm deviation of the corner from `target`.
pub fn be_verify(be: &BlockEncoding, target: &ComplexMatrix) -> Result<f64> {
    if target.dim() != be.system_dim() {
        return Err(Error::Dimension(format!(
            "be_verify target dim {} vs system dim {}",
            target.dim(),
            be.system_dim()
        )));
    }
    Ok(spectral_norm(&target.sub(&be_corner(be))))
}

/// Empirical counters standing in for query-complexity accounting.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryLedger {
    pub w_gate_uses: u64,
    pub encoding_uses: u64,
    pub ancillas_peak: usize,
    pub degrees: BTreeMap<String, usize>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe_ancillas(&mut self, a: usize) {
        self.ancillas_peak = self.ancillas_peak.max(a);
    }

    pub fn record_degree(&mut self, stage: &str, degree: usize) {
        self.degrees.insert(stage.to_string(), degree);
    }

    pub fn merge(&mut self, other: &QueryLedger) {
        self.w_gate_uses += other.w_gate_uses;
        self.encoding_uses += other.encoding_uses;
        self.ancillas_peak = self.ancillas_peak.max(other.ancillas_peak);
        for (k, v) in &other.degrees {
            self.degrees.insert(k.clone(), *v);
        }
    }
}

fn check_dim_cap(dim: usize) -> Result<()> {
    if dim > DIM_CAP {
        return Err(Error::Sizing { dim, cap: DIM_CAP });
    }
    Ok(())
}

/// Diagonal `e^{iφ(2Π−I)}` where `Π` projects onto the leading `cut` rows.
fn projector_phase(dim: usize, cut: usize, phi: f64) -> Vec<Complex64> {
    let head = Complex64::from_polar(1.0, phi);
    let tail = head.conj();
    (0..dim).map(|i| if i < cut { head } else { tail }).collect()
}

fn scale_rows(m: &mut ComplexMatrix, d: &[Complex64]) {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] *= d[i];
        }
    }
}

fn scale_cols(m: &mut ComplexMatrix, d: &[Complex64]) {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] *= d[j];
        }
    }
}

/// Alternating projector-phase / `U`,`U†` sequence in the reflection
/// convention; the factor applied first (rightmost) is `U`.
fn qsvt_sequence(u: &ComplexMatrix, corner_dim: usize, refl: &[f64]) -> ComplexMatrix {
    let dim = u.dim();
    let d = refl.len() - 1;
    if d == 0 {
        let mut m = ComplexMatrix::identity(dim);
        scale_rows(&mut m, &projector_phase(dim, corner_dim, refl[0]));
        return m;
    }
    let u_dag = u.conj_transpose();
    // Writing order Z(φ₀)·U₁·Z(φ₁)·…·U_d·Z(φ_d); U_j = U when j ≡ d (mod 2).
    let mut m = if d % 2 == 1 { u.clone() } else { u_dag.clone() };
    scale_rows(&mut m, &projector_phase(dim, corner_dim, refl[0]));
    scale_cols(&mut m, &projector_phase(dim, corner_dim, refl[1]));
    for (j, phi) in refl.iter().enumerate().skip(2) {
        let factor = if (d - j) % 2 == 0 { u } else { &u_dag };
        m = m.matmul(factor);
        scale_cols(&mut m, &projector_phase(dim, corner_dim, *phi));
    }
    m
}

/// Pads a term with identity ancillas (most significant) up to `a_target`.
fn pad_ancillas(be: &BlockEncoding, a_target: usize) -> Result<ComplexMatrix> {
    debug_assert!(a_target >= be.ancilla_qubits);
    let extra = a_target - be.ancilla_qubits;
    if extra == 0 {
        return Ok(be.unitary.clone());
    }
    crate::matrix::kron(&ComplexMatrix::identity(1 << extra), &be.unitary)
}

/// Deterministic completion of a unit first column to a unitary by
/// Gram–Schmidt over standard basis vectors in index order.
fn prep_unitary(first_column: &[f64]) -> ComplexMatrix {
    let m = first_column.len();
    let mut cols: Vec<Vec<Complex64>> = vec![first_column
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect()];
    let mut basis_idx = 0usize;
    while cols.len() < m {
        let mut cand = vec![C_ZERO; m];
        cand[basis_idx] = C_ONE;
        basis_idx += 1;
        for col in &cols {
            let overlap: Complex64 = col.iter().zip(&cand).map(|(c, v)| c.conj() * v).sum();
            for (v, c) in cand.iter_mut().zip(col) {
                *v -= overlap * c;
            }
        }
        let norm: f64 = cand.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for v in cand.iter_mut() {
                *v /= norm;
            }
            cols.push(cand);
        }
    }
    let mut out = ComplexMatrix::zeros(m);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

/// Block encoding of `Σ_j w_j A_j` by prepare/select, with weight phases
/// folded into the select stage.
pub fn be_lcu(terms: &[BlockEncoding], weights: &[Complex64]) -> Result<BlockEncoding> {
    if terms.is_empty() || terms.len() != weights.len() {
        return Err(Error::Dimension(format!(
            "be_lcu needs matching nonempty terms/weights, got {}/{}",
            terms.len(),
            weights.len()
        )));
    }
    let s = terms[0].system_qubits;
    if terms.iter().any(|t| t.system_qubits != s) {
        return Err(Error::Dimension("be_lcu terms mix system sizes".into()));
    }
    let lambda_out: f64 = terms
        .iter()
        .zip(weights)
        .map(|(t, w)| w.norm() * t.lambda)
        .sum();
    if lambda_out <= 0.0 {
        return Err(Error::Domain("be_lcu weights are all zero".into()));
    }
    let err_out: f64 = terms.iter().zip(weights).map(|(t, w)| w.norm() * t.err).sum();

    let m = terms.len();
    let a_terms = terms.iter().map(|t| t.ancilla_qubits).max().unwrap();
    let sel_qubits = if m == 1 {
        0
    } else {
        usize::BITS as usize - (m - 1).leading_zeros() as usize
    };
    let a_out = a_terms + sel_qubits;
    let inner_dim = 1usize << (a_terms + s);
    let big = 1usize << sel_qubits;
    check_dim_cap(big * inner_dim)?;

    let padded: Vec<ComplexMatrix> = terms
        .iter()
        .map(|t| pad_ancillas(t, a_terms))
        .collect::<Result<_>>()?;
    let phases: Vec<Complex64> = weights
        .iter()
        .map(|w| if w.norm() == 0.0 { C_ONE } else { w / w.norm() })
        .collect();

    if m == 1 {
        let u = padded.into_iter().next().unwrap().scale(phases[0]);
        return Ok(BlockEncoding::assemble(u, s, a_out, lambda_out, err_out));
    }

    let first_col: Vec<f64> = (0..big)
        .map(|j| {
            if j < m {
                (weights[j].norm() * terms[j].lambda / lambda_out).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let v = prep_unitary(&first_col);

    // (V† ⊗ I) · blockdiag(e^{iφ_j} U_j) · (V ⊗ I), assembled blockwise.
    let dim = big * inner_dim;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..big {
        for k in 0..big {
            for (j, block) in padded.iter().enumerate() {
                let coeff = v[(j, i)].conj() * v[(j, k)] * phases[j];
                if coeff.norm() < 1e-300 {
                    continue;
                }
                for r in 0..inner_dim {
                    for c in 0..inner_dim {
                        let val = block[(r, c)];
                        if val != C_ZERO {
                            out[(i * inner_dim + r, k * inner_dim + c)] += coeff * val;
                        }
                    }
                }
            }
            // Identity select blocks in the padding slots j ≥ m.
            for j in m..big {
                let coeff = v[(j, i)].conj() * v[(j, k)];
                if coeff.norm() < 1e-300 {
                    continue;
                }
                for r in 0..inner_dim {
                    out[(i * inner_dim + r, k * inner_dim + r)] += coeff;
                }
            }
        }
    }
    Ok(BlockEncoding::assemble(out, s, a_out, lambda_out, err_out))
}

/// Places `u` (acting on outer ⊗ inner) around an untouched middle register.
fn embed_between(u: &ComplexMatrix, outer: usize, mid: usize, inner: usize) -> ComplexMatrix {
    debug_assert_eq!(u.dim(), outer * inner);
    let dim = outer * mid * inner;
    let mut out = ComplexMatrix::zeros(dim);
    for o in 0..outer {
        for op in 0..outer {
            for i in 0..inner {
                for ip in 0..inner {
                    let val = u[(o * inner + i, op * inner + ip)];
                    if val == C_ZERO {
                        continue;
                    }
                    for mreg in 0..mid {
                        out[((o * mid + mreg) * inner + i, (op * mid + mreg) * inner + ip)] = val;
                    }
                }
            }
        }
    }
    out
}

/// Block encoding of `A·B` from encodings of `A` and `B`.
pub fn be_product(a: &BlockEncoding, b: &BlockEncoding) -> Result<BlockEncoding> {
    if a.system_qubits != b.system_qubits {
        return Err(Error::Dimension(format!(
            "be_product system sizes differ: {} vs {}",
            a.system_qubits, b.system_qubits
        )));
    }
    let sys = 1usize << a.system_qubits;
    let a_out = a.ancilla_qubits + b.ancilla_qubits;
    check_dim_cap((1 << a_out) * sys)?;
    let ma = embed_between(&a.unitary, 1 << a.ancilla_qubits, 1 << b.ancilla_qubits, sys);
    let mb = crate::matrix::kron(&ComplexMatrix::identity(1 << a.ancilla_qubits), &b.unitary)?;
    let u = ma.matmul(&mb);
    Ok(BlockEncoding::assemble(
        u,
        a.system_qubits,
        a_out,
        a.lambda * b.lambda,
        a.lambda * b.err + b.lambda * a.err + a.err * b.err,
    ))
}

/// Block encoding of `c·A` from an `s = 0` scalar encoding of `c` and an
/// encoding of `A`.
pub fn be_scale_mul(scalar: &BlockEncoding, op: &BlockEncoding) -> Result<BlockEncoding> {
    if scalar.system_qubits != 0 {
        return Err(Error::Dimension("be_scale_mul scalar must have s = 0".into()));
    }
    let sys = 1usize << op.system_qubits;
    let a_out = scalar.ancilla_qubits + op.ancilla_qubits;
    check_dim_cap((1 << a_out) * sys)?;
    let ms = crate::matrix::kron(
        &scalar.unitary,
        &ComplexMatrix::identity((1 << op.ancilla_qubits) * sys),
    )?;
    let mo =
        crate::matrix::kron(&ComplexMatrix::identity(1 << scalar.ancilla_qubits), &op.unitary)?;
    let u = ms.matmul(&mo);
    Ok(BlockEncoding::assemble(
        u,
        op.system_qubits,
        a_out,
        scalar.lambda * op.lambda,
        scalar.lambda * op.err + op.lambda * scalar.err + scalar.err * op.err,
    ))
}

struct ScaledTarget {
    poly: ChebyshevPoly,
    lambda: f64,
}

fn rescale_target(poly: &ChebyshevPoly, allow_upscale: bool) -> ScaledTarget {
    let sup = poly.grid_sup(2001);
    let scale = if sup > QSP_SUP_CEILING {
        QSP_SUP_CEILING / sup
    } else if allow_upscale && sup > PART_FLOOR && sup < QSP_SUP_FLOOR {
        QSP_SUP_FLOOR / sup
    } else {
        1.0
    };
    ScaledTarget {
        poly: poly.scale(Complex64::new(scale, 0.0)),
        lambda: 1.0 / scale,
    }
}

/// `(H ⊗ I)·blockdiag(m_a, m_b)·(H ⊗ I)`: unitary whose leading block is the
/// average of the two inputs' leading blocks.
fn pair_average(m_a: &ComplexMatrix, m_b: &ComplexMatrix) -> ComplexMatrix {
    let n = m_a.dim();
    let mut out = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let avg = (m_a[(i, j)] + m_b[(i, j)]) * 0.5;
            let dif = (m_a[(i, j)] - m_b[(i, j)]) * 0.5;
            out[(i, j)] = avg;
            out[(i, j + n)] = dif;
            out[(i + n, j)] = dif;
            out[(i + n, j + n)] = avg;
        }
    }
    out
}

/// Pairs a phased 2×2 sequence at the point `t` with its conjugate so the
/// corner is `Re P_Φ(t)`; returns an `s = 0` scalar encoding.
fn scalar_pair_encoding(
    phases: &PhaseSequence,
    t: f64,
    lambda: f64,
    err: f64,
) -> Result<BlockEncoding> {
    let w_pos = apply_phases(phases, t)?;
    let w_neg = apply_phases(&phases.negated(), t)?;
    Ok(BlockEncoding::assemble(pair_average(&w_pos, &w_neg), 0, 2, lambda, err))
}

/// Scalar block encoding of `alpha_poly(t)` built from phased signal
/// sequences at the point `t`; complex targets split into real and imaginary
/// parts combined by a one-qubit LCU.
pub fn be_scalar(
    alpha_poly: &ChebyshevPoly,
    t: f64,
    ledger: &mut QueryLedger,
    stage: &str,
) -> Result<BlockEncoding> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("be_scalar time {t} outside [0, 1]")));
    }
    if alpha_poly.grid_sup(2001) > 1.0 + 1e-9 {
        return Err(Error::Domain(
            "be_scalar target exceeds unit sup bound on [-1, 1]".into(),
        ));
    }
    alpha_poly.require_parity()?;

    let mut parts: Vec<(BlockEncoding, Complex64)> = Vec::new();
    for (part, weight, tag) in [
        (alpha_poly.real_part(), C_ONE, "re"),
        (alpha_poly.imag_part(), Complex64::new(0.0, 1.0), "im"),
    ] {
        if part.grid_sup(2001) <= PART_FLOOR {
            continue;
        }
        let scaled = rescale_target(&part, true);
        let phases = find_phases(&scaled.poly, SOLVER_TOL)?;
        let degree = phases.degree();
        let resid = crate::qsp::re_corner_residual(&phases, |x| scaled.poly.eval(x).re, 1001);
        let enc = scalar_pair_encoding(&phases, t, scaled.lambda, scaled.lambda * resid)?;
        ledger.w_gate_uses += degree as u64;
        ledger.record_degree(&format!("{stage}_{tag}"), degree);
        ledger.observe_ancillas(enc.ancilla_qubits);
        parts.push((enc, weight));
    }

    let out = match parts.len() {
        0 => {
            // Exact zero scalar: an X-type flip has corner 0.
            let u = ComplexMatrix::from_reals(2, &[(0., 0.), (1., 0.), (1., 0.), (0., 0.)]);
            BlockEncoding::assemble(u, 0, 1, 1.0, 0.0)
        }
        1 => {
            let (enc, w) = parts.into_iter().next().unwrap();
            be_lcu(&[enc], &[w])?
        }
        _ => {
            let (encs, ws): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
            be_lcu(&encs, &ws)?
        }
    };
    ledger.observe_ancillas(out.ancilla_qubits);
    Ok(out)
}

/// Applies a bounded definite-parity real polynomial to the encoded
/// Hermitian operator through the alternating phased sequence, extracting
/// the real part with one extra ancilla qubit.
pub fn qsvt_apply(
    be: &BlockEncoding,
    poly: &ChebyshevPoly,
    ledger: &mut QueryLedger,
) -> Result<BlockEncoding> {
    poly.require_parity()?;
    if !poly.is_real(1e-12) {
        return Err(Error::NonRealTarget(
            "qsvt_apply needs a real-coefficient polynomial".into(),
        ));
    }
    if poly.grid_sup(2001) > 1.0 + 1e-9 {
        return Err(Error::Domain("qsvt_apply polynomial exceeds unit sup".into()));
    }
    let corner = be.raw_corner();
    let herm_defect = corner.hermiticity_defect();
    if herm_defect > 1e-8 {
        return Err(Error::Contract(format!(
            "qsvt_apply corner is not Hermitian (defect {herm_defect:.3e})"
        )));
    }

    let scaled = rescale_target(poly, false);
    let phases = find_phases(&scaled.poly, SOLVER_TOL)?;
    let degree = phases.degree();
    let refl = reflection_phases(&phases);

    let m = qsvt_sequence(&be.unitary, be.system_dim(), &refl);
    let u = pair_average(&m, &m.conj_transpose());

    // Recorded ε: realized-vs-target sup transferred through the spectrum,
    // plus a Markov-bounded propagation of the input encoding's own error.
    let grid_err =
        scaled.lambda * crate::qsp::re_corner_residual(&phases, |x| scaled.poly.eval(x).re, 2001);
    let markov = (degree as f64).powi(2) * be.err / be.lambda;
    let err_out = grid_err + markov;

    ledger.encoding_uses += degree as u64;
    let out = BlockEncoding::assemble(
        u,
        be.system_qubits,
        be.ancilla_qubits + 1,
        scaled.lambda,
        err_out,
    );
    ledger.observe_ancillas(out.ancilla_qubits);
    Ok(out)
}

/// Given `u = exp(−iH)` with `‖H‖ ≤ 1/2`, builds a block encoding of
/// `(π/2)·H` via `sin(H) = (i u − i u†)/2` followed by the arcsin polynomial.
pub fn be_log_unitary(
    u: &ComplexMatrix,
    eps: f64,
    ledger: &mut QueryLedger,
    stage: &str,
) -> Result<BlockEncoding> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("be_log_unitary eps {eps} outside (0, 1/2)")));
    }
    let base = be_from_unitary(u)?;
    let dag = be_from_unitary(&u.conj_transpose())?;
    let half_i = Complex64::new(0.0, 0.5);
    let sin_enc = be_lcu(&[base, dag], &[half_i, -half_i])?;
    ledger.encoding_uses += 2;
    ledger.observe_ancillas(sin_enc.ancilla_qubits);

    // Margin guard: the sin spectrum must stay inside the arcsin window.
    let (eigs, _) = eig_hermitian(&sin_enc.raw_corner())?;
    let reach = eigs.iter().map(|e| e.abs()).fold(0.0, f64::max);
    if reach > 0.5 {
        return Err(Error::Contract(format!(
            "sin-corner spectrum reaches {reach:.4} > 1/2; input violates ‖H‖ ≤ 1/2"
        )));
    }

    let p = arcsin_poly(0.5 * eps, 0.5)?;
    ledger.record_degree(stage, p.degree());
    let enc = qsvt_apply(&sin_enc, &p, ledger)?;
    // Corner ≈ (2/π) H; reinterpret as an encoding of (π/2) H.
    let quarter_pi_sq = std::f64::consts::PI * std::f64::consts::PI / 4.0;
    let out = BlockEncoding::assemble(
        enc.unitary,
        enc.system_qubits,
        enc.ancilla_qubits,
        enc.lambda * quarter_pi_sq,
        enc.err * quarter_pi_sq,
    );
    ledger.observe_ancillas(out.ancilla_qubits);
    Ok(out)
}

/// Block encoding of `exp(−i·A·t)` for an encoded Hermitian `A`.
///
/// Jacobi–Anger parts at `t_eff = λ·t` go through QSVT, combine by an LCU
/// with weights `(1, −i)`, and the subnormalized corner is re-unitarized by
/// its polar factor, restoring `λ = 1` and recording the deviation into `ε`.
pub fn be_simulate(
    be: &BlockEncoding,
    t: f64,
    eps: f64,
    ledger: &mut QueryLedger,
) -> Result<BlockEncoding> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("be_simulate time {t} must be finite and ≥ 0")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("be_simulate eps {eps} outside (0, 1/2)")));
    }
    let t_eff = be.lambda * t;
    let (cos_part, sin_part) = jacobi_anger(t_eff, 0.25 * eps)?;
    let sin_zero = sin_part.is_zero(1e-15);
    ledger.record_degree("jacobi_cos", cos_part.degree());
    ledger.record_degree("jacobi_sin", if sin_zero { 0 } else { sin_part.degree() });

    // Truncation ripple can push the parts just past unit sup; a common
    // positive scale keeps them admissible and rides along in the weights
    // until the polar step absorbs it.
    let common = cos_part
        .grid_sup(2001)
        .max(sin_part.grid_sup(2001))
        .max(1.0);
    let shrink = Complex64::new(1.0 / common, 0.0);
    let cos_part = cos_part.scale(shrink);
    let sin_part = sin_part.scale(shrink);
    let trunc = 0.25 * eps / common;

    let mut cos_enc = qsvt_apply(be, &cos_part, ledger)?;
    cos_enc.err += trunc;

    let w = Complex64::new(common, 0.0);
    let combo = if sin_zero {
        be_lcu(&[cos_enc], &[w])?
    } else {
        let mut sin_enc = qsvt_apply(be, &sin_part, ledger)?;
        sin_enc.err += trunc;
        be_lcu(&[cos_enc, sin_enc], &[w, Complex64::new(0.0, -common)])?
    };
    ledger.encoding_uses += 2;
    ledger.observe_ancillas(combo.ancilla_qubits);

    let corner = combo.raw_corner();
    let (unitary, sigma_min) = polar_unitary(&corner)?;
    if sigma_min * combo.lambda < 0.5 {
        return Err(Error::Convergence {
            what: "re-unitarization ill-conditioned; upstream ε too large".into(),
            residual: sigma_min * combo.lambda,
        });
    }
    let deviation =
        spectral_norm(&corner.scale(Complex64::new(combo.lambda, 0.0)).sub(&unitary));
    let out = BlockEncoding::assemble(unitary, be.system_qubits, 0, 1.0, combo.err + deviation);
    ledger.observe_ancillas(out.ancilla_qubits);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::cheb_fit;
    use crate::matrix::{expm_i, spectral_distance};
    use crate::pauli::{pauli_matrix, PauliString};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(rng: &mut StdRng, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        m.add(&m.conj_transpose()).scale(Complex64::new(0.5, 0.0))
    }

    fn pauli(s: &str) -> ComplexMatrix {
        pauli_matrix(&PauliString::parse(s).unwrap()).unwrap()
    }

    /// Spectral oracle: the polynomial applied to the Hermitian operator
    /// through an independent eigendecomposition.
    fn spectral_poly_oracle(h: &ComplexMatrix, p: &ChebyshevPoly) -> ComplexMatrix {
        crate::matrix::spectral_map(h, |w| p.eval(w.clamp(-1.0, 1.0))).unwrap()
    }

    /// Exact one-ancilla dilation of a Hermitian contraction `h/λ`:
    /// `[[C, S], [S, −C]]` with `C = h/λ`, `S = (I − C²)^{1/2}`.
    fn dilation_encoding(h: &ComplexMatrix, lambda: f64) -> BlockEncoding {
        let n = h.dim();
        let c = h.scale(Complex64::new(1.0 / lambda, 0.0));
        let s = crate::matrix::spectral_map(&c, |w| {
            Complex64::new((1.0 - (w * w).min(1.0)).max(0.0).sqrt(), 0.0)
        })
        .unwrap();
        let mut u = ComplexMatrix::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] = c[(i, j)];
                u[(i, j + n)] = s[(i, j)];
                u[(i + n, j)] = s[(i, j)];
                u[(i + n, j + n)] = -c[(i, j)];
            }
        }
        assert!(u.is_unitary(1e-9), "dilation defect {}", u.unitarity_defect());
        BlockEncoding::assemble(u, n.trailing_zeros() as usize, 1, lambda, 0.0)
    }

    #[test]
    fn from_unitary_identity() {
        let be = be_from_unitary(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(be.ancilla_qubits(), 0);
        assert_eq!(be.lambda(), 1.0);
        assert_eq!(be.err(), 0.0);
        assert!(be_verify(&be, &ComplexMatrix::identity(2)).unwrap() < 1e-12);
    }

    #[test]
    fn from_unitary_corner_roundtrip() {
        let mut rng = StdRng::seed_from_u64(2);
        let h = random_hermitian(&mut rng, 4);
        let u = expm_i(&h, 0.9).unwrap();
        let be = be_from_unitary(&u).unwrap();
        assert!(be_verify(&be, &u).unwrap() < 1e-12);
    }

    #[test]
    fn from_unitary_rejects_non_unitary() {
        let mut rng = StdRng::seed_from_u64(3);
        let m = random_hermitian(&mut rng, 4);
        assert!(matches!(be_from_unitary(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn verify_detects_corner_corruption() {
        let u = pauli("X");
        let be = be_from_unitary(&u).unwrap();
        let mut target = u.clone();
        target[(0, 1)] += Complex64::new(0.01, 0.0);
        assert!(be_verify(&be, &target).unwrap() >= 0.01 - 1e-10);
    }

    #[test]
    fn lcu_two_paulis() {
        let terms = [
            be_from_unitary(&pauli("X")).unwrap(),
            be_from_unitary(&pauli("Z")).unwrap(),
        ];
        let w = [Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)];
        let be = be_lcu(&terms, &w).unwrap();
        assert!((be.lambda() - 1.0).abs() < 1e-12);
        assert_eq!(be.ancilla_qubits(), 1);
        let want = pauli("X").add(&pauli("Z")).scale(Complex64::new(0.5, 0.0));
        assert!(be_verify(&be, &want).unwrap() <= 1e-10);
        assert!(be.unitary().is_unitary(1e-10));
    }

    #[test]
    fn lcu_single_term_passthrough() {
        let be0 = be_from_unitary(&pauli("Y")).unwrap();
        let be = be_lcu(std::slice::from_ref(&be0), &[C_ONE]).unwrap();
        assert!(spectral_distance(&be_corner(&be), &be_corner(&be0)) < 1e-12);
    }

    #[test]
    fn lcu_cancellation() {
        let terms = [
            be_from_unitary(&pauli("X")).unwrap(),
            be_from_unitary(&pauli("X")).unwrap(),
        ];
        let w = [Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0)];
        let be = be_lcu(&terms, &w).unwrap();
        assert!(spectral_norm(&be_corner(&be)) <= 1e-10);
    }

    #[test]
    fn lcu_rejects_mixed_sizes() {
        let a = be_from_unitary(&pauli("X")).unwrap();
        let b = be_from_unitary(&pauli("XX")).unwrap();
        assert!(matches!(be_lcu(&[a, b], &[C_ONE, C_ONE]), Err(Error::Dimension(_))));
    }

    #[test]
    fn lcu_three_terms_ancilla_count() {
        let terms = [
            be_from_unitary(&pauli("X")).unwrap(),
            be_from_unitary(&pauli("Y")).unwrap(),
            be_from_unitary(&pauli("Z")).unwrap(),
        ];
        let w = [
            Complex64::new(0.2, 0.0),
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.4, 0.0),
        ];
        let be = be_lcu(&terms, &w).unwrap();
        assert_eq!(be.ancilla_qubits(), 2);
        let want = pauli("X")
            .scale(w[0])
            .add(&pauli("Y").scale(w[1]))
            .add(&pauli("Z").scale(w[2]));
        assert!(be_verify(&be, &want).unwrap() <= 1e-10);
        assert!(be.unitary().is_unitary(1e-9));
    }

    #[test]
    fn product_of_paulis() {
        let a = be_from_unitary(&pauli("X")).unwrap();
        let b = be_from_unitary(&pauli("Z")).unwrap();
        let be = be_product(&a, &b).unwrap();
        let want = pauli("X").matmul(&pauli("Z"));
        assert!(be_verify(&be, &want).unwrap() < 1e-12);
        assert_eq!(be.ancilla_qubits(), 0);
    }

    #[test]
    fn product_squares_scaled_hermitian() {
        let mut rng = StdRng::seed_from_u64(5);
        let h = random_hermitian(&mut rng, 4);
        let lambda = spectral_norm(&h) * 1.1;
        let be = dilation_encoding(&h, lambda);
        let sq = be_product(&be, &be).unwrap();
        let want = h.matmul(&h);
        assert!(be_verify(&sq, &want).unwrap() <= 1e-9);
        assert_eq!(sq.ancilla_qubits(), 2);
        assert!((sq.lambda() - lambda * lambda).abs() < 1e-9);
    }

    #[test]
    fn product_identity_right() {
        let a = dilation_encoding(&pauli("Y").scale(Complex64::new(0.4, 0.0)), 0.8);
        let b = be_from_unitary(&ComplexMatrix::identity(2)).unwrap();
        let p = be_product(&a, &b).unwrap();
        assert!(spectral_distance(&be_corner(&p), &be_corner(&a)) < 1e-11);
    }

    #[test]
    fn scalar_identity_map() {
        let mut ledger = QueryLedger::new();
        let alpha = cheb_fit(|x| Complex64::new(x, 0.0), 1, None);
        let be = be_scalar(&alpha, 0.3, &mut ledger, "alpha").unwrap();
        let corner = be_corner(&be);
        assert!((corner[(0, 0)] - Complex64::new(0.3, 0.0)).norm() <= 1e-12);
        assert!(ledger.w_gate_uses >= 1);
    }

    #[test]
    fn scalar_even_square_map() {
        let mut ledger = QueryLedger::new();
        let alpha = cheb_fit(|x| Complex64::new(0.5 * x * x, 0.0), 2, None);
        let be = be_scalar(&alpha, 0.8, &mut ledger, "alpha").unwrap();
        assert!((be_corner(&be)[(0, 0)] - Complex64::new(0.32, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn scalar_constant_one() {
        let mut ledger = QueryLedger::new();
        let alpha = ChebyshevPoly::constant(C_ONE);
        for &t in &[0.0, 0.4, 1.0] {
            let be = be_scalar(&alpha, t, &mut ledger, "alpha").unwrap();
            assert!((be_corner(&be)[(0, 0)] - C_ONE).norm() <= 1e-10, "t = {t}");
        }
    }

    #[test]
    fn scalar_complex_target() {
        let mut ledger = QueryLedger::new();
        let alpha = cheb_fit(|x| Complex64::new(0.4 * x, 0.25 * x), 1, None);
        let be = be_scalar(&alpha, 0.6, &mut ledger, "alpha").unwrap();
        let want = Complex64::new(0.24, 0.15);
        assert!((be_corner(&be)[(0, 0)] - want).norm() <= 1e-10);
    }

    #[test]
    fn scale_mul_constant_scalar() {
        let mut ledger = QueryLedger::new();
        let one = be_scalar(&ChebyshevPoly::constant(C_ONE), 0.5, &mut ledger, "a").unwrap();
        let op = be_from_unitary(&pauli("X")).unwrap();
        let be = be_scale_mul(&one, &op).unwrap();
        assert!(be_verify(&be, &pauli("X")).unwrap() <= 1e-10);
        assert_eq!(be.ancilla_qubits(), one.ancilla_qubits());
    }

    #[test]
    fn scale_mul_point_three() {
        let mut ledger = QueryLedger::new();
        let alpha = ChebyshevPoly::constant(Complex64::new(0.3, 0.0));
        let sc = be_scalar(&alpha, 0.2, &mut ledger, "a").unwrap();
        let op = be_from_unitary(&pauli("Z")).unwrap();
        let be = be_scale_mul(&sc, &op).unwrap();
        let want = pauli("Z").scale(Complex64::new(0.3, 0.0));
        assert!(be_verify(&be, &want).unwrap() <= 1e-10);
    }

    #[test]
    fn scale_mul_zero_scalar() {
        let mut ledger = QueryLedger::new();
        let zero = be_scalar(&ChebyshevPoly::constant(C_ZERO), 0.7, &mut ledger, "a").unwrap();
        let op = be_from_unitary(&pauli("Y")).unwrap();
        let be = be_scale_mul(&zero, &op).unwrap();
        assert!(spectral_norm(&be_corner(&be)) <= 1e-10);
    }

    #[test]
    fn qsvt_t1_recovers_corner() {
        let mut rng = StdRng::seed_from_u64(8);
        let mut ledger = QueryLedger::new();
        let h = random_hermitian(&mut rng, 4);
        let lambda = spectral_norm(&h) * 1.2;
        let be = dilation_encoding(&h, lambda);
        let t1 = ChebyshevPoly::from_real_coeffs(&[0.0, 1.0]);
        let out = qsvt_apply(&be, &t1, &mut ledger).unwrap();
        let want = h.scale(Complex64::new(1.0 / lambda, 0.0));
        assert!(be_verify(&out, &want).unwrap() <= 1e-10);
        assert_eq!(ledger.encoding_uses, 1);
        assert_eq!(out.ancilla_qubits(), be.ancilla_qubits() + 1);
    }

    #[test]
    fn qsvt_t2_on_diagonal() {
        let mut ledger = QueryLedger::new();
        let h = ComplexMatrix::from_reals(2, &[(0.5, 0.), (0., 0.), (0., 0.), (-0.5, 0.)]);
        let be = dilation_encoding(&h, 1.0);
        // T₂ scaled by 1/2 to stay clear of the sup ceiling; T₂(±1/2) = −1/2.
        let t2 = ChebyshevPoly::from_real_coeffs(&[0.0, 0.0, 0.5]);
        let out = qsvt_apply(&be, &t2, &mut ledger).unwrap();
        let want = ComplexMatrix::from_reals(2, &[(-0.25, 0.), (0., 0.), (0., 0.), (-0.25, 0.)]);
        assert!(be_verify(&out, &want).unwrap() <= 1e-10);
        assert_eq!(ledger.encoding_uses, 2);
    }

    #[test]
    fn qsvt_matches_spectral_oracle_random() {
        let mut rng = StdRng::seed_from_u64(13);
        for trial in 0..25 {
            let mut ledger = QueryLedger::new();
            let n = if trial % 2 == 0 { 2 } else { 4 };
            let h = random_hermitian(&mut rng, n);
            let lambda = spectral_norm(&h) * rng.gen_range(1.05..1.6);
            let be = dilation_encoding(&h, lambda);
            let half_deg = rng.gen_range(0..8usize);
            let odd = rng.gen_bool(0.5);
            let deg = (2 * half_deg + usize::from(odd)).max(1);
            let mut coeffs = vec![0.0; deg + 1];
            let mut idx = usize::from(odd);
            while idx <= deg {
                coeffs[idx] = rng.gen_range(-1.0..1.0);
                idx += 2;
            }
            let raw = ChebyshevPoly::from_real_coeffs(&coeffs);
            let poly = raw.scale(Complex64::new(0.8 / raw.grid_sup(2001).max(0.8), 0.0));
            let out = qsvt_apply(&be, &poly, &mut ledger).unwrap();
            let oracle =
                spectral_poly_oracle(&h.scale(Complex64::new(1.0 / lambda, 0.0)), &poly);
            let dist = be_verify(&out, &oracle).unwrap();
            assert!(dist <= 1e-8, "trial {trial} dist {dist:.3e}");
            assert!(dist <= out.err() + 1e-12, "trial {trial} recorded {:.3e}", out.err());
        }
    }

    #[test]
    fn qsvt_rejects_no_parity() {
        let mut ledger = QueryLedger::new();
        let be = be_from_unitary(&pauli("X")).unwrap();
        let p = ChebyshevPoly::from_real_coeffs(&[0.2, 0.3, 0.1]);
        assert!(matches!(qsvt_apply(&be, &p, &mut ledger), Err(Error::Parity(_))));
    }

    #[test]
    fn qsvt_rejects_non_hermitian_corner() {
        let mut ledger = QueryLedger::new();
        let mut rng = StdRng::seed_from_u64(17);
        let h = random_hermitian(&mut rng, 2);
        let u = expm_i(&h, 1.0).unwrap(); // unitary, generically non-Hermitian
        let be = be_from_unitary(&u).unwrap();
        let t1 = ChebyshevPoly::from_real_coeffs(&[0.0, 1.0]);
        assert!(matches!(qsvt_apply(&be, &t1, &mut ledger), Err(Error::Contract(_))));
    }

    #[test]
    fn log_unitary_identity_gives_zero() {
        let mut ledger = QueryLedger::new();
        let be = be_log_unitary(&ComplexMatrix::identity(2), 1e-6, &mut ledger, "log").unwrap();
        assert!(spectral_norm(&be_corner(&be)) <= 1e-5);
    }

    #[test]
    fn log_unitary_z_rotation() {
        let mut ledger = QueryLedger::new();
        let h = pauli("Z").scale(Complex64::new(0.4, 0.0));
        let u = expm_i(&h, 1.0).unwrap();
        let eps = 1e-6;
        let be = be_log_unitary(&u, eps, &mut ledger, "log").unwrap();
        let want = h.scale(Complex64::new(std::f64::consts::FRAC_PI_2, 0.0));
        let dist = be_verify(&be, &want).unwrap();
        assert!(dist <= std::f64::consts::PI * eps / 2.0, "dist {dist:.3e}");
    }

    #[test]
    fn log_unitary_random_construction_roundtrip() {
        let mut rng = StdRng::seed_from_u64(19);
        let mut ledger = QueryLedger::new();
        let h_raw = random_hermitian(&mut rng, 4);
        let h = h_raw.scale(Complex64::new(0.49 / spectral_norm(&h_raw), 0.0));
        let u = expm_i(&h, 1.0).unwrap();
        let eps = 1e-6;
        let be = be_log_unitary(&u, eps, &mut ledger, "log").unwrap();
        let want = h.scale(Complex64::new(std::f64::consts::FRAC_PI_2, 0.0));
        assert!(be_verify(&be, &want).unwrap() <= std::f64::consts::PI * eps / 2.0);
        assert_eq!(be.ancilla_qubits(), 2);
    }

    #[test]
    fn log_unitary_rejects_large_hamiltonian() {
        let mut ledger = QueryLedger::new();
        let h = pauli("X").scale(Complex64::new(1.2, 0.0));
        let u = expm_i(&h, 1.0).unwrap();
        assert!(matches!(
            be_log_unitary(&u, 1e-6, &mut ledger, "log"),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn simulate_zero_time() {
        let mut ledger = QueryLedger::new();
        let be = dilation_encoding(&pauli("X").scale(Complex64::new(0.3, 0.0)), 1.0);
        let out = be_simulate(&be, 0.0, 1e-8, &mut ledger).unwrap();
        assert!(be_verify(&out, &ComplexMatrix::identity(2)).unwrap() <= 1e-12);
        assert_eq!(out.ancilla_qubits(), 0);
        assert!((out.lambda() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn simulate_matches_expm_oracle() {
        let mut ledger = QueryLedger::new();
        let h = pauli("X").scale(Complex64::new(0.3, 0.0));
        let be = dilation_encoding(&h, 1.0);
        let eps = 1e-8;
        let out = be_simulate(&be, 2.0, eps, &mut ledger).unwrap();
        let want = expm_i(&h, 2.0).unwrap();
        let dist = be_verify(&out, &want).unwrap();
        assert!(dist <= eps, "dist {dist:.3e}");
        assert!(dist <= out.err() + 1e-12);
    }

    #[test]
    fn simulate_lambda_compensation() {
        // λ = 2 encoding of A/2 at t = 1 matches λ = 1 encoding of A.
        let mut rng = StdRng::seed_from_u64(23);
        let h_raw = random_hermitian(&mut rng, 2);
        let h = h_raw.scale(Complex64::new(0.45 / spectral_norm(&h_raw), 0.0));
        let mut l1 = QueryLedger::new();
        let mut l2 = QueryLedger::new();
        let out1 = be_simulate(&dilation_encoding(&h, 1.0), 1.0, 1e-9, &mut l1).unwrap();
        let out2 = be_simulate(&dilation_encoding(&h, 2.0), 1.0, 1e-9, &mut l2).unwrap();
        let dist = spectral_distance(&be_corner(&out1), &be_corner(&out2));
        assert!(dist <= 2e-9, "dist {dist:.3e}");
    }

    #[test]
    fn simulate_group_property() {
        let mut rng = StdRng::seed_from_u64(29);
        let h_raw = random_hermitian(&mut rng, 2);
        let h = h_raw.scale(Complex64::new(0.4 / spectral_norm(&h_raw), 0.0));
        let be = dilation_encoding(&h, 1.0);
        let eps = 1e-9;
        let mut l = QueryLedger::new();
        let o1 = be_simulate(&be, 0.7, eps, &mut l).unwrap();
        let o2 = be_simulate(&be, 0.5, eps, &mut l).unwrap();
        let o12 = be_simulate(&be, 1.2, eps, &mut l).unwrap();
        let composed = o1.err() + o2.err() + o12.err();
        let dist = spectral_distance(&be_corner(&o1).matmul(&be_corner(&o2)), &be_corner(&o12));
        assert!(dist <= 3.0 * composed, "dist {dist:.3e} vs composed {composed:.3e}");
    }

    #[test]
    fn verify_rejects_dimension_mismatch() {
        let be = be_from_unitary(&pauli("X")).unwrap();
        let target = ComplexMatrix::identity(4);
        assert!(matches!(be_verify(&be, &target), Err(Error::Dimension(_))));
    }

    #[test]
    fn scalar_propagates_parity_error() {
        let mut ledger = QueryLedger::new();
        let alpha = cheb_fit(|x| Complex64::new(0.3 * x * x + 0.2 * x, 0.0), 4, None);
        assert!(matches!(
            be_scalar(&alpha, 0.5, &mut ledger, "a"),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn composition_error_bookkeeping_sound() {
        // Inputs carrying a genuine ε (they claim the unperturbed operator
        // but encode a perturbed one); every composite's measured deviation
        // from its exact target must stay within the recorded bound, and
        // the ancilla accounting must match the stated formulas.
        let mut rng = StdRng::seed_from_u64(71);
        let h = random_hermitian(&mut rng, 2);
        let h = h.scale(Complex64::new(0.4 / spectral_norm(&h), 0.0));
        let mut bump = h.clone();
        bump[(0, 0)] += Complex64::new(3e-4, 0.0);
        bump[(1, 1)] -= Complex64::new(2e-4, 0.0);
        let claim_err = spectral_norm(&bump.sub(&h));
        let be = dilation_encoding(&bump, 1.0)
            .reinterpreted(1.0, claim_err)
            .unwrap();
        assert!(be_verify(&be, &h).unwrap() <= be.err() + 1e-12);

        let prod = be_product(&be, &be).unwrap();
        assert!(be_verify(&prod, &h.matmul(&h)).unwrap() <= prod.err() + 1e-12);
        assert_eq!(prod.ancilla_qubits(), 2 * be.ancilla_qubits());
        assert_eq!(prod.unitary().dim(), 1 << (prod.system_qubits() + prod.ancilla_qubits()));

        let w = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.4)];
        let comb = be_lcu(&[be.clone(), be.clone()], &w).unwrap();
        let target = h.scale(w[0]).add(&h.scale(w[1]));
        assert!(be_verify(&comb, &target).unwrap() <= comb.err() + 1e-12);
        assert_eq!(comb.ancilla_qubits(), be.ancilla_qubits() + 1);
        assert_eq!(comb.unitary().dim(), 1 << (comb.system_qubits() + comb.ancilla_qubits()));

        let mut ledger = QueryLedger::new();
        let sc = be_scalar(&ChebyshevPoly::constant(Complex64::new(0.7, 0.0)), 0.4, &mut ledger, "a")
            .unwrap();
        let scaled = be_scale_mul(&sc, &be).unwrap();
        let target = h.scale(Complex64::new(0.7, 0.0));
        assert!(be_verify(&scaled, &target).unwrap() <= scaled.err() + 1e-12);
        assert_eq!(scaled.ancilla_qubits(), sc.ancilla_qubits() + be.ancilla_qubits());

        let t3 = ChebyshevPoly::from_real_coeffs(&[0.0, 0.0, 0.0, 0.8]);
        let cubed = qsvt_apply(&be, &t3, &mut ledger).unwrap();
        let oracle = spectral_poly_oracle(&h, &t3);
        assert!(be_verify(&cubed, &oracle).unwrap() <= cubed.err() + 1e-12);
        assert_eq!(cubed.ancilla_qubits(), be.ancilla_qubits() + 1);

        let evolved = be_simulate(&be, 0.9, 1e-5, &mut ledger).unwrap();
        let want = expm_i(&h, 0.9).unwrap();
        assert!(be_verify(&evolved, &want).unwrap() <= evolved.err() + 1e-12);
        assert_eq!(evolved.ancilla_qubits(), 0);
        // Every unitary built along the way has spectral norm 1.
        for u in [be.unitary(), prod.unitary(), comb.unitary(), evolved.unitary()] {
            assert!((spectral_norm(u) - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn ledger_counts_are_deterministic() {
        let h = pauli("Z").scale(Complex64::new(0.25, 0.0));
        let run = || {
            let mut ledger = QueryLedger::new();
            let be = dilation_encoding(&h, 1.0);
            let _ = be_simulate(&be, 1.3, 1e-7, &mut ledger).unwrap();
            ledger
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
        let dc = a.degrees.get("jacobi_cos").copied().unwrap();
        let ds = a.degrees.get("jacobi_sin").copied().unwrap();
        assert_eq!(a.encoding_uses, (dc + ds) as u64 + 2);
    }
}
