//! Dense square complex matrices and the spectral routines built on them.
//!
//! Everything downstream (signal operators, block encodings, propagator
//! oracles) is carried by [`ComplexMatrix`]: row-major `Vec<Complex64>`
//! storage, Hermitian eigendecomposition by cyclic Jacobi rotations, and
//! matrix functions taken through the spectral route.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Desk-scale cap on matrix dimension; constructions past this are refused.
pub const DIM_CAP: usize = 1 << 14;

/// Default tolerance for structural predicates (hermiticity, unitarity).
pub const STRUCT_TOL: f64 = 1e-10;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C_ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C_ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must be square");
        Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Builds from a row-major slice of (re, im) pairs; test-friendly.
    pub fn from_reals(dim: usize, entries: &[(f64, f64)]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self {
            dim,
            data: entries.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
        }
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// All entries finite (no NaN/Inf).
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    /// Matrix product, packing the transposed right factor so the inner loop
    /// runs over two contiguous slices.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut bt = vec![C_ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                bt[j * n + i] = other.data[i * n + j];
            }
        }
        let mut out = Self::zeros(n);
        for i in 0..n {
            let arow = &self.data[i * n..(i + 1) * n];
            for j in 0..n {
                let bcol = &bt[j * n..(j + 1) * n];
                let mut acc_re = 0.0f64;
                let mut acc_im = 0.0f64;
                for k in 0..n {
                    let a = arow[k];
                    let b = bcol[k];
                    acc_re += a.re * b.re - a.im * b.im;
                    acc_im += a.re * b.im + a.im * b.re;
                }
                out.data[i * n + j] = Complex64::new(acc_re, acc_im);
            }
        }
        out
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max entrywise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Frobenius norm of `U†U − I`; upper-bounds the spectral deviation.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.conj_transpose().matmul(self);
        gram.sub(&Self::identity(self.dim)).frobenius_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Top-left `dim`×`dim` block.
    pub fn top_left_block(&self, dim: usize) -> Self {
        assert!(dim <= self.dim);
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] = self[(i, j)];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Kronecker product; refuses products past [`DIM_CAP`].
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (na, nb) = (a.dim(), b.dim());
    let dim = na.checked_mul(nb).ok_or(Error::Sizing { dim: usize::MAX, cap: DIM_CAP })?;
    if dim > DIM_CAP {
        return Err(Error::Sizing { dim, cap: DIM_CAP });
    }
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij == C_ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Returns ascending eigenvalues and a unitary `V` with `h = V diag(w) V†`.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_hermitian(STRUCT_TOL) {
        return Err(Error::Contract(format!(
            "eig_hermitian requires a Hermitian input (defect {:.3e})",
            h.hermiticity_defect()
        )));
    }
    let n = h.dim();
    let mut a = h.clone();
    // Symmetrize exactly so rotations see a clean Hermitian matrix.
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation on (p, q): |p'⟩ = c|p⟩ − s e^{-iφ}|q⟩, |q'⟩ = s e^{iφ}|p⟩ + c|q⟩.
                let sp = phase * s;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - aiq * sp.conj();
                    a[(i, q)] = aip * sp + aiq * c;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - aqj * sp;
                    a[(q, j)] = apj * sp.conj() + aqj * c;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * sp.conj();
                    v[(i, q)] = vip * sp + viq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigs[i].partial_cmp(&eigs[j]).unwrap());
    let w: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let mut vs = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vs[(i, new_col)] = v[(i, old_col)];
        }
    }
    Ok((w, vs))
}

/// Applies a real scalar function to a Hermitian matrix through its spectrum,
/// mapping eigenvalues by `f` into complex values.
pub fn spectral_map(h: &ComplexMatrix, f: impl Fn(f64) -> Complex64) -> Result<ComplexMatrix> {
    let (w, v) = eig_hermitian(h)?;
    let n = h.dim();
    let mut scaled = v.clone();
    for j in 0..n {
        let fj = f(w[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    Ok(scaled.matmul(&v.conj_transpose()))
}

/// `exp(−i t h)` for Hermitian `h`, via the spectral route.
pub fn expm_i(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    spectral_map(h, |w| Complex64::from_polar(1.0, -t * w))
}

/// Largest singular value, via the Hermitian spectrum of `A†A`.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    let gram = a.conj_transpose().matmul(a);
    let (w, _) = eig_hermitian(&gram).expect("A†A is Hermitian by construction");
    w.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Spectral norm of the difference `a − b`.
pub fn spectral_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    spectral_norm(&a.sub(b))
}

/// Unitary polar factor of `c` plus the smallest singular value of `c`.
///
/// `c = U·P` with `P = (c†c)^{1/2}`; the caller judges conditioning from the
/// returned minimum singular value.
pub fn polar_unitary(c: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let gram = c.conj_transpose().matmul(c);
    let (w, v) = eig_hermitian(&gram)?;
    let sigma_min = w.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    // P^{-1} = V diag(1/√w) V†
    let n = c.dim();
    let mut scaled = v.clone();
    for j in 0..n {
        let s = w[j].max(0.0).sqrt();
        if s <= 1e-14 {
            return Err(Error::Convergence {
                what: "polar factor is singular".into(),
                residual: s,
            });
        }
        let inv = Complex64::new(1.0 / s, 0.0);
        for i in 0..n {
            scaled[(i, j)] *= inv;
        }
    }
    let p_inv = scaled.matmul(&v.conj_transpose());
    Ok((c.matmul(&p_inv), sigma_min))
}
