//! Dense complex Hermitian linear algebra for small arrays.
//!
//! Everything here is sized for loudspeaker arrays of a handful of
//! transducers (N up to ~16): Cholesky factorization, a cyclic Jacobi
//! Hermitian eigensolver and the Cholesky-whitened generalized eigenproblem
//!
//! ```text
//! R = L Lᴴ,   Q = L⁻¹ A L⁻ᴴ = V E Vᴴ,   W = L⁻ᴴ V
//! ```
//!
//! whose columns satisfy `A w_n = e_n R w_n`.

use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const JACOBI_THRESHOLD: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 30;
const PIVOT_FLOOR: f64 = 1e-12;
/// Relative ridge added by [`cholesky_with_ridge`] when the first attempt fails.
pub const RIDGE: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a square matrix from real row-major entries.
    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(n, n, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `selfᴴ x` without forming the transpose.
    pub fn conj_transpose_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.rows, x.len(), "matvec dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for i in 0..self.rows {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self[(i, j)].conj() * x[i];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation `max |self - other|`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn scaled_sum(&self, other: &ComplexMatrix, s: f64) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b * s).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square complex matrix equal to its conjugate transpose, with an exactly
/// real diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Accepts `m` if it is Hermitian within `1e-12 × max|m|`, then removes
    /// the residual asymmetry.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", m.rows, m.cols)));
        }
        let scale = m.max_abs();
        let asym = m.max_abs_diff(&m.conj_transpose());
        if asym > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { deviation: asym });
        }
        symmetrize(&m)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_diagonal(diag))
    }

    /// `Σ_k weight_k x_k x_kᴴ` for nonnegative weights.
    pub fn from_weighted_outer_products<'a, I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (f64, &'a [Complex64])>,
    {
        let mut m = ComplexMatrix::zeros(n, n);
        for (weight, x) in terms {
            for i in 0..n {
                let xi = x[i] * weight;
                m[(i, i)] += Complex64::new(xi.re * x[i].re + xi.im * x[i].im, 0.0);
                for j in (i + 1)..n {
                    let v = xi * x[j].conj();
                    m[(i, j)] += v;
                    m[(j, i)] += v.conj();
                }
            }
        }
        Self(m)
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn max_diagonal(&self) -> f64 {
        self.diagonal().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.0.matvec(x)
    }

    /// Real quadratic form `xᴴ M x`.
    pub fn quad_form(&self, x: &[Complex64]) -> f64 {
        dot(x, &self.matvec(x)).re
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &HermitianMatrix, s: f64) -> Self {
        Self(self.0.scaled_sum(&other.0, s))
    }

    /// `self + shift·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..self.n() {
            m[(i, i)] += shift;
        }
        Self(m)
    }

    /// Congruence `Sᴴ M S` for a square `S`.
    pub fn congruence(&self, s: &ComplexMatrix) -> Self {
        let m = s.conj_transpose().matmul(&self.0).matmul(s);
        symmetrize(&m).expect("congruence of a square matrix is square")
    }

    /// Congruence with a real diagonal matrix: entries scale by `d_i d_j`.
    pub fn diagonal_congruence(&self, d: &[f64]) -> Self {
        let n = self.n();
        let mut m = self.0.clone();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] *= d[i] * d[j];
            }
        }
        Self(m)
    }
}

/// Lower-triangular Cholesky factor with a positive real diagonal.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    lower: ComplexMatrix,
}

impl CholeskyFactor {
    pub fn lower(&self) -> &ComplexMatrix {
        &self.lower
    }

    /// Solves `L x = b` by forward substitution.
    pub fn solve_lower(&self, b: &[Complex64]) -> Vec<Complex64> {
        let l = &self.lower;
        let n = l.rows;
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= l[(i, k)] * x[k];
            }
            x[i] = s / l[(i, i)].re;
        }
        x
    }

    /// Solves `Lᴴ x = b` by back substitution.
    pub fn solve_upper(&self, b: &[Complex64]) -> Vec<Complex64> {
        let l = &self.lower;
        let n = l.rows;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= l[(k, i)].conj() * x[k];
            }
            x[i] = s / l[(i, i)].re;
        }
        x
    }

    /// Whitened matrix `L⁻¹ M L⁻ᴴ`.
    pub fn whiten(&self, m: &HermitianMatrix) -> HermitianMatrix {
        let n = m.n();
        // Y = L⁻¹ M, then Q = L⁻¹ Yᴴ since (L⁻¹ M L⁻ᴴ)ᴴ = L⁻¹ Mᴴ L⁻ᴴ
        let y_cols: Vec<Vec<Complex64>> = (0..n).map(|j| self.solve_lower(&m.matrix().column(j))).collect();
        let y = ComplexMatrix::from_columns(&y_cols);
        let yh = y.conj_transpose();
        let q_cols: Vec<Vec<Complex64>> = (0..n).map(|j| self.solve_lower(&yh.column(j))).collect();
        symmetrize(&ComplexMatrix::from_columns(&q_cols)).expect("square")
    }
}

/// Eigenpairs of a Hermitian matrix: ascending real values and orthonormal
/// eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Spectral norm `max |e_n|`.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().map(|e| e.abs()).fold(0.0, f64::max)
    }

    /// Coordinates `Vᴴ x` in the eigenbasis.
    pub fn to_eigenbasis(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.vectors.conj_transpose_matvec(x)
    }

    /// Maps eigenbasis coordinates back with `V z`.
    pub fn from_eigenbasis(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.vectors.matvec(z)
    }

    /// `V diag(e) Vᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.len();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= self.values[j];
            }
        }
        scaled.matmul(&self.vectors.conj_transpose())
    }
}

/// Generalized eigenpairs of `(A, R)`: the decomposition of the whitened
/// `L⁻¹ A L⁻ᴴ` plus the back-transformed vectors `W = L⁻ᴴ V`.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    pub decomposition: EigenDecomposition,
    /// Columns `w_n` with `A w_n = e_n R w_n` and `w_nᴴ R w_n = 1`.
    pub vectors: ComplexMatrix,
}

impl GeneralizedEigen {
    pub fn values(&self) -> &[f64] {
        &self.decomposition.values
    }
}

/// `(M + Mᴴ)/2`.
pub fn symmetrize(m: &ComplexMatrix) -> Result<HermitianMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.rows, m.cols)));
    }
    if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    Ok(HermitianMatrix(out))
}

/// Cholesky factorization `M = L Lᴴ`.
///
/// A pivot below `1e-12 × max diag(M)` is reported as
/// [`Error::NotPositiveDefinite`].
pub fn cholesky(m: &HermitianMatrix) -> Result<CholeskyFactor> {
    let n = m.n();
    let floor = PIVOT_FLOOR * m.max_diagonal().max(0.0);
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m.get(j, j).re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > floor) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(CholeskyFactor { lower: l })
}

/// Cholesky with one ridge retry: on failure, factors `M + εI` with
/// `ε = 1e-10 × max diag(M)`. Returns the factor and the ridge applied.
pub fn cholesky_with_ridge(m: &HermitianMatrix) -> Result<(CholeskyFactor, f64)> {
    match cholesky(m) {
        Ok(f) => Ok((f, 0.0)),
        Err(Error::NotPositiveDefinite { .. }) => {
            let eps = RIDGE * m.max_diagonal().max(0.0);
            cholesky(&m.shifted(eps)).map(|f| (f, eps))
        }
        Err(e) => Err(e),
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Values come back ascending (stable for ties); each eigenvector has its
/// largest-magnitude entry rotated to the positive real axis.
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = m.n();
    let mut a = m.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_THRESHOLD * a.frobenius_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // real rotation of [[app, |apq|], [|apq|, aqq]], lifted by the phase of apq
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let jpq = phase * s;
                let jqp = -phase.conj() * s;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * jqp.conj();
                    a[(q, k)] = apk * jpq.conj() + aqk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * c;
                }
            }
        }
        converged = off_norm(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let columns: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&j| {
            let mut col = v.column(j);
            fix_phase(&mut col);
            col
        })
        .collect();
    Ok(EigenDecomposition {
        values,
        vectors: ComplexMatrix::from_columns(&columns),
    })
}

/// Generalized Hermitian eigenproblem `A w = e R w` via Cholesky whitening.
pub fn generalized_eig(a: &HermitianMatrix, r: &HermitianMatrix) -> Result<GeneralizedEigen> {
    if a.n() != r.n() {
        return Err(Error::Dimension(format!("{}x{} vs {}x{}", a.n(), a.n(), r.n(), r.n())));
    }
    let chol = cholesky(r)?;
    generalized_eig_with_factor(a, &chol)
}

/// As [`generalized_eig`] with a precomputed factor of `R`.
pub fn generalized_eig_with_factor(a: &HermitianMatrix, chol: &CholeskyFactor) -> Result<GeneralizedEigen> {
    let q = chol.whiten(a);
    let decomposition = eig_hermitian(&q)?;
    let n = a.n();
    let columns: Vec<Vec<Complex64>> = (0..n)
        .map(|j| chol.solve_upper(&decomposition.vectors.column(j)))
        .collect();
    Ok(GeneralizedEigen {
        decomposition,
        vectors: ComplexMatrix::from_columns(&columns),
    })
}

/// Rotates `x` so its largest-magnitude entry (lowest index on ties) is real
/// and positive.
pub fn fix_phase(x: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in x.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let rot = x[best].conj() / best_mag;
        for z in x.iter_mut() {
            *z *= rot;
        }
        x[best] = Complex64::new(x[best].re, 0.0);
    }
}

/// `xᴴ y`.
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    norm_sqr(x).sqrt()
}

/// `x / |x|`; `None` for the zero vector.
pub fn normalized(x: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm(x);
    (n > 0.0 && n.is_finite()).then(|| x.iter().map(|z| z / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn herm(n: usize, data: Vec<Complex64>) -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::from_row_major(n, n, data).unwrap()).unwrap()
    }

    fn random_hermitian(seed: u64, n: usize) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        herm(n, oracle::random_hermitian(&mut rng, n))
    }

    fn random_psd(seed: u64, n: usize) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        herm(n, oracle::random_psd(&mut rng, n))
    }

    #[test]
    fn symmetrize_identity_is_fixed_point() {
        let i = ComplexMatrix::identity(2);
        assert_eq!(symmetrize(&i).unwrap().matrix(), &i);
    }

    #[test]
    fn symmetrize_averages_with_conjugate_transpose() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1., 0.), c(0., 1.), c(0., 0.), c(1., 0.)]).unwrap();
        let h = symmetrize(&m).unwrap();
        assert_eq!(h.get(0, 1), c(0., 0.5));
        assert_eq!(h.get(1, 0), c(0., -0.5));
        assert_eq!(h.get(0, 0), c(1., 0.));
    }

    #[test]
    fn symmetrize_output_is_exactly_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = ComplexMatrix::from_row_major(4, 4, oracle::random_complex(&mut rng, 16)).unwrap();
        let h = symmetrize(&m).unwrap();
        assert_eq!(h.matrix(), &h.matrix().conj_transpose());
        let again = symmetrize(h.matrix()).unwrap();
        assert_eq!(again, h);
    }

    #[test]
    fn symmetrize_rejects_bad_input() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(symmetrize(&m), Err(Error::Dimension(_))));
        let bad = ComplexMatrix::from_row_major(1, 1, vec![c(f64::NAN, 0.)]);
        assert!(matches!(bad, Err(Error::NonFinite)));
    }

    #[test]
    fn hermitian_new_rejects_asymmetric() {
        let m = ComplexMatrix::from_real(2, &[1., 2., 3., 1.]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn cholesky_examples() {
        let l = cholesky(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(l.lower(), &ComplexMatrix::identity(3));
        let l = cholesky(&HermitianMatrix::from_diagonal(&[4., 9.])).unwrap();
        assert_eq!(l.lower(), &ComplexMatrix::from_diagonal(&[2., 3.]));
    }

    #[test]
    fn cholesky_reconstructs_random_gram_plus_identity() {
        let m = random_psd(11, 6).shifted(1.0);
        let l = cholesky(&m).unwrap();
        let recon = l.lower().matmul(&l.lower().conj_transpose());
        assert!(recon.max_abs_diff(m.matrix()) <= 1e-10 * m.max_abs());
        for i in 0..6 {
            assert!(l.lower()[(i, i)].re > 0.0);
            assert_eq!(l.lower()[(i, i)].im, 0.0);
            for j in (i + 1)..6 {
                assert_eq!(l.lower()[(i, j)], c(0., 0.));
            }
        }
    }

    #[test]
    fn cholesky_flags_singular_and_ridge_recovers() {
        let m = HermitianMatrix::new(ComplexMatrix::from_real(2, &[1., 1., 1., 1.]).unwrap()).unwrap();
        assert!(matches!(cholesky(&m), Err(Error::NotPositiveDefinite { index: 1, .. })));
        let (f, eps) = cholesky_with_ridge(&m).unwrap();
        assert_eq!(eps, 1e-10);
        assert!(f.lower()[(1, 1)].re > 0.0);
        let indefinite = HermitianMatrix::from_diagonal(&[1., -1.]);
        assert!(cholesky_with_ridge(&indefinite).is_err());
    }

    #[test]
    fn eig_diagonal_sorts_and_permutes() {
        let e = eig_hermitian(&HermitianMatrix::from_diagonal(&[3., 1., 2.])).unwrap();
        assert_eq!(e.values, vec![1., 2., 3.]);
        let cols: Vec<Vec<Complex64>> = (0..3).map(|j| e.vectors.column(j)).collect();
        assert_eq!(cols[0], vec![c(0., 0.), c(1., 0.), c(0., 0.)]);
        assert_eq!(cols[1], vec![c(0., 0.), c(0., 0.), c(1., 0.)]);
        assert_eq!(cols[2], vec![c(1., 0.), c(0., 0.), c(0., 0.)]);
    }

    #[test]
    fn eig_pauli_x() {
        let m = herm(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_ties_keep_input_order() {
        let e = eig_hermitian(&HermitianMatrix::from_diagonal(&[2., 1., 2.])).unwrap();
        assert_eq!(e.values, vec![1., 2., 2.]);
        assert_eq!(e.vectors.column(1)[0], c(1., 0.));
        assert_eq!(e.vectors.column(2)[2], c(1., 0.));
    }

    #[test]
    fn eig_matches_characteristic_polynomial_roots() {
        for seed in 0..5 {
            let m = random_hermitian(100 + seed, 8);
            let e = eig_hermitian(&m).unwrap();
            let mut roots = oracle::hermitian_eigenvalues_via_charpoly(m.matrix().as_slice(), 8);
            roots.sort_by(f64::total_cmp);
            for (got, want) in e.values.iter().zip(&roots) {
                assert!((got - want).abs() < 1e-8, "seed {seed}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let m = random_hermitian(5, 6);
        let a = eig_hermitian(&m).unwrap();
        let b = eig_hermitian(&m).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn generalized_examples() {
        let a = random_psd(1, 4).shifted(0.5);
        let g = generalized_eig(&a, &a).unwrap();
        for e in g.values() {
            assert!((e - 1.0).abs() < 1e-12);
        }
        let g = generalized_eig(
            &HermitianMatrix::from_diagonal(&[2., 1.]),
            &HermitianMatrix::identity(2),
        )
        .unwrap();
        assert_eq!(g.values(), &[1.0, 2.0]);
        assert_eq!(g.vectors.column(0), vec![c(0., 0.), c(1., 0.)]);
        assert_eq!(g.vectors.column(1), vec![c(1., 0.), c(0., 0.)]);
    }

    #[test]
    fn generalized_residuals_on_random_pair() {
        let a = random_psd(21, 5);
        let r = random_psd(22, 5).shifted(0.1);
        let g = generalized_eig(&a, &r).unwrap();
        for (n, &e) in g.values().iter().enumerate() {
            let w = g.vectors.column(n);
            let aw = a.matvec(&w);
            let rw = r.matvec(&w);
            let res: f64 = aw.iter().zip(&rw).map(|(x, y)| (x - y * e).norm()).fold(0.0, f64::max);
            assert!(res < 1e-8, "residual {res}");
            let quotient = a.quad_form(&w) / r.quad_form(&w);
            assert!((quotient - e).abs() < 1e-9);
        }
    }

    #[test]
    fn generalized_quadratic_form_identity_for_d() {
        let a = random_psd(31, 5);
        let r = random_psd(32, 5).shifted(0.1);
        let g = generalized_eig(&a, &r).unwrap();
        let tau = 0.5 * (g.values()[0] + g.values()[4]);
        let d = a.add_scaled(&r, -tau);
        for (n, &e) in g.values().iter().enumerate() {
            let w = g.vectors.column(n);
            assert!((d.quad_form(&w) - (e - tau)).abs() < 1e-8);
        }
    }

    #[test]
    fn generalized_spectrum_invariant_under_congruence() {
        let a = random_psd(41, 4);
        let r = random_psd(42, 4).shifted(0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let s = ComplexMatrix::from_row_major(4, 4, oracle::random_complex(&mut rng, 16)).unwrap();
        let g1 = generalized_eig(&a, &r).unwrap();
        let g2 = generalized_eig(&a.congruence(&s), &r.congruence(&s)).unwrap();
        for (x, y) in g1.values().iter().zip(g2.values()) {
            assert!((x - y).abs() < 1e-8 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eig_invariants(seed in any::<u64>(), n in 1usize..=16) {
            let m = random_hermitian(seed, n);
            let e = eig_hermitian(&m).unwrap();
            for w in e.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            let vhv = e.vectors.conj_transpose().matmul(&e.vectors);
            prop_assert!(vhv.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
            let recon = e.reconstruct();
            prop_assert!(recon.max_abs_diff(m.matrix()) <= 1e-9 * m.max_abs());
            let tr = m.trace();
            let sum: f64 = e.values.iter().sum();
            prop_assert!((tr - sum).abs() <= 1e-9 * tr.abs().max(1.0));
        }
    }
}
