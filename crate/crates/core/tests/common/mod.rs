//! Reference computations for tests.
//!
//! Nothing in here calls into the library's solvers: polynomial roots come
//! from nalgebra's companion-matrix eigenvalues, Hermitian spectra from
//! nalgebra's own decomposition, and feasible-set sampling is done by
//! direct parametrization.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex_normal(rng)).collect()
}

/// Row-major `(M + Mᴴ)/2` for a complex Gaussian `M`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let m = random_complex(rng, n * n);
    let mut h = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
        }
        h[i * n + i].im = 0.0;
    }
    h
}

/// Row-major `MᴴM / n` for a complex Gaussian `M`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let m = random_complex(rng, n * n);
    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                s += m[k * n + i].conj() * m[k * n + j];
            }
            g[i * n + j] = s / n as f64;
        }
        g[i * n + i].im = 0.0;
    }
    g
}

pub fn to_dmatrix(data: &[Complex64], n: usize) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(n, n, data)
}

/// All complex roots of `Σ coeffs[k] x^k` from the companion matrix.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -c[i] / lead;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Numerator polynomial `Σ_n a_n b_n Π_{m≠n} (λ − b_m)²` of the secular
/// function, ascending powers.
pub fn secular_polynomial(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut total = vec![0.0; 2 * n.saturating_sub(1) + 1];
    for i in 0..n {
        let mut term = vec![a[i] * b[i]];
        for (m, &bm) in b.iter().enumerate() {
            if m != i {
                let sq = [bm * bm, -2.0 * bm, 1.0];
                term = poly_mul(&term, &sq);
            }
        }
        for (k, t) in term.iter().enumerate() {
            total[k] += t;
        }
    }
    total
}

/// `S(λ) = Σ a_n b_n / (λ − b_n)²` and its derivative, evaluated directly.
pub fn secular_value(a: &[f64], b: &[f64], x: f64) -> (f64, f64) {
    let mut s = 0.0;
    let mut ds = 0.0;
    for (&an, &bn) in a.iter().zip(b) {
        let d = x - bn;
        s += an * bn / (d * d);
        ds += -2.0 * an * bn / (d * d * d);
    }
    (s, ds)
}

/// Real roots of `S`, sorted ascending, from the polynomial route with a
/// few Newton polishing steps on `S` itself.
pub fn secular_real_roots(a: &[f64], b: &[f64]) -> Vec<f64> {
    let scale = b.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut roots: Vec<f64> = poly_roots(&secular_polynomial(a, b))
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-7 * scale.max(z.norm()))
        .map(|z| z.re)
        .collect();
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let (s, ds) = secular_value(a, b, *r);
            if !s.is_finite() || !ds.is_finite() || ds == 0.0 {
                break;
            }
            let step = s / ds;
            if step.abs() > 1e-3 * scale {
                break;
            }
            *r -= step;
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Characteristic polynomial of a Hermitian matrix by Faddeev–LeVerrier,
/// returned as real ascending coefficients (monic).
pub fn hermitian_charpoly(m: &[Complex64], n: usize) -> Vec<f64> {
    let a = to_dmatrix(m, n);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = DMatrix::<Complex64>::zeros(n, n);
    let ident = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=n {
        mk = &a * &mk + &ident * coeffs[n - k + 1];
        let amk = &a * &mk;
        coeffs[n - k] = -amk.trace() / k as f64;
    }
    coeffs.iter().map(|c| c.re).collect()
}

pub fn hermitian_eigenvalues_via_charpoly(m: &[Complex64], n: usize) -> Vec<f64> {
    poly_roots(&hermitian_charpoly(m, n)).iter().map(|z| z.re).collect()
}

/// nalgebra's Hermitian eigendecomposition: ascending values and the
/// matching eigenvector columns.
pub fn hermitian_eigen(m: &[Complex64], n: usize) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let eig = SymmetricEigen::new(to_dmatrix(m, n));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = idx
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

pub fn quad(m: &[Complex64], n: usize, x: &[Complex64]) -> f64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += x[i].conj() * m[i * n + j] * x[j];
        }
    }
    s.re
}

pub fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Random direction on the cone `xᴴ D x = 0`, unit norm. Components along
/// the positive eigenvalues are rescaled to cancel the negative part.
pub struct ConeSampler {
    values: Vec<f64>,
    vectors: Vec<Vec<Complex64>>,
    n: usize,
}

impl ConeSampler {
    pub fn new(d: &[Complex64], n: usize) -> Self {
        let (values, vectors) = hermitian_eigen(d, n);
        Self { values, vectors, n }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<Complex64>> {
        let z = random_complex(rng, self.n);
        let mut pos = 0.0;
        let mut neg = 0.0;
        for (zi, &e) in z.iter().zip(&self.values) {
            if e > 0.0 {
                pos += zi.norm_sqr() * e;
            } else {
                neg += zi.norm_sqr() * e;
            }
        }
        if pos <= 0.0 || neg >= 0.0 {
            return None;
        }
        let s = (-neg / pos).sqrt();
        let mut x = vec![Complex64::new(0.0, 0.0); self.n];
        for (k, (zk, &e)) in z.iter().zip(&self.values).enumerate() {
            let coef = if e > 0.0 { zk * s } else { *zk };
            for (xi, vi) in x.iter_mut().zip(&self.vectors[k]) {
                *xi += vi * coef;
            }
        }
        let nrm = norm_sqr(&x).sqrt();
        Some(x.into_iter().map(|v| v / nrm).collect())
    }
}

/// Random points with `cᴴw = 1` and `wᴴDw = 0`: start from `c/|c|²`, pick a
/// random direction `n ⊥ c`, and move along it to the real roots of the
/// quadratic `(w₀ + t n)ᴴ D (w₀ + t n) = 0`.
pub fn distortionless_feasible<R: Rng + ?Sized>(
    rng: &mut R,
    d: &[Complex64],
    n: usize,
    c: &[Complex64],
) -> Vec<Vec<Complex64>> {
    let cc = norm_sqr(c);
    let w0: Vec<Complex64> = c.iter().map(|x| x / cc).collect();
    let mut dir = random_complex(rng, n);
    let proj: Complex64 = c.iter().zip(&dir).map(|(a, b)| a.conj() * b).sum::<Complex64>() / cc;
    for (x, ci) in dir.iter_mut().zip(c) {
        *x -= ci * proj;
    }
    let a = quad(d, n, &dir);
    let q = quad(d, n, &w0);
    let mut b = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            b += w0[i].conj() * d[i * n + j] * dir[j];
        }
    }
    let b = b.re;
    let disc = b * b - a * q;
    if disc < 0.0 || a == 0.0 {
        return Vec::new();
    }
    [(-b + disc.sqrt()) / a, (-b - disc.sqrt()) / a]
        .iter()
        .map(|t| w0.iter().zip(&dir).map(|(x, y)| x + y * *t).collect())
        .collect()
}
