//! Dense row-major complex matrices with Cholesky (Hermitian positive
//! definite) and partially pivoted LU factorizations.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use super::Real;
use crate::{Error, Result};

pub type ComplexVector<T> = Vec<Complex<T>>;

/// Hermitian inner product `a^H b`.
pub fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm2_sqr<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm2<T: Real>(a: &[Complex<T>]) -> T {
    norm2_sqr(a).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Single-column matrix holding `v`.
    pub fn from_column(v: &[Complex<T>]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex<T>] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `A v`.
    pub fn mul_vec(&self, v: &[Complex<T>]) -> Result<ComplexVector<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect())
    }

    /// `A^H v`.
    pub fn adjoint_mul_vec(&self, v: &[Complex<T>]) -> Result<ComplexVector<T>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "adjoint of {}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Complex::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> T {
        norm2(&self.data)
    }

    /// Largest `|a_ij - conj(a_ji)|` relative to the largest entry magnitude.
    pub fn hermitian_asymmetry(&self) -> T {
        let scale = self
            .data
            .iter()
            .fold(T::zero(), |m, z| m.max(z.norm()));
        if scale == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst / scale
    }

    pub fn scale(&mut self, factor: Complex<T>) {
        for z in &mut self.data {
            *z *= factor;
        }
    }

    pub fn add_to_diagonal(&mut self, value: Complex<T>) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += value;
        }
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn norm1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

fn hermitian_tolerance<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(100.0))
}

/// `H = L L^H` for Hermitian positive-definite `H`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: ComplexMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn new(h: &ComplexMatrix<T>) -> Result<Self> {
        if h.rows() != h.cols() {
            return Err(Error::DimensionMismatch(format!(
                "Cholesky of a {}x{} matrix",
                h.rows(),
                h.cols()
            )));
        }
        let asymmetry = h.hermitian_asymmetry();
        if asymmetry > hermitian_tolerance() {
            return Err(Error::NotHermitian {
                asymmetry: asymmetry.to_f64_lossy(),
            });
        }
        Self::new_unchecked(h)
    }

    /// Factorizes using only the lower triangle of `h`.
    pub fn new_unchecked(h: &ComplexMatrix<T>) -> Result<Self> {
        let n = h.rows();
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = h[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex::new(ljj, T::zero());
            for i in j + 1..n {
                let mut acc = h[(i, j)];
                for k in 0..j {
                    acc -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = acc / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn factor(&self) -> &ComplexMatrix<T> {
        &self.l
    }

    pub fn solve_vec(&self, b: &[Complex<T>]) -> Result<ComplexVector<T>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs of length {} for an order-{n} factorization",
                b.len()
            )));
        }
        let l = &self.l;
        let mut z = b.to_vec();
        for i in 0..n {
            let mut acc = z[i];
            for k in 0..i {
                acc -= l[(i, k)] * z[k];
            }
            z[i] = acc / l[(i, i)].re;
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for k in i + 1..n {
                acc -= l[(k, i)].conj() * z[k];
            }
            z[i] = acc / l[(i, i)].re;
        }
        Ok(z)
    }

    pub fn solve(&self, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if b.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "rhs with {} rows for an order-{} factorization",
                b.rows(),
                self.dim()
            )));
        }
        let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.column(j))?;
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        let mut inv = self
            .solve(&ComplexMatrix::identity(n))
            .expect("identity has matching dimension");
        // restore exact Hermitian symmetry
        for i in 0..n {
            inv[(i, i)].im = T::zero();
            for j in i + 1..n {
                let avg = (inv[(i, j)] + inv[(j, i)].conj()) * T::lit(0.5);
                inv[(i, j)] = avg;
                inv[(j, i)] = avg.conj();
            }
        }
        inv
    }

    /// `ln det H`.
    pub fn log_det(&self) -> T {
        (0..self.dim())
            .map(|i| self.l[(i, i)].re.ln())
            .sum::<T>()
            * T::lit(2.0)
    }
}

/// Solves `H X = B` for Hermitian positive-definite `H`.
pub fn hermitian_solve<T: Real>(
    h: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    Cholesky::new(h)?.solve(b)
}

/// `P A = L U` with partial pivoting, for general square complex matrices.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    norm1: T,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self> {
        let n = a.rows();
        if n != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "LU of a {}x{} matrix",
                n,
                a.cols()
            )));
        }
        let norm1 = a.norm1();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot > T::zero()) || !pivot.is_finite() {
                return Err(Error::Singular {
                    pivot: k,
                    context: "LU factorization".into(),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let inv_pivot = Complex::<T>::one() / lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] * inv_pivot;
                lu[(i, k)] = factor;
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let ukj = lu[(k, j)];
                    lu[(i, j)] -= factor * ukj;
                }
            }
        }
        Ok(Self { lu, perm, norm1 })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve_vec(&self, b: &[Complex<T>]) -> Result<ComplexVector<T>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs of length {} for an order-{n} factorization",
                b.len()
            )));
        }
        let lu = &self.lu;
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for k in 0..i {
                acc -= lu[(i, k)] * x[k];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for k in i + 1..n {
                acc -= lu[(i, k)] * x[k];
            }
            x[i] = acc / lu[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        let mut inv = ComplexMatrix::zeros(n, n);
        let mut e = vec![Complex::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = Complex::zero());
            e[j] = Complex::one();
            let col = self.solve_vec(&e).expect("dimension matches");
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }

    /// 1-norm condition number `||A||_1 ||A^-1||_1`, computed exactly.
    pub fn condition_1norm(&self) -> T {
        self.norm1 * self.inverse().norm1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{complex_gaussian_sample, RngStream};

    type C = Complex<f64>;

    fn random_hpd(n: usize, seed: u64) -> ComplexMatrix<f64> {
        let mut rng = RngStream::new(seed, 0);
        let g = ComplexMatrix::from_row_major(n, n, complex_gaussian_sample(&mut rng, n * n, 1.0).unwrap())
            .unwrap();
        let mut h = g.adjoint().matmul(&g).unwrap();
        h.add_to_diagonal(C::new(n as f64 * 0.1, 0.0));
        h
    }

    fn rel_residual(h: &ComplexMatrix<f64>, x: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>) -> f64 {
        let hx = h.matmul(x).unwrap();
        let diff: Vec<C> = hx.as_slice().iter().zip(b.as_slice()).map(|(a, b)| a - b).collect();
        norm2(&diff) / b.frobenius_norm()
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = ComplexMatrix::from_column(&[C::new(1.0, 2.0), C::new(-3.0, 0.5)]);
        let x = hermitian_solve(&ComplexMatrix::identity(2), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_solve() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 0)] = C::new(2.0, 0.0);
        h[(1, 1)] = C::new(4.0, 0.0);
        let b = ComplexMatrix::from_column(&[C::new(2.0, 0.0), C::new(4.0, 0.0)]);
        let x = hermitian_solve(&h, &b).unwrap();
        for z in x.as_slice() {
            assert!((z - C::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn random_hpd_round_trip() {
        for (n, seed) in [(8, 1), (32, 2), (256, 3)] {
            let h = random_hpd(n, seed);
            let mut rng = RngStream::new(seed, 9);
            let b = ComplexMatrix::from_row_major(n, 3, complex_gaussian_sample(&mut rng, 3 * n, 1.0).unwrap())
                .unwrap();
            let x = hermitian_solve(&h, &b).unwrap();
            assert!(rel_residual(&h, &x, &b) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn indefinite_reports_pivot() {
        let mut h = ComplexMatrix::<f64>::identity(3);
        h[(2, 2)] = C::new(-1.0, 0.0);
        match hermitian_solve(&h, &ComplexMatrix::identity(3)) {
            Err(Error::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut h = ComplexMatrix::<f64>::identity(2);
        h[(0, 1)] = C::new(0.5, 0.0);
        assert!(matches!(
            Cholesky::new(&h),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn log_det_matches_diagonal() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 0)] = C::new(2.0, 0.0);
        h[(1, 1)] = C::new(5.0, 0.0);
        let ch = Cholesky::new(&h).unwrap();
        assert!((ch.log_det() - 10f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn lu_solves_general_system() {
        let n = 12;
        let mut rng = RngStream::new(5, 1);
        let a = ComplexMatrix::from_row_major(n, n, complex_gaussian_sample(&mut rng, n * n, 1.0).unwrap())
            .unwrap();
        let b = complex_gaussian_sample(&mut rng, n, 1.0).unwrap();
        let lu = Lu::new(&a).unwrap();
        let x = lu.solve_vec(&b).unwrap();
        let ax = a.mul_vec(&x).unwrap();
        let diff: Vec<C> = ax.iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&diff) < 1e-10 * norm2(&b));
        assert!(lu.condition_1norm() >= 1.0);
    }

    #[test]
    fn lu_reports_singular() {
        let a = ComplexMatrix::<f64>::zeros(3, 3);
        assert!(matches!(Lu::new(&a), Err(Error::Singular { pivot: 0, .. })));
    }

    #[test]
    fn adjoint_mul_vec_matches_explicit_adjoint() {
        let mut rng = RngStream::new(3, 3);
        let a = ComplexMatrix::from_row_major(4, 6, complex_gaussian_sample(&mut rng, 24, 1.0).unwrap())
            .unwrap();
        let v = complex_gaussian_sample(&mut rng, 4, 1.0).unwrap();
        let direct = a.adjoint().mul_vec(&v).unwrap();
        let fast = a.adjoint_mul_vec(&v).unwrap();
        for (p, q) in direct.iter().zip(&fast) {
            assert!((p - q).norm() < 1e-14);
        }
    }
}
