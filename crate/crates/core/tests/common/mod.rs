//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.
#![allow(dead_code)]

use std::f64::consts::PI;

use cdt_core::numerics::ComplexMatrix;
use cdt_core::C64;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre quadrature with `panels` equal panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(12);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            acc += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * acc;
    }
    total
}

fn tail_limit(x: f64) -> f64 {
    // x sinh(t) - t > 45 beyond this point
    let mut t: f64 = 1.0;
    while x * t.sinh() - t < 45.0 {
        t += 0.25;
    }
    t
}

/// `J_n(x) = 1/pi int_0^pi cos(n theta - x sin theta) d theta`.
pub fn oracle_jn(n: i32, x: f64) -> f64 {
    integrate(|t| (n as f64 * t - x * t.sin()).cos(), 0.0, PI, 200) / PI
}

/// `Y_n(x) = 1/pi int_0^pi sin(x sin theta - n theta) d theta
///          - 1/pi int_0^inf (e^{nt} + (-1)^n e^{-nt}) e^{-x sinh t} dt`.
pub fn oracle_yn(n: i32, x: f64) -> f64 {
    let first = integrate(|t| (x * t.sin() - n as f64 * t).sin(), 0.0, PI, 200) / PI;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let upper = tail_limit(x);
    let second = integrate(
        |t| ((n as f64 * t).exp() + sign * (-n as f64 * t).exp()) * (-x * t.sinh()).exp(),
        0.0,
        upper,
        2000,
    ) / PI;
    first - second
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn dense_inverse(a: &ComplexMatrix<f64>) -> ComplexMatrix<f64> {
    let n = a.rows();
    let mut work: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.extend((0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| work[i][k].norm().partial_cmp(&work[j][k].norm()).unwrap())
            .unwrap();
        work.swap(k, p);
        let piv = work[k][k];
        for v in work[k].iter_mut() {
            *v /= piv;
        }
        for i in 0..n {
            if i != k {
                let f = work[i][k];
                if f.norm() != 0.0 {
                    let pivot_row = work[k].clone();
                    for (v, pv) in work[i].iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| work[i][n + j])
}

/// `C = beta^-1 I + sum_{j in active, j != skip} gamma_j phi_j phi_j^H`.
pub fn dense_c(
    a: &ComplexMatrix<f64>,
    beta: f64,
    gamma: &[f64],
    skip: Option<usize>,
) -> ComplexMatrix<f64> {
    let m = a.rows();
    let mut c = ComplexMatrix::zeros(m, m);
    for r in 0..m {
        c[(r, r)] = C64::new(1.0 / beta, 0.0);
    }
    for (j, &g) in gamma.iter().enumerate() {
        if g == 0.0 || Some(j) == skip {
            continue;
        }
        for r in 0..m {
            for s in 0..m {
                c[(r, s)] += a[(r, j)] * a[(s, j)].conj() * g;
            }
        }
    }
    c
}

fn quad_form(x: &[C64], m: &ComplexMatrix<f64>, y: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..x.len() {
        for s in 0..y.len() {
            acc += x[r].conj() * m[(r, s)] * y[s];
        }
    }
    acc
}

/// `s_i = phi_i^H C_{-i}^-1 phi_i`, `q_i = phi_i^H C_{-i}^-1 y` built from
/// explicit leave-one-out covariances.
pub fn dense_sq(
    a: &ComplexMatrix<f64>,
    y: &[C64],
    beta: f64,
    gamma: &[f64],
) -> (Vec<C64>, Vec<C64>) {
    let mut s = Vec::new();
    let mut q = Vec::new();
    for i in 0..a.cols() {
        let cinv = dense_inverse(&dense_c(a, beta, gamma, Some(i)));
        let phi = a.column(i);
        s.push(quad_form(&phi, &cinv, &phi));
        q.push(quad_form(&phi, &cinv, y));
    }
    (s, q)
}

/// `Sigma = (beta A_a^H A_a + Lambda^-1)^-1`, `mu = beta Sigma A_a^H y`.
pub fn dense_posterior(
    a: &ComplexMatrix<f64>,
    y: &[C64],
    beta: f64,
    active: &[usize],
    gamma: &[f64],
) -> (Vec<C64>, ComplexMatrix<f64>) {
    let m = active.len();
    let mut prec = ComplexMatrix::zeros(m, m);
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..a.rows() {
                acc += a[(k, i)].conj() * a[(k, j)];
            }
            prec[(r, c)] = acc * beta;
        }
        prec[(r, r)] += C64::new(1.0 / gamma[i], 0.0);
    }
    let sigma = dense_inverse(&prec);
    let rhs: Vec<C64> = active
        .iter()
        .map(|&i| (0..a.rows()).map(|k| a[(k, i)].conj() * y[k]).sum::<C64>() * beta)
        .collect();
    let mu = (0..m)
        .map(|r| (0..m).map(|c| sigma[(r, c)] * rhs[c]).sum())
        .collect();
    (mu, sigma)
}

/// Log-determinant by Gaussian elimination (real part).
pub fn dense_log_det(a: &ComplexMatrix<f64>) -> f64 {
    let n = a.rows();
    let mut w: Vec<Vec<C64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut acc = 0.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| w[i][k].norm().partial_cmp(&w[j][k].norm()).unwrap())
            .unwrap();
        w.swap(k, p);
        let piv = w[k][k];
        acc += piv.norm().ln();
        for i in k + 1..n {
            let f = w[i][k] / piv;
            let pivot_row = w[k].clone();
            for (v, pv) in w[i].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
    acc
}

/// `1/2 [ -ln|C| - y^H C^-1 y - lambda sum(gamma) ]`.
pub fn dense_log_marginal(
    a: &ComplexMatrix<f64>,
    y: &[C64],
    beta: f64,
    gamma: &[f64],
    lambda: f64,
) -> f64 {
    let c = dense_c(a, beta, gamma, None);
    let cinv = dense_inverse(&c);
    let quad = quad_form(y, &cinv, y).re;
    0.5 * (-dense_log_det(&c) - quad - lambda * gamma.iter().sum::<f64>())
}
