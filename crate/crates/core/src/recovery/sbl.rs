//! Fast marginal-likelihood sparse Bayesian learning for complex-valued
//! linear models `y = A w + n`.
//!
//! The hierarchy is `w_i ~ CN(0, gamma_i)`, `gamma_i ~ Gamma(1, lambda/2)`,
//! with noise precision `beta`. The solver keeps the posterior restricted to
//! the active set (`Sigma`, `mu`) together with the whole-dictionary
//! statistics
//!
//! ```text
//! S_i = beta |phi_i|^2 - beta^2 phi_i^H Phi_a Sigma Phi_a^H phi_i
//! Q_i = beta phi_i^H y  - beta^2 phi_i^H Phi_a Sigma Phi_a^H y
//! ```
//!
//! which are `phi_i^H C^-1 phi_i` and `phi_i^H C^-1 y` for
//! `C = beta^-1 I + A Lambda A^H` by the Woodbury identity. Each action
//! (add, re-estimate, delete) is a rank-one change of `Sigma^-1`, so `Sigma`,
//! `mu`, `S` and `Q` are updated in `O(MN + m^2)` without touching `C`.

use std::time::{Duration, Instant};

use num_complex::Complex;
use num_traits::Zero;

use super::gamma::{evidence_term, gamma_update};
use crate::numerics::{dot, norm2_sqr, Cholesky, ComplexMatrix, Real};
use crate::{Error, Result};

/// How the Laplace rate `lambda` is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaMode<T> {
    Fixed(T),
    /// `lambda = (N - 1 + nu/2) / (sum(gamma)/2 + nu/2)` after every action.
    Auto,
}

/// How the noise precision `beta` is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaMode<T> {
    Fixed(T),
    /// `beta = M / |y - A mu|^2` after every action.
    Estimate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SblConfig<T> {
    pub lambda: LambdaMode<T>,
    /// Shape of the Gamma(nu/2, nu/2) hyperprior on `lambda`. Only enters the
    /// `Auto` lambda update; it is never re-estimated.
    pub nu: T,
    pub beta: BetaMode<T>,
    pub max_iterations: usize,
    /// Convergence when the best available evidence gain drops below this.
    pub tolerance: T,
}

impl<T: Real> Default for SblConfig<T> {
    fn default() -> Self {
        Self {
            lambda: LambdaMode::Auto,
            nu: T::zero(),
            beta: BetaMode::Estimate,
            max_iterations: 1000,
            tolerance: T::lit(1e-8),
        }
    }
}

impl<T: Real> SblConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if let LambdaMode::Fixed(l) = self.lambda {
            if !(l >= T::zero()) || !l.is_finite() {
                return Err(Error::Domain(format!("lambda must be >= 0, got {l}")));
            }
        }
        if let BetaMode::Fixed(b) = self.beta {
            if !(b > T::zero()) || !b.is_finite() {
                return Err(Error::Domain(format!("fixed beta must be > 0, got {b}")));
            }
        }
        if !(self.nu >= T::zero()) {
            return Err(Error::Domain(format!("nu must be >= 0, got {}", self.nu)));
        }
        if !(self.tolerance > T::zero()) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionKind {
    Add,
    Reestimate,
    Delete,
}

impl ActionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Add => "add",
            ActionKind::Reestimate => "reestimate",
            ActionKind::Delete => "delete",
        }
    }
}

/// One accepted action of the fast loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    pub action: ActionKind,
    pub index: usize,
    pub delta_l: T,
    pub active_size: usize,
}

/// Snapshot of the posterior over the active set.
#[derive(Clone, Debug, PartialEq)]
pub struct Posterior<T> {
    /// Active dictionary indices, in the order used by `mu` and `sigma`.
    pub active: Vec<usize>,
    pub mu: Vec<Complex<T>>,
    pub sigma: ComplexMatrix<T>,
    /// Length `N`, zero off the active set.
    pub gamma: Vec<T>,
    /// Leave-one-out statistics `s_i`, `q_i` for every column.
    pub s: Vec<T>,
    pub q: Vec<Complex<T>>,
    pub beta: T,
    pub lambda: T,
    /// `1/2 [ -ln|C| - y^H C^-1 y - lambda sum(gamma) ]`, constants dropped.
    pub log_marginal: T,
}

#[derive(Clone, Debug)]
pub struct RecoveryResult<T> {
    pub estimate: Vec<Complex<T>>,
    pub posterior: Posterior<T>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time: Duration,
    pub history: Vec<IterationRecord<T>>,
}

impl<T: Real> RecoveryResult<T> {
    /// `iteration,action,index,delta_l,active_size` rows.
    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::from("iteration,action,index,delta_l,active_size\n");
        for r in &self.history {
            out.push_str(&format!(
                "{},{},{},{:.16e},{}\n",
                r.iteration,
                r.action.as_str(),
                r.index,
                r.delta_l.to_f64_lossy(),
                r.active_size
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate<T> {
    index: usize,
    kind: ActionKind,
    gamma: T,
    gain: T,
}

/// Incremental fast-SBL state. [`sbl_recover`] drives it to convergence;
/// tests can also step it one action at a time.
pub struct SblSolver<'a, T: Real> {
    a: &'a ComplexMatrix<T>,
    y: &'a [Complex<T>],
    config: SblConfig<T>,
    beta: T,
    lambda: T,
    y_norm2: T,
    col_norm2: Vec<T>,
    phi_h_y: Vec<Complex<T>>,
    eligible: Vec<bool>,
    active: Vec<usize>,
    active_cols: Vec<Vec<Complex<T>>>,
    gamma: Vec<T>,
    sigma: ComplexMatrix<T>,
    mu: Vec<Complex<T>>,
    big_s: Vec<T>,
    big_q: Vec<Complex<T>>,
    log_marginal: T,
    iteration: usize,
    history: Vec<IterationRecord<T>>,
    last_gain: Option<T>,
}

impl<'a, T: Real> SblSolver<'a, T> {
    pub fn new(a: &'a ComplexMatrix<T>, y: &'a [Complex<T>], config: SblConfig<T>) -> Result<Self> {
        config.validate()?;
        let (m, n) = (a.rows(), a.cols());
        if m == 0 || n == 0 {
            return Err(Error::Domain(format!("empty dictionary ({m}x{n})")));
        }
        if y.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "data has length {} but the matrix has {m} rows",
                y.len()
            )));
        }
        if !a.is_finite() || y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("non-finite matrix or data".into()));
        }

        let mut col_norm2 = vec![T::zero(); n];
        for i in 0..m {
            for (c, z) in col_norm2.iter_mut().zip(a.row(i)) {
                *c += z.norm_sqr();
            }
        }
        let max_norm = col_norm2.iter().fold(T::zero(), |acc, &v| acc.max(v)).sqrt();
        let floor = T::lit(1e-12) * max_norm;
        let eligible = col_norm2.iter().map(|&c| c.sqrt() >= floor && c > T::zero()).collect();
        let phi_h_y = a.adjoint_mul_vec(y)?;
        let y_norm2 = norm2_sqr(y);

        let beta = match config.beta {
            BetaMode::Fixed(b) => b,
            // start from a 10% noise-power guess
            BetaMode::Estimate if y_norm2 > T::zero() => {
                T::lit(10.0) * T::from_usize(m).unwrap() / y_norm2
            }
            BetaMode::Estimate => T::one(),
        };
        let lambda = match config.lambda {
            LambdaMode::Fixed(l) => l,
            LambdaMode::Auto => T::zero(),
        };

        let mut solver = Self {
            a,
            y,
            config,
            beta,
            lambda,
            y_norm2,
            col_norm2,
            phi_h_y,
            eligible,
            active: Vec::new(),
            active_cols: Vec::new(),
            gamma: vec![T::zero(); n],
            sigma: ComplexMatrix::zeros(0, 0),
            mu: Vec::new(),
            big_s: Vec::new(),
            big_q: Vec::new(),
            log_marginal: T::zero(),
            iteration: 0,
            history: Vec::new(),
            last_gain: None,
        };
        solver.refresh()?;
        Ok(solver)
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn history(&self) -> &[IterationRecord<T>] {
        &self.history
    }

    /// Leave-one-out `(s_i, q_i)` for every column, derived from the
    /// whole-dictionary `S_i`, `Q_i`: for active `i`,
    /// `s_i = S_i / (1 - gamma_i S_i)` and likewise for `q_i`.
    pub fn sq(&self) -> Result<(Vec<T>, Vec<Complex<T>>)> {
        let n = self.a.cols();
        let mut s = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        for i in 0..n {
            let (si, qi) = self.sq_at(i);
            if self.eligible[i] && (!(si > T::zero()) || !si.is_finite()) {
                return Err(Error::Consistency(format!(
                    "leave-one-out statistic s_{i} = {si} is not positive"
                )));
            }
            s.push(si);
            q.push(qi);
        }
        Ok((s, q))
    }

    #[inline]
    fn sq_at(&self, i: usize) -> (T, Complex<T>) {
        let g = self.gamma[i];
        if g > T::zero() {
            let shrink = T::one() - g * self.big_s[i];
            if shrink < T::lit(0.5) {
                // 1 - gamma S = 1 / (1 + gamma s) cancels badly when gamma s
                // is large; read s, q off Sigma_ii = 1/(1/gamma + s) and
                // mu_i = Sigma_ii q instead
                let k = self.position(i);
                let sigma_kk = self.sigma[(k, k)].re;
                return (T::one() / sigma_kk - T::one() / g, self.mu[k] / sigma_kk);
            }
            let scale = T::one() / shrink;
            (self.big_s[i] * scale, self.big_q[i] * scale)
        } else {
            (self.big_s[i], self.big_q[i])
        }
    }

    pub fn posterior(&self) -> Result<Posterior<T>> {
        let (s, q) = self.sq()?;
        Ok(Posterior {
            active: self.active.clone(),
            mu: self.mu.clone(),
            sigma: self.sigma.clone(),
            gamma: self.gamma.clone(),
            s,
            q,
            beta: self.beta,
            lambda: self.lambda,
            log_marginal: self.log_marginal,
        })
    }

    /// Full-length posterior mean.
    pub fn estimate(&self) -> Vec<Complex<T>> {
        let mut x = vec![Complex::zero(); self.a.cols()];
        for (&i, &m) in self.active.iter().zip(&self.mu) {
            x[i] = m;
        }
        x
    }

    /// Rebuilds `Sigma`, `mu`, `S`, `Q` and the evidence from scratch for the
    /// current active set and hyperparameters.
    pub fn refresh(&mut self) -> Result<()> {
        let n = self.a.cols();
        let m_act = self.active.len();
        let beta = self.beta;

        // G[k][j] = phi_{a_k}^H phi_j
        let mut gram = Vec::with_capacity(m_act);
        for col in &self.active_cols {
            let v = self.a.adjoint_mul_vec(col)?;
            gram.push(v.into_iter().map(|z| z.conj()).collect::<Vec<_>>());
        }

        let mut log_det_c = -T::from_usize(self.a.rows()).unwrap() * beta.ln();
        let mut quad = beta * self.y_norm2;
        if m_act == 0 {
            self.sigma = ComplexMatrix::zeros(0, 0);
            self.mu.clear();
        } else {
            let mut sigma_inv = ComplexMatrix::from_fn(m_act, m_act, |r, c| {
                gram[r][self.active[c]] * beta
            });
            for (k, &i) in self.active.iter().enumerate() {
                sigma_inv[(k, k)] = Complex::new(sigma_inv[(k, k)].re + T::one() / self.gamma[i], T::zero());
            }
            let chol = Cholesky::new_unchecked(&sigma_inv)?;
            self.sigma = chol.inverse();
            let rhs: Vec<Complex<T>> = self.active.iter().map(|&i| self.phi_h_y[i] * beta).collect();
            self.mu = chol.solve_vec(&rhs)?;
            // ln|C| = -M ln beta + sum ln gamma + ln|Sigma^-1|
            log_det_c += self.active.iter().map(|&i| self.gamma[i].ln()).sum::<T>() + chol.log_det();
            quad -= dot(&rhs, &self.mu).re;
        }
        self.log_marginal = T::lit(0.5)
            * (-log_det_c - quad - self.lambda * self.gamma.iter().copied().sum::<T>());

        self.big_s = (0..n).map(|j| beta * self.col_norm2[j]).collect();
        self.big_q = self.phi_h_y.iter().map(|&z| z * beta).collect();
        if m_act > 0 {
            let b2 = beta * beta;
            for j in 0..n {
                let g: Vec<Complex<T>> = (0..m_act).map(|k| gram[k][j]).collect();
                // g^H Sigma g with g_k = phi_{a_k}^H phi_j
                let mut quad_j = T::zero();
                for r in 0..m_act {
                    let mut acc = Complex::zero();
                    for c in 0..m_act {
                        acc += self.sigma[(r, c)] * g[c];
                    }
                    quad_j += (g[r].conj() * acc).re;
                }
                self.big_s[j] -= b2 * quad_j;
                // phi_j^H Phi_a mu = sum_k conj(g_k) mu_k
                let proj = g
                    .iter()
                    .zip(&self.mu)
                    .fold(Complex::zero(), |acc, (gk, mk)| acc + gk.conj() * mk);
                self.big_q[j] -= proj * beta;
            }
        }
        Ok(())
    }

    fn best_candidate(&self) -> Option<Candidate<T>> {
        let mut best: Option<Candidate<T>> = None;
        for i in 0..self.a.cols() {
            if !self.eligible[i] {
                continue;
            }
            let (s, q) = self.sq_at(i);
            if !(s > T::zero()) {
                continue;
            }
            let q2 = q.norm_sqr();
            let new_gamma = match gamma_update(s, q2, self.lambda) {
                Ok(g) => g,
                Err(_) => continue,
            };
            let old_gamma = self.gamma[i];
            let (kind, gain) = match (old_gamma > T::zero(), new_gamma > T::zero()) {
                (false, false) => continue,
                (false, true) => (ActionKind::Add, evidence_term(new_gamma, s, q2, self.lambda)),
                (true, true) => (
                    ActionKind::Reestimate,
                    evidence_term(new_gamma, s, q2, self.lambda)
                        - evidence_term(old_gamma, s, q2, self.lambda),
                ),
                (true, false) => (
                    ActionKind::Delete,
                    -evidence_term(old_gamma, s, q2, self.lambda),
                ),
            };
            if best.is_none_or(|b| gain > b.gain) {
                best = Some(Candidate {
                    index: i,
                    kind,
                    gamma: new_gamma,
                    gain,
                });
            }
        }
        best
    }

    /// Applies the single best action. Returns `None` once the best gain is
    /// below tolerance (converged).
    pub fn step(&mut self) -> Result<Option<IterationRecord<T>>> {
        let candidate = match self.best_candidate() {
            Some(c) if c.gain >= self.config.tolerance => c,
            other => {
                self.last_gain = Some(other.map_or(T::zero(), |c| c.gain));
                return Ok(None);
            }
        };
        match candidate.kind {
            ActionKind::Add => self.add(candidate.index, candidate.gamma)?,
            ActionKind::Reestimate => self.reestimate(candidate.index, candidate.gamma),
            ActionKind::Delete => self.delete(candidate.index),
        }
        self.log_marginal += candidate.gain;
        self.iteration += 1;
        self.last_gain = Some(candidate.gain);

        self.update_hyperparameters()?;

        let record = IterationRecord {
            iteration: self.iteration,
            action: candidate.kind,
            index: candidate.index,
            delta_l: candidate.gain,
            active_size: self.active.len(),
        };
        self.history.push(record);
        Ok(Some(record))
    }

    fn update_hyperparameters(&mut self) -> Result<()> {
        if self.config.lambda == LambdaMode::Auto {
            let sum_gamma: T = self.gamma.iter().copied().sum();
            let half = T::lit(0.5);
            let n = T::from_usize(self.a.cols()).unwrap();
            let denom = half * sum_gamma + half * self.config.nu;
            let new_lambda = if denom > T::zero() {
                (n - T::one() + half * self.config.nu) / denom
            } else {
                T::zero()
            };
            self.log_marginal -= half * (new_lambda - self.lambda) * sum_gamma;
            self.lambda = new_lambda;
        }
        if self.config.beta == BetaMode::Estimate {
            let m = T::from_usize(self.a.rows()).unwrap();
            let fit = self.a.mul_vec(&self.estimate())?;
            let resid: T = fit.iter().zip(self.y).map(|(f, y)| (y - f).norm_sqr()).sum();
            let ceiling = T::lit(1e8) * m / self.y_norm2;
            let new_beta = if resid > T::zero() { (m / resid).min(ceiling) } else { ceiling };
            if (new_beta - self.beta).abs() > T::lit(1e-12) * self.beta {
                self.beta = new_beta;
                self.refresh()?;
            }
        }
        Ok(())
    }

    fn column(&self, i: usize) -> Vec<Complex<T>> {
        self.a.column(i)
    }

    /// `Phi_a v` for an active-space vector `v`.
    fn active_combination(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::zero(); self.a.rows()];
        for (col, &c) in self.active_cols.iter().zip(v) {
            for (o, p) in out.iter_mut().zip(col) {
                *o += p * c;
            }
        }
        out
    }

    fn add(&mut self, i: usize, gamma: T) -> Result<()> {
        let phi = self.column(i);
        let m_act = self.active.len();
        let beta = self.beta;
        // w = beta Sigma Phi_a^H phi_i
        let proj: Vec<Complex<T>> = self.active_cols.iter().map(|c| dot(c, &phi)).collect();
        let w: Vec<Complex<T>> = (0..m_act)
            .map(|r| {
                (0..m_act).fold(Complex::zero(), |acc, c| acc + self.sigma[(r, c)] * proj[c]) * beta
            })
            .collect();
        let sigma_ii = gamma / (T::one() + gamma * self.big_s[i]);
        let mu_i = self.big_q[i] * sigma_ii;

        // e_j = beta phi_j^H (phi_i - Phi_a w)
        let pw = self.active_combination(&w);
        let v: Vec<Complex<T>> = phi.iter().zip(&pw).map(|(p, q)| p - q).collect();
        let e = self.a.adjoint_mul_vec(&v)?;
        for j in 0..self.a.cols() {
            let ej = e[j] * beta;
            self.big_s[j] -= sigma_ii * ej.norm_sqr();
            self.big_q[j] -= mu_i * ej;
        }

        let mut sigma = ComplexMatrix::zeros(m_act + 1, m_act + 1);
        for r in 0..m_act {
            for c in 0..m_act {
                sigma[(r, c)] = self.sigma[(r, c)] + w[r] * w[c].conj() * sigma_ii;
            }
            sigma[(r, m_act)] = -w[r] * sigma_ii;
            sigma[(m_act, r)] = -w[r].conj() * sigma_ii;
        }
        sigma[(m_act, m_act)] = Complex::new(sigma_ii, T::zero());
        self.sigma = sigma;
        for (mk, wk) in self.mu.iter_mut().zip(&w) {
            *mk -= wk * mu_i;
        }
        self.mu.push(mu_i);
        self.active.push(i);
        self.active_cols.push(phi);
        self.gamma[i] = gamma;
        Ok(())
    }

    /// Rank-one downdate shared by re-estimation (`kappa` finite) and
    /// deletion (`kappa = 1 / Sigma_kk`).
    fn rank_one_downdate(&mut self, k: usize, kappa: T) {
        let m_act = self.active.len();
        let sigma_k: Vec<Complex<T>> = (0..m_act).map(|r| self.sigma[(r, k)]).collect();
        let mu_k = self.mu[k];
        let v = self.active_combination(&sigma_k);
        let e = self.a.adjoint_mul_vec(&v).expect("active combination has M rows");
        let beta = self.beta;
        for j in 0..self.a.cols() {
            let ej = e[j] * beta;
            self.big_s[j] += kappa * ej.norm_sqr();
            self.big_q[j] += ej * mu_k * kappa;
        }
        for r in 0..m_act {
            for c in 0..m_act {
                let d = sigma_k[r] * sigma_k[c].conj() * kappa;
                self.sigma[(r, c)] -= d;
            }
            self.mu[r] -= sigma_k[r] * mu_k * kappa;
        }
        for r in 0..m_act {
            self.sigma[(r, r)].im = T::zero();
        }
    }

    fn position(&self, i: usize) -> usize {
        self.active
            .iter()
            .position(|&a| a == i)
            .expect("index is active")
    }

    fn reestimate(&mut self, i: usize, gamma: T) {
        let k = self.position(i);
        let old = self.gamma[i];
        let delta_alpha = T::one() / gamma - T::one() / old;
        if delta_alpha != T::zero() {
            let kappa = T::one() / (self.sigma[(k, k)].re + T::one() / delta_alpha);
            self.rank_one_downdate(k, kappa);
        }
        self.gamma[i] = gamma;
    }

    fn delete(&mut self, i: usize) {
        let k = self.position(i);
        let kappa = T::one() / self.sigma[(k, k)].re;
        self.rank_one_downdate(k, kappa);
        let m_act = self.active.len();
        self.sigma = ComplexMatrix::from_fn(m_act - 1, m_act - 1, |r, c| {
            let r = if r >= k { r + 1 } else { r };
            let c = if c >= k { c + 1 } else { c };
            self.sigma[(r, c)]
        });
        self.mu.remove(k);
        self.active.remove(k);
        self.active_cols.remove(k);
        self.gamma[i] = T::zero();
    }

    /// Runs to convergence or the iteration cap.
    pub fn run(mut self) -> Result<RecoveryResult<T>> {
        let start = Instant::now();
        let mut converged = false;
        while self.iteration < self.config.max_iterations {
            if self.step()?.is_none() {
                converged = true;
                break;
            }
        }
        if !converged {
            // a step that would not be taken also counts as convergence
            converged = self
                .best_candidate()
                .is_none_or(|c| c.gain < self.config.tolerance);
        }
        let posterior = self.posterior()?;
        let asymmetry = posterior.sigma.hermitian_asymmetry();
        if asymmetry > T::lit(1e-6) {
            return Err(Error::Consistency(format!(
                "posterior covariance lost Hermitian symmetry ({asymmetry})"
            )));
        }
        Ok(RecoveryResult {
            estimate: self.estimate(),
            posterior,
            iterations: self.iteration,
            converged,
            wall_time: start.elapsed(),
            history: self.history,
        })
    }
}

/// Complex fast sparse Bayesian recovery of `x` from `y = A x + n`.
/// Returns the posterior mean scattered to full length.
pub fn sbl_recover<T: Real>(
    a: &ComplexMatrix<T>,
    y: &[Complex<T>],
    config: &SblConfig<T>,
) -> Result<RecoveryResult<T>> {
    SblSolver::new(a, y, *config)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{complex_gaussian_sample, RngStream};

    type C = Complex<f64>;

    fn gaussian_matrix(m: usize, n: usize, seed: u64) -> ComplexMatrix<f64> {
        let mut rng = RngStream::new(seed, 0);
        ComplexMatrix::from_row_major(m, n, complex_gaussian_sample(&mut rng, m * n, 1.0 / m as f64).unwrap())
            .unwrap()
    }

    fn fixed(beta: f64, lambda: f64) -> SblConfig<f64> {
        SblConfig {
            lambda: LambdaMode::Fixed(lambda),
            nu: 0.0,
            beta: BetaMode::Fixed(beta),
            max_iterations: 1000,
            tolerance: 1e-8,
        }
    }

    #[test]
    fn zero_data_gives_zero_estimate() {
        let a = gaussian_matrix(8, 16, 1);
        let y = vec![C::new(0.0, 0.0); 8];
        for cfg in [fixed(100.0, 0.0), SblConfig::default()] {
            let r = sbl_recover(&a, &y, &cfg).unwrap();
            assert!(r.converged);
            assert!(r.posterior.active.is_empty());
            assert!(r.estimate.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn single_atom_is_recovered() {
        let a = gaussian_matrix(16, 32, 2);
        let y: Vec<C> = a.column(7).iter().map(|z| z * 2.0).collect();
        let r = sbl_recover(&a, &y, &fixed(1e10, 0.0)).unwrap();
        assert_eq!(r.posterior.active, vec![7]);
        assert!((r.estimate[7] - C::new(2.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn empty_active_set_statistics() {
        let a = gaussian_matrix(6, 10, 3);
        let mut rng = RngStream::new(3, 1);
        let y = complex_gaussian_sample(&mut rng, 6, 1.0).unwrap();
        let beta = 3.5;
        let solver = SblSolver::new(&a, &y, fixed(beta, 0.0)).unwrap();
        let (s, q) = solver.sq().unwrap();
        for i in 0..10 {
            let phi = a.column(i);
            assert!((s[i] - beta * norm2_sqr(&phi)).abs() < 1e-12);
            assert!((q[i] - dot(&phi, &y) * beta).norm() < 1e-12);
        }
    }

    #[test]
    fn incremental_matches_refresh() {
        let a = gaussian_matrix(12, 24, 4);
        let mut rng = RngStream::new(4, 1);
        let y = complex_gaussian_sample(&mut rng, 12, 1.0).unwrap();
        let mut solver = SblSolver::new(&a, &y, fixed(50.0, 0.1)).unwrap();
        for _ in 0..15 {
            if solver.step().unwrap().is_none() {
                break;
            }
        }
        let before = solver.posterior().unwrap();
        solver.refresh().unwrap();
        let after = solver.posterior().unwrap();
        for (p, q) in before.mu.iter().zip(&after.mu) {
            assert!((p - q).norm() < 1e-9);
        }
        for (p, q) in before.s.iter().zip(&after.s) {
            assert!((p - q).abs() < 1e-8 * q.abs().max(1.0));
        }
        assert!((before.log_marginal - after.log_marginal).abs() < 1e-8);
    }

    #[test]
    fn rejects_dimension_mismatch_and_bad_config() {
        let a = gaussian_matrix(4, 8, 5);
        let y = vec![C::new(1.0, 0.0); 5];
        assert!(sbl_recover(&a, &y, &fixed(1.0, 0.0)).is_err());
        let y = vec![C::new(1.0, 0.0); 4];
        assert!(sbl_recover(&a, &y, &fixed(-1.0, 0.0)).is_err());
        assert!(sbl_recover(&a, &y, &fixed(1.0, -1.0)).is_err());
        let mut y_nan = y.clone();
        y_nan[0] = C::new(f64::NAN, 0.0);
        assert!(sbl_recover(&a, &y_nan, &fixed(1.0, 0.0)).is_err());
    }

    #[test]
    fn degenerate_columns_never_enter() {
        let mut a = gaussian_matrix(8, 16, 6);
        for i in 0..8 {
            a[(i, 3)] = C::new(0.0, 0.0);
        }
        let y: Vec<C> = a.column(5).to_vec();
        let r = sbl_recover(&a, &y, &fixed(1e6, 0.0)).unwrap();
        assert!(!r.posterior.active.contains(&3));
    }

    #[test]
    fn diagnostics_csv_has_one_row_per_action() {
        let a = gaussian_matrix(8, 16, 7);
        let y: Vec<C> = a.column(2).to_vec();
        let r = sbl_recover(&a, &y, &fixed(1e4, 0.0)).unwrap();
        let csv = r.diagnostics_csv();
        assert_eq!(csv.lines().count(), r.history.len() + 1);
        assert!(csv.starts_with("iteration,action,index,delta_l,active_size"));
    }
}
