//! Brute-force RK4 integration of the interaction-picture Schrödinger
//! equation on the truncated space `{|a,n>, |b,n>}`.
//!
//! In the `{|a>, |b>}` basis the interaction Hamiltonian is
//!
//! ```text
//! H(t) = g [ e^{ i(ω+Δ)t} M+ a† + e^{ i(ω-Δ)t} M- a†
//!          + e^{-i(ω-Δ)t} M+ a  + e^{-i(ω+Δ)t} M- a  ]
//! ```
//!
//! with `M+ = ½[[1,1],[-1,-1]]` and `M- = M+†`. The rotating-wave variant drops
//! the two `ω+Δ` terms. Time is measured in `t' = g t`.

use num_complex::Complex64 as C64;

use crate::dynamics::{evolve_product, JointState, QubitState};
use crate::error::{Error, Result};
use crate::fock::{check_boundary, FieldVector};

pub const MAX_HALVINGS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub g: f64,
    pub delta0: f64,
    pub omega: f64,
    pub rwa: bool,
    /// Initial RK4 step in `t'`.
    pub step_dt_prime: f64,
    /// Accepted max amplitude change between a step and its half.
    pub tolerance: f64,
}

impl OracleConfig {
    /// Resonant configuration (`delta0 = omega`) with a step resolving the
    /// fastest oscillation of the chosen generator.
    pub fn resonant(g: f64, omega: f64, rwa: bool) -> Result<Self> {
        let step = if rwa { 1e-3 } else { (0.02 * g / (2.0 * omega)).min(1e-3) };
        OracleConfig { g, delta0: omega, omega, rwa, step_dt_prime: step, tolerance: 1e-8 }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.g > 0.0 && self.g.is_finite()) {
            return bad(format!("g must be positive, got {}", self.g));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        if (self.delta0 - self.omega).abs() > 1e-12 * self.omega {
            return bad(format!("off resonance: delta0 = {} but omega = {}", self.delta0, self.omega));
        }
        if !(self.step_dt_prime > 0.0 && self.step_dt_prime.is_finite()) {
            return bad(format!("step must be positive, got {}", self.step_dt_prime));
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        Ok(self)
    }
}

/// Integrated states at the requested times plus run statistics.
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub states: Vec<JointState>,
    /// Largest `| ||psi||^2 - ||psi_0||^2 |` over the returned states.
    pub norm_drift: f64,
    /// Step of the accepted run.
    pub step: f64,
    pub halvings: u32,
}

struct Generator {
    n_max: usize,
    sqrt_n: Vec<f64>,
    sum_rate: f64,
    diff_rate: f64,
    rwa: bool,
}

impl Generator {
    fn new(cfg: &OracleConfig, n_max: usize) -> Self {
        Generator {
            n_max,
            sqrt_n: (0..=n_max + 1).map(|n| (n as f64).sqrt()).collect(),
            sum_rate: (cfg.omega + cfg.delta0) / cfg.g,
            diff_rate: (cfg.omega - cfg.delta0) / cfg.g,
            rwa: cfg.rwa,
        }
    }

    /// `out = -i H(t') psi`, `psi = (A, B)` concatenated.
    fn rhs(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        let m = self.n_max + 1;
        let (a, b) = psi.split_at(m);
        let e_sum_up = if self.rwa { C64::new(0.0, 0.0) } else { C64::from_polar(1.0, self.sum_rate * t) };
        let e_diff_up = C64::from_polar(1.0, self.diff_rate * t);
        // h_a, h_b: the a and b rows of H psi
        for n in 0..m {
            let (s_lo, d_lo) = if n > 0 { (a[n - 1] + b[n - 1], a[n - 1] - b[n - 1]) } else { Default::default() };
            let (s_hi, d_hi) = if n + 1 < m { (a[n + 1] + b[n + 1], a[n + 1] - b[n + 1]) } else { Default::default() };
            let raise_s = s_lo * self.sqrt_n[n];
            let raise_d = d_lo * self.sqrt_n[n];
            let lower_s = s_hi * self.sqrt_n[n + 1];
            let lower_d = d_hi * self.sqrt_n[n + 1];
            // M+ X: (+X S/2, -X S/2); M- X: (+X D/2, +X D/2)
            let plus = e_sum_up * raise_s + e_diff_up.conj() * lower_s;
            let minus = e_diff_up * raise_d + e_sum_up.conj() * lower_d;
            let h_a = 0.5 * (plus + minus);
            let h_b = 0.5 * (minus - plus);
            out[n] = C64::new(h_a.im, -h_a.re);
            out[m + n] = C64::new(h_b.im, -h_b.re);
        }
    }

    fn rk4_step(&self, t: f64, h: f64, psi: &mut [C64], work: &mut [Vec<C64>; 5]) {
        let [k1, k2, k3, k4, tmp] = work;
        self.rhs(t, psi, k1);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k1[i] * (0.5 * h);
        }
        self.rhs(t + 0.5 * h, tmp, k2);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k2[i] * (0.5 * h);
        }
        self.rhs(t + 0.5 * h, tmp, k3);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k3[i] * h;
        }
        self.rhs(t + h, tmp, k4);
        for i in 0..psi.len() {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
}

fn run_fixed(gen: &Generator, psi0: &[C64], t_grid: &[f64], h: f64) -> Vec<Vec<C64>> {
    let len = psi0.len();
    let mut work: [Vec<C64>; 5] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); len]);
    let mut psi = psi0.to_vec();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        let span = target - t;
        if span > 0.0 {
            // substeps land exactly on the grid point
            let steps = (span / h).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for k in 0..steps {
                gen.rk4_step(t + k as f64 * dt, dt, &mut psi, &mut work);
            }
            t = target;
        }
        out.push(psi.clone());
    }
    out
}

fn max_diff(x: &[Vec<C64>], y: &[Vec<C64>]) -> f64 {
    x.iter()
        .zip(y)
        .flat_map(|(u, v)| u.iter().zip(v).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

/// Integrates `(alpha|a> + beta|b>) ⊗ field` to each `t'` in `t_grid`
/// (non-decreasing, starting at or after 0).
///
/// The step is halved until two successive runs agree to `tolerance` in every
/// amplitude; the finer run is returned.
pub fn integrate(cfg: &OracleConfig, q: &QubitState, field: &FieldVector, t_grid: &[f64]) -> Result<OracleRun> {
    let cfg = cfg.validated()?;
    check_boundary(field)?;
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("oracle grid must be finite, non-negative and non-decreasing".into()));
    }
    let n_max = field.n_max();
    let gen = Generator::new(&cfg, n_max);
    let start = JointState::product(q, field);
    let psi0: Vec<C64> = start.a.amps().iter().chain(start.b.amps()).copied().collect();

    let mut h = cfg.step_dt_prime;
    let mut coarse = run_fixed(&gen, &psi0, t_grid, h);
    let mut halvings = 0;
    let fine = loop {
        h *= 0.5;
        halvings += 1;
        let fine = run_fixed(&gen, &psi0, t_grid, h);
        let diff = max_diff(&coarse, &fine);
        if diff < cfg.tolerance {
            break fine;
        }
        if halvings >= MAX_HALVINGS {
            return Err(Error::IntegratorFailure { halvings, difference: diff, tolerance: cfg.tolerance });
        }
        coarse = fine;
    };

    let n0 = start.norm_sqr();
    let tail = field.tail_mass();
    let mut norm_drift: f64 = 0.0;
    let mut states = Vec::with_capacity(fine.len());
    for (psi, &t) in fine.into_iter().zip(t_grid) {
        let (a, b) = psi.split_at(n_max + 1);
        let j = JointState {
            a: FieldVector::from_amps(a.to_vec())?.with_tail_mass(tail),
            b: FieldVector::from_amps(b.to_vec())?.with_tail_mass(tail),
            t_prime: t,
            leakage: 0.0,
        };
        norm_drift = norm_drift.max((j.norm_sqr() - n0).abs());
        states.push(j);
    }
    Ok(OracleRun { states, norm_drift, step: h, halvings })
}

/// `|| psi_full(t') - psi_rwa(t') ||`, with the RWA side from the analytic
/// propagator. Requires `cfg.rwa == false`.
pub fn rwa_error(cfg: &OracleConfig, q: &QubitState, field: &FieldVector, t_prime: f64) -> Result<f64> {
    if cfg.rwa {
        return Err(Error::InvalidParameter("rwa_error needs the full generator (rwa = false)".into()));
    }
    let run = integrate(cfg, q, field, &[t_prime])?;
    let full = &run.states[0];
    let exact = evolve_product(q, field, t_prime)?;
    let da = full.a.distance(&exact.a)?;
    let db = full.b.distance(&exact.b)?;
    Ok((da * da + db * db).sqrt())
}

/// Largest amplitude difference between oracle and analytic states.
pub fn max_amplitude_difference(run: &OracleRun, q: &QubitState, field: &FieldVector) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in &run.states {
        let e = evolve_product(q, field, s.t_prime)?;
        worst = worst.max(s.a.max_abs_diff(&e.a)?).max(s.b.max_abs_diff(&e.b)?);
    }
    Ok(worst)
}
