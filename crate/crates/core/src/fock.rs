//! Truncated Fock-space representation of the single field mode.
//!
//! A [`FieldVector`] holds amplitudes over `|0>..|n_max>`. Coherent states are
//! built in the log domain so that truncations far beyond `n = 170` do not
//! overflow the factorial.

use num_complex::Complex64 as C64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest coherent-state weight allowed outside the truncated basis.
pub const MAX_TAIL_MASS: f64 = 1e-8;

/// Relative squared weight allowed in the last three Fock levels before the
/// tridiagonal propagator is considered to leak through the cutoff.
pub const BOUNDARY_WEIGHT_LIMIT: f64 = 1e-10;

/// Number of levels below the cutoff checked by [`check_boundary`].
pub const BOUNDARY_BAND: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct FieldVector {
    amps: Vec<C64>,
    tail_mass: f64,
}

impl FieldVector {
    /// Wraps raw amplitudes. The vector must be non-empty.
    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter("field vector needs at least |0>".into()));
        }
        Ok(Self { amps, tail_mass: 0.0 })
    }

    pub fn zeros(n_max: usize) -> Self {
        Self { amps: vec![C64::new(0.0, 0.0); n_max + 1], tail_mass: 0.0 }
    }

    /// Fock state `|n>` in a basis truncated at `n_max`.
    pub fn number_state(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::InvalidParameter(format!("|{n}> lies above n_max = {n_max}")));
        }
        let mut v = Self::zeros(n_max);
        v.amps[n] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub(crate) fn with_tail_mass(mut self, tail_mass: f64) -> Self {
        self.tail_mass = tail_mass;
        self
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    /// Weight that the source state had beyond `n_max`; zero unless the vector
    /// was produced by truncating an infinite expansion.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { amps: self.amps.iter().map(|a| a * s).collect(), tail_mass: self.tail_mass }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: C64, other: &FieldVector) -> Result<Self> {
        same_truncation(self, other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(x, y)| x + s * y).collect();
        Ok(Self { amps, tail_mass: self.tail_mass })
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &FieldVector) -> Result<f64> {
        same_truncation(self, other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
    }

    /// Largest per-component difference `max_n |self[n] - other[n]|`.
    pub fn max_abs_diff(&self, other: &FieldVector) -> Result<f64> {
        same_truncation(self, other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
    }
}

impl std::ops::Index<usize> for FieldVector {
    type Output = C64;

    fn index(&self, n: usize) -> &C64 {
        &self.amps[n]
    }
}

fn same_truncation(u: &FieldVector, v: &FieldVector) -> Result<()> {
    if u.n_max() != v.n_max() {
        return Err(Error::TruncationMismatch { left: u.n_max(), right: v.n_max() });
    }
    Ok(())
}

/// `<u|v> = sum_n conj(u[n]) v[n]`.
pub fn inner(u: &FieldVector, v: &FieldVector) -> Result<C64> {
    same_truncation(u, v)?;
    Ok(u.amps.iter().zip(&v.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Default cutoff `ceil(nbar + 10 sqrt(nbar) + 10)`.
pub fn default_n_max(nbar: f64) -> usize {
    (nbar + 10.0 * nbar.sqrt() + 10.0).ceil() as usize
}

/// Coherent state `|nu>` with `nu = sqrt(nbar) e^{-i phi}`.
pub fn coherent(nbar: f64, phi: f64, n_max: usize) -> Result<FieldVector> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidParameter(format!("nbar must be >= 0, got {nbar}")));
    }
    coherent_from_amplitude(C64::from_polar(nbar.sqrt(), -phi), n_max)
}

/// Coherent state for an arbitrary complex amplitude `nu`:
/// `c_n = e^{-|nu|^2/2} nu^n / sqrt(n!)`, truncated at `n_max`.
pub fn coherent_from_amplitude(nu: C64, n_max: usize) -> Result<FieldVector> {
    let r2 = nu.norm_sqr();
    let arg = nu.arg();
    let mut amps = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let c = if r2 == 0.0 {
            if n == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        } else {
            let nf = n as f64;
            let log_mag = 0.5 * (nf * r2.ln() - r2 - ln_gamma(nf + 1.0));
            C64::from_polar(log_mag.exp(), nf * arg)
        };
        amps.push(c);
    }
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let tail_mass = (1.0 - kept).max(0.0);
    if tail_mass > MAX_TAIL_MASS {
        return Err(Error::TruncationTooSmall { n_max, tail_mass, limit: MAX_TAIL_MASS });
    }
    Ok(FieldVector { amps, tail_mass })
}

/// Rejects vectors whose weight in the top [`BOUNDARY_BAND`] levels exceeds
/// [`BOUNDARY_WEIGHT_LIMIT`] relative to the largest component weight.
pub fn check_boundary(v: &FieldVector) -> Result<()> {
    let peak = v.amps.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let n_max = v.n_max();
    let start = n_max.saturating_sub(BOUNDARY_BAND - 1);
    for n in start..=n_max {
        let weight = v.amps[n].norm_sqr() / peak;
        if weight > BOUNDARY_WEIGHT_LIMIT {
            return Err(Error::BoundaryLeakage { index: n, n_max, weight });
        }
    }
    Ok(())
}

/// Physical and numerical parameters of a run. Times are dimensionless,
/// `t' = g t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub g: f64,
    pub nbar: f64,
    pub phi: f64,
    pub n_max: usize,
    pub t_prime_grid: Vec<f64>,
}

impl SimConfig {
    pub fn new(g: f64, nbar: f64, phi: f64, n_max: usize, t_prime_grid: Vec<f64>) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::InvalidParameter(format!("g must be real and > 0, got {g}")));
        }
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::InvalidParameter(format!("nbar must be >= 0, got {nbar}")));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter("phi must be finite".into()));
        }
        let min_n_max = nbar + 8.0 * nbar.sqrt();
        if (n_max as f64) < min_n_max {
            return Err(Error::InvalidParameter(format!(
                "n_max = {n_max} below nbar + 8 sqrt(nbar) = {min_n_max:.2}"
            )));
        }
        if t_prime_grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::InvalidParameter("time grid must be finite and >= 0".into()));
        }
        if t_prime_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("time grid must be strictly increasing".into()));
        }
        Ok(Self { g, nbar, phi, n_max, t_prime_grid })
    }

    /// Configuration with the default cutoff and the given grid.
    pub fn with_default_truncation(nbar: f64, phi: f64, t_prime_grid: Vec<f64>) -> Result<Self> {
        Self::new(1.0, nbar, phi, default_n_max(nbar), t_prime_grid)
    }

    /// `nu = sqrt(nbar) e^{-i phi}`.
    pub fn nu(&self) -> C64 {
        C64::from_polar(self.nbar.sqrt(), -self.phi)
    }

    pub fn coherent(&self) -> Result<FieldVector> {
        coherent(self.nbar, self.phi, self.n_max)
    }
}

/// `steps + 1` equally spaced points on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![0.0];
    }
    (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect()
}
