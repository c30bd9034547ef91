//! Exact evolution of product states `(alpha|a> + beta|b>) ⊗ |field>` and the
//! reduced qubit density matrix.
//!
//! Two independent routes are provided: the coefficient recursion
//! ([`evolve_product`] followed by [`reduce`]) and the closed sums over the
//! initial field amplitudes ([`rho_series`]).

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{check_boundary, inner, FieldVector, SimConfig};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Qubit amplitudes on `|a>` (upper) and `|b>` (lower).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    pub alpha: C64,
    pub beta: C64,
}

impl QubitState {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "qubit amplitudes have |alpha|^2 + |beta|^2 = {n}"
            )));
        }
        Ok(QubitState { alpha, beta })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(alpha: C64, beta: C64) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter("qubit amplitudes are zero or not finite".into()));
        }
        Ok(QubitState { alpha: alpha / n, beta: beta / n })
    }

    pub fn upper() -> Self {
        QubitState { alpha: C64::new(1.0, 0.0), beta: ZERO }
    }

    pub fn lower() -> Self {
        QubitState { alpha: ZERO, beta: C64::new(1.0, 0.0) }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QubitState) -> C64 {
        self.alpha.conj() * other.alpha + self.beta.conj() * other.beta
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }
}

/// `|psi> = |a> ⊗ A + |b> ⊗ B` at time `t_prime`.
#[derive(Clone, Debug)]
pub struct JointState {
    pub a: FieldVector,
    pub b: FieldVector,
    pub t_prime: f64,
    /// Accumulated squared amplitude pushed past the cutoff.
    pub leakage: f64,
}

impl JointState {
    pub fn product(q: &QubitState, field: &FieldVector) -> Self {
        JointState { a: field.scale(q.alpha), b: field.scale(q.beta), t_prime: 0.0, leakage: 0.0 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// Multiplies both branches by a global phase.
    pub fn with_phase(&self, phase: C64) -> Self {
        JointState { a: self.a.scale(phase), b: self.b.scale(phase), ..self.clone() }
    }
}

/// Reduced density matrix of the qubit in the `{|a>, |b>}` basis.
/// `rho22 = 1 - rho11`, `rho21 = conj(rho12)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2 {
    pub rho11: f64,
    pub rho12: C64,
}

impl DensityMatrix2 {
    pub fn rho22(&self) -> f64 {
        1.0 - self.rho11
    }

    /// `rho11 (1 - rho11) - |rho12|^2`, non-negative for a physical state.
    pub fn positivity_margin(&self) -> f64 {
        self.rho11 * (1.0 - self.rho11) - self.rho12.norm_sqr()
    }

    pub fn pure(q: &QubitState) -> Self {
        DensityMatrix2 { rho11: q.alpha.norm_sqr(), rho12: q.alpha * q.beta.conj() }
    }
}

/// Evolves a product state to `t_prime` with the closed-form coefficients
/// `c_{a,n}(t')`, `c_{b,n}(t')` (amplitudes beyond the cutoff are taken as 0).
pub fn evolve_product(q: &QubitState, field: &FieldVector, t_prime: f64) -> Result<JointState> {
    check_boundary(field)?;
    let c = field.amps();
    let n_max = field.n_max();
    let u = (q.alpha - q.beta) * 0.5;
    let w = (q.alpha + q.beta) * 0.5;
    // trig tables over sqrt(n), n = 0..=n_max+1
    let (sin, cos): (Vec<f64>, Vec<f64>) =
        (0..=n_max + 1).map(|n| (t_prime * (n as f64).sqrt()).sin_cos()).unzip();
    let at = |n: isize| if n < 0 || n as usize > n_max { ZERO } else { c[n as usize] };

    let mut a = Vec::with_capacity(n_max + 1);
    let mut b = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let k = n as isize;
        let lower = -I * u * at(k - 1) * sin[n];
        let upper = I * w * at(k + 1) * sin[n + 1];
        a.push(lower + c[n] * (w * cos[n] + u * cos[n + 1]) - upper);
        b.push(lower + c[n] * (w * cos[n] - u * cos[n + 1]) + upper);
    }
    // both branches would receive -i u c_{n_max} sin(t' sqrt(n_max+1)) at n_max+1
    let leak = 2.0 * (u * c[n_max] * sin[n_max + 1]).norm_sqr();
    let tail = field.tail_mass();
    Ok(JointState {
        a: FieldVector::from_amps(a)?.with_tail_mass(tail),
        b: FieldVector::from_amps(b)?.with_tail_mass(tail),
        t_prime,
        leakage: leak,
    })
}

/// Partial trace over the field: `rho11 = ||A||^2`, `rho12 = <B|A>`, both
/// divided by `||A||^2 + ||B||^2` so the truncated state has unit trace.
pub fn reduce(joint: &JointState) -> DensityMatrix2 {
    let na = joint.a.norm_sqr();
    let total = na + joint.b.norm_sqr();
    let rho12 = inner(&joint.b, &joint.a).expect("branches share a truncation");
    if total == 0.0 {
        return DensityMatrix2 { rho11: 0.0, rho12 };
    }
    DensityMatrix2 { rho11: na / total, rho12: rho12 / total }
}

/// The `gamma`, `delta`, `lambda` weights of the series representation.
pub fn series_weights(q: &QubitState) -> (f64, f64, C64) {
    let gamma = 0.25 * (q.alpha - q.beta).norm_sqr();
    let delta = 0.25 * (q.alpha + q.beta).norm_sqr();
    let lambda = (C64::from(q.alpha.norm_sqr() - q.beta.norm_sqr()) + q.alpha * q.beta.conj()
        - q.beta * q.alpha.conj())
        * 0.25;
    (gamma, delta, lambda)
}

/// Field sums `f0..f4` and `g0..g2` at `t_prime`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSums {
    pub f: [C64; 5],
    pub g0: f64,
    pub g1: f64,
    pub g2: C64,
}

pub fn series_sums(field: &FieldVector, t_prime: f64) -> SeriesSums {
    let c = field.amps();
    let n_max = field.n_max();
    let at = |n: isize| if n < 0 || n as usize > n_max { ZERO } else { c[n as usize] };
    let mut f = [ZERO; 5];
    let (mut g0, mut g1, mut g2) = (0.0, 0.0, ZERO);
    for n in 0..=n_max {
        let k = n as isize;
        let (cm, c0, cp) = (at(k - 1), c[n], at(k + 1));
        let (s0, k0) = (t_prime * (n as f64).sqrt()).sin_cos();
        let (s1, k1) = (t_prime * ((n + 1) as f64).sqrt()).sin_cos();

        f[0] += cm.norm_sqr() * s0 * s0 + I * (cm * c0.conj() + cm.conj() * c0) * (s0 * k1)
            - c0.norm_sqr() * k1 * k1;
        f[1] += c0.norm_sqr() * k0 * k0 - I * (c0 * cp.conj() + c0.conj() * cp) * (k0 * s1)
            - cp.norm_sqr() * s1 * s1;
        f[2] += -I * cm * c0.conj() * (s0 * k0) - cm * cp.conj() * (s0 * s1)
            - I * c0 * cp.conj() * (s1 * k1);
        f[3] += I * c0 * cm.conj() * (s0 * k0) + cp * cm.conj() * (s0 * s1)
            + I * cp * c0.conj() * (s1 * k1);
        f[4] += C64::from(c0.norm_sqr() * k0 * k1);

        g0 += cm.norm_sqr() * s0 * s0
            + (I * (c0 * cm.conj() - c0.conj() * cm)).re * s0 * k1
            + c0.norm_sqr() * k1 * k1;
        g1 += c0.norm_sqr() * k0 * k0
            + (I * (c0 * cp.conj() - c0.conj() * cp)).re * k0 * s1
            + cp.norm_sqr() * s1 * s1;
        g2 += -I * cm * c0.conj() * (s0 * k0) + cm * cp.conj() * (s0 * s1)
            + c0.norm_sqr() * k0 * k1
            + I * c0 * cp.conj() * (s1 * k1);
    }
    SeriesSums { f, g0, g1, g2 }
}

/// Reduced density matrix from the series representation over an explicit
/// initial field, normalized by the field's represented weight.
pub fn rho_series_field(q: &QubitState, field: &FieldVector, t_prime: f64) -> DensityMatrix2 {
    let (gamma, delta, lambda) = series_weights(q);
    let s = series_sums(field, t_prime);
    let rho12 = s.f[0] * gamma
        + s.f[1] * delta
        + lambda * s.f[2]
        + lambda.conj() * s.f[3]
        + (lambda - lambda.conj()) * s.f[4];
    let rho11 = gamma * s.g0 + delta * s.g1 + 2.0 * (lambda * s.g2).re;
    let total = field.norm_sqr();
    if total == 0.0 {
        return DensityMatrix2 { rho11, rho12 };
    }
    DensityMatrix2 { rho11: rho11 / total, rho12: rho12 / total }
}

/// Series representation for a coherent field built from `config`.
pub fn rho_series(q: &QubitState, config: &SimConfig, t_prime: f64) -> Result<DensityMatrix2> {
    let field = config.coherent()?;
    check_boundary(&field)?;
    Ok(rho_series_field(q, &field, t_prime))
}

/// `W = rho11 - rho22`.
pub fn population_inversion(q: &QubitState, config: &SimConfig, t_prime: f64) -> Result<f64> {
    Ok(2.0 * rho_series(q, config, t_prime)?.rho11 - 1.0)
}

/// Exact joint states over the configured grid, in grid order.
pub fn trajectory(q: &QubitState, config: &SimConfig) -> Result<Vec<JointState>> {
    let field = config.coherent()?;
    config.t_prime_grid.par_iter().map(|&t| evolve_product(q, &field, t)).collect()
}

/// Reduced density matrices over the configured grid, in grid order.
pub fn rho_trajectory(q: &QubitState, config: &SimConfig) -> Result<Vec<DensityMatrix2>> {
    let field = config.coherent()?;
    config
        .t_prime_grid
        .par_iter()
        .map(|&t| evolve_product(q, &field, t).map(|j| reduce(&j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent, uniform_grid};
    use crate::propagator::apply_propagator;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_qubit(rng: &mut ChaCha8Rng) -> QubitState {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        QubitState::normalized(C64::new(v[0], v[1]), C64::new(v[2], v[3])).unwrap()
    }

    fn fig_field() -> FieldVector {
        coherent(50.0, PI / 6.0, 150).unwrap()
    }

    #[test]
    fn qubit_validation() {
        assert!(QubitState::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).is_err());
        assert!(QubitState::normalized(ZERO, ZERO).is_err());
        let q = QubitState::normalized(C64::new(3.0, 0.0), C64::new(0.0, 4.0)).unwrap();
        assert!((q.norm_sqr() - 1.0).abs() < 1e-15);
        assert!((q.beta.im - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_time_is_product() {
        let field = fig_field();
        let q = QubitState::normalized(C64::new(0.2, -0.4), C64::new(0.9, 0.1)).unwrap();
        let j = evolve_product(&q, &field, 0.0).unwrap();
        assert!(j.a.max_abs_diff(&field.scale(q.alpha)).unwrap() < 1e-16);
        assert!(j.b.max_abs_diff(&field.scale(q.beta)).unwrap() < 1e-16);
    }

    #[test]
    fn matches_block_propagator() {
        let field = fig_field();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let q = random_qubit(&mut rng);
            let t = rng.gen_range(0.0..60.0);
            let direct = evolve_product(&q, &field, t).unwrap();
            let blocks = apply_propagator(&JointState::product(&q, &field), t).unwrap();
            assert!(direct.a.max_abs_diff(&blocks.a).unwrap() < 1e-14);
            assert!(direct.b.max_abs_diff(&blocks.b).unwrap() < 1e-14);
            assert!((direct.leakage - blocks.leakage).abs() < 1e-20);
        }
    }

    #[test]
    fn norm_preserved_for_random_draws() {
        let field = fig_field();
        let n0 = field.norm_sqr();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = random_qubit(&mut rng);
            let t = rng.gen_range(0.0..200.0);
            let j = evolve_product(&q, &field, t).unwrap();
            assert!((j.norm_sqr() - n0).abs() < 1e-9);
            assert!((j.norm_sqr() + field.tail_mass() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn reduce_examples() {
        let field = fig_field();
        let j = JointState::product(&QubitState::upper(), &field);
        let r = reduce(&j);
        assert_eq!(r.rho11, 1.0);
        assert_eq!(r.rho12, ZERO);

        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let j = JointState::product(&QubitState::new(h, h).unwrap(), &field);
        let r = reduce(&j);
        assert!((r.rho11 - 0.5).abs() < 1e-15);
        assert!((r.rho12 - 0.5).norm() < 1e-15);
    }

    #[test]
    fn series_at_zero_time() {
        let field = fig_field();
        let r = rho_series_field(&QubitState::upper(), &field, 0.0);
        assert_eq!(r.rho11, 1.0);
        assert!(r.rho12.norm() < 1e-15);
        let q = QubitState::normalized(C64::new(0.3, 0.5), C64::new(-0.2, 0.1)).unwrap();
        let r = rho_series_field(&q, &field, 0.0);
        assert!((r.rho12 - q.alpha * q.beta.conj()).norm() < 1e-15);
    }

    #[test]
    fn lambda_real_for_real_coherence() {
        let q = QubitState::normalized(C64::new(0.6, 0.0), C64::new(-0.8, 0.0)).unwrap();
        let (_, _, lambda) = series_weights(&q);
        assert_eq!(lambda.im, 0.0);
        let (g, d, l) = series_weights(&QubitState::upper());
        assert_eq!((g, d, l), (0.25, 0.25, C64::new(0.25, 0.0)));
    }

    #[test]
    fn two_paths_agree() {
        let field = fig_field();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = uniform_grid(200.0, 199);
        for _ in 0..3 {
            let q = random_qubit(&mut rng);
            for &t in &grid {
                let a = reduce(&evolve_product(&q, &field, t).unwrap());
                let b = rho_series_field(&q, &field, t);
                assert!((a.rho11 - b.rho11).abs() < 1e-10, "t' = {t}");
                assert!((a.rho12 - b.rho12).norm() < 1e-10, "t' = {t}");
            }
        }
    }

    #[test]
    fn inversion_endpoints() {
        let cfg = SimConfig::new(1.0, 50.0, PI / 6.0, 150, vec![0.0]).unwrap();
        let w_up = population_inversion(&QubitState::upper(), &cfg, 0.0).unwrap();
        let w_lo = population_inversion(&QubitState::lower(), &cfg, 0.0).unwrap();
        assert_eq!(w_up, 1.0);
        assert_eq!(w_lo, -1.0);
    }

    #[test]
    fn trajectory_keeps_grid_order() {
        let cfg = SimConfig::new(1.0, 20.0, 0.3, 80, uniform_grid(30.0, 40)).unwrap();
        let traj = trajectory(&QubitState::upper(), &cfg).unwrap();
        for (j, &t) in traj.iter().zip(&cfg.t_prime_grid) {
            assert_eq!(j.t_prime, t);
        }
        let rhos = rho_trajectory(&QubitState::upper(), &cfg).unwrap();
        assert_eq!(rhos.len(), 41);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn physical_density_matrix(
            ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0,
            t in 0.0f64..300.0,
        ) {
            prop_assume!(ar * ar + ai * ai + br * br + bi * bi > 1e-3);
            let q = QubitState::normalized(C64::new(ar, ai), C64::new(br, bi)).unwrap();
            let field = coherent(30.0, 1.1, 100).unwrap();
            let r = reduce(&evolve_product(&q, &field, t).unwrap());
            prop_assert!(r.rho11 >= -1e-12 && r.rho11 <= 1.0 + 1e-12);
            prop_assert!(r.positivity_margin() >= -1e-12);
            let purity = r.rho11.powi(2) + r.rho22().powi(2) + 2.0 * r.rho12.norm_sqr();
            prop_assert!(purity <= 1.0 + 1e-12);
        }

        #[test]
        fn initial_coherence_is_alpha_beta_conj(
            ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0,
        ) {
            prop_assume!(ar * ar + ai * ai + br * br + bi * bi > 1e-3);
            let q = QubitState::normalized(C64::new(ar, ai), C64::new(br, bi)).unwrap();
            let field = FieldVector::number_state(0, 10).unwrap();
            let r = reduce(&evolve_product(&q, &field, 0.0).unwrap());
            prop_assert!((r.rho12 - q.alpha * q.beta.conj()).norm() < 1e-15);
        }
    }
}
