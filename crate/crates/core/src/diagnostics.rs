//! Entanglement measure `q`, purity, and horizon estimates.

use num_complex::Complex64 as C64;

use crate::closedform::Validity;
use crate::dynamics::{DensityMatrix2, JointState};
use crate::error::{Error, Result};
use crate::fock::inner;

/// `rho11` closer than this to 0 or 1 makes `|q|` undefined.
pub const RATIO_EPS: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntanglementReport {
    pub q_abs: f64,
    pub q_complex: C64,
    pub t_prime: f64,
    /// `t'` measured against `nbar`.
    pub validity: Validity,
}

/// `q = <A|G B> / ||A||^2`; equal to 1 when `A = G B`.
pub fn q_from_joint(joint: &JointState, g_val: C64, nbar: f64) -> Result<EntanglementReport> {
    let na = joint.a.norm_sqr();
    if na == 0.0 {
        return Err(Error::DegenerateBranch);
    }
    let q = g_val * inner(&joint.a, &joint.b)? / na;
    Ok(EntanglementReport {
        q_abs: q.norm(),
        q_complex: q,
        t_prime: joint.t_prime,
        validity: Validity::classify(joint.t_prime, nbar),
    })
}

/// `|q| = |rho12| / sqrt(rho11 (1 - rho11))`.
pub fn q_from_rho(rho: &DensityMatrix2) -> Result<f64> {
    let p = rho.rho11 * (1.0 - rho.rho11);
    if rho.rho11 <= RATIO_EPS || rho.rho11 >= 1.0 - RATIO_EPS || p <= 0.0 {
        return Err(Error::UndefinedRatio { rho11: rho.rho11 });
    }
    Ok(rho.rho12.norm() / p.sqrt())
}

/// `Tr rho^2`.
pub fn purity(rho: &DensityMatrix2) -> f64 {
    rho.rho11.powi(2) + (1.0 - rho.rho11).powi(2) + 2.0 * rho.rho12.norm_sqr()
}

/// `||A - G B|| / ||A||`.
pub fn parallelism_residual(joint: &JointState, g_val: C64) -> Result<f64> {
    let na = joint.a.norm();
    if na == 0.0 {
        return Err(Error::DegenerateBranch);
    }
    Ok(joint.a.add_scaled(-g_val, &joint.b)?.norm() / na)
}

/// Last grid time before the series first drops below `threshold`.
/// `None` if it starts below; the final time if it never drops.
pub fn validity_horizon(t: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    assert_eq!(t.len(), values.len());
    match values.iter().position(|&v| !(v >= threshold)) {
        Some(0) => None,
        Some(i) => Some(t[i - 1]),
        None => t.last().copied(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter("linear fit needs at least two paired points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("linear fit with constant abscissa".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit { slope, intercept: my - slope * mx, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_product, reduce, QubitState};
    use crate::fock::{coherent, FieldVector};
    use crate::pointer::{g_scalar, pointer_state_at, PointerSign};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn joint(a: FieldVector, b: FieldVector) -> JointState {
        JointState { a, b, t_prime: 0.0, leakage: 0.0 }
    }

    #[test]
    fn q_for_parallel_and_orthogonal_branches() {
        let b = coherent(10.0, 0.2, 60).unwrap();
        let g = C64::new(0.3, -1.7);
        let r = q_from_joint(&joint(b.scale(g), b.clone()), g, 10.0).unwrap();
        assert!((r.q_complex - 1.0).norm() < 1e-14);
        assert!((r.q_abs - r.q_complex.norm()).abs() < 1e-15);

        let a = FieldVector::number_state(0, 5).unwrap();
        let b = FieldVector::number_state(1, 5).unwrap();
        let r = q_from_joint(&joint(a, b), C64::new(2.0, 1.0), 10.0).unwrap();
        assert_eq!(r.q_abs, 0.0);

        let z = FieldVector::zeros(5);
        assert!(matches!(
            q_from_joint(&joint(z.clone(), z), C64::new(1.0, 0.0), 1.0),
            Err(Error::DegenerateBranch)
        ));
    }

    #[test]
    fn q_from_rho_examples() {
        let pure = DensityMatrix2 { rho11: 0.5, rho12: C64::new(0.5, 0.0) };
        assert!((q_from_rho(&pure).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix2 { rho11: 0.5, rho12: C64::new(0.0, 0.0) };
        assert_eq!(q_from_rho(&mixed).unwrap(), 0.0);
        for r11 in [0.0, 1.0] {
            let e = DensityMatrix2 { rho11: r11, rho12: C64::new(0.0, 0.0) };
            assert!(matches!(q_from_rho(&e), Err(Error::UndefinedRatio { .. })));
        }
    }

    #[test]
    fn both_q_measures_agree_on_product_states() {
        // A = G B exactly: q from rho and from the branches coincide
        let b = coherent(40.0, 0.8, 120).unwrap();
        let g = C64::new(-0.4, 0.9);
        let raw = joint(b.scale(g), b);
        let s = raw.norm_sqr().sqrt();
        let j = joint(raw.a.scale(C64::new(1.0 / s, 0.0)), raw.b.scale(C64::new(1.0 / s, 0.0)));
        let from_rho = q_from_rho(&reduce(&j)).unwrap();
        let from_joint = q_from_joint(&j, g, 40.0).unwrap().q_abs;
        assert!((from_rho - from_joint).abs() < 1e-10);
        assert!((from_rho - 1.0).abs() < 1e-10);
        assert!((purity(&reduce(&j)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn q_measures_along_pointer_trajectory() {
        let (phi, nbar) = (PI / 6.0, 50.0);
        let field = coherent(nbar, phi, 150).unwrap();
        let p = pointer_state_at(phi, nbar, 0.0, PointerSign::Plus);
        for t in [0.5, 2.0, 7.0] {
            let j = evolve_product(&p, &field, t).unwrap();
            let g = g_scalar(phi, nbar, t, PointerSign::Plus).unwrap();
            let qj = q_from_joint(&j, g, nbar).unwrap().q_abs;
            let qr = q_from_rho(&reduce(&j)).unwrap();
            assert!(qj > 0.9 && qr > 0.95, "t' = {t}: {qj} {qr}");
            assert!((qj - qr).abs() < 0.1);
            assert!(parallelism_residual(&j, g).unwrap() < 0.2);
        }
    }

    #[test]
    fn q_is_phase_invariant() {
        let field = coherent(30.0, 0.1, 100).unwrap();
        let q = QubitState::normalized(C64::new(0.4, 0.1), C64::new(0.2, -0.9)).unwrap();
        let j = evolve_product(&q, &field, 3.3).unwrap();
        let a = q_from_rho(&reduce(&j)).unwrap();
        let b = q_from_rho(&reduce(&j.with_phase(C64::from_polar(1.0, 2.2)))).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn purity_limits() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let pure = DensityMatrix2::pure(&QubitState::new(h, h).unwrap());
        assert!((purity(&pure) - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix2 { rho11: 0.5, rho12: C64::new(0.0, 0.0) };
        assert_eq!(purity(&mixed), 0.5);
    }

    #[test]
    fn horizon_semantics() {
        let t = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(validity_horizon(&t, &[1.0, 0.995, 0.98, 0.999], 0.99), Some(1.0));
        assert_eq!(validity_horizon(&t, &[0.5, 1.0, 1.0, 1.0], 0.99), None);
        assert_eq!(validity_horizon(&t, &[1.0; 4], 0.99), Some(3.0));
    }

    #[test]
    fn fit_recovers_line() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.intercept + 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[2.0]).is_err());
    }

    proptest! {
        #[test]
        fn rank_one_iff_unit_q(r11 in 0.01f64..0.99, frac in 0.0f64..1.0, arg in -3.0f64..3.0) {
            let m = (r11 * (1.0 - r11)).sqrt() * frac;
            let rho = DensityMatrix2 { rho11: r11, rho12: C64::from_polar(m, arg) };
            let q = q_from_rho(&rho).unwrap();
            let p = purity(&rho);
            prop_assert!((q - frac).abs() < 1e-12);
            prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&p));
            // 1 - purity = 2 rho11 rho22 (1 - |q|^2): purity 1 exactly when |q| = 1
            prop_assert!((1.0 - p - 2.0 * r11 * (1.0 - r11) * (1.0 - q * q)).abs() < 1e-12);
        }
    }
}
