//! Closed-form approximations for the qubit coherence at finite `nbar`.
//!
//! Every result is returned with a [`Validity`] tag measuring `t'` against the
//! time scale on which the approximation was derived.

use num_complex::Complex64 as C64;

use crate::fock::FieldVector;
use crate::pointer::{PointerAngles, PointerSign};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Validity {
    Inside,
    Marginal,
    Outside,
}

impl Validity {
    /// `Inside` up to `0.1 * limit`, `Marginal` up to `limit`, else `Outside`.
    pub fn classify(t_prime: f64, limit: f64) -> Self {
        let t = t_prime.abs();
        if t <= 0.1 * limit {
            Validity::Inside
        } else if t <= limit {
            Validity::Marginal
        } else {
            Validity::Outside
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Validity::Inside => "inside",
            Validity::Marginal => "marginal",
            Validity::Outside => "outside",
        }
    }
}

/// A value paired with its regime tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub validity: Validity,
}

fn long_time_regime(nbar: f64, t_prime: f64) -> Validity {
    Validity::classify(t_prime, nbar.powf(1.5))
}

/// `exp(-t'^2 / (32 nbar^2))`.
pub fn slow_envelope(nbar: f64, t_prime: f64) -> f64 {
    (-t_prime * t_prime / (32.0 * nbar * nbar)).exp()
}

/// `exp(-t'^2 / (64 nbar^2))`.
pub fn cross_envelope(nbar: f64, t_prime: f64) -> f64 {
    (-t_prime * t_prime / (64.0 * nbar * nbar)).exp()
}

/// Finite-`nbar` replacement for `e^{-i t'/(2 sqrt(nbar))}`:
/// `e^{-i t'/(2 sqrt(nbar))} e^{-t'^2/(32 nbar^2)}`.
pub fn correction_factor(nbar: f64, t_prime: f64) -> Flagged<C64> {
    let value = C64::from_polar(slow_envelope(nbar, t_prime), -t_prime / (2.0 * nbar.sqrt()));
    Flagged { value, validity: long_time_regime(nbar, t_prime) }
}

/// `sum_n |c_n|^2 exp(-i t' (sqrt(n+1) - sqrt(n)))` over the given field.
pub fn phase_average(field: &FieldVector, t_prime: f64) -> C64 {
    field
        .amps()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let x = n as f64;
            C64::from_polar(c.norm_sqr(), -t_prime * ((x + 1.0).sqrt() - x.sqrt()))
        })
        .sum()
}

/// Coherence for a qubit started in `|s(0)>`:
/// plus `-(i/2) sin(phi + t'/(2 sqrt nbar)) e^{-t'^2/32nbar^2}`,
/// minus `(i/2) sin(phi - t'/(2 sqrt nbar)) e^{-t'^2/32nbar^2}`.
pub fn rho12_pointer_start(phi: f64, nbar: f64, t_prime: f64, s: PointerSign) -> Flagged<C64> {
    let arg = phi + s.signum() * t_prime / (2.0 * nbar.sqrt());
    let value = -s.signum() * 0.5 * I * arg.sin() * slow_envelope(nbar, t_prime);
    Flagged { value, validity: long_time_regime(nbar, t_prime) }
}

/// `(<a|+><-|b>, <a|-><+|b>)` with the finite-`nbar` envelope
/// `e^{-t'^2/64nbar^2}`.
pub fn cross_term_factors(phi: f64, nbar: f64, t_prime: f64) -> Flagged<(C64, C64)> {
    let th = PointerAngles::at(phi, nbar, t_prime);
    let env = cross_envelope(nbar, t_prime);
    let value = (
        -I * th.theta_plus.cos() * th.theta_minus.cos() * env,
        I * th.theta_plus.sin() * th.theta_minus.sin() * env,
    );
    Flagged { value, validity: long_time_regime(nbar, t_prime) }
}

/// `K = 3/4 + 3/(4 nbar) - 1/(8 nbar^2)`.
fn phase_rate(nbar: f64) -> f64 {
    0.75 + 0.75 / nbar - 1.0 / (8.0 * nbar * nbar)
}

/// `L = 5/4 - 1/(4 nbar)`.
fn rotation_rate(nbar: f64) -> f64 {
    1.25 - 0.25 / nbar
}

/// Coherent-state approximation of `<Phi_-|Phi_+>`:
/// `exp(-i t' sqrt(nbar) K) exp(nbar (e^{-i t' L / sqrt(nbar)} - 1))`.
pub fn env_overlap_approx(nbar: f64, t_prime: f64) -> Flagged<C64> {
    let rn = nbar.sqrt();
    let phase = C64::from_polar(1.0, -t_prime * rn * phase_rate(nbar));
    let rot = C64::from_polar(1.0, -t_prime * rotation_rate(nbar) / rn);
    let value = phase * ((rot - 1.0) * nbar).exp();
    Flagged { value, validity: long_time_regime(nbar, t_prime) }
}

/// `|<Phi_-|Phi_+>|^2 ≈ exp(-4 nbar sin^2(t' L / (2 sqrt nbar)))`.
pub fn env_overlap_sq_approx(nbar: f64, t_prime: f64) -> Flagged<f64> {
    let x = (t_prime * rotation_rate(nbar) / (2.0 * nbar.sqrt())).sin();
    Flagged { value: (-4.0 * nbar * x * x).exp(), validity: long_time_regime(nbar, t_prime) }
}

/// Short-time Gaussian `e^{-(25/16) t'^2}`, flagged against `sqrt(nbar)`.
pub fn env_overlap_sq_gaussian(nbar: f64, t_prime: f64) -> Flagged<f64> {
    Flagged {
        value: (-25.0 / 16.0 * t_prime * t_prime).exp(),
        validity: Validity::classify(t_prime, nbar.sqrt()),
    }
}

/// Coherence for an arbitrary start `alpha'|+(0)> + beta'|-(0)>`: pointer
/// sinusoids weighted by `|alpha'|^2`, `|beta'|^2` plus the two cross terms
/// carried by the field-overlap approximation.
pub fn rho12_closed(alpha_p: C64, beta_p: C64, phi: f64, nbar: f64, t_prime: f64) -> Flagged<C64> {
    let plus = rho12_pointer_start(phi, nbar, t_prime, PointerSign::Plus).value;
    let minus = rho12_pointer_start(phi, nbar, t_prime, PointerSign::Minus).value;
    let (x_pm, x_mp) = cross_term_factors(phi, nbar, t_prime).value;
    let ov = env_overlap_approx(nbar, t_prime).value;
    let value = alpha_p.norm_sqr() * plus
        + beta_p.norm_sqr() * minus
        + alpha_p * beta_p.conj() * x_pm * ov
        + beta_p * alpha_p.conj() * x_mp * ov.conj();
    Flagged { value, validity: long_time_regime(nbar, t_prime) }
}

/// Coherence in the initial pointer basis, `alpha' beta'* <Phi_-|Phi_+>`,
/// flagged against `sqrt(nbar)`.
pub fn rho12_pointer_basis(alpha_p: C64, beta_p: C64, nbar: f64, t_prime: f64) -> Flagged<C64> {
    Flagged {
        value: alpha_p * beta_p.conj() * env_overlap_approx(nbar, t_prime).value,
        validity: Validity::classify(t_prime, nbar.sqrt()),
    }
}

/// Upper envelope of a sampled curve: local maxima plus both endpoints,
/// linearly interpolated back onto the grid.
pub fn upper_envelope(t: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), y.len());
    let n = y.len();
    if n < 3 {
        return y.to_vec();
    }
    let mut knots = vec![0];
    knots.extend((1..n - 1).filter(|&i| y[i] >= y[i - 1] && y[i] >= y[i + 1]));
    knots.push(n - 1);
    let mut out = Vec::with_capacity(n);
    let mut k = 0;
    for i in 0..n {
        while k + 1 < knots.len() - 1 && knots[k + 1] <= i {
            k += 1;
        }
        let (i0, i1) = (knots[k], knots[k + 1]);
        if i <= i0 || i1 == i0 {
            out.push(y[i0]);
        } else if i >= i1 {
            out.push(y[i1]);
        } else {
            let w = (t[i] - t[i0]) / (t[i1] - t[i0]);
            out.push(y[i0] + w * (y[i1] - y[i0]));
        }
    }
    out
}

/// Sign changes of `y`, located by linear interpolation. Each entry is
/// `(t, rising)`.
pub fn zero_crossings(t: &[f64], y: &[f64]) -> Vec<(f64, bool)> {
    assert_eq!(t.len(), y.len());
    let mut out = Vec::new();
    for i in 1..y.len() {
        let (a, b) = (y[i - 1], y[i]);
        if a == 0.0 && i > 1 {
            continue;
        }
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
            let w = if b == a { 0.0 } else { a / (a - b) };
            out.push((t[i - 1] + w * (t[i] - t[i - 1]), b > a));
        }
    }
    out
}

/// Merges crossings closer than `min_gap` into their mean (ripples around a
/// slow zero produce clusters).
pub fn merge_crossings(crossings: &[(f64, bool)], min_gap: f64) -> Vec<f64> {
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &(x, _) in crossings {
        match groups.last_mut() {
            Some(g) if x - g[g.len() - 1] < min_gap => g.push(x),
            _ => groups.push(vec![x]),
        }
    }
    groups.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect()
}
