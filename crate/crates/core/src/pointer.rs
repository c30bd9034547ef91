//! Time-dependent pointer states of the qubit and the field, the parallelism
//! ratio `G`, and the times at which the two qubit pointer states coincide.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64 as C64;

use crate::closedform::{Flagged, Validity};
use crate::dynamics::QubitState;
use crate::error::{Error, Result};
use crate::fock::{FieldVector, SimConfig};

/// Below this, `sin(theta_+)` or `cos(theta_-)` is treated as a pole of `G`.
pub const POLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointerSign {
    Plus,
    Minus,
}

impl PointerSign {
    /// `+1` for plus, `-1` for minus.
    pub fn signum(self) -> f64 {
        match self {
            PointerSign::Plus => 1.0,
            PointerSign::Minus => -1.0,
        }
    }
}

/// `theta_± = phi/2 ± t'/(4 sqrt(nbar))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointerAngles {
    pub theta_plus: f64,
    pub theta_minus: f64,
}

impl PointerAngles {
    pub fn at(phi: f64, nbar: f64, t_prime: f64) -> Self {
        let drift = t_prime / (4.0 * nbar.sqrt());
        PointerAngles { theta_plus: 0.5 * phi + drift, theta_minus: 0.5 * phi - drift }
    }
}

fn plus_state(theta: f64) -> QubitState {
    QubitState { alpha: C64::new(0.0, -theta.cos()), beta: C64::new(theta.sin(), 0.0) }
}

fn minus_state(theta: f64) -> QubitState {
    QubitState { alpha: C64::new(0.0, theta.sin()), beta: C64::new(theta.cos(), 0.0) }
}

/// `(|+(0)>, |-(0)>)` for coherent-state phase `phi`.
pub fn initial_pointer_states(phi: f64) -> (QubitState, QubitState) {
    (plus_state(0.5 * phi), minus_state(0.5 * phi))
}

/// `|+(t')> = -i cos(theta_+)|a> + sin(theta_+)|b>`,
/// `|-(t')> = i sin(theta_-)|a> + cos(theta_-)|b>`.
pub fn pointer_state_at(phi: f64, nbar: f64, t_prime: f64, s: PointerSign) -> QubitState {
    let th = PointerAngles::at(phi, nbar, t_prime);
    match s {
        PointerSign::Plus => plus_state(th.theta_plus),
        PointerSign::Minus => minus_state(th.theta_minus),
    }
}

/// Ratio `G` with `A = G B` along the pointer branch: `-i cot(theta_+)` or
/// `i tan(theta_-)`.
pub fn g_scalar(phi: f64, nbar: f64, t_prime: f64, s: PointerSign) -> Result<C64> {
    let th = PointerAngles::at(phi, nbar, t_prime);
    match s {
        PointerSign::Plus => {
            let (sn, cs) = th.theta_plus.sin_cos();
            if sn.abs() < POLE_TOLERANCE {
                return Err(Error::Pole { sign: s, theta: th.theta_plus });
            }
            Ok(C64::new(0.0, -cs / sn))
        }
        PointerSign::Minus => {
            let (sn, cs) = th.theta_minus.sin_cos();
            if cs.abs() < POLE_TOLERANCE {
                return Err(Error::Pole { sign: s, theta: th.theta_minus });
            }
            Ok(C64::new(0.0, sn / cs))
        }
    }
}

/// Field pointer state: `c_n exp(∓ (i t'/2)(sqrt(n+1) + sqrt(n)))`.
pub fn env_pointer_exact(config: &SimConfig, t_prime: f64, s: PointerSign) -> Result<FieldVector> {
    Ok(phase_modulate(&config.coherent()?, t_prime, s))
}

pub fn phase_modulate(field: &FieldVector, t_prime: f64, s: PointerSign) -> FieldVector {
    let amps = field
        .amps()
        .iter()
        .enumerate()
        .map(|(n, &c)| {
            let x = n as f64;
            c * C64::from_polar(1.0, -s.signum() * 0.5 * t_prime * ((x + 1.0).sqrt() + x.sqrt()))
        })
        .collect();
    FieldVector::from_amps(amps).expect("non-empty").with_tail_mass(field.tail_mass())
}

/// Coherent-state approximation of the field pointer state: a global phase
/// and a rotated amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentPointer {
    pub global_phase: C64,
    pub nu_eff: C64,
}

/// `|Φ_±> ≈ phase · |nu e^{∓ i t' L / (2 sqrt(nbar))}>` with
/// `L = 5/4 - 1/(4 nbar)`; flagged against `t' ≪ nbar^{3/2}`.
pub fn env_pointer_coherent_approx(
    config: &SimConfig,
    t_prime: f64,
    s: PointerSign,
) -> Flagged<CoherentPointer> {
    let nbar = config.nbar;
    let rn = nbar.sqrt();
    let k = 0.75 + 0.75 / nbar - 1.0 / (8.0 * nbar * nbar);
    let l = 1.25 - 0.25 / nbar;
    let sg = s.signum();
    let value = CoherentPointer {
        global_phase: C64::from_polar(1.0, -sg * 0.5 * t_prime * rn * k),
        nu_eff: config.nu() * C64::from_polar(1.0, -sg * t_prime * l / (2.0 * rn)),
    };
    Flagged { value, validity: Validity::classify(t_prime, nbar.powf(1.5)) }
}

/// Coincidence times `t' = (2k+1) pi sqrt(nbar)`, `k = 0..k_max`, with the
/// common qubit state. At even `k` this is `(i sin(phi/2 - pi/4), cos(phi/2 - pi/4))`,
/// at odd `k` it is `(i sin(phi/2 + pi/4), cos(phi/2 + pi/4))`.
pub fn coincidence_times(phi: f64, nbar: f64, k_max: usize) -> Result<Vec<(f64, QubitState)>> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    if !(nbar > 0.0) {
        return Err(Error::InvalidParameter(format!("nbar must be positive, got {nbar}")));
    }
    Ok((0..k_max)
        .map(|k| {
            let t = (2 * k + 1) as f64 * PI * nbar.sqrt();
            let shift = if k % 2 == 0 { -FRAC_PI_4 } else { FRAC_PI_4 };
            (t, minus_state(0.5 * phi + shift))
        })
        .collect())
}

/// Coordinates `(alpha', beta')` of `q` in the initial pointer basis.
pub fn pointer_coordinates(q: &QubitState, phi: f64) -> (C64, C64) {
    let (p, m) = initial_pointer_states(phi);
    (p.inner(q), m.inner(q))
}
