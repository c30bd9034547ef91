//! End-to-end checks across modules.

use num_complex::Complex64 as C64;
use spinboson::closedform::rho12_closed;
use spinboson::diagnostics::{purity, q_from_rho};
use spinboson::dynamics::{population_inversion, reduce, rho_series, trajectory, QubitState};
use spinboson::fock::{uniform_grid, SimConfig};
use spinboson::oracle::{integrate, max_amplitude_difference, OracleConfig};
use spinboson::pointer::{coincidence_times, initial_pointer_states, pointer_coordinates};
use spinboson::Error;

#[test]
fn config_validation() {
    assert!(matches!(SimConfig::new(0.0, 10.0, 0.0, 60, vec![0.0]), Err(Error::InvalidParameter(_))));
    assert!(matches!(SimConfig::new(1.0, 10.0, 0.0, 60, vec![1.0, 0.5]), Err(Error::InvalidParameter(_))));
    assert!(SimConfig::with_default_truncation(10.0, 0.3, uniform_grid(1.0, 4)).is_ok());
}

#[test]
fn trajectory_matches_series_and_oracle() {
    let cfg = SimConfig::with_default_truncation(20.0, 0.4, uniform_grid(3.0, 6)).unwrap();
    let field = cfg.coherent().unwrap();
    let q = QubitState::normalized(C64::new(0.6, 0.1), C64::new(-0.2, 0.7)).unwrap();
    let joints = trajectory(&q, &cfg).unwrap();
    for (j, &t) in joints.iter().zip(&cfg.t_prime_grid) {
        let a = reduce(j);
        let b = rho_series(&q, &cfg, t).unwrap();
        assert!((a.rho11 - b.rho11).abs() < 1e-10);
        assert!((a.rho12 - b.rho12).norm() < 1e-10);
    }
    let run = integrate(&OracleConfig::resonant(1.0, 50.0, true).unwrap(), &q, &field, &cfg.t_prime_grid).unwrap();
    assert!(max_amplitude_difference(&run, &q, &field).unwrap() < 1e-6);
}

#[test]
fn pointer_start_stays_nearly_pure_and_tracks_closed_form() {
    let (nbar, phi) = (50.0, 0.5);
    let cfg = SimConfig::with_default_truncation(nbar, phi, uniform_grid(20.0, 40)).unwrap();
    let (plus, _) = initial_pointer_states(phi);
    let (ap, bp) = pointer_coordinates(&plus, phi);
    for &t in &cfg.t_prime_grid {
        let rho = rho_series(&plus, &cfg, t).unwrap();
        assert!(purity(&rho) > 0.98, "t' = {t}");
        let closed = rho12_closed(ap, bp, phi, nbar, t).value;
        assert!((rho.rho12.norm() - closed.norm()).abs() < 0.02, "t' = {t}");
    }
}

#[test]
fn coincidence_state_is_reached_from_either_pointer() {
    let (nbar, phi) = (64.0, 0.2);
    let (t, target) = coincidence_times(phi, nbar, 1).unwrap()[0];
    let cfg = SimConfig::with_default_truncation(nbar, phi, vec![t]).unwrap();
    let (plus, minus) = initial_pointer_states(phi);
    for q in [plus, minus] {
        let rho = rho_series(&q, &cfg, t).unwrap();
        let overlap = target.alpha.conj() * target.beta * rho.rho12;
        let fidelity = target.alpha.norm_sqr() * rho.rho11 + target.beta.norm_sqr() * rho.rho22() + 2.0 * overlap.re;
        assert!(fidelity > 0.95, "{fidelity}");
    }
}

#[test]
fn upper_start_inversion_is_bounded() {
    let grid = uniform_grid(40.0, 400);
    let cfg = SimConfig::with_default_truncation(30.0, 0.0, grid.clone()).unwrap();
    let q = QubitState::upper();
    assert_eq!(population_inversion(&q, &cfg, 0.0).unwrap(), 1.0);
    for &t in &grid {
        let w = population_inversion(&q, &cfg, t).unwrap();
        assert!(w.abs() <= 1.0 + 1e-12, "t' = {t}: {w}");
    }
    let rho = rho_series(&q, &cfg, 15.0).unwrap();
    assert!(q_from_rho(&rho).is_ok());
}
