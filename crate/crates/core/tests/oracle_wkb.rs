use std::f64::consts::PI;

use num_complex::Complex64;
use stokes_nlie::model::{Hamiltonian, ModelSpec, Parity, Sign, SpectralConstants};
use stokes_nlie::oracle::{node_count, phi_at_origin, shoot_eigenvalue, spectrum_oracle, wavefunction, IntegratorConfig};
use stokes_nlie::wkb::{wkb_action, wkb_asymptotic_energy, wkb_energy, WkbStatus};

#[test]
fn node_counts_follow_level_index() {
    let cfg = IntegratorConfig::default();
    let s = spectrum_oracle(3.0, 1.5, Sign::Minus, 8, &cfg).unwrap();
    let h = Hamiltonian::new(3.0, -1.5).unwrap();
    for (n, l) in s.levels.iter().enumerate() {
        assert_eq!(l.parity, Parity::of_level(n));
        let w = wavefunction(&h, l.energy, &cfg).unwrap();
        // nodes on (0, ∞); the odd ones also vanish at the origin
        assert_eq!(node_count(&w), n / 2, "level {n}");
        if l.parity == Parity::Odd {
            assert!(w[0][1].abs() < 1e-8);
        } else {
            assert!(w[0][2].abs() < 1e-8);
        }
    }
}

#[test]
fn connection_data_is_analytic_in_energy() {
    // mean value over a circle equals the centre value
    let cfg = IntegratorConfig::default();
    let h = Hamiltonian::new(3.0, 0.7).unwrap();
    let centre = Complex64::new(1.5, 0.2);
    let n = 32;
    let mut mean = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let e = centre + Complex64::from_polar(0.8, 2.0 * PI * k as f64 / n as f64);
        mean += phi_at_origin(&h, e, &cfg).unwrap().value();
    }
    mean /= n as f64;
    let c = phi_at_origin(&h, centre, &cfg).unwrap().value();
    assert!((mean - c).norm() < 1e-8 * c.norm().max(1.0), "{mean} {c}");
}

#[test]
fn shooting_is_independent_of_start_point() {
    let spec = ModelSpec::new(3.0, 2.0, Sign::Plus, Parity::Odd).unwrap();
    let a = shoot_eigenvalue(&spec, 3, &IntegratorConfig::default()).unwrap().energy;
    let mut far = IntegratorConfig::default();
    far.x_scale = 1.4;
    let b = shoot_eigenvalue(&spec, 3, &far).unwrap().energy;
    assert!(((a - b) / a).abs() < 1e-9, "{a} {b}");
}

#[test]
fn wkb_approaches_closed_form_for_high_levels() {
    let c = SpectralConstants::new(3.0).unwrap();
    let h = Hamiltonian::new(3.0, 1.0).unwrap();
    let rel = |n: usize| {
        let e = wkb_energy(n, &h).unwrap().energy.unwrap();
        ((e - wkb_asymptotic_energy(n, &c)) / e).abs()
    };
    let (a, b, d) = (rel(4), rel(16), rel(64));
    assert!(a > b && b > d && d < 1e-2, "{a} {b} {d}");
}

#[test]
fn wkb_action_is_monotone_and_quantized() {
    let h = Hamiltonian::new(3.0, -1.0).unwrap();
    let mut last = wkb_action(0.0, &h).unwrap();
    for i in 1..40 {
        let a = wkb_action(0.25 * i as f64, &h).unwrap();
        assert!(a > last);
        last = a;
    }
    for n in 0..4 {
        let l = wkb_energy(n, &h).unwrap();
        assert_eq!(l.status, WkbStatus::Converged);
        let a = wkb_action(l.energy.unwrap(), &h).unwrap();
        assert!((a - (n as f64 + 0.5) * PI).abs() < 1e-9);
    }
}
