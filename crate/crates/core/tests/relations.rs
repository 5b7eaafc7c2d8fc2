use num_complex::Complex64;
use stokes_nlie::model::{Parity, Sign};
use stokes_nlie::oracle::IntegratorConfig;
use stokes_nlie::relations::{duality_check, Connection, DeterminantSet};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn fused_products_match_closed_wronskians() {
    let conn = Connection::new(3.0, 0.6, IntegratorConfig::default()).unwrap();
    let e = c(0.9, -0.4);
    for sign in Sign::both() {
        for k in 1..=2 {
            let a = conn.fusion_matrix(k, sign, e).unwrap();
            let b = conn.fusion_matrix_direct(k, sign, e).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let d = (a.entries[i][j] - b.entries[i][j]).norm();
                    assert!(d < 1e-7 * a.entries[i][j].norm().max(1.0), "{sign:?} k={k} ({i},{j})");
                }
            }
            assert!((a.det() - 1.0).norm() < 1e-6);
        }
    }
}

#[test]
fn centred_tau_is_real_at_alpha_zero() {
    // W[y_{-1}, y_1], symmetric about the real axis
    let conn = Connection::new(3.0, 0.0, IntegratorConfig::default()).unwrap();
    for e in [0.3, 1.1, 2.7] {
        let t = conn.tau(-1, Sign::Plus, c(e, 0.0)).unwrap();
        assert!(t.im.abs() < 1e-8 * t.norm(), "{t}");
        let t0 = conn.tau(0, Sign::Plus, c(e, 0.0)).unwrap();
        assert!(t0.im.abs() > 1e-3 * t0.norm());
        let tm = conn.tau(-1, Sign::Minus, c(e, 0.0)).unwrap();
        assert!((t - tm).norm() < 1e-8 * t.norm());
    }
}

#[test]
fn tau_shift_carries_a_phase() {
    let conn = Connection::new(3.0, 1.3, IntegratorConfig::default()).unwrap();
    let e = c(0.7, 0.2);
    for sign in Sign::both() {
        for j in 1..4 {
            let a = conn.tau(j, sign, e).unwrap();
            let b = conn.tau_shifted(j, sign, e).unwrap();
            assert!((a - b).norm() < 1e-7 * a.norm(), "j={j}");
        }
    }
}

#[test]
fn fused_entry_literal_form_needs_odd_alpha() {
    let e = c(0.8, 0.0);
    let odd = Connection::new(3.0, 1.0, IntegratorConfig::default()).unwrap();
    let f = odd.fusion_matrix(2, Sign::Plus, e).unwrap().entries[1][0];
    let lit = odd.fused_21_literal(Sign::Plus, e).unwrap();
    assert!((f - lit).norm() < 1e-7 * f.norm());

    let alpha = 0.5;
    let gen = Connection::new(3.0, alpha, IntegratorConfig::default()).unwrap();
    let f = gen.fusion_matrix(2, Sign::Plus, e).unwrap().entries[1][0];
    let norm = gen.fused_21_from_phi(Sign::Plus, e).unwrap();
    let lit = gen.fused_21_literal(Sign::Plus, e).unwrap();
    assert!((f - norm).norm() < 1e-7 * f.norm());
    let phase = -Complex64::from_polar(1.0, std::f64::consts::PI * alpha);
    assert!((lit - phase * norm).norm() < 1e-10 * f.norm());
    assert!((f - lit).norm() > 0.1 * f.norm());
}

#[test]
fn bethe_residuals_shrink_with_more_levels() {
    let cfg = IntegratorConfig::default();
    let full = DeterminantSet::from_oracle(3.0, 0.5, 40, &cfg).unwrap();
    for (s, p) in [(Sign::Plus, Parity::Even), (Sign::Minus, Parity::Odd)] {
        let e = full.get(s, p).eigenvalues[0];
        let r: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&n| full.truncated(n).unwrap().bethe_residual(s, p, e).unwrap().norm())
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2] && r[2] < 1e-4, "{r:?}");
    }
}

#[test]
fn factorization_at_alpha_m() {
    let r = duality_check(3.0, 4, &IntegratorConfig::default()).unwrap();
    assert!(r.max_rel_diff < 1e-6);
    assert!(r.zero_mode.abs() < 1e-6);
    assert!(r.zero_mode_residual < 1e-12);
    assert!((r.rayleigh_quotient / r.factorized_level - 1.0).abs() < 1e-6);
}
