//! Naive WKB quantization `2∫₀^{x₀} √(E - V) dx = (n + ½)π` and the
//! large-level closed form.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi};
use roots::{find_root_brent, SimpleConvergency};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Hamiltonian, Parity, SpectralConstants};
use crate::spectrum::{Level, Method};

const NODES: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPointData {
    pub x0: f64,
    pub energy: f64,
    pub coupling: f64,
    /// `E = 0` with negative coupling: the origin is a second-order
    /// turning point.
    pub degenerate: bool,
}

/// Positive root of `x^{2M} + εα x^{M-1} = E`.
pub fn turning_point(energy: f64, h: &Hamiltonian) -> Result<TurningPointData> {
    let m = h.m;
    let c = h.coupling;
    if !energy.is_finite() {
        return Err(Error::InvalidModel("energy must be finite".into()));
    }
    let degenerate = energy == 0.0 && c < 0.0;
    if energy < 0.0 || (energy == 0.0 && c >= 0.0) {
        return Err(Error::OutsideValidRegion {
            energy,
            reason: "turning point needs E > 0 (or E = 0 with negative coupling)".into(),
        });
    }
    // V <= 0 up to x^{M+1} = -c, and increases monotonically beyond
    let mut lo = if c < 0.0 { (-c).powf(1.0 / (m + 1.0)) } else { 0.0 };
    if degenerate {
        return Ok(TurningPointData {
            x0: lo,
            energy,
            coupling: c,
            degenerate,
        });
    }
    let mut hi = lo.max(1.0);
    while h.potential(hi) < energy {
        hi *= 2.0;
    }
    let f = |x: f64| h.potential(x) - energy;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() <= 1e-15 * energy || (hi - lo) <= 1e-15 * hi {
            break;
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = h.potential_derivative(x);
        let newton = x - fx / d;
        x = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(TurningPointData {
        x0: x,
        energy,
        coupling: c,
        degenerate,
    })
}

/// `∫_{-x₀}^{x₀} √(E - V) dx`, by Gauss–Jacobi quadrature with the square
/// root factored out at the turning point.
pub fn wkb_action(energy: f64, h: &Hamiltonian) -> Result<f64> {
    let tp = turning_point(energy, h)?;
    let x0 = tp.x0;
    static RULE: OnceLock<GaussJacobi> = OnceLock::new();
    let gj = RULE.get_or_init(|| {
        GaussJacobi::new(
            NonZeroUsize::new(NODES).unwrap(),
            FiniteAboveNegOneF64::new(0.5).unwrap(),
            FiniteAboveNegOneF64::new(0.0).unwrap(),
        )
    });
    // x = x₀(1+t)/2, so x₀ - x = x₀(1-t)/2
    let mut sum = 0.0;
    for &(t, w) in gj.as_node_weight_pairs() {
        let x = 0.5 * x0 * (1.0 + t);
        let gap = energy - h.potential(x);
        if gap < -1e-12 * energy.abs().max(1.0) {
            return Err(Error::OutsideValidRegion {
                energy,
                reason: format!("E - V < 0 at x = {x} inside the classical region"),
            });
        }
        let smooth = (gap.max(0.0) / (0.5 * x0 * (1.0 - t))).sqrt();
        sum += w * smooth;
    }
    Ok(2.0 * (0.5 * x0).powf(1.5) * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WkbStatus {
    Converged,
    /// The condition holds exactly at `E = 0` with a second-order turning
    /// point; printed as `0*`.
    FormalZero,
    /// Already `E = 0` overshoots the condition; printed as `◇`.
    NoSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbLevel {
    /// Overall level index `n` (parity `(-1)^n`).
    pub n: usize,
    pub energy: Option<f64>,
    pub status: WkbStatus,
    pub x0: Option<f64>,
}

impl WkbLevel {
    pub fn label(&self) -> String {
        match (self.status, self.energy) {
            (WkbStatus::Converged, Some(e)) => format!("{e}"),
            (WkbStatus::FormalZero, _) => "0*".into(),
            _ => "◇".into(),
        }
    }

    pub fn to_level(&self, h: &Hamiltonian) -> Option<Level> {
        let energy = self.energy?;
        let c = SpectralConstants::new(h.m).ok()?;
        Some(Level {
            j: self.n / 2,
            sign: h.sign(),
            parity: Parity::of_level(self.n),
            energy,
            theta: c.theta_from_energy(energy).ok()?,
            method: Method::Wkb,
            residual: 0.0,
            err_est: 1e-9 * energy,
        })
    }
}

/// Solves `action(E) = (n + ½)π` for the `n`-th level overall.
pub fn wkb_energy(n: usize, h: &Hamiltonian) -> Result<WkbLevel> {
    let target = (n as f64 + 0.5) * PI;
    if h.coupling < 0.0 {
        let a0 = wkb_action(0.0, h)?;
        if (a0 - target).abs() <= 1e-9 * target {
            return Ok(WkbLevel {
                n,
                energy: None,
                status: WkbStatus::FormalZero,
                x0: Some(turning_point(0.0, h)?.x0),
            });
        }
        if a0 > target {
            return Ok(WkbLevel {
                n,
                energy: None,
                status: WkbStatus::NoSolution,
                x0: None,
            });
        }
    }
    let f = |e: f64| wkb_action(e, h).map(|a| a - target).unwrap_or(f64::NAN);
    let c = SpectralConstants::new(h.m)?;
    let mut hi = 2.0 * c.asymptotic_energy(n) + 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    // action(0) <= target here, and for positive coupling action(0⁺) = 0
    let lo = 0.0;
    let flo = if h.coupling < 0.0 { f(lo) } else { -target };
    let mut conv = SimpleConvergency {
        eps: 1e-13 * hi,
        max_iter: 200,
    };
    let energy = if flo == 0.0 {
        0.0
    } else {
        let g = |e: f64| if e == 0.0 { flo } else { f(e) };
        find_root_brent(lo, hi, g, &mut conv).map_err(|e| Error::NoSignChange(e.to_string()))?
    };
    Ok(WkbLevel {
        n,
        energy: Some(energy),
        status: WkbStatus::Converged,
        x0: Some(turning_point(energy, h)?.x0),
    })
}

/// `(2π(n+½)/b₀)^{1/μ}`, the `α = 0` closed form.
pub fn wkb_asymptotic_energy(n: usize, c: &SpectralConstants) -> f64 {
    c.asymptotic_energy(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turning_points() {
        let h0 = Hamiltonian::new(3.0, 0.0).unwrap();
        let tp = turning_point(5.0, &h0).unwrap();
        assert!((tp.x0 - 5f64.powf(1.0 / 6.0)).abs() < 1e-13);
        let hm = Hamiltonian::new(3.0, -2.0).unwrap();
        let tp = turning_point(0.0, &hm).unwrap();
        assert!(tp.degenerate && (tp.x0 - 2f64.powf(0.25)).abs() < 1e-14);
        let hp = Hamiltonian::new(3.0, 1.0).unwrap();
        let tp = turning_point(2.0, &hp).unwrap();
        assert!((hp.potential(tp.x0) - 2.0).abs() < 1e-12);
        assert!(turning_point(-1.0, &hp).is_err());
    }

    #[test]
    fn closed_form_action_at_alpha_zero() {
        let h = Hamiltonian::new(3.0, 0.0).unwrap();
        let c = SpectralConstants::new(3.0).unwrap();
        for e in [0.5, 1.0, 10.0, 100.0] {
            let a = wkb_action(e, &h).unwrap();
            let closed = 0.5 * c.b0 * e.powf(c.mu);
            assert!((a - closed).abs() < 1e-9 * closed.max(1.0), "{a} {closed}");
        }
    }

    #[test]
    fn formal_and_failed_cells() {
        let h = Hamiltonian::new(3.0, -2.0).unwrap();
        assert_eq!(wkb_energy(0, &h).unwrap().status, WkbStatus::FormalZero);
        let h = Hamiltonian::new(3.0, -2.5).unwrap();
        assert_eq!(wkb_energy(0, &h).unwrap().status, WkbStatus::NoSolution);
        assert_eq!(wkb_energy(0, &h).unwrap().label(), "◇");
    }
}
