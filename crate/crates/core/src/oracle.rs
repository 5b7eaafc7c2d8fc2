//! Direct integration of `-ψ'' + (x^{2M} + εα x^{M-1}) ψ = E ψ` on the half
//! line, from the decaying end towards the origin.
//!
//! The start value is not the bare leading asymptotic but the WKB series
//! summed to several orders, with the normalization fixed by
//! `φ ~ x^{-M/2-εα/2} exp(-x^{M+1}/(M+1))`. That keeps the absolute
//! normalization of `φ(0)` accurate while starting the integration close in.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use roots::{find_root_brent, SimpleConvergency};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Hamiltonian, ModelSpec, Parity, SpectralConstants};
use crate::spectrum::{Level, Method, Spectrum};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Start abscissa; `None` picks one from `M` and `|E|`.
    pub x_max: Option<f64>,
    /// Multiplies the automatic start abscissa.
    pub x_scale: f64,
    pub rtol: f64,
    /// Tolerance for the real-energy shooting path, where only the phase
    /// at the origin matters.
    pub shoot_rtol: f64,
    pub max_steps: usize,
    /// Number of WKB orders summed for the start data.
    pub series_orders: usize,
    /// Largest `|E|` accepted.
    pub max_energy: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            x_max: None,
            x_scale: 1.0,
            rtol: 1e-11,
            shoot_rtol: 1e-10,
            max_steps: 2_000_000,
            series_orders: 7,
            max_energy: 1e4,
        }
    }
}

/// `|E| x^{-2M}` at the start point never exceeds this.
const MAX_ENERGY_RATIO: f64 = 0.05;
/// `x^{M+1}` at the start point is at least this.
const MIN_GROWTH: f64 = 1200.0;

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for t in [self.rtol, self.shoot_rtol] {
            if !(t > 0.0 && t < 1e-3) {
                return Err(Error::InvalidConfig(format!("tolerance out of range: {t}")));
            }
        }
        if !(self.x_scale >= 1.0 && self.x_scale.is_finite()) {
            return Err(Error::InvalidConfig("x_scale must be >= 1".into()));
        }
        if self.series_orders < 2 || self.series_orders > 12 {
            return Err(Error::InvalidConfig("series_orders must be in 2..=12".into()));
        }
        Ok(())
    }

    /// Start abscissa for a given potential and energy.
    pub fn start_point(&self, h: &Hamiltonian, energy: C) -> f64 {
        let m = h.m;
        let auto = MIN_GROWTH
            .powf(1.0 / (m + 1.0))
            .max((energy.norm() / MAX_ENERGY_RATIO).powf(0.5 / m))
            .max((h.coupling.abs() / MAX_ENERGY_RATIO).powf(1.0 / (m + 1.0)));
        self.x_max.unwrap_or(auto * self.x_scale)
    }
}

/// `φ(0)` and `φ'(0)` for the solution decaying along the positive axis.
/// True values are `phi0 · e^{log_scale}`; `log_scale` is zero unless they
/// would overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionPoint {
    pub phi0: C,
    pub dphi0: C,
    pub energy: C,
    pub log_scale: f64,
    pub quality: f64,
}

impl ConnectionPoint {
    pub fn value(&self) -> C {
        self.phi0 * self.log_scale.exp()
    }

    pub fn derivative(&self) -> C {
        self.dphi0 * self.log_scale.exp()
    }
}

// --- truncated Taylor series in (x - x₀) -------------------------------

fn t_mul(a: &[C], b: &[C], n: usize) -> Vec<C> {
    (0..n)
        .map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum())
        .collect()
}

fn t_div(a: &[C], b: &[C], n: usize) -> Vec<C> {
    let mut c: Vec<C> = Vec::with_capacity(n);
    for k in 0..n {
        let s: C = (1..=k).map(|i| b[i] * c[k - i]).sum();
        c.push((a[k] - s) / b[0]);
    }
    c
}

fn t_sqrt(a: &[C], n: usize) -> Vec<C> {
    let mut s: Vec<C> = Vec::with_capacity(n);
    s.push(a[0].sqrt());
    for k in 1..n {
        let acc: C = (1..k).map(|i| s[i] * s[k - i]).sum();
        s.push((a[k] - acc) / (2.0 * s[0]));
    }
    s
}

fn t_deriv(a: &[C]) -> Vec<C> {
    (1..a.len()).map(|k| a[k] * k as f64).collect()
}

/// Generalized binomial coefficient `p (p-1) ... (p-k+1) / k!`.
fn binom(p: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (p - i as f64) / (i as f64 + 1.0))
}

/// `Q(x) = V(x) - E` as a Taylor series about `x`.
fn q_series(h: &Hamiltonian, e: C, x: f64, n: usize) -> Vec<C> {
    let m = h.m;
    (0..n)
        .map(|k| {
            let hi = binom(2.0 * m, k) * x.powf(2.0 * m - k as f64);
            let lo = binom(m - 1.0, k) * x.powf(m - 1.0 - k as f64);
            let mut v = C::new(hi + h.coupling * lo, 0.0);
            if k == 0 {
                v -= e;
            }
            v
        })
        .collect()
}

/// Riccati corrections `y₂ + y₃ + ...` to `φ'/φ` beyond `-√Q - Q'/(4Q)`,
/// and the magnitude of the last order kept.
fn riccati_rest(h: &Hamiltonian, e: C, x: f64, orders: usize) -> (C, f64) {
    let len = orders + 1;
    let q = q_series(h, e, x, len);
    let y0: Vec<C> = t_sqrt(&q, len).into_iter().map(|v| -v).collect();
    let two_y0: Vec<C> = y0.iter().map(|v| 2.0 * v).collect();
    let mut ys: Vec<Vec<C>> = vec![y0];
    // y₁ = -y₀'/(2y₀)
    let d0 = t_deriv(&ys[0]);
    let y1: Vec<C> = t_div(&d0, &two_y0, len - 1).into_iter().map(|v| -v).collect();
    ys.push(y1);
    let mut rest = C::new(0.0, 0.0);
    let mut last = 0.0;
    for nord in 2..=orders {
        let n = len - nord;
        let d = t_deriv(&ys[nord - 1]);
        let mut num: Vec<C> = d[..n].to_vec();
        for k in 1..nord {
            let p = t_mul(&ys[k], &ys[nord - k], n);
            for i in 0..n {
                num[i] += p[i];
            }
        }
        let yn: Vec<C> = t_div(&num, &two_y0, n).into_iter().map(|v| -v).collect();
        rest += yn[0];
        last = yn[0].norm();
        ys.push(yn);
    }
    (rest, last)
}

/// Regularized `∫^x √Q`, normalized so that it equals
/// `x^{M+1}/(M+1) + (εα/2) ln x + o(1)`.
fn action_regularized(h: &Hamiltonian, e: C, x: f64) -> C {
    let m = h.m;
    let mut total = C::new(0.0, 0.0);
    for k in 0..80 {
        let bk = binom(0.5, k);
        let mut group = C::new(0.0, 0.0);
        for a in 0..=k {
            let b = k - a;
            let coef = bk * binom(k as f64, a) * h.coupling.powi(a as i32);
            let coef = (-e).powu(b as u32) * coef;
            let p1 = m + 1.0 - a as f64 * (m + 1.0) - 2.0 * m * b as f64;
            let prim = if p1.abs() < 1e-12 {
                x.ln()
            } else {
                x.powf(p1) / p1
            };
            group += coef * prim;
        }
        total += group;
        if k >= 2 && group.norm() <= 1e-17 * total.norm().max(1.0) {
            break;
        }
    }
    total
}

/// `ln φ(x)` and `φ'(x)/φ(x)` from the asymptotic series, with a truncation
/// estimate.
fn asymptotic_start(h: &Hamiltonian, e: C, x: f64, orders: usize) -> (C, C, f64) {
    let m = h.m;
    let xm = x.powf(2.0 * m);
    let u = (C::new(h.coupling * x.powf(m - 1.0), 0.0) - e) / xm;
    let sq = C::new(xm, 0.0) * (1.0 + u);
    let y0 = -sq.sqrt();
    let dq = 2.0 * m * x.powf(2.0 * m - 1.0) + h.coupling * (m - 1.0) * x.powf(m - 2.0);
    let y1 = -dq / (4.0 * sq);
    let (rest, last) = riccati_rest(h, e, x, orders);

    // ∫_x^∞ (y₂ + y₃ + ...) with x' = x/s
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let gl = RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(40).unwrap()));
    let mut tail = C::new(0.0, 0.0);
    let mut tail_last = 0.0;
    for &(node, weight) in gl.as_node_weight_pairs() {
        let s = 0.5 * (node + 1.0);
        let xs = x / s;
        let (r, l) = riccati_rest(h, e, xs, orders);
        let jac = 0.5 * weight * x / (s * s);
        tail += r * jac;
        tail_last += l * jac;
    }
    let ln_phi = -action_regularized(h, e, x) - 0.5 * m * x.ln() - 0.25 * (1.0 + u).ln() - tail;
    let err = tail_last + last;
    (ln_phi, y0 + y1 + rest, err)
}

// --- Dormand–Prince 5(4) ---------------------------------------------

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const CN: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type State = [C; 2];

struct Inward {
    psi: C,
    dpsi: C,
    /// `ln` of the factor removed by renormalization, plus the start value.
    log_scale: C,
    /// Unwrapped `arg(ψ' + iψ)` at the origin (real energies only).
    phase: f64,
    start_err: f64,
}

/// Integrates from the start point to the origin. `samples` receives
/// `(x, ψ, ψ', ln-scale)` at every accepted step.
fn integrate_inward(
    h: &Hamiltonian,
    e: C,
    cfg: &IntegratorConfig,
    rtol: f64,
    mut samples: Option<&mut Vec<(f64, State, f64)>>,
) -> Result<Inward> {
    cfg.validate()?;
    if !(e.re.is_finite() && e.im.is_finite()) || e.norm() > cfg.max_energy {
        return Err(Error::OutsideValidRegion {
            energy: e.norm(),
            reason: format!("|E| must be finite and <= {}", cfg.max_energy),
        });
    }
    let x0 = cfg.start_point(h, e);
    let (ln_phi, dlog, start_err) = asymptotic_start(h, e, x0, cfg.series_orders);
    let rhs = |x: f64, y: &State| -> State { [y[1], C::new(h.potential(x), 0.0) * y[0] - e * y[0]] };

    let mut x = x0;
    let mut y: State = [C::new(1.0, 0.0), dlog];
    let mut log_scale = ln_phi;
    let mut renorm = 0.0;
    let phase_of = |y: &State| y[0].re.atan2(y[1].re);
    let mut phase = phase_of(&y);
    let mut k1 = rhs(x, &y);
    let mut step = -0.1 / dlog.norm().max(1.0);
    let mut steps = 0usize;
    if let Some(s) = samples.as_deref_mut() {
        s.push((x, y, 0.0));
    }
    while x > 0.0 {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::Integration(format!("step limit reached at x = {x}")));
        }
        let mut hstep = step;
        let mut last = false;
        if x + hstep <= 0.0 {
            hstep = -x;
            last = true;
        }
        let mut k = [k1, [C::new(0.0, 0.0); 2], [C::new(0.0, 0.0); 2], [C::new(0.0, 0.0); 2], [C::new(0.0, 0.0); 2], [C::new(0.0, 0.0); 2], [C::new(0.0, 0.0); 2]];
        for s in 0..6 {
            let mut yt = y;
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                let a = A[s][j];
                if a != 0.0 {
                    yt[0] += kj[0] * (hstep * a);
                    yt[1] += kj[1] * (hstep * a);
                }
            }
            let xt = if s == 5 { x + hstep } else { x + CN[s] * hstep };
            k[s + 1] = rhs(xt, &yt);
            if s == 5 {
                // fifth-order solution equals the last stage argument
                let ynew = yt;
                let mut err = [C::new(0.0, 0.0); 2];
                for (j, kj) in k.iter().enumerate() {
                    err[0] += kj[0] * (hstep * ERR[j]);
                    err[1] += kj[1] * (hstep * ERR[j]);
                }
                let kscale = (h.potential(x.abs()) - e).norm().sqrt().max(1.0);
                let size = |v: &State| v[0].norm() * kscale + v[1].norm();
                let sc = rtol * size(&y).max(size(&ynew));
                let en = (err[0].norm() * kscale + err[1].norm()) / sc;
                let new_phase = if e.im == 0.0 {
                    let raw = phase_of(&ynew);
                    let d = (raw - phase + PI).rem_euclid(2.0 * PI) - PI;
                    Some((phase + d, d))
                } else {
                    None
                };
                let phase_ok = new_phase.is_none_or(|(_, d)| d.abs() < 0.5);
                let fac = if en > 0.0 { 0.9 * en.powf(-0.2) } else { 5.0 };
                if en <= 1.0 && phase_ok && ynew.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                    x = if last { 0.0 } else { x + hstep };
                    y = ynew;
                    k1 = k[6];
                    if let Some((p, _)) = new_phase {
                        phase = p;
                    }
                    let mag = size(&y);
                    if mag > 1e100 || mag < 1e-100 {
                        y[0] /= mag;
                        y[1] /= mag;
                        k1[0] /= mag;
                        k1[1] /= mag;
                        renorm += mag.ln();
                    }
                    if let Some(s) = samples.as_deref_mut() {
                        s.push((x, y, renorm));
                    }
                    step = step * fac.clamp(0.2, 5.0);
                } else {
                    let shrink = if phase_ok { fac.clamp(0.1, 0.9) } else { 0.3 };
                    step = hstep * shrink;
                    if step.abs() < 1e-14 * x0 {
                        return Err(Error::Integration(format!("step size underflow at x = {x}")));
                    }
                }
            }
        }
    }
    log_scale += renorm;
    Ok(Inward {
        psi: y[0],
        dpsi: y[1],
        log_scale,
        phase,
        start_err,
    })
}

fn pack(e: C, inw: &Inward, quality: f64) -> ConnectionPoint {
    let ls = inw.log_scale;
    let (base, rot) = if ls.re.abs() < 600.0 {
        (0.0, ls.exp())
    } else {
        (ls.re, C::new(0.0, ls.im).exp())
    };
    ConnectionPoint {
        phi0: inw.psi * rot,
        dphi0: inw.dpsi * rot,
        energy: e,
        log_scale: base,
        quality,
    }
}

/// `φ(0, εα, E)` and `∂_x φ(0, εα, E)`. The error estimate compares with a
/// run at ten times the tolerance (global error is proportional to it) and
/// adds the size of the last series order.
pub fn phi_at_origin(h: &Hamiltonian, e: C, cfg: &IntegratorConfig) -> Result<ConnectionPoint> {
    let fine = integrate_inward(h, e, cfg, cfg.rtol, None)?;
    let coarse = integrate_inward(h, e, cfg, cfg.rtol * 10.0, None)?;
    let a = pack(e, &fine, 0.0);
    let b = pack(e, &coarse, 0.0);
    let scale = a.phi0.norm() + a.dphi0.norm();
    let diff = ((a.phi0 - b.phi0 * (b.log_scale - a.log_scale).exp()).norm()
        + (a.dphi0 - b.dphi0 * (b.log_scale - a.log_scale).exp()).norm())
        / scale;
    Ok(pack(e, &fine, diff / 9.0 + fine.start_err))
}

/// Unwrapped Prüfer angle `arg(ψ' + iψ)` at the origin; decreases by `π/2`
/// across each level.
pub fn prufer_phase(h: &Hamiltonian, e: f64, cfg: &IntegratorConfig) -> Result<f64> {
    Ok(integrate_inward(h, C::new(e, 0.0), cfg, cfg.shoot_rtol, None)?.phase)
}

/// `φ'(0)` for even parity, `φ(0)` for odd, relative to `|φ(0)| + |φ'(0)|`.
pub fn boundary_value(h: &Hamiltonian, parity: Parity, e: f64, cfg: &IntegratorConfig) -> Result<f64> {
    let r = integrate_inward(h, C::new(e, 0.0), cfg, cfg.shoot_rtol, None)?;
    let scale = r.psi.norm() + r.dpsi.norm();
    let v = match parity {
        Parity::Even => r.dpsi,
        Parity::Odd => r.psi,
    };
    // the solution is real up to a constant phase
    Ok((v * r.psi.conj().signum()).re / scale)
}

trait Signum {
    fn signum(self) -> C;
}

impl Signum for C {
    fn signum(self) -> C {
        if self.norm() == 0.0 {
            C::new(1.0, 0.0)
        } else {
            self / self.norm()
        }
    }
}

/// The `j`-th level of the given parity (`j` counts within the parity
/// sector). Brent iteration on the Prüfer angle, bracketed outward from an
/// asymptotic seed.
pub fn shoot_eigenvalue(spec: &ModelSpec, j: usize, cfg: &IntegratorConfig) -> Result<Level> {
    let h = spec.hamiltonian();
    let n = match spec.parity {
        Parity::Even => 2 * j,
        Parity::Odd => 2 * j + 1,
    };
    let target = PI / 2.0 - n as f64 * PI / 2.0;
    // the root finder re-evaluates its bracket ends, so remember recent values
    let memo = std::cell::RefCell::new(Vec::<(f64, f64)>::new());
    let g = |e: f64| -> Result<f64> {
        if let Some(&(_, v)) = memo.borrow().iter().find(|(x, _)| *x == e) {
            return Ok(v);
        }
        let v = prufer_phase(&h, e, cfg)? - target;
        let mut mm = memo.borrow_mut();
        if mm.len() > 8 {
            mm.remove(0);
        }
        mm.push((e, v));
        Ok(v)
    };
    let c = SpectralConstants::new(spec.m)?;
    let seed = c.asymptotic_energy(n);
    let floor = h.potential_minimum();
    let mut lo = (0.9 * seed - 0.5).max(floor);
    let mut hi = 1.1 * seed + 0.5;
    let mut glo = g(lo)?;
    let mut width = hi - lo;
    while glo <= 0.0 {
        hi = lo;
        lo -= width;
        width *= 2.0;
        glo = g(lo)?;
    }
    let mut ghi = g(hi)?;
    while ghi >= 0.0 {
        lo = hi;
        hi += width;
        width *= 2.0;
        ghi = g(hi)?;
        if hi > cfg.max_energy {
            return Err(Error::NoSignChange(format!("no level below E = {}", cfg.max_energy)));
        }
    }
    let mut failure = None;
    let mut conv = SimpleConvergency {
        eps: 1e-11 * hi.abs().max(1.0),
        max_iter: 200,
    };
    let root = find_root_brent(
        lo,
        hi,
        |e| match g(e) {
            Ok(v) => v,
            Err(err) => {
                failure.get_or_insert(err);
                f64::NAN
            }
        },
        &mut conv,
    );
    if let Some(err) = failure {
        return Err(err);
    }
    let energy = root.map_err(|e| Error::NoSignChange(e.to_string()))?;
    let residual = boundary_value(&h, spec.parity, energy, cfg)?.abs();
    let theta = if energy > 0.0 {
        c.theta_from_energy(energy)?
    } else {
        f64::NEG_INFINITY
    };
    Ok(Level {
        j,
        sign: spec.sign,
        parity: spec.parity,
        energy,
        theta,
        method: Method::Oracle,
        residual,
        err_est: 1e-12 * energy.abs().max(1e-3) + conv.eps,
    })
}

/// The lowest `n_levels` levels of the signed Hamiltonian, both parities,
/// sorted by energy.
pub fn spectrum_oracle(
    m: f64,
    alpha: f64,
    sign: crate::model::Sign,
    n_levels: usize,
    cfg: &IntegratorConfig,
) -> Result<Spectrum> {
    let levels: Result<Vec<Level>> = (0..n_levels)
        .into_par_iter()
        .map(|n| {
            let spec = ModelSpec::new(m, alpha, sign, Parity::of_level(n))?;
            shoot_eigenvalue(&spec, n / 2, cfg)
        })
        .collect();
    let mut s = Spectrum::new(m, alpha);
    s.levels = levels?;
    s.sort();
    for w in s.levels.windows(2) {
        if !(w[1].energy > w[0].energy) || w[1].parity == w[0].parity {
            return Err(Error::Verification("oracle levels do not interlace".into()));
        }
    }
    Ok(s)
}

/// Energies of the `n` lowest levels of one parity sector.
pub fn sector_energies(spec: &ModelSpec, n: usize, cfg: &IntegratorConfig) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|j| shoot_eigenvalue(spec, j, cfg).map(|l| l.energy))
        .collect()
}

/// Samples `(x, ψ, ψ')` of the real solution on `[0, x_max]`, increasing in
/// `x`, normalized to `max |ψ| = 1`.
pub fn wavefunction(h: &Hamiltonian, e: f64, cfg: &IntegratorConfig) -> Result<Vec<[f64; 3]>> {
    let mut raw = Vec::new();
    integrate_inward(h, C::new(e, 0.0), cfg, cfg.rtol, Some(&mut raw))?;
    let ref_scale = raw.last().map(|r| r.2).unwrap_or(0.0);
    let mut out: Vec<[f64; 3]> = raw
        .iter()
        .rev()
        .map(|(x, y, ls)| {
            let f = (ls - ref_scale).exp();
            [*x, y[0].re * f, y[1].re * f]
        })
        .collect();
    let big = out.iter().fold(0.0f64, |m, r| m.max(r[1].abs()));
    for r in &mut out {
        r[1] /= big;
        r[2] /= big;
    }
    Ok(out)
}

/// Number of sign changes of `ψ` on `(0, x_max)`.
pub fn node_count(samples: &[[f64; 3]]) -> usize {
    let peak = samples.iter().fold(0.0f64, |m, r| m.max(r[1].abs()));
    samples
        .windows(2)
        .skip(1)
        .filter(|w| w[0][1] * w[1][1] < 0.0 && w[0][1].abs().max(w[1][1].abs()) > 1e-8 * peak)
        .count()
}
