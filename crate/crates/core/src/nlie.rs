//! Coupled nonlinear integral equations for the auxiliary functions
//! `ln 𝔞^{(±)}_{ε'}` and extraction of the energy levels from them.
//!
//! The unknowns are sampled on the line `θ - iδ`. With `L_ε = ln(1 + 𝔞^{(ε)})`
//! on that line, analytic continuation of the real-axis equation gives
//!
//! `ln 𝔞^{(ε)}(t - iδ) = d_ε(t - iδ) + Σ_k [ (K_k * L_k)(t) - (K_k(· - 2iδ) * conj L_k)(t) ]`
//!
//! with `L_1 = L_ε`, `L_2 = L_{-ε}`. The iteration runs on the correction
//! `χ_ε = ln 𝔞^{(ε)} - d_ε`; the driving term grows like `e^θ` and would
//! otherwise swamp the update in rounding error.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Grid, KernelKind, KernelTable, Line, LineSums, Tail};
use crate::model::{ModelSpec, Parity, Sign, SpectralConstants};
use crate::spectrum::{Level, Method, Spectrum};

/// Energies below which a degenerate `ln 𝔄` is replaced by its affine tail,
/// tried in order until one converges.
pub const DEGENERATE_CUT_ENERGIES: [f64; 4] = [1e-5, 1e-6, 1e-4, 3e-6];

/// A stalled iteration whose best residual is below this is accepted.
pub const RELAXED_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: Grid,
    /// Contour shift `δ`.
    pub delta: f64,
    /// Mixing parameter `λ`.
    pub damping: f64,
    /// Sup-norm tolerance on the fixed-point update.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of stored differences for Anderson mixing; 0 gives plain
    /// damped Picard iteration.
    pub anderson_depth: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: Grid {
                theta_min: -20.0,
                theta_max: 12.0,
                n: 4096,
            },
            delta: 0.1,
            damping: 0.5,
            tol: 1e-11,
            max_iter: 500,
            anderson_depth: 6,
        }
    }
}

impl SolverConfig {
    pub fn with_grid(mut self, theta_min: f64, theta_max: f64, n: usize) -> Self {
        self.grid = Grid {
            theta_min,
            theta_max,
            n,
        };
        self
    }

    pub fn validate(&self, m: f64) -> Result<()> {
        let g = self.grid;
        Grid::new(g.theta_min, g.theta_max, g.n)?;
        let dmax = 0.5f64.min(PI / (2.0 * m));
        if !(self.delta > 0.0 && self.delta < dmax) {
            return Err(Error::InvalidConfig(format!(
                "delta must lie in (0, {dmax}), got {}",
                self.delta
            )));
        }
        if g.theta_min > -16.0 || g.theta_max < 8.0 {
            return Err(Error::InvalidConfig(format!(
                "grid must cover [-16, 8], got [{}, {}]",
                g.theta_min, g.theta_max
            )));
        }
        if g.n < 2048 || !g.n.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "grid points must be a power of two >= 2048, got {}",
                g.n
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidConfig("tol must be positive and max_iter nonzero".into()));
        }
        Ok(())
    }

    /// Kernel table matching this configuration.
    pub fn kernels(&self, m: f64) -> Result<Arc<KernelTable>> {
        self.validate(m)?;
        Ok(Arc::new(KernelTable::for_contour(self.grid, m, self.delta)?))
    }
}

fn idx(sign: Sign) -> usize {
    match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

/// `ln(1 + e^x)` without cancellation when `e^x` is close to `-1`.
pub fn ln_one_plus_exp(x: Complex64) -> Complex64 {
    if x.re > 35.0 {
        return x + (1.0 + (-x).exp()).ln();
    }
    let mut y = x.im - PI;
    y -= 2.0 * PI * (y / (2.0 * PI)).round();
    if x.re.abs() < 0.5 && y.abs() < 0.5 {
        // 1 + e^x = 1 - e^{x - iπ} = -expm1(x - iπ)
        let em1 = Complex64::new(
            libm::expm1(x.re) * y.cos() - 2.0 * (0.5 * y).sin().powi(2),
            x.re.exp() * y.sin(),
        );
        return (-em1).ln();
    }
    (1.0 + x.exp()).ln()
}

/// `ln 𝔄` on the grid with the imaginary part continued leftwards from the
/// right end, where `𝔄 → 1`.
fn ln_cap_a(ln_a: &[Complex64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = ln_a.iter().map(|&x| ln_one_plus_exp(x)).collect();
    for i in (0..out.len().saturating_sub(1)).rev() {
        let prev = out[i + 1].im;
        let mut im = out[i].im;
        im -= 2.0 * PI * ((im - prev) / (2.0 * PI)).round();
        out[i].im = im;
    }
    out
}

/// Imaginary part of the `θ → -∞` plateau of `ln 𝔞^{(ε)}_{ε'}`.
pub fn plateau_phase(spec: &ModelSpec, sign: Sign) -> f64 {
    PI * (sign.value() * spec.alpha - spec.parity.value()) / (spec.m + 1.0)
}

/// At `α = M` one function of each pair has plateau `±iπ`: `𝔄` then
/// vanishes linearly in `E` at the left end and its logarithm grows like
/// `θ/μ`.
pub fn is_degenerate(spec: &ModelSpec, sign: Sign) -> bool {
    (plateau_phase(spec, sign).abs() - PI).abs() < 1e-9
}

/// Right side constant `2j + 1 - ε'/2 + εα/(2M)` of the quantization condition.
pub fn quantization_constant(spec: &ModelSpec, sign: Sign, j: usize) -> f64 {
    2.0 * j as f64 + 1.0 - 0.5 * spec.parity.value() + sign.value() * spec.alpha / (2.0 * spec.m)
}

/// Level obtained when all convolution terms are dropped.
pub fn zeroth_order_energy(spec: &ModelSpec, sign: Sign, j: usize) -> Result<f64> {
    let c = SpectralConstants::for_spec(spec)?;
    let k = quantization_constant(spec, sign, j);
    if k <= 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * PI * k / c.b0).powf(1.0 / c.mu))
}

/// Converged pair `{ln 𝔞^{(+)}_{ε'}, ln 𝔞^{(-)}_{ε'}}` on the line `θ - iδ`.
#[derive(Debug, Clone)]
pub struct AuxiliaryState {
    pub spec: ModelSpec,
    pub constants: SpectralConstants,
    /// `ln 𝔞^{(+)}`, `ln 𝔞^{(-)}`.
    pub ln_a: [Vec<Complex64>; 2],
    /// `ln 𝔄^{(+)}`, `ln 𝔄^{(-)}` with continuous imaginary parts.
    pub ln_cap_a: [Vec<Complex64>; 2],
    /// Sup-norm update per iteration.
    pub history: Vec<f64>,
    kernels: Arc<KernelTable>,
    slopes: [f64; 2],
}

struct Problem<'a> {
    spec: ModelSpec,
    table: &'a KernelTable,
    drive: [Vec<Complex64>; 2],
    slopes: [f64; 2],
    cut: [usize; 2],
}

impl Problem<'_> {
    fn tails(&self, l: &[Vec<Complex64>; 2]) -> [Tail; 2] {
        [0, 1].map(|e| Tail {
            value: l[e][0],
            slope: self.slopes[e],
        })
    }

    fn linearize_left(&self, l: &mut [Complex64], e: usize) {
        let g = self.table.grid;
        let ic = self.cut[e];
        let base = l[ic];
        for i in 0..ic {
            l[i] = base + self.slopes[e] * (g.theta(i) - g.theta(ic));
        }
    }

    /// One application of the integral operator to the correction `χ`.
    fn apply(&self, chi: &[Vec<Complex64>; 2]) -> Result<([Vec<Complex64>; 2], [Vec<Complex64>; 2])> {
        let ln_a: [Vec<Complex64>; 2] = [0, 1].map(|e| {
            self.drive[e]
                .iter()
                .zip(chi[e].iter())
                .map(|(d, c)| d + c)
                .collect()
        });
        let mut l = [ln_cap_a(&ln_a[0]), ln_cap_a(&ln_a[1])];
        for e in 0..2 {
            if self.slopes[e] != 0.0 {
                self.linearize_left(&mut l[e], e);
            }
        }
        let tails = self.tails(&l);
        let conj: [Vec<Complex64>; 2] = [0, 1].map(|e| l[e].iter().map(|z| z.conj()).collect());
        let t = self.table;
        let fl = [t.transform(&l[0])?, t.transform(&l[1])?];
        let fc = [t.transform(&conj[0])?, t.transform(&conj[1])?];
        let one = Complex64::new(1.0, 0.0);
        let mut out: [Vec<Complex64>; 2] = [Vec::new(), Vec::new()];
        for e in 0..2 {
            let o = 1 - e;
            let mut v = t.combine(&[
                (KernelKind::One, Line::Real, one, &fl[e]),
                (KernelKind::Two, Line::Real, one, &fl[o]),
                (KernelKind::One, Line::Below, -one, &fc[e]),
                (KernelKind::Two, Line::Below, -one, &fc[o]),
            ])?;
            for (kind, src) in [(KernelKind::One, e), (KernelKind::Two, o)] {
                let a = t.tail_correction(kind, Line::Real, tails[src])?;
                let b = t.tail_correction(kind, Line::Below, tails[src].conj())?;
                for i in 0..v.len() {
                    v[i] += a[i] - b[i];
                }
            }
            out[e] = v;
        }
        Ok((out, l))
    }
}

fn flatten(x: &[Vec<Complex64>; 2]) -> Vec<f64> {
    x.iter()
        .flat_map(|v| v.iter().flat_map(|z| [z.re, z.im]))
        .collect()
}

fn unflatten(v: &[f64], n: usize) -> [Vec<Complex64>; 2] {
    [0, 1].map(|e| {
        (0..n)
            .map(|i| Complex64::new(v[2 * (e * n + i)], v[2 * (e * n + i) + 1]))
            .collect()
    })
}

/// Solves the coupled pair at the parity of `spec` (its sign is ignored:
/// both signs are solved together).
pub fn solve(spec: &ModelSpec, cfg: &SolverConfig, kernels: &Arc<KernelTable>) -> Result<AuxiliaryState> {
    spec.check_nlie_range()?;
    cfg.validate(spec.m)?;
    if kernels.grid != cfg.grid || kernels.delta != cfg.delta || kernels.m != spec.m {
        return Err(Error::InvalidConfig(
            "kernel table does not match the solver grid, delta or M".into(),
        ));
    }
    let constants = SpectralConstants::for_spec(spec)?;
    let grid = cfg.grid;
    let n = grid.n;
    let drive = [Sign::Plus, Sign::Minus].map(|s| {
        let sp = spec.with_sign(s);
        (0..n)
            .map(|i| constants.drive_term(Complex64::new(grid.theta(i), -cfg.delta), &sp))
            .collect::<Vec<_>>()
    });
    let slopes = [Sign::Plus, Sign::Minus].map(|s| {
        if is_degenerate(spec, s) {
            1.0 / constants.mu
        } else {
            0.0
        }
    });
    let degenerate = slopes.iter().any(|&s| s != 0.0);
    let cuts: &[f64] = if degenerate { &DEGENERATE_CUT_ENERGIES } else { &[0.0] };
    let mut last_err = None;
    for &ec in cuts {
        let cut = if degenerate {
            let tc = constants.theta_from_energy(ec)?;
            let ic = ((tc - grid.theta_min) / grid.h()).round().max(0.0) as usize;
            slopes.map(|s| if s != 0.0 { ic } else { 0 })
        } else {
            [0, 0]
        };
        let problem = Problem {
            spec: *spec,
            table: kernels,
            drive: drive.clone(),
            slopes,
            cut,
        };
        match iterate(&problem, cfg) {
            Ok((chi, history)) => {
                return finish(problem, chi, history, kernels.clone(), constants);
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Anderson-accelerated fixed-point iteration on `χ`. Returns the converged
/// `χ` or the best iterate when it stalls below `RELAXED_TOL`.
fn iterate(problem: &Problem<'_>, cfg: &SolverConfig) -> Result<([Vec<Complex64>; 2], Vec<f64>)> {
    let n = cfg.grid.n;
    let beta = cfg.damping;
    let mut x = vec![0.0; 4 * n];
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut dx: VecDeque<Vec<f64>> = VecDeque::new();
    let mut df: VecDeque<Vec<f64>> = VecDeque::new();
    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut best_gx: Option<Vec<f64>> = None;

    for _ in 0..cfg.max_iter {
        let (gx, _) = problem.apply(&unflatten(&x, n))?;
        let gx = flatten(&gx);
        let mut f: Vec<f64> = gx.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        // left of the cut the degenerate function is pinned to its affine tail
        for e in 0..2 {
            for v in &mut f[2 * e * n..2 * (e * n + problem.cut[e])] {
                *v = 0.0;
            }
        }
        let res = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !res.is_finite() {
            break;
        }
        history.push(res);
        if res < cfg.tol {
            return Ok((unflatten(&gx, n), history));
        }
        if res > 1e3 * best {
            dx.clear();
            df.clear();
            prev = None;
        }
        if res < best {
            best = res;
            best_gx = Some(gx.clone());
        }
        if let Some((px, pf)) = prev.take() {
            dx.push_back(x.iter().zip(px.iter()).map(|(a, b)| a - b).collect());
            df.push_back(f.iter().zip(pf.iter()).map(|(a, b)| a - b).collect());
            if dx.len() > cfg.anderson_depth {
                dx.pop_front();
                df.pop_front();
            }
        }
        let mut next: Vec<f64> = x.iter().zip(f.iter()).map(|(a, b)| a + beta * b).collect();
        if cfg.anderson_depth > 0 && !df.is_empty() {
            if let Some(gamma) = least_squares(&df, &f) {
                for (k, g) in gamma.iter().enumerate() {
                    for i in 0..next.len() {
                        next[i] -= g * (dx[k][i] + beta * df[k][i]);
                    }
                }
            }
        }
        prev = Some((x, f));
        x = next;
    }
    match best_gx {
        Some(gx) if best < RELAXED_TOL.max(cfg.tol) => {
            history.push(best);
            Ok((unflatten(&gx, n), history))
        }
        _ => Err(Error::NonConvergence {
            iterations: history.len(),
            residual: history.last().copied().unwrap_or(f64::NAN),
            history,
        }),
    }
}

/// `argmin_γ |f - Σ γ_k df_k|`.
fn least_squares(df: &VecDeque<Vec<f64>>, f: &[f64]) -> Option<Vec<f64>> {
    let rows = f.len();
    let cols = df.len();
    let a = DMatrix::from_fn(rows, cols, |r, c| df[c][r]);
    let b = DVector::from_column_slice(f);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) {
        return None;
    }
    let sol = svd.solve(&b, 1e-10 * smax).ok()?;
    let v: Vec<f64> = sol.iter().copied().collect();
    v.iter().all(|x| x.is_finite()).then_some(v)
}

fn finish(
    problem: Problem<'_>,
    chi: [Vec<Complex64>; 2],
    history: Vec<f64>,
    kernels: Arc<KernelTable>,
    constants: SpectralConstants,
) -> Result<AuxiliaryState> {
    let ln_a: [Vec<Complex64>; 2] = [0, 1].map(|e| {
        problem.drive[e]
            .iter()
            .zip(chi[e].iter())
            .map(|(d, c)| d + c)
            .collect()
    });
    let ln_cap = [ln_cap_a(&ln_a[0]), ln_cap_a(&ln_a[1])];
    for (e, s) in [(0, Sign::Plus), (1, Sign::Minus)] {
        if !is_degenerate(&problem.spec, s) {
            let value = ln_cap[e][0].re.exp();
            if value < 1e-6 {
                return Err(Error::PlateauInstability { value });
            }
        }
    }
    Ok(AuxiliaryState {
        spec: problem.spec,
        constants,
        ln_a,
        ln_cap_a: ln_cap,
        history,
        kernels,
        slopes: problem.slopes,
    })
}

impl AuxiliaryState {
    pub fn grid(&self) -> Grid {
        self.kernels.grid
    }

    pub fn delta(&self) -> f64 {
        self.kernels.delta
    }

    pub fn kernels(&self) -> &Arc<KernelTable> {
        &self.kernels
    }

    pub fn parity(&self) -> Parity {
        self.spec.parity
    }

    pub fn ln_a(&self, sign: Sign) -> &[Complex64] {
        &self.ln_a[idx(sign)]
    }

    pub fn ln_cap_a(&self, sign: Sign) -> &[Complex64] {
        &self.ln_cap_a[idx(sign)]
    }

    pub fn final_residual(&self) -> f64 {
        self.history.last().copied().unwrap_or(0.0)
    }

    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    fn tail(&self, e: usize) -> Tail {
        Tail {
            value: self.ln_cap_a[e][0],
            slope: self.slopes[e],
        }
    }

    /// State with every convolution term removed (`ln 𝔄 ≡ 0`); extraction
    /// from it gives [`zeroth_order_energy`].
    pub fn drive_only(spec: &ModelSpec, cfg: &SolverConfig, kernels: &Arc<KernelTable>) -> Result<Self> {
        let constants = SpectralConstants::for_spec(spec)?;
        let grid = kernels.grid;
        let ln_a = [Sign::Plus, Sign::Minus].map(|s| {
            let sp = spec.with_sign(s);
            (0..grid.n)
                .map(|i| constants.drive_term(Complex64::new(grid.theta(i), -cfg.delta), &sp))
                .collect::<Vec<_>>()
        });
        let zero = vec![Complex64::new(0.0, 0.0); grid.n];
        Ok(Self {
            spec: *spec,
            constants,
            ln_a,
            ln_cap_a: [zero.clone(), zero],
            history: Vec::new(),
            kernels: kernels.clone(),
            slopes: [0.0, 0.0],
        })
    }

    /// `ln 𝔞^{(ε)}` at real `θ`, continued from the solver line.
    pub fn ln_a_real(&self, sign: Sign, theta: f64) -> Result<Complex64> {
        let e = idx(sign);
        let sums = [self.sums(e)?, self.sums(1 - e)?];
        let f = self.f_at(&sums, theta).0;
        let d = self
            .constants
            .drive_term(Complex64::new(theta, 0.0), &self.spec.with_sign(sign));
        Ok(d + 2.0 * Complex64::i() * f.im)
    }

    fn sums(&self, e: usize) -> Result<LineSums> {
        self.kernels.line_sums(&self.ln_cap_a[e], self.tail(e))
    }

    /// `F(θ) = Σ_k ∫ K_k(θ - t + iδ) L_k(t) dt` and its derivative.
    fn f_at(&self, sums: &[LineSums; 2], theta: f64) -> (Complex64, Complex64) {
        let d = self.delta();
        let (a, da) = self.kernels.integral_at(KernelKind::One, &sums[0], theta, d);
        let (b, db) = self.kernels.integral_at(KernelKind::Two, &sums[1], theta, d);
        (a + b, da + db)
    }

    /// Solves `(½) b₀ ν^{-2μ} e^θ = (2j+1 - ε'/2 + εα/(2M)) π + 2 Im F(θ)`.
    pub fn extract_level(&self, j: usize, sign: Sign) -> Result<Level> {
        let spec = self.spec.with_sign(sign);
        let k = quantization_constant(&spec, sign, j);
        let parity = self.spec.parity;
        if k <= 1e-12 {
            // the zero-energy level sits at θ = -∞
            return Ok(Level {
                j,
                sign,
                parity,
                energy: 0.0,
                theta: f64::NEG_INFINITY,
                method: Method::Nlie,
                residual: 0.0,
                err_est: 0.0,
            });
        }
        let e = idx(sign);
        let o = 1 - e;
        let t = &self.kernels;
        let grid = t.grid;
        let scale = 0.5 * self.constants.drive_scale();
        let one = Complex64::new(1.0, 0.0);

        let fl = [t.transform(&self.ln_cap_a[e])?, t.transform(&self.ln_cap_a[o])?];
        let mut f_grid = t.combine(&[
            (KernelKind::One, Line::Above, one, &fl[0]),
            (KernelKind::Two, Line::Above, one, &fl[1]),
        ])?;
        for (kind, src) in [(KernelKind::One, e), (KernelKind::Two, o)] {
            for (v, c) in f_grid.iter_mut().zip(t.tail_correction(kind, Line::Above, self.tail(src))?) {
                *v += c;
            }
        }
        let g = |theta: f64, f: Complex64| scale * theta.exp() - k * PI - 2.0 * f.im;
        let gs: Vec<f64> = (0..grid.n).map(|i| g(grid.theta(i), f_grid[i])).collect();
        let Some(i) = gs.iter().rposition(|&v| v < 0.0) else {
            return Err(Error::LevelOutsideGrid {
                j,
                theta: grid.theta_min,
            });
        };
        if i + 2 >= grid.n || i == 0 {
            return Err(Error::LevelOutsideGrid {
                j,
                theta: grid.theta(i),
            });
        }

        let sums = [self.sums(e)?, self.sums(o)?];
        let (mut a, mut b) = (grid.theta(i), grid.theta(i + 1));
        let mut x = a - gs[i] * (b - a) / (gs[i + 1] - gs[i]);
        let mut resid = f64::INFINITY;
        let mut slope = 1.0;
        for _ in 0..100 {
            let (f, df) = self.f_at(&sums, x);
            let gx = g(x, f);
            slope = scale * x.exp() - 2.0 * df.im;
            resid = gx.abs();
            if resid < 1e-10 {
                break;
            }
            if gx < 0.0 {
                a = x;
            } else {
                b = x;
            }
            let newton = x - gx / slope;
            x = if slope > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if b - a < 1e-15 {
                break;
            }
        }
        if resid > 1e-8 {
            return Err(Error::NonConvergence {
                iterations: 100,
                residual: resid,
                history: Vec::new(),
            });
        }
        let energy = self.constants.energy_from_theta(x);
        // propagate the last fixed-point update through the quantization condition
        let mass = 2.0 * (t.total1.abs() + t.total2.abs());
        let dtheta = (resid + mass * self.final_residual()) / slope.abs().max(1e-300);
        Ok(Level {
            j,
            sign,
            parity,
            energy,
            theta: x,
            method: Method::Nlie,
            residual: resid,
            err_est: energy * dtheta / self.constants.mu,
        })
    }

    /// Levels `j = 0..=j_max` for both signs.
    pub fn spectrum(&self, j_max: usize) -> Result<Spectrum> {
        let mut s = Spectrum::new(self.spec.m, self.spec.alpha);
        for sign in Sign::both() {
            for j in 0..=j_max {
                s.levels.push(self.extract_level(j, sign)?);
            }
        }
        s.sort();
        s.check_monotone()?;
        Ok(s)
    }

    /// Rows `(θ, Re ln 𝔄^{(+)}, Im ln 𝔄^{(+)}, Re ln 𝔄^{(-)}, Im ln 𝔄^{(-)})`.
    pub fn export_ln_cap_a(&self) -> Vec<[f64; 5]> {
        let g = self.grid();
        (0..g.n)
            .map(|i| {
                let p = self.ln_cap_a[0][i];
                let m = self.ln_cap_a[1][i];
                [g.theta(i), p.re, p.im, m.re, m.im]
            })
            .collect()
    }
}

/// Sup-norm distance between two sampled functions modulo `2πi`.
pub fn distance_mod_2pi_i(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            let im = d.im - 2.0 * PI * (d.im / (2.0 * PI)).round();
            d.re.hypot(im)
        })
        .fold(0.0, f64::max)
}
