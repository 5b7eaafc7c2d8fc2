//! Fourier-integral kernels of the integral equations, their tabulation on a
//! rapidity grid, and FFT convolution with analytic left-tail corrections.
//!
//! Every kernel value is produced by one trapezoid rule in the frequency `w`:
//! `K(z) = -(1/π) Σ_k c_k dw f(w_k) cos(w_k z)`. The rule is spectrally
//! accurate because `f` is analytic in `|Im w| < 1`, and the step `dw` is
//! chosen so that the periodic images of `K` at spacing `2π/dw` fall far
//! outside the largest argument used on the grid.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance of the upper integration limit used for the second tail
/// integral `Q`.
const Q_SPAN: f64 = 45.0;
/// Extra room between the largest resolved argument and the first alias.
const ALIAS_MARGIN: f64 = 45.0;
/// Target truncation level for the frequency cutoff.
const CUTOFF_DECADES: f64 = 17.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    One,
    Two,
}

impl KernelKind {
    pub fn both() -> [KernelKind; 2] {
        [KernelKind::One, KernelKind::Two]
    }

    fn index(self) -> usize {
        match self {
            KernelKind::One => 0,
            KernelKind::Two => 1,
        }
    }

    /// Frequencies `(p, r)` of the numerator `sinh(pw) sinh(rw)`.
    fn numerator(self, m: f64) -> (f64, f64) {
        let a = PI * (m - 1.0) / (2.0 * m);
        match self {
            KernelKind::One => (a, a),
            KernelKind::Two => (PI * (m + 1.0) / (2.0 * m), a),
        }
    }
}

/// `f_kind(w)`, the Fourier transform of `-2π K_kind`.
pub fn kernel_integrand(w: f64, kind: KernelKind, m: f64) -> f64 {
    let w = w.abs();
    let (p, r) = kind.numerator(m);
    let s = PI / m;
    if w < 1e-4 {
        let lim = p * r / (PI * s);
        return lim * (1.0 + (p * p + r * r - PI * PI - s * s) * w * w / 6.0);
    }
    // sinh(x) = e^x (1 - e^{-2x}) / 2, which never overflows here.
    let num = libm::expm1(-2.0 * p * w) * libm::expm1(-2.0 * r * w);
    let den = libm::expm1(-2.0 * PI * w) * libm::expm1(-2.0 * s * w);
    ((p + r - PI - s) * w).exp() * num / den
}

/// `f_kind(0)`; the full-line integral of `K_kind` is `-f_kind(0)`.
pub fn kernel_limit(kind: KernelKind, m: f64) -> f64 {
    match kind {
        KernelKind::One => (m - 1.0).powi(2) / (4.0 * m),
        KernelKind::Two => (m * m - 1.0) / (4.0 * m),
    }
}

/// `G(θ) = log(q² sinh(Mθ/(M+1) + iπ/(M+1)) / sinh(Mθ/(M+1) - iπ/(M+1)))`.
pub fn g_of_theta(theta: Complex64, m: f64) -> Result<Complex64> {
    let i = Complex64::i();
    let x = theta * (m / (m + 1.0));
    let shift = i * (PI / (m + 1.0));
    let den = (x - shift).sinh();
    if den.norm() < 1e-300 {
        return Err(Error::PoleProximity(format!("G(θ) denominator vanishes at θ = {theta}")));
    }
    let q2 = Complex64::from_polar(1.0, 2.0 * PI / (m + 1.0));
    Ok((q2 * (x + shift).sinh() / den).ln())
}

/// Frequency quadrature shared by all kernel evaluations of one table.
#[derive(Debug, Clone)]
pub struct FourierRule {
    pub m: f64,
    pub dw: f64,
    pub w_cutoff: f64,
    w: Vec<f64>,
    /// `c_k dw f_kind(w_k)` per kind.
    fw: [Vec<f64>; 2],
    f0: [f64; 2],
}

impl FourierRule {
    /// Rule accurate for arguments `u + iσ` with `|u| <= span` and
    /// `|σ| <= max_shift`.
    pub fn new(m: f64, span: f64, max_shift: f64) -> Result<Self> {
        let decay = PI / m - max_shift.abs();
        if decay <= 0.05 {
            return Err(Error::InvalidConfig(format!(
                "contour shift {max_shift} leaves no kernel analyticity margin (limit π/M = {})",
                PI / m
            )));
        }
        let w_cutoff = CUTOFF_DECADES * std::f64::consts::LN_10 / decay + 2.0;
        let dw = 2.0 * PI / (span.abs() + Q_SPAN + ALIAS_MARGIN);
        let count = (w_cutoff / dw).ceil() as usize + 1;
        let w: Vec<f64> = (0..count).map(|k| k as f64 * dw).collect();
        let weight = |k: usize| if k == 0 { 0.5 * dw } else { dw };
        let fw = KernelKind::both()
            .map(|kind| (0..count).map(|k| weight(k) * kernel_integrand(w[k], kind, m)).collect());
        Ok(Self {
            m,
            dw,
            w_cutoff,
            w,
            fw,
            f0: KernelKind::both().map(|kind| kernel_limit(kind, m)),
        })
    }

    pub fn nodes(&self) -> usize {
        self.w.len()
    }

    /// `K_kind(z)` for complex `z`.
    pub fn kernel(&self, kind: KernelKind, z: Complex64) -> Complex64 {
        let fw = &self.fw[kind.index()];
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &w) in self.w.iter().enumerate() {
            acc += fw[k] * (z * w).cos();
        }
        -acc / PI
    }

    /// `dK_kind/dz`.
    pub fn kernel_derivative(&self, kind: KernelKind, z: Complex64) -> Complex64 {
        let fw = &self.fw[kind.index()];
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &w) in self.w.iter().enumerate().skip(1) {
            acc += fw[k] * w * (z * w).sin();
        }
        acc / PI
    }

    /// `P(z) = ∫_z^∞ K(v) dv` along the horizontal line through `z`.
    pub fn tail_p(&self, kind: KernelKind, z: Complex64) -> Complex64 {
        let fw = &self.fw[kind.index()];
        let mut acc = fw[0] * z;
        for k in 1..self.w.len() {
            let w = self.w[k];
            acc += fw[k] * (z * w).sin() / w;
        }
        -0.5 * self.f0[kind.index()] + acc / PI
    }

    /// `Q(z) = ∫_z^∞ P(v) dv` along the horizontal line through `z`.
    pub fn tail_q(&self, kind: KernelKind, z: Complex64) -> Complex64 {
        let fw = &self.fw[kind.index()];
        let v = z + Q_SPAN;
        let mut acc = fw[0] * 0.5 * (v * v - z * z);
        for k in 1..self.w.len() {
            let w = self.w[k];
            acc += fw[k] * ((z * w).cos() - (v * w).cos()) / (w * w);
        }
        -0.5 * self.f0[kind.index()] * Q_SPAN + acc / PI
    }
}

/// Accurate stand-alone value of `K_kind(θ)` on the real line.
pub fn kernel_value(theta: f64, kind: KernelKind, m: f64) -> Result<f64> {
    if !(m > 1.0) {
        return Err(Error::InvalidModel(format!("M must be > 1, got {m}")));
    }
    let rule = FourierRule::new(m, theta.abs(), 0.0)?;
    Ok(rule.kernel(kind, Complex64::new(theta, 0.0)).re)
}

/// Uniform rapidity grid `θ_i = θ_min + i h`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub theta_min: f64,
    pub theta_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(theta_min: f64, theta_max: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidConfig(format!("grid needs at least 3 points, got {n}")));
        }
        if !(theta_min.is_finite() && theta_max.is_finite() && theta_max > theta_min) {
            return Err(Error::InvalidConfig(format!(
                "invalid grid range [{theta_min}, {theta_max}]"
            )));
        }
        Ok(Self {
            theta_min,
            theta_max,
            n,
        })
    }

    pub fn h(&self) -> f64 {
        (self.theta_max - self.theta_min) / (self.n - 1) as f64
    }

    pub fn length(&self) -> f64 {
        self.theta_max - self.theta_min
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.theta_min + i as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.theta(i)).collect()
    }

    /// Trapezoid weight (in units of `h`).
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5
        } else {
            1.0
        }
    }
}

/// Horizontal line on which kernel arguments live, relative to the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Line {
    /// `σ = 0`.
    Real,
    /// `σ = -2δ`: pairs the unknown line with its mirror image.
    Below,
    /// `σ = +δ`: from the unknown line up to the real axis.
    Above,
}

/// Left-tail model of a sampled function: for `θ < θ_min` it is taken to be
/// `value + slope (θ - θ_min)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail {
    pub value: Complex64,
    pub slope: f64,
}

impl Tail {
    pub fn constant(value: Complex64) -> Self {
        Self { value, slope: 0.0 }
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    pub fn conj(self) -> Self {
        Self {
            value: self.value.conj(),
            slope: self.slope,
        }
    }
}

#[derive(Debug, Clone)]
struct ShiftedLine {
    kind: KernelKind,
    line: Line,
    /// Forward FFT of `h K(u + iσ)` on the cyclic lag buffer of length `2N`.
    spectrum: Vec<Complex64>,
    /// `P(θ_i - θ_min + iσ)`.
    p: Vec<Complex64>,
    /// `Q(θ_i - θ_min + iσ)`.
    q: Vec<Complex64>,
    /// `K(θ_i - θ_min + iσ)` and its derivative, for the endpoint correction.
    k: Vec<Complex64>,
    dk: Vec<Complex64>,
}

/// Forward FFT of a weighted, zero-padded grid function.
#[derive(Debug, Clone)]
pub struct Transformed(Vec<Complex64>);

/// Frequency sums `S∓_k = h Σ_n c_n g_n e^{∓i w_k θ_n}` that allow the
/// convolution to be evaluated at arbitrary `θ`.
#[derive(Debug, Clone)]
pub struct LineSums {
    minus: Vec<Complex64>,
    plus: Vec<Complex64>,
    tail: Tail,
}

/// Kernel samples on a grid plus everything needed to convolve with them.
#[derive(Clone)]
pub struct KernelTable {
    pub grid: Grid,
    pub m: f64,
    /// Contour shift `δ`, or 0 when only real-line data were tabulated.
    pub delta: f64,
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
    pub total1: f64,
    pub total2: f64,
    pub w_cutoff: f64,
    pub dw: f64,
    rule: FourierRule,
    lines: Vec<ShiftedLine>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for KernelTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelTable")
            .field("grid", &self.grid)
            .field("m", &self.m)
            .field("delta", &self.delta)
            .field("total1", &self.total1)
            .field("total2", &self.total2)
            .field("w_cutoff", &self.w_cutoff)
            .field("dw", &self.dw)
            .finish_non_exhaustive()
    }
}

impl KernelTable {
    /// Real-line table only.
    pub fn tabulate(grid: Grid, m: f64) -> Result<Self> {
        Self::build(grid, m, 0.0)
    }

    /// Table with the three lines used by the solver for contour shift `δ`.
    pub fn for_contour(grid: Grid, m: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidConfig(format!("contour shift must be positive, got {delta}")));
        }
        Self::build(grid, m, delta)
    }

    fn build(grid: Grid, m: f64, delta: f64) -> Result<Self> {
        if !(m > 1.0) {
            return Err(Error::InvalidModel(format!("M must be > 1, got {m}")));
        }
        let grid = Grid::new(grid.theta_min, grid.theta_max, grid.n)?;
        let h = grid.h();
        if h > 0.05 {
            return Err(Error::InvalidConfig(format!("grid spacing {h} exceeds 0.05")));
        }
        let rule = FourierRule::new(m, grid.length(), 2.0 * delta)?;
        let n = grid.n;

        let mut shifts = vec![(Line::Real, 0.0)];
        if delta > 0.0 {
            shifts.push((Line::Below, -2.0 * delta));
            shifts.push((Line::Above, delta));
        }
        let ns = shifts.len();
        let nw = rule.nodes();
        let hyper: Vec<(Vec<f64>, Vec<f64>)> = shifts
            .iter()
            .map(|&(_, s)| {
                (
                    rule.w.iter().map(|&w| (w * s).cosh()).collect(),
                    rule.w.iter().map(|&w| (w * s).sinh()).collect(),
                )
            })
            .collect();

        // Per lag u = i h and line: K(u+iσ), K(-u+iσ), P(u+iσ), Q(u+iσ) for both kinds.
        let rows: Vec<Vec<[Complex64; 10]>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let u = i as f64 * h;
                let mut acc = vec![[Complex64::new(0.0, 0.0); 10]; ns];
                for k in 0..nw {
                    let w = rule.w[k];
                    let (s1, c1) = (w * u).sin_cos();
                    let (s2, c2) = (w * (u + Q_SPAN)).sin_cos();
                    for (si, &(_, sigma)) in shifts.iter().enumerate() {
                        let ch = hyper[si].0[k];
                        let sh = hyper[si].1[k];
                        let cos_p = Complex64::new(c1 * ch, -s1 * sh);
                        let cos_m = Complex64::new(c1 * ch, s1 * sh);
                        let cos_v = Complex64::new(c2 * ch, -s2 * sh);
                        let sin_p = Complex64::new(s1 * ch, c1 * sh);
                        let (sin_over, q_term) = if k == 0 {
                            let z = Complex64::new(u, sigma);
                            let v = z + Q_SPAN;
                            (z, 0.5 * (v * v - z * z))
                        } else {
                            (sin_p / w, (cos_p - cos_v) / (w * w))
                        };
                        for kind in KernelKind::both() {
                            let f = rule.fw[kind.index()][k];
                            let b = 5 * kind.index();
                            let a = &mut acc[si];
                            a[b] += f * cos_p;
                            a[b + 1] += f * cos_m;
                            a[b + 2] += f * sin_over;
                            a[b + 3] += f * q_term;
                            a[b + 4] += f * w * sin_p;
                        }
                    }
                }
                for a in acc.iter_mut() {
                    for kind in KernelKind::both() {
                        let b = 5 * kind.index();
                        let f0 = rule.f0[kind.index()];
                        a[b] = -a[b] / PI;
                        a[b + 1] = -a[b + 1] / PI;
                        a[b + 2] = -0.5 * f0 + a[b + 2] / PI;
                        a[b + 3] = -0.5 * f0 * Q_SPAN + a[b + 3] / PI;
                        a[b + 4] /= PI;
                    }
                }
                acc
            })
            .collect();

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(2 * n);
        let inverse = planner.plan_fft_inverse(2 * n);

        let mut lines = Vec::with_capacity(2 * ns);
        for (si, &(line, _)) in shifts.iter().enumerate() {
            for kind in KernelKind::both() {
                let b = 5 * kind.index();
                let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
                for i in 0..n {
                    buf[i] = h * rows[i][si][b];
                    if i > 0 {
                        buf[2 * n - i] = h * rows[i][si][b + 1];
                    }
                }
                forward.process(&mut buf);
                lines.push(ShiftedLine {
                    kind,
                    line,
                    spectrum: buf,
                    p: (0..n).map(|i| rows[i][si][b + 2]).collect(),
                    q: (0..n).map(|i| rows[i][si][b + 3]).collect(),
                    k: (0..n).map(|i| rows[i][si][b]).collect(),
                    dk: (0..n).map(|i| rows[i][si][b + 4]).collect(),
                });
            }
        }

        let samples = |kind: KernelKind| -> Vec<f64> {
            (0..n)
                .into_par_iter()
                .map(|i| rule.kernel(kind, Complex64::new(grid.theta(i), 0.0)).re)
                .collect()
        };
        let k1 = samples(KernelKind::One);
        let k2 = samples(KernelKind::Two);

        // Trapezoid over all lags plus both analytic tails beyond them.
        let total = |kind: KernelKind| -> f64 {
            let b = 5 * kind.index();
            let mut s = 0.0;
            for (i, row) in rows.iter().enumerate() {
                let wgt = if i + 1 == n { 0.5 } else { 1.0 };
                let k_plus = row[0][b].re;
                let k_minus = row[0][b + 1].re;
                s += if i == 0 { k_plus } else { wgt * (k_plus + k_minus) };
            }
            s * h + 2.0 * rows[n - 1][0][b + 2].re
        };
        let total1 = total(KernelKind::One);
        let total2 = total(KernelKind::Two);

        Ok(Self {
            grid,
            m,
            delta,
            k1,
            k2,
            total1,
            total2,
            w_cutoff: rule.w_cutoff,
            dw: rule.dw,
            rule,
            lines,
            forward,
            inverse,
        })
    }

    pub fn rule(&self) -> &FourierRule {
        &self.rule
    }

    pub fn samples(&self, kind: KernelKind) -> &[f64] {
        match kind {
            KernelKind::One => &self.k1,
            KernelKind::Two => &self.k2,
        }
    }

    pub fn total(&self, kind: KernelKind) -> f64 {
        match kind {
            KernelKind::One => self.total1,
            KernelKind::Two => self.total2,
        }
    }

    /// Imaginary offset of a line.
    pub fn sigma(&self, line: Line) -> f64 {
        match line {
            Line::Real => 0.0,
            Line::Below => -2.0 * self.delta,
            Line::Above => self.delta,
        }
    }

    fn line(&self, kind: KernelKind, line: Line) -> Result<&ShiftedLine> {
        self.lines
            .iter()
            .find(|l| l.kind == kind && l.line == line)
            .ok_or_else(|| Error::InvalidConfig(format!("line {line:?} was not tabulated")))
    }

    fn check_len(&self, g: &[Complex64]) -> Result<()> {
        if g.len() != self.grid.n {
            return Err(Error::InvalidConfig(format!(
                "samples have length {}, grid has {} points",
                g.len(),
                self.grid.n
            )));
        }
        Ok(())
    }

    pub fn transform(&self, g: &[Complex64]) -> Result<Transformed> {
        self.check_len(g)?;
        let n = self.grid.n;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        for i in 0..n {
            buf[i] = g[i] * self.grid.weight(i);
        }
        self.forward.process(&mut buf);
        Ok(Transformed(buf))
    }

    /// `Σ coef · (K_kind(· + iσ_line) * g)` on the grid, without tail terms.
    pub fn combine(
        &self,
        terms: &[(KernelKind, Line, Complex64, &Transformed)],
    ) -> Result<Vec<Complex64>> {
        let n = self.grid.n;
        let mut acc = vec![Complex64::new(0.0, 0.0); 2 * n];
        for &(kind, line, coef, g) in terms {
            let l = self.line(kind, line)?;
            for (a, (k, x)) in acc.iter_mut().zip(l.spectrum.iter().zip(g.0.iter())) {
                *a += coef * k * x;
            }
        }
        self.inverse.process(&mut acc);
        let scale = 1.0 / (2 * n) as f64;
        acc.truncate(n);
        for a in acc.iter_mut() {
            *a *= scale;
        }
        Ok(acc)
    }

    /// Contribution of the part of the integral left of `θ_min`, per grid
    /// point, together with the leading Euler-Maclaurin correction of the
    /// trapezoid rule at that end.
    pub fn tail_correction(&self, kind: KernelKind, line: Line, tail: Tail) -> Result<Vec<Complex64>> {
        let l = self.line(kind, line)?;
        let em = self.grid.h().powi(2) / 12.0;
        Ok((0..self.grid.n)
            .map(|i| {
                tail.value * l.p[i] - tail.slope * l.q[i]
                    + em * (tail.slope * l.k[i] - tail.value * l.dk[i])
            })
            .collect())
    }

    /// `∫ K_kind(θ - θ' + iσ) g(θ') dθ'` on the grid.
    pub fn convolve_on(
        &self,
        kind: KernelKind,
        line: Line,
        g: &[Complex64],
        tail: Tail,
    ) -> Result<Vec<Complex64>> {
        let t = self.transform(g)?;
        let mut out = self.combine(&[(kind, line, Complex64::new(1.0, 0.0), &t)])?;
        for (o, c) in out.iter_mut().zip(self.tail_correction(kind, line, tail)?) {
            *o += c;
        }
        Ok(out)
    }

    /// Real-line convolution; `tail_const` is the limit of `g` at `θ → -∞`.
    pub fn convolve(&self, kind: KernelKind, g: &[Complex64], tail_const: Complex64) -> Result<Vec<Complex64>> {
        self.convolve_on(kind, Line::Real, g, Tail::constant(tail_const))
    }

    pub fn line_sums(&self, g: &[Complex64], tail: Tail) -> Result<LineSums> {
        self.check_len(g)?;
        let h = self.grid.h();
        let weighted: Vec<(f64, Complex64)> = (0..self.grid.n)
            .map(|i| (self.grid.theta(i), g[i] * (h * self.grid.weight(i))))
            .collect();
        let (minus, plus): (Vec<Complex64>, Vec<Complex64>) = self
            .rule
            .w
            .par_iter()
            .map(|&w| {
                let mut sm = Complex64::new(0.0, 0.0);
                let mut sp = Complex64::new(0.0, 0.0);
                for &(t, v) in &weighted {
                    let (s, c) = (w * t).sin_cos();
                    sm += v * Complex64::new(c, -s);
                    sp += v * Complex64::new(c, s);
                }
                (sm, sp)
            })
            .unzip();
        Ok(LineSums { minus, plus, tail })
    }

    /// `∫ K_kind(θ - θ' + iσ) g(θ') dθ'` and its `θ`-derivative at any real `θ`.
    pub fn integral_at(&self, kind: KernelKind, sums: &LineSums, theta: f64, sigma: f64) -> (Complex64, Complex64) {
        let fw = &self.rule.fw[kind.index()];
        let z = Complex64::new(theta, sigma);
        let i = Complex64::i();
        let mut val = Complex64::new(0.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        for (k, &w) in self.rule.w.iter().enumerate() {
            let ep = (i * w * z).exp();
            let em = (-i * w * z).exp();
            let a = ep * sums.minus[k];
            let b = em * sums.plus[k];
            val += fw[k] * (a + b);
            der += fw[k] * i * w * (a - b);
        }
        val *= -0.5 / PI;
        der *= -0.5 / PI;
        let d = Complex64::new(theta - self.grid.theta_min, sigma);
        let tail = sums.tail;
        let p = self.rule.tail_p(kind, d);
        let k = self.rule.kernel(kind, d);
        let em = self.grid.h().powi(2) / 12.0;
        val += tail.value * p - tail.slope * self.rule.tail_q(kind, d)
            + em * (tail.slope * k - tail.value * self.rule.kernel_derivative(kind, d));
        der += -tail.value * k + tail.slope * p;
        (val, der)
    }

    /// Writes `theta,k1,k2` rows preceded by a `#` line identifying the table.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "# {}", self.cache_key())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta", "k1", "k2"]).map_err(csv_err)?;
        for i in 0..self.grid.n {
            w.write_record([
                format!("{:e}", self.grid.theta(i)),
                format!("{:e}", self.k1[i]),
                format!("{:e}", self.k2[i]),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Cache identity of the tabulated samples.
    pub fn cache_key(&self) -> String {
        format!(
            "M={:e} theta_min={:e} theta_max={:e} n={} w_cutoff={:e}",
            self.m, self.grid.theta_min, self.grid.theta_max, self.grid.n, self.w_cutoff
        )
    }

    /// Reads kernel samples written by [`KernelTable::write_csv`], checking
    /// that they belong to this table.
    pub fn read_cached_samples<R: Read>(&self, input: R) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut text = String::new();
        let mut input = input;
        input.read_to_string(&mut text)?;
        let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
        if first.trim_start_matches('#').trim() != self.cache_key() {
            return Err(Error::InvalidConfig("kernel cache key mismatch".into()));
        }
        let mut r = csv::Reader::from_reader(rest.as_bytes());
        let mut k1 = Vec::new();
        let mut k2 = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let parse = |j: usize| -> Result<f64> {
                rec.get(j)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::InvalidConfig("malformed kernel cache row".into()))
            };
            k1.push(parse(1)?);
            k2.push(parse(2)?);
        }
        if k1.len() != self.grid.n {
            return Err(Error::InvalidConfig("kernel cache has the wrong length".into()));
        }
        Ok((k1, k2))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn integrand_limits_and_symmetry() {
        let m = 3.0;
        assert!((kernel_integrand(0.0, KernelKind::One, m) - 1.0 / 3.0).abs() < 1e-15);
        assert!((kernel_integrand(0.0, KernelKind::Two, m) - 2.0 / 3.0).abs() < 1e-15);
        for &w in &[1e-5, 0.3, 2.0, 40.0] {
            for kind in KernelKind::both() {
                assert_eq!(kernel_integrand(w, kind, m), kernel_integrand(-w, kind, m));
            }
        }
        // the series and closed form meet smoothly
        for kind in KernelKind::both() {
            let a = kernel_integrand(0.99999e-4, kind, m);
            let b = kernel_integrand(1.00001e-4, kind, m);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn integrand_matches_plain_sinh_form() {
        let m = 3.0;
        let w: f64 = 1.0;
        let a = PI * (m - 1.0) / (2.0 * m);
        let den = (PI * w).sinh() * (PI * w / m).sinh();
        let f1 = (a * w).sinh().powi(2) / den;
        let f2 = (PI * (m + 1.0) * w / (2.0 * m)).sinh() * (a * w).sinh() / den;
        assert!((kernel_integrand(w, KernelKind::One, m) - f1).abs() < 1e-14);
        assert!((kernel_integrand(w, KernelKind::Two, m) - f2).abs() < 1e-14);
        // far tail is finite and tiny
        let far = kernel_integrand(200.0, KernelKind::Two, m);
        assert!(far.is_finite() && far > 0.0 && far < 1e-80);
        assert_eq!(kernel_integrand(1e4, KernelKind::Two, m), 0.0);
    }

    #[test]
    fn g_values() {
        let m = 3.0;
        let g0 = g_of_theta(c(0.0), m).unwrap();
        assert!(g0.re.abs() < 1e-14);
        assert!((g0.im + PI / 2.0).abs() < 1e-14);
        let far = g_of_theta(c(40.0), m).unwrap();
        let q4 = Complex64::from_polar(1.0, 4.0 * PI / (m + 1.0));
        assert!((far.exp() - q4).norm() < 1e-12);
        for &t in &[-2.0, 0.7, 3.0] {
            let g = g_of_theta(c(t), m).unwrap();
            assert!(g.re.abs() < 1e-13, "unimodular argument at {t}");
        }
    }

    /// Composite Gauss-Legendre on [0, W] as an independent quadrature.
    fn brute_kernel(theta: f64, kind: KernelKind, m: f64) -> f64 {
        let gl = gauss_quad::GaussLegendre::new(20.try_into().unwrap());
        let mut s = 0.0;
        let panels = 2000;
        let width = 80.0 / panels as f64;
        for p in 0..panels {
            let a = p as f64 * width;
            s += gl.integrate(a, a + width, |w| (w * theta).cos() * kernel_integrand(w, kind, m));
        }
        -s / PI
    }

    #[test]
    fn kernel_value_matches_independent_quadrature() {
        for &t in &[0.0, 0.5, 1.0, 3.0, 8.0] {
            for kind in KernelKind::both() {
                let a = kernel_value(t, kind, 3.0).unwrap();
                let b = brute_kernel(t, kind, 3.0);
                assert!((a - b).abs() < 1e-10, "{kind:?} θ={t}: {a} vs {b}");
                let neg = kernel_value(-t, kind, 3.0).unwrap();
                assert!((a - neg).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kernels_vanish_as_m_approaches_one() {
        for kind in KernelKind::both() {
            let v = kernel_value(0.5, kind, 1.0 + 1e-6).unwrap();
            assert!(v.abs() < 1e-5, "{v}");
        }
    }

    #[test]
    fn tails_match_direct_integration() {
        let rule = FourierRule::new(3.0, 40.0, 0.2).unwrap();
        let gl = gauss_quad::GaussLegendre::new(30.try_into().unwrap());
        for &sigma in &[0.0, -0.2, 0.1] {
            for &d in &[0.0, 1.5, 6.0] {
                let z = Complex64::new(d, sigma);
                for kind in KernelKind::both() {
                    // P by integrating K from d to d + 60
                    let mut p = Complex64::new(0.0, 0.0);
                    let mut q = Complex64::new(0.0, 0.0);
                    for k in 0..120 {
                        let a = d + 0.5 * k as f64;
                        p += Complex64::new(
                            gl.integrate(a, a + 0.5, |u| rule.kernel(kind, Complex64::new(u, sigma)).re),
                            gl.integrate(a, a + 0.5, |u| rule.kernel(kind, Complex64::new(u, sigma)).im),
                        );
                        q += Complex64::new(
                            gl.integrate(a, a + 0.5, |u| ((u - d) * rule.kernel(kind, Complex64::new(u, sigma))).re),
                            gl.integrate(a, a + 0.5, |u| ((u - d) * rule.kernel(kind, Complex64::new(u, sigma))).im),
                        );
                    }
                    assert!((rule.tail_p(kind, z) - p).norm() < 1e-11, "P {kind:?} {z}");
                    assert!((rule.tail_q(kind, z) - q).norm() < 1e-10, "Q {kind:?} {z}");
                }
            }
        }
    }

    #[test]
    fn table_invariants() {
        assert!(KernelTable::tabulate(Grid { theta_min: 0.0, theta_max: 1.0, n: 2 }, 3.0).is_err());
        assert!(KernelTable::tabulate(Grid::new(-20.0, 20.0, 100).unwrap(), 3.0).is_err());
        let grid = Grid::new(-16.0, 16.0, 4096).unwrap();
        let t = KernelTable::tabulate(grid, 3.0).unwrap();
        let n = grid.n;
        for i in 0..n / 2 {
            assert!((t.k1[i] - t.k1[n - 1 - i]).abs() < 1e-12);
            assert!((t.k2[i] - t.k2[n - 1 - i]).abs() < 1e-12);
        }
        assert!((t.total1 + 1.0 / 3.0).abs() < 1e-8, "{}", t.total1);
        assert!((t.total2 + 2.0 / 3.0).abs() < 1e-8, "{}", t.total2);
    }

    #[test]
    fn constant_convolution_gives_total() {
        let grid = Grid::new(-20.0, 12.0, 1024).unwrap();
        let t = KernelTable::for_contour(grid, 3.0, 0.1).unwrap();
        let cst = Complex64::new(0.3, -1.2);
        let g = vec![cst; grid.n];
        for kind in KernelKind::both() {
            let out = t.convolve(kind, &g, cst).unwrap();
            // interior: away from the O(h²) endpoint error on the left and
            // from the right edge where the data stop
            for i in grid.n / 16..grid.n / 2 {
                assert!((out[i] - cst * t.total(kind)).norm() < 1e-6, "{i} {}", (out[i] - cst * t.total(kind)).norm());
            }
            let zero = t.convolve(kind, &vec![c(0.0); grid.n], c(0.0)).unwrap();
            assert!(zero.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn fft_convolution_matches_direct_sum() {
        let grid = Grid::new(-12.0, 10.0, 512).unwrap();
        let t = KernelTable::for_contour(grid, 3.0, 0.1).unwrap();
        let h = grid.h();
        let g: Vec<Complex64> = grid
            .points()
            .iter()
            .map(|&x| Complex64::new((-(x + 1.0).powi(2)).exp(), 0.5 * (-(x - 2.0).powi(2) / 3.0).exp()))
            .collect();
        for line in [Line::Real, Line::Below, Line::Above] {
            let sigma = t.sigma(line);
            for kind in KernelKind::both() {
                let fast = t.convolve_on(kind, line, &g, Tail::zero()).unwrap();
                for i in (0..grid.n).step_by(37) {
                    let mut s = Complex64::new(0.0, 0.0);
                    for j in 0..grid.n {
                        let u = Complex64::new(grid.theta(i) - grid.theta(j), sigma);
                        s += grid.weight(j) * h * t.rule().kernel(kind, u) * g[j];
                    }
                    assert!((fast[i] - s).norm() < 1e-12, "{line:?} {kind:?} i={i}");
                }
            }
        }
    }

    #[test]
    fn point_evaluation_agrees_with_grid_convolution() {
        let grid = Grid::new(-16.0, 8.0, 1024).unwrap();
        let t = KernelTable::for_contour(grid, 3.0, 0.1).unwrap();
        let g: Vec<Complex64> = grid
            .points()
            .iter()
            .map(|&x| Complex64::new(0.4, 0.9) * (1.0 - (x / 3.0).tanh()) / 2.0)
            .collect();
        let tail = Tail {
            value: g[0],
            slope: 0.7,
        };
        let on_grid = t.convolve_on(KernelKind::Two, Line::Above, &g, tail).unwrap();
        let sums = t.line_sums(&g, tail).unwrap();
        for i in [0usize, 100, 500, 900] {
            let (v, _) = t.integral_at(KernelKind::Two, &sums, grid.theta(i), t.delta);
            assert!((v - on_grid[i]).norm() < 1e-11, "i={i}");
        }
        // derivative against a centered difference
        let x = -1.234;
        let e = 1e-5;
        let (_, d) = t.integral_at(KernelKind::One, &sums, x, t.delta);
        let (a, _) = t.integral_at(KernelKind::One, &sums, x + e, t.delta);
        let (b, _) = t.integral_at(KernelKind::One, &sums, x - e, t.delta);
        assert!((d - (a - b) / (2.0 * e)).norm() < 1e-8);
    }

    #[test]
    fn csv_cache_round_trip() {
        let grid = Grid::new(-4.0, 4.0, 201).unwrap();
        let t = KernelTable::tabulate(grid, 3.0).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let (k1, k2) = t.read_cached_samples(buf.as_slice()).unwrap();
        assert_eq!(k1, t.k1);
        assert_eq!(k2, t.k2);
        let other = KernelTable::tabulate(Grid::new(-4.0, 4.0, 203).unwrap(), 3.0).unwrap();
        assert!(other.read_cached_samples(buf.as_slice()).is_err());
    }
}
