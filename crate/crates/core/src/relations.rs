//! Spectral determinants, Stokes multipliers from Wronskians at `x = 0`,
//! fused Stokes matrices, the three forms of `T₁,₁`, Bethe residuals and
//! the `α = M` duality.
//!
//! The solutions are `y_j^{(σ)}(x) = P_j^{(σ)} φ(x q^{-j}, σα, q^{2j}E)` with
//! `P_j^{(σ)} = q^{j/2 + (1-j)σα/2} / √(2i)`. This normalization makes
//! `W[y_j^{(σ)}, y_{j+1}^{(-σ)}] = 1` for every `j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{odd_half_index, Hamiltonian, Parity, Sign, SpectralConstants};
use crate::oracle::{phi_at_origin, sector_energies, spectrum_oracle, wavefunction, ConnectionPoint, IntegratorConfig};

type C = Complex64;

/// Terms summed explicitly beyond the stored levels before switching to
/// the integral of the fitted tail.
const TAIL_TERMS: usize = 400;

/// `D(E) = ∏ (1 - E/E_j)` over one `(ε, ε')` family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDeterminant {
    pub m: f64,
    pub alpha: f64,
    pub sign: Sign,
    pub parity: Parity,
    pub eigenvalues: Vec<f64>,
    /// `E_j^μ ≈ slope (j + offset)` beyond the stored levels.
    pub tail_slope: f64,
    pub tail_offset: f64,
    pub with_tail: bool,
}

impl SpectralDeterminant {
    pub fn from_levels(m: f64, alpha: f64, sign: Sign, parity: Parity, eigenvalues: Vec<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        if n < 3 {
            return Err(Error::InvalidConfig("a determinant needs at least three levels".into()));
        }
        if eigenvalues.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidConfig("determinant levels must be positive".into()));
        }
        let mu = SpectralConstants::new(m)?.mu;
        let a = eigenvalues[n - 1].powf(mu);
        let b = eigenvalues[n - 2].powf(mu);
        let slope = a - b;
        let offset = a / slope - (n - 1) as f64;
        Ok(Self {
            m,
            alpha,
            sign,
            parity,
            eigenvalues,
            tail_slope: slope,
            tail_offset: offset,
            with_tail: true,
        })
    }

    /// The lowest `n` levels of the family from the shooting oracle.
    pub fn from_oracle(
        m: f64,
        alpha: f64,
        sign: Sign,
        parity: Parity,
        n: usize,
        cfg: &IntegratorConfig,
    ) -> Result<Self> {
        let spec = crate::model::ModelSpec::new(m, alpha, sign, parity)?;
        let e = sector_energies(&spec, n, cfg)?;
        Self::from_levels(m, alpha, sign, parity, e)
    }

    /// The same family cut to its lowest `n` levels, tail refitted.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        let mut d = Self::from_levels(
            self.m,
            self.alpha,
            self.sign,
            self.parity,
            self.eigenvalues[..n.min(self.eigenvalues.len())].to_vec(),
        )?;
        d.with_tail = self.with_tail;
        Ok(d)
    }

    pub fn without_tail(mut self) -> Self {
        self.with_tail = false;
        self
    }

    fn tail_level(&self, j: f64) -> f64 {
        let mu = SpectralConstants::new(self.m).map(|c| c.mu).unwrap_or(0.5);
        (self.tail_slope * (j + self.tail_offset)).powf(1.0 / mu)
    }

    /// `ln ∏_{j >= N} (1 - E/E_j)` with the fitted levels.
    fn ln_tail(&self, e: C) -> C {
        let n = self.eigenvalues.len();
        let mut s = C::new(0.0, 0.0);
        for j in n..n + TAIL_TERMS {
            s += (1.0 - e / self.tail_level(j as f64)).ln();
        }
        // remaining sum by Euler–Maclaurin on -z - z²/2, z = E/E_j
        let mu = SpectralConstants::new(self.m).map(|c| c.mu).unwrap_or(0.5);
        let p = 1.0 / mu;
        let j0 = (n + TAIL_TERMS) as f64 + self.tail_offset;
        let a = self.tail_slope;
        // ∫_{J}^{∞} (a t)^{-p} dt = a^{-p} J^{1-p} / (p - 1)
        let int1 = a.powf(-p) * j0.powf(1.0 - p) / (p - 1.0);
        let int2 = a.powf(-2.0 * p) * j0.powf(1.0 - 2.0 * p) / (2.0 * p - 1.0);
        let f1 = (a * j0).powf(-p);
        let f2 = f1 * f1;
        let d1 = -p * a.powf(-p) * j0.powf(-p - 1.0);
        let d2 = -2.0 * p * a.powf(-2.0 * p) * j0.powf(-2.0 * p - 1.0);
        let sum1 = int1 + 0.5 * f1 - d1 / 12.0;
        let sum2 = int2 + 0.5 * f2 - d2 / 12.0;
        s - e * sum1 - 0.5 * e * e * sum2
    }

    /// `D(E)` and a relative truncation estimate (a tenth of the tail's
    /// contribution).
    pub fn value(&self, e: C) -> Result<(C, f64)> {
        let largest = *self.eigenvalues.last().unwrap();
        if e.norm() > 0.25 * largest {
            return Err(Error::OutsideValidRegion {
                energy: e.norm(),
                reason: format!("|E| beyond a quarter of the largest stored level {largest}"),
            });
        }
        let mut prod = C::new(1.0, 0.0);
        for &ej in &self.eigenvalues {
            prod *= 1.0 - e / ej;
        }
        if !self.with_tail {
            let next = self.tail_level(self.eigenvalues.len() as f64);
            return Ok((prod, e.norm() / next * self.eigenvalues.len() as f64));
        }
        let lt = self.ln_tail(e);
        Ok((prod * lt.exp(), 0.1 * lt.norm()))
    }

    pub fn eval(&self, e: C) -> Result<C> {
        Ok(self.value(e)?.0)
    }
}

/// Four families of one coupling `α`, indexed by sign and parity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminantSet {
    pub m: f64,
    pub alpha: f64,
    pub plus_even: SpectralDeterminant,
    pub plus_odd: SpectralDeterminant,
    pub minus_even: SpectralDeterminant,
    pub minus_odd: SpectralDeterminant,
}

impl DeterminantSet {
    pub fn from_oracle(m: f64, alpha: f64, n: usize, cfg: &IntegratorConfig) -> Result<Self> {
        let d = |s, p| SpectralDeterminant::from_oracle(m, alpha, s, p, n, cfg);
        Ok(Self {
            m,
            alpha,
            plus_even: d(Sign::Plus, Parity::Even)?,
            plus_odd: d(Sign::Plus, Parity::Odd)?,
            minus_even: d(Sign::Minus, Parity::Even)?,
            minus_odd: d(Sign::Minus, Parity::Odd)?,
        })
    }

    pub fn get(&self, sign: Sign, parity: Parity) -> &SpectralDeterminant {
        match (sign, parity) {
            (Sign::Plus, Parity::Even) => &self.plus_even,
            (Sign::Plus, Parity::Odd) => &self.plus_odd,
            (Sign::Minus, Parity::Even) => &self.minus_even,
            (Sign::Minus, Parity::Odd) => &self.minus_odd,
        }
    }

    pub fn truncated(&self, n: usize) -> Result<Self> {
        Ok(Self {
            m: self.m,
            alpha: self.alpha,
            plus_even: self.plus_even.truncated(n)?,
            plus_odd: self.plus_odd.truncated(n)?,
            minus_even: self.minus_even.truncated(n)?,
            minus_odd: self.minus_odd.truncated(n)?,
        })
    }

    pub fn without_tail(&self) -> Self {
        Self {
            m: self.m,
            alpha: self.alpha,
            plus_even: self.plus_even.clone().without_tail(),
            plus_odd: self.plus_odd.clone().without_tail(),
            minus_even: self.minus_even.clone().without_tail(),
            minus_odd: self.minus_odd.clone().without_tail(),
        }
    }

    fn q(&self, p: f64) -> C {
        C::from_polar(1.0, PI * p / (self.m + 1.0))
    }

    /// Three-term form built from odd-parity determinants.
    pub fn t11_dvf_minus(&self, e: C) -> Result<C> {
        let a = self.alpha;
        let dp = &self.plus_odd;
        let dm = &self.minus_odd;
        let q2 = self.q(2.0);
        let q4 = q2 * q2;
        let q6 = q4 * q2;
        let r1 = dp.eval(e)? / dp.eval(q4 * e)?;
        let r3 = dm.eval(q6 * e)? / dm.eval(q2 * e)?;
        Ok(self.q(a - 1.0) * r1 + self.q(2.0 * a) * r1 * r3 + self.q(a + 1.0) * r3)
    }

    /// Three-term form built from even-parity determinants.
    pub fn t11_dvf_plus(&self, e: C) -> Result<C> {
        let a = self.alpha;
        let dp = &self.plus_even;
        let dm = &self.minus_even;
        let q2 = self.q(2.0);
        let q4 = q2 * q2;
        let q6 = q4 * q2;
        let r1 = dp.eval(e)? / dp.eval(q4 * e)?;
        let r3 = dm.eval(q6 * e)? / dm.eval(q2 * e)?;
        Ok(self.q(a + 1.0) * r1 + self.q(2.0 * a) * r1 * r3 + self.q(a - 1.0) * r3)
    }

    /// `𝔞^{(ε)}_{ε'}(E) = q^{εα-ε'} D^{(-ε)}_{ε'}(q²E) / D^{(-ε)}_{ε'}(q^{-2}E)`.
    pub fn aux_a(&self, sign: Sign, parity: Parity, e: C) -> Result<C> {
        let d = self.get(sign.flip(), parity);
        let q2 = self.q(2.0);
        let pre = self.q(sign.value() * self.alpha - parity.value());
        Ok(pre * d.eval(q2 * e)? / d.eval(e / q2)?)
    }

    /// `1 + 𝔞^{(ε)}_{ε'}(E)`, which vanishes at the levels of that family.
    pub fn bethe_residual(&self, sign: Sign, parity: Parity, e: f64) -> Result<C> {
        Ok(1.0 + self.aux_a(sign, parity, C::new(e, 0.0))?)
    }
}

/// 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesMatrix {
    pub entries: [[C; 2]; 2],
    /// Number of single steps fused.
    pub steps: usize,
    pub sign: Sign,
    pub energy: C,
}

impl StokesMatrix {
    pub fn det(&self) -> C {
        let a = self.entries;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }

    fn mul(&self, rhs: &StokesMatrix) -> StokesMatrix {
        let (a, b) = (self.entries, rhs.entries);
        let mut c = [[C::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        StokesMatrix {
            entries: c,
            steps: self.steps + rhs.steps,
            sign: rhs.sign,
            energy: rhs.energy,
        }
    }
}

/// Connection data at `x = 0` for the pair `H^{(±)}(x, α)`.
#[derive(Debug, Clone)]
pub struct Connection {
    pub m: f64,
    pub alpha: f64,
    pub cfg: IntegratorConfig,
    /// Largest accepted `quality` of a connection point.
    pub max_quality: f64,
}

impl Connection {
    pub fn new(m: f64, alpha: f64, cfg: IntegratorConfig) -> Result<Self> {
        Hamiltonian::new(m, alpha)?;
        Ok(Self {
            m,
            alpha,
            cfg,
            max_quality: 1e-7,
        })
    }

    fn q(&self, p: f64) -> C {
        C::from_polar(1.0, PI * p / (self.m + 1.0))
    }

    pub fn phi(&self, sign: Sign, e: C) -> Result<ConnectionPoint> {
        let h = Hamiltonian::new(self.m, sign.value() * self.alpha)?;
        let cp = phi_at_origin(&h, e, &self.cfg)?;
        if cp.quality > self.max_quality {
            return Err(Error::Verification(format!(
                "connection data at E = {e} has quality {:.2e}",
                cp.quality
            )));
        }
        Ok(cp)
    }

    /// `P_j^{(σ)}`.
    pub fn prefactor(&self, j: i32, sign: Sign) -> C {
        let two_i = C::new(0.0, 2.0).sqrt();
        self.q(j as f64 / 2.0 + (1 - j) as f64 * sign.value() * self.alpha / 2.0) / two_i
    }

    /// `(y_j^{(σ)}(0), ∂_x y_j^{(σ)}(0))`.
    pub fn y_at_origin(&self, j: i32, sign: Sign, e: C) -> Result<(C, C)> {
        let cp = self.phi(sign, self.q(2.0 * j as f64) * e)?;
        let p = self.prefactor(j, sign);
        Ok((p * cp.value(), p * self.q(-(j as f64)) * cp.derivative()))
    }

    pub fn wronskian(&self, a: (i32, Sign), b: (i32, Sign), e: C) -> Result<C> {
        let (ya, da) = self.y_at_origin(a.0, a.1, e)?;
        let (yb, db) = self.y_at_origin(b.0, b.1, e)?;
        Ok(ya * db - da * yb)
    }

    /// `W[y_j^{(σ)}, y_{j+1}^{(-σ)}]`, which should be one.
    pub fn step_wronskian(&self, j: i32, sign: Sign, e: C) -> Result<C> {
        self.wronskian((j, sign), (j + 1, sign.flip()), e)
    }

    /// `τ_j^{(ε)}(E) = W[y_j^{(ε)}, y_{j+2}^{(ε)}]`.
    pub fn tau(&self, j: i32, sign: Sign, e: C) -> Result<C> {
        self.wronskian((j, sign), (j + 2, sign), e)
    }

    /// `τ_j^{(ε)}` rebuilt from `τ_0^{(ε)}` at the rotated energy; equals
    /// [`tau`](Self::tau).
    pub fn tau_shifted(&self, j: i32, sign: Sign, e: C) -> Result<C> {
        let t0 = self.tau(0, sign, self.q(2.0 * j as f64) * e)?;
        Ok(self.q(-(j as f64) * sign.value() * self.alpha) * t0)
    }

    pub fn single_step(&self, j: i32, sign: Sign, e: C) -> Result<StokesMatrix> {
        let t = self.tau(j, sign, e)?;
        Ok(StokesMatrix {
            entries: [[t, C::new(1.0, 0.0)], [C::new(-1.0, 0.0), C::new(0.0, 0.0)]],
            steps: 1,
            sign,
            energy: e,
        })
    }

    /// `M_{0,2k}^{(ε)}` as the product of single steps with alternating sign.
    pub fn fusion_matrix(&self, k: usize, sign: Sign, e: C) -> Result<StokesMatrix> {
        let mut acc = self.single_step(0, sign, e)?;
        let mut s = sign;
        for j in 1..(2 * k) as i32 {
            s = s.flip();
            acc = self.single_step(j, s, e)?.mul(&acc);
        }
        acc.sign = sign;
        Ok(acc)
    }

    /// The same matrix from its closed Wronskian entries.
    pub fn fusion_matrix_direct(&self, k: usize, sign: Sign, e: C) -> Result<StokesMatrix> {
        let k2 = 2 * k as i32;
        let f = sign.flip();
        let w = |a, b| self.wronskian(a, b, e);
        Ok(StokesMatrix {
            entries: [
                [w((0, sign), (k2 + 1, f))?, w((1, f), (k2 + 1, f))?],
                [-w((0, sign), (k2, sign))?, -w((1, f), (k2, sign))?],
            ],
            steps: 2 * k,
            sign,
            energy: e,
        })
    }

    /// `τ^{(-)}_1 τ^{(+)}_0 - 1`.
    pub fn t11_wronskian(&self, e: C) -> Result<C> {
        Ok(self.tau(1, Sign::Minus, e)? * self.tau(0, Sign::Plus, e)? - 1.0)
    }

    /// `φ(0, εα, E) ∂φ(0, εα, E)` times `q^{(1-m)εα}`: the `(2,1)` entry of
    /// `M_{0,2m}^{(ε)}` in the present normalization.
    pub fn fused_21_from_phi(&self, sign: Sign, e: C) -> Result<C> {
        let m = odd_half_index(self.m)? as f64;
        let cp = self.phi(sign, e)?;
        Ok(self.q((1.0 - m) * sign.value() * self.alpha) * cp.value() * cp.derivative())
    }

    /// The literal prefactor form `-q^{εα(m+1)} φ(0) ∂φ(0)`. Agrees with
    /// [`fused_21_from_phi`](Self::fused_21_from_phi) when `α` is an odd
    /// integer.
    pub fn fused_21_literal(&self, sign: Sign, e: C) -> Result<C> {
        let m = odd_half_index(self.m)? as f64;
        let cp = self.phi(sign, e)?;
        Ok(-self.q(sign.value() * self.alpha * (m + 1.0)) * cp.value() * cp.derivative())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// `max_j |E^{(+)}_j - E^{(-)}_{j+1}| / E^{(+)}_j`.
    pub max_rel_diff: f64,
    pub zero_mode: f64,
    /// Largest `|H^{(-)} e^{-x^{M+1}/(M+1)}|` on `[0, 3]`.
    pub zero_mode_residual: f64,
    /// `E^{(-)}_1` and the Rayleigh quotient of `(d/dx + x^M) ψ^{(-)}_1`
    /// under `H^{(+)}`.
    pub factorized_level: f64,
    pub rayleigh_quotient: f64,
}

/// Spectra of `H^{(±)}` at `α = M`, the zero mode and the factorization.
pub fn duality_check(m: f64, n_levels: usize, cfg: &IntegratorConfig) -> Result<DualityReport> {
    let plus = spectrum_oracle(m, m, Sign::Plus, n_levels, cfg)?;
    let minus = spectrum_oracle(m, m, Sign::Minus, n_levels + 1, cfg)?;
    let p: Vec<f64> = plus.levels.iter().map(|l| l.energy).collect();
    let mi: Vec<f64> = minus.levels.iter().map(|l| l.energy).collect();
    let max_rel_diff = p
        .iter()
        .zip(mi.iter().skip(1))
        .map(|(a, b)| ((a - b) / a).abs())
        .fold(0.0, f64::max);
    let hm = Hamiltonian::new(m, -m)?;
    let zero_mode_residual = (0..=300)
        .map(|i| {
            let x = 3.0 * i as f64 / 300.0;
            let psi = (-x.powf(m + 1.0) / (m + 1.0)).exp();
            let dd = (x.powf(2.0 * m) - m * x.powf(m - 1.0)) * psi;
            (-dd + hm.potential(x) * psi).abs()
        })
        .fold(0.0, f64::max);

    // (d/dx + x^M) ψ^{(-)}_1 is an eigenfunction of H^{(+)}
    let e1 = mi[1];
    let mut fine = *cfg;
    fine.rtol = fine.rtol.min(1e-11);
    let samples = wavefunction(&hm, e1, &fine)?;
    let hp = Hamiltonian::new(m, m)?;
    let chi: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|&[x, psi, dpsi]| {
            let xm = x.powf(m);
            let c = dpsi + xm * psi;
            let dc = (hm.potential(x) - e1) * psi + m * x.powf(m - 1.0) * psi + xm * dpsi;
            (x, c, dc)
        })
        .collect();
    // trapezoid with the h²/12 endpoint-derivative correction; χ'' = (V⁺ - E)χ
    let mut num = 0.0;
    let mut den = 0.0;
    let dens = |x: f64, c: f64, d: f64| {
        let v = hp.potential(x);
        let dd = (v - e1) * c;
        (
            d * d + v * c * c,
            2.0 * d * dd + hp.potential_derivative(x) * c * c + 2.0 * v * c * d,
            c * c,
            2.0 * c * d,
        )
    };
    for w in chi.windows(2) {
        let (x0, c0, d0) = w[0];
        let (x1, c1, d1) = w[1];
        let h = x1 - x0;
        let (n0, dn0, s0, ds0) = dens(x0, c0, d0);
        let (n1, dn1, s1, ds1) = dens(x1, c1, d1);
        num += 0.5 * h * (n0 + n1) + h * h / 12.0 * (dn0 - dn1);
        den += 0.5 * h * (s0 + s1) + h * h / 12.0 * (ds0 - ds1);
    }
    Ok(DualityReport {
        zero_mode: mi[0],
        plus: p,
        minus: mi,
        max_rel_diff,
        zero_mode_residual,
        factorized_level: e1,
        rayleigh_quotient: num / den,
    })
}

/// One row of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub param_json: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(check: &str, params: serde_json::Value, value: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            param_json: params.to_string(),
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
        }
    }
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Wronskian normalizations and unit determinants for `M = 3`-type odd `M`.
pub fn wronskian_checks(conn: &Connection, energies: &[C]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &e in energies {
        for sign in Sign::both() {
            for j in 0..3 {
                let w = conn.step_wronskian(j, sign, e)?;
                out.push(Check::new(
                    "wronskian",
                    serde_json::json!({"alpha": conn.alpha, "E": [e.re, e.im], "j": j, "eps": sign.value()}),
                    (w - 1.0).norm(),
                    1e-6,
                ));
            }
            let s = conn.single_step(0, sign, e)?;
            out.push(Check::new(
                "det_single",
                serde_json::json!({"alpha": conn.alpha, "E": [e.re, e.im], "eps": sign.value()}),
                (s.det() - 1.0).norm(),
                1e-6,
            ));
            let m = odd_half_index(conn.m)? as usize;
            for k in 1..=m {
                let f = conn.fusion_matrix(k, sign, e)?;
                out.push(Check::new(
                    "det_fused",
                    serde_json::json!({"alpha": conn.alpha, "E": [e.re, e.im], "k": k, "eps": sign.value()}),
                    (f.det() - 1.0).norm(),
                    1e-6,
                ));
            }
        }
    }
    Ok(out)
}

/// `T₁,₁` by Wronskians and by both determinant forms, pairwise.
pub fn t11_checks(conn: &Connection, dets: &DeterminantSet, energies: &[f64], tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &e in energies {
        let z = C::new(e, 0.0);
        let w = conn.t11_wronskian(z)?;
        let dm = dets.t11_dvf_minus(z)?;
        let dp = dets.t11_dvf_plus(z)?;
        let p = serde_json::json!({"alpha": conn.alpha, "E": e});
        out.push(Check::new("t11_wronskian_vs_dvf_minus", p.clone(), rel(w, dm), tol));
        out.push(Check::new("t11_wronskian_vs_dvf_plus", p.clone(), rel(w, dp), tol));
        out.push(Check::new("t11_dvf_minus_vs_plus", p, rel(dm, dp), tol));
    }
    Ok(out)
}

/// Fused `(2,1)` entry against `-q^{α(m+1)} φ(0) ∂φ(0)`.
pub fn fused_entry_checks(conn: &Connection, energies: &[C], tol: f64) -> Result<Vec<Check>> {
    let m = odd_half_index(conn.m)? as usize;
    let mut out = Vec::new();
    for &e in energies {
        let f = conn.fusion_matrix(m, Sign::Plus, e)?;
        let lit = conn.fused_21_literal(Sign::Plus, e)?;
        out.push(Check::new(
            "fused_21",
            serde_json::json!({"alpha": conn.alpha, "E": [e.re, e.im], "k": m}),
            rel(f.entries[1][0], lit),
            tol,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_normalization_and_zeros() {
        let d = SpectralDeterminant::from_levels(3.0, 1.0, Sign::Plus, Parity::Odd, vec![1.0, 4.0, 9.0, 15.0]).unwrap();
        assert_eq!(d.eval(C::new(0.0, 0.0)).unwrap(), C::new(1.0, 0.0));
        assert_eq!(d.eval(C::new(1.0, 0.0)).unwrap().norm(), 0.0);
        assert!(d.value(C::new(100.0, 0.0)).is_err());
    }

    #[test]
    fn tail_matches_explicit_product() {
        // levels exactly on the tail law: truncation plus tail equals the long product
        let mu = SpectralConstants::new(3.0).unwrap().mu;
        let lv: Vec<f64> = (0..3000).map(|j| (3.4 * (j as f64 + 0.6)).powf(1.0 / mu)).collect();
        let full = SpectralDeterminant::from_levels(3.0, 0.0, Sign::Plus, Parity::Even, lv.clone()).unwrap();
        let short = SpectralDeterminant::from_levels(3.0, 0.0, Sign::Plus, Parity::Even, lv[..40].to_vec()).unwrap();
        for e in [C::new(0.5, 0.0), C::new(-1.0, 1.0)] {
            let a = full.eval(e).unwrap();
            let b = short.eval(e).unwrap();
            assert!((a - b).norm() < 1e-6 * a.norm(), "{a} {b}");
        }
    }

    #[test]
    fn prefactors_give_unit_step_wronskians() {
        let conn = Connection::new(3.0, 1.0, IntegratorConfig::default()).unwrap();
        for e in [C::new(0.5, 0.0), C::new(2.0, 0.0), C::new(-0.3, 0.8)] {
            for sign in Sign::both() {
                let w = conn.step_wronskian(0, sign, e).unwrap();
                assert!((w - 1.0).norm() < 1e-6, "{w}");
            }
        }
    }
}
