//! Problem definition and the constants shared by every solver route.
//!
//! The operator is `-d²/dx² + x^{2M} + ε α x^{M-1}` with `α ≥ 0` and a sign
//! `ε = ±1`. Levels are further split by the parity `ε'` of the eigenfunction.
//! The rapidity variable `θ` is tied to the energy through
//! `E = exp(θ/μ) / ν²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gamma function, accurate to a few ulp on the positive axis.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Sign `ε` of the `x^{M-1}` perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_value(v: i32) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::InvalidModel(format!("sign must be +1 or -1, got {v}"))),
        }
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }
}

/// Parity `ε'` of the eigenfunction: `Even` is the symmetric (+1) sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn value(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn from_value(v: i32) -> Result<Parity> {
        match v {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            _ => Err(Error::InvalidModel(format!("parity must be +1 or -1, got {v}"))),
        }
    }

    /// Parity of the `n`-th level (counted from zero) of a symmetric well.
    pub fn of_level(n: usize) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// One member of the `±α` family: the real-axis Hamiltonian with signed
/// coupling `εα`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    pub m: f64,
    /// Signed coefficient `εα` of `x^{M-1}`.
    pub coupling: f64,
}

impl Hamiltonian {
    pub fn new(m: f64, coupling: f64) -> Result<Self> {
        if !(m.is_finite() && m > 1.0) {
            return Err(Error::InvalidModel(format!("M must be > 1, got {m}")));
        }
        if !coupling.is_finite() {
            return Err(Error::InvalidModel("coupling must be finite".into()));
        }
        Ok(Self { m, coupling })
    }

    pub fn sign(&self) -> Sign {
        if self.coupling < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// `x^{2M} + εα x^{M-1}`. Integer exponents use exact integer powers, so
    /// odd `M` gives an even potential; other `M` use `|x|`.
    pub fn potential(&self, x: f64) -> f64 {
        let (p_hi, p_lo) = self.powers(x);
        p_hi + self.coupling * p_lo
    }

    /// `dV/dx` for `x >= 0`.
    pub fn potential_derivative(&self, x: f64) -> f64 {
        let m = self.m;
        let lo = if m - 2.0 == 0.0 { 1.0 } else { x.abs().powf(m - 2.0) };
        2.0 * m * x.abs().powf(2.0 * m - 1.0) + self.coupling * (m - 1.0) * lo
    }

    fn powers(&self, x: f64) -> (f64, f64) {
        let m = self.m;
        if m.fract() == 0.0 && m < 1.0e6 {
            let mi = m as i32;
            (x.powi(2 * mi), x.powi(mi - 1))
        } else {
            let ax = x.abs();
            (ax.powf(2.0 * m), ax.powf(m - 1.0))
        }
    }

    /// Global minimum of the potential on the real line.
    pub fn potential_minimum(&self) -> f64 {
        if self.coupling >= 0.0 {
            return 0.0;
        }
        // d/dx (x^{2M} - a x^{M-1}) = 0  =>  x^{M+1} = a (M-1) / (2M)
        let m = self.m;
        let a = -self.coupling;
        let x = (a * (m - 1.0) / (2.0 * m)).powf(1.0 / (m + 1.0));
        self.potential(x).min(0.0)
    }
}

/// Problem instance `(M, α, ε, ε')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub m: f64,
    pub alpha: f64,
    pub sign: Sign,
    pub parity: Parity,
}

impl ModelSpec {
    pub fn new(m: f64, alpha: f64, sign: Sign, parity: Parity) -> Result<Self> {
        if !(m.is_finite() && m > 1.0) {
            return Err(Error::InvalidModel(format!("M must be > 1, got {m}")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidModel(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(Self {
            m,
            alpha,
            sign,
            parity,
        })
    }

    /// Builds a spec from a signed coupling: the sign of `coupling` selects `ε`.
    pub fn from_signed(m: f64, coupling: f64, parity: Parity) -> Result<Self> {
        let sign = if coupling < 0.0 { Sign::Minus } else { Sign::Plus };
        Self::new(m, coupling.abs(), sign, parity)
    }

    pub fn hamiltonian(&self) -> Hamiltonian {
        Hamiltonian {
            m: self.m,
            coupling: self.sign.value() * self.alpha,
        }
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    /// The integral equations are only set up for `0 <= α <= M`.
    pub fn check_nlie_range(&self) -> Result<()> {
        if self.alpha > self.m {
            return Err(Error::AlphaOutOfRange {
                alpha: self.alpha,
                m: self.m,
            });
        }
        Ok(())
    }

    /// `m` with `M = 2m - 1`; the connection relations need odd integer `M`.
    pub fn half_index(&self) -> Result<u32> {
        odd_half_index(self.m)
    }
}

pub(crate) fn odd_half_index(m: f64) -> Result<u32> {
    if m.fract() != 0.0 || (m as i64) % 2 != 1 {
        return Err(Error::InvalidModel(format!(
            "M must be an odd integer for the connection relations, got {m}"
        )));
    }
    Ok(((m as u32) + 1) / 2)
}

/// `μ`, `b₀`, `a₀`, `ν` and `q` for a given exponent `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    pub m: f64,
    pub mu: f64,
    pub b0: f64,
    pub a0: f64,
    pub nu: f64,
    pub q: Complex64,
}

impl SpectralConstants {
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 1.0) {
            return Err(Error::InvalidModel(format!("M must be > 1, got {m}")));
        }
        let mu = (m + 1.0) / (2.0 * m);
        let b0 = PI.sqrt() * gamma(1.0 / (2.0 * m)) / (m * gamma(1.5 + 1.0 / (2.0 * m)));
        let a0 = b0 / (2.0 * (mu * PI).sin());
        let nu = (2.0 * m + 2.0).powf(-1.0 / (2.0 * mu)) / gamma(1.0 / (2.0 * mu));
        let q = Complex64::from_polar(1.0, PI / (m + 1.0));
        Ok(Self {
            m,
            mu,
            b0,
            a0,
            nu,
            q,
        })
    }

    pub fn for_spec(spec: &ModelSpec) -> Result<Self> {
        Self::new(spec.m)
    }

    /// `q^x = exp(iπx/(M+1))` on the principal branch.
    pub fn q_pow(&self, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, PI * x / (self.m + 1.0))
    }

    /// Coefficient `b₀ ν^{-2μ}` of `e^θ` in the driving term.
    pub fn drive_scale(&self) -> f64 {
        self.b0 * self.nu.powf(-2.0 * self.mu)
    }

    pub fn theta_from_energy(&self, energy: f64) -> Result<f64> {
        if !(energy > 0.0) {
            return Err(Error::InvalidModel(format!(
                "energy must be positive on the real branch, got {energy}"
            )));
        }
        Ok(self.mu * (self.nu * self.nu * energy).ln())
    }

    pub fn energy_from_theta(&self, theta: f64) -> f64 {
        (theta / self.mu).exp() / (self.nu * self.nu)
    }

    pub fn theta_from_energy_complex(&self, energy: Complex64) -> Complex64 {
        (energy * self.nu * self.nu).ln() * self.mu
    }

    pub fn energy_from_theta_complex(&self, theta: Complex64) -> Complex64 {
        (theta / self.mu).exp() / (self.nu * self.nu)
    }

    /// Large-`j` level formula `b₀ E^μ = 2π(j + ½)`.
    pub fn asymptotic_energy(&self, j: usize) -> f64 {
        (2.0 * PI * (j as f64 + 0.5) / self.b0).powf(1.0 / self.mu)
    }

    /// Driving term `-(i/2) b₀ ν^{-2μ} e^θ + (π/2) i (-ε' + εα/M)`.
    pub fn drive_term(&self, theta: Complex64, spec: &ModelSpec) -> Complex64 {
        let i = Complex64::i();
        -0.5 * i * self.drive_scale() * theta.exp() + i * self.drive_constant(spec)
    }

    /// Imaginary part of the `θ → -∞` limit of the driving term.
    pub fn drive_constant(&self, spec: &ModelSpec) -> f64 {
        0.5 * PI * (-spec.parity.value() + spec.sign.value() * spec.alpha / self.m)
    }
}
