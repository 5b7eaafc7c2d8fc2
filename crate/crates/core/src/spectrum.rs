//! Computed levels and the tags that say where they came from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Parity, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Nlie,
    Oracle,
    Wkb,
    WkbAsymptotic,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Nlie => "nlie",
            Method::Oracle => "oracle",
            Method::Wkb => "wkb",
            Method::WkbAsymptotic => "wkb_asymptotic",
        }
    }
}

/// One level `E^{(ε)}_{ε', j}`; `j` counts levels within the parity sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub j: usize,
    pub sign: Sign,
    pub parity: Parity,
    pub energy: f64,
    /// Rapidity; `-inf` for the zero-energy level.
    pub theta: f64,
    pub method: Method,
    pub residual: f64,
    pub err_est: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub m: f64,
    pub alpha: f64,
    pub levels: Vec<Level>,
}

impl Spectrum {
    pub fn new(m: f64, alpha: f64) -> Self {
        Self {
            m,
            alpha,
            levels: Vec::new(),
        }
    }

    /// Energies with the given sign and parity, ordered by `j`.
    pub fn energies(&self, sign: Sign, parity: Parity) -> Vec<f64> {
        let mut v: Vec<&Level> = self
            .levels
            .iter()
            .filter(|l| l.sign == sign && l.parity == parity)
            .collect();
        v.sort_by_key(|l| l.j);
        v.iter().map(|l| l.energy).collect()
    }

    pub fn find(&self, sign: Sign, parity: Parity, j: usize) -> Option<&Level> {
        self.levels
            .iter()
            .find(|l| l.sign == sign && l.parity == parity && l.j == j)
    }

    /// Sorts by sign, then energy.
    pub fn sort(&mut self) {
        self.levels.sort_by(|a, b| {
            b.sign
                .value()
                .total_cmp(&a.sign.value())
                .then(a.energy.total_cmp(&b.energy))
        });
    }

    /// Energies must increase strictly with `j` inside each `(ε, ε')` family.
    pub fn check_monotone(&self) -> Result<()> {
        for sign in Sign::both() {
            for parity in [Parity::Even, Parity::Odd] {
                let e = self.energies(sign, parity);
                if e.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Verification(format!(
                        "levels not increasing for sign {sign:?}, parity {parity:?}: {e:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}
