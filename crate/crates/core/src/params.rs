//! Physical inputs and their reduction to units of `ħω`.
//!
//! Every other module works with [`DimensionlessParams`]: the frequency ratio
//! `r = ω_c/ω`, the Zeeman strength `b = gμB/(2ħω)` and the coupling
//! `kappa = λ_R √(m*ω/ħ) / (ħω)`. Values are held as exact rationals so that
//! the determinant path can stay exact; a float input is expanded exactly.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, frac, int, to_f64, Rational, Rationalization};

/// Raw inputs of the quantum-dot model in any consistent unit system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub effective_mass: f64,
    pub confinement_frequency: f64,
    pub cyclotron_frequency: f64,
    pub g_factor: f64,
    /// `μ·B`, an energy.
    pub bohr_magneton_times_b: f64,
    pub rashba_strength: f64,
    pub hbar: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("effective_mass", self.effective_mass),
            ("confinement_frequency", self.confinement_frequency),
            ("hbar", self.hbar),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        let nonnegative = [
            ("cyclotron_frequency", self.cyclotron_frequency),
            ("rashba_strength", self.rashba_strength),
        ];
        for (field, v) in nonnegative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite and >= 0, got {v}"),
                });
            }
        }
        for (field, v) in [("g_factor", self.g_factor), ("bohr_magneton_times_b", self.bohr_magneton_times_b)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// `ω = √(ω₀² + (ω_c/2)²)`
    pub fn effective_frequency(&self) -> f64 {
        self.confinement_frequency.hypot(0.5 * self.cyclotron_frequency)
    }
}

/// The reduced parameter triple, all energies in units of `ħω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionlessParams {
    #[serde(with = "rational::as_string")]
    r: Rational,
    #[serde(with = "rational::as_string")]
    b: Rational,
    #[serde(with = "rational::as_string")]
    kappa: Rational,
}

impl DimensionlessParams {
    /// Checks `0 <= r < 2` and `kappa >= 0`.
    pub fn new(r: Rational, b: Rational, kappa: Rational) -> Result<Self> {
        if r.is_negative() || r >= int(2) {
            return Err(Error::InvalidParameter {
                field: "r",
                reason: format!("frequency ratio must satisfy 0 <= r < 2, got {r}"),
            });
        }
        if kappa.is_negative() {
            return Err(Error::InvalidParameter {
                field: "kappa",
                reason: format!("coupling must be >= 0, got {kappa}"),
            });
        }
        Ok(Self { r, b, kappa })
    }

    pub fn from_f64(r: f64, b: f64, kappa: f64) -> Result<Self> {
        Self::new(
            rational::from_f64("r", r)?,
            rational::from_f64("b", b)?,
            rational::from_f64("kappa", kappa)?,
        )
    }

    /// Parses each field from a rational or decimal string, e.g. `"3/10"`.
    pub fn parse(r: &str, b: &str, kappa: &str) -> Result<Self> {
        Self::new(
            rational::parse_rational(r)?,
            rational::parse_rational(b)?,
            rational::parse_rational(kappa)?,
        )
    }

    /// The same point with the coupling sign reversed.
    ///
    /// This is the only way to obtain a negative `kappa`; it exists for the
    /// `kappa -> -kappa` symmetry checks.
    pub fn mirrored(&self) -> Self {
        Self {
            r: self.r.clone(),
            b: self.b.clone(),
            kappa: -self.kappa.clone(),
        }
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }
    pub fn b(&self) -> &Rational {
        &self.b
    }
    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }
    pub fn r_f64(&self) -> f64 {
        to_f64(&self.r)
    }
    pub fn b_f64(&self) -> f64 {
        to_f64(&self.b)
    }
    pub fn kappa_f64(&self) -> f64 {
        to_f64(&self.kappa)
    }

    /// Replaces one of `r`, `b`, `kappa` by name, re-validating.
    pub fn with_field(&self, field: &str, value: Rational) -> Result<Self> {
        let (mut r, mut b, mut kappa) = (self.r.clone(), self.b.clone(), self.kappa.clone());
        match field {
            "r" => r = value,
            "b" => b = value,
            "kappa" => kappa = value,
            other => return Err(Error::InvalidArgument(format!("unknown parameter axis `{other}`"))),
        }
        Self::new(r, b, kappa)
    }
}

/// Reduces physical inputs to units of `ħω`, together with the record of
/// how each resulting double was expanded into a rational.
pub fn reduce_with_record(physical: &PhysicalParams) -> Result<(DimensionlessParams, Vec<Rationalization>)> {
    physical.validate()?;
    let omega = physical.effective_frequency();
    let energy_unit = physical.hbar * omega;
    let r = physical.cyclotron_frequency / omega;
    let b = physical.g_factor * physical.bohr_magneton_times_b / (2.0 * energy_unit);
    let kappa = physical.rashba_strength * (physical.effective_mass * omega / physical.hbar).sqrt() / energy_unit;

    let mut record = Vec::new();
    let mut exact = |field: &'static str, v: f64| -> Result<Rational> {
        let q = rational::from_f64(field, v)?;
        record.push(Rationalization::new(field, format!("{v:e}"), &q, true));
        Ok(q)
    };
    let params = DimensionlessParams::new(exact("r", r)?, exact("b", b)?, exact("kappa", kappa)?)?;
    Ok((params, record))
}

pub fn reduce(physical: &PhysicalParams) -> Result<DimensionlessParams> {
    reduce_with_record(physical).map(|(p, _)| p)
}

/// The recurrence constants `ε_j` and `ε_b` of one invariant block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockConstants {
    pub j: u32,
    #[serde(with = "rational::as_string")]
    pub eps_j: Rational,
    #[serde(with = "rational::as_string")]
    pub eps_b: Rational,
}

impl BlockConstants {
    /// `ε_j + ε_b`
    pub fn eps_plus(&self) -> Rational {
        &self.eps_j + &self.eps_b
    }
    /// `ε_j − ε_b`
    pub fn eps_minus(&self) -> Rational {
        &self.eps_j - &self.eps_b
    }
}

/// `ε_j = 1/2 − j + (3 + 2j) r / 4`, `ε_b = r/4 − b + 1/2`.
pub fn block_constants(j: u32, p: &DimensionlessParams) -> BlockConstants {
    let jq = int(j as i64);
    let eps_j = frac(1, 2) - &jq + (int(3) + int(2) * &jq) * &p.r / int(4);
    let eps_b = &p.r / int(4) - &p.b + frac(1, 2);
    BlockConstants { j, eps_j, eps_b }
}
