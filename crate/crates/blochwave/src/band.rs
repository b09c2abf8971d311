//! Band dispersions: effective mass, Kane two-band gap, tight-binding cosine series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{HBAR, HBAR2_OVER_M0};

/// Tight-binding band E(k) = Σ_ℓ ε_ℓ cos(k ℓ a).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TightBinding {
    /// Lattice constant, Å.
    pub a: f64,
    /// ε_ℓ for ℓ = 0..=ℓ_max, eV.
    pub eps: Vec<f64>,
}

impl TightBinding {
    pub fn new(a: f64, eps: Vec<f64>) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidInput("lattice constant must be positive".into()));
        }
        if eps.is_empty() || eps.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidInput("hopping list must be non-empty and finite".into()));
        }
        Ok(Self { a, eps })
    }

    /// Build from sparse (ℓ, ε) pairs.
    pub fn from_pairs(a: f64, pairs: &[(u32, f64)]) -> Result<Self> {
        let lmax = pairs.iter().map(|p| p.0).max().unwrap_or(0) as usize;
        let mut eps = vec![0.0; lmax + 1];
        for &(l, e) in pairs {
            eps[l as usize] = e;
        }
        Self::new(a, eps)
    }

    /// Nearest-neighbour band ε0 + ε1 cos(ka).
    pub fn nearest_neighbor(a: f64, eps0: f64, eps1: f64) -> Self {
        Self { a, eps: vec![eps0, eps1] }
    }

    /// Highest ℓ with a nonzero hopping.
    pub fn l_max(&self) -> usize {
        self.eps.iter().rposition(|&e| e != 0.0).unwrap_or(0)
    }

    pub fn energy(&self, k: f64) -> f64 {
        self.eps
            .iter()
            .enumerate()
            .map(|(l, e)| e * (k * l as f64 * self.a).cos())
            .sum()
    }

    /// dE/dk, eV·Å.
    pub fn slope(&self, k: f64) -> f64 {
        -self
            .eps
            .iter()
            .enumerate()
            .map(|(l, e)| l as f64 * self.a * e * (k * l as f64 * self.a).sin())
            .sum::<f64>()
    }

    /// d²E/dk², eV·Å².
    pub fn curvature(&self, k: f64) -> f64 {
        -self
            .eps
            .iter()
            .enumerate()
            .map(|(l, e)| (l as f64 * self.a).powi(2) * e * (k * l as f64 * self.a).cos())
            .sum::<f64>()
    }

    /// Group velocity (1/ħ) dE/dk, Å/fs.
    pub fn velocity(&self, k: f64) -> f64 {
        self.slope(k) / HBAR
    }

    /// Term-wise difference self − other (for E_cv = E_c − E_v).
    pub fn difference(&self, other: &TightBinding) -> TightBinding {
        let n = self.eps.len().max(other.eps.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        TightBinding {
            a: self.a,
            eps: (0..n).map(|i| get(&self.eps, i) - get(&other.eps, i)).collect(),
        }
    }

    /// max E − min E, sampled densely over the Brillouin zone.
    pub fn bandwidth(&self) -> f64 {
        let n = 4096;
        let g = 2.0 * std::f64::consts::PI / self.a;
        let (lo, hi) = (0..n)
            .map(|i| self.energy(-0.5 * g + g * i as f64 / n as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)));
        hi - lo
    }

    /// Effective mass (units of m0) from the curvature at k: ħ²/(m0 m) = d²E/dk².
    pub fn effective_mass_at(&self, k: f64) -> f64 {
        HBAR2_OVER_M0 / self.curvature(k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BandDispersion {
    /// Parabolic band ħ²k²/(2 m m0); `mass` in units of m0 (may be negative).
    Ema { mass: f64 },
    /// Kane two-band gap E_cv(k) = Eg √(1 + ħ²k²/(m m0 Eg)).
    KaneTwoBand { eg: f64, mass: f64 },
    TightBinding(TightBinding),
}

impl BandDispersion {
    pub fn validate(&self) -> Result<()> {
        match self {
            BandDispersion::Ema { mass } if *mass == 0.0 || !mass.is_finite() => {
                Err(Error::InvalidInput("effective mass must be nonzero".into()))
            }
            BandDispersion::KaneTwoBand { eg, mass } if !(*eg > 0.0 && *mass > 0.0) => {
                Err(Error::InvalidInput("Kane band needs Eg > 0 and m > 0".into()))
            }
            BandDispersion::TightBinding(tb) => TightBinding::new(tb.a, tb.eps.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn energy(&self, k: f64) -> f64 {
        match self {
            BandDispersion::Ema { mass } => HBAR2_OVER_M0 * k * k / (2.0 * mass),
            BandDispersion::KaneTwoBand { eg, mass } => {
                eg * (1.0 + HBAR2_OVER_M0 * k * k / (mass * eg)).sqrt()
            }
            BandDispersion::TightBinding(tb) => tb.energy(k),
        }
    }

    /// dE/dk, eV·Å.
    pub fn slope(&self, k: f64) -> f64 {
        match self {
            BandDispersion::Ema { mass } => HBAR2_OVER_M0 * k / mass,
            BandDispersion::KaneTwoBand { eg, mass } => {
                let s = HBAR2_OVER_M0 / (mass * eg);
                eg * s * k / (1.0 + s * k * k).sqrt()
            }
            BandDispersion::TightBinding(tb) => tb.slope(k),
        }
    }

    /// Group velocity, Å/fs.
    pub fn velocity(&self, k: f64) -> f64 {
        self.slope(k) / HBAR
    }

    /// Lattice constant when the band is periodic.
    pub fn lattice_constant(&self) -> Option<f64> {
        match self {
            BandDispersion::TightBinding(tb) => Some(tb.a),
            _ => None,
        }
    }
}
