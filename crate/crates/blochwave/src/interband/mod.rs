//! Two-band dynamics in the Houston basis: adiabatic perturbation theory,
//! numerical propagation with optional T2 dephasing, and excitation-rate scans.
//!
//! Amplitudes obey iħ ȧ_c = W a_v, iħ ȧ_v = W* a_c with
//! W(t) = e F(t) ξ_cv(K(t)) exp(iφ′(t)) and φ′ = (1/ħ)∫E′_cv(K) dt, where
//! E′_cv = E_cv + e F (ξ_cc − ξ_vv).

mod houston;
mod propagate;
mod scan;

pub use houston::{dyson_correction, dyson_series, houston_amplitude_first_order, DysonOptions, DysonSeries};
pub use propagate::{
    density_matrix_eigenvalues, propagate_two_band, propagate_with_dephasing, DensityMatrixState, KTrajectory,
    Populated, PropagationOptions, PropagationResult, TwoBandState,
};
pub use scan::{excitation_rate_scan, fit_loglog_slope, RateRow, RateScan, ScanOptions, TransverseQuadrature, MIN_SCAN_CYCLES};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::band::TightBinding;
use crate::error::{Error, Result};
use crate::pulse::PulseSpec;
use crate::regimes::{ponderomotive_kane, ponderomotive_tight_binding};
use crate::units::{HBAR, HBAR2_OVER_M0};

/// Interband gap E_cv(k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GapModel {
    /// Kane two-band gap Eg √(1 + ħ²k²/(m Eg)).
    Kane { eg: f64, mass: f64 },
    /// Difference band E_c − E_v in tight binding.
    TightBinding(TightBinding),
    /// k-independent gap (two-level limit).
    Flat { energy: f64 },
}

impl GapModel {
    pub fn energy(&self, k: f64) -> f64 {
        match self {
            GapModel::Kane { eg, mass } => eg * (1.0 + HBAR2_OVER_M0 * k * k / (mass * eg)).sqrt(),
            GapModel::TightBinding(tb) => tb.energy(k),
            GapModel::Flat { energy } => *energy,
        }
    }

    /// Minimum of E_cv over k.
    /// dE_cv/dk, eV·Å.
    pub fn slope(&self, k: f64) -> f64 {
        match self {
            GapModel::Kane { eg, mass } => {
                let s = HBAR2_OVER_M0 / (mass * eg);
                eg * s * k / (1.0 + s * k * k).sqrt()
            }
            GapModel::TightBinding(tb) => tb.slope(k),
            GapModel::Flat { .. } => 0.0,
        }
    }

    pub fn gap(&self) -> f64 {
        match self {
            GapModel::Kane { eg, .. } => *eg,
            GapModel::Flat { energy } => *energy,
            GapModel::TightBinding(tb) => {
                let n = 4096;
                let g = 2.0 * PI / tb.a;
                (0..n).map(|i| tb.energy(-0.5 * g + g * i as f64 / n as f64)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Cycle-averaged gap increase at k = 0 for a monochromatic drive (ponderomotive energy).
    pub fn ponderomotive(&self, f0: f64, hbar_omega0: f64) -> f64 {
        match self {
            GapModel::Kane { eg, mass } => ponderomotive_kane(*eg, *mass, f0, hbar_omega0, 0.0),
            GapModel::TightBinding(tb) => ponderomotive_tight_binding(&tb.eps, tb.a, f0, hbar_omega0, self.gap()),
            GapModel::Flat { .. } => 0.0,
        }
    }
}

/// A k-dependent complex quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KFunction {
    Constant { value: Complex64 },
    /// Samples on a uniform periodic grid k_i = k_start + i·period/N, interpolated
    /// with periodic cubic Hermite splines.
    Table { k_start: f64, period: f64, values: Vec<Complex64> },
}

impl KFunction {
    pub fn constant(v: f64) -> Self {
        KFunction::Constant { value: Complex64::new(v, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KFunction::Table { period, values, .. } if !(*period > 0.0) || values.len() < 4 => {
                Err(Error::InvalidInput("k table needs period > 0 and at least 4 samples".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, k: f64) -> Complex64 {
        match self {
            KFunction::Constant { value } => *value,
            KFunction::Table { k_start, period, values } => {
                let n = values.len();
                let h = period / n as f64;
                let x = ((k - k_start) / h).rem_euclid(n as f64);
                let i = (x.floor() as usize).min(n - 1);
                let s = x - i as f64;
                let p = |j: isize| values[(i as isize + j).rem_euclid(n as isize) as usize];
                let (p0, p1, p2, p3) = (p(-1), p(0), p(1), p(2));
                // Catmull–Rom
                let s2 = s * s;
                let s3 = s2 * s;
                p1 + (p2 - p0) * (0.5 * s)
                    + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * (0.5 * s2)
                    + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * (0.5 * s3)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBandModel {
    pub gap: GapModel,
    /// Interband dipole ξ_cv(k), Å.
    pub xi_cv: KFunction,
    /// Berry-connection difference ξ_cc − ξ_vv, Å; zero when absent.
    #[serde(default)]
    pub xi_diff: Option<KFunction>,
    /// Lattice constant, Å (sets the Brillouin zone of k grids).
    pub a: f64,
}

impl TwoBandModel {
    /// Kane model with the constant dipole ξ = ħ/(2√(m Eg)).
    pub fn kane(eg: f64, mass: f64, a: f64) -> Self {
        Self {
            gap: GapModel::Kane { eg, mass },
            xi_cv: KFunction::constant(crate::regimes::kane_dipole(eg, mass)),
            xi_diff: None,
            a,
        }
    }

    /// k-independent two-level limit with gap `energy` and dipole `xi`.
    pub fn flat(energy: f64, xi: f64, a: f64) -> Self {
        Self { gap: GapModel::Flat { energy }, xi_cv: KFunction::constant(xi), xi_diff: None, a }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) {
            return Err(Error::InvalidInput("two-band model: lattice constant must be positive".into()));
        }
        match &self.gap {
            GapModel::Kane { eg, mass } if !(*eg > 0.0 && *mass > 0.0) => {
                return Err(Error::InvalidInput("Kane gap needs Eg > 0 and m > 0".into()))
            }
            GapModel::Flat { energy } if !(*energy > 0.0) => {
                return Err(Error::InvalidInput("flat gap must be positive".into()))
            }
            _ => {}
        }
        if !(self.gap.gap() > 0.0) {
            return Err(Error::InvalidInput("E_cv(k) must stay positive".into()));
        }
        self.xi_cv.validate()?;
        if let Some(x) = &self.xi_diff {
            x.validate()?;
        }
        Ok(())
    }

    /// Modified gap E′_cv(K) = E_cv(K) + F ξ_diff(K), eV.
    pub fn modified_gap(&self, kk: f64, field: f64) -> f64 {
        let geo = self.xi_diff.as_ref().map_or(0.0, |x| field * x.eval(kk).re);
        self.gap.energy(kk) + geo
    }

    /// Interband coupling V_cv = e F ξ_cv(K), eV.
    pub fn coupling(&self, kk: f64, field: f64) -> Complex64 {
        self.xi_cv.eval(kk) * field
    }

    /// Right-hand side pieces at time t for crystal momentum k:
    /// (V_cv, E′_cv/ħ) with K = k + A/ħ.
    pub(crate) fn drive(&self, k: f64, pulse: &PulseSpec, t: f64) -> (Complex64, f64) {
        let (f, a) = pulse.waveform(t);
        let kk = k + a / HBAR;
        (self.coupling(kk, f), self.modified_gap(kk, f) / HBAR)
    }
}

/// Wrap a phase into (−π, π]; returns whether it changed.
pub(crate) fn wrap_phase(phi: &mut f64) -> bool {
    if phi.abs() > PI {
        *phi -= 2.0 * PI * (*phi / (2.0 * PI)).round();
        true
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolation_periodic() {
        let n = 32;
        let period = 2.0 * PI;
        let values: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(1.0 + 0.3 * (i as f64 * period / n as f64).cos(), 0.2))
            .collect();
        let f = KFunction::Table { k_start: 0.0, period, values };
        for &k in &[0.0_f64, 0.5, 3.0, 6.2] {
            let exact = Complex64::from_polar(1.0 + 0.3 * k.cos(), 0.2);
            assert!((f.eval(k) - exact).norm() < 1e-3);
            assert!((f.eval(k + period) - f.eval(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn kane_dipole_value() {
        let m = TwoBandModel::kane(9.0, 0.5, 4.9);
        let xi = m.xi_cv.eval(0.0).re;
        assert!((xi - 0.5 * (7.6199682f64 / 4.5).sqrt()).abs() < 1e-12);
        m.validate().unwrap();
    }

    #[test]
    fn wrap() {
        let mut p = 7.0;
        assert!(wrap_phase(&mut p));
        assert!((p - (7.0 - 2.0 * PI)).abs() < 1e-15);
    }
}
