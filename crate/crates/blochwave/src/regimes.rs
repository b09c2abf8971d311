//! Characteristic frequencies, adiabaticity parameters and regime labels.

use std::f64::consts::PI;

use serde::Serialize;

use crate::band::BandDispersion;
use crate::error::{Error, Result};
use crate::material::MaterialRecord;
use crate::pulse::PulseSpec;
use crate::special::{j0, J0_ROOTS};
use crate::units::HBAR2_OVER_M0;

/// Keldysh-parameter cutoffs for the excitation-regime label.
pub const MULTIPHOTON_ABOVE: f64 = 3.0;
pub const ADIABATIC_TUNNELING_BELOW: f64 = 1.0 / 3.0;
/// γ_RF0 at and above which the rotating-wave picture is flagged as unreliable.
pub const CARRIER_WAVE_RABI_FROM: f64 = 0.1;
/// Distance in γ_DL to a J0 root that earns a dynamic-localization label.
pub const DYNAMIC_LOCALIZATION_WINDOW: f64 = 0.1;

/// Ponderomotive energy in the effective-mass approximation, eV.
pub fn ponderomotive_ema(f0: f64, hbar_omega0: f64, beta: f64, mass: f64) -> f64 {
    f0 * f0 * (1.0 + beta * beta) * HBAR2_OVER_M0 / (4.0 * mass * hbar_omega0 * hbar_omega0)
}

/// Ponderomotive energy of a tight-binding pair band with hoppings ε_cv,ℓ, eV.
pub fn ponderomotive_tight_binding(eps_cv: &[f64], a: f64, f0: f64, hbar_omega0: f64, eg: f64) -> f64 {
    let gamma_dl = f0 * a / hbar_omega0;
    eps_cv
        .iter()
        .enumerate()
        .map(|(l, e)| e * j0(l as f64 * gamma_dl))
        .sum::<f64>()
        - eg
}

/// Cycle-averaged Kane gap at k = 0 minus Eg, eV.
///
/// K(t) = A(t)/ħ for a monochromatic drive, with the elliptic component
/// included through |K|, so the weak-field limit is the EMA value with (1 + β²).
pub fn ponderomotive_kane(eg: f64, mass: f64, f0: f64, hbar_omega0: f64, beta: f64) -> f64 {
    let kamp = f0 / hbar_omega0;
    let band = BandDispersion::KaneTwoBand { eg, mass };
    let n = 512;
    let mean = (0..n)
        .map(|i| {
            let th = 2.0 * PI * (i as f64 + 0.5) / n as f64;
            let k2 = kamp * kamp * (th.sin().powi(2) + beta * beta * th.cos().powi(2));
            band.energy(k2.sqrt())
        })
        .sum::<f64>()
        / n as f64;
    mean - eg
}

/// Ponderomotive energy for the given pulse and pair dispersion.
///
/// For a tight-binding pair band the gap Eg must be supplied.
pub fn ponderomotive(pulse: &PulseSpec, bands: &BandDispersion, gap: Option<f64>) -> Result<f64> {
    bands.validate()?;
    let (f0, hw) = (pulse.f0, pulse.hbar_omega0);
    match bands {
        BandDispersion::Ema { mass } => {
            if *mass <= 0.0 {
                return Err(Error::InvalidInput("EMA ponderomotive energy needs a positive reduced mass".into()));
            }
            Ok(ponderomotive_ema(f0, hw, pulse.beta, *mass))
        }
        BandDispersion::KaneTwoBand { eg, mass } => Ok(ponderomotive_kane(*eg, *mass, f0, hw, pulse.beta)),
        BandDispersion::TightBinding(tb) => {
            let eg = gap.ok_or_else(|| {
                Error::InvalidInput("tight-binding ponderomotive energy needs the band gap".into())
            })?;
            Ok(ponderomotive_tight_binding(&tb.eps, tb.a, f0, hw, eg))
        }
    }
}

/// Interband dipole estimate ξ = ħ/(2√(m Eg)), Å.
pub fn kane_dipole(eg: f64, mass: f64) -> f64 {
    0.5 * (HBAR2_OVER_M0 / (mass * eg)).sqrt()
}

/// Minimal photon number Ñ = ⌊(Eg + Up)/ħω0 + 1⌋.
pub fn channel_count(eg: f64, up: f64, hbar_omega0: f64) -> u64 {
    ((eg + up) / hbar_omega0 + 1.0).floor() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "gamma_K")]
    pub gamma_k: f64,
    #[serde(rename = "gamma_NP")]
    pub gamma_np: f64,
    #[serde(rename = "gamma_DL")]
    pub gamma_dl: f64,
    #[serde(rename = "gamma_BH")]
    pub gamma_bh: f64,
    #[serde(rename = "gamma_BP")]
    pub gamma_bp: f64,
    #[serde(rename = "gamma_RF0")]
    pub gamma_rf0: f64,
    #[serde(rename = "gamma_RFg")]
    pub gamma_rfg: f64,
    #[serde(rename = "gamma_RP")]
    pub gamma_rp: f64,
    #[serde(rename = "gamma_RB")]
    pub gamma_rb: f64,
    #[serde(rename = "hbar_omegaB")]
    pub hbar_omega_b: f64,
    #[serde(rename = "hbar_omegaR")]
    pub hbar_omega_r: f64,
    #[serde(rename = "Up")]
    pub up: f64,
    #[serde(rename = "N_tilde")]
    pub n_tilde: u64,
    pub labels: Vec<String>,
    /// Up = 0: γ_K, γ_BP and γ_RP are reported as +∞ (null in JSON).
    pub up_zero: bool,
    /// (Eg + Up)/ħω0 sits on an integer, where Ñ jumps.
    pub channel_boundary: bool,
}

/// Build the full parameter report.
pub fn adiabaticity_report(
    material: &MaterialRecord,
    pulse: &PulseSpec,
    bands: &BandDispersion,
) -> Result<RegimeReport> {
    material.validate()?;
    pulse.validate()?;
    let up = ponderomotive(pulse, bands, Some(material.eg))?;
    Ok(report_from_up(material, pulse, up))
}

/// Report for an externally supplied ponderomotive energy.
pub fn report_from_up(material: &MaterialRecord, pulse: &PulseSpec, up: f64) -> RegimeReport {
    let (eg, a, xi) = (material.eg, material.a, material.xi_max);
    let (f0, hw) = (pulse.f0, pulse.hbar_omega0);
    let hbar_omega_b = f0 * a;
    let hbar_omega_r = f0 * xi;
    let up_zero = up <= 0.0;
    let inv = |num: f64| if up_zero { f64::INFINITY } else { num / up };
    let gamma_k = if up_zero { f64::INFINITY } else { (eg / (4.0 * up)).sqrt() };
    let x = (eg + up) / hw;
    let mut r = RegimeReport {
        n: eg / hw,
        gamma_k,
        gamma_np: up.max(0.0) / hw,
        gamma_dl: hbar_omega_b / hw,
        gamma_bh: hbar_omega_b / eg,
        gamma_bp: inv(hbar_omega_b),
        gamma_rf0: hbar_omega_r / hw,
        gamma_rfg: hbar_omega_r / eg,
        gamma_rp: inv(hbar_omega_r),
        gamma_rb: xi / a,
        hbar_omega_b,
        hbar_omega_r,
        up,
        n_tilde: channel_count(eg, up.max(0.0), hw),
        labels: Vec::new(),
        up_zero,
        channel_boundary: (x - x.round()).abs() < 1e-9,
    };
    r.labels = labels(&r);
    r
}

fn labels(r: &RegimeReport) -> Vec<String> {
    let mut out = Vec::new();
    out.push(
        if r.gamma_k > MULTIPHOTON_ABOVE {
            "multiphoton"
        } else if r.gamma_k < ADIABATIC_TUNNELING_BELOW {
            "adiabatic_tunneling"
        } else {
            "diabatic_tunneling"
        }
        .to_string(),
    );
    out.push(
        if r.gamma_rf0 < CARRIER_WAVE_RABI_FROM {
            "envelope_rabi_flopping"
        } else {
            "carrier_wave_rabi_flopping"
        }
        .to_string(),
    );
    for (i, root) in J0_ROOTS.iter().enumerate() {
        if (r.gamma_dl - root).abs() < DYNAMIC_LOCALIZATION_WINDOW {
            out.push(format!("near_dynamic_localization_root_{}", i + 1));
        }
    }
    if r.channel_boundary {
        out.push("channel_boundary".to_string());
    }
    out
}

/// Relative residual |γ_K − 1/(2 γ_RF0 √(1+β²))| / γ_K.
pub fn crosscheck_resonant_relation(report: &RegimeReport, beta: f64) -> f64 {
    let rhs = 1.0 / (2.0 * report.gamma_rf0 * (1.0 + beta * beta).sqrt());
    (report.gamma_k - rhs).abs() / report.gamma_k
}
