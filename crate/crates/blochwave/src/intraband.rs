//! Single-band field-driven kinematics: trajectories, cycle drift, harmonic
//! spectra, transferred charge and light–matter energy transfer.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::band::{BandDispersion, TightBinding};
use crate::error::{Error, Result};
use crate::output::CsvTable;
use crate::pulse::PulseSpec;
use crate::quad::cumulative_gauss;
use crate::units::{HBAR, HBAR_OVER_M0};

pub const MIN_SAMPLES_PER_CYCLE: usize = 16;
pub const MIN_HHG_CYCLES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    /// Sample times, fs.
    pub t: Vec<f64>,
    /// Kinetic momentum, Å⁻¹.
    pub k: Vec<f64>,
    /// Group velocity, Å/fs.
    pub v: Vec<f64>,
    /// Displacement from the start, Å.
    pub dx: Vec<f64>,
}

impl TrajectoryResult {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t_fs", "K_invA", "v_A_per_fs", "dx_A"])
            .with_meta("units", "t in fs, K in 1/A, v in A/fs, dx in A");
        for i in 0..self.t.len() {
            t.push(vec![self.t[i], self.k[i], self.v[i], self.dx[i]]);
        }
        t
    }
}

/// Wavepacket trajectory in a single band.
///
/// `samples` is the total number of uniformly spaced time samples across the
/// pulse window; at least 16 per carrier cycle are required.
pub fn trajectory(band: &BandDispersion, k0: f64, pulse: &PulseSpec, samples: usize) -> Result<TrajectoryResult> {
    band.validate()?;
    pulse.validate()?;
    let (ts, te) = pulse.window;
    let cycles = pulse.duration() / pulse.period();
    let per_cycle = samples.saturating_sub(1) as f64 / cycles;
    if samples < 2 || per_cycle < MIN_SAMPLES_PER_CYCLE as f64 {
        return Err(Error::Undersampled { per_cycle, min: MIN_SAMPLES_PER_CYCLE });
    }
    let t: Vec<f64> = (0..samples).map(|i| ts + (te - ts) * i as f64 / (samples - 1) as f64).collect();
    let kin = |s: f64| k0 + pulse.vector_potential(s) / HBAR;
    let k: Vec<f64> = t.iter().map(|&s| kin(s)).collect();
    let v: Vec<f64> = k.iter().map(|&kk| band.velocity(kk)).collect();
    let dx = match band {
        BandDispersion::Ema { mass } => {
            // Δx = (1/m)[ħk0 (t − t0) + e∫A dt]
            let int_a = cumulative_gauss(|s| pulse.vector_potential(s), &t);
            t.iter()
                .zip(&int_a)
                .map(|(&s, ia)| HBAR_OVER_M0 / mass * (k0 * (s - ts) + ia / HBAR))
                .collect()
        }
        _ => cumulative_gauss(|s| band.velocity(kin(s)), &t),
    };
    Ok(TrajectoryResult { t, k, v, dx })
}

/// Root-mean-square difference of two velocity traces relative to the RMS of `reference`.
pub fn relative_rms_difference(v: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = v.iter().zip(reference).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = reference.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

/// Weak-field cycle drift −(ε1 a T0/ħ) sin(k0 a), Å.
pub fn weak_field_drift(band: &TightBinding, k0: f64, hbar_omega0: f64) -> f64 {
    let t0 = 2.0 * PI * HBAR / hbar_omega0;
    let eps1 = band.eps.get(1).copied().unwrap_or(0.0);
    -(eps1 * band.a * t0 / HBAR) * (k0 * band.a).sin()
}

/// Net displacement over one carrier period of a nearest-neighbour band driven by
/// F(t) = F0 cos(ω0 t) with F0 = γ_DL ħω0 / a, by periodic quadrature.
pub fn cycle_drift(band: &TightBinding, k0: f64, gamma_dl: f64, hbar_omega0: f64) -> Result<f64> {
    if band.l_max() > 1 {
        return Err(Error::InvalidInput("cycle drift needs a nearest-neighbour band (l_max = 1)".into()));
    }
    if !(hbar_omega0 > 0.0) || !(gamma_dl >= 0.0) {
        return Err(Error::InvalidInput("need ħω0 > 0 and γ_DL ≥ 0".into()));
    }
    let omega = hbar_omega0 / HBAR;
    let period = 2.0 * PI / omega;
    let f0 = gamma_dl * hbar_omega0 / band.a;
    let kamp = f0 / (omega * HBAR);
    // v(t) is smooth and periodic, so the trapezoid rule converges geometrically.
    let n = 64 + 8 * (gamma_dl.ceil() as usize);
    let h = period / n as f64;
    let drift = (0..n)
        .map(|i| {
            let t = i as f64 * h;
            band.velocity(k0 - kamp * (omega * t).sin())
        })
        .sum::<f64>()
        * h;
    Ok(drift)
}

/// Closed form −(ε1 a T0/ħ) sin(k0 a) J0(γ_DL).
pub fn cycle_drift_closed_form(band: &TightBinding, k0: f64, gamma_dl: f64, hbar_omega0: f64) -> f64 {
    weak_field_drift(band, k0, hbar_omega0) * crate::special::j0(gamma_dl)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSpectrum {
    /// ω/ω0 for each frequency bin.
    pub orders: Vec<f64>,
    /// |DFT of the windowed velocity|², arbitrary units.
    pub intensity: Vec<f64>,
    /// ℓ_max γ_DL for tight-binding bands, 1 for a parabolic band.
    pub cutoff_estimate: Option<f64>,
    pub window: String,
}

impl HarmonicSpectrum {
    /// Intensity in dB relative to the spectral maximum.
    pub fn intensity_db(&self) -> Vec<f64> {
        let max = self.intensity.iter().cloned().fold(0.0, f64::max);
        self.intensity.iter().map(|i| 10.0 * (i / max).max(1e-300).log10()).collect()
    }

    /// Intensity of the bin nearest to a harmonic order.
    pub fn at_order(&self, order: f64) -> f64 {
        let step = self.orders[1] - self.orders[0];
        let idx = (order / step).round() as usize;
        self.intensity.get(idx).copied().unwrap_or(0.0)
    }

    /// Sum of intensities over bins with lo ≤ order < hi.
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        self.orders
            .iter()
            .zip(&self.intensity)
            .filter(|(o, _)| **o >= lo && **o < hi)
            .map(|(_, i)| i)
            .sum()
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["harmonic_order", "intensity_db"])
            .with_meta("units", "order = omega/omega0, intensity in dB relative to maximum")
            .with_meta("window", self.window.clone());
        if let Some(c) = self.cutoff_estimate {
            t = t.with_meta("cutoff_estimate", format!("{c}"));
        }
        for (o, db) in self.orders.iter().zip(self.intensity_db()) {
            t.push(vec![*o, db]);
        }
        t
    }
}

/// Harmonic spectrum of the intraband velocity: periodic Hann window over the full
/// record, then a DFT. The pulse must span at least eight carrier cycles.
pub fn hhg_spectrum(band: &BandDispersion, k0: f64, pulse: &PulseSpec) -> Result<HarmonicSpectrum> {
    band.validate()?;
    pulse.validate()?;
    let cycles = pulse.duration() / pulse.period();
    if cycles < MIN_HHG_CYCLES as f64 {
        return Err(Error::PulseTooShort { cycles, min: MIN_HHG_CYCLES });
    }
    let (cutoff, highest) = match band {
        BandDispersion::TightBinding(tb) => {
            let gamma_dl = pulse.f0 * tb.a / pulse.hbar_omega0;
            let c = tb.l_max() as f64 * gamma_dl;
            (Some(c), c)
        }
        BandDispersion::Ema { .. } => (Some(1.0), 1.0),
        BandDispersion::KaneTwoBand { .. } => (None, 8.0),
    };
    let per_cycle = (8.0 * (highest + 8.0)).max(64.0).ceil() as usize;
    let n = ((cycles * per_cycle as f64).ceil() as usize).max(2);
    let (ts, te) = pulse.window;
    let dt = (te - ts) / n as f64;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = ts + i as f64 * dt;
            let w = 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos());
            Complex64::new(w * band.velocity(k0 + pulse.vector_potential(t) / HBAR), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let step = pulse.period() / (te - ts);
    Ok(HarmonicSpectrum {
        orders: (0..=half).map(|j| j as f64 * step).collect(),
        intensity: buf[..=half].iter().map(|c| (c * dt).norm_sqr()).collect(),
        cutoff_estimate: cutoff,
        window: "periodic Hann over the full record".into(),
    })
}

/// Band populations f_n(k, t) on a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTable {
    /// Time samples, fs (strictly increasing).
    pub times: Vec<f64>,
    pub bands: Vec<BandPopulation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandPopulation {
    /// Effective mass of the band, units of m0.
    pub mass: f64,
    /// f[k][t]: carriers per Å³ at each k sample and time.
    pub f: Vec<Vec<f64>>,
}

/// Charge transferred by a weak drive, in units of e:
/// Q(Δt) = Σ_{n,k} (2 e² S / m_n) ∫ f_n(k, t) A(t − Δt) dt.
///
/// Valid when the drive keeps carriers in the parabolic part of the band.
pub fn transferred_charge(populations: &PopulationTable, drive: &PulseSpec, delay: f64, area: f64) -> Result<f64> {
    let times = &populations.times;
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::GridMismatch("time grid must be strictly increasing with ≥ 2 samples".into()));
    }
    let a_drive: Vec<f64> = times.iter().map(|&t| drive.vector_potential(t - delay)).collect();
    let mut q = 0.0;
    for (n, band) in populations.bands.iter().enumerate() {
        if band.mass == 0.0 {
            return Err(Error::InvalidInput(format!("band {n} has zero mass")));
        }
        let prefactor = 2.0 * area * HBAR_OVER_M0 / (HBAR * band.mass);
        for (ik, row) in band.f.iter().enumerate() {
            if row.len() != times.len() {
                return Err(Error::GridMismatch(format!(
                    "band {n}, k sample {ik}: {} populations for {} times",
                    row.len(),
                    times.len()
                )));
            }
            let integral: f64 = (0..times.len() - 1)
                .map(|i| 0.5 * (times[i + 1] - times[i]) * (row[i] * a_drive[i] + row[i + 1] * a_drive[i + 1]))
                .sum();
            q += prefactor * integral;
        }
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyTransfer {
    /// Work per unit volume W(t), eV/Å³.
    pub w: Vec<f64>,
    pub w_max: f64,
    pub w_irrev: f64,
}

/// W(t) = ∫ F · dP/dt dt on a uniform grid, with dP/dt by centred differences.
pub fn energy_transfer(field: &[f64], polarization: &[f64], dt: f64) -> Result<EnergyTransfer> {
    if field.len() != polarization.len() {
        return Err(Error::GridMismatch("field and polarization lengths differ".into()));
    }
    let n = field.len();
    if n < 3 {
        return Err(Error::InvalidInput("energy transfer needs at least 3 samples".into()));
    }
    let mut current = vec![0.0; n];
    current[0] = (-3.0 * polarization[0] + 4.0 * polarization[1] - polarization[2]) / (2.0 * dt);
    current[n - 1] = (3.0 * polarization[n - 1] - 4.0 * polarization[n - 2] + polarization[n - 3]) / (2.0 * dt);
    for i in 1..n - 1 {
        current[i] = (polarization[i + 1] - polarization[i - 1]) / (2.0 * dt);
    }
    energy_transfer_from_current(field, &current, dt)
}

/// W(t) = ∫ F · J dt on a uniform grid (trapezoid).
pub fn energy_transfer_from_current(field: &[f64], current: &[f64], dt: f64) -> Result<EnergyTransfer> {
    if field.len() != current.len() {
        return Err(Error::GridMismatch("field and current lengths differ".into()));
    }
    if field.len() < 3 {
        return Err(Error::InvalidInput("energy transfer needs at least 3 samples".into()));
    }
    let power: Vec<f64> = field.iter().zip(current).map(|(f, j)| f * j).collect();
    let w = crate::quad::cumulative_trapezoid(&power, dt);
    let w_max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w_irrev = *w.last().unwrap();
    Ok(EnergyTransfer { w, w_max, w_irrev })
}
