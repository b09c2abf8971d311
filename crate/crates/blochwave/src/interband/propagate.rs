//! Numerical propagation of the two-band Houston equations per k point.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{wrap_phase, TwoBandModel};
use crate::error::{Error, Result};
use crate::kgrid::KGrid;
use crate::ode::{Dopri5, Tolerances};
use crate::output::CsvTable;
use crate::pulse::PulseSpec;
use crate::units::HBAR;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationOptions {
    pub tol: Tolerances,
    /// Times (fs) at which to record snapshots; clipped to the pulse window.
    pub sample_times: Vec<f64>,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self { tol: Tolerances::tight(1e-10, 1e-10), sample_times: Vec::new() }
    }
}

/// Houston-basis amplitudes at one k and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBandState {
    pub t: f64,
    pub a_v: Complex64,
    pub a_c: Complex64,
    /// φ′ wrapped to (−π, π].
    pub phase: f64,
}

impl TwoBandState {
    pub fn population(&self) -> f64 {
        self.a_c.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.a_v.norm_sqr() + self.a_c.norm_sqr()
    }

    /// Interband coherence with the dynamic phase restored, c_c c_v* = a_c a_v* e^{−iφ′}.
    pub fn coherence(&self) -> Complex64 {
        self.a_c * self.a_v.conj() * Complex64::from_polar(1.0, -self.phase)
    }
}

/// Density matrix in the Houston basis (interaction picture).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrixState {
    pub t: f64,
    pub rho_vv: f64,
    pub rho_cc: f64,
    pub rho_cv: Complex64,
    pub phase: f64,
}

impl DensityMatrixState {
    pub fn population(&self) -> f64 {
        self.rho_cc
    }

    pub fn trace(&self) -> f64 {
        self.rho_vv + self.rho_cc
    }

    pub fn purity(&self) -> f64 {
        self.rho_vv.powi(2) + self.rho_cc.powi(2) + 2.0 * self.rho_cv.norm_sqr()
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        density_matrix_eigenvalues(self.rho_vv, self.rho_cc, self.rho_cv)
    }
}

/// Eigenvalues (low, high) of [[ρ_vv, ρ_cv*], [ρ_cv, ρ_cc]].
pub fn density_matrix_eigenvalues(rho_vv: f64, rho_cc: f64, rho_cv: Complex64) -> (f64, f64) {
    let mean = 0.5 * (rho_vv + rho_cc);
    let r = (0.25 * (rho_cc - rho_vv).powi(2) + rho_cv.norm_sqr()).sqrt();
    (mean - r, mean + r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KTrajectory<S> {
    pub k: f64,
    pub final_state: S,
    pub snapshots: Vec<S>,
    /// Largest deviation of the invariant (norm or trace) from 1 over accepted steps.
    pub max_drift: f64,
    /// Extreme density-matrix eigenvalues seen (pure-state runs report (0, 1)).
    pub eigen_range: (f64, f64),
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult<S> {
    pub trajectories: Vec<KTrajectory<S>>,
    pub sample_times: Vec<f64>,
}

pub trait Populated {
    fn population(&self) -> f64;
    /// ρ_cv with the dynamic phase restored.
    fn lab_coherence(&self) -> Complex64;
}

impl Populated for TwoBandState {
    fn population(&self) -> f64 {
        TwoBandState::population(self)
    }

    fn lab_coherence(&self) -> Complex64 {
        self.coherence()
    }
}

impl Populated for DensityMatrixState {
    fn population(&self) -> f64 {
        self.rho_cc
    }

    fn lab_coherence(&self) -> Complex64 {
        self.rho_cv * Complex64::from_polar(1.0, -self.phase)
    }
}

impl<S: Populated> PropagationResult<S> {
    pub fn k(&self) -> Vec<f64> {
        self.trajectories.iter().map(|t| t.k).collect()
    }

    /// Final conduction populations f_c(k).
    pub fn final_populations(&self) -> Vec<f64> {
        self.trajectories.iter().map(|t| t.final_state.population()).collect()
    }

    pub fn max_drift(&self) -> f64 {
        self.trajectories.iter().map(|t| t.max_drift).fold(0.0, f64::max)
    }

    /// (k_invA, f_c) table of final populations.
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["k_invA", "f_c"]).with_meta("units", "k in 1/A, f_c dimensionless");
        for tr in &self.trajectories {
            t.push(vec![tr.k, tr.final_state.population()]);
        }
        t
    }

    /// Interband polarization per k sample at each snapshot time, e·Å:
    /// P = −⟨x⟩_cv = −2 Re(ρ_cv* ξ_cv(K)) averaged over the grid.
    /// With this sign the field does work dW/dt = F dP/dt on the electrons.
    pub fn polarization(&self, model: &TwoBandModel, pulse: &PulseSpec) -> Vec<f64> {
        let n = self.trajectories.len().max(1) as f64;
        self.sample_times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let a = pulse.vector_potential(t) / HBAR;
                -2.0 * self
                    .trajectories
                    .iter()
                    .filter_map(|tr| tr.snapshots.get(i).map(|s| (s.lab_coherence().conj() * model.xi_cv.eval(tr.k + a)).re))
                    .sum::<f64>()
                    / n
            })
            .collect()
    }

    /// Intraband current of the created pairs at each snapshot time, e·Å/fs:
    /// J = −f_c(K) (dE_cv/dK)/ħ averaged over the grid.
    pub fn intraband_current(&self, model: &TwoBandModel, pulse: &PulseSpec) -> Vec<f64> {
        let n = self.trajectories.len().max(1) as f64;
        self.sample_times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let a = pulse.vector_potential(t) / HBAR;
                -self
                    .trajectories
                    .iter()
                    .filter_map(|tr| tr.snapshots.get(i).map(|s| s.population() * model.gap.slope(tr.k + a) / HBAR))
                    .sum::<f64>()
                    / n
            })
            .collect()
    }

    /// Snapshot tables: one (k_invA, f_c) table per sample time, plus the time index.
    pub fn snapshot_tables(&self) -> (Vec<CsvTable>, CsvTable) {
        let mut index = CsvTable::new(&["snapshot", "t_fs"]).with_meta("units", "t in fs");
        let mut tables = Vec::new();
        for (i, &t) in self.sample_times.iter().enumerate() {
            index.push(vec![i as f64, t]);
            let mut tab = CsvTable::new(&["k_invA", "f_c"]).with_meta("t_fs", format!("{t}"));
            for tr in &self.trajectories {
                if let Some(s) = tr.snapshots.get(i) {
                    tab.push(vec![tr.k, s.population()]);
                }
            }
            tables.push(tab);
        }
        (tables, index)
    }
}

fn clip_samples(pulse: &PulseSpec, times: &[f64]) -> Vec<f64> {
    let (ts, te) = pulse.window;
    let mut v: Vec<f64> = times.iter().map(|t| t.clamp(ts, te)).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn tag_k(e: Error, k: f64) -> Error {
    match e {
        Error::StepUnderflow { t, .. } => Error::StepUnderflow { t, k: Some(k) },
        other => other,
    }
}

fn propagate_one_pure(
    model: &TwoBandModel,
    k: f64,
    pulse: &PulseSpec,
    opts: &PropagationOptions,
    samples: &[f64],
) -> Result<KTrajectory<TwoBandState>> {
    let (ts, te) = pulse.window;
    let mut ode = Dopri5::new(ts, vec![1.0, 0.0, 0.0, 0.0, 0.0], opts.tol);
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (v, wgap) = model.drive(k, pulse, t);
        let w = v * Complex64::from_polar(1.0, y[4]) / HBAR;
        let av = Complex64::new(y[0], y[1]);
        let ac = Complex64::new(y[2], y[3]);
        let minus_i = Complex64::new(0.0, -1.0);
        let dav = minus_i * w.conj() * ac;
        let dac = minus_i * w * av;
        dy[0] = dav.re;
        dy[1] = dav.im;
        dy[2] = dac.re;
        dy[3] = dac.im;
        dy[4] = wgap;
    };
    let state = |ode: &Dopri5| TwoBandState {
        t: ode.t,
        a_v: Complex64::new(ode.y[0], ode.y[1]),
        a_c: Complex64::new(ode.y[2], ode.y[3]),
        phase: ode.y[4],
    };
    let mut drift: f64 = 0.0;
    let mut snapshots = Vec::with_capacity(samples.len());
    let mut post = |y: &mut [f64]| {
        let n = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
        drift = drift.max((n - 1.0).abs());
        wrap_phase(&mut y[4])
    };
    for &s in samples {
        ode.advance(rhs, s, &mut post).map_err(|e| tag_k(e, k))?;
        snapshots.push(state(&ode));
    }
    ode.advance(rhs, te, &mut post).map_err(|e| tag_k(e, k))?;
    Ok(KTrajectory {
        k,
        final_state: state(&ode),
        snapshots,
        max_drift: drift,
        eigen_range: (0.0, 1.0),
        steps: ode.steps,
    })
}

/// Propagate the Houston equations from the valence state at every k of the grid.
pub fn propagate_two_band(
    model: &TwoBandModel,
    kgrid: &KGrid,
    pulse: &PulseSpec,
    opts: &PropagationOptions,
) -> Result<PropagationResult<TwoBandState>> {
    model.validate()?;
    pulse.validate()?;
    opts.tol.validate()?;
    let samples = clip_samples(pulse, &opts.sample_times);
    let trajectories = kgrid
        .points_1d()
        .par_iter()
        .map(|&k| propagate_one_pure(model, k, pulse, opts, &samples))
        .collect::<Result<Vec<_>>>()?;
    Ok(PropagationResult { trajectories, sample_times: samples })
}

fn propagate_one_mixed(
    model: &TwoBandModel,
    k: f64,
    pulse: &PulseSpec,
    gamma: f64,
    opts: &PropagationOptions,
    samples: &[f64],
) -> Result<KTrajectory<DensityMatrixState>> {
    let (ts, te) = pulse.window;
    // y = [ρ_vv, ρ_cc, Re ρ_cv, Im ρ_cv, φ′]
    let mut ode = Dopri5::new(ts, vec![1.0, 0.0, 0.0, 0.0, 0.0], opts.tol);
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (v, wgap) = model.drive(k, pulse, t);
        let w = v * Complex64::from_polar(1.0, y[4]) / HBAR;
        let rho_cv = Complex64::new(y[2], y[3]);
        let pop = 2.0 * (w * rho_cv.conj()).im;
        let d_cv = Complex64::new(0.0, -1.0) * w * (y[0] - y[1]) - rho_cv * gamma;
        dy[0] = -pop;
        dy[1] = pop;
        dy[2] = d_cv.re;
        dy[3] = d_cv.im;
        dy[4] = wgap;
    };
    let state = |ode: &Dopri5| DensityMatrixState {
        t: ode.t,
        rho_vv: ode.y[0],
        rho_cc: ode.y[1],
        rho_cv: Complex64::new(ode.y[2], ode.y[3]),
        phase: ode.y[4],
    };
    let mut drift: f64 = 0.0;
    let mut eig = (f64::INFINITY, f64::NEG_INFINITY);
    let mut snapshots = Vec::with_capacity(samples.len());
    let mut post = |y: &mut [f64]| {
        drift = drift.max((y[0] + y[1] - 1.0).abs());
        let (lo, hi) = density_matrix_eigenvalues(y[0], y[1], Complex64::new(y[2], y[3]));
        eig = (eig.0.min(lo), eig.1.max(hi));
        wrap_phase(&mut y[4])
    };
    for &s in samples {
        ode.advance(rhs, s, &mut post).map_err(|e| tag_k(e, k))?;
        snapshots.push(state(&ode));
    }
    ode.advance(rhs, te, &mut post).map_err(|e| tag_k(e, k))?;
    if !eig.0.is_finite() {
        eig = (0.0, 1.0);
    }
    Ok(KTrajectory { k, final_state: state(&ode), snapshots, max_drift: drift, eigen_range: eig, steps: ode.steps })
}

/// Two-band Bloch equations with pure dephasing of ρ_cv at rate 1/T2 (no population
/// relaxation). `t2 = f64::INFINITY` disables dephasing.
pub fn propagate_with_dephasing(
    model: &TwoBandModel,
    kgrid: &KGrid,
    pulse: &PulseSpec,
    t2: f64,
    opts: &PropagationOptions,
) -> Result<PropagationResult<DensityMatrixState>> {
    if !(t2 > 0.0) {
        return Err(Error::InvalidInput(format!("T2 must be positive or infinite, got {t2}")));
    }
    model.validate()?;
    pulse.validate()?;
    opts.tol.validate()?;
    let gamma = if t2.is_infinite() { 0.0 } else { 1.0 / t2 };
    let samples = clip_samples(pulse, &opts.sample_times);
    let trajectories = kgrid
        .points_1d()
        .par_iter()
        .map(|&k| propagate_one_mixed(model, k, pulse, gamma, opts, &samples))
        .collect::<Result<Vec<_>>>()?;
    Ok(PropagationResult { trajectories, sample_times: samples })
}
