//! Cycle-averaged excitation rates versus peak field.

use rayon::prelude::*;

use super::{propagate_two_band, GapModel, PropagationOptions, TwoBandModel};
use crate::error::{Error, Result};
use crate::kgrid::KGrid;
use crate::output::CsvTable;
use crate::pulse::PulseSpec;
use crate::quad::gauss_legendre_rule;
use crate::regimes::channel_count;
use crate::units::HBAR2_OVER_M0;

pub const MIN_SCAN_CYCLES: usize = 10;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScanOptions {
    pub propagation: PropagationOptions,
    /// Average over transverse momenta of an isotropic 3D Kane band.
    pub transverse: Option<TransverseQuadrature>,
}

/// Gauss–Legendre nodes in k⊥ ∈ [0, k_max] weighted by k⊥ (cylindrical shells).
/// For a Kane gap, E_cv(k∥, k⊥) is again a Kane gap in k∥ with
/// Eg′ = Eg √(1 + ħ²k⊥²/(m Eg)) and mass m Eg′/Eg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseQuadrature {
    pub nodes: usize,
    /// Å⁻¹.
    pub k_max: f64,
}

impl TransverseQuadrature {
    fn shells(&self, model: &TwoBandModel) -> Result<Vec<(f64, TwoBandModel)>> {
        let GapModel::Kane { eg, mass } = model.gap else {
            return Err(Error::InvalidInput("transverse averaging requires a Kane gap".into()));
        };
        if self.nodes == 0 || !(self.k_max > 0.0) {
            return Err(Error::InvalidInput("transverse quadrature needs nodes and k_max > 0".into()));
        }
        let (x, w) = gauss_legendre_rule(self.nodes);
        let half = 0.5 * self.k_max;
        let total: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * half * (xi + 1.0)).sum();
        Ok(x.iter()
            .zip(&w)
            .map(|(xi, wi)| {
                let kp = half * (xi + 1.0);
                let egp = eg * (1.0 + HBAR2_OVER_M0 * kp * kp / (mass * eg)).sqrt();
                let mut shell = model.clone();
                shell.gap = GapModel::Kane { eg: egp, mass: mass * egp / eg };
                (wi * kp / total, shell)
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub f0: f64,
    /// k-averaged final conduction population divided by the pulse duration (1/fs).
    pub rate: f64,
    pub up: f64,
    pub n_tilde: u64,
    /// The rate dropped from the previous grid point to this one.
    pub closing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateScan {
    pub rows: Vec<RateRow>,
    pub duration: f64,
    pub hbar_omega0: f64,
}

impl RateScan {
    /// Indices i for which rate[i] < rate[i−1].
    pub fn closings(&self) -> Vec<usize> {
        self.rows.iter().enumerate().filter(|(_, r)| r.closing).map(|(i, _)| i).collect()
    }

    /// Indices i where Ñ(F0) steps up between i−1 and i.
    pub fn staircase_steps(&self) -> Vec<usize> {
        (1..self.rows.len()).filter(|&i| self.rows[i].n_tilde > self.rows[i - 1].n_tilde).collect()
    }

    /// γ_NP = Up/ħω0 for row i.
    pub fn gamma_np(&self, i: usize) -> f64 {
        self.rows[i].up / self.hbar_omega0
    }

    /// Log-log slope over rows `range`.
    pub fn slope_of_rows(&self, range: std::ops::Range<usize>) -> Result<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self.rows[range].iter().map(|r| (r.f0, r.rate)).unzip();
        fit_loglog_slope(&x, &y)
    }

    /// Log-log slope over the rows with F0 in [lo, hi].
    pub fn slope_between(&self, lo: f64, hi: f64) -> Result<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) =
            self.rows.iter().filter(|r| r.f0 >= lo && r.f0 <= hi).map(|r| (r.f0, r.rate)).unzip();
        fit_loglog_slope(&x, &y)
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["F0_V_per_A", "rate_per_fs", "N_tilde", "closing_flag"])
            .with_meta("rate_definition", "k-averaged final conduction population / pulse duration")
            .with_meta("duration_fs", format!("{}", self.duration))
            .with_meta("hbar_omega0_eV", format!("{}", self.hbar_omega0));
        for r in &self.rows {
            t.push(vec![r.f0, r.rate, r.n_tilde as f64, if r.closing { 1.0 } else { 0.0 }]);
        }
        t
    }
}

/// Least-squares slope of ln y against ln x.
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::GridMismatch(format!("{} abscissae vs {} ordinates", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput("slope fit needs at least two points".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log-log fit requires positive data".into()));
    }
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("degenerate abscissae".into()));
    }
    Ok(sxy / sxx)
}

/// Rate versus F0 for a monochromatic pulse family sharing `template`'s shape.
pub fn excitation_rate_scan(
    model: &TwoBandModel,
    template: &PulseSpec,
    f0_grid: &[f64],
    kgrid: &KGrid,
    opts: &ScanOptions,
) -> Result<RateScan> {
    if !template.is_monochromatic() {
        return Err(Error::InvalidInput("rate scan requires a monochromatic pulse".into()));
    }
    let cycles = template.duration() / template.period();
    if cycles < MIN_SCAN_CYCLES as f64 - 1e-9 {
        return Err(Error::PulseTooShort { cycles, min: MIN_SCAN_CYCLES });
    }
    if f0_grid.is_empty() || f0_grid.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
        return Err(Error::InvalidInput("F0 grid must be non-empty and positive".into()));
    }
    let duration = template.duration();
    let eg = model.gap.gap();
    let hw = template.hbar_omega0;
    let shells = match &opts.transverse {
        Some(q) => q.shells(model)?,
        None => vec![(1.0, model.clone())],
    };
    let mut rows: Vec<RateRow> = Vec::with_capacity(f0_grid.len());
    for &f0 in f0_grid {
        let pulse = template.clone().with_f0(f0);
        let per_shell = shells
            .par_iter()
            .map(|(w, m)| {
                let pops = propagate_two_band(m, kgrid, &pulse, &opts.propagation)?.final_populations();
                Ok(w * pops.iter().sum::<f64>() / pops.len() as f64)
            })
            .collect::<Result<Vec<f64>>>()?;
        let rate = per_shell.iter().sum::<f64>() / duration;
        let up = model.gap.ponderomotive(f0, hw);
        let closing = rows.last().is_some_and(|p| rate < p.rate);
        rows.push(RateRow { f0, rate, up, n_tilde: channel_count(eg, up, hw), closing });
    }
    Ok(RateScan { rows, duration, hbar_omega0: hw })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = (1..10).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powi(10)).collect();
        assert!((fit_loglog_slope(&x, &y).unwrap() - 10.0).abs() < 1e-10);
    }

    #[test]
    fn slope_rejects_bad_input() {
        assert!(fit_loglog_slope(&[1.0], &[1.0]).is_err());
        assert!(fit_loglog_slope(&[1.0, 2.0], &[1.0, -1.0]).is_err());
        assert!(fit_loglog_slope(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn rejects_pulses_not_suitable() {
        let m = TwoBandModel::kane(9.0, 0.5, 4.9);
        let g = KGrid::line(4, 4.9).unwrap();
        let o = ScanOptions::default();
        let short = PulseSpec::flat_top(0.5, 1.8, 4.0, 1.0);
        assert!(matches!(excitation_rate_scan(&m, &short, &[0.5], &g, &o), Err(Error::PulseTooShort { .. })));
        let ss = PulseSpec::sine_square(0.5, 1.8, 20.0);
        assert!(excitation_rate_scan(&m, &ss, &[0.5], &g, &o).is_err());
        let flat = TwoBandModel::flat(9.0, 0.5, 4.9);
        let long = PulseSpec::flat_top(0.5, 1.8, 10.0, 2.0);
        let tq = ScanOptions { transverse: Some(TransverseQuadrature { nodes: 2, k_max: 0.5 }), ..Default::default() };
        assert!(excitation_rate_scan(&flat, &long, &[0.5], &g, &tq).is_err());
    }

    #[test]
    fn transverse_shells_are_kane_sections() {
        let m = TwoBandModel::kane(9.0, 0.5, 4.9);
        let q = TransverseQuadrature { nodes: 4, k_max: 0.6 };
        let shells = q.shells(&m).unwrap();
        assert!((shells.iter().map(|s| s.0).sum::<f64>() - 1.0).abs() < 1e-12);
        let (x, _) = gauss_legendre_rule(4);
        for ((_, s), xi) in shells.iter().zip(&x) {
            let kp = 0.3 * (xi + 1.0);
            for kx in [0.0, 0.2, -0.4] {
                let full = m.gap.energy((kx * kx + kp * kp as f64).sqrt());
                assert!((s.gap.energy(kx) - full).abs() < 1e-12);
            }
        }
    }
}
