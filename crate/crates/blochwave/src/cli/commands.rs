//! One function per subcommand. Each validates its inputs, computes, and stages
//! its artifacts; nothing touches the filesystem here.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{cfg_err, BandBlock, EnvelopeKind, PulseDefaults, Range, RunConfig};
use super::{CliError, Outcome};
use crate::band::BandDispersion;
use crate::geometry::{
    anomalous_trajectory, chern_and_curvature, zak_phase, Band, BlochModel2Band, CurvatureField, Drive,
};
use crate::interband::{
    excitation_rate_scan, propagate_two_band, propagate_with_dephasing, PropagationOptions, ScanOptions,
    TransverseQuadrature,
};
use crate::intraband::{
    energy_transfer_from_current, hhg_spectrum, relative_rms_difference, trajectory, transferred_charge,
    BandPopulation, PopulationTable,
};
use crate::kgrid::KGrid;
use crate::ladders::{fke_curve, kane_ladder, localization_lengths, WsFan};
use crate::material::{materials as all_materials, MaterialRecord};
use crate::ode::Tolerances;
use crate::output::{CsvTable, OutputSet};
use crate::pulse::PulseSpec;
use crate::regimes::{adiabaticity_report, ponderomotive, ponderomotive_ema, report_from_up};
use crate::resonant::{generalized_area, solve_two_level, two_level_tolerances, TwoLevelSystem};
use crate::units::HBAR;

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub hash: &'a str,
}

impl Context<'_> {
    fn stamp(&self, mut t: CsvTable, producer: &str) -> CsvTable {
        let mut meta = vec![
            ("producer".to_string(), format!("blochwave {producer}")),
            ("config_sha256".to_string(), self.hash.to_string()),
            ("unit_system".to_string(), "eV, fs, Angstrom, V/Angstrom".to_string()),
        ];
        meta.append(&mut t.meta);
        t.meta = meta;
        t
    }

    fn csv(&self, files: &mut OutputSet, name: &str, t: CsvTable) {
        let producer = self.cfg.subcommand.clone().unwrap_or_default();
        files.add(name, self.stamp(t, &producer).render());
    }

    fn json(&self, files: &mut OutputSet, name: &str, mut v: Value) -> String {
        if let Value::Object(m) = &mut v {
            m.insert("config_sha256".into(), Value::from(self.hash));
        }
        let text = serde_json::to_string_pretty(&v).unwrap_or_default();
        files.add(name, format!("{text}\n"));
        v.to_string()
    }
}

fn kgrid(points: usize, a: f64) -> Result<KGrid, CliError> {
    KGrid::line(points, a).map_err(cfg_err)
}

fn sweep_or(cfg: &RunConfig, start: f64, stop: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    Ok(cfg
        .sweep_values(Some(Range { start, stop, points, log }))?
        .unwrap_or_default())
}

fn uniform_times(pulse: &PulseSpec, n: usize) -> Vec<f64> {
    let (a, b) = pulse.window;
    let n = n.max(2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn materials(ctx: &Context) -> Result<Outcome, CliError> {
    let mut files = OutputSet::default();
    let value = match ctx.cfg.material()? {
        Some(m) => serde_json::to_value(&m).map_err(|e| CliError::Config(e.to_string()))?,
        None => json!({ "materials": all_materials() }),
    };
    let summary = ctx.json(&mut files, "materials.json", value);
    Ok(Outcome { files, summary })
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegimeOptions {}

fn default_mass(m: &MaterialRecord) -> f64 {
    m.m_reduced.unwrap_or(0.5)
}

pub fn regimes(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let _: RegimeOptions = cfg.options()?;
    let material = cfg.material()?.ok_or_else(|| CliError::Config("regimes needs --material".into()))?;
    let pulse = cfg.pulse(PulseDefaults { envelope: EnvelopeKind::Monochromatic, cycles: 1.0, ..Default::default() })?;
    let band = cfg.dispersion(&material, BandBlock::Ema { mass: default_mass(&material) })?;
    let report = adiabaticity_report(&material, &pulse, &band)?;
    let mut files = OutputSet::default();
    if let Some(f0s) = cfg.sweep_values(None)? {
        let ema_mass = match &band {
            BandDispersion::Ema { mass } | BandDispersion::KaneTwoBand { mass, .. } => *mass,
            BandDispersion::TightBinding(tb) => tb.effective_mass_at(0.0),
        };
        let mut t = CsvTable::new(&["F0_V_per_A", "Up_eV", "Up_EMA_eV", "gamma_K", "gamma_NP", "gamma_DL", "N_tilde"])
            .with_meta("band", format!("{band:?}"))
            .with_meta("ema_mass_m0", format!("{ema_mass}"));
        for f0 in f0s {
            let p = pulse.with_f0(f0);
            let up = ponderomotive(&p, &band, Some(material.eg))?;
            let r = report_from_up(&material, &p, up);
            let ema = ponderomotive_ema(f0, p.hbar_omega0, p.beta, ema_mass);
            t.push(vec![f0, up, ema, r.gamma_k, r.gamma_np, r.gamma_dl, r.n_tilde as f64]);
        }
        ctx.csv(&mut files, "regimes_sweep.csv", t);
    }
    let mut v = serde_json::to_value(&report).map_err(|e| CliError::Config(e.to_string()))?;
    if let Value::Object(m) = &mut v {
        m.insert("material".into(), Value::from(material.name.clone()));
        m.insert("F0".into(), Value::from(pulse.f0));
        m.insert("hbar_omega0".into(), Value::from(pulse.hbar_omega0));
    }
    let summary = ctx.json(&mut files, "regimes.json", v);
    Ok(Outcome { files, summary })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ScanCliOptions {
    k_points: usize,
    /// Gauss–Legendre nodes over k⊥ (0: purely 1D).
    transverse_nodes: usize,
    /// Upper k⊥ limit in units of π/a.
    transverse_kmax_pi_over_a: f64,
    xi: Option<f64>,
}

impl Default for ScanCliOptions {
    fn default() -> Self {
        Self { k_points: 64, transverse_nodes: 0, transverse_kmax_pi_over_a: 1.0, xi: None }
    }
}

pub fn keldysh_scan(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: ScanCliOptions = cfg.options()?;
    let material = cfg.material_or("SiO2")?;
    let model = cfg.two_band(&material, o.xi)?;
    let template = cfg.pulse(PulseDefaults {
        f0: Some(1.0),
        envelope: EnvelopeKind::FlatTop,
        cycles: 20.0,
        ramp_cycles: 3.0,
        ..Default::default()
    })?;
    let f0s = sweep_or(cfg, 0.3, 2.3, 40, true)?;
    let transverse = (o.transverse_nodes > 0).then(|| TransverseQuadrature {
        nodes: o.transverse_nodes,
        k_max: o.transverse_kmax_pi_over_a * PI / model.a,
    });
    let opts = ScanOptions {
        propagation: PropagationOptions { tol: cfg.tolerances(Tolerances::default())?, ..Default::default() },
        transverse,
    };
    let scan = excitation_rate_scan(&model, &template, &f0s, &kgrid(o.k_points, model.a)?, &opts)?;
    let closings = scan.closings();
    let mut files = OutputSet::default();
    ctx.csv(&mut files, "rate_scan.csv", scan.to_csv().with_meta("transverse_nodes", format!("{}", o.transverse_nodes)));
    let summary = format!(
        "keldysh-scan: {} F0 points, {} rate decreases, N_tilde {}..{}",
        scan.rows.len(),
        closings.len(),
        scan.rows.first().map_or(0, |r| r.n_tilde),
        scan.rows.last().map_or(0, |r| r.n_tilde)
    );
    Ok(Outcome { files, summary })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct TrajectoryOptions {
    k0: f64,
    samples_per_cycle: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self { k0: 0.0, samples_per_cycle: 64 }
    }
}

fn default_band(material: &MaterialRecord) -> BandBlock {
    if material.name.eq_ignore_ascii_case("SiO2") {
        BandBlock::Sio2GammaM { component: "conduction".into() }
    } else {
        BandBlock::Ema { mass: default_mass(material) }
    }
}

pub fn intraband(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: TrajectoryOptions = cfg.options()?;
    let material = cfg.material_or("SiO2")?;
    let band = cfg.dispersion(&material, default_band(&material))?;
    let pulse = cfg.pulse(PulseDefaults { f0: Some(1.0), fwhm: 10.0, ..Default::default() })?;
    let samples_for = |p: &PulseSpec| (p.duration() / p.period() * o.samples_per_cycle as f64).ceil() as usize + 1;
    let ema = match &band {
        BandDispersion::TightBinding(tb) => Some(BandDispersion::Ema { mass: tb.effective_mass_at(o.k0) }),
        _ => None,
    };
    let mut files = OutputSet::default();
    let run = trajectory(&band, o.k0, &pulse, samples_for(&pulse))?;
    ctx.csv(&mut files, "trajectory.csv", run.to_csv());
    let mut summary = format!("intraband: {} samples, max |v| = {:.4} A/fs", run.t.len(), run.v.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    if let Some(ema) = &ema {
        let reference = trajectory(ema, o.k0, &pulse, samples_for(&pulse))?;
        let rms = relative_rms_difference(&run.v, &reference.v);
        ctx.csv(&mut files, "trajectory_ema.csv", reference.to_csv());
        summary.push_str(&format!(", band-vs-parabolic RMS velocity difference {:.2}%", 100.0 * rms));
        if let Some(f0s) = cfg.sweep_values(None)? {
            let mut t = CsvTable::new(&["F0_V_per_A", "rms_velocity_difference"]);
            for f0 in f0s {
                let p = pulse.with_f0(f0);
                let a = trajectory(&band, o.k0, &p, samples_for(&p))?;
                let b = trajectory(ema, o.k0, &p, samples_for(&p))?;
                t.push(vec![f0, relative_rms_difference(&a.v, &b.v)]);
            }
            ctx.csv(&mut files, "rms_vs_F0.csv", t);
        }
    }
    Ok(Outcome { files, summary })
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct HhgOptions {
    k0: f64,
}

pub fn hhg(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: HhgOptions = cfg.options()?;
    let material = cfg.material_or("SiO2")?;
    let band = cfg.dispersion(&material, default_band(&material))?;
    let pulse = cfg.pulse(PulseDefaults {
        f0: Some(1.0),
        envelope: EnvelopeKind::FlatTop,
        cycles: 16.0,
        ramp_cycles: 3.0,
        ..Default::default()
    })?;
    let s = hhg_spectrum(&band, o.k0, &pulse)?;
    let mut files = OutputSet::default();
    ctx.csv(&mut files, "hhg.csv", s.to_csv());
    let summary = match s.cutoff_estimate {
        Some(c) => format!("hhg: {} bins, cutoff estimate order {c:.2}", s.orders.len()),
        None => format!("hhg: {} bins", s.orders.len()),
    };
    Ok(Outcome { files, summary })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct TwoBandOptions {
    k_points: usize,
    /// Number of uniformly spaced snapshots (0: final state only).
    snapshots: usize,
    xi: Option<f64>,
    /// Dephasing time T2 in fs; `null` or absent means no dephasing.
    t2: Option<f64>,
}

impl Default for TwoBandOptions {
    fn default() -> Self {
        Self { k_points: 32, snapshots: 0, xi: None, t2: None }
    }
}

fn two_band_pulse(cfg: &RunConfig) -> Result<PulseSpec, CliError> {
    cfg.pulse(PulseDefaults { f0: Some(1.0), ..Default::default() })
}

pub fn tdse(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: TwoBandOptions = cfg.options()?;
    if o.t2.is_some() {
        return Err(CliError::Config("options.t2 belongs to the dephasing subcommand".into()));
    }
    let material = cfg.material_or("SiO2")?;
    let model = cfg.two_band(&material, o.xi)?;
    let pulse = two_band_pulse(cfg)?;
    let opts = PropagationOptions {
        tol: cfg.tolerances(Tolerances::default())?,
        sample_times: if o.snapshots > 0 { uniform_times(&pulse, o.snapshots) } else { Vec::new() },
    };
    let r = propagate_two_band(&model, &kgrid(o.k_points, model.a)?, &pulse, &opts)?;
    let mut files = OutputSet::default();
    let drift = r.max_drift();
    ctx.csv(&mut files, "populations.csv", r.to_csv().with_meta("max_norm_drift", format!("{drift:e}")));
    if o.snapshots > 0 {
        let (tables, index) = r.snapshot_tables();
        for (i, t) in tables.into_iter().enumerate() {
            ctx.csv(&mut files, &format!("snapshot_{i:04}.csv"), t);
        }
        ctx.csv(&mut files, "snapshots.csv", index);
    }
    let pops = r.final_populations();
    let mean = pops.iter().sum::<f64>() / pops.len() as f64;
    Ok(Outcome { files, summary: format!("tdse: {} k points, mean f_c = {mean:.6e}, max norm drift {drift:.2e}", pops.len()) })
}

pub fn dephasing(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: TwoBandOptions = cfg.options()?;
    let t2 = o.t2.unwrap_or(f64::INFINITY);
    if !(t2 > 0.0) {
        return Err(CliError::Config(format!("options.t2 must be positive, got {t2}")));
    }
    let material = cfg.material_or("SiO2")?;
    let model = cfg.two_band(&material, o.xi)?;
    let pulse = two_band_pulse(cfg)?;
    let opts = PropagationOptions {
        tol: cfg.tolerances(Tolerances::default())?,
        sample_times: if o.snapshots > 0 { uniform_times(&pulse, o.snapshots) } else { Vec::new() },
    };
    let r = propagate_with_dephasing(&model, &kgrid(o.k_points, model.a)?, &pulse, t2, &opts)?;
    let mut files = OutputSet::default();
    let eig = r
        .trajectories
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t.eigen_range.0), hi.max(t.eigen_range.1)));
    let mut table = CsvTable::new(&["k_invA", "f_c", "purity"])
        .with_meta("T2_fs", format!("{t2}"))
        .with_meta("eigenvalue_range", format!("{:e}..{:e}", eig.0, eig.1));
    for tr in &r.trajectories {
        table.push(vec![tr.k, tr.final_state.rho_cc, tr.final_state.purity()]);
    }
    ctx.csv(&mut files, "populations.csv", table);
    if o.snapshots > 0 {
        let (tables, index) = r.snapshot_tables();
        for (i, t) in tables.into_iter().enumerate() {
            ctx.csv(&mut files, &format!("snapshot_{i:04}.csv"), t);
        }
        ctx.csv(&mut files, "snapshots.csv", index);
    }
    let pops = r.final_populations();
    let mean = pops.iter().sum::<f64>() / pops.len() as f64;
    Ok(Outcome {
        files,
        summary: format!("dephasing: T2 = {t2} fs, mean f_c = {mean:.6e}, eigenvalues in [{:.2e}, {:.6}]", eig.0, eig.1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
enum LadderMode {
    #[default]
    Fan,
    Localization,
    Kane,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LadderOptions {
    mode: LadderMode,
    /// Rung indices −rungs..=rungs.
    rungs: i64,
    /// Mean conduction and valence energies for the fan, eV.
    mean_c: Option<f64>,
    mean_v: f64,
    /// Real-space interband dipoles as [ℓ, Re Ξ, Im Ξ] (Å).
    dipoles: Vec<(i64, f64, f64)>,
    bandwidth: Option<f64>,
    wannier_extent: Option<f64>,
    /// Static field for a Kane ladder, V/Å.
    f0: f64,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self {
            mode: LadderMode::Fan,
            rungs: 3,
            mean_c: None,
            mean_v: 0.0,
            dipoles: vec![(0, 0.2, 0.0), (1, 0.1, 0.0)],
            bandwidth: None,
            wannier_extent: None,
            f0: 0.5,
        }
    }
}

pub fn ladders(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: LadderOptions = cfg.options()?;
    let material = cfg.material_or("SiO2")?;
    let mut files = OutputSet::default();
    let summary = match o.mode {
        LadderMode::Fan => {
            if o.rungs < 0 {
                return Err(CliError::Config("options.rungs must be non-negative".into()));
            }
            let fan = WsFan {
                mean_c: o.mean_c.unwrap_or(material.eg),
                mean_v: o.mean_v,
                a: material.a,
                dipoles: o.dipoles.iter().map(|&(l, re, im)| (l, Complex64::new(re, im))).collect(),
                rungs: -o.rungs..=o.rungs,
            };
            let f0s = sweep_or(cfg, 0.0, 4.0, 201, false)?;
            let t = fan.to_csv(&f0s)?;
            let levels = t.rows.len() / f0s.len().max(1);
            ctx.csv(&mut files, "ws_fan.csv", t);
            format!("ladders: fan with {levels} levels over {} fields", f0s.len())
        }
        LadderMode::Localization => {
            let bw = o.bandwidth.or(material.bandwidth).ok_or_else(|| {
                CliError::Config(format!("material {} has no bandwidth; set options.bandwidth", material.name))
            })?;
            let lw = o.wannier_extent.or(material.wannier_extent).ok_or_else(|| {
                CliError::Config(format!("material {} has no Wannier extent; set options.wannier_extent", material.name))
            })?;
            let f0s = sweep_or(cfg, 0.01, 100.0, 121, true)?;
            let mut t = CsvTable::new(&["F0_V_per_A", "L_SC_A", "L_K_A"])
                .with_meta("bandwidth_eV", format!("{bw}"))
                .with_meta("wannier_extent_A", format!("{lw}"));
            for f0 in &f0s {
                let l = localization_lengths(bw, lw, *f0).map_err(cfg_err)?;
                t.push(vec![*f0, l.l_sc, l.l_k]);
            }
            ctx.csv(&mut files, "localization.csv", t);
            format!("ladders: localization lengths at {} fields (L_W = {lw} A)", f0s.len())
        }
        LadderMode::Kane => {
            let band = match cfg.dispersion(&material, default_band(&material))? {
                BandDispersion::TightBinding(tb) => tb,
                _ => return Err(CliError::Config("Kane ladders need a tight-binding band".into())),
            };
            let ladder = kane_ladder(&band, 0, o.f0, None, -o.rungs..=o.rungs).map_err(cfg_err)?;
            let mut t = CsvTable::new(&["rung", "energy_eV"])
                .with_meta("F0_V_per_A", format!("{}", o.f0))
                .with_meta("hbar_omegaB_eV", format!("{}", ladder.hbar_omega_b));
            for r in &ladder.rungs {
                t.push(vec![r.l as f64, r.energy]);
            }
            ctx.csv(&mut files, "kane_ladder.csv", t);
            format!("ladders: {} Kane rungs, spacing {:.4} eV, mean {:.4} eV", ladder.rungs.len(), ladder.hbar_omega_b, ladder.mean_energy)
        }
    };
    Ok(Outcome { files, summary })
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FkeOptions {
    mass: Option<f64>,
}

pub fn fke(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: FkeOptions = cfg.options()?;
    let material = cfg.material_or("GaAs")?;
    let f0 = cfg.pulse.as_ref().and_then(|p| p.f0).unwrap_or(0.01);
    let mass = o.mass.or(material.m_reduced).unwrap_or(0.5);
    let eg = material.eg;
    let omegas = sweep_or(cfg, 0.8 * eg, eg - 1e-3 * eg, 200, false)?;
    let t = fke_curve(&omegas, f0, mass, eg).map_err(cfg_err)?;
    let mut files = OutputSet::default();
    ctx.csv(&mut files, "fke.csv", t.with_meta("F0_V_per_A", format!("{f0}")).with_meta("mass_m0", format!("{mass}")));
    Ok(Outcome { files, summary: format!("fke: {} photon energies below Eg = {eg} eV at F0 = {f0} V/A", omegas.len()) })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RabiOptions {
    e1: f64,
    /// Upper level; defaults to resonance with the carrier.
    e2: Option<f64>,
    /// Dipole d12 (Å); defaults to the material ξ_max.
    d12: Option<f64>,
    samples: usize,
}

impl Default for RabiOptions {
    fn default() -> Self {
        Self { e1: 0.0, e2: None, d12: None, samples: 2001 }
    }
}

pub fn rabi(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: RabiOptions = cfg.options()?;
    let material = cfg.material_or("GaAs")?;
    let pulse = cfg.pulse(PulseDefaults { f0: Some(0.05), fwhm: 20.0, ..Default::default() })?;
    let sys = TwoLevelSystem::new(o.e1, o.e2.unwrap_or(o.e1 + pulse.hbar_omega0), o.d12.unwrap_or(material.xi_max))
        .map_err(cfg_err)?;
    let tol = cfg.tolerances(two_level_tolerances())?;
    let tr = solve_two_level(&sys, &pulse, &tol, o.samples)?;
    // Resonant RWA reference: w = −cos θ(t), θ the envelope area accumulated so far.
    let times: Vec<f64> = tr.points.iter().map(|p| p.t).collect();
    let theta = crate::quad::cumulative_gauss(|t| pulse.f0 * pulse.envelope_at(t) * sys.d12 / HBAR, &times);
    let mut t = CsvTable::new(&["t_fs", "u", "v", "w", "w_rwa"])
        .with_meta("rwa_reference", "resonant envelope area, w = -cos(theta(t))")
        .with_meta("max_norm_drift", format!("{:e}", tr.max_norm_drift));
    let mut dev: f64 = 0.0;
    for (p, th) in tr.points.iter().zip(&theta) {
        let w_rwa = -th.cos();
        dev = dev.max((p.w - w_rwa).abs());
        t.push(vec![p.t, p.u, p.v, p.w, w_rwa]);
    }
    let mut files = OutputSet::default();
    ctx.csv(&mut files, "rabi.csv", t);
    let gamma = pulse.f0 * sys.d12 / pulse.hbar_omega0;
    Ok(Outcome {
        files,
        summary: format!(
            "rabi: gamma_RF0 = {gamma:.4}, final w = {:.6}, envelope area {:.4} pi, max |w - w_rwa| = {dev:.4}",
            tr.last().w,
            theta.last().copied().unwrap_or(0.0) / PI
        ),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct AreaOptions {
    k: f64,
    samples: usize,
    xi: Option<f64>,
}

impl Default for AreaOptions {
    fn default() -> Self {
        Self { k: 0.0, samples: 1001, xi: None }
    }
}

pub fn area(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: AreaOptions = cfg.options()?;
    let material = cfg.material_or("SiO2")?;
    let model = cfg.two_band(&material, o.xi)?;
    let pulse = two_band_pulse(cfg)?;
    let g = generalized_area(&model, o.k, &pulse, o.samples)?;
    let mut files = OutputSet::default();
    ctx.csv(&mut files, "area.csv", g.to_csv());
    Ok(Outcome {
        files,
        summary: format!("area: generalized area {:.4} x 2pi, gamma_RP = {:.3}, counting = {}", g.area / (2.0 * PI), g.gamma_rp, g.counting),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
enum BerryModel {
    #[default]
    QiWuZhang,
    Ssh,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct BerryOptions {
    model: BerryModel,
    /// Mass parameter of the two-dimensional model.
    u: f64,
    t1: f64,
    t2: f64,
    grid: usize,
    /// Static field along x (V/Å) for an anomalous-velocity trajectory; 0 disables it.
    drift_field: f64,
    drift_duration: f64,
}

impl Default for BerryOptions {
    fn default() -> Self {
        Self { model: BerryModel::QiWuZhang, u: -1.0, t1: 0.5, t2: 1.0, grid: 200, drift_field: 0.0, drift_duration: 10.0 }
    }
}

pub fn berry(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: BerryOptions = cfg.options()?;
    if o.grid < 4 {
        return Err(CliError::Config("options.grid must be at least 4".into()));
    }
    let mut files = OutputSet::default();
    let summary = match o.model {
        BerryModel::QiWuZhang => {
            let model = BlochModel2Band::qi_wu_zhang(o.u);
            let rep = chern_and_curvature(&model, Band::Lower, o.grid, o.grid)?;
            ctx.csv(&mut files, "curvature.csv", rep.curvature.to_csv());
            if o.drift_field != 0.0 {
                let band = BandDispersion::Ema { mass: 1.0 };
                let tr = anomalous_trajectory(
                    &band,
                    &CurvatureField::Map(rep.curvature.clone()),
                    &Drive::Constant([o.drift_field, 0.0, 0.0]),
                    None,
                    [0.0; 3],
                    [0.0; 3],
                    0.0,
                    o.drift_duration,
                    201,
                    &cfg.tolerances(Tolerances::default())?,
                )?;
                ctx.csv(&mut files, "anomalous_trajectory.csv", tr.to_csv());
            }
            let mut v = serde_json::to_value(rep.summary()).map_err(|e| CliError::Config(e.to_string()))?;
            if let Value::Object(m) = &mut v {
                m.insert("u".into(), Value::from(o.u));
                m.insert("grid".into(), Value::from(o.grid));
                m.insert("metric_min_eigenvalue".into(), Value::from(rep.metric_min_eigenvalue()));
            }
            ctx.json(&mut files, "chern.json", v)
        }
        BerryModel::Ssh => {
            let model = BlochModel2Band::ssh(o.t1, o.t2, 1.0);
            let zak = zak_phase(&model, Band::Lower, o.grid)?;
            ctx.json(&mut files, "zak.json", json!({ "t1": o.t1, "t2": o.t2, "points": o.grid, "zak_phase": zak }))
        }
    };
    Ok(Outcome { files, summary })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ChargeOptions {
    k_points: usize,
    snapshots: usize,
    drive_f0: f64,
    drive_hbar_omega0: f64,
    drive_fwhm: f64,
    /// Cross-section S, Å².
    area: f64,
    xi: Option<f64>,
}

impl Default for ChargeOptions {
    fn default() -> Self {
        Self { k_points: 32, snapshots: 400, drive_f0: 0.01, drive_hbar_omega0: 0.5, drive_fwhm: 20.0, area: 1.0, xi: None }
    }
}

pub fn charge(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: ChargeOptions = cfg.options()?;
    let material = cfg.material_or("SiO2")?;
    let model = cfg.two_band(&material, o.xi)?;
    let mass = match model.gap {
        crate::interband::GapModel::Kane { mass, .. } => mass,
        _ => return Err(CliError::Config("charge transfer needs a Kane (parabolic-bottom) model".into())),
    };
    let pump = two_band_pulse(cfg)?;
    let drive = PulseSpec::sine_square(o.drive_f0, o.drive_hbar_omega0, o.drive_fwhm);
    drive.validate().map_err(cfg_err)?;
    if !(o.area > 0.0) {
        return Err(CliError::Config("options.area must be positive".into()));
    }
    // Record populations over the pump and the whole drive range.
    let delays = sweep_or(cfg, -20.0, 20.0, 41, false)?;
    let (d_lo, d_hi) = delays.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
    let (t_lo, t_hi) = (pump.window.0.min(drive.window.0 + d_lo), pump.window.1.max(drive.window.1 + d_hi));
    let times: Vec<f64> = (0..o.snapshots.max(2)).map(|i| t_lo + (t_hi - t_lo) * i as f64 / (o.snapshots.max(2) - 1) as f64).collect();
    let pump_times: Vec<f64> = times.iter().copied().filter(|&t| t <= pump.window.1).collect();
    let opts = PropagationOptions { tol: cfg.tolerances(Tolerances::default())?, sample_times: pump_times };
    let grid = kgrid(o.k_points, model.a)?;
    let r = propagate_two_band(&model, &grid, &pump, &opts)?;
    // Carriers per Å³: occupation per k sample over N_k cells of volume a³.
    let norm = 1.0 / (grid.len() as f64 * model.a.powi(3));
    let f: Vec<Vec<f64>> = r
        .trajectories
        .iter()
        .map(|tr| {
            let mut row: Vec<f64> = tr.snapshots.iter().map(|s| s.population() * norm).collect();
            row.resize(times.len(), tr.final_state.population() * norm);
            row
        })
        .collect();
    let table = PopulationTable { times, bands: vec![BandPopulation { mass, f }] };
    let mut t = CsvTable::new(&["delay_fs", "Q_e"])
        .with_meta("area_A2", format!("{}", o.area))
        .with_meta("population_normalization", "occupation per k sample / (N_k a^3)");
    for d in &delays {
        t.push(vec![*d, transferred_charge(&table, &drive, *d, o.area)?]);
    }
    let q_max = t.rows.iter().map(|r| r[1].abs()).fold(0.0, f64::max);
    let mut files = OutputSet::default();
    ctx.csv(&mut files, "charge.csv", t);
    Ok(Outcome { files, summary: format!("charge: {} delays, max |Q| = {q_max:.4e} e", delays.len()) })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct EnergyOptions {
    k_points: usize,
    samples_per_cycle: usize,
    xi: Option<f64>,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self { k_points: 32, samples_per_cycle: 256, xi: None }
    }
}

pub fn energy(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let o: EnergyOptions = cfg.options()?;
    let material = cfg.material_or("SiO2")?;
    let model = cfg.two_band(&material, o.xi)?;
    let pulse = two_band_pulse(cfg)?;
    let n = (pulse.duration() / pulse.period() * o.samples_per_cycle as f64).ceil() as usize + 1;
    let times = uniform_times(&pulse, n);
    let dt = times[1] - times[0];
    let opts = PropagationOptions { tol: cfg.tolerances(Tolerances::default())?, sample_times: times.clone() };
    let r = propagate_two_band(&model, &kgrid(o.k_points, model.a)?, &pulse, &opts)?;
    let pol = r.polarization(&model, &pulse);
    let j_intra = r.intraband_current(&model, &pulse);
    let field: Vec<f64> = times.iter().map(|&t| pulse.field(t)).collect();
    // Total current: centred derivative of the interband polarization plus the intraband part.
    let mut current = j_intra.clone();
    let m = pol.len();
    for i in 0..m {
        let dp = if i == 0 {
            (-3.0 * pol[0] + 4.0 * pol[1] - pol[2]) / (2.0 * dt)
        } else if i == m - 1 {
            (3.0 * pol[m - 1] - 4.0 * pol[m - 2] + pol[m - 3]) / (2.0 * dt)
        } else {
            (pol[i + 1] - pol[i - 1]) / (2.0 * dt)
        };
        current[i] += dp;
    }
    let w = energy_transfer_from_current(&field, &current, dt)?;
    let mut t = CsvTable::new(&["t_fs", "F_V_per_A", "P_eA", "J_intra_eA_per_fs", "W_eV"])
        .with_meta("normalization", "per k sample (per unit cell of the 1D grid)");
    for i in 0..m {
        t.push(vec![times[i], field[i], pol[i], j_intra[i], w.w[i]]);
    }
    let absorbed = r.trajectories.iter().map(|tr| tr.final_state.population() * model.gap.energy(tr.k)).sum::<f64>()
        / r.trajectories.len() as f64;
    let mut files = OutputSet::default();
    ctx.csv(&mut files, "energy.csv", t);
    let summary = ctx.json(
        &mut files,
        "energy.json",
        json!({ "W_max_eV": w.w_max, "W_irrev_eV": w.w_irrev, "pair_energy_eV": absorbed }),
    );
    Ok(Outcome { files, summary })
}
