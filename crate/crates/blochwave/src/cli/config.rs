//! Run configuration: JSON schema, flag overlay and conversion into typed inputs.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::CliError;
use crate::band::{BandDispersion, TightBinding};
use crate::interband::{GapModel, KFunction, TwoBandModel};
use crate::material::{material_lookup, MaterialRecord, TwoBandTightBinding};
use crate::ode::Tolerances;
use crate::pulse::PulseSpec;
use crate::units::photon_energy_from_wavelength_nm;

/// Complete run description. Every block is optional; subcommands supply defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub subcommand: Option<String>,
    #[serde(default)]
    pub material: Option<MaterialSpec>,
    #[serde(default)]
    pub pulse: Option<PulseBlock>,
    #[serde(default)]
    pub band: Option<BandBlock>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub output: Option<OutputBlock>,
    #[serde(default)]
    pub tolerances: Option<ToleranceBlock>,
    /// Subcommand-specific settings, checked against that subcommand's schema.
    #[serde(default)]
    pub options: Option<Map<String, Value>>,
}

/// A material given by name or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialSpec {
    Name(String),
    Inline(MaterialRecord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    Monochromatic,
    FlatTop,
    SineSquare,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseBlock {
    /// V/Å.
    pub f0: Option<f64>,
    /// eV.
    pub hbar_omega0: Option<f64>,
    pub lambda0_nm: Option<f64>,
    pub envelope: Option<EnvelopeKind>,
    /// Intensity FWHM of a sine-square pulse, fs.
    pub fwhm: Option<f64>,
    pub cycles: Option<f64>,
    pub ramp_cycles: Option<f64>,
    pub cep: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BandBlock {
    /// Parabolic band, mass in m0.
    Ema { mass: f64 },
    /// Kane gap; Eg defaults to the material gap.
    Kane {
        #[serde(default)]
        eg: Option<f64>,
        mass: f64,
    },
    /// Explicit hoppings ε_0, ε_1, …; `a` defaults to the material lattice constant.
    TightBinding {
        #[serde(default)]
        a: Option<f64>,
        eps: Vec<f64>,
    },
    /// Built-in SiO2 Γ–M two-band surrogate: `conduction`, `valence` or `gap`.
    Sio2GammaM {
        #[serde(default = "default_component")]
        component: String,
    },
    /// Hopping table stored with the material.
    MaterialHoppings { band: String },
}

fn default_component() -> String {
    "conduction".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default)]
    pub parameter: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub log: Option<bool>,
}

/// A fully specified sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
}

impl Sweep {
    /// Fill unset fields from `d`; error when a field stays unset.
    pub fn resolve(&self, d: Option<Range>) -> Result<Range, CliError> {
        let miss = |f: &str| CliError::Config(format!("sweep.{f} is required"));
        Ok(Range {
            start: self.start.or(d.map(|r| r.start)).ok_or_else(|| miss("start"))?,
            stop: self.stop.or(d.map(|r| r.stop)).ok_or_else(|| miss("stop"))?,
            points: self.points.or(d.map(|r| r.points)).ok_or_else(|| miss("points"))?,
            log: self.log.or(d.map(|r| r.log)).unwrap_or(false),
        })
    }
}

impl Range {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.points == 0 {
            return Err(CliError::Config("sweep.points must be at least 1".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Config("sweep bounds must be finite".into()));
        }
        if self.log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(CliError::Config("a log sweep needs positive bounds".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let n = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                let s = i as f64 / n;
                if self.log {
                    (self.start.ln() + s * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + s * (self.stop - self.start)
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceBlock {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

/// Recursive merge; values in `over` win.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

pub fn parse_config(value: Value) -> Result<RunConfig, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Config(format!("config: {e}")))
}

/// Canonical text of the merged configuration (sorted keys) used for hashing.
/// The output block is left out: where results go does not change them.
pub fn canonical(cfg: &RunConfig) -> String {
    let cfg = RunConfig { output: None, ..cfg.clone() };
    serde_json::to_value(&cfg).map(|v| v.to_string()).unwrap_or_default()
}

/// Per-subcommand fallbacks for the pulse block.
#[derive(Debug, Clone, Copy)]
pub struct PulseDefaults {
    pub f0: Option<f64>,
    pub hbar_omega0: f64,
    pub envelope: EnvelopeKind,
    pub fwhm: f64,
    pub cycles: f64,
    pub ramp_cycles: f64,
}

impl Default for PulseDefaults {
    fn default() -> Self {
        Self {
            f0: None,
            hbar_omega0: 1.8,
            envelope: EnvelopeKind::SineSquare,
            fwhm: 5.0,
            cycles: 10.0,
            ramp_cycles: 2.0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn material(&self) -> Result<Option<MaterialRecord>, CliError> {
        let m = match &self.material {
            None => return Ok(None),
            Some(MaterialSpec::Name(n)) => material_lookup(n).map_err(CliError::Lib)?,
            Some(MaterialSpec::Inline(r)) => r.clone(),
        };
        m.validate().map_err(CliError::Lib)?;
        Ok(Some(m))
    }

    pub fn material_or(&self, fallback: &str) -> Result<MaterialRecord, CliError> {
        match self.material()? {
            Some(m) => Ok(m),
            None => material_lookup(fallback).map_err(CliError::Lib),
        }
    }

    pub fn pulse(&self, d: PulseDefaults) -> Result<PulseSpec, CliError> {
        let b = self.pulse.clone().unwrap_or_default();
        let hw = match (b.hbar_omega0, b.lambda0_nm) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either pulse.hbar_omega0 or pulse.lambda0_nm, not both".into()))
            }
            (Some(hw), None) => positive("pulse.hbar_omega0", hw)?,
            (None, Some(l)) => photon_energy_from_wavelength_nm(positive("pulse.lambda0_nm", l)?),
            (None, None) => d.hbar_omega0,
        };
        let f0 = b.f0.or(d.f0).ok_or_else(|| CliError::Config("pulse.f0 (--F0) is required".into()))?;
        let envelope = b.envelope.unwrap_or(d.envelope);
        let p = match envelope {
            EnvelopeKind::SineSquare => {
                let fwhm = b.fwhm.unwrap_or(d.fwhm);
                if !(fwhm > 0.0) {
                    return Err(CliError::Config(format!("pulse.fwhm must be positive, got {fwhm}")));
                }
                PulseSpec::sine_square(f0, hw, fwhm)
            }
            EnvelopeKind::FlatTop => {
                PulseSpec::flat_top(f0, hw, b.cycles.unwrap_or(d.cycles), b.ramp_cycles.unwrap_or(d.ramp_cycles))
            }
            EnvelopeKind::Monochromatic => {
                let cycles = positive("pulse.cycles", b.cycles.unwrap_or(d.cycles))?;
                PulseSpec::flat_top(f0, hw, cycles, 0.0)
            }
        };
        let p = p.with_cep(b.cep.unwrap_or(0.0)).with_beta(b.beta.unwrap_or(0.0));
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    /// Single-band dispersion; `fallback` is used when no band block is given.
    pub fn dispersion(&self, material: &MaterialRecord, fallback: BandBlock) -> Result<BandDispersion, CliError> {
        let block = self.band.clone().unwrap_or(fallback);
        let d = match block {
            BandBlock::Ema { mass } => BandDispersion::Ema { mass },
            BandBlock::Kane { eg, mass } => BandDispersion::KaneTwoBand { eg: eg.unwrap_or(material.eg), mass },
            BandBlock::TightBinding { a, eps } => {
                BandDispersion::TightBinding(TightBinding::new(a.unwrap_or(material.a), eps).map_err(cfg_err)?)
            }
            BandBlock::Sio2GammaM { component } => BandDispersion::TightBinding(sio2_component(&component)?),
            BandBlock::MaterialHoppings { band } => {
                BandDispersion::TightBinding(material.tight_binding(&band).map_err(cfg_err)?)
            }
        };
        d.validate().map_err(cfg_err)?;
        Ok(d)
    }

    /// Two-band model: Kane (dipole from the Kane relation) or a tight-binding gap
    /// band with constant dipole `xi` (defaults to the material's ξ_max).
    pub fn two_band(&self, material: &MaterialRecord, xi: Option<f64>) -> Result<TwoBandModel, CliError> {
        let block = self.band.clone().unwrap_or(BandBlock::Kane { eg: None, mass: 0.5 });
        let xi_or = |default: f64| KFunction::constant(xi.unwrap_or(default));
        let model = match block {
            BandBlock::Kane { eg, mass } => {
                let eg = eg.unwrap_or(material.eg);
                let mut m = TwoBandModel::kane(eg, mass, material.a);
                if let Some(x) = xi {
                    m.xi_cv = KFunction::constant(x);
                }
                m
            }
            BandBlock::Ema { .. } => {
                return Err(CliError::Config("a parabolic band has no gap; use kane or a tight-binding gap".into()))
            }
            BandBlock::TightBinding { a, eps } => {
                let tb = TightBinding::new(a.unwrap_or(material.a), eps).map_err(cfg_err)?;
                TwoBandModel { a: tb.a, gap: GapModel::TightBinding(tb), xi_cv: xi_or(material.xi_max), xi_diff: None }
            }
            BandBlock::Sio2GammaM { .. } => {
                let tb = TwoBandTightBinding::sio2_gamma_m().gap_band();
                TwoBandModel { a: tb.a, gap: GapModel::TightBinding(tb), xi_cv: xi_or(material.xi_max), xi_diff: None }
            }
            BandBlock::MaterialHoppings { band } => {
                let tb = material.tight_binding(&band).map_err(cfg_err)?;
                TwoBandModel { a: tb.a, gap: GapModel::TightBinding(tb), xi_cv: xi_or(material.xi_max), xi_diff: None }
            }
        };
        model.validate().map_err(cfg_err)?;
        Ok(model)
    }

    pub fn tolerances(&self, default: Tolerances) -> Result<Tolerances, CliError> {
        let t = self.tolerances.clone().unwrap_or_default();
        let tol = Tolerances { rtol: t.rtol.unwrap_or(default.rtol), atol: t.atol.unwrap_or(default.atol), ..default };
        tol.validate().map_err(cfg_err)?;
        Ok(tol)
    }

    /// Sweep grid: the configured sweep completed by `default`, else `default` itself.
    pub fn sweep_values(&self, default: Option<Range>) -> Result<Option<Vec<f64>>, CliError> {
        match (&self.sweep, default) {
            (Some(s), d) => s.resolve(d)?.values().map(Some),
            (None, Some(d)) => d.values().map(Some),
            (None, None) => Ok(None),
        }
    }

    /// Decode `options` into the subcommand's own schema (unknown keys rejected).
    pub fn options<T: DeserializeOwned + Default>(&self) -> Result<T, CliError> {
        match &self.options {
            None => Ok(T::default()),
            Some(map) => serde_json::from_value(Value::Object(map.clone()))
                .map_err(|e| CliError::Config(format!("options: {e}"))),
        }
    }
}

pub(crate) fn cfg_err(e: crate::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub(crate) fn sio2_component(component: &str) -> Result<TightBinding, CliError> {
    let two = TwoBandTightBinding::sio2_gamma_m();
    match component {
        "conduction" => Ok(two.conduction),
        "valence" => Ok(two.valence),
        "gap" => Ok(two.gap_band()),
        other => Err(CliError::Config(format!("unknown SiO2 band component `{other}` (conduction, valence, gap)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let v: Value = serde_json::json!({"pulse": {"f0": 1.0, "color": "red"}});
        assert!(parse_config(v).is_err());
        let v: Value = serde_json::json!({"wavelength": 800});
        assert!(parse_config(v).is_err());
    }

    #[test]
    fn overlay_wins() {
        let mut base = serde_json::json!({"pulse": {"f0": 1.0, "fwhm": 5.0}});
        merge(&mut base, serde_json::json!({"pulse": {"f0": 2.0}}));
        let cfg = parse_config(base).unwrap();
        let p = cfg.pulse.unwrap();
        assert_eq!((p.f0, p.fwhm), (Some(2.0), Some(5.0)));
    }

    #[test]
    fn log_sweep_endpoints() {
        let s = Sweep { parameter: None, start: Some(0.1), stop: None, points: Some(3), log: None };
        assert!(s.resolve(None).is_err());
        let v = s.resolve(Some(Range { start: 1.0, stop: 10.0, points: 9, log: true })).unwrap().values().unwrap();
        assert!((v[1] - 1.0).abs() < 1e-12 && (v[2] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn negative_fwhm_is_config_error() {
        let cfg = parse_config(serde_json::json!({"pulse": {"f0": 1.0, "fwhm": -3.0}})).unwrap();
        assert!(matches!(cfg.pulse(PulseDefaults::default()), Err(CliError::Config(_))));
    }

    #[test]
    fn inline_material() {
        let cfg = parse_config(serde_json::json!({"material": {
            "name": "X", "structure": "cubic", "eg": 2.0, "a": 5.0, "xi_max": 1.0
        }}))
        .unwrap();
        assert_eq!(cfg.material().unwrap().unwrap().eg, 2.0);
    }
}
