//! Embedded material records and hopping tables.

use serde::{Deserialize, Serialize};

use crate::band::TightBinding;
use crate::error::{Error, Result};

/// Hopping integrals ε_{n,ℓ} of one band, as (ℓ, eV) pairs with strictly increasing ℓ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandHoppings {
    pub band: String,
    pub terms: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialRecord {
    pub name: String,
    pub structure: String,
    /// Band gap, eV.
    pub eg: f64,
    /// Lattice constant, Å.
    pub a: f64,
    #[serde(default)]
    pub c: Option<f64>,
    /// Peak interband dipole, Å.
    pub xi_max: f64,
    /// Reduced effective mass in units of m0.
    #[serde(default)]
    pub m_reduced: Option<f64>,
    #[serde(default)]
    pub hoppings: Option<Vec<BandHoppings>>,
    /// Spatial extent of a maximally localized Wannier function, Å.
    #[serde(default)]
    pub wannier_extent: Option<f64>,
    /// Band width, eV.
    #[serde(default)]
    pub bandwidth: Option<f64>,
}

impl MaterialRecord {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("material {}: {m}", self.name)));
        if !(self.eg > 0.0) {
            return bad("Eg must be positive");
        }
        if !(self.a > 0.0) {
            return bad("lattice constant must be positive");
        }
        if !(self.xi_max >= 0.0) {
            return bad("xi_max must be non-negative");
        }
        if let Some(c) = self.c {
            if !(c > 0.0) {
                return bad("c must be positive");
            }
        }
        if let Some(m) = self.m_reduced {
            if !(m > 0.0) {
                return bad("reduced mass must be positive");
            }
        }
        for h in self.hoppings.iter().flatten() {
            if !h.terms.windows(2).all(|w| w[0].0 < w[1].0) {
                return bad("hopping indices must be strictly increasing");
            }
        }
        Ok(())
    }

    /// Tight-binding band built from the hopping table of `band`.
    pub fn tight_binding(&self, band: &str) -> Result<TightBinding> {
        let h = self
            .hoppings
            .iter()
            .flatten()
            .find(|h| h.band.eq_ignore_ascii_case(band))
            .ok_or_else(|| {
                Error::InvalidInput(format!("material {} has no hoppings for band `{band}`", self.name))
            })?;
        TightBinding::from_pairs(self.a, &h.terms)
    }
}

fn record(name: &str, structure: &str, eg: f64, a: f64, c: Option<f64>, xi: f64) -> MaterialRecord {
    MaterialRecord {
        name: name.into(),
        structure: structure.into(),
        eg,
        a,
        c,
        xi_max: xi,
        m_reduced: None,
        hoppings: None,
        wannier_extent: None,
        bandwidth: None,
    }
}

/// The six embedded records.
pub fn materials() -> Vec<MaterialRecord> {
    let mut sio2 = record("SiO2", "trigonal (alpha-SiO2)", 9.0, 4.9, Some(5.4), 0.37);
    sio2.bandwidth = Some(3.3);
    sio2.wannier_extent = Some(3.0);
    vec![
        record("GaAs", "zinc blende", 1.43, 5.65, None, 3.42),
        record("GaN", "wurtzite (alpha-GaN)", 3.45, 3.19, Some(5.19), 1.74),
        record("ZnO", "wurtzite", 3.3, 3.26, Some(5.22), 1.46),
        record("C", "diamond (fcc)", 7.4, 3.57, None, 1.06),
        record("MgO", "rock salt (fcc)", 7.8, 4.2, None, 0.96),
        sio2,
    ]
}

/// Case-insensitive lookup of an embedded record.
pub fn material_lookup(name: &str) -> Result<MaterialRecord> {
    let all = materials();
    all.iter()
        .find(|m| m.name.eq_ignore_ascii_case(name.trim()))
        .cloned()
        .ok_or_else(|| Error::UnknownMaterial {
            name: name.to_string(),
            available: all.iter().map(|m| m.name.clone()).collect(),
        })
}

/// Nearest-neighbour two-band surrogate for SiO2 along Γ–M.
///
/// The conduction band width is 3.3 eV; the valence band width (1 eV) is an
/// assumption. Both bands are offset so that E_c(0) − E_v(0) = Eg = 9 eV with
/// the valence maximum at zero energy.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBandTightBinding {
    pub eg: f64,
    pub conduction: TightBinding,
    pub valence: TightBinding,
}

impl TwoBandTightBinding {
    pub fn sio2_gamma_m() -> Self {
        let a = 4.9;
        let eg = 9.0;
        let (ec1, ev1) = (-1.65, 0.5);
        Self {
            eg,
            conduction: TightBinding::new(a, vec![eg - ec1, ec1]).expect("valid hoppings"),
            valence: TightBinding::new(a, vec![-ev1, ev1]).expect("valid hoppings"),
        }
    }

    /// Difference band E_c − E_v.
    pub fn gap_band(&self) -> TightBinding {
        self.conduction.difference(&self.valence)
    }
}
