//! Static-field structure: Kane ladders, localization lengths, coupled
//! Wannier–Stark levels and Franz–Keldysh absorption.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::band::TightBinding;
use crate::error::{Error, Result};
use crate::interband::KFunction;
use crate::output::CsvTable;
use crate::quad::gauss_legendre_composite;
use crate::units::HBAR2_OVER_M0;

pub use crate::special::airy_ai;

/// Photon energies closer to the gap than this are rejected by [`fke_absorption`].
pub const FKE_GAP_GUARD: f64 = 1e-6;

const BZ_PANELS: usize = 64;

/// One band's Wannier–Stark ladder of Kane states in a static field.
#[derive(Debug, Clone, PartialEq)]
pub struct KaneLadder {
    pub band_index: usize,
    pub f0: f64,
    pub a: f64,
    /// BZ average of E′_n = E_n + F0 X_nn (eV).
    pub mean_energy: f64,
    pub hbar_omega_b: f64,
    pub rungs: Vec<KaneRung>,
    band: TightBinding,
    xnn: Option<KFunction>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaneRung {
    pub l: i64,
    pub energy: f64,
}

impl KaneLadder {
    pub fn energy(&self, l: i64) -> f64 {
        self.mean_energy + l as f64 * self.hbar_omega_b
    }

    /// E′_n(k) including the diagonal connection term.
    pub fn modified_energy(&self, k: f64) -> f64 {
        self.band.energy(k) + self.xnn.as_ref().map_or(0.0, |x| self.f0 * x.eval(k).re)
    }

    /// η(k) = exp{−(i/F0) ∫_0^k [ε − E′(k′)] dk′} for an arbitrary trial energy ε.
    pub fn eta_at_energy(&self, energy: f64, k: f64) -> Complex64 {
        let panels = ((k.abs() * self.a / PI).ceil() as usize).max(1) * BZ_PANELS;
        let integral = gauss_legendre_composite(|q| energy - self.modified_energy(q), 0.0, k, panels);
        Complex64::from_polar(1.0, -integral / self.f0)
    }

    /// η_{n,l}(k) for rung l.
    pub fn eta(&self, l: i64, k: f64) -> Complex64 {
        self.eta_at_energy(self.energy(l), k)
    }

    /// η_{n,l} sampled on `points` equally spaced k in [−π/a, π/a].
    pub fn eta_samples(&self, l: i64, points: usize) -> Vec<(f64, Complex64)> {
        let n = points.max(2);
        (0..n)
            .map(|i| {
                let k = -PI / self.a + 2.0 * PI / self.a * i as f64 / (n - 1) as f64;
                (k, self.eta(l, k))
            })
            .collect()
    }

    /// |η(−π/a) − η(π/a)| at energy ε; vanishes only on ladder rungs.
    pub fn periodicity_defect(&self, energy: f64) -> f64 {
        (self.eta_at_energy(energy, -PI / self.a) - self.eta_at_energy(energy, PI / self.a)).norm()
    }
}

/// Kane ladder of a tight-binding band in a static field F0 (V/Å).
pub fn kane_ladder(
    band: &TightBinding,
    band_index: usize,
    f0: f64,
    xnn: Option<&KFunction>,
    rungs: RangeInclusive<i64>,
) -> Result<KaneLadder> {
    if !(f0 > 0.0) || !f0.is_finite() {
        return Err(Error::InvalidInput(format!("Kane ladder needs F0 > 0, got {f0}")));
    }
    if let Some(x) = xnn {
        x.validate()?;
    }
    let a = band.a;
    let mut ladder = KaneLadder {
        band_index,
        f0,
        a,
        mean_energy: 0.0,
        hbar_omega_b: f0 * a,
        rungs: Vec::new(),
        band: band.clone(),
        xnn: xnn.cloned(),
    };
    let half = PI / a;
    ladder.mean_energy =
        gauss_legendre_composite(|k| ladder.modified_energy(k), -half, half, BZ_PANELS) * a / (2.0 * PI);
    ladder.rungs = rungs.map(|l| KaneRung { l, energy: ladder.energy(l) }).collect();
    Ok(ladder)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationLengths {
    /// Semiclassical length Δ/(eF0) (Å).
    pub l_sc: f64,
    /// Kane-state extent √(L_SC² + L_W²) (Å).
    pub l_k: f64,
}

pub fn localization_lengths(bandwidth: f64, wannier_extent: f64, f0: f64) -> Result<LocalizationLengths> {
    if !(f0 > 0.0) {
        return Err(Error::InvalidInput(format!("localization lengths need F0 > 0, got {f0}")));
    }
    if !(bandwidth >= 0.0) || !(wannier_extent >= 0.0) {
        return Err(Error::InvalidInput("bandwidth and Wannier extent must be non-negative".into()));
    }
    let l_sc = bandwidth / f0;
    Ok(LocalizationLengths { l_sc, l_k: l_sc.hypot(wannier_extent) })
}

/// Field at which ℓ a e F0 = Eg.
pub fn hybridization_field(eg: f64, a: f64, ell: u32) -> f64 {
    eg / (ell as f64 * a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WsLevels {
    /// Ascending eigenvalues (eV).
    pub energies: Vec<f64>,
    /// Uncoupled Kane rung energies on the diagonal.
    pub rungs: Vec<f64>,
}

/// Two coupled rungs: ½(E_c + E_v) ± ½√((E_c − E_v)² + 4|V|²), returned as (E−, E+).
pub fn ws_pair(e_c: f64, e_v: f64, v: Complex64) -> (f64, f64) {
    let mean = 0.5 * (e_c + e_v);
    let half = 0.5 * ((e_c - e_v).powi(2) + 4.0 * v.norm_sqr()).sqrt();
    (mean - half, mean + half)
}

/// Eigenvalues of the truncated Wannier–Stark Hamiltonian with Kane rungs on the
/// diagonal and couplings V off the diagonal (diagonal of `coupling` ignored).
pub fn ws_levels(rungs: &[f64], coupling: &DMatrix<Complex64>) -> Result<WsLevels> {
    let n = rungs.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("truncation must be at least 2, got {n}")));
    }
    if coupling.nrows() != n || coupling.ncols() != n {
        return Err(Error::GridMismatch(format!(
            "{n} rungs vs {}x{} coupling matrix",
            coupling.nrows(),
            coupling.ncols()
        )));
    }
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                asym = asym.max((coupling[(i, j)] - coupling[(j, i)].conj()).norm());
            }
        }
    }
    if asym > 1e-12 {
        return Err(Error::NonHermitian(asym));
    }
    let energies = if n == 2 {
        let (lo, hi) = ws_pair(rungs[0], rungs[1], coupling[(0, 1)]);
        vec![lo, hi]
    } else {
        let h = DMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(rungs[i], 0.0) } else { coupling[(i, j)] });
        let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    };
    Ok(WsLevels { energies, rungs: rungs.to_vec() })
}

/// Two-band Wannier–Stark fan: conduction rungs E_c + i F0 a and valence rungs
/// E_v + j F0 a for i, j in `rungs`, coupled by V = F0 Ξ_ℓ between c_i and v_{i+ℓ}.
#[derive(Debug, Clone, PartialEq)]
pub struct WsFan {
    pub mean_c: f64,
    pub mean_v: f64,
    pub a: f64,
    /// Real-space interband dipoles (ℓ, Ξ_ℓ in Å).
    pub dipoles: Vec<(i64, Complex64)>,
    pub rungs: RangeInclusive<i64>,
}

impl WsFan {
    pub fn levels(&self, f0: f64) -> Result<WsLevels> {
        let ls: Vec<i64> = self.rungs.clone().collect();
        let m = ls.len();
        let mut diag = Vec::with_capacity(2 * m);
        diag.extend(ls.iter().map(|&l| self.mean_c + l as f64 * f0 * self.a));
        diag.extend(ls.iter().map(|&l| self.mean_v + l as f64 * f0 * self.a));
        let mut v = DMatrix::from_element(2 * m, 2 * m, Complex64::new(0.0, 0.0));
        for (i, &li) in ls.iter().enumerate() {
            for (j, &lj) in ls.iter().enumerate() {
                for &(ell, xi) in &self.dipoles {
                    if lj - li == ell {
                        v[(i, m + j)] += f0 * xi;
                        v[(m + j, i)] += f0 * xi.conj();
                    }
                }
            }
        }
        ws_levels(&diag, &v)
    }

    /// (F0_V_per_A, level_index, energy_eV) rows over a field grid.
    pub fn to_csv(&self, f0_grid: &[f64]) -> Result<CsvTable> {
        let mut t = CsvTable::new(&["F0_V_per_A", "level_index", "energy_eV"]);
        for &f0 in f0_grid {
            for (i, e) in self.levels(f0)?.energies.iter().enumerate() {
                t.push(vec![f0, i as f64, *e]);
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkePoint {
    /// Electro-optic energy ħθ (eV).
    pub theta: f64,
    /// Absorption relative to its value at Eg − ħω = ħθ.
    pub alpha_rel: f64,
}

/// ħθ = [(eF0ħ)²/(2m)]^{1/3} for reduced mass m (units of m0).
pub fn electro_optic_energy(f0: f64, mass: f64) -> f64 {
    (f0 * f0 * HBAR2_OVER_M0 / (2.0 * mass)).cbrt()
}

/// Sub-gap Franz–Keldysh absorption tail.
pub fn fke_absorption(hbar_omega: f64, f0: f64, mass: f64, eg: f64) -> Result<FkePoint> {
    if !(f0 > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidInput("F0 and mass must be positive".into()));
    }
    let detuning = eg - hbar_omega;
    if !(detuning >= FKE_GAP_GUARD) {
        return Err(Error::Domain(format!(
            "photon energy {hbar_omega} eV is within {FKE_GAP_GUARD} eV of the gap {eg} eV where the 1/(Eg − ħω) prefactor diverges"
        )));
    }
    let theta = electro_optic_energy(f0, mass);
    let x = detuning / theta;
    let alpha_rel = (-4.0 / 3.0 * (x.powf(1.5) - 1.0)).exp() / x;
    Ok(FkePoint { theta, alpha_rel })
}

/// (homega_eV, alpha_rel) rows.
pub fn fke_curve(omegas: &[f64], f0: f64, mass: f64, eg: f64) -> Result<CsvTable> {
    let mut t = CsvTable::new(&["homega_eV", "alpha_rel"])
        .with_meta("normalization", "alpha_rel = 1 where Eg - homega equals the electro-optic energy");
    for &w in omegas {
        t.push(vec![w, fke_absorption(w, f0, mass, eg)?.alpha_rel]);
    }
    Ok(t)
}

/// Field-direction profile Ai((eF0 x − ε)/ħθ) of an effective-mass Kane function.
pub fn airy_profile(x: f64, energy: f64, f0: f64, mass: f64) -> f64 {
    airy_ai((f0 * x - energy) / electro_optic_energy(f0, mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::TwoBandTightBinding;

    fn band() -> TightBinding {
        TwoBandTightBinding::sio2_gamma_m().conduction
    }

    #[test]
    fn rung_spacing() {
        let lad = kane_ladder(&band(), 0, 0.3, None, -3..=3).unwrap();
        for w in lad.rungs.windows(2) {
            assert!((w[1].energy - w[0].energy - 0.3 * 4.9).abs() < 1e-12);
        }
        assert!((lad.mean_energy - 10.65).abs() < 1e-10);
    }

    #[test]
    fn zero_field_rejected() {
        assert!(kane_ladder(&band(), 0, 0.0, None, 0..=0).is_err());
    }

    #[test]
    fn eta_single_valued_on_rungs() {
        let lad = kane_ladder(&band(), 0, 0.2, None, -2..=2).unwrap();
        for l in -2..=2 {
            assert!(lad.periodicity_defect(lad.energy(l)) < 1e-9);
        }
        assert!(lad.periodicity_defect(lad.energy(0) + 0.3 * lad.hbar_omega_b) > 0.1);
    }

    #[test]
    fn eta_large_field_limit() {
        let dev = |f0: f64| {
            let lad = kane_ladder(&band(), 0, f0, None, 1..=1).unwrap();
            let s = lad.eta_samples(1, 41);
            let c = s[20].1;
            s.iter().map(|(k, e)| (e - Complex64::from_polar(1.0, -k * 4.9) * c).norm()).fold(0.0, f64::max)
        };
        let (d1, d2, d3) = (dev(10.0), dev(100.0), dev(1000.0));
        assert!(d2 < d1 && d3 < d2 && d3 < 0.01, "{d1} {d2} {d3}");
    }

    #[test]
    fn localization_sio2() {
        let l = localization_lengths(3.3, 3.0, 0.1).unwrap();
        assert!((l.l_sc - 33.0).abs() < 1e-12);
        assert!((l.l_k - 33.136083).abs() < 1e-6);
        assert!((localization_lengths(3.3, 3.0, 1e9).unwrap().l_k - 3.0).abs() < 1e-6);
        let z = localization_lengths(3.3, 0.0, 0.7).unwrap();
        assert_eq!(z.l_k, z.l_sc);
        assert!(localization_lengths(3.3, 3.0, 0.0).is_err());
    }

    #[test]
    fn ws_pair_limits() {
        let (lo, hi) = ws_pair(1.0, 2.0, Complex64::new(0.0, 0.0));
        assert_eq!((lo, hi), (1.0, 2.0));
        let (lo, hi) = ws_pair(1.5, 1.5, Complex64::new(0.1, 0.0));
        assert!((lo - 1.4).abs() < 1e-12 && (hi - 1.6).abs() < 1e-12);
        assert!((hybridization_field(9.0, 4.9, 2) - 0.918367).abs() < 1e-6);
    }

    #[test]
    fn ws_levels_matrix_matches_pair() {
        let v = Complex64::new(0.05, 0.02);
        let mut c = DMatrix::from_element(3, 3, Complex64::new(0.0, 0.0));
        c[(0, 1)] = v;
        c[(1, 0)] = v.conj();
        let lv = ws_levels(&[0.0, 0.1, 5.0], &c).unwrap();
        let (lo, hi) = ws_pair(0.0, 0.1, v);
        assert!((lv.energies[0] - lo).abs() < 1e-12 && (lv.energies[1] - hi).abs() < 1e-12);
        c[(1, 0)] = v;
        assert!(matches!(ws_levels(&[0.0, 0.1, 5.0], &c), Err(Error::NonHermitian(_))));
        assert!(ws_levels(&[0.0], &DMatrix::from_element(1, 1, Complex64::new(0.0, 0.0))).is_err());
    }

    #[test]
    fn fke_values() {
        let th = electro_optic_energy(1e-3, 0.5);
        assert!((th - 0.019677).abs() < 1e-5);
        let p = fke_absorption(9.0 - th, 1e-3, 0.5, 9.0).unwrap();
        assert!((p.alpha_rel - 1.0).abs() < 1e-12);
        assert!((electro_optic_energy(2e-3, 0.5) / th - 2f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!(matches!(fke_absorption(9.0, 0.1, 0.5, 9.0), Err(Error::Domain(_))));
    }
}
