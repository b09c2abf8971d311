//! Two-level strong-drive physics: RWA analytics, exact Bloch-vector dynamics
//! and the generalized pulse area for periodic systems.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interband::TwoBandModel;
use crate::ode::{Dopri5, Tolerances};
use crate::output::CsvTable;
use crate::pulse::{kinetic_momentum, PulseSpec};
use crate::quad::gauss_legendre_composite;
use crate::regimes::CARRIER_WAVE_RABI_FROM;
use crate::units::HBAR;

/// Levels E1 < E2 coupled by a real dipole d12 (Å). Amplitudes are taken in the
/// interaction picture with phase reference t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelSystem {
    pub e1: f64,
    pub e2: f64,
    pub d12: f64,
}

impl TwoLevelSystem {
    pub fn new(e1: f64, e2: f64, d12: f64) -> Result<Self> {
        let s = Self { e1, e2, d12 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e2 > self.e1) {
            return Err(Error::InvalidInput(format!("need E2 > E1, got {} and {}", self.e2, self.e1)));
        }
        if !(self.d12 >= 0.0) || !self.d12.is_finite() {
            return Err(Error::InvalidInput(format!("dipole must be non-negative, got {}", self.d12)));
        }
        Ok(())
    }

    /// ω21 in rad/fs.
    pub fn transition_frequency(&self) -> f64 {
        (self.e2 - self.e1) / HBAR
    }
}

/// Energies of the RWA dressed states (eV).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedLevels {
    pub e1_plus: f64,
    pub e1_minus: f64,
    pub e2_plus: f64,
    pub e2_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaSuite {
    /// ω̃R = F0 d12/ħ (rad/fs).
    pub omega_r: f64,
    /// Δ = ω21 − ω0 (rad/fs).
    pub detuning: f64,
    /// Ω̃R = √(ω̃R² + Δ²) (rad/fs).
    pub generalized: f64,
    pub dressed: DressedLevels,
    /// Mollow triplet positions ω0 − Ω̃R, ω0, ω0 + Ω̃R (rad/fs).
    pub mollow: [f64; 3],
    /// Raised when ω̃R/ω0 exceeds the carrier-wave threshold.
    pub rwa_advisory: bool,
}

impl RwaSuite {
    /// ħΩ̃R in eV.
    pub fn generalized_energy(&self) -> f64 {
        HBAR * self.generalized
    }

    /// w(t) = −cos(Ω̃R t), exact on resonance.
    pub fn inversion_simple(&self, t: f64) -> f64 {
        -(self.generalized * t).cos()
    }

    /// Full RWA inversion with detuning contrast: −1 + 2(ω̃R/Ω̃R)² sin²(Ω̃R t/2).
    pub fn inversion(&self, t: f64) -> f64 {
        if self.generalized == 0.0 {
            return -1.0;
        }
        let c = (self.omega_r / self.generalized).powi(2);
        -1.0 + 2.0 * c * (0.5 * self.generalized * t).sin().powi(2)
    }

    pub fn inversion_simple_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        move |t| self.inversion_simple(t)
    }

    pub fn inversion_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        move |t| self.inversion(t)
    }
}

pub fn rwa_suite(sys: &TwoLevelSystem, f0: f64, hbar_omega0: f64) -> Result<RwaSuite> {
    sys.validate()?;
    if !(f0 >= 0.0) || !(hbar_omega0 > 0.0) {
        return Err(Error::InvalidInput("need F0 >= 0 and a positive photon energy".into()));
    }
    let omega0 = hbar_omega0 / HBAR;
    let omega_r = f0 * sys.d12 / HBAR;
    let detuning = sys.transition_frequency() - omega0;
    let generalized = omega_r.hypot(detuning);
    let half = 0.5 * HBAR;
    let dressed = DressedLevels {
        e1_plus: sys.e1 + half * (detuning + generalized),
        e1_minus: sys.e1 + half * (detuning - generalized),
        e2_plus: sys.e2 - half * (detuning - generalized),
        e2_minus: sys.e2 - half * (detuning + generalized),
    };
    Ok(RwaSuite {
        omega_r,
        detuning,
        generalized,
        dressed,
        mollow: [omega0 - generalized, omega0, omega0 + generalized],
        rwa_advisory: omega_r / omega0 > CARRIER_WAVE_RABI_FROM,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl BlochVector {
    fn from_amplitudes(t: f64, a1: Complex64, a2: Complex64) -> Self {
        Self { t, u: 2.0 * (a1.conj() * a2).re, v: 2.0 * (a2.conj() * a1).im, w: a2.norm_sqr() - a1.norm_sqr() }
    }

    pub fn length(&self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochTrajectory {
    pub points: Vec<BlochVector>,
    /// Largest |(|a1|² + |a2|²) − 1| over accepted steps.
    pub max_norm_drift: f64,
}

impl BlochTrajectory {
    pub fn last(&self) -> &BlochVector {
        self.points.last().expect("trajectory holds at least the initial point")
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t_fs", "u", "v", "w"]);
        for p in &self.points {
            t.push(vec![p.t, p.u, p.v, p.w]);
        }
        t
    }
}

/// Default solver tolerances for [`solve_two_level`]: keeps the Bloch norm within
/// 1e-9 over a hundred cycles up to γ_RF0 ≈ 1.
pub fn two_level_tolerances() -> Tolerances {
    Tolerances::tight(1e-12, 1e-12)
}

/// Exact two-level dynamics (counter-rotating terms kept) from the ground state,
/// recorded at `samples` equally spaced times across the pulse window.
pub fn solve_two_level(
    sys: &TwoLevelSystem,
    pulse: &PulseSpec,
    tol: &Tolerances,
    samples: usize,
) -> Result<BlochTrajectory> {
    sys.validate()?;
    pulse.validate()?;
    tol.validate()?;
    let (ts, te) = pulse.window;
    let w21 = sys.transition_frequency();
    let d = sys.d12 / HBAR;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let c = pulse.field(t) * d;
        let ph = Complex64::from_polar(1.0, w21 * t);
        let a1 = Complex64::new(y[0], y[1]);
        let a2 = Complex64::new(y[2], y[3]);
        let mi = Complex64::new(0.0, -1.0);
        let d1 = mi * c * ph.conj() * a2;
        let d2 = mi * c * ph * a1;
        dy[0] = d1.re;
        dy[1] = d1.im;
        dy[2] = d2.re;
        dy[3] = d2.im;
    };
    let mut ode = Dopri5::new(ts, vec![1.0, 0.0, 0.0, 0.0], *tol);
    let mut drift: f64 = 0.0;
    let mut post = |y: &mut [f64]| {
        drift = drift.max((y.iter().map(|v| v * v).sum::<f64>() - 1.0).abs());
        false
    };
    let n = samples.max(2);
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let t = ts + (te - ts) * i as f64 / (n - 1) as f64;
        ode.advance(rhs, t, &mut post)?;
        let y = &ode.y;
        points.push(BlochVector::from_amplitudes(t, Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])));
    }
    Ok(BlochTrajectory { points, max_norm_drift: drift })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedArea {
    pub t: Vec<f64>,
    /// Ω_R(t) in rad/fs.
    pub omega_r: Vec<f64>,
    /// ∫Ω_R dt over the pulse window (rad).
    pub area: f64,
    pub gamma_rp: f64,
    /// The area counts Rabi cycles only when γ_RP > 1.
    pub counting: bool,
}

impl GeneralizedArea {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t_fs", "OmegaR_eV"])
            .with_meta("area_rad", format!("{}", self.area))
            .with_meta("gamma_RP", format!("{}", self.gamma_rp))
            .with_meta("counting", format!("{}", self.counting));
        for (a, b) in self.t.iter().zip(&self.omega_r) {
            t.push(vec![*a, HBAR * b]);
        }
        t
    }
}

/// Ω_R(t) = √(ω_R²(t) + Δ²(K(t))) with ω_R(t) = F0 e(t) |ξ_cv(K(t))|/ħ built from the
/// field envelope, and Δ = E_cv(K(t))/ħ − ω0.
pub fn generalized_rabi_frequency(model: &TwoBandModel, k: f64, pulse: &PulseSpec, t: f64) -> f64 {
    let kk = kinetic_momentum(k, pulse, t, None);
    let wr = pulse.f0 * pulse.envelope_at(t) * model.xi_cv.eval(kk).norm() / HBAR;
    let delta = model.gap.energy(kk) / HBAR - pulse.omega0();
    wr.hypot(delta)
}

pub fn generalized_area(model: &TwoBandModel, k: f64, pulse: &PulseSpec, samples: usize) -> Result<GeneralizedArea> {
    model.validate()?;
    pulse.validate()?;
    let (ts, te) = pulse.window;
    let n = samples.max(2);
    let t: Vec<f64> = (0..n).map(|i| ts + (te - ts) * i as f64 / (n - 1) as f64).collect();
    let omega_r: Vec<f64> = t.iter().map(|&s| generalized_rabi_frequency(model, k, pulse, s)).collect();
    let panels = ((te - ts) / pulse.period() * 32.0).ceil().max(16.0) as usize;
    let area = gauss_legendre_composite(|s| generalized_rabi_frequency(model, k, pulse, s), ts, te, panels);
    let peak = t
        .iter()
        .map(|&s| pulse.f0 * pulse.envelope_at(s) * model.xi_cv.eval(kinetic_momentum(k, pulse, s, None)).norm())
        .fold(0.0, f64::max);
    let up = model.gap.ponderomotive(pulse.f0, pulse.hbar_omega0);
    let gamma_rp = if up > 0.0 { peak / up } else { f64::INFINITY };
    Ok(GeneralizedArea { t, omega_r, area, gamma_rp, counting: gamma_rp > 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sys() -> TwoLevelSystem {
        TwoLevelSystem::new(0.0, 1.5, 1.0).unwrap()
    }

    #[test]
    fn rwa_resonant_inversion() {
        let s = rwa_suite(&sys(), 0.05, 1.5).unwrap();
        assert_eq!(s.detuning, 0.0);
        let t = PI / s.generalized;
        assert!((s.inversion_simple(t) - 1.0).abs() < 1e-12);
        assert!((s.inversion(t) - 1.0).abs() < 1e-12);
        assert!(!s.rwa_advisory);
    }

    #[test]
    fn dressed_splitting() {
        // ħω̃R = 0.2 eV on resonance.
        let s = rwa_suite(&sys(), 0.2, 1.5).unwrap();
        let d = s.dressed;
        assert!((d.e1_plus - 0.1).abs() < 1e-12 && (d.e1_minus + 0.1).abs() < 1e-12);
        assert!((d.e2_plus - 1.6).abs() < 1e-12 && (d.e2_minus - 1.4).abs() < 1e-12);
        assert!((s.mollow[2] - s.mollow[1] - s.generalized).abs() < 1e-12);
        assert!((s.mollow[1] - s.mollow[0] - s.generalized).abs() < 1e-12);
    }

    #[test]
    fn detuned_contrast() {
        let s = rwa_suite(&sys(), 0.05, 1.45).unwrap();
        let t = PI / s.generalized;
        let c = (s.omega_r / s.generalized).powi(2);
        assert!((s.inversion(t) - (2.0 * c - 1.0)).abs() < 1e-12);
        assert!(s.inversion(t) < s.inversion_simple(t));
    }

    #[test]
    fn zero_field_stays_down() {
        let p = PulseSpec::sine_square(0.0, 1.5, 5.0);
        let tr = solve_two_level(&sys(), &p, &Tolerances::default(), 50).unwrap();
        assert!(tr.points.iter().all(|b| b.w == -1.0));
    }

    #[test]
    fn invalid_system() {
        assert!(TwoLevelSystem::new(1.0, 1.0, 1.0).is_err());
        assert!(TwoLevelSystem::new(0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn rectangular_area() {
        let hw = 1.5;
        let m = TwoBandModel::flat(hw, 1.0, 5.0);
        let f0 = 0.05;
        let wr = f0 / HBAR;
        let p = PulseSpec::monochromatic(f0, hw, 0.0, 2.0 * PI / wr);
        let g = generalized_area(&m, 0.0, &p, 100).unwrap();
        assert!((g.area - 2.0 * PI).abs() < 1e-6, "{}", g.area);
        assert!(g.counting);
    }

    #[test]
    fn weak_off_resonant_area() {
        let m = TwoBandModel::flat(2.0, 1.0, 5.0);
        let p = PulseSpec::monochromatic(1e-9, 1.5, 0.0, 30.0);
        let g = generalized_area(&m, 0.0, &p, 10).unwrap();
        let expect = 0.5 / HBAR * 30.0;
        assert!((g.area - expect).abs() < 1e-6 * expect);
    }

    fn two_pi_sine_square(gamma_rf0: f64) -> (TwoLevelSystem, PulseSpec) {
        let hw = 1.5;
        let s = sys();
        let wr = gamma_rf0 * hw / HBAR;
        let f0 = wr * HBAR / s.d12;
        // ∫cos² envelope = T/2, so T = 4π/ω̃R.
        let total = 4.0 * PI / wr;
        let fwhm = total / crate::pulse::sine_square_total_duration(1.0);
        (s, PulseSpec::sine_square(f0, hw, fwhm))
    }

    #[test]
    fn envelope_rabi_two_pi_returns() {
        let (s, p) = two_pi_sine_square(0.05);
        let tr = solve_two_level(&s, &p, &Tolerances::default(), 400).unwrap();
        assert!((tr.last().w + 1.0).abs() < 0.01 * 2.0, "{}", tr.last().w);
        assert!(tr.max_norm_drift < 1e-9);
    }

    #[test]
    fn carrier_envelope_phase_matters_only_for_carrier_wave_flopping() {
        let spread = |g: f64| {
            let (s, p) = two_pi_sine_square(g);
            let w = |cep: f64| {
                solve_two_level(&s, &p.clone().with_cep(cep), &Tolerances::default(), 2).unwrap().last().w
            };
            (w(0.0) - w(PI / 4.0)).abs()
        };
        assert!(spread(0.05) < 1e-3);
        assert!(spread(1.0) > 0.01);
    }

    fn max_rwa_deviation(gamma_rf0: f64, cycles: f64) -> f64 {
        let hw = 1.5;
        let s = sys();
        let f0 = gamma_rf0 * hw / s.d12;
        let suite = rwa_suite(&s, f0, hw).unwrap();
        let t_end = cycles * 2.0 * PI * HBAR / hw;
        let p = PulseSpec::monochromatic(f0, hw, 0.0, t_end);
        let tr = solve_two_level(&s, &p, &Tolerances::default(), 2000).unwrap();
        tr.points.iter().map(|b| (b.w - suite.inversion(b.t)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn rwa_regimes() {
        assert!(max_rwa_deviation(0.05, 25.0) <= 0.05);
        assert!(max_rwa_deviation(1.0, 3.0) > 0.2);
    }
}
