//! Analytic laser waveforms F(t), vector potential A(t) and kinetic momentum K(t).
//!
//! The field is F(t) = F0 e(t) [cos(ω0 t + φ), β sin(ω0 t + φ)], so the carrier
//! phase at t = 0 (the envelope peak of a sine-square pulse) is the CEP φ. The
//! vector potential is referenced to the window start: A(t) = −∫_{t_start}^t F dt′.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{angular_frequency, HBAR};

/// Conversion factor from the intensity FWHM of a cos² field envelope to its
/// full support: T_total = FWHM · π / (2 arccos(2^{-1/4})).
pub fn sine_square_total_duration(fwhm: f64) -> f64 {
    fwhm * PI / (2.0 * (2f64).powf(-0.25).acos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Envelope {
    /// Constant amplitude inside the window, with optional cos² switch-on and
    /// switch-off ramps of duration `ramp` fs at each end.
    Monochromatic {
        #[serde(default)]
        ramp: f64,
    },
    /// cos² field envelope centred at t = 0, parameterised by intensity FWHM (fs).
    SineSquare { fwhm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    /// Peak field amplitude, V/Å.
    pub f0: f64,
    /// Carrier photon energy ħω0, eV.
    pub hbar_omega0: f64,
    pub envelope: Envelope,
    /// Carrier-envelope phase, rad.
    #[serde(default)]
    pub cep: f64,
    /// Ellipticity in [−1, 1].
    #[serde(default)]
    pub beta: f64,
    /// Window (t_start, t_end) in fs; the field vanishes outside.
    pub window: (f64, f64),
}

/// Envelope piece e(t) = p + q cos(Ω t + χ) on [ta, tb].
#[derive(Debug, Clone, Copy)]
struct Segment {
    ta: f64,
    tb: f64,
    p: f64,
    q: f64,
    big_omega: f64,
    chi: f64,
}

impl Segment {
    fn value(&self, t: f64) -> f64 {
        self.p + self.q * (self.big_omega * t + self.chi).cos()
    }
}

/// ∫_a^b cos(δ t + φ) dt, stable as δ → 0.
fn cos_integral(delta: f64, phi: f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * delta * (b - a);
    let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
    (b - a) * (0.5 * delta * (a + b) + phi).cos() * sinc
}

impl PulseSpec {
    /// Monochromatic pulse with a hard-edged window.
    pub fn monochromatic(f0: f64, hbar_omega0: f64, t_start: f64, t_end: f64) -> Self {
        Self {
            f0,
            hbar_omega0,
            envelope: Envelope::Monochromatic { ramp: 0.0 },
            cep: 0.0,
            beta: 0.0,
            window: (t_start, t_end),
        }
    }

    /// Monochromatic pulse of `cycles` carrier periods starting at t = 0,
    /// with cos² ramps of `ramp_cycles` periods included at each end.
    pub fn flat_top(f0: f64, hbar_omega0: f64, cycles: f64, ramp_cycles: f64) -> Self {
        let period = 2.0 * PI / angular_frequency(hbar_omega0);
        Self {
            f0,
            hbar_omega0,
            envelope: Envelope::Monochromatic { ramp: ramp_cycles * period },
            cep: 0.0,
            beta: 0.0,
            window: (0.0, cycles * period),
        }
    }

    /// Sine-square pulse whose window is the full envelope support.
    pub fn sine_square(f0: f64, hbar_omega0: f64, fwhm: f64) -> Self {
        let half = 0.5 * sine_square_total_duration(fwhm);
        Self {
            f0,
            hbar_omega0,
            envelope: Envelope::SineSquare { fwhm },
            cep: 0.0,
            beta: 0.0,
            window: (-half, half),
        }
    }

    pub fn with_cep(mut self, cep: f64) -> Self {
        self.cep = cep;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_f0(mut self, f0: f64) -> Self {
        self.f0 = f0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("pulse: {m}")));
        if !(self.f0 >= 0.0) || !self.f0.is_finite() {
            return bad("F0 must be finite and non-negative");
        }
        if !(self.hbar_omega0 > 0.0) || !self.hbar_omega0.is_finite() {
            return bad("photon energy must be positive");
        }
        if !(self.beta.abs() <= 1.0) {
            return bad("ellipticity must lie in [-1, 1]");
        }
        if !self.cep.is_finite() {
            return bad("CEP must be finite");
        }
        let (ts, te) = self.window;
        if !(ts.is_finite() && te.is_finite() && te > ts) {
            return bad("window must satisfy t_start < t_end");
        }
        match self.envelope {
            Envelope::SineSquare { fwhm } if !(fwhm > 0.0) || !fwhm.is_finite() => {
                bad("FWHM must be positive")
            }
            Envelope::Monochromatic { ramp } if !(ramp >= 0.0) || 2.0 * ramp > te - ts => {
                bad("ramp must be non-negative and fit twice into the window")
            }
            _ => Ok(()),
        }
    }

    /// Carrier angular frequency, rad/fs.
    pub fn omega0(&self) -> f64 {
        angular_frequency(self.hbar_omega0)
    }

    /// Carrier period, fs.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega0()
    }

    pub fn duration(&self) -> f64 {
        self.window.1 - self.window.0
    }

    pub fn is_monochromatic(&self) -> bool {
        matches!(self.envelope, Envelope::Monochromatic { .. })
    }

    fn segments(&self) -> Vec<Segment> {
        let (ts, te) = self.window;
        match self.envelope {
            Envelope::Monochromatic { ramp } if ramp > 0.0 => {
                let w = PI / ramp;
                vec![
                    Segment { ta: ts, tb: ts + ramp, p: 0.5, q: -0.5, big_omega: w, chi: -w * ts },
                    Segment { ta: ts + ramp, tb: te - ramp, p: 1.0, q: 0.0, big_omega: 0.0, chi: 0.0 },
                    Segment { ta: te - ramp, tb: te, p: 0.5, q: 0.5, big_omega: w, chi: -w * (te - ramp) },
                ]
            }
            Envelope::Monochromatic { .. } => {
                vec![Segment { ta: ts, tb: te, p: 1.0, q: 0.0, big_omega: 0.0, chi: 0.0 }]
            }
            Envelope::SineSquare { fwhm } => {
                let total = sine_square_total_duration(fwhm);
                let (a, b) = (ts.max(-0.5 * total), te.min(0.5 * total));
                if b <= a {
                    return Vec::new();
                }
                vec![Segment { ta: a, tb: b, p: 0.5, q: 0.5, big_omega: 2.0 * PI / total, chi: 0.0 }]
            }
        }
    }

    /// Envelope e(t) in [0, 1].
    pub fn envelope_at(&self, t: f64) -> f64 {
        self.segments()
            .iter()
            .find(|s| t >= s.ta && t <= s.tb)
            .map_or(0.0, |s| s.value(t))
    }

    /// Field vector (Fx, Fy), V/Å.
    pub fn field_vector(&self, t: f64) -> [f64; 2] {
        let e = self.f0 * self.envelope_at(t);
        let theta = self.omega0() * t + self.cep;
        [e * theta.cos(), self.beta * e * theta.sin()]
    }

    /// Field along the polarization axis x, V/Å.
    pub fn field(&self, t: f64) -> f64 {
        self.field_vector(t)[0]
    }

    /// Vector potential (Ax, Ay), V·fs/Å, with A(t_start) = 0.
    pub fn vector_potential_vec(&self, t: f64) -> [f64; 2] {
        let w = self.omega0();
        let mut ix = 0.0;
        let mut iy = 0.0;
        for s in self.segments() {
            if t <= s.ta {
                break;
            }
            let b = t.min(s.tb);
            for (phase, acc) in [(self.cep, &mut ix), (self.cep - 0.5 * PI, &mut iy)] {
                // e(t) cos(ωt + φ) = p cos(ωt+φ) + q/2 [cos((ω+Ω)t + φ+χ) + cos((ω−Ω)t + φ−χ)]
                *acc += s.p * cos_integral(w, phase, s.ta, b);
                if s.q != 0.0 {
                    *acc += 0.5 * s.q * cos_integral(w + s.big_omega, phase + s.chi, s.ta, b);
                    *acc += 0.5 * s.q * cos_integral(w - s.big_omega, phase - s.chi, s.ta, b);
                }
            }
        }
        [-self.f0 * ix, -self.f0 * self.beta * iy]
    }

    /// Vector potential along x, V·fs/Å.
    pub fn vector_potential(&self, t: f64) -> f64 {
        self.vector_potential_vec(t)[0]
    }

    /// (F, A) at time t.
    pub fn waveform(&self, t: f64) -> (f64, f64) {
        (self.field(t), self.vector_potential(t))
    }

    /// Peak field magnitude of the x component over the window, estimated on a fine grid.
    pub fn peak_field(&self) -> f64 {
        let n = 4000;
        let (ts, te) = self.window;
        (0..=n)
            .map(|i| self.field(ts + (te - ts) * i as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Kinetic momentum K(t) = k + A(t)/ħ, Å⁻¹; optionally folded into [−π/a, π/a).
pub fn kinetic_momentum(k: f64, pulse: &PulseSpec, t: f64, reduce_a: Option<f64>) -> f64 {
    let kk = k + pulse.vector_potential(t) / HBAR;
    match reduce_a {
        Some(a) => reduce_to_bz(kk, a),
        None => kk,
    }
}

/// Fold k into [−π/a, π/a).
pub fn reduce_to_bz(k: f64, a: f64) -> f64 {
    let g = 2.0 * PI / a;
    let r = (k + 0.5 * g).rem_euclid(g) - 0.5 * g;
    if r >= 0.5 * g {
        r - g
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre_composite;

    fn numeric_a(p: &PulseSpec, t: f64) -> f64 {
        let ts = p.window.0;
        if t <= ts {
            return 0.0;
        }
        // Integrate piecewise so that envelope kinks fall on panel edges.
        let mut edges: Vec<f64> = p.segments().iter().flat_map(|s| [s.ta, s.tb]).collect();
        edges.push(ts);
        edges.push(t);
        edges.retain(|&x| x >= ts && x <= t);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        -edges
            .windows(2)
            .map(|w| gauss_legendre_composite(|x| p.field(x), w[0], w[1], 400))
            .sum::<f64>()
    }

    #[test]
    fn crest_amplitude() {
        let p = PulseSpec::monochromatic(1.0, 1.5, -10.0, 10.0);
        assert!((p.field(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn monochromatic_closed_form() {
        let t0 = 3.0 * 2.0 * PI / angular_frequency(1.5);
        let p = PulseSpec::monochromatic(1.0, 1.5, -t0, t0);
        let w = p.omega0();
        for &t in &[-t0, -1.3, 0.0, 0.7, 2.9, t0] {
            let expected = -(1.0 / w) * ((w * t).sin() - (-w * t0).sin());
            assert!((p.vector_potential(t) - expected).abs() < 1e-12);
            let q = numeric_a(&p, t);
            assert!((p.vector_potential(t) - q).abs() <= 1e-9 * q.abs().max(1e-3));
        }
    }

    #[test]
    fn sine_square_matches_quadrature() {
        let p = PulseSpec::sine_square(0.7, 1.65, 5.0).with_cep(0.4).with_beta(0.3);
        let (ts, te) = p.window;
        for i in 0..=20 {
            let t = ts + (te - ts) * i as f64 / 20.0;
            let q = numeric_a(&p, t);
            assert!((p.vector_potential(t) - q).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn ramped_matches_quadrature() {
        let p = PulseSpec::flat_top(0.5, 1.8, 6.0, 1.5).with_cep(1.1);
        let (ts, te) = p.window;
        for i in 0..=30 {
            let t = ts + (te - ts) * i as f64 / 30.0;
            assert!((p.vector_potential(t) - numeric_a(&p, t)).abs() < 1e-10);
        }
    }

    #[test]
    fn after_window() {
        let p = PulseSpec::sine_square(1.0, 1.65, 4.0);
        let (_, te) = p.window;
        assert_eq!(p.field(te + 1.0), 0.0);
        assert_eq!(p.vector_potential(te + 1.0), p.vector_potential(te));
        assert_eq!(p.vector_potential(p.window.0), 0.0);
    }

    #[test]
    fn fwhm_of_intensity() {
        let fwhm = 3.7;
        let p = PulseSpec::sine_square(1.0, 1.65, fwhm);
        let e = p.envelope_at(0.5 * fwhm);
        assert!((e * e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn static_like_ramp() {
        // Very low carrier frequency approximates a static field: K = k - F0 t/ħ.
        let p = PulseSpec::monochromatic(0.2, 1e-9, 0.0, 5.0);
        let k = kinetic_momentum(0.1, &p, 2.0, None);
        assert!((k - (0.1 - 0.2 * 2.0 / HBAR)).abs() < 1e-9);
    }

    #[test]
    fn zero_field_keeps_k() {
        let p = PulseSpec::sine_square(0.0, 1.65, 4.0);
        for t in [-3.0, 0.0, 2.0] {
            assert_eq!(kinetic_momentum(0.3, &p, t, None), 0.3);
        }
    }

    #[test]
    fn validation() {
        assert!(PulseSpec::sine_square(1.0, 1.6, -1.0).validate().is_err());
        assert!(PulseSpec::sine_square(1.0, 1.6, 2.0).with_beta(1.5).validate().is_err());
        assert!(PulseSpec::sine_square(-1.0, 1.6, 2.0).validate().is_err());
        assert!(PulseSpec::sine_square(1.0, 1.6, 2.0).validate().is_ok());
    }
}
