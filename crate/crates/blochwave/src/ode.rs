//! Adaptive Dormand–Prince 5(4) integrator for real state vectors.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step, fs.
    pub h_min: f64,
    /// Largest admissible step, fs.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, h_min: 1e-12, h_max: f64::INFINITY, max_steps: 10_000_000 }
    }
}

impl Tolerances {
    pub fn tight(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol >= 0.0 && self.h_min > 0.0 && self.h_max > self.h_min) {
            return Err(Error::InvalidInput("tolerances: need rtol > 0, atol ≥ 0, 0 < h_min < h_max".into()));
        }
        Ok(())
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator state: time, solution and the current step proposal.
pub struct Dopri5 {
    pub t: f64,
    pub y: Vec<f64>,
    h: f64,
    tol: Tolerances,
    k: [Vec<f64>; 7],
    fsal_valid: bool,
    pub steps: usize,
    pub rejected: usize,
}

impl Dopri5 {
    pub fn new(t0: f64, y0: Vec<f64>, tol: Tolerances) -> Self {
        let n = y0.len();
        let k = std::array::from_fn(|_| vec![0.0; n]);
        Self { t: t0, y: y0, h: 0.0, tol, k, fsal_valid: false, steps: 0, rejected: 0 }
    }

    /// Invalidate the cached derivative after the caller edits `y`.
    pub fn touch(&mut self) {
        self.fsal_valid = false;
    }

    fn initial_step<F: FnMut(f64, &[f64], &mut [f64])>(&mut self, f: &mut F, span: f64) -> f64 {
        let n = self.y.len();
        let mut f0 = vec![0.0; n];
        f(self.t, &self.y, &mut f0);
        let sc: Vec<f64> = self.y.iter().map(|y| self.tol.atol + self.tol.rtol * y.abs()).collect();
        let norm = |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n as f64).sqrt();
        let (d0, d1) = (norm(&self.y), norm(&f0));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span.abs());
        let y1: Vec<f64> = self.y.iter().zip(&f0).map(|(y, d)| y + h0 * d).collect();
        let mut f1 = vec![0.0; n];
        f(self.t + h0, &y1, &mut f1);
        let diff: Vec<f64> = f1.iter().zip(&f0).map(|(a, b)| a - b).collect();
        let d2 = norm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(self.tol.h_max).min(span.abs())
    }

    /// Advance to `t_end` exactly. `post` runs after every accepted step and may edit
    /// the state (for example to wrap phase variables); it returns whether it did.
    pub fn advance<F, P>(&mut self, mut f: F, t_end: f64, mut post: P) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        P: FnMut(&mut [f64]) -> bool,
    {
        let n = self.y.len();
        if t_end <= self.t {
            return Ok(());
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(&mut f, t_end - self.t);
        }
        let mut ytmp = vec![0.0; n];
        let mut ynew = vec![0.0; n];
        while self.t < t_end {
            if self.steps + self.rejected > self.tol.max_steps {
                return Err(Error::NonConvergence(format!("step budget exhausted at t = {}", self.t)));
            }
            let last = self.h >= t_end - self.t;
            let h = if last { t_end - self.t } else { self.h };
            if h < self.tol.h_min && !last {
                return Err(Error::StepUnderflow { t: self.t, k: None });
            }
            let (t, y) = (self.t, &self.y);
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            if !self.fsal_valid {
                f(t, y, k1);
            }
            for i in 0..n {
                ytmp[i] = y[i] + h * A21 * k1[i];
            }
            f(t + C2 * h, &ytmp, k2);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            f(t + C3 * h, &ytmp, k3);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            f(t + C4 * h, &ytmp, k4);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            f(t + C5 * h, &ytmp, k5);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            f(t + h, &ytmp, k6);
            for i in 0..n {
                ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            f(t + h, &ynew, k7);
            let mut err = 0.0;
            for i in 0..n {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(ynew[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.t = if last { t_end } else { t + h };
                std::mem::swap(&mut self.y, &mut ynew);
                self.k.swap(0, 6);
                self.steps += 1;
                self.fsal_valid = !post(&mut self.y);
                if !last || factor < 1.0 {
                    self.h = (h * factor).min(self.tol.h_max);
                }
            } else {
                self.rejected += 1;
                self.fsal_valid = true;
                self.h = h * factor.min(1.0);
                if self.h < self.tol.h_min {
                    return Err(Error::StepUnderflow { t: self.t, k: None });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut s = Dopri5::new(0.0, vec![1.0], Tolerances::tight(1e-12, 1e-14));
        s.advance(|_, y, d| d[0] = -y[0], 3.0, |_| false).unwrap();
        assert!((s.y[0] - (-3f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_outputs() {
        let mut s = Dopri5::new(0.0, vec![1.0, 0.0], Tolerances::tight(1e-11, 1e-13));
        for i in 1..=10 {
            let t = i as f64;
            s.advance(|_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            }, t, |_| false)
            .unwrap();
            assert_eq!(s.t, t);
            assert!((s.y[0] - t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn underflow_reported() {
        let tol = Tolerances { h_min: 1e-3, ..Tolerances::tight(1e-14, 0.0) };
        let mut s = Dopri5::new(0.0, vec![1.0], tol);
        let r = s.advance(|t, _, d| d[0] = 1.0 / (1.0 - t).powi(2), 2.0, |_| false);
        assert!(matches!(r, Err(Error::StepUnderflow { .. })));
    }
}
