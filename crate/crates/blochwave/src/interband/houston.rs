//! Adiabatic perturbation theory in the Houston basis.
//!
//! The time-ordered Dyson integrals are generated as a chain of ODEs,
//! I_j′ = −(i/ħ) W_j I_{j−1} with I_0 = 1 and W_j = W for odd j, W* for even j,
//! so a_c collects the odd members and a_v the even ones. The n-th correction to
//! a_c returned here is I_{2n−1}, the n-th nonvanishing term (field order 2n − 1).

use num_complex::Complex64;

use super::{wrap_phase, TwoBandModel};
use crate::error::{Error, Result};
use crate::ode::{Dopri5, Tolerances};
use crate::pulse::PulseSpec;
use crate::units::HBAR;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DysonOptions {
    /// Largest admissible correction order.
    pub max_order: usize,
    pub tol: Tolerances,
}

impl Default for DysonOptions {
    fn default() -> Self {
        Self { max_order: 3, tol: Tolerances::tight(1e-11, 1e-14) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DysonSeries {
    /// Corrections to a_c of orders 1..=n (field orders 1, 3, 5, ...).
    pub terms: Vec<Complex64>,
    /// Accumulated phase φ′ at the evaluation time, wrapped to (−π, π].
    pub phase: f64,
}

impl DysonSeries {
    /// Sum of the corrections up to and including `order`.
    pub fn partial_sum(&self, order: usize) -> Complex64 {
        self.terms.iter().take(order).sum()
    }
}

/// Corrections of orders 1..=`order` to the conduction amplitude at time `t`.
pub fn dyson_series(
    model: &TwoBandModel,
    k: f64,
    pulse: &PulseSpec,
    t: f64,
    order: usize,
    opts: &DysonOptions,
) -> Result<DysonSeries> {
    if order == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    if order > opts.max_order {
        return Err(Error::OrderTooHigh { order, max: opts.max_order });
    }
    model.validate()?;
    pulse.validate()?;
    opts.tol.validate()?;
    let links = 2 * order - 1;
    let (ts, te) = pulse.window;
    let t_end = t.min(te);
    let mut ode = Dopri5::new(ts, vec![0.0; 1 + 2 * links], opts.tol);
    if t_end > ts {
        let rhs = |tt: f64, y: &[f64], dy: &mut [f64]| {
            let (v, wgap) = model.drive(k, pulse, tt);
            dy[0] = wgap;
            let w = v * Complex64::from_polar(1.0, y[0]) / HBAR;
            let mut prev = Complex64::new(1.0, 0.0);
            for j in 1..=links {
                let wj = if j % 2 == 1 { w } else { w.conj() };
                // −i wj prev
                let d = Complex64::new(0.0, -1.0) * wj * prev;
                dy[2 * j - 1] = d.re;
                dy[2 * j] = d.im;
                prev = Complex64::new(y[2 * j - 1], y[2 * j]);
            }
        };
        ode.advance(rhs, t_end, |y| wrap_phase(&mut y[0])).map_err(|e| match e {
            Error::StepUnderflow { t, .. } => Error::StepUnderflow { t, k: Some(k) },
            other => other,
        })?;
    }
    let terms = (0..order)
        .map(|n| {
            let j = 2 * n + 1;
            Complex64::new(ode.y[2 * j - 1], ode.y[2 * j])
        })
        .collect();
    Ok(DysonSeries { terms, phase: ode.y[0] })
}

/// First-order Houston amplitude a_c^{(1)}(t) = −(i/ħ)∫ V_cv exp(iφ′) dt.
pub fn houston_amplitude_first_order(
    model: &TwoBandModel,
    k: f64,
    pulse: &PulseSpec,
    t: f64,
    opts: &DysonOptions,
) -> Result<Complex64> {
    dyson_correction(model, k, pulse, t, 1, opts)
}

/// The `order`-th correction to a_c (order 1 is the first-order amplitude).
pub fn dyson_correction(
    model: &TwoBandModel,
    k: f64,
    pulse: &PulseSpec,
    t: f64,
    order: usize,
    opts: &DysonOptions,
) -> Result<Complex64> {
    Ok(dyson_series(model, k, pulse, t, order, opts)?.terms[order - 1])
}
