//! Band geometry of two-band Bloch Hamiltonians H(k) = d0 + d·σ on discrete
//! k grids, and semiclassical wavepacket motion with anomalous velocity.
//!
//! All link quantities are built from overlaps ⟨u_k|u_k′⟩, so results are
//! independent of the phase of each eigenvector. The connection convention is
//! A = i⟨u|∂u⟩, giving link phases arg⟨u_k|u_{k+δ}⟩ ≈ −A·δ.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::band::BandDispersion;
use crate::error::{Error, Result};
use crate::ode::{Dopri5, Tolerances};
use crate::output::CsvTable;
use crate::pulse::PulseSpec;
use crate::units::HBAR;

/// Overlap modulus below which a link is treated as a gap closure.
pub const MIN_LINK_OVERLAP: f64 = 1e-6;
/// Chern sums further than this from an integer are flagged.
pub const CHERN_RESIDUAL_FLAG: f64 = 0.01;
/// e²/ħ in siemens.
pub const E2_OVER_HBAR_SIEMENS: f64 = 2.434_134_807_664_281e-4;
/// One tesla in V·fs/Å².
pub const TESLA: f64 = 1e-5;

pub type Spinor = [Complex64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DVector {
    pub d0: f64,
    pub d: [f64; 3],
}

impl DVector {
    pub fn norm(&self) -> f64 {
        (self.d[0].powi(2) + self.d[1].powi(2) + self.d[2].powi(2)).sqrt()
    }

    pub fn energy(&self, band: Band) -> f64 {
        match band {
            Band::Lower => self.d0 - self.norm(),
            Band::Upper => self.d0 + self.norm(),
        }
    }

    /// Normalized eigenvector of d·σ for `band`, in an arbitrary gauge.
    pub fn eigenvector(&self, band: Band) -> Option<Spinor> {
        let r = self.norm();
        if r < 1e-14 {
            return None;
        }
        let lam = match band {
            Band::Lower => -r,
            Band::Upper => r,
        };
        let [dx, dy, dz] = self.d;
        let a: Spinor = [Complex64::new(dx, -dy), Complex64::new(lam - dz, 0.0)];
        let b: Spinor = [Complex64::new(lam + dz, 0.0), Complex64::new(dx, dy)];
        let na = a[0].norm_sqr() + a[1].norm_sqr();
        let nb = b[0].norm_sqr() + b[1].norm_sqr();
        let (v, n) = if na >= nb { (a, na) } else { (b, nb) };
        let s = n.sqrt();
        Some([v[0] / s, v[1] / s])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Lower,
    Upper,
}

type DFn = dyn Fn(&[f64]) -> DVector + Send + Sync;

/// Two-band model on a 1D or 2D Bravais lattice with lattice constants `a`.
#[derive(Clone)]
pub struct BlochModel2Band {
    a: Vec<f64>,
    dvec: Arc<DFn>,
}

impl std::fmt::Debug for BlochModel2Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlochModel2Band").field("a", &self.a).finish_non_exhaustive()
    }
}

impl BlochModel2Band {
    pub fn new(a: Vec<f64>, dvec: impl Fn(&[f64]) -> DVector + Send + Sync + 'static) -> Result<Self> {
        if a.is_empty() || a.len() > 2 || a.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput("need one or two positive lattice constants".into()));
        }
        Ok(Self { a, dvec: Arc::new(dvec) })
    }

    /// d(k) = (t1 + t2 cos ka, t2 sin ka, 0).
    pub fn ssh(t1: f64, t2: f64, a: f64) -> Self {
        Self::new(vec![a], move |k: &[f64]| DVector {
            d0: 0.0,
            d: [t1 + t2 * (k[0] * a).cos(), t2 * (k[0] * a).sin(), 0.0],
        })
        .expect("positive lattice constant")
    }

    /// d(k) = (sin kx, sin ky, u + cos kx + cos ky) on a unit square lattice.
    pub fn qi_wu_zhang(u: f64) -> Self {
        Self::new(vec![1.0, 1.0], move |k: &[f64]| DVector {
            d0: 0.0,
            d: [k[0].sin(), k[1].sin(), u + k[0].cos() + k[1].cos()],
        })
        .expect("positive lattice constants")
    }

    pub fn dimension(&self) -> usize {
        self.a.len()
    }

    pub fn lattice_constants(&self) -> &[f64] {
        &self.a
    }

    pub fn d_at(&self, k: &[f64]) -> DVector {
        (self.dvec)(k)
    }

    /// Grid coordinate along `axis`: −π/a + i·2π/(aN).
    pub fn grid_k(&self, axis: usize, i: usize, n: usize) -> f64 {
        let a = self.a[axis];
        -PI / a + 2.0 * PI / a * i as f64 / n as f64
    }

    fn state(&self, k: &[f64], band: Band, index: usize) -> Result<Spinor> {
        self.d_at(k).eigenvector(band).ok_or(Error::GapClosure { overlap: 0.0, index })
    }

    /// Eigenvectors on an N-point loop (1D models).
    pub fn loop_states(&self, band: Band, n: usize) -> Result<Vec<Spinor>> {
        if self.dimension() != 1 {
            return Err(Error::InvalidInput("loop states need a 1D model".into()));
        }
        (0..n).map(|i| self.state(&[self.grid_k(0, i, n)], band, i)).collect()
    }

    /// Eigenvectors on an nx × ny grid, x fastest (2D models).
    pub fn grid_states(&self, band: Band, nx: usize, ny: usize) -> Result<Vec<Spinor>> {
        if self.dimension() != 2 {
            return Err(Error::InvalidInput("grid states need a 2D model".into()));
        }
        (0..nx * ny)
            .map(|idx| {
                let (i, j) = (idx % nx, idx / nx);
                self.state(&[self.grid_k(0, i, nx), self.grid_k(1, j, ny)], band, idx)
            })
            .collect()
    }
}

fn overlap(a: &Spinor, b: &Spinor) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

fn link(a: &Spinor, b: &Spinor, index: usize) -> Result<Complex64> {
    let o = overlap(a, b);
    let m = o.norm();
    if m < MIN_LINK_OVERLAP {
        return Err(Error::GapClosure { overlap: m, index });
    }
    Ok(o / m)
}

fn wrap_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Berry phase −arg Π⟨u_i|u_{i+1}⟩ of a closed loop of states, in [0, 2π).
pub fn wilson_loop_phase(states: &[Spinor]) -> Result<f64> {
    if states.len() < 2 {
        return Err(Error::InvalidInput("a loop needs at least two states".into()));
    }
    let n = states.len();
    let mut w = Complex64::new(1.0, 0.0);
    for i in 0..n {
        w *= link(&states[i], &states[(i + 1) % n], i)?;
    }
    Ok(wrap_2pi(-w.arg()))
}

/// Zak phase of one band of a 1D model from an N-point Wilson loop, in [0, 2π).
pub fn zak_phase(model: &BlochModel2Band, band: Band, points: usize) -> Result<f64> {
    wilson_loop_phase(&model.loop_states(band, points)?)
}

/// Berry curvature Ω_z sampled at plaquette corners (kx, ky).
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureMap {
    pub nx: usize,
    pub ny: usize,
    pub kx: Vec<f64>,
    pub ky: Vec<f64>,
    /// Ω_z per plaquette, x fastest (Å²).
    pub omega: Vec<f64>,
}

impl CurvatureMap {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.omega[(i % self.nx) + (j % self.ny) * self.nx]
    }

    /// Periodic bilinear interpolation.
    pub fn interpolate(&self, kx: f64, ky: f64) -> f64 {
        let lx = self.kx[1] - self.kx[0];
        let ly = self.ky[1] - self.ky[0];
        let fx = ((kx - self.kx[0]) / lx).rem_euclid(self.nx as f64);
        let fy = ((ky - self.ky[0]) / ly).rem_euclid(self.ny as f64);
        let (i, j) = (fx.floor() as usize % self.nx, fy.floor() as usize % self.ny);
        let (tx, ty) = (fx - fx.floor(), fy - fy.floor());
        (1.0 - tx) * (1.0 - ty) * self.at(i, j)
            + tx * (1.0 - ty) * self.at(i + 1, j)
            + (1.0 - tx) * ty * self.at(i, j + 1)
            + tx * ty * self.at(i + 1, j + 1)
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["kx", "ky", "Omega_z"]);
        for j in 0..self.ny {
            for i in 0..self.nx {
                t.push(vec![self.kx[i], self.ky[j], self.at(i, j)]);
            }
        }
        t
    }
}

/// Geometry of one band on a 2D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChernReport {
    pub band: Band,
    pub chern: i64,
    /// Unrounded plaquette sum / 2π.
    pub raw: f64,
    pub residual: f64,
    pub flagged: bool,
    pub curvature: CurvatureMap,
    /// Fubini–Study metric (g_xx, g_xy, g_yy) per grid point.
    pub metric: Vec<[f64; 3]>,
    /// Berry phase of the ky loop at the first kx column, in [0, 2π).
    pub zak_mod_2pi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChernSummary {
    #[serde(rename = "C")]
    pub chern: i64,
    pub residual: f64,
    /// (e²/ħ)·C in siemens.
    pub sigma_xy: f64,
    pub sigma_xy_note: &'static str,
    pub zak_mod_2pi: f64,
}

const SIGMA_NOTE: &str = "sigma_xy uses the prefactor e^2/hbar; the conductance quantum e^2/h is smaller by 2*pi";

impl ChernReport {
    /// Hall conductivity (e²/ħ)·C with this band occupied (S).
    pub fn sigma_xy(&self) -> f64 {
        hall_conductivity(&[self.chern])
    }

    pub fn summary(&self) -> ChernSummary {
        ChernSummary {
            chern: self.chern,
            residual: self.residual,
            sigma_xy: self.sigma_xy(),
            sigma_xy_note: SIGMA_NOTE,
            zak_mod_2pi: self.zak_mod_2pi,
        }
    }

    /// Smallest metric eigenvalue over the grid.
    pub fn metric_min_eigenvalue(&self) -> f64 {
        self.metric
            .iter()
            .map(|[xx, xy, yy]| 0.5 * (xx + yy) - (0.25 * (xx - yy).powi(2) + xy * xy).sqrt())
            .fold(f64::INFINITY, f64::min)
    }
}

/// (e²/ħ) ΣC_n over occupied bands, siemens.
pub fn hall_conductivity(chern_numbers: &[i64]) -> f64 {
    E2_OVER_HBAR_SIEMENS * chern_numbers.iter().sum::<i64>() as f64
}

/// Plaquette phase −arg(U_x(k) U_y(k+x) U_x(k+y)* U_y(k)*) at grid corner (i, j).
fn plaquette(states: &[Spinor], nx: usize, ny: usize, i: usize, j: usize) -> Result<f64> {
    let id = |i: usize, j: usize| (i % nx) + (j % ny) * nx;
    let c = id(i, j);
    let u1 = link(&states[c], &states[id(i + 1, j)], c)?;
    let u2 = link(&states[id(i + 1, j)], &states[id(i + 1, j + 1)], c)?;
    let u3 = link(&states[id(i + 1, j + 1)], &states[id(i, j + 1)], c)?;
    let u4 = link(&states[id(i, j + 1)], &states[c], c)?;
    Ok(-(u1 * u2 * u3 * u4).arg())
}

/// Curvature, Chern number and metric from precomputed states (x fastest).
pub fn chern_from_states(
    band: Band,
    states: &[Spinor],
    kx: Vec<f64>,
    ky: Vec<f64>,
) -> Result<ChernReport> {
    let (nx, ny) = (kx.len(), ky.len());
    if nx < 2 || ny < 2 || states.len() != nx * ny {
        return Err(Error::GridMismatch(format!("{} states for a {nx}x{ny} grid", states.len())));
    }
    let dkx = kx[1] - kx[0];
    let dky = ky[1] - ky[0];
    let area = dkx * dky;
    let mut phases = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            phases.push(plaquette(states, nx, ny, i, j)?);
        }
    }
    // fixed traversal order for the sum
    let raw = phases.iter().sum::<f64>() / (2.0 * PI);
    let chern = raw.round() as i64;
    let residual = (raw - chern as f64).abs();
    let id = |i: usize, j: usize| (i % nx) + (j % ny) * nx;
    let dist = |a: &Spinor, b: &Spinor| 1.0 - overlap(a, b).norm_sqr();
    let metric = (0..nx * ny)
        .map(|c| {
            let (i, j) = (c % nx, c / nx);
            let px = &states[id(i + 1, j)];
            let py = &states[id(i, j + 1)];
            let dx = dist(&states[c], px);
            let dy = dist(&states[c], py);
            let dxy = dist(px, py);
            [dx / (dkx * dkx), (dx + dy - dxy) / (2.0 * area), dy / (dky * dky)]
        })
        .collect();
    let column: Vec<Spinor> = (0..ny).map(|j| states[id(0, j)]).collect();
    let zak_mod_2pi = wilson_loop_phase(&column)?;
    let omega = phases.iter().map(|p| p / area).collect();
    Ok(ChernReport {
        band,
        chern,
        raw,
        residual,
        flagged: residual > CHERN_RESIDUAL_FLAG,
        curvature: CurvatureMap { nx, ny, kx, ky, omega },
        metric,
        zak_mod_2pi,
    })
}

pub fn chern_and_curvature(model: &BlochModel2Band, band: Band, nx: usize, ny: usize) -> Result<ChernReport> {
    let states = model.grid_states(band, nx, ny)?;
    let kx = (0..nx).map(|i| model.grid_k(0, i, nx)).collect();
    let ky = (0..ny).map(|j| model.grid_k(1, j, ny)).collect();
    chern_from_states(band, &states, kx, ky)
}

/// Wannier–Stark rungs E = Ē + eaF0(ℓ + γZ/2π).
pub fn ws_ladder_with_zak(mean_energy: f64, a: f64, f0: f64, zak: f64, rungs: std::ops::RangeInclusive<i64>) -> Result<Vec<f64>> {
    if !(f0 > 0.0) {
        return Err(Error::InvalidInput(format!("ladder needs F0 > 0, got {f0}")));
    }
    Ok(rungs.map(|l| mean_energy + a * f0 * (l as f64 + zak / (2.0 * PI))).collect())
}

/// E(K) and ∇E for a band extended to several dimensions: radial for the
/// effective-mass and Kane bands, separable (simple-cubic) for tight binding.
pub fn band_energy_nd(band: &BandDispersion, k: &[f64; 3]) -> (f64, [f64; 3]) {
    match band {
        BandDispersion::TightBinding(tb) => {
            let e0 = tb.eps.first().copied().unwrap_or(0.0);
            let e = e0 + k.iter().map(|&q| tb.energy(q) - e0).sum::<f64>();
            (e, [tb.slope(k[0]), tb.slope(k[1]), tb.slope(k[2])])
        }
        _ => {
            let r = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            let s = band.slope(r);
            let g = if r > 0.0 { [s * k[0] / r, s * k[1] / r, s * k[2] / r] } else { [0.0; 3] };
            (band.energy(r), g)
        }
    }
}

#[derive(Clone)]
pub enum CurvatureField {
    Zero,
    Constant([f64; 3]),
    /// Ω_z(kx, ky) from a computed map.
    Map(CurvatureMap),
    Function(Arc<dyn Fn(&[f64; 3]) -> [f64; 3] + Send + Sync>),
}

impl CurvatureField {
    pub fn at(&self, k: &[f64; 3]) -> [f64; 3] {
        match self {
            CurvatureField::Zero => [0.0; 3],
            CurvatureField::Constant(o) => *o,
            CurvatureField::Map(m) => [0.0, 0.0, m.interpolate(k[0], k[1])],
            CurvatureField::Function(f) => f(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Drive {
    /// Static field vector (V/Å).
    Constant([f64; 3]),
    /// Pulse polarized in the xy plane.
    Pulse(PulseSpec),
}

impl Drive {
    fn field(&self, t: f64) -> [f64; 3] {
        match self {
            Drive::Constant(f) => *f,
            Drive::Pulse(p) => {
                let [x, y] = p.field_vector(t);
                [x, y, 0.0]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnomalousTrajectory {
    pub t: Vec<f64>,
    pub k: Vec<[f64; 3]>,
    pub r: Vec<[f64; 3]>,
}

impl AnomalousTrajectory {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t_fs", "kx", "ky", "kz", "x", "y", "z"]);
        for ((s, k), r) in self.t.iter().zip(&self.k).zip(&self.r) {
            t.push(vec![*s, k[0], k[1], k[2], r[0], r[1], r[2]]);
        }
        t
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX_ITER: usize = 200;

/// Semiclassical motion ħK̇ = −(F + ṙ×B), ṙ = ∇E/ħ − K̇×Ω, sampled at `samples`
/// equally spaced times over [t0, t0 + duration]. B is in V·fs/Å² (see [`TESLA`]).
#[allow(clippy::too_many_arguments)]
pub fn anomalous_trajectory(
    band: &BandDispersion,
    curvature: &CurvatureField,
    drive: &Drive,
    b_field: Option<[f64; 3]>,
    k0: [f64; 3],
    r0: [f64; 3],
    t0: f64,
    duration: f64,
    samples: usize,
    tol: &Tolerances,
) -> Result<AnomalousTrajectory> {
    band.validate()?;
    tol.validate()?;
    if !(duration > 0.0) || samples < 2 {
        return Err(Error::InvalidInput("need a positive duration and at least two samples".into()));
    }
    let b = b_field.unwrap_or([0.0; 3]);
    let has_b = b.iter().any(|v| *v != 0.0);
    let velocities = |t: f64, k: [f64; 3]| -> Result<([f64; 3], [f64; 3])> {
        let f = drive.field(t);
        let (_, g) = band_energy_nd(band, &k);
        let group = [g[0] / HBAR, g[1] / HBAR, g[2] / HBAR];
        let om = curvature.at(&k);
        let kdot_of = |rdot: [f64; 3]| {
            let rb = cross(rdot, b);
            [-(f[0] + rb[0]) / HBAR, -(f[1] + rb[1]) / HBAR, -(f[2] + rb[2]) / HBAR]
        };
        let rdot_of = |kdot: [f64; 3]| {
            let c = cross(kdot, om);
            [group[0] - c[0], group[1] - c[1], group[2] - c[2]]
        };
        let mut rdot = group;
        let mut kdot = kdot_of(rdot);
        if has_b {
            let mut converged = false;
            for _ in 0..FIXED_POINT_MAX_ITER {
                let next = rdot_of(kdot);
                let change = (0..3).map(|i| (next[i] - rdot[i]).abs()).fold(0.0, f64::max);
                let scale = next.iter().map(|v| v.abs()).fold(1.0, f64::max);
                rdot = next;
                kdot = kdot_of(rdot);
                if change <= FIXED_POINT_TOL * scale {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NonConvergence(format!(
                    "velocity fixed point did not converge at t = {t} fs, K = {k:?}"
                )));
            }
        } else {
            rdot = rdot_of(kdot);
        }
        Ok((kdot, rdot))
    };
    let failure: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        match velocities(t, [y[0], y[1], y[2]]) {
            Ok((kd, rd)) => {
                dy[..3].copy_from_slice(&kd);
                dy[3..].copy_from_slice(&rd);
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                dy.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    };
    let mut y0 = k0.to_vec();
    y0.extend_from_slice(&r0);
    let mut ode = Dopri5::new(t0, y0, *tol);
    let mut out = AnomalousTrajectory { t: Vec::new(), k: Vec::new(), r: Vec::new() };
    for i in 0..samples {
        let t = t0 + duration * i as f64 / (samples - 1) as f64;
        ode.advance(rhs, t, |_: &mut [f64]| false)?;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        out.t.push(t);
        out.k.push([ode.y[0], ode.y[1], ode.y[2]]);
        out.r.push([ode.y[3], ode.y[4], ode.y[5]]);
    }
    Ok(out)
}
