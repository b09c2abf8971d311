use std::f64::consts::PI;

use blochwave::band::{BandDispersion, TightBinding};
use blochwave::geometry::{
    chern_and_curvature, chern_from_states, wilson_loop_phase, zak_phase, Band, BlochModel2Band, Spinor,
};
use blochwave::interband::{
    propagate_two_band, propagate_with_dephasing, KFunction, PropagationOptions, TwoBandModel,
};
use blochwave::intraband::{cycle_drift, hhg_spectrum, trajectory, transferred_charge, weak_field_drift, BandPopulation, PopulationTable};
use blochwave::kgrid::KGrid;
use blochwave::ladders::{fke_absorption, localization_lengths, WsFan};
use blochwave::material::{material_lookup, TwoBandTightBinding};
use blochwave::ode::Tolerances;
use blochwave::pulse::{kinetic_momentum, PulseSpec};
use blochwave::regimes::{channel_count, ponderomotive_ema, ponderomotive_tight_binding, report_from_up};
use blochwave::resonant::{generalized_area, solve_two_level, two_level_tolerances, TwoLevelSystem};
use blochwave::special::{j0, j0_series, J0_ROOTS};
use blochwave::units::HBAR;
use num_complex::Complex64;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Deterministic per-k phases from a seed.
fn redress(states: &[Spinor], seed: u64) -> Vec<Spinor> {
    let mut x = seed | 1;
    states
        .iter()
        .map(|s| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let ph = Complex64::from_polar(1.0, (x % 10_000) as f64 * 2.0 * PI / 10_000.0);
            [s[0] * ph, s[1] * ph]
        })
        .collect()
}

fn qwz_u() -> impl Strategy<Value = f64> {
    prop_oneof![-3.5..-2.3f64, -1.7..-0.3f64, 0.3..1.7f64, 2.3..3.5f64]
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn vector_potential_starts_at_zero(f0 in 0.0..3.0f64, hw in 0.5..3.0f64, fwhm in 1.0..20.0f64, cep in 0.0..6.3f64) {
        let p = PulseSpec::sine_square(f0, hw, fwhm).with_cep(cep);
        prop_assert_eq!(p.vector_potential(p.window.0), 0.0);
        let q = PulseSpec::flat_top(f0, hw, 6.0, 2.0).with_cep(cep);
        prop_assert_eq!(q.vector_potential(q.window.0), 0.0);
    }

    #[test]
    fn reduced_momentum_in_zone(k in -20.0..20.0f64, a in 1.0..10.0f64, t in 0.0..30.0f64, f0 in 0.0..5.0f64) {
        let p = PulseSpec::sine_square(f0, 1.6, 10.0);
        let kk = kinetic_momentum(k, &p, t, Some(a));
        prop_assert!((-PI / a..PI / a).contains(&kk), "{kk}");
    }

    #[test]
    fn keldysh_identity(f0 in 0.01..3.0f64, hw in 0.5..3.0f64, up in 0.01..20.0f64) {
        let m = material_lookup("SiO2").unwrap();
        let r = report_from_up(&m, &PulseSpec::monochromatic(f0, hw, 0.0, 10.0), up);
        prop_assert!((r.gamma_k.powi(2) * r.gamma_np * 4.0 - r.n).abs() <= 1e-12 * r.n);
    }

    #[test]
    fn channel_count_is_monotone(f1 in 0.0..3.0f64, df in 0.0..1.0f64, hw in 0.8..3.0f64) {
        let up = |f: f64| ponderomotive_ema(f, hw, 0.0, 0.5);
        prop_assert!(channel_count(9.0, up(f1), hw) <= channel_count(9.0, up(f1 + df), hw));
    }

    #[test]
    fn tight_binding_up_is_parabolic_at_weak_field(hw in 1.0..3.0f64, frac in 0.01..1.0f64) {
        let two = TwoBandTightBinding::sio2_gamma_m();
        let gap = two.gap_band();
        let f0 = frac * 0.05 * hw / gap.a;
        let tb = ponderomotive_tight_binding(&gap.eps, gap.a, f0, hw, two.eg);
        let ema = ponderomotive_ema(f0, hw, 0.0, gap.effective_mass_at(0.0));
        prop_assert!((tb - ema).abs() < 0.01 * ema, "tb {tb} ema {ema}");
    }

    #[test]
    fn j0_matches_series(x in 0.0..50.0f64) {
        prop_assert!((j0(x) - j0_series(x)).abs() < 1e-10);
    }

    #[test]
    fn drift_vanishes_at_bessel_roots(k0 in -0.6..0.6f64, hw in 0.8..3.0f64, e1 in -2.0..-0.1f64) {
        prop_assume!(k0.abs() > 0.05);
        let band = TightBinding::nearest_neighbor(5.0, 0.0, e1);
        let scale = weak_field_drift(&band, k0, hw).abs();
        for g in &J0_ROOTS[..3] {
            prop_assert!(cycle_drift(&band, k0, *g, hw).unwrap().abs() < 1e-6 * scale);
        }
    }

    #[test]
    fn transferred_charge_is_bilinear(c in 0.1..5.0f64, s in 0.1..5.0f64, delay in -3.0..3.0f64) {
        let times: Vec<f64> = (0..200).map(|i| -10.0 + 0.1 * i as f64).collect();
        let f: Vec<Vec<f64>> = (0..3).map(|k| times.iter().map(|t| (1.0 + k as f64) * (1.0 + (0.3 * t).tanh())).collect()).collect();
        let table = |scale: f64| PopulationTable {
            times: times.clone(),
            bands: vec![BandPopulation { mass: 0.3, f: f.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect() }],
        };
        let drive = PulseSpec::sine_square(0.01, 1.55, 5.0);
        let q = transferred_charge(&table(1.0), &drive, delay, 1.0).unwrap();
        let qc = transferred_charge(&table(c), &drive, delay, s).unwrap();
        prop_assert!((qc - c * s * q).abs() <= 1e-12 * (c * s * q).abs().max(1e-300));
    }

    #[test]
    fn kane_length_decreases_towards_wannier(bw in 0.5..10.0f64, lw in 0.5..6.0f64, f in 0.01..50.0f64, df in 0.001..10.0f64) {
        let a = localization_lengths(bw, lw, f).unwrap();
        let b = localization_lengths(bw, lw, f + df).unwrap();
        prop_assert!(b.l_k < a.l_k);
        prop_assert!(b.l_k >= lw);
    }

    #[test]
    fn fke_grows_with_field(gap in 0.05..0.5f64, f in 0.0005..0.02f64, ratio in 1.01..3.0f64) {
        let (eg, m) = (1.43, 0.06);
        let lo = fke_absorption(eg - gap, f, m, eg).unwrap().alpha_rel;
        let hi = fke_absorption(eg - gap, f * ratio, m, eg).unwrap().alpha_rel;
        prop_assert!(hi > lo);
    }

    #[test]
    fn ws_levels_are_continuous(xi_re in 0.01..0.5f64, xi_im in -0.3..0.3f64, start in 0.1..3.0f64) {
        let fan = WsFan { mean_c: 9.0, mean_v: 0.0, a: 4.9, dipoles: vec![(1, Complex64::new(xi_re, xi_im))], rungs: -2..=2 };
        let df = 1e-3;
        // Weyl bound: eigenvalue shifts are limited by the norm of ΔH
        let bound = df * (2.0 * fan.a + 2.0 * Complex64::new(xi_re, xi_im).norm()) * (1.0 + 1e-9);
        let mut prev = fan.levels(start).unwrap().energies;
        for i in 1..50 {
            let next = fan.levels(start + df * i as f64).unwrap().energies;
            for (a, b) in prev.iter().zip(&next) {
                prop_assert!((a - b).abs() <= bound + 1e-12, "jump {} > {bound}", (a - b).abs());
            }
            prev = next;
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn displacement_matches_richardson(f0 in 0.05..1.5f64, k0 in -0.3..0.3f64) {
        let band = BandDispersion::TightBinding(TwoBandTightBinding::sio2_gamma_m().conduction);
        let p = PulseSpec::sine_square(f0, 1.65, 6.0);
        let n = 4097;
        let r = trajectory(&band, k0, &p, n).unwrap();
        let h = (p.window.1 - p.window.0) / (n - 1) as f64;
        let trap = |step: usize| {
            let v: Vec<f64> = r.v.iter().step_by(step).copied().collect();
            blochwave::quad::trapezoid(&v, h * step as f64)
        };
        let rich = (4.0 * trap(1) - trap(2)) / 3.0;
        let dx = *r.dx.last().unwrap();
        let scale = r.v.iter().fold(0.0_f64, |m, v| m.max(v.abs())) * (p.window.1 - p.window.0);
        prop_assert!((dx - rich).abs() <= 1e-8 * scale, "dx {dx} richardson {rich}");
    }

    #[test]
    fn harmonic_plateau_terminates(f0 in 0.1..1.5f64, hw in 1.2..2.5f64) {
        let tb = TwoBandTightBinding::sio2_gamma_m().conduction;
        let band = BandDispersion::TightBinding(tb.clone());
        let s = hhg_spectrum(&band, 0.0, &PulseSpec::flat_top(f0, hw, 16.0, 3.0)).unwrap();
        // two orders of margin sit inside the Bessel transition region; four clear it
        let edge = tb.l_max() as f64 * f0 * tb.a / hw + 4.0;
        let above = s.band_power(edge, f64::INFINITY);
        let below = s.band_power(0.0, edge);
        prop_assert!(10.0 * (above / below).log10() <= -40.0, "edge {edge}: {above} vs {below}");
    }

    #[test]
    fn tdse_norm_is_conserved(f0 in 0.05..2.0f64, hw in 1.0..3.0f64) {
        let model = TwoBandModel::kane(9.0, 0.5, 4.9);
        let r = propagate_two_band(&model, &KGrid::line(4, 4.9).unwrap(), &PulseSpec::sine_square(f0, hw, 3.0), &PropagationOptions::default()).unwrap();
        prop_assert!(r.max_drift() < 1e-8);
    }

    #[test]
    fn dipole_phase_drops_out(theta in 0.0..6.28f64, f0 in 0.1..1.5f64) {
        let base = TwoBandModel::kane(9.0, 0.5, 4.9);
        let xi = base.xi_cv.eval(0.0).re;
        let rotated = TwoBandModel { xi_cv: KFunction::Constant { value: Complex64::from_polar(xi, theta) }, ..base.clone() };
        let grid = KGrid::line(4, 4.9).unwrap();
        let p = PulseSpec::sine_square(f0, 1.8, 3.0);
        let opts = PropagationOptions { tol: Tolerances::tight(1e-12, 1e-14), ..Default::default() };
        let a = propagate_two_band(&base, &grid, &p, &opts).unwrap().final_populations();
        let b = propagate_two_band(&rotated, &grid, &p, &opts).unwrap().final_populations();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn purity_never_grows(t2 in 0.3..20.0f64, f0 in 0.3..2.0f64) {
        let model = TwoBandModel::kane(9.0, 0.5, 4.9);
        let p = PulseSpec::sine_square(f0, 1.8, 3.0);
        let times: Vec<f64> = (0..60).map(|i| p.window.0 + (p.window.1 - p.window.0) * i as f64 / 59.0).collect();
        let opts = PropagationOptions { sample_times: times, ..Default::default() };
        let r = propagate_with_dephasing(&model, &KGrid::line(2, 4.9).unwrap(), &p, t2, &opts).unwrap();
        for tr in &r.trajectories {
            for w in tr.snapshots.windows(2) {
                prop_assert!(w[1].purity() <= w[0].purity() + 1e-9);
            }
        }
    }

    #[test]
    fn bloch_norm_holds_for_a_hundred_cycles(gamma in 0.01..1.0f64, detune in -0.2..0.2f64) {
        let hw = 1.5;
        let sys = TwoLevelSystem::new(0.0, hw + detune, 1.0).unwrap();
        let p = PulseSpec::monochromatic(gamma * hw, hw, 0.0, 100.0 * 2.0 * PI * HBAR / hw);
        let tr = solve_two_level(&sys, &p, &two_level_tolerances(), 2).unwrap();
        prop_assert!(tr.max_norm_drift < 1e-9, "{}", tr.max_norm_drift);
    }

    #[test]
    fn flat_band_area_is_pulse_area(f0 in 0.001..0.1f64, xi in 0.2..3.0f64, fwhm in 5.0..40.0f64) {
        let hw = 1.5;
        let p = PulseSpec::sine_square(f0, hw, fwhm);
        let g = generalized_area(&TwoBandModel::flat(hw, xi, 5.0), 0.0, &p, 11).unwrap();
        let ordinary = blochwave::quad::gauss_legendre_composite(|t| f0 * xi * p.envelope_at(t) / HBAR, p.window.0, p.window.1, 64);
        prop_assert!((g.area - ordinary).abs() < 1e-9 * ordinary);
    }

    #[test]
    fn redressing_leaves_geometry_unchanged(u in qwz_u(), seed in any::<u64>()) {
        let model = BlochModel2Band::qi_wu_zhang(u);
        let n = 24;
        let states = model.grid_states(Band::Lower, n, n).unwrap();
        let k: Vec<f64> = (0..n).map(|i| model.grid_k(0, i, n)).collect();
        let a = chern_from_states(Band::Lower, &states, k.clone(), k.clone()).unwrap();
        let b = chern_from_states(Band::Lower, &redress(&states, seed), k.clone(), k).unwrap();
        prop_assert_eq!(a.chern, b.chern);
        prop_assert!((a.raw - b.raw).abs() < 1e-9);
        prop_assert!(circular_distance(a.zak_mod_2pi, b.zak_mod_2pi) < 1e-9);
        let area = (2.0 * PI / n as f64).powi(2);
        for (x, y) in a.curvature.omega.iter().zip(&b.curvature.omega) {
            prop_assert!(circular_distance(x * area, y * area) < 1e-9);
        }
        for (x, y) in a.metric.iter().zip(&b.metric) {
            let det = |m: &[f64; 3]| m[0] * m[2] - m[1] * m[1];
            prop_assert!((det(x) - det(y)).abs() < 1e-9);
        }
        let ssh = BlochModel2Band::ssh(1.0, 1.0 + u.signum() * 0.5, 1.0);
        let loop_states = ssh.loop_states(Band::Lower, 64).unwrap();
        let z0 = wilson_loop_phase(&loop_states).unwrap();
        let z1 = wilson_loop_phase(&redress(&loop_states, seed)).unwrap();
        prop_assert!(circular_distance(z0, z1) < 1e-9);
    }

    #[test]
    fn patch_curvature_equals_boundary_loop(u in qwz_u(), i0 in 0usize..20, j0_ in 0usize..20, w in 1usize..12, h in 1usize..12) {
        let model = BlochModel2Band::qi_wu_zhang(u);
        let n = 32;
        let r = chern_and_curvature(&model, Band::Lower, n, n).unwrap();
        let area = (2.0 * PI / n as f64).powi(2);
        let mut flux = 0.0;
        for j in j0_..j0_ + h {
            for i in i0..i0 + w {
                flux += r.curvature.at(i, j) * area;
            }
        }
        let states = model.grid_states(Band::Lower, n, n).unwrap();
        let at = |i: usize, j: usize| states[(i % n) + (j % n) * n];
        let mut boundary = Vec::new();
        boundary.extend((0..w).map(|d| at(i0 + d, j0_)));
        boundary.extend((0..h).map(|d| at(i0 + w, j0_ + d)));
        boundary.extend((0..w).map(|d| at(i0 + w - d, j0_ + h)));
        boundary.extend((0..h).map(|d| at(i0, j0_ + h - d)));
        let wilson = wilson_loop_phase(&boundary).unwrap();
        prop_assert!(circular_distance(flux, wilson) < 1e-6, "flux {flux} loop {wilson}");
    }

    #[test]
    fn metric_is_positive_semidefinite(u in qwz_u()) {
        let r = chern_and_curvature(&BlochModel2Band::qi_wu_zhang(u), Band::Lower, 40, 40).unwrap();
        prop_assert!(r.metric_min_eigenvalue() >= -1e-10);
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn chern_converges_under_refinement(u in qwz_u()) {
        let model = BlochModel2Band::qi_wu_zhang(u);
        let a = chern_and_curvature(&model, Band::Lower, 64, 64).unwrap();
        let b = chern_and_curvature(&model, Band::Lower, 128, 128).unwrap();
        prop_assert_eq!(a.chern, b.chern);
        let expected = if u.abs() > 2.0 { 0 } else { 1 };
        prop_assert_eq!(a.chern.abs(), expected);
    }
}

#[test]
fn zak_phase_of_dimer_chain_follows_winding() {
    for (t1, t2, winds) in [(1.0, 0.4, false), (0.4, 1.0, true), (2.0, 1.9, false), (1.9, 2.0, true)] {
        let z = zak_phase(&BlochModel2Band::ssh(t1, t2, 1.0), Band::Lower, 256).unwrap();
        let expected = if winds { PI } else { 0.0 };
        assert!(circular_distance(z, expected) < 1e-9, "t1 {t1} t2 {t2}: {z}");
    }
}

/// A pulse whose generalized area is 2π on a flat resonant band returns a
/// weakly driven two-level system to the ground state.
#[test]
fn two_pi_area_is_a_rabi_return() {
    let (hw, d) = (1.5, 1.0);
    let f0 = 0.02 * hw / d;
    let unit = PulseSpec::sine_square(f0, hw, 1.0);
    let per_fwhm = generalized_area(&TwoBandModel::flat(hw, d, 5.0), 0.0, &unit, 11).unwrap().area;
    let pulse = PulseSpec::sine_square(f0, hw, 2.0 * PI / per_fwhm);
    let area = generalized_area(&TwoBandModel::flat(hw, d, 5.0), 0.0, &pulse, 11).unwrap().area;
    assert!((area - 2.0 * PI).abs() < 1e-9, "{area}");
    let sys = TwoLevelSystem::new(0.0, hw, d).unwrap();
    let w = solve_two_level(&sys, &pulse, &two_level_tolerances(), 2).unwrap().last().w;
    assert!((w + 1.0).abs() < 0.01, "w = {w}");
}
