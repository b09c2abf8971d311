//! Work done by the field on a two-band system and the energy left in pairs.
use blochwave::interband::{propagate_two_band, PropagationOptions, TwoBandModel};
use blochwave::intraband::energy_transfer_from_current;
use blochwave::kgrid::KGrid;
use blochwave::pulse::PulseSpec;

fn main() -> blochwave::Result<()> {
    let model = TwoBandModel::kane(9.0, 0.5, 4.9);
    let pulse = PulseSpec::sine_square(0.8, 1.8, 4.0);
    let (t0, t1) = pulse.window;
    let n = 4001;
    let dt = (t1 - t0) / (n - 1) as f64;
    let times: Vec<f64> = (0..n).map(|i| t0 + dt * i as f64).collect();
    let opts = PropagationOptions { sample_times: times.clone(), ..Default::default() };
    let r = propagate_two_band(&model, &KGrid::line(16, 4.9)?, &pulse, &opts)?;
    let p = r.polarization(&model, &pulse);
    let mut j = r.intraband_current(&model, &pulse);
    for i in 1..n - 1 {
        j[i] += (p[i + 1] - p[i - 1]) / (2.0 * dt);
    }
    let field: Vec<f64> = times.iter().map(|&t| pulse.field(t)).collect();
    let w = energy_transfer_from_current(&field[1..n - 1], &j[1..n - 1], dt)?;
    let pairs: f64 = r.trajectories.iter().map(|t| t.final_state.population() * model.gap.energy(t.k)).sum::<f64>() / 16.0;
    println!("peak work {:.4e} eV, irreversible {:.4e} eV, pair energy {pairs:.4e} eV", w.w_max, w.w_irrev);
    Ok(())
}
