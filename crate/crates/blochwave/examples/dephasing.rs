//! Conduction population after a strong pulse for several dephasing times.
use blochwave::interband::{propagate_with_dephasing, PropagationOptions, TwoBandModel};
use blochwave::kgrid::KGrid;
use blochwave::pulse::PulseSpec;

fn main() -> blochwave::Result<()> {
    let model = TwoBandModel::kane(9.0, 0.5, 4.9);
    let pulse = PulseSpec::sine_square(1.5, 1.8, 5.0);
    let grid = KGrid::line(16, 4.9)?;
    for t2 in [f64::INFINITY, 10.0, 2.0, 0.5] {
        let r = propagate_with_dephasing(&model, &grid, &pulse, t2, &PropagationOptions::default())?;
        let f = r.final_populations();
        let purity = r.trajectories.iter().map(|t| t.final_state.purity()).fold(1.0, f64::min);
        println!("T2 {t2:>5} fs: mean f_c {:.4e}, min purity {purity:.6}", f.iter().sum::<f64>() / f.len() as f64);
    }
    Ok(())
}
