//! Full two-band propagation against the perturbative Houston series.
use blochwave::interband::{dyson_series, propagate_two_band, DysonOptions, PropagationOptions, TwoBandModel};
use blochwave::kgrid::KGrid;
use blochwave::pulse::PulseSpec;

fn main() -> blochwave::Result<()> {
    let model = TwoBandModel::kane(9.0, 0.5, 4.9);
    let pulse = PulseSpec::sine_square(0.3, 1.8, 5.0);
    let r = propagate_two_band(&model, &KGrid::line(8, 4.9)?, &pulse, &PropagationOptions::default())?;
    println!("max norm drift {:.2e}", r.max_drift());
    for tr in r.trajectories.iter().take(4) {
        let s = dyson_series(&model, tr.k, &pulse, pulse.window.1, 2, &DysonOptions::default())?;
        println!(
            "k {:+.3}: |a_c|^2 {:.4e}  first order {:.4e}  two terms {:.4e}",
            tr.k,
            tr.final_state.population(),
            s.partial_sum(1).norm_sqr(),
            s.partial_sum(2).norm_sqr()
        );
    }
    Ok(())
}
