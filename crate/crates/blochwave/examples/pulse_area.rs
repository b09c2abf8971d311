//! Generalized pulse area along Houston trajectories of a Kane band.
use blochwave::interband::TwoBandModel;
use blochwave::pulse::PulseSpec;
use blochwave::resonant::generalized_area;
use std::f64::consts::PI;

fn main() -> blochwave::Result<()> {
    let model = TwoBandModel::kane(1.5, 0.1, 5.65);
    for f0 in [0.005, 0.02, 0.1] {
        let g = generalized_area(&model, 0.0, &PulseSpec::sine_square(f0, 1.5, 20.0), 201)?;
        println!("F0 {f0:5.3}: area {:8.3} x 2pi  gamma_RP {:8.3}  counts Rabi cycles: {}", g.area / (2.0 * PI), g.gamma_rp, g.counting);
    }
    Ok(())
}
