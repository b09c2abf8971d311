//! Cycle-averaged excitation rate of a Kane band versus field strength.
//! Pass `full` for the 40-point, 3D-averaged scan (a few minutes).
use blochwave::interband::{excitation_rate_scan, ScanOptions, TransverseQuadrature, TwoBandModel};
use blochwave::kgrid::KGrid;
use blochwave::pulse::PulseSpec;
use std::f64::consts::PI;

fn main() -> blochwave::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let model = TwoBandModel::kane(9.0, 0.5, 4.9);
    let (points, cycles, nodes) = if full { (40, 30.0, 12) } else { (12, 12.0, 0) };
    let f0s: Vec<f64> = (0..points).map(|i| 0.3 * (2.3f64 / 0.3).powf(i as f64 / (points - 1) as f64)).collect();
    let opts = ScanOptions {
        transverse: (nodes > 0).then(|| TransverseQuadrature { nodes, k_max: PI / model.a }),
        ..Default::default()
    };
    let scan = excitation_rate_scan(&model, &PulseSpec::flat_top(1.0, 1.8, cycles, 3.0), &f0s, &KGrid::line(64, 4.9)?, &opts)?;
    for (i, r) in scan.rows.iter().enumerate() {
        println!("F0 {:6.3}  rate {:10.3e} /fs  gamma_NP {:5.2}  N~ {}{}", r.f0, r.rate, scan.gamma_np(i), r.n_tilde, if r.closing { "  <- drop" } else { "" });
    }
    Ok(())
}
