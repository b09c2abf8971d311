//! Transverse drift from a constant Berry curvature in a static field.
use blochwave::band::BandDispersion;
use blochwave::geometry::{anomalous_trajectory, CurvatureField, Drive};
use blochwave::ode::Tolerances;

fn main() -> blochwave::Result<()> {
    let band = BandDispersion::Ema { mass: 1.0 };
    let omega = [0.0, 0.0, 2.0];
    let tr = anomalous_trajectory(
        &band,
        &CurvatureField::Constant(omega),
        &Drive::Constant([0.05, 0.0, 0.0]),
        None,
        [0.0; 3],
        [0.0; 3],
        0.0,
        10.0,
        6,
        &Tolerances::default(),
    )?;
    for (t, r) in tr.t.iter().zip(&tr.r) {
        println!("t {t:5.1} fs: x {:+.4} A  y {:+.5} A", r[0], r[1]);
    }
    Ok(())
}
