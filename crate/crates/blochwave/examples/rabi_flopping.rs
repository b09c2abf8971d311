//! 2π pulses on a resonant two-level system: envelope vs carrier-wave Rabi flopping.
use blochwave::ode::Tolerances;
use blochwave::pulse::{sine_square_total_duration, PulseSpec};
use blochwave::resonant::{solve_two_level, TwoLevelSystem};
use blochwave::units::HBAR;
use std::f64::consts::PI;

fn main() -> blochwave::Result<()> {
    let hw = 1.5;
    let sys = TwoLevelSystem::new(0.0, hw, 1.0)?;
    for gamma in [0.05, 0.3, 1.0] {
        let f0 = gamma * hw / sys.d12;
        let total = 4.0 * PI * HBAR / (f0 * sys.d12);
        let pulse = PulseSpec::sine_square(f0, hw, total / sine_square_total_duration(1.0));
        let tr = solve_two_level(&sys, &pulse, &Tolerances::default(), 2)?;
        println!("gamma_RF0 {gamma:4.2}: {:5.2} cycles, final w {:+.5}", total * hw / (2.0 * PI * HBAR), tr.last().w);
    }
    Ok(())
}
