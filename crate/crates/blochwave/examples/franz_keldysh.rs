//! Below-gap absorption tail of GaAs in a static field.
use blochwave::ladders::{electro_optic_energy, fke_absorption};

fn main() -> blochwave::Result<()> {
    let (eg, m) = (1.43, 0.06);
    for f0 in [0.001, 0.003, 0.01] {
        println!("F0 {f0} V/A, hbar*theta = {:.4} eV", electro_optic_energy(f0, m));
        for hw in [1.30, 1.38, 1.42] {
            println!("  hw {hw:.2} eV: alpha_rel {:.3e}", fke_absorption(hw, f0, m, eg)?.alpha_rel);
        }
    }
    Ok(())
}
