//! Semiclassical and Kane localization lengths for SiO2.
use blochwave::ladders::localization_lengths;

fn main() -> blochwave::Result<()> {
    for f0 in [0.01, 0.1, 1.0, 10.0, 100.0] {
        let l = localization_lengths(3.3, 3.0, f0)?;
        println!("F0 {f0:7.2} V/A: L_SC {:10.3} A  L_K {:10.3} A", l.l_sc, l.l_k);
    }
    Ok(())
}
