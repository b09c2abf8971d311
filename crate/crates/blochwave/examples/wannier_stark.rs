//! Two-band Wannier–Stark fan and the gap at its first anticrossing.
use blochwave::ladders::{hybridization_field, ws_pair, WsFan};
use num_complex::Complex64;

fn main() -> blochwave::Result<()> {
    let (eg, a) = (9.0, 4.9);
    let xi = Complex64::new(0.1, 0.0);
    let fan = WsFan { mean_c: eg, mean_v: 0.0, a, dipoles: vec![(1, xi)], rungs: -2..=2 };
    let fc = hybridization_field(eg, a, 1);
    for f0 in [0.5 * fc, 0.99 * fc, fc, 1.01 * fc] {
        let lv = fan.levels(f0)?;
        println!("F0 {f0:.4}: levels {:?}", lv.energies.iter().map(|e| (e * 1e3).round() / 1e3).collect::<Vec<_>>());
    }
    let (lo, hi) = ws_pair(eg, a * fc, xi * fc);
    println!("anticrossing gap {:.6} eV = 2|V| = {:.6} eV", hi - lo, 2.0 * (xi * fc).norm());
    Ok(())
}
