//! Ponderomotive energy of the SiO2 pair band: parabolic at weak fields, bounded at strong ones.
use blochwave::material::TwoBandTightBinding;
use blochwave::regimes::{ponderomotive_ema, ponderomotive_tight_binding};

fn main() {
    let two = TwoBandTightBinding::sio2_gamma_m();
    let gap = two.gap_band();
    let mass = gap.effective_mass_at(0.0);
    let hw = 1.65;
    for f0 in [0.01, 0.1, 0.5, 1.0, 3.0, 10.0] {
        let tb = ponderomotive_tight_binding(&gap.eps, gap.a, f0, hw, two.eg);
        println!("F0 {f0:5.2}: Up(TB) {tb:8.4} eV  Up(EMA) {:10.4} eV", ponderomotive_ema(f0, hw, 0.0, mass));
    }
    println!("strong-field limit eps_0 - Eg = {:.4} eV", gap.eps[0] - two.eg);
}
