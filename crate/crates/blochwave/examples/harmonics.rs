//! Intraband harmonics of the SiO2 conduction band.
use blochwave::band::BandDispersion;
use blochwave::intraband::hhg_spectrum;
use blochwave::material::TwoBandTightBinding;
use blochwave::pulse::PulseSpec;

fn main() -> blochwave::Result<()> {
    let band = BandDispersion::TightBinding(TwoBandTightBinding::sio2_gamma_m().conduction);
    let s = hhg_spectrum(&band, 0.0, &PulseSpec::flat_top(1.0, 1.65, 16.0, 3.0))?;
    let db = s.intensity_db();
    println!("cutoff estimate: order {:.2}", s.cutoff_estimate.unwrap_or(f64::NAN));
    for order in (1..=9).step_by(2) {
        let i = s.orders.iter().position(|&o| o >= order as f64).unwrap_or(0);
        println!("H{order}: {:7.1} dB", db[i]);
    }
    Ok(())
}
