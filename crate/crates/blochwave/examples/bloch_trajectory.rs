//! Wavepacket in the SiO2 conduction band versus the parabolic approximation.
use blochwave::band::BandDispersion;
use blochwave::intraband::{relative_rms_difference, trajectory};
use blochwave::material::TwoBandTightBinding;
use blochwave::pulse::PulseSpec;
use blochwave::units::photon_energy_from_wavelength_nm;

fn main() -> blochwave::Result<()> {
    let tb = TwoBandTightBinding::sio2_gamma_m().conduction;
    let ema = BandDispersion::Ema { mass: tb.effective_mass_at(0.0) };
    let band = BandDispersion::TightBinding(tb);
    let hw = photon_energy_from_wavelength_nm(750.0);
    for f0 in [0.05, 0.2, 1.0] {
        let p = PulseSpec::sine_square(f0, hw, 10.0);
        let n = 2001;
        let a = trajectory(&band, 0.0, &p, n)?;
        let b = trajectory(&ema, 0.0, &p, n)?;
        let max_dx = a.dx.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        println!("F0 {f0:4.2} V/A: RMS velocity difference {:6.2}%, max |dx| {max_dx:.2} A", 100.0 * relative_rms_difference(&a.v, &b.v));
    }
    Ok(())
}
