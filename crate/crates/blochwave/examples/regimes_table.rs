//! Regime parameters for every embedded material at 800 nm and 1 V/Å.
use blochwave::band::BandDispersion;
use blochwave::material::materials;
use blochwave::pulse::PulseSpec;
use blochwave::regimes::adiabaticity_report;
use blochwave::units::photon_energy_from_wavelength_nm;

fn main() -> blochwave::Result<()> {
    let hw = photon_energy_from_wavelength_nm(800.0);
    let pulse = PulseSpec::monochromatic(1.0, hw, 0.0, 10.0);
    println!("{:>5} {:>8} {:>8} {:>8} {:>8}  labels", "name", "gamma_K", "gamma_DL", "gamma_RF0", "N~");
    for m in materials() {
        let band = BandDispersion::Ema { mass: m.m_reduced.unwrap_or(0.5) };
        let r = adiabaticity_report(&m, &pulse, &band)?;
        println!("{:>5} {:8.3} {:8.3} {:8.3} {:8}  {}", m.name, r.gamma_k, r.gamma_dl, r.gamma_rf0, r.n_tilde, r.labels.join(","));
    }
    Ok(())
}
