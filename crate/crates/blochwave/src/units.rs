//! Unit system: energies in eV, times in fs, lengths in Å, fields in V/Å.
//!
//! The elementary charge is fixed to 1, so a field in V/Å times a length in Å
//! is an energy in eV, and a vector potential in V·fs/Å divided by ħ is a
//! wavenumber in Å⁻¹.

/// Reduced Planck constant, eV·fs.
pub const HBAR: f64 = 0.6582119569;

/// ħ²/m0 for the free-electron mass, eV·Å².
pub const HBAR2_OVER_M0: f64 = 7.6199682;

/// ħ/m0, Å²/fs.
pub const HBAR_OVER_M0: f64 = HBAR2_OVER_M0 / HBAR;

/// hc in eV·nm, used to convert vacuum wavelengths to photon energies.
pub const HC_EV_NM: f64 = 1239.841984;

/// Photon energy (eV) of a vacuum wavelength given in nm.
pub fn photon_energy_from_wavelength_nm(lambda_nm: f64) -> f64 {
    HC_EV_NM / lambda_nm
}

/// Angular frequency (rad/fs) of a photon energy in eV.
pub fn angular_frequency(hbar_omega: f64) -> f64 {
    hbar_omega / HBAR
}

/// The constant set shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Constants {
    pub hbar: f64,
    pub hbar2_over_m0: f64,
    pub elementary_charge: f64,
}

pub const CONSTANTS: Constants = Constants {
    hbar: HBAR,
    hbar2_over_m0: HBAR2_OVER_M0,
    elementary_charge: 1.0,
};
