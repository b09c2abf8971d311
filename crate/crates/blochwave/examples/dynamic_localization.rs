//! Net drift per cycle of a nearest-neighbour band tracks J0(γ_DL).
use blochwave::band::TightBinding;
use blochwave::intraband::{cycle_drift, weak_field_drift};
use blochwave::special::{j0, J0_ROOTS};

fn main() -> blochwave::Result<()> {
    let band = TightBinding::nearest_neighbor(5.0, 1.0, -0.8);
    let (k0, hw) = (0.3, 1.6);
    let scale = weak_field_drift(&band, k0, hw);
    for g in [0.5, 1.0, 2.0, J0_ROOTS[0], 4.0, J0_ROOTS[1]] {
        let d = cycle_drift(&band, k0, g, hw)?;
        println!("gamma_DL {g:8.5}: drift/weak {:+.6}   J0 {:+.6}", d / scale, j0(g));
    }
    Ok(())
}
