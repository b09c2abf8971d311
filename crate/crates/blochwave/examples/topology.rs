//! Chern numbers of a two-dimensional two-band model and Zak phases of a dimer chain.
use blochwave::geometry::{chern_and_curvature, zak_phase, Band, BlochModel2Band};

fn main() -> blochwave::Result<()> {
    for u in [-3.0, -1.0, 1.0, 3.0] {
        let r = chern_and_curvature(&BlochModel2Band::qi_wu_zhang(u), Band::Lower, 100, 100)?;
        println!("u {u:+}: C = {:+}, residual {:.1e}, sigma_xy {:.3e} S", r.chern, r.residual, r.sigma_xy());
    }
    for (t1, t2) in [(1.0, 0.5), (0.5, 1.0)] {
        println!("dimer chain t1 {t1}, t2 {t2}: Zak phase {:.6}", zak_phase(&BlochModel2Band::ssh(t1, t2, 1.0), Band::Lower, 200)?);
    }
    Ok(())
}
