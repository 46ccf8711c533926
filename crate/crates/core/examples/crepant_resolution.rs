//! Smooth crepant resolution of a Gorenstein toric Fano threefold.
use torifan::face_fan;
use torifan::fan::crepant_resolution;
use torifan::geometry::{
    anticanonical_cube_intersection, anticanonical_cube_volume, is_almost_fano,
};
use torifan::verify::data::weighted_projective_space;

fn main() -> torifan::Result<()> {
    let p = weighted_projective_space(&[1, 1, 4, 6]);
    let x = crepant_resolution(&face_fan(&p))?;
    println!(
        "rays: {}, maximal cones: {}",
        x.rays().len(),
        x.cones().len()
    );
    let inv = is_almost_fano(&x)?;
    println!(
        "smooth = {}, almost Fano = {}, pseudo-index = {:?}",
        inv.smooth, inv.almost_fano, inv.pseudo_index
    );
    println!(
        "(-K)^3 by volume = {}, by intersection = {}",
        anticanonical_cube_volume(&x)?,
        anticanonical_cube_intersection(&x)?
    );
    Ok(())
}
