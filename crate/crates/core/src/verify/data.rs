//! Curated fans and polytopes.

use crate::error::Result;
use crate::fan::{face_fan, Fan};
use crate::lattice::{IntegerMatrix, LatticeVector};
use crate::polytope::{cube, LatticePolytope, ReflexivePolytope};

/// Cones of a bundle whose rays 0..3 form a `P2` fan and rays 3, 4 a `P1` fan
/// (in either role: `P1`-bundle over `P2` or `P2`-bundle over `P1`).
const BUNDLE_CONES: [&[usize]; 6] = [
    &[0, 1, 3],
    &[1, 2, 3],
    &[0, 2, 3],
    &[0, 1, 4],
    &[1, 2, 4],
    &[0, 2, 4],
];

fn bundle(rays: [[i64; 3]; 5]) -> Fan {
    let r: Vec<&[i64]> = rays.iter().map(|x| x.as_slice()).collect();
    Fan::from_i64(&r, &BUNDLE_CONES).expect("bundle fans are complete")
}

/// `P(O + O(a))` over `P2`.
pub fn p1_bundle_over_p2(a: i64) -> Fan {
    bundle([[1, 0, 0], [0, 1, 0], [-1, -1, a], [0, 0, 1], [0, 0, -1]])
}

/// `P(O + O(a) + O(b))` over `P1`.
pub fn p2_bundle_over_p1(a: i64, b: i64) -> Fan {
    bundle([[1, 0, 0], [0, 1, 0], [-1, -1, 0], [0, 0, 1], [a, b, -1]])
}

/// The fan of `P(O + O(3))` over `P2`, the start of the blowup search.
pub fn bundle_o3() -> Fan {
    p1_bundle_over_p2(3)
}

pub fn p3() -> Fan {
    face_fan(&weighted_projective_space(&[1, 1, 1, 1]))
}

pub fn p1_cubed() -> Fan {
    face_fan(&octahedron())
}

/// Fan of a smooth toric Fano threefold, which is the face fan of the hull
/// of its rays.
fn fano_from_rays(rays: &[&[i64]]) -> Fan {
    face_fan(&ReflexivePolytope::from_i64(rays).expect("Fano ray hulls are reflexive"))
}

/// Smooth complete fans: toric Fano threefolds and three almost Fano bundles.
pub fn curated_fans() -> Vec<(&'static str, Fan)> {
    vec![
        ("p3", p3()),
        ("p1xp2", p2_bundle_over_p1(0, 0)),
        // P(O + O(1)) over P2
        ("bl_point_p3", p1_bundle_over_p2(1)),
        ("p_o_o2_over_p2", p1_bundle_over_p2(2)),
        ("bl_line_p3", p2_bundle_over_p1(1, 0)),
        ("p1xp1xp1", p1_cubed()),
        (
            "p1xf1",
            fano_from_rays(&[
                &[1, 0, 0],
                &[-1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[0, -1, -1],
                &[0, 1, 1],
            ]),
        ),
        (
            "s6xp1",
            fano_from_rays(&[
                &[1, 0, 0],
                &[-1, 0, 0],
                &[0, 1, 0],
                &[0, 1, 1],
                &[0, 0, 1],
                &[0, -1, 0],
                &[0, -1, -1],
                &[0, 0, -1],
            ]),
        ),
        (
            "p_o_o11_over_p1xp1",
            fano_from_rays(&[
                &[1, 0, 0],
                &[0, 1, 0],
                &[-1, 0, 1],
                &[0, -1, 1],
                &[0, 0, 1],
                &[0, 0, -1],
            ]),
        ),
        ("bundle_a", p2_bundle_over_p1(1, 1)),
        ("bundle_b", p2_bundle_over_p1(2, 0)),
        ("p_o_o3_over_p2", bundle_o3()),
    ]
}

/// Simplex whose face fan is the weighted projective space with the given
/// weights: rays `e_1, .., e_n` and `-(w_1 e_1 + .. + w_n e_n) / w_0`.
pub fn weighted_projective_space(w: &[i64; 4]) -> ReflexivePolytope {
    assert_eq!(w[0], 1, "first weight must be one");
    ReflexivePolytope::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-w[1], -w[2], -w[3]]])
        .expect("Gorenstein weighted projective spaces are reflexive")
}

pub fn octahedron() -> ReflexivePolytope {
    let mut v = Vec::new();
    for i in 0..3 {
        v.push(LatticeVector::unit(3, i));
        v.push(-&LatticeVector::unit(3, i));
    }
    ReflexivePolytope::from_points(&v).expect("octahedron is reflexive")
}

/// The quadric cone in `P4`. Its anticanonical polytope is three times the
/// pyramid over the unit square (the polytope of `O(1)`), recentered at its
/// unique interior point; the face fan lives on the dual.
pub fn quadric_cone() -> Result<ReflexivePolytope> {
    let pyramid =
        LatticePolytope::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1]])?;
    let scaled = pyramid.transform(&IntegerMatrix::from_i64(3, 3, &[3, 0, 0, 0, 3, 0, 0, 0, 3]))?;
    let interior = scaled.interior_points();
    if interior.len() != 1 {
        return Err(crate::error::Error::Inconsistent(format!(
            "scaled pyramid has {} interior points",
            interior.len()
        )));
    }
    let centered = scaled.translate(&-&interior[0])?;
    Ok(ReflexivePolytope::new(centered)?.polar_dual())
}

/// Reflexive polytopes: Gorenstein weighted projective spaces, the cube, the
/// quadric cone, and the ray hulls of the curated fans.
pub fn curated_polytopes() -> Result<Vec<(String, ReflexivePolytope)>> {
    let mut out: Vec<(String, ReflexivePolytope)> = vec![
        ("p1113".into(), weighted_projective_space(&[1, 1, 1, 3])),
        ("p1146".into(), weighted_projective_space(&[1, 1, 4, 6])),
        ("p1122".into(), weighted_projective_space(&[1, 1, 2, 2])),
        ("p1124".into(), weighted_projective_space(&[1, 1, 2, 4])),
        ("p1236".into(), weighted_projective_space(&[1, 2, 3, 6])),
        ("cube".into(), ReflexivePolytope::new(cube())?),
        ("octahedron".into(), octahedron()),
        ("quadric_cone".into(), quadric_cone()?),
    ];
    for (name, fan) in curated_fans() {
        if name == "p1xp1xp1" {
            continue;
        }
        out.push((
            format!("hull_{name}"),
            ReflexivePolytope::from_points(fan.rays())?,
        ));
    }
    Ok(out)
}
