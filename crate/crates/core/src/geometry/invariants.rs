use num_traits::Signed;
use serde::Serialize;

use super::{
    anticanonical_cube_intersection, anticanonical_cube_volume, class_group_rank, fano_index,
    picard_rank, pseudo_index, to_i64, walls, Wall,
};
use crate::error::{Error, Result};
use crate::fan::{classify_cone, crepant_resolution, face_fan, Fan};
use crate::polytope::ReflexivePolytope;

/// Numerical invariants of a complete toric threefold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToricInvariants {
    pub picard_rank: usize,
    pub class_rank: usize,
    pub fano_index: Option<i64>,
    pub pseudo_index: Option<i64>,
    pub degree: i64,
    pub smooth: bool,
    pub q_factorial: bool,
    pub gorenstein: bool,
    pub terminal: bool,
    pub canonical: bool,
    pub fano: bool,
    pub almost_fano: bool,
    /// A wall of negative anticanonical degree, when `-K` is not nef.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_nef_wall: Option<Wall>,
}

/// Invariants of a smooth complete fan. Never fails on smooth input for
/// nefness reasons: a fan that is not almost Fano is reported with
/// `almost_fano = false` and a witness wall.
pub fn is_almost_fano(fan: &Fan) -> Result<ToricInvariants> {
    let ws = walls(fan)?;
    let degree = anticanonical_cube_intersection(fan)?;
    let non_nef_wall = ws.iter().find(|w| w.degree().is_negative()).cloned();
    let nef = non_nef_wall.is_none();
    let almost_fano = nef && degree > 0;
    let fano = ws.iter().all(|w| w.degree().is_positive());
    Ok(ToricInvariants {
        picard_rank: picard_rank(fan),
        class_rank: class_group_rank(fan),
        fano_index: Some(fano_index(fan)?),
        pseudo_index: if almost_fano {
            Some(pseudo_index(fan)?)
        } else {
            None
        },
        degree,
        smooth: true,
        q_factorial: true,
        gorenstein: true,
        terminal: true,
        canonical: true,
        fano,
        almost_fano,
        non_nef_wall,
    })
}

/// Alias of [`is_almost_fano`].
pub fn invariants(fan: &Fan) -> Result<ToricInvariants> {
    is_almost_fano(fan)
}

/// Pseudo-index of the Gorenstein Fano threefold of a reflexive polytope,
/// computed on its crepant resolution.
pub fn pseudo_index_of_model(p: &ReflexivePolytope) -> Result<i64> {
    if p.dim() != 3 {
        return Err(Error::NotThreeDimensional);
    }
    pseudo_index(&crepant_resolution(&face_fan(p))?)
}

/// Invariants of the anticanonical model of a reflexive polytope, i.e. the
/// toric variety of its face fan.
pub fn model_invariants(p: &ReflexivePolytope) -> Result<ToricInvariants> {
    if p.dim() != 3 {
        return Err(Error::NotThreeDimensional);
    }
    let fan = face_fan(p);
    let classes = fan
        .cones()
        .iter()
        .map(|c| classify_cone(&fan, c))
        .collect::<Result<Vec<_>>>()?;
    let degree = to_i64(&p.dual().normalized_volume())?;
    debug_assert_eq!(anticanonical_cube_volume(&fan).ok(), Some(degree));
    Ok(ToricInvariants {
        picard_rank: picard_rank(&fan),
        class_rank: class_group_rank(&fan),
        fano_index: Some(fano_index(&fan)?),
        pseudo_index: Some(pseudo_index_of_model(p)?),
        degree,
        smooth: classes.iter().all(|c| c.is_smooth()),
        q_factorial: fan.is_simplicial(),
        gorenstein: true,
        terminal: classes.iter().all(|c| c.is_terminal()),
        canonical: true,
        fano: true,
        almost_fano: true,
        non_nef_wall: None,
    })
}
