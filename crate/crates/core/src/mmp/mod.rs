//! Toric minimal model program on smooth almost Fano threefolds.

mod pipeline;
mod search;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fan::{blowdown, Fan, FanRecord};
use crate::geometry::{anticanonical_cube_intersection, to_i64, walls, Wall};
use crate::lattice::{extreme_rays, smith_normal_form, IntegerMatrix, LatticeVector};
use crate::polytope::canonical_points;

pub use pipeline::{
    structure_pipeline, structure_pipeline_with_budget, MmpStep, StepKind, StructureResult,
    FLOP_BUDGET,
};
pub use search::{
    enumerate_fixed_point_blowups, model_is_q_factorial, LevelStats, SearchNode, SearchReport,
    Witness,
};

/// A class in the lattice of linear relations among the rays.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveClass {
    pub coefficients: Vec<BigInt>,
}

impl CurveClass {
    pub fn degree(&self) -> BigInt {
        self.coefficients.iter().sum()
    }

    pub fn negative_support(&self) -> Vec<usize> {
        (0..self.coefficients.len())
            .filter(|&i| self.coefficients[i].is_negative())
            .collect()
    }
}

impl Serialize for CurveClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Option<Vec<i64>> = self.coefficients.iter().map(ToPrimitive::to_i64).collect();
        v.ok_or_else(|| serde::ser::Error::custom("coefficient exceeds i64 range"))?
            .serialize(serializer)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RayKind {
    /// Contracts a divisor `P2` with normal bundle `O(-1)` to a smooth point.
    #[serde(rename = "Divisorial_P2_point")]
    DivisorialP2Point,
    Flop,
    FiberType,
    Other,
}

/// An extremal ray of the Mori cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalRay {
    pub generator: CurveClass,
    pub degree: i64,
    pub kind: RayKind,
    /// Indices into [`walls`] of the wall curves whose class lies on this ray.
    pub walls: Vec<usize>,
    /// The ray whose divisor is contracted, for divisorial rays.
    pub contracted_ray: Option<usize>,
}

fn almost_fano_walls(fan: &Fan) -> Result<Vec<Wall>> {
    let ws = walls(fan)?;
    if ws.iter().any(|w| w.degree().is_negative()) || anticanonical_cube_intersection(fan)? <= 0 {
        return Err(Error::NotAlmostFano);
    }
    Ok(ws)
}

/// Extremal rays of the cone of curves, computed by double description on
/// the wall classes. Rays are ordered by their first wall.
pub fn extremal_rays(fan: &Fan) -> Result<Vec<ExtremalRay>> {
    let ws = almost_fano_walls(fan)?;
    let n = fan.rays().len();
    // coordinates: coefficients on the rays outside a fixed smooth cone
    let basis: BTreeSet<usize> = fan.cones()[0].rays().iter().copied().collect();
    let free: Vec<usize> = (0..n).filter(|i| !basis.contains(i)).collect();
    let d = free.len();
    let classes: Vec<LatticeVector> = ws
        .iter()
        .map(|w| LatticeVector::new(free.iter().map(|&i| w.relation[i].clone()).collect()))
        .collect();
    let nef = extreme_rays(&classes, d).ok_or(Error::NotProjective)?;
    let nef_rays: Vec<LatticeVector> = nef.into_iter().map(|r| r.ray).collect();
    if IntegerMatrix::from_rows(&nef_rays).rank() < d {
        return Err(Error::NotProjective);
    }
    let mut groups: Vec<(LatticeVector, Vec<usize>)> = Vec::new();
    for (wi, c) in classes.iter().enumerate() {
        let tight: Vec<LatticeVector> = nef_rays
            .iter()
            .filter(|r| r.dot(c).is_zero())
            .cloned()
            .collect();
        let rank = if tight.is_empty() {
            0
        } else {
            IntegerMatrix::from_rows(&tight).rank()
        };
        if rank + 1 != d {
            continue;
        }
        let p = c.primitive();
        match groups.iter_mut().find(|(q, _)| *q == p) {
            Some((_, members)) => members.push(wi),
            None => groups.push((p, vec![wi])),
        }
    }
    let mut out = Vec::with_capacity(groups.len());
    for (_, members) in groups {
        let gen = members
            .iter()
            .copied()
            .min_by_key(|&wi| ws[wi].degree())
            .expect("nonempty group");
        let w = &ws[gen];
        let generator = CurveClass {
            coefficients: w.relation.clone(),
        };
        let neg = generator.negative_support();
        let (kind, contracted_ray) = match neg.len() {
            0 => (RayKind::FiberType, None),
            1 => {
                let v = neg[0];
                if blowdown(fan, v).is_ok() {
                    (RayKind::DivisorialP2Point, Some(v))
                } else {
                    (RayKind::Other, Some(v))
                }
            }
            _ if w.degree().is_zero() && w.is_flop() => (RayKind::Flop, None),
            _ => (RayKind::Other, None),
        };
        out.push(ExtremalRay {
            degree: to_i64(&w.degree())?,
            generator,
            kind,
            walls: members,
            contracted_ray,
        });
    }
    Ok(out)
}

/// Base of a fiber type contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Base {
    Point,
    P1,
    P2,
    P1xP1,
    F2,
}

impl Base {
    pub fn picard_rank(self) -> usize {
        match self {
            Base::Point => 0,
            Base::P1 | Base::P2 => 1,
            Base::P1xP1 | Base::F2 => 2,
        }
    }

    fn reference_rays(self) -> Vec<LatticeVector> {
        let v = |c: &[&[i64]]| c.iter().map(|x| LatticeVector::from_i64(x)).collect();
        match self {
            Base::Point => Vec::new(),
            Base::P1 => v(&[&[1], &[-1]]),
            Base::P2 => v(&[&[1, 0], &[0, 1], &[-1, -1]]),
            Base::P1xP1 => v(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]),
            Base::F2 => v(&[&[1, 0], &[0, 1], &[-1, 2], &[0, -1]]),
        }
    }

    /// Recognizes a complete smooth base fan from its ray set.
    pub fn recognize(rays: &[LatticeVector]) -> Option<Base> {
        let dim = rays.first().map_or(0, LatticeVector::dim);
        let key = canonical_points(rays);
        [Base::Point, Base::P1, Base::P2, Base::P1xP1, Base::F2]
            .into_iter()
            .find(|b| {
                let r = b.reference_rays();
                r.first().map_or(0, LatticeVector::dim) == dim && canonical_points(&r) == key
            })
    }
}

/// Fiber type contraction: the projection onto the base lattice and the
/// identified base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberContraction {
    pub base: Base,
    /// The base fan: images of the rays and of the maximal cones.
    pub base_fan: FanRecord,
    pub projection: IntegerMatrix,
}

/// Contracts a fiber type extremal ray. The kernel of the projection is the
/// saturated span of the rays with positive coefficient in the ray's walls.
pub fn contract_fiber_type(fan: &Fan, ray: &ExtremalRay) -> Result<FiberContraction> {
    if ray.kind != RayKind::FiberType {
        return Err(Error::NotFiberType);
    }
    let ws = walls(fan)?;
    let mut support: BTreeSet<usize> = BTreeSet::new();
    for &wi in &ray.walls {
        for (r, b) in ws[wi].relation.iter().enumerate() {
            if b.is_positive() {
                support.insert(r);
            }
        }
    }
    let dim = fan.dim();
    let gens: Vec<LatticeVector> = support.iter().map(|&r| fan.ray(r).clone()).collect();
    let s = smith_normal_form(&IntegerMatrix::from_rows(&gens));
    let k = s.rank();
    let base_dim = dim - k;
    // x -> x V; the last dim - k coordinates are the base coordinates
    let mut projection = IntegerMatrix::zeros(base_dim, dim);
    for i in 0..base_dim {
        for j in 0..dim {
            projection[(i, j)] = s.v[(j, k + i)].clone();
        }
    }
    let mut images: BTreeSet<LatticeVector> = BTreeSet::new();
    let mut primitive = true;
    for u in fan.rays() {
        let img = projection.mul_vec(u);
        if img.is_zero() {
            continue;
        }
        primitive &= img.is_primitive();
        images.insert(img);
    }
    let base_rays: Vec<LatticeVector> = images.into_iter().collect();
    let mut base_cones: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in fan.cones() {
        let mut img: Vec<usize> = c
            .rays()
            .iter()
            .filter_map(|&r| {
                base_rays
                    .binary_search(&projection.mul_vec(fan.ray(r)))
                    .ok()
            })
            .collect();
        img.sort_unstable();
        img.dedup();
        if img.len() == base_dim {
            base_cones.insert(img);
        }
    }
    let unrecognized = || Error::UnrecognizedBase {
        dim: base_dim,
        rays: base_rays.iter().filter_map(LatticeVector::to_i64).collect(),
    };
    if !primitive {
        return Err(unrecognized());
    }
    let base = if base_dim == 0 {
        Base::Point
    } else {
        Base::recognize(&base_rays).ok_or_else(unrecognized)?
    };
    Ok(FiberContraction {
        base,
        base_fan: FanRecord {
            rays: base_rays,
            cones: base_cones.into_iter().collect(),
        },
        projection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::star_subdivision;
    use crate::fan::tests::{p1cubed_fan, p3_fan};
    use crate::lattice::lv;

    pub(crate) fn p1113_resolution() -> Fan {
        Fan::from_i64(
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[-1, -1, -3],
                &[0, 0, -1],
            ],
            &[
                &[0, 1, 2],
                &[0, 2, 3],
                &[1, 2, 3],
                &[0, 1, 4],
                &[0, 3, 4],
                &[1, 3, 4],
            ],
        )
        .unwrap()
    }

    #[test]
    fn p3_has_one_ray() {
        let rays = extremal_rays(&p3_fan()).unwrap();
        assert_eq!(rays.len(), 1);
        assert_eq!((rays[0].kind, rays[0].degree), (RayKind::FiberType, 4));
        let c = contract_fiber_type(&p3_fan(), &rays[0]).unwrap();
        assert_eq!(c.base, Base::Point);
    }

    #[test]
    fn blowup_of_p3_rays() {
        let f = star_subdivision(&p3_fan(), &lv(&[1, 1, 1])).unwrap();
        let rays = extremal_rays(&f).unwrap();
        assert_eq!(rays.len(), 2);
        let div: Vec<_> = rays
            .iter()
            .filter(|r| r.kind == RayKind::DivisorialP2Point)
            .collect();
        assert_eq!(div.len(), 1);
        assert_eq!(div[0].degree, 2);
        assert_eq!(div[0].contracted_ray, Some(4));
        // the other ray is the pencil of lines through the point: a P1-bundle over P2
        let other = rays
            .iter()
            .find(|r| r.kind != RayKind::DivisorialP2Point)
            .unwrap();
        assert_eq!(other.kind, RayKind::FiberType);
        let c = contract_fiber_type(&f, other).unwrap();
        assert_eq!(c.base, Base::P2);
        assert_eq!((c.base_fan.rays.len(), c.base_fan.cones.len()), (3, 3));
    }

    #[test]
    fn p1_cubed_rulings() {
        let f = p1cubed_fan();
        let rays = extremal_rays(&f).unwrap();
        assert_eq!(rays.len(), 3);
        for r in &rays {
            assert_eq!(
                (r.kind, r.degree, r.walls.len()),
                (RayKind::FiberType, 2, 4)
            );
            assert_eq!(contract_fiber_type(&f, r).unwrap().base, Base::P1xP1);
        }
    }

    #[test]
    fn projective_bundle_over_p2() {
        let f = p1113_resolution();
        let rays = extremal_rays(&f).unwrap();
        assert_eq!(rays.len(), 2);
        let fiber = rays.iter().find(|r| r.kind == RayKind::FiberType).unwrap();
        assert_eq!(fiber.degree, 2);
        assert_eq!(contract_fiber_type(&f, fiber).unwrap().base, Base::P2);
        let section = rays.iter().find(|r| r.kind != RayKind::FiberType).unwrap();
        assert_eq!((section.kind, section.degree), (RayKind::Other, 0));
    }

    #[test]
    fn base_recognition_is_lattice_invariant() {
        let f2 = [lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, 2]), lv(&[0, -1])];
        let m = IntegerMatrix::from_i64(2, 2, &[2, 1, 1, 1]);
        let moved: Vec<_> = f2.iter().map(|v| m.mul_vec(v)).collect();
        assert_eq!(Base::recognize(&moved), Some(Base::F2));
        let f1 = vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, 1]), lv(&[0, -1])];
        assert_eq!(Base::recognize(&f1), None);
    }
}
