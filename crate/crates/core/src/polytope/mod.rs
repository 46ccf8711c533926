//! Lattice polytopes, reflexivity and polar duality.

mod io;
mod normal_form;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{convex_hull, Facet, IntegerMatrix, LatticeVector, RationalPolyhedron};

pub use io::{emit_palp, parse_palp, read_jsonl, write_jsonl, PalpParse, PolytopeRecord};
pub use normal_form::{canonical_points, frame_transform, normal_form, NormalForm};
pub(crate) use normal_form::{minimal_frames, subsets};

/// Full-dimensional polytope with integral vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    hull: RationalPolyhedron,
    vertices: Vec<LatticeVector>,
}

impl LatticePolytope {
    /// Convex hull of the given lattice points.
    pub fn new(points: &[LatticeVector]) -> Result<Self> {
        let hull = convex_hull(points)?;
        let vertices = hull.lattice_vertices().ok_or(Error::NotLattice)?;
        Ok(Self { hull, vertices })
    }

    pub fn from_i64(points: &[&[i64]]) -> Result<Self> {
        let pts: Vec<LatticeVector> = points.iter().map(|p| LatticeVector::from_i64(p)).collect();
        Self::new(&pts)
    }

    pub fn from_polyhedron(hull: RationalPolyhedron) -> Result<Self> {
        let vertices = hull.lattice_vertices().ok_or(Error::NotLattice)?;
        Ok(Self { hull, vertices })
    }

    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        self.hull.facets()
    }

    /// Indices into [`Self::vertices`] of the vertices on each facet.
    pub fn facet_vertices(&self) -> &[Vec<usize>] {
        self.hull.incidence()
    }

    pub fn polyhedron(&self) -> &RationalPolyhedron {
        &self.hull
    }

    pub fn lattice_points(&self) -> Vec<LatticeVector> {
        self.hull.lattice_points()
    }

    pub fn interior_points(&self) -> Vec<LatticeVector> {
        self.lattice_points()
            .into_iter()
            .filter(|p| self.hull.contains_in_interior(p))
            .collect()
    }

    pub fn boundary_points(&self) -> Vec<LatticeVector> {
        self.lattice_points()
            .into_iter()
            .filter(|p| !self.hull.contains_in_interior(p))
            .collect()
    }

    pub fn normalized_volume(&self) -> BigInt {
        self.hull.normalized_volume_rational().to_integer()
    }

    /// Image under `v -> m v`. Fails if `m` is singular.
    pub fn transform(&self, m: &IntegerMatrix) -> Result<Self> {
        let pts: Vec<LatticeVector> = self.vertices.iter().map(|v| m.mul_vec(v)).collect();
        Self::new(&pts)
    }

    pub fn translate(&self, t: &LatticeVector) -> Result<Self> {
        let pts: Vec<LatticeVector> = self.vertices.iter().map(|v| v + t).collect();
        Self::new(&pts)
    }

    pub fn is_reflexive(&self) -> ReflexivityWitness {
        is_reflexive(self)
    }
}

/// Certificate for [`is_reflexive`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ReflexivityWitness {
    Reflexive,
    /// A facet whose hyperplane does not strictly separate the origin from
    /// the outside.
    OriginNotInterior {
        facet: Facet,
    },
    /// A facet at lattice distance other than 1. When present, an interior
    /// lattice point other than the origin is reported as well.
    NonUnitFacet {
        facet: Facet,
        extra_interior_point: Option<LatticeVector>,
    },
}

impl ReflexivityWitness {
    pub fn is_reflexive(&self) -> bool {
        matches!(self, Self::Reflexive)
    }
}

pub fn is_reflexive(p: &LatticePolytope) -> ReflexivityWitness {
    if let Some(f) = p.facets().iter().find(|f| !f.offset.is_positive()) {
        return ReflexivityWitness::OriginNotInterior { facet: f.clone() };
    }
    if let Some(f) = p.facets().iter().find(|f| !f.offset.is_one()) {
        let origin = LatticeVector::zero(p.dim());
        let extra = p.interior_points().into_iter().find(|x| *x != origin);
        return ReflexivityWitness::NonUnitFacet {
            facet: f.clone(),
            extra_interior_point: extra,
        };
    }
    ReflexivityWitness::Reflexive
}

/// A reflexive polytope together with its polar dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflexivePolytope {
    base: LatticePolytope,
    dual: LatticePolytope,
    boundary_points: Vec<LatticeVector>,
}

impl ReflexivePolytope {
    pub fn new(base: LatticePolytope) -> Result<Self> {
        let w = is_reflexive(&base);
        if !w.is_reflexive() {
            return Err(Error::NotReflexive(w));
        }
        let normals: Vec<LatticeVector> = base.facets().iter().map(|f| f.normal.clone()).collect();
        let dual = LatticePolytope::new(&normals)?;
        let boundary_points = base.boundary_points();
        Ok(Self {
            base,
            dual,
            boundary_points,
        })
    }

    pub fn from_points(points: &[LatticeVector]) -> Result<Self> {
        Self::new(LatticePolytope::new(points)?)
    }

    pub fn from_i64(points: &[&[i64]]) -> Result<Self> {
        Self::new(LatticePolytope::from_i64(points)?)
    }

    pub fn base(&self) -> &LatticePolytope {
        &self.base
    }

    pub fn dual(&self) -> &LatticePolytope {
        &self.dual
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn vertices(&self) -> &[LatticeVector] {
        self.base.vertices()
    }

    /// Lattice points of the boundary, i.e. all lattice points except the origin.
    pub fn boundary_points(&self) -> &[LatticeVector] {
        &self.boundary_points
    }

    pub fn polar_dual(&self) -> ReflexivePolytope {
        let boundary_points = self.dual.boundary_points();
        ReflexivePolytope {
            base: self.dual.clone(),
            dual: self.base.clone(),
            boundary_points,
        }
    }
}

/// Polar dual `{m : <m, v> >= -1 for all v in P}`.
pub fn polar_dual(p: &ReflexivePolytope) -> ReflexivePolytope {
    p.polar_dual()
}

/// Polar of any polytope containing the origin in its interior, computed from
/// the inequality description. Used as an independent check of [`polar_dual`].
pub fn polar_by_inequalities(p: &LatticePolytope) -> Result<RationalPolyhedron> {
    let facets: Vec<Facet> = p
        .vertices()
        .iter()
        .map(|v| Facet {
            normal: v.primitive(),
            offset: BigRational::new(BigInt::one(), v.content()),
        })
        .collect();
    RationalPolyhedron::from_facets(p.dim(), &facets)
}

/// The cube `[-1, 1]^3`.
pub fn cube() -> LatticePolytope {
    let mut v = Vec::new();
    for x in [-1, 1] {
        for y in [-1, 1] {
            for z in [-1, 1] {
                v.push(LatticeVector::from_i64(&[x, y, z]));
            }
        }
    }
    LatticePolytope::new(&v).expect("cube is full-dimensional")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lv;

    fn p3() -> LatticePolytope {
        LatticePolytope::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]]).unwrap()
    }

    #[test]
    fn reflexivity_examples() {
        // the facet through e1, e2, e3 is x+y+z <= 1; the other three are
        // e.g. x - ... solved by hand: normals (-3,1,1), (1,-3,1), (1,1,-3)
        let p = p3();
        assert!(p.is_reflexive().is_reflexive());
        let normals: Vec<_> = p.facets().iter().map(|f| f.normal.clone()).collect();
        let mut expected = vec![
            lv(&[-1, -1, -1]),
            lv(&[-1, -1, 3]),
            lv(&[-1, 3, -1]),
            lv(&[3, -1, -1]),
        ];
        expected.sort();
        assert_eq!(normals, expected);
        assert!(cube().is_reflexive().is_reflexive());
        let corner =
            LatticePolytope::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert!(matches!(
            corner.is_reflexive(),
            ReflexivityWitness::OriginNotInterior { .. }
        ));
        let big = LatticePolytope::from_i64(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2], &[-2, -2, -2]])
            .unwrap();
        match big.is_reflexive() {
            ReflexivityWitness::NonUnitFacet {
                extra_interior_point: Some(x),
                ..
            } => assert!(!x.is_zero()),
            w => panic!("{w:?}"),
        }
    }

    #[test]
    fn cube_dual_is_octahedron() {
        let c = ReflexivePolytope::new(cube()).unwrap();
        let d = c.polar_dual();
        let mut oct = [
            lv(&[1, 0, 0]),
            lv(&[-1, 0, 0]),
            lv(&[0, 1, 0]),
            lv(&[0, -1, 0]),
            lv(&[0, 0, 1]),
            lv(&[0, 0, -1]),
        ];
        oct.sort();
        assert_eq!(d.vertices(), &oct[..]);
        assert_eq!(d.polar_dual(), c);
    }

    #[test]
    fn p3_dual_volume() {
        let p = ReflexivePolytope::new(p3()).unwrap();
        assert_eq!(p.dual().normalized_volume(), BigInt::from(64));
        let by_ineq = polar_by_inequalities(p.base()).unwrap();
        assert_eq!(&by_ineq, p.dual().polyhedron());
    }

    #[test]
    fn p1113_involution() {
        let p = ReflexivePolytope::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -3]])
            .unwrap();
        assert_eq!(p.polar_dual().polar_dual(), p);
        assert_eq!(p.boundary_points().len(), 5);
    }
}
