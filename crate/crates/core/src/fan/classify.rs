use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{Cone, Fan};
use crate::error::{Error, Result};
use crate::lattice::{convex_hull, IntegerMatrix, LatticeVector};

/// Singularity type of a three-dimensional cone, strongest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConeClass {
    Smooth,
    GorensteinTerminal,
    GorensteinCanonical,
    NonGorenstein,
}

impl ConeClass {
    pub fn is_smooth(self) -> bool {
        self == Self::Smooth
    }

    pub fn is_terminal(self) -> bool {
        self <= Self::GorensteinTerminal
    }

    pub fn is_gorenstein(self) -> bool {
        self <= Self::GorensteinCanonical
    }
}

/// Integral `m` with `<m, u> = 1` on every generator, if one exists.
pub(crate) fn gorenstein_functional(gens: &[LatticeVector]) -> Option<LatticeVector> {
    let dim = gens[0].dim();
    let basis: Vec<LatticeVector> = {
        let mut b: Vec<LatticeVector> = Vec::new();
        for g in gens {
            let mut t = b.clone();
            t.push(g.clone());
            if IntegerMatrix::from_rows(&t).rank() == t.len() {
                b = t;
            }
        }
        b
    };
    if basis.len() < dim {
        return None;
    }
    // rows of B are the basis vectors, so B m = 1 gives m = adj(B) 1 / det B
    let b = IntegerMatrix::from_rows(&basis);
    let det = b.det();
    let num = b
        .adjugate()
        .mul_vec(&LatticeVector::new(vec![BigInt::one(); dim]));
    let m: Vec<BigRational> = num
        .coords()
        .iter()
        .map(|x| BigRational::new(x.clone(), det.clone()))
        .collect();
    if !m.iter().all(|x| x.is_integer()) {
        return None;
    }
    let m = LatticeVector::new(m.iter().map(|x| x.to_integer()).collect());
    gens.iter().all(|g| m.dot(g).is_one()).then_some(m)
}

/// Lattice points of `conv(gens)` where all generators sit at height 1.
pub(crate) fn height_one_points(
    gens: &[LatticeVector],
    m: &LatticeVector,
) -> Result<Vec<LatticeVector>> {
    let mut pts = gens.to_vec();
    pts.push(LatticeVector::zero(m.dim()));
    let pyramid = convex_hull(&pts)?;
    Ok(pyramid
        .lattice_points()
        .into_iter()
        .filter(|p| m.dot(p).is_one())
        .collect())
}

/// Classifies maximal cone `c` of a three-dimensional fan.
pub fn classify_cone(fan: &Fan, c: &Cone) -> Result<ConeClass> {
    let gens = fan.cone_rays(c);
    if fan.dim() != 3 || gens.len() < 3 || IntegerMatrix::from_rows(&gens).rank() != 3 {
        return Err(Error::NotThreeDimensional);
    }
    if fan.cone_is_smooth(c) {
        return Ok(ConeClass::Smooth);
    }
    let Some(m) = gorenstein_functional(&gens) else {
        return Ok(ConeClass::NonGorenstein);
    };
    let pts = height_one_points(&gens, &m)?;
    debug_assert!(!pts.iter().any(|p| p.is_zero()));
    if pts.len() == gens.len() {
        Ok(ConeClass::GorensteinTerminal)
    } else {
        Ok(ConeClass::GorensteinCanonical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lv;

    fn single_cone(rays: &[&[i64]]) -> (Fan, Cone) {
        let f = Fan::from_parts(
            rays.iter().map(|r| lv(r)).collect(),
            vec![(0..rays.len()).collect()],
        );
        let c = f.cones()[0].clone();
        (f, c)
    }

    #[test]
    fn examples() {
        let (f, c) = single_cone(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(classify_cone(&f, &c).unwrap(), ConeClass::Smooth);

        let (f, c) = single_cone(&[&[1, 0, 0], &[0, 1, 0], &[-1, -1, -3]]);
        assert_eq!(
            classify_cone(&f, &c).unwrap(),
            ConeClass::GorensteinCanonical
        );
        // brute-force oracle: the height-one triangle contains (0,0,-1)
        let m = gorenstein_functional(&f.cone_rays(&c)).unwrap();
        assert_eq!(m.dot(&lv(&[0, 0, -1])), BigInt::one());

        // m would have to be (1, 1, -1/2)
        let (f, c) = single_cone(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]);
        assert_eq!(classify_cone(&f, &c).unwrap(), ConeClass::NonGorenstein);

        // cone over a unit square at height one: terminal, not smooth
        let (f, c) = single_cone(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 1], &[0, 0, 1]]);
        assert_eq!(
            classify_cone(&f, &c).unwrap(),
            ConeClass::GorensteinTerminal
        );

        let (f, c) = single_cone(&[&[1, 0, 0], &[0, 1, 0]]);
        assert!(matches!(
            classify_cone(&f, &c),
            Err(Error::NotThreeDimensional)
        ));
    }
}
