//! Intersection numbers and numerical invariants of complete toric threefolds.

mod invariants;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::lattice::{
    integer_kernel, lattice_basis, smith_normal_form, Facet, IntegerMatrix, LatticeVector,
    RationalPolyhedron,
};

pub use invariants::{
    invariants, is_almost_fano, model_invariants, pseudo_index_of_model, ToricInvariants,
};

/// The torus-invariant curve of an interior 2-face of a smooth fan.
///
/// `relation` is indexed by rays and satisfies `sum relation[r] * u_r = 0`
/// with coefficient 1 on both outer rays; its entries are the intersection
/// numbers `D_r . C`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wall {
    pub wall_rays: (usize, usize),
    pub outer_rays: (usize, usize),
    pub relation: Vec<BigInt>,
}

impl Wall {
    /// `-K . C`, the sum of the relation coefficients.
    pub fn degree(&self) -> BigInt {
        self.relation.iter().sum()
    }

    pub fn is_flop(&self) -> bool {
        let m1 = BigInt::from(-1);
        self.relation[self.wall_rays.0] == m1 && self.relation[self.wall_rays.1] == m1
    }
}

impl Serialize for Wall {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rel: Option<Vec<i64>> = self.relation.iter().map(ToPrimitive::to_i64).collect();
        let rel = rel.ok_or_else(|| serde::ser::Error::custom("relation exceeds i64 range"))?;
        let mut st = serializer.serialize_struct("Wall", 4)?;
        st.serialize_field("wall_rays", &self.wall_rays)?;
        st.serialize_field("outer_rays", &self.outer_rays)?;
        st.serialize_field("relation", &rel)?;
        st.serialize_field("degree", &self.degree().to_i64())?;
        st.end()
    }
}

pub(crate) fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow)
}

fn require_smooth3(fan: &Fan) -> Result<()> {
    if fan.dim() != 3 {
        return Err(Error::NotThreeDimensional);
    }
    if !fan.is_smooth() {
        return Err(Error::NotSmooth);
    }
    Ok(())
}

/// All walls of a smooth complete threefold fan, ordered by wall rays.
pub fn walls(fan: &Fan) -> Result<Vec<Wall>> {
    require_smooth3(fan)?;
    let mut faces: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for c in fan.cones() {
        let r = c.rays();
        for (a, b, o) in [(r[0], r[1], r[2]), (r[0], r[2], r[1]), (r[1], r[2], r[0])] {
            faces.entry((a, b)).or_default().push(o);
        }
    }
    let u = fan.rays();
    let mut out = Vec::with_capacity(faces.len());
    for ((i, j), outer) in faces {
        if outer.len() != 2 {
            return Err(Error::InvalidFan(format!(
                "2-face ({i},{j}) is not shared by two cones"
            )));
        }
        let (k, l) = (outer[0].min(outer[1]), outer[0].max(outer[1]));
        // u_l = a u_i + b u_j + c u_k in the unimodular basis (u_i, u_j, u_k)
        let basis = IntegerMatrix::from_columns(&[u[i].clone(), u[j].clone(), u[k].clone()], 3);
        let inv = basis.unimodular_inverse().ok_or(Error::NotSmooth)?;
        let coef = inv.mul_vec(&u[l]);
        if coef[2] != BigInt::from(-1) {
            return Err(Error::InvalidFan(format!(
                "cones at 2-face ({i},{j}) do not lie on opposite sides"
            )));
        }
        let mut relation = vec![BigInt::zero(); u.len()];
        relation[i] = -&coef[0];
        relation[j] = -&coef[1];
        relation[k] = BigInt::one();
        relation[l] = BigInt::one();
        out.push(Wall {
            wall_rays: (i, j),
            outer_rays: (k, l),
            relation,
        });
    }
    Ok(out)
}

/// `-K . C` for the curve of a wall.
pub fn anticanonical_degree(w: &Wall) -> BigInt {
    w.degree()
}

/// Minimum positive anticanonical degree of a wall curve on an almost Fano
/// smooth fan.
pub fn pseudo_index(fan: &Fan) -> Result<i64> {
    let ws = walls(fan)?;
    if ws.iter().any(|w| w.degree().is_negative()) {
        return Err(Error::NotAlmostFano);
    }
    if anticanonical_cube_intersection(fan)? <= 0 {
        return Err(Error::NotAlmostFano);
    }
    let min = ws
        .iter()
        .map(Wall::degree)
        .filter(|d| d.is_positive())
        .min()
        .ok_or(Error::NoPositiveCurve)?;
    to_i64(&min)
}

pub fn class_group_rank(fan: &Fan) -> usize {
    fan.rays().len() - fan.dim()
}

/// Lattice of torus-invariant Cartier divisors, as a Hermite basis of
/// coefficient vectors `a` (the divisor `sum a_r D_r`).
pub fn cartier_lattice(fan: &Fan) -> Vec<LatticeVector> {
    let n = fan.rays().len();
    let d = fan.dim();
    let cones = fan.cones();
    // unknowns: a (n entries), then m_sigma (d entries per cone)
    let cols = n + d * cones.len();
    let mut rows: Vec<LatticeVector> = Vec::new();
    for (s, c) in cones.iter().enumerate() {
        for &r in c.rays() {
            let mut row = vec![BigInt::zero(); cols];
            row[r] = BigInt::one();
            for k in 0..d {
                row[n + d * s + k] = fan.ray(r)[k].clone();
            }
            rows.push(LatticeVector::new(row));
        }
    }
    let kernel = integer_kernel(&IntegerMatrix::from_rows(&rows));
    let projected: Vec<LatticeVector> = kernel
        .iter()
        .map(|v| LatticeVector::new(v.coords()[..n].to_vec()))
        .collect();
    lattice_basis(&projected, n)
}

/// Rank of the Picard group: Cartier divisors modulo principal ones.
pub fn picard_rank(fan: &Fan) -> usize {
    if fan.is_simplicial() {
        return fan.rays().len() - fan.dim();
    }
    cartier_lattice(fan).len() - fan.dim()
}

/// Coordinates of `x` in an echelon (Hermite) basis, if `x` is in its span
/// over `Z`.
pub(crate) fn coordinates_in(basis: &[LatticeVector], x: &LatticeVector) -> Option<Vec<BigInt>> {
    let mut residual = x.clone();
    let mut coords = Vec::with_capacity(basis.len());
    for b in basis {
        let p = b.coords().iter().position(|c| !c.is_zero())?;
        let (q, rem) = residual[p].div_rem(&b[p]);
        if !rem.is_zero() {
            return None;
        }
        residual = &residual - &b.scale(&q);
        coords.push(q);
    }
    residual.is_zero().then_some(coords)
}

/// Divisibility of the class of `-K` in the Picard group.
pub fn fano_index(fan: &Fan) -> Result<i64> {
    let n = fan.rays().len();
    let d = fan.dim();
    let basis = cartier_lattice(fan);
    let k = basis.len();
    let anti = LatticeVector::new(vec![BigInt::one(); n]);
    let x = coordinates_in(&basis, &anti).ok_or(Error::NotGorenstein)?;
    // principal divisors div(chi^m) = sum <m, u_r> D_r for m = e_1..e_d
    let principal: Vec<LatticeVector> = (0..d)
        .map(|i| {
            let p = LatticeVector::new(fan.rays().iter().map(|u| u[i].clone()).collect());
            LatticeVector::new(coordinates_in(&basis, &p).expect("principal divisors are Cartier"))
        })
        .collect();
    let s = smith_normal_form(&IntegerMatrix::from_rows(&principal));
    // rows of C span the relations; columns change by V, so x -> x V
    let xv: Vec<BigInt> = (0..k)
        .map(|j| (0..k).map(|i| &x[i] * &s.v[(i, j)]).sum())
        .collect();
    let factors = s.invariant_factors();
    let rank = s.rank();
    let free = xv[rank..].iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if free.is_zero() {
        return Err(Error::Inconsistent("anticanonical class is torsion".into()));
    }
    // largest r dividing the free part that is compatible with torsion
    let mut r = free.clone();
    loop {
        let ok = (0..rank).all(|i| {
            let g = r.gcd(&factors[i]);
            (&xv[i] % &g).is_zero()
        });
        if ok {
            break;
        }
        r -= 1;
        while !(&free % &r).is_zero() {
            r -= 1;
        }
    }
    to_i64(&r)
}

/// The polytope `{m : <m, u_r> >= -1}` of the anticanonical divisor.
pub fn anticanonical_polytope(fan: &Fan) -> Result<RationalPolyhedron> {
    let facets: Vec<Facet> = fan
        .rays()
        .iter()
        .map(|u| Facet {
            normal: u.clone(),
            offset: BigRational::one(),
        })
        .collect();
    RationalPolyhedron::from_facets(fan.dim(), &facets)
}

/// Per-cone solution of `<m, u> = -1` on the cone's rays; `None` if a cone
/// admits none.
pub(crate) fn anticanonical_functionals(fan: &Fan) -> Option<Vec<Vec<BigRational>>> {
    let d = fan.dim();
    fan.cones()
        .iter()
        .map(|c| {
            let gens = fan.cone_rays(c);
            let basis: Vec<LatticeVector> = {
                let mut b: Vec<LatticeVector> = Vec::new();
                for g in &gens {
                    let mut t = b.clone();
                    t.push(g.clone());
                    if IntegerMatrix::from_rows(&t).rank() == t.len() {
                        b = t;
                    }
                }
                b
            };
            let bm = IntegerMatrix::from_rows(&basis);
            let det = bm.det();
            let num = bm
                .adjugate()
                .mul_vec(&LatticeVector::new(vec![BigInt::from(-1); d]));
            let m: Vec<BigRational> = num
                .coords()
                .iter()
                .map(|x| BigRational::new(x.clone(), det.clone()))
                .collect();
            let consistent = gens.iter().all(|g| {
                let v: BigRational = g
                    .coords()
                    .iter()
                    .zip(&m)
                    .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                    .sum();
                v == BigRational::from_integer(BigInt::from(-1))
            });
            consistent.then_some(m)
        })
        .collect()
}

/// Whether `-K` is nef: every per-cone functional satisfies `<m, u> >= -1`
/// on all rays.
pub fn anticanonical_is_nef(fan: &Fan) -> bool {
    let Some(ms) = anticanonical_functionals(fan) else {
        return false;
    };
    let minus_one = BigRational::from_integer(BigInt::from(-1));
    ms.iter().all(|m| {
        fan.rays().iter().all(|u| {
            let v: BigRational = u
                .coords()
                .iter()
                .zip(m)
                .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                .sum();
            v >= minus_one
        })
    })
}

/// `(-K)^3` as `3!` times the volume of the anticanonical polytope.
pub fn anticanonical_cube_volume(fan: &Fan) -> Result<i64> {
    if fan.dim() != 3 {
        return Err(Error::NotThreeDimensional);
    }
    if !anticanonical_is_nef(fan) {
        return Err(Error::NotNef);
    }
    let p = anticanonical_polytope(fan)?;
    let v = p.normalized_volume_rational();
    if !v.is_integer() {
        return Err(Error::NotGorenstein);
    }
    to_i64(&v.to_integer())
}

/// `(-K)^3` by expanding `(sum D_r)^3` with toric intersection numbers.
pub fn anticanonical_cube_intersection(fan: &Fan) -> Result<i64> {
    let ws = walls(fan)?;
    let n = fan.rays().len();
    let mut pair: BTreeMap<(usize, usize), &Wall> = BTreeMap::new();
    for w in &ws {
        pair.insert(w.wall_rays, w);
    }
    // D_a^2 D_c for a != c
    let sq = |a: usize, c: usize| -> BigInt {
        match pair.get(&(a.min(c), a.max(c))) {
            Some(w) => w.relation[a].clone(),
            None => BigInt::zero(),
        }
    };
    let mut total = BigInt::zero();
    // distinct triples spanning a cone
    total += BigInt::from(6 * fan.cones().len());
    for a in 0..n {
        for c in 0..n {
            if a != c {
                total += sq(a, c) * 3;
            }
        }
    }
    for a in 0..n {
        let cone = fan
            .cones()
            .iter()
            .find(|c| c.contains_ray(a))
            .expect("every ray lies in a cone");
        let rows = fan.cone_rays(cone);
        let inv = IntegerMatrix::from_rows(&rows)
            .unimodular_inverse()
            .ok_or(Error::NotSmooth)?;
        let pos = cone
            .rays()
            .iter()
            .position(|&r| r == a)
            .expect("ray in cone");
        // <m, u_a> = 1 and <m, u> = 0 on the other rays of the cone
        let m = inv.column(pos);
        let mut cube = BigInt::zero();
        for r in 0..n {
            if r != a {
                cube -= m.dot(fan.ray(r)) * sq(a, r);
            }
        }
        total += cube;
    }
    to_i64(&total)
}
