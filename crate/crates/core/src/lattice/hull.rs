//! Exact convex hulls, facet descriptions and volumes of small-dimensional polytopes.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::cone::extreme_rays;
use super::{IntegerMatrix, LatticeVector};
use crate::error::{Error, Result};

/// Largest ambient dimension accepted anywhere in the crate.
pub const MAX_DIM: usize = 4;

/// Half-space `<normal, x> >= -offset` with a primitive integral normal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Facet {
    pub normal: LatticeVector,
    pub offset: BigRational,
}

impl serde::Serialize for Facet {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Facet", 2)?;
        st.serialize_field("normal", &self.normal)?;
        st.serialize_field("offset", &self.offset.to_string())?;
        st.end()
    }
}

impl Facet {
    /// `<normal, x> + offset`; nonnegative exactly on the closed half-space.
    pub fn slack(&self, x: &LatticeVector) -> BigRational {
        BigRational::from_integer(self.normal.dot(x)) + &self.offset
    }

    pub fn slack_rational(&self, x: &[BigRational]) -> BigRational {
        let mut s = self.offset.clone();
        for (n, xi) in self.normal.coords().iter().zip(x) {
            s += BigRational::from_integer(n.clone()) * xi;
        }
        s
    }
}

/// A bounded polyhedron carrying both its vertex and facet descriptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolyhedron {
    dim: usize,
    generators: Vec<Vec<BigRational>>,
    facets: Vec<Facet>,
    incidence: Vec<Vec<usize>>,
}

fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

fn to_rational_point(v: &LatticeVector) -> Vec<BigRational> {
    v.coords().iter().map(rat).collect()
}

/// Clears denominators so that the rank of a set of rational vectors can be
/// taken over the integers.
fn integral_rows(rows: &[Vec<BigRational>]) -> Vec<LatticeVector> {
    rows.iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            LatticeVector::new(r.iter().map(|x| (x * rat(&l)).to_integer()).collect())
        })
        .collect()
}

fn affine_rank(points: &[&Vec<BigRational>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = points[0];
    let diffs: Vec<Vec<BigRational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    IntegerMatrix::from_rows(&integral_rows(&diffs)).rank()
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn rational_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det *= &pivot;
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            let (top, bottom) = m.split_at_mut(i);
            for (x, y) in bottom[0][c..n].iter_mut().zip(&top[c][c..n]) {
                *x -= y * &f;
            }
        }
    }
    det
}

pub fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    Ok(())
}

/// Convex hull of lattice points. Output vertices and facets are sorted
/// lexicographically; both descriptions are irredundant.
pub fn convex_hull(points: &[LatticeVector]) -> Result<RationalPolyhedron> {
    let dim = points.first().ok_or(Error::DegeneratePolytope)?.dim();
    check_dim(dim)?;
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.dim(),
        });
    }
    let pts: Vec<LatticeVector> = points
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let lifted: Vec<LatticeVector> = pts
        .iter()
        .map(|p| {
            let mut c = p.coords().to_vec();
            c.push(BigInt::one());
            LatticeVector::new(c)
        })
        .collect();
    let rays = extreme_rays(&lifted, dim + 1).ok_or(Error::DegeneratePolytope)?;

    let mut facets: Vec<(Facet, Vec<usize>)> = rays
        .into_iter()
        .map(|r| {
            let coords = r.ray.coords();
            let normal = LatticeVector::new(coords[..dim].to_vec());
            let g = normal.content();
            let facet = Facet {
                normal: normal.primitive(),
                offset: BigRational::new(coords[dim].clone(), g),
            };
            (facet, r.tight)
        })
        .collect();
    facets.sort();

    let vertex_ids: Vec<usize> = (0..pts.len())
        .filter(|&i| {
            let normals: Vec<LatticeVector> = facets
                .iter()
                .filter(|(_, tight)| tight.contains(&i))
                .map(|(f, _)| f.normal.clone())
                .collect();
            !normals.is_empty() && IntegerMatrix::from_rows(&normals).rank() == dim
        })
        .collect();
    let generators: Vec<Vec<BigRational>> = vertex_ids
        .iter()
        .map(|&i| to_rational_point(&pts[i]))
        .collect();
    let incidence = facets
        .iter()
        .map(|(_, tight)| {
            vertex_ids
                .iter()
                .enumerate()
                .filter(|(_, &pi)| tight.contains(&pi))
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    Ok(RationalPolyhedron {
        dim,
        generators,
        facets: facets.into_iter().map(|(f, _)| f).collect(),
        incidence,
    })
}

impl RationalPolyhedron {
    /// Builds a polytope from an inequality description, discarding redundant
    /// inequalities.
    pub fn from_facets(dim: usize, facets: &[Facet]) -> Result<Self> {
        check_dim(dim)?;
        // homogenize: <n,x> + c t >= 0 and t >= 0
        let mut constraints: Vec<LatticeVector> = facets
            .iter()
            .map(|f| {
                let den = f.offset.denom().clone();
                let mut c: Vec<BigInt> = f.normal.coords().iter().map(|x| x * &den).collect();
                c.push(f.offset.numer().clone());
                LatticeVector::new(c)
            })
            .collect();
        constraints.push(LatticeVector::unit(dim + 1, dim));
        let rays = extreme_rays(&constraints, dim + 1).ok_or(Error::Unbounded)?;
        let mut verts: BTreeSet<Vec<BigRational>> = BTreeSet::new();
        for r in &rays {
            let t = &r.ray[dim];
            if t.is_zero() {
                return Err(Error::Unbounded);
            }
            verts.insert(
                r.ray.coords()[..dim]
                    .iter()
                    .map(|x| BigRational::new(x.clone(), t.clone()))
                    .collect(),
            );
        }
        if verts.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let generators: Vec<Vec<BigRational>> = verts.into_iter().collect();
        let refs: Vec<&Vec<BigRational>> = generators.iter().collect();
        if affine_rank(&refs) < dim {
            return Err(Error::DegeneratePolytope);
        }
        let mut kept: BTreeSet<Facet> = BTreeSet::new();
        for f in facets {
            let g = f.normal.content();
            if g.is_zero() {
                continue;
            }
            let f = Facet {
                normal: f.normal.primitive(),
                offset: &f.offset / rat(&g),
            };
            let tight: Vec<&Vec<BigRational>> = generators
                .iter()
                .filter(|v| f.slack_rational(v).is_zero())
                .collect();
            if tight.len() >= dim && affine_rank(&tight) == dim - 1 {
                kept.insert(f);
            }
        }
        let facets: Vec<Facet> = kept.into_iter().collect();
        let incidence = facets
            .iter()
            .map(|f| {
                (0..generators.len())
                    .filter(|&i| f.slack_rational(&generators[i]).is_zero())
                    .collect()
            })
            .collect();
        Ok(Self {
            dim,
            generators,
            facets,
            incidence,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<BigRational>] {
        &self.generators
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// For each facet, the indices of the generators lying on it.
    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    pub fn is_lattice(&self) -> bool {
        self.generators
            .iter()
            .all(|g| g.iter().all(|x| x.is_integer()))
    }

    pub fn lattice_vertices(&self) -> Option<Vec<LatticeVector>> {
        self.generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|x| x.is_integer().then(|| x.to_integer()))
                    .collect::<Option<Vec<_>>>()
                    .map(LatticeVector::new)
            })
            .collect()
    }

    pub fn contains(&self, x: &LatticeVector) -> bool {
        self.facets.iter().all(|f| !f.slack(x).is_negative())
    }

    pub fn contains_in_interior(&self, x: &LatticeVector) -> bool {
        self.facets.iter().all(|f| f.slack(x).is_positive())
    }

    /// All lattice points, sorted lexicographically.
    pub fn lattice_points(&self) -> Vec<LatticeVector> {
        let dim = self.dim;
        let lo: Vec<BigInt> = (0..dim)
            .map(|i| {
                self.generators
                    .iter()
                    .map(|g| g[i].ceil().to_integer())
                    .min()
                    .expect("polytope has vertices")
            })
            .collect();
        let hi: Vec<BigInt> = (0..dim)
            .map(|i| {
                self.generators
                    .iter()
                    .map(|g| g[i].floor().to_integer())
                    .max()
                    .expect("polytope has vertices")
            })
            .collect();
        let mut out = Vec::new();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return out;
        }
        let mut cur = lo.clone();
        loop {
            let p = LatticeVector::new(cur.clone());
            if self.contains(&p) {
                out.push(p);
            }
            // odometer, last coordinate fastest, which yields lexicographic order
            let mut i = dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    cur[i + 1..dim].clone_from_slice(&lo[i + 1..dim]);
                    break;
                }
            }
        }
    }

    /// Pulling triangulation of the vertex set: vertices are pulled in
    /// lexicographic order. Simplices are given as generator indices.
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.generators.len()).collect();
        let mut out = Vec::new();
        self.pull(&all, self.dim, &mut out);
        out
    }

    fn pull(&self, face: &[usize], k: usize, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            out.push(vec![face[0]]);
            return;
        }
        let apex = face[0];
        let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for inc in &self.incidence {
            let sub: Vec<usize> = face.iter().copied().filter(|i| inc.contains(i)).collect();
            if sub.len() < k || sub.contains(&apex) {
                continue;
            }
            let pts: Vec<&Vec<BigRational>> = sub.iter().map(|&i| &self.generators[i]).collect();
            if affine_rank(&pts) == k - 1 {
                subfaces.insert(sub);
            }
        }
        for sub in subfaces {
            let mut simplices = Vec::new();
            self.pull(&sub, k - 1, &mut simplices);
            for mut s in simplices {
                s.insert(0, apex);
                out.push(s);
            }
        }
    }

    /// `dim!` times the Euclidean volume, as an exact rational.
    pub fn normalized_volume_rational(&self) -> BigRational {
        self.triangulate()
            .iter()
            .map(|s| {
                let v0 = &self.generators[s[0]];
                let rows = s[1..]
                    .iter()
                    .map(|&i| {
                        self.generators[i]
                            .iter()
                            .zip(v0)
                            .map(|(a, b)| a - b)
                            .collect()
                    })
                    .collect();
                rational_det(rows).abs()
            })
            .sum()
    }
}

/// Normalized volume of a lattice polytope (always an integer).
pub fn normalized_volume(p: &RationalPolyhedron) -> Result<BigInt> {
    if !p.is_lattice() {
        return Err(Error::NotLattice);
    }
    let v = p.normalized_volume_rational();
    debug_assert!(v.is_integer());
    Ok(v.to_integer())
}

/// Lattice points of a polyhedron.
pub fn lattice_points(p: &RationalPolyhedron) -> Vec<LatticeVector> {
    p.lattice_points()
}
