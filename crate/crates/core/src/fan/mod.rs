//! Complete fans: validation, face fans, canonical keys and the native format.

mod classify;
mod resolve;
mod surgery;

use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{extreme_rays, IntegerMatrix, LatticeVector};
use crate::polytope::{frame_transform, ReflexivePolytope};

pub use classify::{classify_cone, ConeClass};
pub use resolve::{crepant_resolution, crepant_resolution_by, placing_triangulation};
pub use surgery::{blowdown, flop_flip, star_subdivision};

/// A maximal cone, stored as sorted indices into the fan's ray table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cone {
    rays: Vec<usize>,
}

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Self { rays }
    }

    pub fn rays(&self) -> &[usize] {
        &self.rays
    }

    pub fn contains_ray(&self, i: usize) -> bool {
        self.rays.binary_search(&i).is_ok()
    }
}

/// A facet of a maximal cone: its inner primitive normal and the rays on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeFacet {
    pub normal: LatticeVector,
    pub rays: Vec<usize>,
}

/// Complete fan with primitive rays and full-dimensional maximal cones.
#[derive(Clone, Debug)]
pub struct Fan {
    rays: Vec<LatticeVector>,
    cones: Vec<Cone>,
    provenance: Option<Arc<ReflexivePolytope>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

impl Hash for Fan {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rays.hash(state);
        self.cones.hash(state);
    }
}

impl Fan {
    /// Builds and validates a fan. Cones are sorted; ray order is kept.
    pub fn new(rays: Vec<LatticeVector>, cones: Vec<Vec<usize>>) -> Result<Self> {
        let fan = Self::from_parts(rays, cones);
        fan.validate()?;
        Ok(fan)
    }

    pub fn from_i64(rays: &[&[i64]], cones: &[&[usize]]) -> Result<Self> {
        Self::new(
            rays.iter().map(|r| LatticeVector::from_i64(r)).collect(),
            cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    /// Assembles a fan without validation; used by surgeries whose output is
    /// complete by construction.
    pub(crate) fn from_parts(rays: Vec<LatticeVector>, cones: Vec<Vec<usize>>) -> Self {
        let mut cones: Vec<Cone> = cones.into_iter().map(Cone::new).collect();
        cones.sort();
        Self {
            rays,
            cones,
            provenance: None,
        }
    }

    pub(crate) fn with_provenance(mut self, p: Arc<ReflexivePolytope>) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn dim(&self) -> usize {
        self.rays.first().map_or(0, LatticeVector::dim)
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn provenance(&self) -> Option<&ReflexivePolytope> {
        self.provenance.as_deref()
    }

    pub fn cone_rays(&self, c: &Cone) -> Vec<LatticeVector> {
        c.rays.iter().map(|&i| self.rays[i].clone()).collect()
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| c.rays.len() == self.dim())
    }

    pub fn cone_is_smooth(&self, c: &Cone) -> bool {
        c.rays.len() == self.dim()
            && IntegerMatrix::from_rows(&self.cone_rays(c)).det().abs() == BigInt::from(1)
    }

    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(|c| self.cone_is_smooth(c))
    }

    /// Facets of a maximal cone with inner normals, sorted by normal.
    pub fn cone_facets(&self, c: &Cone) -> Result<Vec<ConeFacet>> {
        let gens = self.cone_rays(c);
        let dual = extreme_rays(&gens, self.dim())
            .ok_or_else(|| Error::InvalidFan("cone is not full-dimensional".into()))?;
        if IntegerMatrix::from_rows(&dual.iter().map(|r| r.ray.clone()).collect::<Vec<_>>()).rank()
            < self.dim()
        {
            return Err(Error::InvalidFan("cone contains a line".into()));
        }
        Ok(dual
            .into_iter()
            .map(|r| ConeFacet {
                normal: r.ray,
                rays: r.tight.iter().map(|&k| c.rays[k]).collect(),
            })
            .collect())
    }

    /// Whether `x` lies in the relative interior of maximal cone `c`.
    pub fn cone_interior_contains(&self, c: &Cone, x: &LatticeVector) -> Result<bool> {
        Ok(self
            .cone_facets(c)?
            .iter()
            .all(|f| f.normal.dot(x).is_positive()))
    }

    pub fn cone_contains(&self, c: &Cone, x: &LatticeVector) -> Result<bool> {
        Ok(self
            .cone_facets(c)?
            .iter()
            .all(|f| !f.normal.dot(x).is_negative()))
    }

    /// Checks primitivity, strong convexity, that every ray is used, that every
    /// facet is shared by exactly two cones lying on opposite sides, and that a
    /// generic direction is covered exactly once.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        crate::lattice::hull::check_dim(dim)?;
        for r in &self.rays {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.dim(),
                });
            }
            if !r.is_primitive() {
                return Err(Error::InvalidFan(format!("ray {r} is not primitive")));
            }
        }
        if self.rays.iter().collect::<BTreeSet<_>>().len() != self.rays.len() {
            return Err(Error::InvalidFan("repeated ray".into()));
        }
        let mut used = vec![false; self.rays.len()];
        for c in &self.cones {
            for &i in &c.rays {
                if i >= self.rays.len() {
                    return Err(Error::InvalidFan(format!("ray index {i} out of range")));
                }
                used[i] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidFan(format!(
                "ray {i} lies in no maximal cone"
            )));
        }
        let facets: Vec<Vec<ConeFacet>> = self
            .cones
            .iter()
            .map(|c| self.cone_facets(c))
            .collect::<Result<_>>()?;
        for (c, fs) in self.cones.iter().zip(&facets) {
            let extreme: BTreeSet<usize> = fs.iter().flat_map(|f| f.rays.iter().copied()).collect();
            if extreme.len() != c.rays.len() && dim > 1 {
                return Err(Error::InvalidFan("cone generator is not extreme".into()));
            }
        }
        let mut shared: BTreeMap<&[usize], Vec<&LatticeVector>> = BTreeMap::new();
        for fs in &facets {
            for f in fs {
                shared.entry(&f.rays).or_default().push(&f.normal);
            }
        }
        for (rays, normals) in &shared {
            if normals.len() != 2 || *normals[0] != -normals[1] {
                return Err(Error::InvalidFan(format!(
                    "facet on rays {rays:?} is not shared by two opposite cones"
                )));
            }
        }
        let p = generic_direction(dim, facets.iter().flatten().map(|f| &f.normal));
        let covering = facets
            .iter()
            .filter(|fs| fs.iter().all(|f| f.normal.dot(&p).is_positive()))
            .count();
        if covering != 1 {
            return Err(Error::InvalidFan(format!(
                "generic direction covered {covering} times"
            )));
        }
        Ok(())
    }

    /// Index of the maximal cone containing `x` in its interior, if any.
    pub fn locate_interior(&self, x: &LatticeVector) -> Result<Option<usize>> {
        for (i, c) in self.cones.iter().enumerate() {
            if self.cone_interior_contains(c, x)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Image under `u -> m u` for an invertible integer matrix.
    pub fn transform(&self, m: &IntegerMatrix) -> Result<Fan> {
        if !m.is_unimodular() {
            return Err(Error::Input("transform must be unimodular".into()));
        }
        Ok(Fan::from_parts(
            self.rays.iter().map(|r| m.mul_vec(r)).collect(),
            self.cones.iter().map(|c| c.rays.clone()).collect(),
        ))
    }

    /// Same fan with rays sorted lexicographically and cones relabeled.
    pub fn sorted(&self) -> Fan {
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&a, &b| self.rays[a].cmp(&self.rays[b]));
        let mut pos = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut f = Fan::from_parts(
            order.iter().map(|&i| self.rays[i].clone()).collect(),
            self.cones
                .iter()
                .map(|c| c.rays.iter().map(|&i| pos[i]).collect())
                .collect(),
        );
        f.provenance = self.provenance.clone();
        f
    }

    pub fn canonical_key(&self) -> FanKey {
        canonical_key(self)
    }

    pub fn record(&self) -> FanRecord {
        FanRecord {
            rays: self.rays.clone(),
            cones: self.cones.iter().map(|c| c.rays.clone()).collect(),
        }
    }
}

/// A direction off every hyperplane spanned by the given normals' kernels.
fn generic_direction<'a>(
    dim: usize,
    normals: impl Iterator<Item = &'a LatticeVector> + Clone,
) -> LatticeVector {
    let mut k: i64 = 7;
    loop {
        let p = LatticeVector::new(
            (0..dim)
                .map(|i| BigInt::from(k).pow(i as u32) + BigInt::from(i as i64 + 1))
                .collect(),
        );
        if normals.clone().all(|n| !n.dot(&p).is_zero()) {
            return p;
        }
        k += 4;
    }
}

/// Face fan of a reflexive polytope: one maximal cone over each facet.
pub fn face_fan(p: &ReflexivePolytope) -> Fan {
    let base = p.base();
    Fan::from_parts(base.vertices().to_vec(), base.facet_vertices().to_vec())
        .with_provenance(Arc::new(p.clone()))
}

/// Complete `GL(n, Z)` invariant of a fan: transformed sorted rays together
/// with the relabeled sorted cones, minimized over frames taken inside cones.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FanKey {
    pub rays: Vec<LatticeVector>,
    pub cones: Vec<Vec<usize>>,
}

pub fn canonical_key(fan: &Fan) -> FanKey {
    let dim = fan.dim();
    let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in fan.cones() {
        for s in crate::polytope::subsets(c.rays.len(), dim) {
            candidates.insert(s.iter().map(|&k| c.rays[k]).collect());
        }
    }
    let frames = crate::polytope::minimal_frames(fan.rays(), candidates);
    let mut best: Option<FanKey> = None;
    for f in frames {
        let cols: Vec<LatticeVector> = f.iter().map(|&i| fan.rays[i].clone()).collect();
        let g = frame_transform(&cols).expect("frames are nonsingular");
        let img: Vec<LatticeVector> = fan.rays.iter().map(|r| g.mul_vec(r)).collect();
        let mut order: Vec<usize> = (0..img.len()).collect();
        order.sort_by(|&a, &b| img[a].cmp(&img[b]));
        let mut pos = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut cones: Vec<Vec<usize>> = fan
            .cones
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.rays.iter().map(|&i| pos[i]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        cones.sort();
        let key = FanKey {
            rays: order.iter().map(|&i| img[i].clone()).collect(),
            cones,
        };
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.expect("a complete fan has a nonsingular frame")
}

/// One line of the native fan format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanRecord {
    pub rays: Vec<LatticeVector>,
    pub cones: Vec<Vec<usize>>,
}

impl FanRecord {
    pub fn to_fan(&self) -> Result<Fan> {
        Fan::new(self.rays.clone(), self.cones.clone())
    }
}

pub fn write_fans<W: Write>(fans: &[Fan], mut w: W) -> Result<()> {
    for f in fans {
        serde_json::to_writer(&mut w, &f.record())?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_fans<R: BufRead>(reader: R) -> Result<Vec<Fan>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: FanRecord = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec.to_fan()?);
    }
    Ok(out)
}
