//! Double description: extreme rays of `{ y : <a_i, y> >= 0 }`.

use num_traits::{Signed, Zero};

use super::{IntegerMatrix, LatticeVector};

/// An extreme ray together with the indices of the constraints it makes tight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeRay {
    pub ray: LatticeVector,
    pub tight: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn contains_all(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
    fn indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, word) in self.0.iter().enumerate() {
            for b in 0..64 {
                if word & (1 << b) != 0 {
                    out.push(w * 64 + b);
                }
            }
        }
        out
    }
}

/// Extreme rays of the cone cut out by `constraints` in `R^dim`.
///
/// Returns `None` when the constraints have rank below `dim` (the cone then
/// contains a line). Rays are primitive and sorted lexicographically.
pub fn extreme_rays(constraints: &[LatticeVector], dim: usize) -> Option<Vec<ConeRay>> {
    let n = constraints.len();
    let mut basis: Vec<usize> = Vec::with_capacity(dim);
    for (i, c) in constraints.iter().enumerate() {
        if basis.len() == dim {
            break;
        }
        let mut rows: Vec<LatticeVector> = basis.iter().map(|&b| constraints[b].clone()).collect();
        rows.push(c.clone());
        if IntegerMatrix::from_rows(&rows).rank() == rows.len() {
            basis.push(i);
        }
    }
    if basis.len() < dim {
        return None;
    }

    let a0 = IntegerMatrix::from_rows(
        &basis
            .iter()
            .map(|&b| constraints[b].clone())
            .collect::<Vec<_>>(),
    );
    let det = a0.det();
    let adj = a0.adjugate();
    let mut rays: Vec<(LatticeVector, Bits)> = (0..dim)
        .map(|j| {
            let mut col = adj.column(j);
            if det.is_negative() {
                col = -&col;
            }
            let mut z = Bits::new(n);
            for (k, &b) in basis.iter().enumerate() {
                if k != j {
                    z.set(b);
                }
            }
            (col.primitive(), z)
        })
        .collect();

    for (idx, a) in constraints.iter().enumerate() {
        if basis.contains(&idx) {
            continue;
        }
        let vals: Vec<_> = rays.iter().map(|(r, _)| a.dot(r)).collect();
        let mut next: Vec<(LatticeVector, Bits)> = Vec::new();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        for (i, (r, z)) in rays.iter().enumerate() {
            if vals[i].is_zero() {
                let mut z = z.clone();
                z.set(idx);
                next.push((r.clone(), z));
            } else if vals[i].is_positive() {
                next.push((r.clone(), z.clone()));
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].1.and(&rays[q].1);
                if dim >= 2 && common.count() < dim - 2 {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, (_, z))| k == p || k == q || !z.contains_all(&common));
                if !adjacent {
                    continue;
                }
                let combined = &rays[q].0.scale(&vals[p]) - &rays[p].0.scale(&vals[q]);
                let mut z = common;
                z.set(idx);
                next.push((combined.primitive(), z));
            }
        }
        rays = next;
    }

    let mut out: Vec<ConeRay> = rays
        .into_iter()
        .filter(|(r, _)| !r.is_zero())
        .map(|(ray, z)| ConeRay {
            ray,
            tight: z.indices().into_iter().filter(|&i| i < n).collect(),
        })
        .collect();
    out.sort_by(|a, b| a.ray.cmp(&b.ray));
    out.dedup_by(|a, b| a.ray == b.ray);
    Some(out)
}
