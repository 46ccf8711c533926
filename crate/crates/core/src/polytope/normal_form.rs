//! Canonical forms of lattice point configurations under `GL(n, Z)`.
//!
//! A *frame* is an ordered basis of `Q^n` drawn from the configuration. Each
//! frame `B` determines a unimodular `G` with `G B` in Hermite form (up to the
//! scalar `|det B|`), and `G` transforms equivariantly: replacing the input by
//! `M P` replaces `G` by `G M^-1`. The sorted image `G P` is therefore an
//! invariant of the pair (configuration, frame up to `M`), and the minimum
//! over all frames of minimal `|det|` is a complete invariant.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::LatticePolytope;
use crate::lattice::{hermite_normal_form, IntegerMatrix, LatticeVector};

/// Canonical vertex matrix; columns are the transformed vertices in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NormalForm {
    pub matrix: IntegerMatrix,
}

/// The unimodular transform attached to a frame, or `None` if the frame is
/// singular.
pub fn frame_transform(frame: &[LatticeVector]) -> Option<IntegerMatrix> {
    let dim = frame.first()?.dim();
    let b = IntegerMatrix::from_columns(frame, dim);
    let det = b.det();
    if det.is_zero() {
        return None;
    }
    let mut a = b.adjugate();
    if det.is_negative() {
        for i in 0..dim {
            a.negate_row(i);
        }
    }
    // row form of a^T: u a^T = h, so a u^T = h^T and g = (u^-1)^T
    let hf = hermite_normal_form(&a.transpose());
    Some(hf.u.unimodular_inverse()?.transpose())
}

/// Ordered frames of minimal `|det|` from `points`, restricted to the index
/// sets produced by `candidates`.
pub(crate) fn minimal_frames(
    points: &[LatticeVector],
    candidates: impl IntoIterator<Item = Vec<usize>>,
) -> Vec<Vec<usize>> {
    let mut best: Option<BigInt> = None;
    let mut frames: Vec<Vec<usize>> = Vec::new();
    for set in candidates {
        let cols: Vec<LatticeVector> = set.iter().map(|&i| points[i].clone()).collect();
        let d = IntegerMatrix::from_columns(&cols, points[0].dim())
            .det()
            .abs();
        if d.is_zero() {
            continue;
        }
        match &best {
            Some(b) if d > *b => continue,
            Some(b) if d == *b => frames.push(set),
            _ => {
                best = Some(d);
                frames = vec![set];
            }
        }
    }
    let mut ordered = Vec::new();
    for f in frames {
        permutations(&f, &mut ordered);
    }
    ordered
}

fn permutations(items: &[usize], out: &mut Vec<Vec<usize>>) {
    fn rec(cur: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(cur, rest, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    rec(&mut Vec::new(), &mut items.to_vec(), out);
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Canonical representative of a spanning point set under `GL(n, Z)`,
/// returned as the sorted list of transformed points.
pub fn canonical_points(points: &[LatticeVector]) -> Vec<LatticeVector> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let dim = first.dim();
    let frames = minimal_frames(points, subsets(points.len(), dim));
    let mut best: Option<Vec<LatticeVector>> = None;
    for f in frames {
        let cols: Vec<LatticeVector> = f.iter().map(|&i| points[i].clone()).collect();
        let g = frame_transform(&cols).expect("minimal frames are nonsingular");
        let mut img: Vec<LatticeVector> = points.iter().map(|p| g.mul_vec(p)).collect();
        img.sort();
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
    }
    best.unwrap_or_else(|| {
        let mut v = points.to_vec();
        v.sort();
        v
    })
}

pub fn normal_form(p: &LatticePolytope) -> NormalForm {
    let pts = canonical_points(p.vertices());
    NormalForm {
        matrix: IntegerMatrix::from_columns(&pts, p.dim()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lv;

    #[test]
    fn frame_transform_equivariance() {
        let b = vec![lv(&[2, 1, 0]), lv(&[0, 1, 1]), lv(&[1, 0, 3])];
        let g = frame_transform(&b).unwrap();
        assert!(g.is_unimodular());
        let m = IntegerMatrix::from_i64(3, 3, &[1, 2, 0, 0, 1, 0, -1, 3, 1]);
        let mb: Vec<_> = b.iter().map(|v| m.mul_vec(v)).collect();
        let g2 = frame_transform(&mb).unwrap();
        assert_eq!(&g2 * &m, g);
    }

    #[test]
    fn distinguishes_simplices() {
        let p3 = LatticePolytope::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]])
            .unwrap();
        let p1113 = LatticePolytope::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -3]])
            .unwrap();
        assert_ne!(p3.normalized_volume(), p1113.normalized_volume());
        assert_ne!(normal_form(&p3), normal_form(&p1113));
        let m = IntegerMatrix::from_i64(3, 3, &[0, 1, 0, 1, 1, 0, 2, -1, 1]);
        assert_eq!(
            normal_form(&p1113.transform(&m).unwrap()),
            normal_form(&p1113)
        );
    }
}
