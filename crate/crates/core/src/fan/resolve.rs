//! Maximal crepant subdivisions of face fans.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::Fan;
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

fn orient(a: &[BigInt; 2], b: &[BigInt; 2], c: &[BigInt; 2]) -> BigInt {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
}

/// Placing triangulation of planar points, inserted in the given order.
///
/// Every point becomes a vertex, so for lattice polygons the triangles are
/// unimodular. Triangles are returned as sorted index triples.
pub fn placing_triangulation(points: &[[BigInt; 2]]) -> Vec<[usize; 3]> {
    let mut tris = Vec::new();
    if points.len() < 3 {
        return tris;
    }
    // collinear prefix, kept sorted along its line
    let mut line: Vec<usize> = vec![0, 1];
    let mut k = 2;
    while k < points.len() && orient(&points[0], &points[1], &points[k]).is_zero() {
        line.push(k);
        k += 1;
    }
    if k == points.len() {
        return tris;
    }
    let dir = [&points[1][0] - &points[0][0], &points[1][1] - &points[0][1]];
    let along = |i: usize| &dir[0] * &points[i][0] + &dir[1] * &points[i][1];
    line.sort_by_key(|&i| along(i));
    let apex = k;
    for w in line.windows(2) {
        tris.push(sorted3(w[0], w[1], apex));
    }
    // boundary cycle, counter-clockwise, including collinear boundary points
    let mut hull: Vec<usize> =
        if orient(&points[line[0]], &points[line[1]], &points[apex]).is_positive() {
            let mut h = line.clone();
            h.push(apex);
            h
        } else {
            let mut h: Vec<usize> = line.iter().rev().copied().collect();
            h.push(apex);
            h
        };

    for q in apex + 1..points.len() {
        let n = hull.len();
        let visible: Vec<bool> = (0..n)
            .map(|e| orient(&points[hull[e]], &points[hull[(e + 1) % n]], &points[q]).is_negative())
            .collect();
        assert!(
            visible.iter().any(|&v| v),
            "placed point must lie outside the current hull"
        );
        for e in 0..n {
            if visible[e] {
                tris.push(sorted3(hull[e], hull[(e + 1) % n], q));
            }
        }
        // the visible edges form one chain; rotate so it starts at position 0
        let start = (0..n)
            .find(|&e| visible[e] && !visible[(e + n - 1) % n])
            .expect("visible chain has a start");
        let mut len = 0;
        while visible[(start + len) % n] {
            len += 1;
        }
        let mut next = Vec::with_capacity(n + 1);
        next.push(hull[start]);
        next.push(q);
        for i in len..n {
            next.push(hull[(start + i) % n]);
        }
        hull = next;
    }
    tris.sort();
    tris
}

fn sorted3(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

/// Crepant resolution with points inserted in lexicographic order.
pub fn crepant_resolution(fan: &Fan) -> Result<Fan> {
    crepant_resolution_by(fan, |a, b| a.cmp(b))
}

/// Crepant resolution with a caller-chosen insertion order. Any strict total
/// order that refines a linear functional (for example lexicographic, or a
/// generic weight with lexicographic tie-break) yields a regular subdivision.
pub fn crepant_resolution_by<F>(fan: &Fan, order: F) -> Result<Fan>
where
    F: Fn(&LatticeVector, &LatticeVector) -> Ordering,
{
    let p = fan.provenance.clone().ok_or(Error::NoProvenance)?;
    if p.dim() != 3 {
        return Err(Error::NotThreeDimensional);
    }
    let rays: Vec<LatticeVector> = p.boundary_points().to_vec();
    let index: BTreeMap<&LatticeVector, usize> =
        rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for f in p.base().facets() {
        let mut on: Vec<&LatticeVector> = rays.iter().filter(|x| f.slack(x).is_zero()).collect();
        on.sort_by(|a, b| order(a, b));
        // project along a coordinate the facet normal does not annihilate
        let drop = (0..3)
            .find(|&i| !f.normal[i].is_zero())
            .expect("facet normal is nonzero");
        let keep: Vec<usize> = (0..3).filter(|&i| i != drop).collect();
        let planar: Vec<[BigInt; 2]> = on
            .iter()
            .map(|x| [x[keep[0]].clone(), x[keep[1]].clone()])
            .collect();
        for t in placing_triangulation(&planar) {
            cones.push(t.iter().map(|&i| index[on[i]]).collect());
        }
    }
    Ok(Fan::from_parts(rays, cones).with_provenance(Arc::clone(&p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::face_fan;
    use crate::polytope::{cube, ReflexivePolytope};

    fn pts(v: &[[i64; 2]]) -> Vec<[BigInt; 2]> {
        v.iter()
            .map(|p| [BigInt::from(p[0]), BigInt::from(p[1])])
            .collect()
    }

    #[test]
    fn placing_uses_every_point() {
        // 3x3 grid: 8 unimodular triangles (twice the area)
        let mut grid = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                grid.push([x, y]);
            }
        }
        let t = placing_triangulation(&pts(&grid));
        assert_eq!(t.len(), 8);
        let used: std::collections::BTreeSet<usize> = t.iter().flatten().copied().collect();
        assert_eq!(used.len(), 9);
        // collinear start
        let t = placing_triangulation(&pts(&[[0, 0], [1, 0], [2, 0], [0, 1]]));
        assert_eq!(t, vec![[0, 1, 3], [1, 2, 3]]);
    }

    #[test]
    fn resolutions() {
        let p3 = ReflexivePolytope::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]])
            .unwrap();
        let r = crepant_resolution(&face_fan(&p3)).unwrap();
        assert_eq!(r.sorted(), face_fan(&p3).sorted());

        let p = ReflexivePolytope::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -3]])
            .unwrap();
        let r = crepant_resolution(&face_fan(&p)).unwrap();
        r.validate().unwrap();
        assert_eq!((r.rays().len(), r.cones().len()), (5, 6));
        assert!(r.is_smooth());
        assert!(r.rays().contains(&crate::lattice::lv(&[0, 0, -1])));

        let c = ReflexivePolytope::new(cube()).unwrap();
        let r = crepant_resolution(&face_fan(&c)).unwrap();
        r.validate().unwrap();
        assert_eq!(r.rays().len(), 26);
        assert!(r.is_smooth());

        let bare = Fan::from_parts(
            r.rays().to_vec(),
            r.cones().iter().map(|c| c.rays().to_vec()).collect(),
        );
        assert!(matches!(
            crepant_resolution(&bare),
            Err(Error::NoProvenance)
        ));
    }
}
