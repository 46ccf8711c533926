//! Fixed-point blowups, flops and blowdowns of smooth complete fans.

use num_traits::{One, Signed};

use super::{Cone, Fan};
use crate::error::{Error, Result};
use crate::geometry::Wall;
use crate::lattice::{IntegerMatrix, LatticeVector};

/// Star subdivision at `new_ray`, which must lie in the interior of a smooth
/// maximal cone. The new ray is appended to the ray table.
pub fn star_subdivision(fan: &Fan, new_ray: &LatticeVector) -> Result<Fan> {
    if new_ray.dim() != fan.dim() || !new_ray.is_primitive() {
        return Err(Error::RayNotInterior);
    }
    let mut host = None;
    for (i, c) in fan.cones().iter().enumerate() {
        if fan.cone_interior_contains(c, new_ray)? {
            host = Some(i);
            break;
        }
    }
    let host = host.ok_or(Error::RayNotInterior)?;
    let cone = &fan.cones()[host];
    if !fan.cone_is_smooth(cone) {
        return Err(Error::ConeNotSmooth);
    }
    let n = fan.rays().len();
    let mut rays = fan.rays().to_vec();
    rays.push(new_ray.clone());
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for (i, c) in fan.cones().iter().enumerate() {
        if i != host {
            cones.push(c.rays().to_vec());
            continue;
        }
        for skip in 0..c.rays().len() {
            let mut t: Vec<usize> = c
                .rays()
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, &r)| r)
                .collect();
            t.push(n);
            cones.push(t);
        }
    }
    Ok(Fan::from_parts(rays, cones))
}

/// The two maximal cones containing rays `i` and `j`, as (cone index, outer ray).
pub(crate) fn wall_neighbors(fan: &Fan, i: usize, j: usize) -> Vec<(usize, usize)> {
    fan.cones()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.rays().len() == 3 && c.contains_ray(i) && c.contains_ray(j))
        .map(|(ci, c)| {
            let outer = c
                .rays()
                .iter()
                .copied()
                .find(|&r| r != i && r != j)
                .expect("three rays");
            (ci, outer)
        })
        .collect()
}

/// Exchanges the diagonal of the two cones adjacent to a wall whose relation
/// is `u_k + u_l = u_i + u_j`.
pub fn flop_flip(fan: &Fan, wall: &Wall) -> Result<Fan> {
    let (i, j) = wall.wall_rays;
    let not_flop = || Error::NotFlopWall(i, j);
    let nb = wall_neighbors(fan, i, j);
    if nb.len() != 2 || fan.dim() != 3 {
        return Err(not_flop());
    }
    let (k, l) = (nb[0].1, nb[1].1);
    if !fan.cone_is_smooth(&fan.cones()[nb[0].0]) || !fan.cone_is_smooth(&fan.cones()[nb[1].0]) {
        return Err(not_flop());
    }
    let u = fan.rays();
    if &u[k] + &u[l] != &u[i] + &u[j] {
        return Err(not_flop());
    }
    let mut cones: Vec<Vec<usize>> = fan
        .cones()
        .iter()
        .enumerate()
        .filter(|(ci, _)| *ci != nb[0].0 && *ci != nb[1].0)
        .map(|(_, c)| c.rays().to_vec())
        .collect();
    cones.push(vec![k, l, i]);
    cones.push(vec![k, l, j]);
    Ok(Fan::from_parts(fan.rays().to_vec(), cones))
}

/// Contracts ray `v` when its star is three smooth cones and `v` is the sum
/// of the three neighboring rays. Later ray indices shift down by one.
pub fn blowdown(fan: &Fan, v: usize) -> Result<Fan> {
    let err = || Error::NotContractible(v);
    if v >= fan.rays().len() || fan.dim() != 3 {
        return Err(err());
    }
    let star: Vec<&Cone> = fan.cones().iter().filter(|c| c.contains_ray(v)).collect();
    if star.len() != 3 || star.iter().any(|c| !fan.cone_is_smooth(c)) {
        return Err(err());
    }
    let mut link: Vec<usize> = star
        .iter()
        .flat_map(|c| c.rays().iter().copied().filter(|&r| r != v))
        .collect();
    link.sort_unstable();
    link.dedup();
    if link.len() != 3 {
        return Err(err());
    }
    let u = fan.rays();
    let sum = &(&u[link[0]] + &u[link[1]]) + &u[link[2]];
    if sum != u[v] {
        return Err(err());
    }
    let det =
        IntegerMatrix::from_rows(&[u[link[0]].clone(), u[link[1]].clone(), u[link[2]].clone()])
            .det();
    if !det.abs().is_one() {
        return Err(err());
    }
    let shift = |r: usize| if r > v { r - 1 } else { r };
    let mut cones: Vec<Vec<usize>> = fan
        .cones()
        .iter()
        .filter(|c| !c.contains_ray(v))
        .map(|c| c.rays().iter().map(|&r| shift(r)).collect())
        .collect();
    cones.push(link.iter().map(|&r| shift(r)).collect());
    let rays: Vec<LatticeVector> = u
        .iter()
        .enumerate()
        .filter(|(r, _)| *r != v)
        .map(|(_, x)| x.clone())
        .collect();
    Ok(Fan::from_parts(rays, cones))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::tests::{p1cubed_fan, p3_fan};
    use crate::geometry::walls;
    use crate::lattice::lv;

    #[test]
    fn blowup_of_p3() {
        let f = p3_fan();
        let b = star_subdivision(&f, &lv(&[1, 1, 1])).unwrap();
        b.validate().unwrap();
        assert_eq!((b.rays().len(), b.cones().len()), (5, 6));
        assert_eq!(blowdown(&b, 4).unwrap(), f);
        assert!(matches!(
            star_subdivision(&f, &lv(&[1, 0, 0])),
            Err(Error::RayNotInterior)
        ));
    }

    #[test]
    fn blowdown_rejects_large_stars() {
        let f = p1cubed_fan();
        assert!(matches!(blowdown(&f, 0), Err(Error::NotContractible(0))));
    }

    #[test]
    fn non_smooth_host() {
        // P(1,1,1,3) face fan: the cone over the facet through (0,0,-1) is singular
        let rays = vec![
            lv(&[1, 0, 0]),
            lv(&[0, 1, 0]),
            lv(&[0, 0, 1]),
            lv(&[-1, -1, -3]),
        ];
        let f = Fan::new(
            rays,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap();
        assert!(matches!(
            star_subdivision(&f, &lv(&[0, 0, -1])),
            Err(Error::ConeNotSmooth)
        ));
    }

    #[test]
    fn flop_is_an_involution() {
        // P(O + O(1) + O(1)) over P1: e3 + (e1 + e2 - e3) = e1 + e2
        let f = Fan::from_i64(
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[-1, -1, 0],
                &[0, 0, 1],
                &[1, 1, -1],
            ],
            &[
                &[0, 1, 3],
                &[1, 2, 3],
                &[0, 2, 3],
                &[0, 1, 4],
                &[1, 2, 4],
                &[0, 2, 4],
            ],
        )
        .unwrap();
        let ws = walls(&f).unwrap();
        let w = ws.iter().find(|w| w.wall_rays == (0, 1)).unwrap();
        assert_eq!(w.degree(), 0.into());
        let g = flop_flip(&f, w).unwrap();
        g.validate().unwrap();
        assert!(g.is_smooth());
        let back = walls(&g)
            .unwrap()
            .into_iter()
            .find(|x| x.wall_rays == (3, 4))
            .unwrap();
        assert_eq!(flop_flip(&g, &back).unwrap(), f);
        let other = ws.iter().find(|w| w.degree() != 0.into()).unwrap();
        assert!(matches!(flop_flip(&f, other), Err(Error::NotFlopWall(..))));
    }
}
