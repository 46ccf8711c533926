//! Seeded random trials shared by the property and acceptance tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torifan::fan::{blowdown, flop_flip, star_subdivision};
use torifan::geometry::{
    anticanonical_cube_intersection, anticanonical_cube_volume, is_almost_fano, model_invariants,
    walls,
};
use torifan::lattice::{IntegerMatrix, LatticeVector};
use torifan::mmp::{extremal_rays, RayKind};
use torifan::polytope::normal_form;
use torifan::verify::data::{curated_fans, curated_polytopes};
use torifan::{Fan, ReflexivePolytope};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Product of a few random elementary operations; entries stay small.
pub fn random_unimodular(rng: &mut impl Rng) -> IntegerMatrix {
    let mut m = IntegerMatrix::identity(3);
    for _ in 0..rng.gen_range(1..6) {
        let (a, b) = (rng.gen_range(0..3), rng.gen_range(0..3));
        match rng.gen_range(0..3) {
            0 if a != b => m.add_row_multiple(a, b, &BigInt::from(rng.gen_range(-2..=2))),
            1 => m.swap_rows(a, b),
            _ => m.negate_row(a),
        }
    }
    m
}

/// A curated fan followed by up to three fixed-point blowups that keep it
/// almost Fano.
pub fn random_almost_fano(rng: &mut impl Rng) -> Fan {
    let fans = curated_fans();
    let mut x = fans[rng.gen_range(0..fans.len())].1.clone();
    for _ in 0..rng.gen_range(0..=3) {
        let c = &x.cones()[rng.gen_range(0..x.cones().len())];
        let center = x
            .cone_rays(c)
            .iter()
            .fold(LatticeVector::zero(3), |s, r| &s + r);
        let y = star_subdivision(&x, &center).expect("smooth cones can be subdivided");
        if !is_almost_fano(&y).expect("smooth fan").almost_fano {
            break;
        }
        x = y;
    }
    x
}

/// `(iota, rho, degree)` of an almost Fano fan.
fn summary(x: &Fan) -> Result<(Option<i64>, usize, i64), String> {
    let inv = is_almost_fano(x).map_err(err)?;
    Ok((inv.pseudo_index, inv.picard_rank, inv.degree))
}

/// Flopping all walls of one flopping class keeps pseudo-index, Picard rank
/// and degree.
pub fn check_flop_invariance(x: &Fan) -> Check {
    let before = summary(x)?;
    let ws = walls(x).map_err(err)?;
    for r in extremal_rays(x)
        .map_err(err)?
        .iter()
        .filter(|r| r.kind == RayKind::Flop)
    {
        let mut y = x.clone();
        for &w in &r.walls {
            let target = ws[w].wall_rays;
            let wall = walls(&y)
                .map_err(err)?
                .into_iter()
                .find(|v| v.wall_rays == target)
                .ok_or("flop wall disappeared")?;
            ensure!(wall.is_flop(), "wall {target:?} is not a flop wall");
            y = flop_flip(&y, &wall).map_err(err)?;
        }
        y.validate().map_err(err)?;
        ensure!(
            summary(&y)? == before,
            "flop changed {before:?} to {:?}",
            summary(&y)?
        );
    }
    Ok(())
}

/// Contracting a divisorial ray drops the Picard rank by one and raises the
/// degree by eight.
pub fn check_blowdown_bookkeeping(x: &Fan) -> Check {
    let (_, rho, deg) = summary(x)?;
    for r in extremal_rays(x).map_err(err)? {
        if r.kind != RayKind::DivisorialP2Point {
            continue;
        }
        let v = r.contracted_ray.ok_or("divisorial ray without divisor")?;
        let y = blowdown(x, v).map_err(err)?;
        let inv = is_almost_fano(&y).map_err(err)?;
        ensure!(
            inv.picard_rank + 1 == rho,
            "rho {} after blowdown of rho {rho}",
            inv.picard_rank
        );
        ensure!(
            inv.degree == deg + 8,
            "degree {} after blowdown of degree {deg}",
            inv.degree
        );
    }
    Ok(())
}

/// Blowing up the fixed point of cone `c` and blowing down the new divisor
/// gives back the fan.
pub fn check_star_then_blowdown(x: &Fan, c: usize) -> Check {
    let cone = &x.cones()[c];
    let center = x
        .cone_rays(cone)
        .iter()
        .fold(LatticeVector::zero(3), |s, r| &s + r);
    let y = star_subdivision(x, &center).map_err(err)?;
    let v = y
        .rays()
        .iter()
        .position(|r| *r == center)
        .ok_or("new ray missing")?;
    let (rx, ry) = (
        is_almost_fano(x).map_err(err)?,
        is_almost_fano(&y).map_err(err)?,
    );
    ensure!(ry.picard_rank == rx.picard_rank + 1, "blowup rho");
    ensure!(
        ry.degree == rx.degree - 8,
        "blowup degree {} from {}",
        ry.degree,
        rx.degree
    );
    let z = blowdown(&y, v).map_err(err)?;
    ensure!(
        z.sorted() == x.sorted(),
        "blowdown of the blowup differs from the fan"
    );
    Ok(())
}

pub fn check_volume_vs_intersection(x: &Fan) -> Check {
    let a = anticanonical_cube_volume(x).map_err(err)?;
    let b = anticanonical_cube_intersection(x).map_err(err)?;
    ensure!(a == b, "volume {a} vs intersection {b}");
    Ok(())
}

fn sorted_vertices(p: &ReflexivePolytope) -> Vec<LatticeVector> {
    let mut v = p.vertices().to_vec();
    v.sort();
    v
}

pub fn check_dual_involution(p: &ReflexivePolytope) -> Check {
    let back = p.polar_dual().polar_dual();
    ensure!(
        sorted_vertices(&back) == sorted_vertices(p),
        "dual of dual differs"
    );
    Ok(())
}

/// Invariants of fans and polytopes do not change under a lattice automorphism.
pub fn check_unimodular_invariance(x: &Fan, p: &ReflexivePolytope, g: &IntegerMatrix) -> Check {
    ensure!(g.is_unimodular(), "not unimodular");
    let gx = x.transform(g).map_err(err)?;
    ensure!(
        is_almost_fano(&gx).map_err(err)? == is_almost_fano(x).map_err(err)?,
        "fan invariants changed"
    );
    ensure!(gx.canonical_key() == x.canonical_key(), "fan key changed");
    let gp = ReflexivePolytope::new(p.base().transform(g).map_err(err)?).map_err(err)?;
    ensure!(
        normal_form(gp.base()) == normal_form(p.base()),
        "normal form changed"
    );
    ensure!(
        gp.dual().normalized_volume() == p.dual().normalized_volume(),
        "dual volume changed"
    );
    ensure!(
        model_invariants(&gp).map_err(err)? == model_invariants(p).map_err(err)?,
        "model invariants changed"
    );
    check_dual_involution(&gp)
}

/// One seeded trial of every property; errors name the failing property.
pub fn trial(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_almost_fano(&mut rng);
    let polys = curated_polytopes().map_err(err)?;
    let p = &polys[rng.gen_range(0..polys.len())].1;
    let g = random_unimodular(&mut rng);
    let c = rng.gen_range(0..x.cones().len());
    let tag = |name: &'static str| move |e: String| format!("seed {seed}: {name}: {e}");
    check_flop_invariance(&x).map_err(tag("flop invariance"))?;
    check_blowdown_bookkeeping(&x).map_err(tag("blowdown bookkeeping"))?;
    check_star_then_blowdown(&x, c).map_err(tag("blowdown after blowup"))?;
    check_volume_vs_intersection(&x).map_err(tag("volume vs intersection"))?;
    check_dual_involution(p).map_err(tag("dual involution"))?;
    check_unimodular_invariance(&x, p, &g).map_err(tag("unimodular invariance"))?;
    Ok(())
}

pub const TRIALS: u64 = 200;

/// Runs the seeded trials and returns the first failure.
pub fn run_trials() -> Check {
    (0..TRIALS).try_for_each(trial)
}
