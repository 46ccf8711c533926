use std::collections::BTreeSet;

use rayon::prelude::*;

use super::data::{self, bundle_o3, curated_fans, weighted_projective_space};
use super::{Aggregates, Dataset, Item, Status, KS3D_ITEM};
use crate::error::Result;
use crate::fan::{crepant_resolution, face_fan, Fan};
use crate::geometry::{
    cartier_lattice, is_almost_fano, model_invariants, picard_rank, pseudo_index,
    pseudo_index_of_model,
};
use crate::lattice::{smith_normal_form, IntegerMatrix};
use crate::mmp::{enumerate_fixed_point_blowups, model_is_q_factorial, structure_pipeline, Base};
use crate::polytope::{normal_form, NormalForm, ReflexivePolytope};

type SuiteOutput = (String, Vec<Item>, Aggregates);

/// Rank of the class group as the corank of the ray matrix, via its Smith form.
pub fn class_rank_by_smith(fan: &Fan) -> usize {
    fan.rays().len() - smith_normal_form(&IntegerMatrix::from_rows(fan.rays())).rank()
}

/// Picard rank of a crepant resolution from the rank of its Cartier lattice.
pub fn resolution_picard_rank_by_cartier(fan: &Fan) -> usize {
    cartier_lattice(fan).len() - fan.dim()
}

fn per_polytope<F>(ds: &Dataset, f: F) -> Vec<Item>
where
    F: Fn(&str, &ReflexivePolytope) -> Item + Sync,
{
    let mut items: Vec<Item> = ds.items.par_iter().map(|(name, p)| f(name, p)).collect();
    for (name, why) in &ds.rejected {
        items.push(Item::new(name.clone()).skip(why));
    }
    items
}

fn failed(item: Item, e: crate::error::Error) -> Item {
    item.value("error", e.to_string())
        .check("computation", false)
}

pub(super) fn fact1(ds: &Dataset) -> Result<SuiteOutput> {
    let items = per_polytope(ds, |name, p| {
        let rank = class_rank_by_smith(&face_fan(p));
        let nv = p.vertices().len();
        Item::new(name)
            .value("vertices", nv)
            .value("class_rank", rank)
            .check("class_rank == vertices - 3", rank + 3 == nv)
            .with_witness(p, None)
    });
    Ok((ds.hash.clone(), items, Aggregates::default()))
}

pub(super) fn fact2(ds: &Dataset) -> Result<SuiteOutput> {
    let items = per_polytope(ds, |name, p| {
        let item = Item::new(name);
        let res = match crepant_resolution(&face_fan(p)) {
            Ok(r) => r,
            Err(e) => return failed(item, e),
        };
        let points = p.base().lattice_points().len();
        let rho = resolution_picard_rank_by_cartier(&res);
        item.value("lattice_points", points)
            .value("resolution_rho", rho)
            .check("resolution is smooth", res.is_smooth())
            .check("rho == points - 4", rho + 4 == points)
            .with_witness(p, None)
    });
    let ext = Aggregates {
        max_rho: max_of(&items, "resolution_rho"),
        max_points: max_of(&items, "lattice_points"),
        ..Aggregates::default()
    };
    Ok((ds.hash.clone(), items, ext))
}

fn max_of<T: serde::de::DeserializeOwned + Ord>(items: &[Item], key: &str) -> Option<T> {
    items
        .iter()
        .filter_map(|i| i.values.get(key))
        .filter_map(|v| serde_json::from_value(v.clone()).ok())
        .max()
}

fn equality_forms() -> [NormalForm; 2] {
    [
        normal_form(weighted_projective_space(&[1, 1, 1, 1]).base()),
        normal_form(data::octahedron().base()),
    ]
}

fn mukai_item(name: &str, p: &ReflexivePolytope, eq: &[NormalForm; 2]) -> Item {
    let item = Item::new(name);
    let iota = match pseudo_index_of_model(p) {
        Ok(i) => i,
        Err(e) => return failed(item, e),
    };
    let rho = picard_rank(&face_fan(p)) as i64;
    let product = rho * (iota - 1);
    let is_product_of_spaces = eq.contains(&normal_form(p.base()));
    item.value("rho", rho)
        .value("iota", iota)
        .value("product", product)
        .value("equality", product == 3)
        .check("rho (iota - 1) <= 3", product <= 3)
        .check(
            "equality iff P3 or P1xP1xP1",
            (product == 3) == is_product_of_spaces,
        )
        .with_witness(p, model_invariants(p).ok())
}

pub(super) fn mukai(ds: &Dataset) -> Result<SuiteOutput> {
    let eq = equality_forms();
    let items = per_polytope(ds, |name, p| mukai_item(name, p, &eq));
    let ext = Aggregates {
        max_rho: max_of(&items, "rho"),
        ..Aggregates::default()
    };
    Ok((ds.hash.clone(), items, ext))
}

struct BoundsRow {
    item: Item,
    degree: Option<i64>,
    points: usize,
    rho: Option<usize>,
    form: Option<NormalForm>,
}

fn bounds_row(
    name: &str,
    p: &ReflexivePolytope,
    eq: &[NormalForm; 2],
    with_mukai: bool,
) -> BoundsRow {
    let points = p.base().lattice_points().len();
    let degree = p.dual().normalized_volume();
    let degree = i64::try_from(degree).ok();
    let rho = crepant_resolution(&face_fan(p))
        .ok()
        .map(|r| picard_rank(&r));
    let form = (degree == Some(72)).then(|| normal_form(p.base()));
    let mut item = Item::new(name)
        .value("degree", degree)
        .value("lattice_points", points)
        .value("resolution_rho", rho)
        .check("degree <= 72", degree.is_some_and(|d| d <= 72))
        .check("resolution computed", rho.is_some());
    if with_mukai {
        let m = mukai_item(name, p, eq);
        item = item.check("mukai", m.status == Status::Pass);
    }
    BoundsRow {
        item: item.with_witness(p, None),
        degree,
        points,
        rho,
        form,
    }
}

fn summarize(rows: &[BoundsRow]) -> (Option<i64>, usize, Option<usize>, BTreeSet<NormalForm>) {
    (
        rows.iter().filter_map(|r| r.degree).max(),
        rows.iter().map(|r| r.points).max().unwrap_or(0),
        rows.iter().filter_map(|r| r.rho).max(),
        rows.iter().filter_map(|r| r.form.clone()).collect(),
    )
}

fn reference_equality_classes() -> BTreeSet<NormalForm> {
    [[1, 1, 1, 3], [1, 1, 4, 6]]
        .iter()
        .map(|w| normal_form(weighted_projective_space(w).base()))
        .collect()
}

/// Number of polytopes in the complete 3D list.
pub const KS3D_COUNT: usize = 4319;

pub(super) fn bounds(curated: &Dataset, ks: Option<&Dataset>) -> Result<SuiteOutput> {
    let eq = equality_forms();
    let reference = reference_equality_classes();
    let rows: Vec<BoundsRow> = curated
        .items
        .par_iter()
        .map(|(n, p)| bounds_row(n, p, &eq, false))
        .collect();
    let (max_deg, max_points, max_rho, classes) = summarize(&rows);
    let mut items: Vec<Item> = rows.into_iter().map(|r| r.item).collect();
    items.push(
        Item::new("curated_equality_classes")
            .value("max_degree", max_deg)
            .value("equality_classes", classes.len())
            .check("max degree is 72", max_deg == Some(72))
            .check(
                "equality exactly on P(1,1,1,3) and P(1,1,4,6)",
                classes == reference,
            ),
    );
    let mut ext = Aggregates {
        max_rho,
        max_degree: max_deg,
        max_points: Some(max_points),
        ..Aggregates::default()
    };
    let hash = match ks {
        None => {
            items.push(Item::new(KS3D_ITEM).skip("no 3D polytope list supplied"));
            curated.hash.clone()
        }
        Some(ds) => {
            let rows: Vec<BoundsRow> = ds
                .items
                .par_iter()
                .map(|(n, p)| bounds_row(n, p, &eq, true))
                .collect();
            let (kdeg, kpoints, krho, kclasses) = summarize(&rows);
            let parsed = ds.items.len() + ds.rejected.len();
            let all_pass = rows.iter().all(|r| r.item.status == Status::Pass);
            items.extend(rows.into_iter().map(|r| r.item));
            items.push(
                Item::new(KS3D_ITEM)
                    .value("parsed", parsed)
                    .value("reflexive", ds.items.len())
                    .value("warnings", ds.warnings.len())
                    .value("max_degree", kdeg)
                    .value("max_lattice_points", kpoints)
                    .value("max_resolution_rho", krho)
                    .check(
                        "4319 polytopes",
                        parsed == KS3D_COUNT && ds.rejected.is_empty(),
                    )
                    .check("max lattice points 39", kpoints == 39)
                    .check("max resolution rho 35", krho == Some(35))
                    .check(
                        "equality exactly on P(1,1,1,3) and P(1,1,4,6)",
                        kclasses == reference,
                    )
                    .check("every polytope passes degree and Mukai checks", all_pass),
            );
            ext.max_rho = ext.max_rho.max(krho);
            ext.max_degree = ext.max_degree.max(kdeg);
            ext.max_points = ext.max_points.max(Some(kpoints));
            ds.hash.clone()
        }
    };
    Ok((hash, items, ext))
}

pub(super) fn rho35(curated: &Dataset, ks: Option<&Dataset>) -> Result<SuiteOutput> {
    let rho_item = |name: &str, p: &ReflexivePolytope| {
        let item = Item::new(name);
        match crepant_resolution(&face_fan(p)) {
            Ok(r) => {
                let rho = picard_rank(&r);
                item.value("resolution_rho", rho)
                    .check("rho <= 35", rho <= 35)
                    .with_witness(p, None)
            }
            Err(e) => failed(item, e),
        }
    };
    let mut items: Vec<Item> = curated
        .items
        .par_iter()
        .map(|(n, p)| rho_item(n, p))
        .collect();
    let hash = match ks {
        None => {
            items.push(Item::new(KS3D_ITEM).skip("no 3D polytope list supplied"));
            curated.hash.clone()
        }
        Some(ds) => {
            let rows: Vec<Item> = ds.items.par_iter().map(|(n, p)| rho_item(n, p)).collect();
            let max: Option<usize> = max_of(&rows, "resolution_rho");
            items.extend(rows);
            items.push(
                Item::new(KS3D_ITEM)
                    .value("max_resolution_rho", max)
                    .check("maximum is 35", max == Some(35)),
            );
            ds.hash.clone()
        }
    };
    let ext = Aggregates {
        max_rho: max_of(&items, "resolution_rho"),
        ..Aggregates::default()
    };
    Ok((hash, items, ext))
}

fn fan_hash(tag: &str, fans: &[&Fan], depth: usize) -> Result<String> {
    let records: Vec<_> = fans.iter().map(|f| f.record()).collect();
    let payload = serde_json::to_vec(&(tag, records, depth))?;
    Ok(super::sha256_hex(&payload))
}

pub(super) fn prop_toric(start: &Fan, depth: usize) -> Result<SuiteOutput> {
    let report = enumerate_fixed_point_blowups(start, depth)?;
    let target = bundle_o3().canonical_key();
    let from_target = start.canonical_key() == target;
    let mut items: Vec<Item> = report
        .nodes
        .par_iter()
        .enumerate()
        .map(|(i, n)| {
            let inv = &n.invariants;
            let mut item = Item::new(format!("node{i}"))
                .value("depth", n.depth)
                .value("rho", inv.picard_rank)
                .value("iota", inv.pseudo_index)
                .value("r", inv.fano_index)
                .value("degree", inv.degree)
                .check("rho <= 8", inv.picard_rank <= 8);
            // recompute from the stored record
            let again = n.fan.record().to_fan().and_then(|f| is_almost_fano(&f));
            item = item.check("invariants re-verify", again.as_ref().ok() == Some(inv));
            match structure_pipeline(&n.fan) {
                Ok(s) => {
                    let steps_ok = s.degrees.windows(2).all(|w| w[1] == w[0] + 8)
                        && s.picard_ranks.windows(2).all(|w| w[1] + 1 == w[0]);
                    item = item
                        .value("m", s.m)
                        .value("base", s.base)
                        .value("flops", s.flops().count())
                        .check("blowdown bookkeeping", steps_ok)
                        .check(
                            "terminal degree <= 72",
                            s.degrees.last().is_some_and(|&d| d <= 72),
                        )
                        .check(
                            "base with rho > 1 only when m = 0",
                            s.m == 0 || !matches!(s.base, Base::P1xP1 | Base::F2),
                        );
                    if inv.picard_rank == 8 {
                        item = item
                            .check("degree 24", inv.degree == 24)
                            .check("six blowdowns", s.m == 6)
                            .check("base P2", s.base == Base::P2)
                            .check(
                                "terminal fan is P(O + O(3))",
                                s.terminal_fan.canonical_key() == target,
                            );
                    }
                }
                Err(e) => item = failed(item, e),
            }
            item
        })
        .collect();
    let mut summary = Item::new("search")
        .value("max_depth", report.max_depth)
        .value("levels", &report.levels)
        .value("max_rho", report.max_rho)
        .value("max_rho_depth", report.max_rho_depth)
        .value("maximal_nodes", report.maximal_nodes)
        .value("maximal_models", report.maximal_models)
        .value("witnesses", &report.witnesses)
        .value("depth_exceeded", report.depth_exceeded)
        .check("max rho <= 8", report.max_rho <= 8)
        .check("frontier exhausted", !report.depth_exceeded);
    if from_target {
        summary = summary
            .check("max rho 8", report.max_rho == 8)
            .check("reached at depth 6", report.max_rho_depth == 6);
    }
    items.push(summary);
    let ext = Aggregates {
        max_rho: Some(report.max_rho),
        max_degree: report.nodes.iter().map(|n| n.invariants.degree).max(),
        ..Aggregates::default()
    };
    Ok((fan_hash("prop_toric", &[start], depth)?, items, ext))
}

pub(super) fn lemma24(depth: usize) -> Result<SuiteOutput> {
    let starts: Vec<(&str, Fan)> = vec![
        ("p_o_o3_over_p2", bundle_o3()),
        ("p3", data::p3()),
        ("p1xp1xp1", data::p1_cubed()),
    ];
    let mut items = Vec::new();
    for (name, start) in &starts {
        let report = enumerate_fixed_point_blowups(start, depth)?;
        let rows: Vec<Item> = report
            .nodes
            .par_iter()
            .enumerate()
            .map(|(i, n)| {
                let item = Item::new(format!("{name}/node{i}"))
                    .value("r", n.invariants.fano_index)
                    .value("degree", n.invariants.degree);
                match model_is_q_factorial(&n.fan) {
                    Err(e) => failed(item, e),
                    Ok(q) => {
                        let item = item.value("model_q_factorial", q);
                        if n.invariants.fano_index != Some(2) || q {
                            item.skip("index is not 2 or the model is Q-factorial")
                        } else {
                            item.check("degree >= 24", n.invariants.degree >= 24)
                        }
                    }
                }
            })
            .collect();
        items.extend(rows);
    }
    let fans: Vec<&Fan> = starts.iter().map(|(_, f)| f).collect();
    let ext = Aggregates {
        max_degree: max_of(&items, "degree"),
        ..Aggregates::default()
    };
    Ok((fan_hash("lemma24", &fans, depth)?, items, ext))
}

pub(super) fn prop_description() -> Result<SuiteOutput> {
    let quadric = data::quadric_cone()?;
    let mut fans: Vec<(String, Fan)> = curated_fans()
        .into_iter()
        .map(|(n, f)| (n.to_string(), f))
        .collect();
    fans.push((
        "quadric_cone_resolution".into(),
        crepant_resolution(&face_fan(&quadric))?,
    ));
    let expected = |name: &str| match name {
        "p3" => Some(4),
        "bundle_a" | "bundle_b" | "quadric_cone_resolution" => Some(3),
        _ => None,
    };
    let mut items: Vec<Item> = fans
        .par_iter()
        .map(|(name, f)| {
            let item = Item::new(name.clone());
            match pseudo_index(f) {
                Ok(iota) => {
                    let item = item.value("iota", iota).check("iota <= 4", iota <= 4);
                    match expected(name) {
                        Some(e) => item.check("expected pseudo-index", iota == e),
                        None => item.check("only P3 reaches 4", iota < 4),
                    }
                }
                Err(e) => failed(item, e),
            }
        })
        .collect();
    let model = pseudo_index_of_model(&quadric);
    items.push(
        Item::new("quadric_cone_model")
            .value("iota", model.as_ref().ok())
            .check("model pseudo-index 3", model.ok() == Some(3)),
    );
    let records: Vec<&Fan> = fans.iter().map(|(_, f)| f).collect();
    Ok((
        fan_hash("prop_description", &records, 0)?,
        items,
        Aggregates::default(),
    ))
}

pub(super) fn almfano_fano() -> Result<SuiteOutput> {
    let fans = curated_fans();
    let target = data::p1_cubed().canonical_key();
    let rows: Vec<(Item, Option<(usize, bool)>)> = fans
        .par_iter()
        .map(|(name, f)| {
            let item = Item::new(*name);
            let inv = match is_almost_fano(f) {
                Ok(i) => i,
                Err(e) => return (failed(item, e), None),
            };
            let item = item
                .value("fano", inv.fano)
                .value("iota", inv.pseudo_index)
                .value("rho", inv.picard_rank);
            if !inv.fano {
                return (item.skip("not Fano"), None);
            }
            if inv.pseudo_index.is_none_or(|i| i <= 1) {
                return (item.skip("pseudo-index 1"), None);
            }
            let is_target = f.canonical_key() == target;
            let item = item.check("rho <= 3", inv.picard_rank <= 3).check(
                "rho = 3 only for P1xP1xP1",
                (inv.picard_rank == 3) == is_target,
            );
            (item, Some((inv.picard_rank, is_target)))
        })
        .collect();
    let admitted: Vec<(usize, bool)> = rows.iter().filter_map(|(_, r)| *r).collect();
    let max = admitted.iter().map(|(r, _)| *r).max();
    let mut items: Vec<Item> = rows.into_iter().map(|(i, _)| i).collect();
    items.push(
        Item::new("maximum")
            .value("max_rho", max)
            .check("max rho 3", max == Some(3))
            .check(
                "attained only by P1xP1xP1",
                admitted
                    .iter()
                    .filter(|(r, _)| Some(*r) == max)
                    .all(|(_, t)| *t),
            ),
    );
    let all: Vec<&Fan> = fans.iter().map(|(_, f)| f).collect();
    let ext = Aggregates {
        max_rho: max,
        ..Aggregates::default()
    };
    Ok((fan_hash("almfano_fano", &all, 0)?, items, ext))
}
