use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fan::{star_subdivision, Fan, FanKey, FanRecord};
use crate::geometry::{is_almost_fano, ToricInvariants};
use crate::lattice::LatticeVector;
use crate::polytope::{normal_form, LatticePolytope, NormalForm};

fn record<S: Serializer>(fan: &Fan, s: S) -> std::result::Result<S::Ok, S::Error> {
    fan.record().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchNode {
    #[serde(serialize_with = "record")]
    pub fan: Fan,
    #[serde(skip)]
    pub key: FanKey,
    /// Normal form of the convex hull of the rays, i.e. of the anticanonical model.
    pub normal_form_key: NormalForm,
    pub depth: usize,
    pub invariants: ToricInvariants,
    /// Index of the parent node and the rays (in parent indexing) of the
    /// cone whose fixed point was blown up.
    pub parent: Option<(usize, [usize; 3])>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub depth: usize,
    pub nodes: usize,
    /// Distinct anticanonical models among the level's nodes.
    pub hull_classes: usize,
}

/// A node of maximal Picard rank with the blowups that reach it from the start.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub node: usize,
    pub depth: usize,
    pub blowups: Vec<[usize; 3]>,
    pub fan: FanRecord,
    pub degree: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub max_depth: usize,
    pub levels: Vec<LevelStats>,
    pub max_rho: usize,
    pub max_rho_depth: usize,
    pub maximal_nodes: usize,
    pub maximal_models: usize,
    pub witnesses: Vec<Witness>,
    /// The frontier was still nonempty at `max_depth`.
    pub depth_exceeded: bool,
    pub nodes: Vec<SearchNode>,
}

impl SearchReport {
    pub fn depth_error(&self) -> Option<Error> {
        self.depth_exceeded
            .then_some(Error::DepthExceeded(self.max_depth))
    }

    /// Blowup centers from the start to `node`.
    pub fn path(&self, node: usize) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some((p, c)) = self.nodes[cur].parent {
            out.push(c);
            cur = p;
        }
        out.reverse();
        out
    }
}

/// Whether the anticanonical model of a smooth almost Fano fan, the face fan
/// of the hull of its rays, is simplicial.
pub fn model_is_q_factorial(fan: &Fan) -> Result<bool> {
    let p = LatticePolytope::new(fan.rays())?;
    Ok(p.facet_vertices().iter().all(|f| f.len() == p.dim()))
}

fn make_node(
    fan: Fan,
    depth: usize,
    parent: Option<(usize, [usize; 3])>,
) -> Result<Option<SearchNode>> {
    let inv = is_almost_fano(&fan)?;
    if !inv.almost_fano || inv.pseudo_index.is_none_or(|i| i <= 1) {
        return Ok(None);
    }
    Ok(Some(SearchNode {
        key: fan.canonical_key(),
        normal_form_key: normal_form(&LatticePolytope::new(fan.rays())?),
        depth,
        invariants: inv,
        parent,
        fan,
    }))
}

fn children(node: &SearchNode, index: usize) -> Result<Vec<SearchNode>> {
    let mut out = Vec::new();
    for c in node.fan.cones() {
        let r = c.rays();
        let center: LatticeVector = r
            .iter()
            .fold(LatticeVector::zero(node.fan.dim()), |acc, &i| {
                &acc + node.fan.ray(i)
            });
        let fan = star_subdivision(&node.fan, &center)?;
        if let Some(child) = make_node(fan, node.depth + 1, Some((index, [r[0], r[1], r[2]])))? {
            out.push(child);
        }
    }
    Ok(out)
}

/// Breadth-first search over sequences of torus-fixed point blowups. Nodes
/// are identified up to lattice isomorphism of the fan; each level is sorted
/// canonically, so the report does not depend on the thread count.
pub fn enumerate_fixed_point_blowups(start: &Fan, max_depth: usize) -> Result<SearchReport> {
    if !start.is_smooth() || start.dim() != 3 {
        return Err(Error::NotSmooth);
    }
    let root = make_node(start.clone(), 0, None)?.ok_or(Error::NotAlmostFano)?;
    let mut seen: BTreeSet<FanKey> = BTreeSet::from([root.key.clone()]);
    let mut nodes = vec![root];
    let mut frontier: Vec<usize> = vec![0];
    let mut depth = 0;
    while !frontier.is_empty() && depth < max_depth {
        let batches: Vec<Vec<SearchNode>> = frontier
            .par_iter()
            .map(|&i| children(&nodes[i], i))
            .collect::<Result<_>>()?;
        let mut next: Vec<SearchNode> = batches.into_iter().flatten().collect();
        next.sort_by(|a, b| (&a.key, a.parent).cmp(&(&b.key, b.parent)));
        frontier.clear();
        for n in next {
            if seen.insert(n.key.clone()) {
                frontier.push(nodes.len());
                nodes.push(n);
            }
        }
        depth += 1;
    }
    let depth_exceeded = !frontier.is_empty()
        && frontier
            .par_iter()
            .map(|&i| children(&nodes[i], i).map(|c| !c.is_empty()))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .any(|b| b);

    let mut by_depth: BTreeMap<usize, (usize, BTreeSet<&NormalForm>)> = BTreeMap::new();
    for n in &nodes {
        let e = by_depth.entry(n.depth).or_default();
        e.0 += 1;
        e.1.insert(&n.normal_form_key);
    }
    let levels = by_depth
        .into_iter()
        .map(|(depth, (nodes, hulls))| LevelStats {
            depth,
            nodes,
            hull_classes: hulls.len(),
        })
        .collect();
    let max_rho = nodes
        .iter()
        .map(|n| n.invariants.picard_rank)
        .max()
        .expect("root exists");
    let maximal: Vec<usize> = (0..nodes.len())
        .filter(|&i| nodes[i].invariants.picard_rank == max_rho)
        .collect();
    let max_rho_depth = nodes[maximal[0]].depth;
    let maximal_models = maximal
        .iter()
        .map(|&i| &nodes[i].normal_form_key)
        .collect::<BTreeSet<_>>()
        .len();
    let mut report = SearchReport {
        max_depth,
        levels,
        max_rho,
        max_rho_depth,
        maximal_nodes: maximal.len(),
        maximal_models,
        witnesses: Vec::new(),
        depth_exceeded,
        nodes,
    };
    report.witnesses = maximal
        .iter()
        .map(|&i| Witness {
            node: i,
            depth: report.nodes[i].depth,
            blowups: report.path(i),
            fan: report.nodes[i].fan.record(),
            degree: report.nodes[i].invariants.degree,
        })
        .collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::tests::{p1cubed_fan, p3_fan};

    #[test]
    fn product_of_lines() {
        // -K stays divisible by 2 after each blowup, so index two survives
        let r = enumerate_fixed_point_blowups(&p1cubed_fan(), 8).unwrap();
        assert_eq!(
            r.levels.iter().map(|l| l.nodes).collect::<Vec<_>>(),
            vec![1, 1, 2, 1, 1]
        );
        assert_eq!(
            (r.max_rho, r.max_rho_depth, r.depth_exceeded),
            (7, 4, false)
        );
        assert_eq!(r.witnesses[0].degree, 16);
    }

    #[test]
    fn shallow_search_from_p3() {
        let r = enumerate_fixed_point_blowups(&p3_fan(), 2).unwrap();
        // the second center is either another vertex or a point on the exceptional divisor
        assert_eq!(
            r.levels.iter().map(|l| l.nodes).collect::<Vec<_>>(),
            vec![1, 1, 2]
        );
        assert_eq!(r.max_rho, 3);
        assert_eq!(r.witnesses[0].blowups.len(), 2);
        assert!(r.depth_exceeded);
    }
}
