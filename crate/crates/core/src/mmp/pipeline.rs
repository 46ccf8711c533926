use std::collections::{HashSet, VecDeque};

use serde::{Serialize, Serializer};

use super::{contract_fiber_type, extremal_rays, Base, RayKind};
use crate::error::{Error, Result};
use crate::fan::{blowdown, flop_flip, Fan, FanKey, FanRecord};
use crate::geometry::{is_almost_fano, walls};

/// Default number of fans explored per flop plateau.
pub const FLOP_BUDGET: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StepKind {
    /// Simultaneous flop of the listed walls (one extremal ray).
    Flop {
        walls: Vec<(usize, usize)>,
    },
    /// Blowdown of the divisor of a ray, indexed in the `before` fan.
    Blowdown {
        ray: usize,
    },
    FiberContraction {
        base: Base,
    },
}

fn record<S: Serializer>(fan: &Fan, s: S) -> std::result::Result<S::Ok, S::Error> {
    fan.record().serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MmpStep {
    pub kind: StepKind,
    #[serde(serialize_with = "record")]
    pub before: Fan,
    /// The base fan for a fiber contraction, otherwise the resulting fan.
    pub after: FanRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureResult {
    /// All steps in execution order.
    pub steps: Vec<MmpStep>,
    /// Number of blowdowns.
    pub m: usize,
    pub base: Base,
    #[serde(serialize_with = "record")]
    pub terminal_fan: Fan,
    /// `(-K)^3` of the input followed by its value after each blowdown.
    pub degrees: Vec<i64>,
    /// Picard rank of the input followed by its value after each blowdown.
    pub picard_ranks: Vec<usize>,
    pub pseudo_index: i64,
}

impl StructureResult {
    pub fn flops(&self) -> impl Iterator<Item = &MmpStep> {
        self.steps
            .iter()
            .filter(|s| matches!(s.kind, StepKind::Flop { .. }))
    }

    pub fn blowdowns(&self) -> impl Iterator<Item = &MmpStep> {
        self.steps
            .iter()
            .filter(|s| matches!(s.kind, StepKind::Blowdown { .. }))
    }
}

struct Runner {
    budget: usize,
    /// Plateaus already known to fail, keyed with whether a blowdown happened.
    dead: HashSet<(FanKey, bool)>,
}

/// Almost Fano with pseudo-index above one; returns the pseudo-index.
fn admissible(fan: &Fan) -> Result<Option<i64>> {
    let inv = is_almost_fano(fan)?;
    Ok(inv.pseudo_index.filter(|&i| inv.almost_fano && i > 1))
}

impl Runner {
    /// Explores the flop plateau of `fan` breadth-first. At each fan,
    /// divisorial rays are tried before fiber contractions.
    fn plateau(&mut self, fan: &Fan, m: usize) -> Result<Option<Vec<MmpStep>>> {
        let root = fan.canonical_key();
        if self.dead.contains(&(root.clone(), m > 0)) {
            return Ok(None);
        }
        let iota = admissible(fan)?.ok_or(Error::Inconsistent(
            "plateau fan is not almost Fano with pseudo-index above one".into(),
        ))?;
        let mut seen: HashSet<FanKey> = HashSet::from([root.clone()]);
        let mut queue: VecDeque<(Fan, Vec<MmpStep>)> = VecDeque::from([(fan.clone(), Vec::new())]);
        while let Some((cur, path)) = queue.pop_front() {
            let rays = extremal_rays(&cur)?;
            for r in rays.iter().filter(|r| r.kind == RayKind::DivisorialP2Point) {
                let v = r
                    .contracted_ray
                    .expect("divisorial rays name their divisor");
                let next = blowdown(&cur, v)?;
                if admissible(&next)?.is_none() {
                    continue;
                }
                if let Some(rest) = self.plateau(&next, m + 1)? {
                    let mut steps = path.clone();
                    steps.push(MmpStep {
                        kind: StepKind::Blowdown { ray: v },
                        before: cur.clone(),
                        after: next.record(),
                    });
                    steps.extend(rest);
                    return Ok(Some(steps));
                }
            }
            for r in rays.iter().filter(|r| r.kind == RayKind::FiberType) {
                // a non-minimal base is resolved by flopping, like a P1xP1 or F2 base after a blowdown
                let c = match contract_fiber_type(&cur, r) {
                    Err(Error::UnrecognizedBase { .. }) => continue,
                    c => c?,
                };
                if m > 0 && matches!(c.base, Base::P1xP1 | Base::F2) {
                    continue;
                }
                let mut steps = path.clone();
                steps.push(MmpStep {
                    kind: StepKind::FiberContraction { base: c.base },
                    before: cur.clone(),
                    after: c.base_fan,
                });
                return Ok(Some(steps));
            }
            let ws = walls(&cur)?;
            for r in rays.iter().filter(|r| r.kind == RayKind::Flop) {
                let pairs: Vec<(usize, usize)> = r.walls.iter().map(|&w| ws[w].wall_rays).collect();
                let next = flop_all(&cur, &pairs)?;
                if !seen.insert(next.canonical_key()) {
                    continue;
                }
                if seen.len() > self.budget {
                    return Err(Error::FlopBudgetExceeded {
                        budget: self.budget,
                        fan: Box::new(next),
                    });
                }
                if admissible(&next)? != Some(iota) {
                    return Err(Error::Inconsistent("flop changed the pseudo-index".into()));
                }
                let mut steps = path.clone();
                steps.push(MmpStep {
                    kind: StepKind::Flop { walls: pairs },
                    before: cur.clone(),
                    after: next.record(),
                });
                queue.push_back((next, steps));
            }
        }
        self.dead.insert((root, m > 0));
        Ok(None)
    }
}

/// Flops the listed walls one after another. Walls of one extremal class are
/// disjoint, so the order does not matter and ray indices are unchanged.
fn flop_all(fan: &Fan, pairs: &[(usize, usize)]) -> Result<Fan> {
    let mut cur = fan.clone();
    for &p in pairs {
        let w = walls(&cur)?
            .into_iter()
            .find(|w| w.wall_rays == p)
            .ok_or(Error::NotFlopWall(p.0, p.1))?;
        cur = flop_flip(&cur, &w)?;
    }
    Ok(cur)
}

/// Runs the toric MMP with the default flop budget.
pub fn structure_pipeline(fan: &Fan) -> Result<StructureResult> {
    structure_pipeline_with_budget(fan, FLOP_BUDGET)
}

/// Runs blowdowns, flops and a final fiber contraction until the base is
/// reached. Backtracks when a branch ends without an admissible contraction.
pub fn structure_pipeline_with_budget(fan: &Fan, budget: usize) -> Result<StructureResult> {
    if !fan.is_smooth() || fan.dim() != 3 {
        return Err(Error::NotSmooth);
    }
    let inv = is_almost_fano(fan)?;
    if !inv.almost_fano {
        return Err(Error::NotAlmostFano);
    }
    let iota = inv
        .pseudo_index
        .expect("almost Fano fans have a pseudo-index");
    if iota <= 1 {
        return Err(Error::Input(format!(
            "pseudo-index {iota} is not above one"
        )));
    }
    let mut runner = Runner {
        budget,
        dead: HashSet::new(),
    };
    let steps = runner
        .plateau(fan, 0)?
        .ok_or_else(|| Error::Inconsistent("no admissible contraction sequence".into()))?;
    let mut degrees = vec![inv.degree];
    let mut picard_ranks = vec![inv.picard_rank];
    for s in &steps {
        if let StepKind::Blowdown { .. } = s.kind {
            let after = is_almost_fano(&s.after.to_fan()?)?;
            degrees.push(after.degree);
            picard_ranks.push(after.picard_rank);
        }
    }
    let last = steps.last().expect("a run ends with a fiber contraction");
    let base = match last.kind {
        StepKind::FiberContraction { base } => base,
        _ => unreachable!("runs end with a fiber contraction"),
    };
    Ok(StructureResult {
        m: degrees.len() - 1,
        base,
        terminal_fan: last.before.clone(),
        degrees,
        picard_ranks,
        pseudo_index: iota,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::star_subdivision;
    use crate::fan::tests::{p1cubed_fan, p3_fan};
    use crate::lattice::lv;
    use crate::mmp::tests::p1113_resolution;

    #[test]
    fn blowup_of_p3_blows_down() {
        let f = star_subdivision(&p3_fan(), &lv(&[1, 1, 1])).unwrap();
        let r = structure_pipeline(&f).unwrap();
        assert_eq!((r.m, r.base), (1, Base::Point));
        assert_eq!(r.degrees, vec![56, 64]);
        assert_eq!(r.terminal_fan.canonical_key(), p3_fan().canonical_key());
    }

    #[test]
    fn terminal_fans() {
        let r = structure_pipeline(&p1113_resolution()).unwrap();
        assert_eq!((r.m, r.base, r.steps.len()), (0, Base::P2, 1));
        let r = structure_pipeline(&p1cubed_fan()).unwrap();
        assert_eq!((r.m, r.base), (0, Base::P1xP1));
        let r = structure_pipeline(&p3_fan()).unwrap();
        assert_eq!((r.m, r.base, r.pseudo_index), (0, Base::Point, 4));
    }

    #[test]
    fn flop_prefix() {
        // bundle with a flopping section: flop to reach a blowdown or a fibration
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
        let r = structure_pipeline(&f).unwrap();
        assert_eq!(r.m, 0);
        assert!(matches!(r.base, Base::P2 | Base::P1));
    }

    #[test]
    fn rejects_index_one() {
        // P1 x P2 blown up at a point: the strict transform of a line through it has degree one
        let p1p2 = Fan::from_i64(
            &[
                &[1, 0, 0],
                &[-1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[0, -1, -1],
            ],
            &[
                &[0, 2, 3],
                &[0, 2, 4],
                &[0, 3, 4],
                &[1, 2, 3],
                &[1, 2, 4],
                &[1, 3, 4],
            ],
        )
        .unwrap();
        assert!(matches!(
            structure_pipeline(&p1p2).unwrap().base,
            Base::P1 | Base::P2
        ));
        let f = star_subdivision(&p1p2, &lv(&[1, 1, 1])).unwrap();
        assert!(matches!(structure_pipeline(&f), Err(Error::Input(_))));
    }

    #[test]
    fn product_of_lines_blown_up() {
        // the blowdown back to P1 x P1 x P1 would end over P1 x P1 with m = 1,
        // so the run goes through flops instead
        let f = star_subdivision(&p1cubed_fan(), &lv(&[1, 1, 1])).unwrap();
        let r = structure_pipeline(&f).unwrap();
        assert!(r.flops().count() > 0);
        assert!(!matches!(r.base, Base::P1xP1 | Base::F2));
        assert_eq!(r.degrees.first(), Some(&40));
        for w in r.degrees.windows(2) {
            assert_eq!(w[1] - w[0], 8);
        }
    }
}
