//! Checked statements over curated and external polytope sets, with
//! reproducible JSON reports.

pub mod data;
mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::geometry::ToricInvariants;
use crate::polytope::{parse_palp, PolytopeRecord, ReflexivePolytope};

pub use suites::{class_rank_by_smith, resolution_picard_rank_by_cartier};

pub const SCHEMA: &str = "torifan.report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable naming the external 3D reflexive polytope list.
/// Item carrying the checks on the external 3D list.
pub const KS3D_ITEM: &str = "ks3d";

pub const KS3D_ENV: &str = "TORIFAN_KS3D";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Fact1,
    Fact2,
    Bounds,
    Mukai,
    PropToric,
    PropDescription,
    Lemma24,
    AlmfanoFano,
    Rho35,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Fact1,
        Suite::Fact2,
        Suite::Bounds,
        Suite::Mukai,
        Suite::PropToric,
        Suite::PropDescription,
        Suite::Lemma24,
        Suite::AlmfanoFano,
        Suite::Rho35,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Fact1 => "fact1",
            Suite::Fact2 => "fact2",
            Suite::Bounds => "bounds",
            Suite::Mukai => "mukai",
            Suite::PropToric => "prop_toric",
            Suite::PropDescription => "prop_description",
            Suite::Lemma24 => "lemma24",
            Suite::AlmfanoFano => "almfano_fano",
            Suite::Rho35 => "rho35",
        }
    }

    /// The statement a suite checks.
    pub fn statement(self) -> &'static str {
        MANIFEST
            .iter()
            .find(|(s, _)| *s == self)
            .map(|(_, t)| *t)
            .expect("every suite is listed")
    }
}

/// Suite to checked statement.
pub const MANIFEST: [(Suite, &str); 9] = [
    (Suite::Fact1, "the divisor class group of the toric variety of a 3D reflexive polytope has rank #vertices - 3"),
    (Suite::Fact2, "a crepant resolution of that variety has Picard rank #lattice points - 4"),
    (
        Suite::Bounds,
        "Gorenstein toric Fano threefolds have (-K)^3 <= 72, with equality exactly for P(1,1,1,3) and P(1,1,4,6); \
         the full 3D list has 4319 members with at most 39 lattice points",
    ),
    (
        Suite::Mukai,
        "rho (iota - 1) <= 3 for Gorenstein toric Fano threefolds, with equality only for P3 and P1xP1xP1",
    ),
    (
        Suite::PropToric,
        "smooth toric almost Fano threefolds with pseudo-index > 1 reached by fixed-point blowups have rho <= 8; \
         equality holds at six blowups of P(O + O(3)), which flop and blow down back to it",
    ),
    (
        Suite::PropDescription,
        "pseudo-index is at most 4 with equality only for P3; the quadric cone and the bundles \
         P(O + O(1) + O(1)) and P(O + O + O(2)) over P1 have pseudo-index 3",
    ),
    (
        Suite::Lemma24,
        "a smooth toric almost Fano threefold of index 2 with non-Q-factorial anticanonical model has (-K)^3 >= 24",
    ),
    (
        Suite::AlmfanoFano,
        "smooth toric Fano threefolds with pseudo-index > 1 have rho <= 3, with equality only for P1xP1xP1",
    ),
    (Suite::Rho35, "crepant resolutions of 3D reflexive polytopes have Picard rank at most 35"),
];

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "bound72" => "bounds",
            "thm_almfano_fano" => "almfano_fano",
            other => other,
        };
        Suite::ALL
            .into_iter()
            .find(|x| x.id() == alias)
            .ok_or_else(|| Error::Input(format!("unknown suite `{s}`")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// Enough to reproduce a failure in isolation.
#[derive(Clone, Debug, Serialize)]
pub struct FailWitness {
    pub vertices: Vec<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<ToricInvariants>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Item {
    pub id: String,
    pub status: Status,
    pub values: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FailWitness>,
}

impl Item {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            status: Status::Pass,
            values: BTreeMap::new(),
            witness: None,
        }
    }

    pub fn value(mut self, key: &str, v: impl Serialize) -> Self {
        self.values.insert(
            key.to_string(),
            serde_json::to_value(v).expect("report values serialize"),
        );
        self
    }

    /// Fails the item unless `ok`; a failed check is recorded by name.
    pub fn check(mut self, name: &str, ok: bool) -> Self {
        if !ok {
            self.status = Status::Fail;
            let failed = self
                .values
                .entry("failed_checks".into())
                .or_insert_with(|| serde_json::Value::Array(Vec::new()));
            if let serde_json::Value::Array(a) = failed {
                a.push(name.into());
            }
        }
        self
    }

    pub fn skip(mut self, reason: &str) -> Self {
        self.status = Status::Skip;
        self.value("skip_reason", reason)
    }

    pub fn with_witness(
        mut self,
        p: &ReflexivePolytope,
        invariants: Option<ToricInvariants>,
    ) -> Self {
        if self.status == Status::Fail {
            let nf = crate::polytope::canonical_points(p.vertices());
            self.witness = Some(FailWitness {
                vertices: nf.iter().filter_map(|v| v.to_i64()).collect(),
                invariants,
            });
        }
        self
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Aggregates {
    pub items: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rho: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub suite: Suite,
    pub statement: &'static str,
    pub input_hash: String,
    pub status: Status,
    pub aggregates: Aggregates,
    pub items: Vec<Item>,
}

impl VerificationReport {
    fn new(suite: Suite, input_hash: String, items: Vec<Item>, extrema: Aggregates) -> Self {
        let count = |s: Status| items.iter().filter(|i| i.status == s).count();
        let aggregates = Aggregates {
            items: items.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skip),
            ..extrema
        };
        let status = if aggregates.failed > 0 {
            Status::Fail
        } else if aggregates.passed == 0
            || items
                .iter()
                .any(|i| i.id == KS3D_ITEM && i.status == Status::Skip)
        {
            // suites that need the external list are skipped without it
            Status::Skip
        } else {
            Status::Pass
        };
        Self {
            schema: SCHEMA,
            tool_version: TOOL_VERSION,
            suite,
            statement: suite.statement(),
            input_hash,
            status,
            aggregates,
            items,
        }
    }

    pub fn item(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.id == id)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// A PALP file replacing the curated set (or, for the bounds suites,
    /// supplying the full 3D list).
    pub input: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub strict: bool,
    /// Start fan and depth for the blowup search.
    pub start: Option<Fan>,
    pub depth: Option<usize>,
}

/// A named set of polytopes and the hash that identifies it in reports.
pub struct Dataset {
    pub items: Vec<(String, ReflexivePolytope)>,
    /// Records that were not reflexive 3D polytopes, by name.
    pub rejected: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub hash: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Dataset {
    pub fn curated() -> Result<Self> {
        let items = data::curated_polytopes()?;
        let records: Vec<PolytopeRecord> = items
            .iter()
            .map(|(_, p)| PolytopeRecord::of(p.base()))
            .collect();
        let hash = sha256_hex(&serde_json::to_vec(&records)?);
        Ok(Self {
            items,
            rejected: Vec::new(),
            warnings: Vec::new(),
            hash,
        })
    }

    pub fn from_palp(path: &Path, strict: bool) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let parsed = parse_palp(BufReader::new(bytes.as_slice()), strict)?;
        let mut items = Vec::new();
        let mut rejected = Vec::new();
        for (i, p) in parsed.polytopes.into_iter().enumerate() {
            let name = format!("#{}", i + 1);
            if p.dim() != 3 {
                rejected.push((name, format!("dimension {}", p.dim())));
                continue;
            }
            match ReflexivePolytope::new(p) {
                Ok(r) => items.push((name, r)),
                Err(e) => rejected.push((name, e.to_string())),
            }
        }
        Ok(Self {
            items,
            rejected,
            warnings: parsed.warnings,
            hash: sha256_hex(&bytes),
        })
    }
}

fn ks_path(opts: &SuiteOptions) -> Option<PathBuf> {
    opts.input.clone().or_else(|| {
        std::env::var_os(KS3D_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}

/// Runs a suite. Input problems (unreadable or malformed files in strict
/// mode) are errors; failed checks are reported in the report's items.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<VerificationReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Input(e.to_string()))?;
    pool.install(|| run_in_pool(suite, opts))
}

fn run_in_pool(suite: Suite, opts: &SuiteOptions) -> Result<VerificationReport> {
    let dataset = || -> Result<Dataset> {
        match &opts.input {
            Some(p) => Dataset::from_palp(p, opts.strict),
            None => Dataset::curated(),
        }
    };
    let (hash, items, extrema) = match suite {
        Suite::Fact1 => suites::fact1(&dataset()?),
        Suite::Fact2 => suites::fact2(&dataset()?),
        Suite::Mukai => suites::mukai(&dataset()?),
        Suite::Bounds | Suite::Rho35 => {
            let curated = Dataset::curated()?;
            let ks = match ks_path(opts) {
                Some(p) => Some(Dataset::from_palp(&p, opts.strict)?),
                None => None,
            };
            if suite == Suite::Bounds {
                suites::bounds(&curated, ks.as_ref())
            } else {
                suites::rho35(&curated, ks.as_ref())
            }
        }
        Suite::PropToric => {
            let start = opts.start.clone().unwrap_or_else(data::bundle_o3);
            suites::prop_toric(&start, opts.depth.unwrap_or(8))
        }
        Suite::PropDescription => suites::prop_description(),
        Suite::Lemma24 => suites::lemma24(opts.depth.unwrap_or(8)),
        Suite::AlmfanoFano => suites::almfano_fano(),
    }?;
    Ok(VerificationReport::new(suite, hash, items, extrema))
}
