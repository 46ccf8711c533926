use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use torifan::fan::{crepant_resolution, read_fans};
use torifan::geometry::{is_almost_fano, model_invariants};
use torifan::mmp::{enumerate_fixed_point_blowups, structure_pipeline_with_budget, FLOP_BUDGET};
use torifan::polytope::{normal_form, parse_palp, read_jsonl, PolytopeRecord};
use torifan::verify::{run_suite, sha256_hex, Status, Suite, SuiteOptions, TOOL_VERSION};
use torifan::{face_fan, Error, Fan, LatticePolytope, ReflexivePolytope};

#[derive(Parser)]
#[command(
    name = "torifan",
    version,
    about = "Reflexive polytopes and toric almost Fano threefolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants of polytopes (PALP or JSON lines) or of smooth fans (`.fan.jsonl`).
    Analyze {
        file: PathBuf,
        /// Read the file as fan records.
        #[arg(long)]
        fans: bool,
        #[arg(long)]
        strict: bool,
    },
    /// Crepant resolution of the face fan of each polytope.
    Resolve {
        file: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Polar duals.
    Dual {
        file: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Normal forms.
    NormalForm {
        file: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Runs the toric MMP on each fan.
    Pipeline {
        file: PathBuf,
        #[arg(long, default_value_t = FLOP_BUDGET)]
        flop_budget: usize,
    },
    /// Iterated torus-fixed-point blowups of the first fan in the file.
    Search {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Include every node of the search in the output.
        #[arg(long)]
        nodes: bool,
    },
    /// Runs a verification suite and prints its report.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        strict: bool,
        /// Start fan for the blowup search.
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    /// Checks ran and something failed.
    Check(Value),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Error> {
    Ok(std::fs::read(path)?)
}

/// Polytopes from a JSON-lines file (first non-blank character `{`) or a PALP file.
fn read_polytopes(
    bytes: &[u8],
    strict: bool,
) -> Result<(Vec<LatticePolytope>, Vec<String>), Error> {
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    if first == Some(&b'{') {
        return Ok((read_jsonl(BufReader::new(bytes))?, Vec::new()));
    }
    let parsed = parse_palp(BufReader::new(bytes), strict)?;
    Ok((parsed.polytopes, parsed.warnings))
}

fn read_fan_file(bytes: &[u8]) -> Result<Vec<Fan>, Error> {
    let fans = read_fans(BufReader::new(bytes))?;
    for f in &fans {
        f.validate()?;
    }
    Ok(fans)
}

fn envelope(bytes: &[u8], results: impl Serialize) -> Value {
    json!({
        "tool_version": TOOL_VERSION,
        "input_hash": sha256_hex(bytes),
        "results": results,
    })
}

fn error_value(e: &Error) -> Value {
    json!({ "error": e.to_string() })
}

fn reflexive(p: LatticePolytope) -> Result<ReflexivePolytope, Error> {
    ReflexivePolytope::new(p)
}

fn run(cmd: Command) -> Result<Value, Failure> {
    match cmd {
        Command::Analyze { file, fans, strict } => {
            let bytes = read_bytes(&file)?;
            let as_fans = fans || file.to_string_lossy().ends_with(".fan.jsonl");
            let results: Vec<Value> = if as_fans {
                read_fan_file(&bytes)?
                    .iter()
                    .map(|f| match is_almost_fano(f) {
                        Ok(inv) => json!({ "fan": f.record(), "invariants": inv }),
                        Err(e) => json!({ "fan": f.record(), "error": e.to_string() }),
                    })
                    .collect()
            } else {
                let (ps, warnings) = read_polytopes(&bytes, strict)?;
                let mut out: Vec<Value> = ps
                    .into_iter()
                    .map(|p| {
                        let reflexivity = p.is_reflexive();
                        let mut v = json!({
                            "vertices": p.vertices(),
                            "points": p.lattice_points().len(),
                            "reflexivity": reflexivity,
                        });
                        if reflexivity.is_reflexive() {
                            let r = reflexive(p).expect("checked reflexive");
                            v["dual_vertices"] = json!(r.dual().vertices());
                            v["invariants"] = match model_invariants(&r) {
                                Ok(inv) => json!(inv),
                                Err(e) => error_value(&e),
                            };
                        }
                        v
                    })
                    .collect();
                out.extend(warnings.into_iter().map(|w| json!({ "warning": w })));
                out
            };
            Ok(envelope(&bytes, results))
        }
        Command::Resolve { file, strict } => {
            let bytes = read_bytes(&file)?;
            let (ps, _) = read_polytopes(&bytes, strict)?;
            let mut results = Vec::new();
            for p in ps {
                let fan = crepant_resolution(&face_fan(&reflexive(p)?))?;
                let inv = is_almost_fano(&fan)?;
                results.push(json!({ "fan": fan.record(), "invariants": inv }));
            }
            Ok(envelope(&bytes, results))
        }
        Command::Dual { file, strict } => {
            let bytes = read_bytes(&file)?;
            let (ps, _) = read_polytopes(&bytes, strict)?;
            let results = ps
                .into_iter()
                .map(|p| Ok(PolytopeRecord::of(reflexive(p)?.dual())))
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(envelope(&bytes, results))
        }
        Command::NormalForm { file, strict } => {
            let bytes = read_bytes(&file)?;
            let (ps, _) = read_polytopes(&bytes, strict)?;
            let results: Vec<_> = ps.iter().map(normal_form).collect();
            Ok(envelope(&bytes, results))
        }
        Command::Pipeline { file, flop_budget } => {
            let bytes = read_bytes(&file)?;
            let mut failed = false;
            let results: Vec<Value> = read_fan_file(&bytes)?
                .iter()
                .map(|f| match structure_pipeline_with_budget(f, flop_budget) {
                    Ok(r) => json!(r),
                    Err(e) => {
                        failed = true;
                        json!({ "fan": f.record(), "error": e.to_string() })
                    }
                })
                .collect();
            let out = envelope(&bytes, results);
            if failed {
                Err(Failure::Check(out))
            } else {
                Ok(out)
            }
        }
        Command::Search { file, depth, nodes } => {
            let bytes = read_bytes(&file)?;
            let fans = read_fan_file(&bytes)?;
            let start = fans
                .first()
                .ok_or_else(|| Error::Input("no fan in input".into()))?;
            let mut report = enumerate_fixed_point_blowups(start, depth)?;
            let exceeded = report.depth_error();
            if !nodes {
                report.nodes.clear();
            }
            let mut out = envelope(&bytes, &report);
            if let Some(e) = exceeded {
                out["error"] = json!(e.to_string());
                return Err(Failure::Check(out));
            }
            Ok(out)
        }
        Command::Verify {
            suite,
            input,
            jobs,
            strict,
            start,
            depth,
        } => {
            let start = match start {
                Some(path) => Some(
                    read_fan_file(&read_bytes(&path)?)?
                        .into_iter()
                        .next()
                        .ok_or_else(|| Error::Input("no fan in start file".into()))?,
                ),
                None => None,
            };
            let opts = SuiteOptions {
                input,
                jobs,
                strict,
                start,
                depth,
            };
            let report = run_suite(suite, &opts)?;
            let out = serde_json::to_value(&report).map_err(Error::from)?;
            if report.status == Status::Fail {
                Err(Failure::Check(out))
            } else {
                Ok(out)
            }
        }
    }
}

fn print(v: &Value) {
    let mut stdout = std::io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut stdout, v);
    let _ = writeln!(stdout);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(v) => {
            print(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Check(v)) => {
            print(&v);
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
