//! PALP matrix files and the native JSON-lines polytope format.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::LatticePolytope;
use crate::error::{Error, Result};
use crate::lattice::hull::check_dim;
use crate::lattice::LatticeVector;

/// Outcome of a lenient parse: the polytopes read and one warning per skipped
/// record.
#[derive(Clone, Debug, Default)]
pub struct PalpParse {
    pub polytopes: Vec<LatticePolytope>,
    pub warnings: Vec<String>,
}

fn parse_ints(line: &str) -> Option<Vec<i64>> {
    line.split_whitespace().map(|t| t.parse().ok()).collect()
}

fn parse_header(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        it.next()
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| Error::MalformedHeader {
                line: lineno,
                message: format!("expected {what} count"),
            })
    };
    let r = next("row")?;
    let c = next("column")?;
    if r == 0 || c == 0 {
        return Err(Error::MalformedHeader {
            line: lineno,
            message: "zero-sized matrix".into(),
        });
    }
    Ok((r, c))
}

/// Reads polytopes in PALP matrix format. Points are the columns when the
/// header has `rows <= cols`, otherwise the rows. In strict mode the first
/// malformed record is an error; otherwise it is skipped with a warning.
pub fn parse_palp<R: BufRead>(reader: R, strict: bool) -> Result<PalpParse> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)));
    let mut out = PalpParse::default();

    let fail = |out: &mut PalpParse, e: Error| -> Result<()> {
        if strict {
            return Err(e);
        }
        out.warnings.push(e.to_string());
        Ok(())
    };

    while let Some(item) = lines.next() {
        let (lineno, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let (r, c) = match parse_header(&line, lineno) {
            Ok(rc) => rc,
            Err(e) => {
                fail(&mut out, e)?;
                continue;
            }
        };
        let mut rows = Vec::with_capacity(r);
        let mut bad: Option<Error> = None;
        for _ in 0..r {
            let Some(item) = lines.next() else {
                bad.get_or_insert(Error::MalformedRecord {
                    line: lineno,
                    message: "unexpected end of input".into(),
                });
                break;
            };
            let (ln, l) = item?;
            match parse_ints(&l) {
                Some(v) if v.len() == c => rows.push(v),
                Some(v) => {
                    bad.get_or_insert(Error::MalformedRecord {
                        line: ln,
                        message: format!("expected {c} integers, found {}", v.len()),
                    });
                }
                None => {
                    bad.get_or_insert(Error::MalformedRecord {
                        line: ln,
                        message: "non-integer entry".into(),
                    });
                }
            }
        }
        if let Some(e) = bad {
            fail(&mut out, e)?;
            continue;
        }
        let (dim, points): (usize, Vec<LatticeVector>) = if r <= c {
            (
                r,
                (0..c)
                    .map(|j| {
                        LatticeVector::from_i64(&rows.iter().map(|row| row[j]).collect::<Vec<_>>())
                    })
                    .collect(),
            )
        } else {
            (
                c,
                rows.iter()
                    .map(|row| LatticeVector::from_i64(row))
                    .collect(),
            )
        };
        let built = check_dim(dim).and_then(|_| LatticePolytope::new(&points));
        match built {
            Ok(p) => out.polytopes.push(p),
            Err(e) => fail(
                &mut out,
                Error::MalformedRecord {
                    line: lineno,
                    message: e.to_string(),
                },
            )?,
        }
    }
    Ok(out)
}

/// Writes polytopes in PALP format, one `dim n_vertices` header per record
/// with vertices as columns.
pub fn emit_palp<W: Write>(polytopes: &[LatticePolytope], mut w: W) -> Result<()> {
    for p in polytopes {
        let verts: Vec<Vec<i64>> = p
            .vertices()
            .iter()
            .map(|v| v.to_i64().ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        writeln!(w, "{} {}", p.dim(), verts.len())?;
        for i in 0..p.dim() {
            let row: Vec<String> = verts.iter().map(|v| v[i].to_string()).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
    }
    Ok(())
}

/// One line of the native polytope format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeRecord {
    pub dim: usize,
    pub vertices: Vec<LatticeVector>,
}

impl PolytopeRecord {
    pub fn of(p: &LatticePolytope) -> Self {
        Self {
            dim: p.dim(),
            vertices: p.vertices().to_vec(),
        }
    }

    pub fn to_polytope(&self) -> Result<LatticePolytope> {
        if let Some(v) = self.vertices.iter().find(|v| v.dim() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        check_dim(self.dim)?;
        LatticePolytope::new(&self.vertices)
    }
}

pub fn write_jsonl<W: Write>(polytopes: &[LatticePolytope], mut w: W) -> Result<()> {
    for p in polytopes {
        serde_json::to_writer(&mut w, &PolytopeRecord::of(p))?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<LatticePolytope>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PolytopeRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                line: i + 1,
                message: e.to_string(),
            })?;
        out.push(rec.to_polytope()?);
    }
    Ok(out)
}
