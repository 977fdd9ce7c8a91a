use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::contour::{PljContour, Prim};
use crate::error::{Error, Result};
use crate::grid::fmt_f64;
use crate::levy::{PathRepr, SampledPath};
use crate::splitting::TestReport;
use crate::tree::{ChronoTree, Individual};

#[derive(Serialize)]
struct TreeLine {
    id: u64,
    parent: Option<u64>,
    birth: serde_json::Number,
    death: serde_json::Number,
    speed: serde_json::Number,
}

fn number(x: f64) -> serde_json::Number {
    // 17 significant digits always reparse to the same bits.
    fmt_f64(x).parse().expect("finite float formats as a JSON number")
}

/// One individual per line, exploration order, fixed key order.
pub fn tree_to_jsonl(tree: &ChronoTree) -> String {
    let mut out = String::new();
    for ind in tree.individuals() {
        let line = TreeLine {
            id: ind.id,
            parent: ind.parent,
            birth: number(ind.birth),
            death: number(ind.death),
            speed: number(ind.speed),
        };
        out.push_str(&serde_json::to_string(&line).expect("plain struct serializes"));
        out.push('\n');
    }
    out
}

pub fn tree_from_jsonl(text: &str) -> Result<ChronoTree> {
    let mut inds = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ind: Individual = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: k + 1,
            msg: e.to_string(),
        })?;
        inds.push(ind);
    }
    ChronoTree::new(inds)
}

pub fn load_tree(path: impl AsRef<Path>) -> Result<ChronoTree> {
    tree_from_jsonl(&fs::read_to_string(path)?)
}

pub fn save_tree(tree: &ChronoTree, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, tree_to_jsonl(tree))?;
    Ok(())
}

pub fn contour_to_csv(c: &PljContour) -> String {
    let mut out = String::from("kind,a,b\n");
    for p in c.prims() {
        match *p {
            Prim::Jump(s) => writeln!(out, "J,{},", fmt_f64(s)),
            Prim::Fall { drop, speed } => {
                writeln!(out, "F,{},{}", fmt_f64(drop * speed), fmt_f64(1.0 / speed))
            }
        }
        .expect("writing to a String");
    }
    out
}

/// A parsed contour and whether canonicalization changed it.
pub struct LoadedContour {
    pub contour: PljContour,
    pub was_canonical: bool,
}

pub fn contour_from_csv(text: &str) -> Result<LoadedContour> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    if headers.iter().collect::<Vec<_>>() != ["kind", "a", "b"] {
        return Err(Error::Parse {
            line: 1,
            msg: "expected header kind,a,b".into(),
        });
    }
    let mut prims = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("missing column {}", i + 1),
                })?
                .parse::<f64>()
                .map_err(|e| Error::Parse {
                    line,
                    msg: e.to_string(),
                })
        };
        let prim = match rec.get(0) {
            Some("J") => {
                let s = field(1)?;
                if !(s > 0.0) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("jump size {s} must be positive"),
                    });
                }
                Prim::Jump(s)
            }
            Some("F") => {
                let (d, r) = (field(1)?, field(2)?);
                if !(d > 0.0 && r > 0.0) {
                    return Err(Error::Parse {
                        line,
                        msg: "fall duration and rate must be positive".into(),
                    });
                }
                Prim::fall(d, r)
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown kind {:?}", other.unwrap_or("")),
                })
            }
        };
        prims.push(prim);
    }
    let n = prims.len();
    let contour = PljContour::new(prims)?;
    // Canonicalization only merges, so an unchanged length means no change.
    Ok(LoadedContour {
        was_canonical: contour.prims().len() == n,
        contour,
    })
}

pub fn load_contour(path: impl AsRef<Path>) -> Result<LoadedContour> {
    contour_from_csv(&fs::read_to_string(path)?)
}

pub fn save_contour(c: &PljContour, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, contour_to_csv(c))?;
    Ok(())
}

/// `t,x` rows for every breakpoint, both sides of each jump.
pub fn path_to_csv(p: &SampledPath) -> String {
    let mut out = String::new();
    match &p.repr {
        PathRepr::Exact(_) => out.push_str("# exact\n"),
        PathRepr::Euler { step, .. } => writeln!(out, "# euler step={}", fmt_f64(*step)).unwrap(),
    }
    if let Some(k) = p.killed_at {
        writeln!(out, "# killed_at={}", fmt_f64(k)).unwrap();
    }
    out.push_str("t,x\n");
    for (t, x) in p.breakpoints() {
        writeln!(out, "{},{}", fmt_f64(t), fmt_f64(x)).unwrap();
    }
    out
}

pub fn reports_to_csv(reports: &[TestReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["test", "statistic", "value", "p_value", "n", "pass"])
        .expect("in-memory write");
    for r in reports {
        w.write_record([
            r.test.clone(),
            r.statistic.clone(),
            fmt_f64(r.value),
            fmt_f64(r.p_value),
            r.n.to_string(),
            r.pass.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
