//! Text formats: the `p gcsp` instance format for formulas and the DIMACS
//! `p edge` format for graphs.
//!
//! Instance format:
//!
//! ```text
//! p gcsp <n> <m> <k> <t>
//! t <id> <tuple> <tuple> ...     one line per template; tuples are k-digit
//!                                base-t strings (satisfying tuples)
//! e <template-id> <v_1> .. <v_k> [<s_1> .. <s_k>]   constraints; optional
//!                                signs from {+,-}; variables 0-indexed
//! ```
//!
//! Lines starting with `c` are comments. Graphs use DIMACS conventions
//! with 1-indexed vertices.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{BitTable, Constraint, Formula, Graph, TemplateSet};

pub fn write_instance(f: &Formula) -> Result<String> {
    let ts = &f.templates;
    if ts.t > 10 {
        return Err(Error::DomainError(
            "instance text format supports domain sizes up to 10".into(),
        ));
    }
    let mut out = format!("p gcsp {} {} {} {}\n", f.n, f.m(), ts.k, ts.t);
    for tpl in &ts.templates {
        out.push_str(&format!("t {}", tpl.id));
        for idx in tpl.sat.iter_ones() {
            let tuple = crate::model::index_tuple(idx, ts.t, ts.k);
            out.push(' ');
            for d in tuple {
                out.push(char::from_digit(d as u32, 10).unwrap());
            }
        }
        out.push('\n');
    }
    for c in &f.constraints {
        out.push_str(&format!("e {}", c.template));
        for &v in &c.vars {
            out.push_str(&format!(" {v}"));
        }
        if let Some(signs) = &c.signs {
            for &s in signs {
                out.push_str(if s { " -" } else { " +" });
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_instance(text: &str) -> Result<Formula> {
    let mut header: Option<(usize, usize, usize, u8)> = None;
    let mut relations: Vec<BitTable> = Vec::new();
    let mut constraints: Vec<Constraint> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |reason: String| Error::Parse {
            line: lineno + 1,
            reason,
        };
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if fields.len() != 6 || fields[1] != "gcsp" {
                    return Err(err("expected `p gcsp <n> <m> <k> <t>`".into()));
                }
                let vals: Vec<usize> = fields[2..6]
                    .iter()
                    .map(|s| s.parse().map_err(|_| err(format!("bad number `{s}`"))))
                    .collect::<Result<_>>()?;
                header = Some((vals[0], vals[1], vals[2], vals[3] as u8));
            }
            "t" => {
                let (_, _, k, t) = header.ok_or_else(|| err("template before header".into()))?;
                let id: usize = fields
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad template id".into()))?;
                if id != relations.len() {
                    return Err(err(format!(
                        "template ids must be consecutive from 0; expected {}, got {id}",
                        relations.len()
                    )));
                }
                let mut rel = BitTable::zeros((t as usize).pow(k as u32));
                for tok in &fields[2..] {
                    if tok.len() != k {
                        return Err(err(format!("tuple `{tok}` is not {k} digits")));
                    }
                    let mut tuple = Vec::with_capacity(k);
                    for ch in tok.chars() {
                        let d = ch
                            .to_digit(10)
                            .filter(|&d| d < t as u32)
                            .ok_or_else(|| err(format!("bad digit `{ch}` for domain {t}")))?;
                        tuple.push(d as u8);
                    }
                    rel.set(crate::model::tuple_index(&tuple, t), true);
                }
                relations.push(rel);
            }
            "e" => {
                let (_, _, k, _) = header.ok_or_else(|| err("constraint before header".into()))?;
                let id: u32 = fields
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad template id".into()))?;
                let rest = &fields[2..];
                if rest.len() != k && rest.len() != 2 * k {
                    return Err(err(format!(
                        "expected {k} variables (optionally followed by {k} signs)"
                    )));
                }
                let vars: Vec<u32> = rest[..k]
                    .iter()
                    .map(|s| s.parse().map_err(|_| err(format!("bad variable `{s}`"))))
                    .collect::<Result<_>>()?;
                let signs = if rest.len() == 2 * k {
                    let mut signs = Vec::with_capacity(k);
                    for s in &rest[k..] {
                        signs.push(match *s {
                            "+" => false,
                            "-" => true,
                            other => return Err(err(format!("bad sign `{other}`"))),
                        });
                    }
                    Some(signs)
                } else {
                    None
                };
                constraints.push(Constraint {
                    template: id,
                    vars,
                    signs,
                });
            }
            other => return Err(err(format!("unknown line type `{other}`"))),
        }
    }
    let (n, m, k, t) = header.ok_or_else(|| Error::Parse {
        line: 0,
        reason: "missing `p gcsp` header".into(),
    })?;
    if constraints.len() != m {
        return Err(Error::Parse {
            line: 0,
            reason: format!("header says m = {m}, found {} constraints", constraints.len()),
        });
    }
    let ts = Arc::new(TemplateSet::new(t, k, relations)?);
    Formula::new(n, ts, constraints)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n, g.m());
    for &(u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |reason: String| Error::Parse {
            line: lineno + 1,
            reason,
        };
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if fields.len() != 4 || fields[1] != "edge" {
                    return Err(err("expected `p edge <n> <m>`".into()));
                }
                n = Some(
                    fields[2]
                        .parse()
                        .map_err(|_| err("bad vertex count".into()))?,
                );
            }
            "e" => {
                if fields.len() != 3 {
                    return Err(err("expected `e <u> <v>`".into()));
                }
                let u: u32 = fields[1].parse().map_err(|_| err("bad vertex".into()))?;
                let v: u32 = fields[2].parse().map_err(|_| err("bad vertex".into()))?;
                if u == 0 || v == 0 {
                    return Err(err("vertices are 1-indexed".into()));
                }
                edges.push((u - 1, v - 1));
            }
            other => return Err(err(format!("unknown line type `{other}`"))),
        }
    }
    let n = n.ok_or_else(|| Error::Parse {
        line: 0,
        reason: "missing `p edge` header".into(),
    })?;
    Graph::new(n, edges)
}

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        context: format!("reading {}", path.display()),
        source,
    })
}

pub fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        context: format!("writing {}", path.display()),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_sat_neg, named_family, GenModel, GenSpec, NamedFamily};

    #[test]
    fn instance_roundtrip() {
        let ts = Arc::new(named_family(NamedFamily::KSat, 3).unwrap());
        let spec = GenSpec::new(GenModel::SatNeg, 8, 20, ts, 5);
        let f = gen_sat_neg(&spec).unwrap();
        let text = write_instance(&f).unwrap();
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed.n, f.n);
        assert_eq!(parsed.constraints, f.constraints);
        assert_eq!(parsed.templates.templates, f.templates.templates);
        // byte stability
        assert_eq!(write_instance(&parsed).unwrap(), text);
    }

    #[test]
    fn graph_roundtrip() {
        let g = crate::gen::gen_graph(10, 15, 3, 0).unwrap();
        let text = write_graph(&g);
        let parsed = parse_graph(&text).unwrap();
        assert_eq!(parsed, g);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_instance("p gcsp 3 1 2\n").is_err());
        assert!(parse_instance("p gcsp 3 0 2 2\nx nonsense\n").is_err());
        assert!(parse_graph("p edge 3 1\ne 0 1\n").is_err());
    }
}
