//! Line-based curve text format.
//!
//! ```text
//! # a vine with three nodes
//! vertex C1 1
//! vertex C2 1
//! edge C1 C2
//! edge C1 C2
//! edge C1 C2
//! ```
//!
//! `vertex <id> <genus>` declares one component per line (order is
//! significant and fixes multidegree coordinates), `edge <id> <id>` one
//! node per line (loops allowed). Optional `twister <c1,...,cγ>` lines
//! supply custom twister-lattice generators. `#` starts a comment.

use crate::error::Error;
use crate::graph::DualGraph;
use crate::Result;

/// A parsed curve file: the dual graph plus optional custom twister
/// generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFile {
    pub graph: DualGraph,
    pub custom_generators: Vec<Vec<i64>>,
}

pub fn parse_curve(text: &str) -> Result<CurveFile> {
    let mut vertices: Vec<(String, u32)> = Vec::new();
    let mut edge_names: Vec<(String, String, usize)> = Vec::new();
    let mut generators: Vec<(Vec<i64>, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let directive = parts.next().unwrap();
        let args: Vec<&str> = parts.collect();
        let err = |msg: String| Error::Parse { line: lineno, msg };
        match directive {
            "vertex" => {
                if args.len() != 2 {
                    return Err(err("expected `vertex <id> <genus>`".into()));
                }
                let id = args[0].to_string();
                if id.contains('@') {
                    return Err(err(format!(
                        "vertex id `{id}` may not contain '@' (reserved for blow-ups)"
                    )));
                }
                let genus: u32 = args[1]
                    .parse()
                    .map_err(|_| err(format!("bad genus `{}`", args[1])))?;
                vertices.push((id, genus));
            }
            "edge" => {
                if args.len() != 2 {
                    return Err(err("expected `edge <id> <id>`".into()));
                }
                edge_names.push((args[0].to_string(), args[1].to_string(), lineno));
            }
            "twister" => {
                if args.len() != 1 {
                    return Err(err("expected `twister <c1,...,cγ>`".into()));
                }
                let coeffs: std::result::Result<Vec<i64>, _> =
                    args[0].split(',').map(|t| t.trim().parse()).collect();
                match coeffs {
                    Ok(c) => generators.push((c, lineno)),
                    Err(_) => return Err(err(format!("bad twister vector `{}`", args[0]))),
                }
            }
            other => {
                return Err(err(format!("unknown directive `{other}`")));
            }
        }
    }

    let index_of = |id: &str| vertices.iter().position(|(v, _)| v == id);
    let mut edges = Vec::with_capacity(edge_names.len());
    for (a, b, lineno) in edge_names {
        let u = index_of(&a).ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("unknown vertex `{a}`"),
        })?;
        let v = index_of(&b).ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("unknown vertex `{b}`"),
        })?;
        edges.push((u, v));
    }
    let graph = DualGraph::build(vertices, edges)?;
    let mut custom_generators = Vec::with_capacity(generators.len());
    for (c, lineno) in generators {
        if c.len() != graph.vertex_count() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!(
                    "twister vector has {} entries, curve has {} components",
                    c.len(),
                    graph.vertex_count()
                ),
            });
        }
        custom_generators.push(c);
    }
    Ok(CurveFile {
        graph,
        custom_generators,
    })
}

/// Canonical serialization; `parse(serialize(f)) == f`.
pub fn serialize_curve(file: &CurveFile) -> String {
    let mut out = String::new();
    for v in file.graph.vertices() {
        out.push_str(&format!("vertex {} {}\n", v.id, v.genus));
    }
    for &(u, v) in file.graph.edges() {
        out.push_str(&format!(
            "edge {} {}\n",
            file.graph.vertices()[u].id,
            file.graph.vertices()[v].id
        ));
    }
    for g in &file.custom_generators {
        let coeffs: Vec<String> = g.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("twister {}\n", coeffs.join(",")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const V3: &str = "# vine\nvertex C1 1\nvertex C2 1\nedge C1 C2\nedge C1 C2\nedge C1 C2\n";

    #[test]
    fn parses_vine() {
        let f = parse_curve(V3).unwrap();
        assert_eq!(f.graph.vertex_count(), 2);
        assert_eq!(f.graph.edge_count(), 3);
        assert!(f.custom_generators.is_empty());
    }

    #[test]
    fn unknown_directive_reports_line() {
        let err = parse_curve("vertex A 1\nfrobnicate A\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn custom_twister_line() {
        let text = "vertex C1 1\nvertex C2 1\nedge C1 C2\nedge C1 C2\ntwister -5,5\n";
        let f = parse_curve(text).unwrap();
        assert_eq!(f.custom_generators, vec![vec![-5, 5]]);
    }

    #[test]
    fn round_trip_is_canonical() {
        let f = parse_curve(V3).unwrap();
        let text = serialize_curve(&f);
        let f2 = parse_curve(&text).unwrap();
        assert_eq!(f, f2);
        assert_eq!(text, serialize_curve(&f2));
    }

    #[test]
    fn disconnected_rejected() {
        let err = parse_curve("vertex A 1\nvertex B 1\n").unwrap_err();
        assert_eq!(err, Error::DisconnectedGraph);
    }

    #[test]
    fn reserved_id_rejected() {
        let err = parse_curve("vertex E@1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
