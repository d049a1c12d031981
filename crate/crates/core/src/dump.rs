//! Plain-text graph dumps for debugging and cross-checks.
//!
//! ```text
//! # kout v1 n=4
//! 0<TAB>0<TAB>2
//! 1<TAB>0<TAB>3
//! ```
//!
//! One line per node, in order: node id, 0-based class, comma-separated
//! selections. An empty selection field is allowed.

use std::io::{self, Write};

use thiserror::Error;

use crate::model::ModelParams;
use crate::sampler::{GraphError, KOutGraph, NodeId, Selections};

const HEADER_PREFIX: &str = "# kout v1 n=";

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("dump declares n = {dump}, parameters have n = {params}")]
    NodeCount { dump: usize, params: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn write_dump<W: Write>(graph: &KOutGraph, mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER_PREFIX}{}", graph.num_nodes())?;
    for (v, set) in graph.selections().iter().enumerate() {
        let joined: Vec<String> = set.iter().map(u32::to_string).collect();
        writeln!(out, "{v}\t{}\t{}", graph.classes()[v], joined.join(","))?;
    }
    Ok(())
}

pub fn dump_to_string(graph: &KOutGraph) -> String {
    let mut buf = Vec::new();
    write_dump(graph, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("dump is ASCII")
}

/// Class labels and selections read from a dump, not yet checked against
/// any parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedDump {
    pub classes: Vec<u32>,
    pub selections: Selections,
}

pub fn parse_dump(text: &str) -> Result<ParsedDump, DumpError> {
    let syntax = |line: usize, msg: String| DumpError::Syntax { line, msg };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| syntax(1, "empty input".into()))?;
    let n: usize = header
        .strip_prefix(HEADER_PREFIX)
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| syntax(1, format!("bad header {header:?}")))?;

    let mut classes = Vec::with_capacity(n);
    let mut sets: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(syntax(no, format!("expected 3 tab-separated fields, got {}", fields.len())));
        }
        let id: usize = fields[0]
            .parse()
            .map_err(|_| syntax(no, format!("bad node id {:?}", fields[0])))?;
        if id != classes.len() {
            return Err(syntax(no, format!("expected node {}, found {id}", classes.len())));
        }
        let class: u32 = fields[1]
            .parse()
            .map_err(|_| syntax(no, format!("bad class {:?}", fields[1])))?;
        let set = if fields[2].is_empty() {
            Vec::new()
        } else {
            fields[2]
                .split(',')
                .map(|s| s.parse::<NodeId>().map_err(|_| syntax(no, format!("bad target {s:?}"))))
                .collect::<Result<_, _>>()?
        };
        classes.push(class);
        sets.push(set);
    }
    if classes.len() != n {
        return Err(syntax(0, format!("header says {n} nodes, found {}", classes.len())));
    }
    Ok(ParsedDump {
        classes,
        selections: Selections::from_sets(sets),
    })
}

/// Parses a dump and validates it as a realization of `params`.
pub fn read_graph(text: &str, params: &ModelParams) -> Result<KOutGraph, DumpError> {
    let parsed = parse_dump(text)?;
    if parsed.classes.len() as u64 != params.n() {
        return Err(DumpError::NodeCount {
            dump: parsed.classes.len(),
            params: params.n(),
        });
    }
    Ok(KOutGraph::from_selections(params, parsed.classes, parsed.selections)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSpec;
    use crate::sampler::build_graph;

    #[test]
    fn round_trip() {
        let p = ModelParams::new(30, vec![0.5, 0.3, 0.2], vec![1, 2, 4]).unwrap();
        for t in 0..20 {
            let g = build_graph(&p, SeedSpec::new(11, t));
            let text = dump_to_string(&g);
            assert!(text.starts_with("# kout v1 n=30\n"));
            assert_eq!(read_graph(&text, &p).unwrap(), g);
        }
    }

    #[test]
    fn exact_layout() {
        let p = ModelParams::homogeneous(3, 1).unwrap();
        let g = KOutGraph::from_selections(
            &p,
            vec![0, 0, 0],
            Selections::from_sets([vec![2], vec![0], vec![0]]),
        )
        .unwrap();
        assert_eq!(dump_to_string(&g), "# kout v1 n=3\n0\t0\t2\n1\t0\t0\n2\t0\t0\n");
    }

    #[test]
    fn rejects_malformed_input() {
        let p = ModelParams::homogeneous(3, 1).unwrap();
        assert!(matches!(parse_dump(""), Err(DumpError::Syntax { .. })));
        assert!(matches!(parse_dump("# kout v2 n=3\n"), Err(DumpError::Syntax { .. })));
        assert!(matches!(parse_dump("# kout v1 n=2\n0\t0\t1\n"), Err(DumpError::Syntax { .. })));
        assert!(matches!(parse_dump("# kout v1 n=1\n1\t0\t\n"), Err(DumpError::Syntax { .. })));
        assert!(matches!(parse_dump("# kout v1 n=1\n0\t0\tx\n"), Err(DumpError::Syntax { .. })));
        let self_loop = "# kout v1 n=3\n0\t0\t0\n1\t0\t0\n2\t0\t0\n";
        assert!(matches!(read_graph(self_loop, &p), Err(DumpError::Graph(_))));
        let short = "# kout v1 n=2\n0\t0\t1\n1\t0\t0\n";
        assert!(matches!(read_graph(short, &p), Err(DumpError::NodeCount { .. })));
    }
}
