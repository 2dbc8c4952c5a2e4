//! Graph serialisation: edge list, DOT and JSON, plus the spectral report
//! record.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CayleyGraph, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Edgelist,
    Dot,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edgelist" => Ok(Format::Edgelist),
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Header data carried by every export.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphHeader {
    pub vertices: usize,
    pub degree: usize,
    pub p: i64,
    pub q: u32,
}

impl GraphHeader {
    pub fn of(g: &CayleyGraph) -> Self {
        GraphHeader { vertices: g.n_vertices(), degree: g.degree(), p: g.p, q: g.q }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    #[serde(flatten)]
    header: GraphHeader,
    mode: String,
    /// canonical matrix entries per vertex
    labels: Vec<[u32; 4]>,
    edges: Vec<(usize, usize, u32)>,
}

pub fn export(g: &CayleyGraph, format: Format) -> String {
    let h = GraphHeader::of(g);
    match format {
        Format::Edgelist => edgelist(&h, &g.graph),
        Format::Dot => dot(g),
        Format::Json => {
            let j = JsonGraph {
                header: h,
                mode: g.mode.to_string(),
                labels: g.vertices.iter().map(|v| v.entries).collect(),
                edges: g.graph.edges(),
            };
            serde_json::to_string_pretty(&j).expect("graph serialises") + "\n"
        }
    }
}

pub fn edgelist(h: &GraphHeader, g: &WeightedGraph) -> String {
    let mut out = format!("# vertices={} degree={} p={} q={}\n", h.vertices, h.degree, h.p, h.q);
    for (u, v, w) in g.edges() {
        writeln!(out, "{u} {v} {w}").unwrap();
    }
    out
}

fn dot(g: &CayleyGraph) -> String {
    let mut out = format!("graph lps_p{}_q{} {{\n", g.p, g.q);
    for (i, v) in g.vertices.iter().enumerate() {
        let [a, b, c, d] = v.entries;
        writeln!(out, "  {i} [label=\"[{a} {b}; {c} {d}]\"];").unwrap();
    }
    for (u, v, w) in g.graph.edges() {
        writeln!(out, "  {u} -- {v} [weight={w}];").unwrap();
    }
    out.push_str("}\n");
    out
}

fn parse_header(line: &str) -> Result<GraphHeader> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("edge list must start with a '#' header".into()))?;
    let mut fields = [None; 4];
    for tok in body.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse(format!("bad header field {tok:?}")))?;
        let slot = match k {
            "vertices" => 0,
            "degree" => 1,
            "p" => 2,
            "q" => 3,
            _ => return Err(Error::Parse(format!("unknown header field {k:?}"))),
        };
        fields[slot] = Some(v.parse::<i64>().map_err(|e| Error::Parse(format!("{tok}: {e}")))?);
    }
    let get = |i: usize, name: &str| fields[i].ok_or_else(|| Error::Parse(format!("header lacks {name}")));
    Ok(GraphHeader {
        vertices: get(0, "vertices")? as usize,
        degree: get(1, "degree")? as usize,
        p: get(2, "p")?,
        q: get(3, "q")? as u32,
    })
}

/// Reads an edge list written by [`edgelist`].
pub fn import_edgelist(text: &str) -> Result<(GraphHeader, WeightedGraph)> {
    let mut lines = text.lines();
    let header = parse_header(lines.next().unwrap_or(""))?;
    let mut edges = Vec::new();
    for (no, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|e| Error::Parse(format!("line {}: {e}", no + 2))))
            .collect::<Result<_>>()?;
        let [u, v, w] = nums[..] else {
            return Err(Error::Parse(format!("line {}: expected 'u v w'", no + 2)));
        };
        if u > v || v >= header.vertices {
            return Err(Error::Parse(format!("line {}: bad edge {u} {v}", no + 2)));
        }
        edges.push((u, v, w as u32));
    }
    Ok((header, WeightedGraph::from_edges(header.vertices, &edges)))
}

/// Reads the JSON graph format.
pub fn import_json(text: &str) -> Result<(GraphHeader, WeightedGraph)> {
    let j: JsonGraph = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let g = WeightedGraph::from_edges(j.header.vertices, &j.edges);
    Ok((j.header, g))
}

/// Summary record of one constructed graph and its spectrum.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphReport {
    pub P: i64,
    pub Q: i64,
    pub T: i64,
    pub p: i64,
    pub q: u32,
    pub m: u32,
    pub H_label: String,
    pub n_vertices: usize,
    pub degree: u32,
    pub second_eigenvalue: f64,
    pub bound: f64,
    pub ramanujan: bool,
    pub tolerance: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::congruence_pairs;
    use crate::graph::{build_cayley, Mode};
    use crate::matrix::BetaMap;
    use crate::quat::ibukiyama_order;
    use crate::tree::build_generator_set;

    fn chiu() -> CayleyGraph {
        let o = ibukiyama_order(13, None, None).unwrap();
        let (g, r) = congruence_pairs(&o, 1).unwrap();
        let s = build_generator_set(&o, 2, &g, &r.pairs[0]).unwrap();
        build_cayley(&s, &BetaMap::new(o.params, 7).unwrap(), Mode::Psl).unwrap()
    }

    #[test]
    fn edgelist_roundtrip() {
        let g = chiu();
        let text = export(&g, Format::Edgelist);
        assert!(text.starts_with("# vertices=168 degree=3 p=2 q=7\n"));
        let (h, back) = import_edgelist(&text).unwrap();
        assert_eq!(h, GraphHeader::of(&g));
        assert_eq!(back, g.graph);
        // sorted, u <= v
        let edges: Vec<(usize, usize)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let v: Vec<usize> = l.split(' ').map(|t| t.parse().unwrap()).collect();
                (v[0], v[1])
            })
            .collect();
        assert!(edges.windows(2).all(|w| w[0] < w[1]));
        assert!(edges.iter().all(|(u, v)| u <= v));
    }

    #[test]
    fn json_roundtrip() {
        let g = chiu();
        let (h, back) = import_json(&export(&g, Format::Json)).unwrap();
        assert_eq!(h.vertices, 168);
        assert_eq!(back, g.graph);
    }

    #[test]
    fn dot_is_well_formed() {
        let g = chiu();
        let text = export(&g, Format::Dot);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("graph ") && lines[0].ends_with('{'));
        assert_eq!(*lines.last().unwrap(), "}");
        let edge_lines = lines.iter().filter(|l| l.contains(" -- ")).count();
        assert_eq!(edge_lines, g.graph.edges().len());
        for l in &lines[1..lines.len() - 1] {
            assert!(l.trim_end().ends_with("];"), "{l}");
        }
        // deterministic
        assert_eq!(text, export(&chiu(), Format::Dot));
    }

    #[test]
    fn unknown_format() {
        assert!(matches!("gml".parse::<Format>(), Err(Error::UnknownFormat(_))));
        assert_eq!("DOT".parse::<Format>().unwrap(), Format::Dot);
    }

    #[test]
    fn malformed_edgelists_rejected() {
        assert!(import_edgelist("0 1 1\n").is_err());
        assert!(import_edgelist("# vertices=2 degree=1 p=2 q=7\n1 0 1\n").is_err());
        assert!(import_edgelist("# vertices=2 degree=1 p=2 q=7\n0 1\n").is_err());
    }
}
