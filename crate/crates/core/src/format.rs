//! Edge-list and JSON file formats for networks and meshes.
//!
//! Edge-list text, one directive per line, `#` starts a comment:
//!
//! ```text
//! nodes 4          # node count
//! source 0
//! sink 3
//! link 0 1 2.2     # undirected, becomes two arcs of 2.2 Mbps each
//! arc 1 3 5        # directed
//! offer 1 2        # mesh files only: node 1 offers 2 Mbps
//! ```
//!
//! Capacities are Mbps with at most three decimals and are held exactly in
//! kbps. Network files number nodes `0..nodes`. Mesh files number eNBs
//! `1..=nodes`, have no `source` (node 0 is the implicit super-source) and
//! accept only undirected `link`s.
//!
//! The JSON mirror carries the same fields:
//! `{"nodes":4,"source":0,"sink":3,"links":[[0,1,2.2]],"arcs":[[1,3,5]]}`,
//! with `"offers":[[1,2]]` for meshes.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dimension::{MeshError, MeshLink, MeshSpec};
use crate::graph::{Arc, FlowNetwork, GraphError, NodeId};
use crate::units::CapacityKbps;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    EdgeList,
    Json,
}

impl FromStr for Format {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge-list" | "edgelist" | "text" => Ok(Format::EdgeList),
            "json" => Ok(Format::Json),
            other => Err(ParseError::UnknownFormat(other.to_string())),
        }
    }
}

impl Format {
    /// Guesses the format from a file's first non-blank character.
    pub fn sniff(text: &str) -> Format {
        match text.trim_start().chars().next() {
            Some('{') => Format::Json,
            _ => Format::EdgeList,
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: `{directive}` declared more than once")]
    Duplicate { line: usize, directive: String },
    #[error("line {line}: `{value}` is not a non-negative Mbps value (at most 3 decimals)")]
    InvalidCapacity { line: usize, value: String },
    #[error("missing `nodes` declaration")]
    MissingNodes,
    #[error("missing `source` declaration")]
    MissingSource,
    #[error("missing `sink` declaration")]
    MissingSink,
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeKind {
    Link,
    Arc,
}

/// Directives common to both file kinds, before validation.
#[derive(Debug, Default)]
struct Document {
    nodes: Option<usize>,
    source: Option<usize>,
    sink: Option<usize>,
    edges: Vec<(EdgeKind, usize, usize, CapacityKbps)>,
    offers: Vec<(usize, CapacityKbps)>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct JsonDocument {
    nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<usize>,
    sink: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    links: Vec<(usize, usize, serde_json::Number)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    arcs: Vec<(usize, usize, serde_json::Number)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    offers: Vec<(usize, serde_json::Number)>,
}

fn parse_edge_list(text: &str) -> Result<Document, ParseError> {
    let mut doc = Document::default();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let malformed = |message: String| ParseError::Malformed { line, message };
        let node = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| malformed(format!("`{s}` is not a node id")))
        };
        let capacity = |s: &str| {
            CapacityKbps::parse_mbps(s).map_err(|_| ParseError::InvalidCapacity {
                line,
                value: s.to_string(),
            })
        };
        let expect_args = |n: usize| {
            if fields.len() == n + 1 {
                Ok(())
            } else {
                Err(malformed(format!(
                    "`{}` takes {n} argument(s), found {}",
                    fields[0],
                    fields.len() - 1
                )))
            }
        };
        let set_once = |slot: &mut Option<usize>, value: usize| {
            if slot.replace(value).is_some() {
                Err(ParseError::Duplicate {
                    line,
                    directive: fields[0].to_string(),
                })
            } else {
                Ok(())
            }
        };
        match fields[0] {
            "nodes" => {
                expect_args(1)?;
                set_once(&mut doc.nodes, node(fields[1])?)?;
            }
            "source" => {
                expect_args(1)?;
                set_once(&mut doc.source, node(fields[1])?)?;
            }
            "sink" => {
                expect_args(1)?;
                set_once(&mut doc.sink, node(fields[1])?)?;
            }
            kind @ ("link" | "arc") => {
                expect_args(3)?;
                let kind = if kind == "link" {
                    EdgeKind::Link
                } else {
                    EdgeKind::Arc
                };
                doc.edges.push((
                    kind,
                    node(fields[1])?,
                    node(fields[2])?,
                    capacity(fields[3])?,
                ));
            }
            "offer" => {
                expect_args(2)?;
                doc.offers.push((node(fields[1])?, capacity(fields[2])?));
            }
            other => return Err(malformed(format!("unknown directive `{other}`"))),
        }
    }
    Ok(doc)
}

fn json_capacity(n: &serde_json::Number) -> Result<CapacityKbps, ParseError> {
    let text = n.to_string();
    CapacityKbps::parse_mbps(&text).map_err(|_| ParseError::InvalidCapacity {
        line: 0,
        value: text,
    })
}

fn json_number(c: CapacityKbps) -> serde_json::Number {
    // Integral Mbps print as integers; the rest go through f64, whose shortest
    // rendering reproduces the three-decimal literal.
    if c.kbps().is_multiple_of(1000) {
        serde_json::Number::from(c.kbps() / 1000)
    } else {
        serde_json::Number::from_f64(c.as_mbps_f64()).expect("finite")
    }
}

fn parse_json(text: &str) -> Result<Document, ParseError> {
    let raw: JsonDocument = serde_json::from_str(text)?;
    let mut doc = Document {
        nodes: raw.nodes,
        source: raw.source,
        sink: raw.sink,
        ..Document::default()
    };
    for (u, v, c) in &raw.links {
        doc.edges.push((EdgeKind::Link, *u, *v, json_capacity(c)?));
    }
    for (u, v, c) in &raw.arcs {
        doc.edges.push((EdgeKind::Arc, *u, *v, json_capacity(c)?));
    }
    for (n, c) in &raw.offers {
        doc.offers.push((*n, json_capacity(c)?));
    }
    Ok(doc)
}

fn parse_document(text: &str, format: Format) -> Result<Document, ParseError> {
    match format {
        Format::EdgeList => parse_edge_list(text),
        Format::Json => parse_json(text),
    }
}

/// Parses and validates a flow network. Undirected links expand to a pair
/// of opposite arcs with the full link capacity each.
pub fn parse_network(text: &str, format: Format) -> Result<FlowNetwork, ParseError> {
    let doc = parse_document(text, format)?;
    let nodes = doc.nodes.ok_or(ParseError::MissingNodes)?;
    let source = doc.source.ok_or(ParseError::MissingSource)?;
    let sink = doc.sink.ok_or(ParseError::MissingSink)?;
    if !doc.offers.is_empty() {
        return Err(ParseError::Malformed {
            line: 0,
            message: "`offer` is only valid in mesh files".into(),
        });
    }
    let mut arcs = Vec::with_capacity(doc.edges.len() * 2);
    for (kind, u, v, c) in doc.edges {
        arcs.push(Arc::new(u, v, c));
        if kind == EdgeKind::Link {
            arcs.push(Arc::new(v, u, c));
        }
    }
    Ok(FlowNetwork::new(nodes, arcs, NodeId(source), NodeId(sink))?)
}

/// Parses and validates a mesh description for dimensioning.
pub fn parse_mesh(text: &str, format: Format) -> Result<MeshSpec, ParseError> {
    let doc = parse_document(text, format)?;
    let nodes = doc.nodes.ok_or(ParseError::MissingNodes)?;
    let sink = doc.sink.ok_or(ParseError::MissingSink)?;
    if doc.source.is_some() {
        return Err(ParseError::Malformed {
            line: 0,
            message: "mesh files use the implicit super-source; remove `source`".into(),
        });
    }
    let mut links = Vec::with_capacity(doc.edges.len());
    for (kind, u, v, _) in doc.edges {
        if kind == EdgeKind::Arc {
            return Err(ParseError::Malformed {
                line: 0,
                message: "mesh links are undirected; use `link`".into(),
            });
        }
        links.push(MeshLink {
            a: NodeId(u),
            b: NodeId(v),
        });
    }
    let offers = doc
        .offers
        .into_iter()
        .map(|(n, c)| (NodeId(n), c))
        .collect();
    Ok(MeshSpec::new(nodes, links, offers, NodeId(sink))?)
}

/// Groups consecutive mirrored arc pairs back into links.
fn network_edges(net: &FlowNetwork) -> Vec<(EdgeKind, Arc)> {
    let arcs = net.arcs();
    let mut out = Vec::with_capacity(arcs.len());
    let mut i = 0;
    while i < arcs.len() {
        let a = arcs[i];
        match arcs.get(i + 1) {
            Some(b) if b.from == a.to && b.to == a.from && b.capacity == a.capacity => {
                out.push((EdgeKind::Link, a));
                i += 2;
            }
            _ => {
                out.push((EdgeKind::Arc, a));
                i += 1;
            }
        }
    }
    out
}

/// Renders a network so that [`parse_network`] rebuilds the same arcs in the
/// same order.
pub fn serialize_network(net: &FlowNetwork, format: Format) -> String {
    let edges = network_edges(net);
    match format {
        Format::EdgeList => {
            let mut out = String::new();
            writeln!(out, "nodes {}", net.node_count()).unwrap();
            writeln!(out, "source {}", net.source()).unwrap();
            writeln!(out, "sink {}", net.sink()).unwrap();
            for (kind, arc) in edges {
                let word = if kind == EdgeKind::Link {
                    "link"
                } else {
                    "arc"
                };
                writeln!(
                    out,
                    "{word} {} {} {}",
                    arc.from,
                    arc.to,
                    arc.capacity.to_mbps_string()
                )
                .unwrap();
            }
            out
        }
        Format::Json => {
            // JSON groups links before arcs, so only pure-link or pure-arc
            // orderings survive a JSON round trip exactly; mixed files keep
            // the same arc multiset.
            let mut doc = JsonDocument {
                nodes: Some(net.node_count()),
                source: Some(net.source().0),
                sink: Some(net.sink().0),
                ..JsonDocument::default()
            };
            for (kind, arc) in edges {
                let entry = (arc.from.0, arc.to.0, json_number(arc.capacity));
                match kind {
                    EdgeKind::Link => doc.links.push(entry),
                    EdgeKind::Arc => doc.arcs.push(entry),
                }
            }
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    }
}

pub fn serialize_mesh(spec: &MeshSpec, format: Format) -> String {
    match format {
        Format::EdgeList => {
            let mut out = String::new();
            writeln!(out, "nodes {}", spec.node_count()).unwrap();
            writeln!(out, "sink {}", spec.sink()).unwrap();
            for (node, load) in spec.offered() {
                writeln!(out, "offer {node} {}", load.to_mbps_string()).unwrap();
            }
            for link in spec.links() {
                // Mesh link capacities are decided by the dimensioner.
                writeln!(out, "link {} {} 0", link.a, link.b).unwrap();
            }
            out
        }
        Format::Json => {
            let doc = JsonDocument {
                nodes: Some(spec.node_count()),
                source: None,
                sink: Some(spec.sink().0),
                links: spec
                    .links()
                    .iter()
                    .map(|l| (l.a.0, l.b.0, serde_json::Number::from(0)))
                    .collect(),
                arcs: Vec::new(),
                offers: spec
                    .offered()
                    .iter()
                    .map(|(n, c)| (n.0, json_number(*c)))
                    .collect(),
            };
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::random_network;
    use proptest::prelude::*;

    #[test]
    fn link_expands_to_two_arcs() {
        let net = parse_network(
            "nodes 2\nsource 0\nsink 1\nlink 0 1 5.0\n",
            Format::EdgeList,
        )
        .unwrap();
        let arcs: Vec<_> = net
            .arcs()
            .iter()
            .map(|a| (a.from.0, a.to.0, a.capacity.kbps()))
            .collect();
        assert_eq!(arcs, vec![(0, 1, 5000), (1, 0, 5000)]);
    }

    #[test]
    fn arc_stays_directed() {
        let net =
            parse_network("nodes 2\nsource 0\nsink 1\narc 0 1 2.2", Format::EdgeList).unwrap();
        let arcs: Vec<_> = net
            .arcs()
            .iter()
            .map(|a| (a.from.0, a.to.0, a.capacity.kbps()))
            .collect();
        assert_eq!(arcs, vec![(0, 1, 2200)]);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text =
            "# header\n\nnodes 3 # three\nsource 0\n  sink 2\nlink 0 1 1\narc 1 2 0.5 # tail\n";
        let net = parse_network(text, Format::EdgeList).unwrap();
        assert_eq!(net.arcs().len(), 3);
    }

    #[test]
    fn reports_line_numbers() {
        let err =
            parse_network("nodes 2\nsource 0\nsink 1\nlink 0 1\n", Format::EdgeList).unwrap_err();
        assert!(
            matches!(err, ParseError::Malformed { line: 4, .. }),
            "{err}"
        );
        let err = parse_network("nodes 2\nbogus 1\n", Format::EdgeList).unwrap_err();
        assert!(
            matches!(err, ParseError::Malformed { line: 2, .. }),
            "{err}"
        );
        let err =
            parse_network("nodes 2\nsource 0\nsink 1\nlink 0 1 -3", Format::EdgeList).unwrap_err();
        assert!(
            matches!(err, ParseError::InvalidCapacity { line: 4, .. }),
            "{err}"
        );
        let err = parse_network("nodes 2\nnodes 3\n", Format::EdgeList).unwrap_err();
        assert!(
            matches!(err, ParseError::Duplicate { line: 2, .. }),
            "{err}"
        );
        let err = parse_network("nodes x\n", Format::EdgeList).unwrap_err();
        assert!(
            matches!(err, ParseError::Malformed { line: 1, .. }),
            "{err}"
        );
    }

    #[test]
    fn missing_declarations() {
        assert!(matches!(
            parse_network("nodes 2\nsink 1\n", Format::EdgeList),
            Err(ParseError::MissingSource)
        ));
        assert!(matches!(
            parse_network("nodes 2\nsource 0\n", Format::EdgeList),
            Err(ParseError::MissingSink)
        ));
        assert!(matches!(
            parse_network("source 0\nsink 1\n", Format::EdgeList),
            Err(ParseError::MissingNodes)
        ));
    }

    #[test]
    fn graph_errors_surface() {
        assert!(matches!(
            parse_network("nodes 2\nsource 0\nsink 1\narc 0 5 1", Format::EdgeList),
            Err(ParseError::Graph(GraphError::NodeOutOfRange { .. }))
        ));
    }

    #[test]
    fn json_mirror() {
        let text = r#"{"nodes": 3, "source": 0, "sink": 2,
                       "links": [[0, 1, 2.2]], "arcs": [[1, 2, 3]]}"#;
        let net = parse_network(text, Format::Json).unwrap();
        let arcs: Vec<_> = net
            .arcs()
            .iter()
            .map(|a| (a.from.0, a.to.0, a.capacity.kbps()))
            .collect();
        assert_eq!(arcs, vec![(0, 1, 2200), (1, 0, 2200), (1, 2, 3000)]);
        assert!(matches!(
            parse_network(
                r#"{"nodes": 2, "source": 0, "sink": 1, "arcs": [[0, 1, -1]]}"#,
                Format::Json
            ),
            Err(ParseError::InvalidCapacity { .. })
        ));
        assert!(matches!(
            parse_network(r#"{"nodes": 2, "sink": 1}"#, Format::Json),
            Err(ParseError::MissingSource)
        ));
        assert_eq!(Format::sniff("  {\"nodes\": 1}"), Format::Json);
        assert_eq!(Format::sniff("nodes 1"), Format::EdgeList);
    }

    #[test]
    fn mesh_files() {
        let text = "nodes 3\nsink 3\noffer 1 2\noffer 2 2.5\nlink 1 2 0\nlink 2 3 0\n";
        let mesh = parse_mesh(text, Format::EdgeList).unwrap();
        assert_eq!(mesh.demand().kbps(), 4500);
        assert_eq!(mesh.links().len(), 2);
        assert_eq!(
            parse_mesh(&serialize_mesh(&mesh, Format::EdgeList), Format::EdgeList).unwrap(),
            mesh
        );
        assert_eq!(
            parse_mesh(&serialize_mesh(&mesh, Format::Json), Format::Json).unwrap(),
            mesh
        );
        assert!(parse_mesh("nodes 3\nsink 3\nsource 1\n", Format::EdgeList).is_err());
        assert!(parse_mesh("nodes 3\nsink 3\narc 1 2 1\n", Format::EdgeList).is_err());
        assert!(matches!(
            parse_mesh("nodes 3\nsink 3\nlink 0 1 1\n", Format::EdgeList),
            Err(ParseError::Mesh(MeshError::NodeOutOfRange { .. }))
        ));
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(seed in any::<u64>(), nodes in 2usize..12, arcs in 0usize..30) {
            let net = random_network(seed, nodes, arcs, 10_000);
            let text = serialize_network(&net, Format::EdgeList);
            let back = parse_network(&text, Format::EdgeList).unwrap();
            prop_assert_eq!(&back, &net);
            prop_assert_eq!(serialize_network(&back, Format::EdgeList), text);
        }

        #[test]
        fn json_round_trip_preserves_arcs(seed in any::<u64>(), nodes in 2usize..12, arcs in 0usize..30) {
            let net = random_network(seed, nodes, arcs, 10_000);
            let text = serialize_network(&net, Format::Json);
            let back = parse_network(&text, Format::Json).unwrap();
            let mut a: Vec<_> = net.arcs().to_vec();
            let mut b: Vec<_> = back.arcs().to_vec();
            a.sort_by_key(|x| (x.from, x.to, x.capacity));
            b.sort_by_key(|x| (x.from, x.to, x.capacity));
            prop_assert_eq!(a, b);
            prop_assert_eq!(serialize_network(&back, Format::Json), serialize_network(&parse_network(&serialize_network(&back, Format::Json), Format::Json).unwrap(), Format::Json));
        }
    }
}
