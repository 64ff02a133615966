use std::io::Write;

use super::graph::Network;
use crate::ingest::CredibilityLabel;
use crate::Result;

/// One row of the node attribute table.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeAttributes {
    pub node: String,
    pub score: Option<f64>,
    pub label: Option<CredibilityLabel>,
    pub core_number: usize,
}

/// `src,dst,weight` rows; undirected edges are written once.
pub fn write_edges_csv<G: Network, W: Write>(out: W, g: &G) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["src", "dst", "weight"])?;
    let nodes = g.nodes();
    for (u, v, weight) in g.edge_list() {
        w.write_record([nodes.id(u), nodes.id(v), &weight.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_nodes_csv<W: Write>(out: W, rows: &[NodeAttributes]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "score", "label", "core_number"])?;
    for r in rows {
        w.write_record([
            r.node.clone(),
            r.score.map(|s| s.to_string()).unwrap_or_default(),
            r.label.map(|l| l.to_string()).unwrap_or_default(),
            r.core_number.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
