//! Binary embedding files and CSV side outputs.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic  b"CEMB"
//! u32    format version (1)
//! u64    rows N
//! u64    dimension d
//! f32    N·d values, row-major
//! ```
//!
//! Row `i` belongs to the node at index `i` of the sidecar CSV written by
//! [`write_node_index`].

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::EmbeddingMatrix;
use crate::networks::NodeIndex;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"CEMB";
const VERSION: u32 = 1;

pub fn write_embedding<W: Write>(mut out: W, emb: &EmbeddingMatrix) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(emb.rows() as u64).to_le_bytes())?;
    out.write_all(&(emb.dimension() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(emb.as_slice().len() * 4);
    for x in emb.as_slice() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Reads a matrix written by [`write_embedding`], attaching row ids from the
/// node-index CSV.
pub fn read_embedding<R: Read, S: Read>(mut input: R, node_index: S) -> Result<EmbeddingMatrix> {
    let mut header = [0u8; 24];
    input.read_exact(&mut header)?;
    if &header[..4] != MAGIC {
        return Err(Error::input("not an embedding file (bad magic)"));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::input(format!(
            "unsupported embedding format version {version}"
        )));
    }
    let n = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes")) as usize;
    let d = u64::from_le_bytes(header[16..24].try_into().expect("8 bytes")) as usize;
    let len = n
        .checked_mul(d)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::input("embedding header overflows"))?;
    let mut bytes = Vec::with_capacity(len);
    input.take(len as u64).read_to_end(&mut bytes)?;
    if bytes.len() != len {
        return Err(Error::input(format!(
            "embedding truncated: {} of {len} bytes",
            bytes.len()
        )));
    }
    let data = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    let nodes = read_node_index(node_index)?;
    if nodes.len() != n {
        return Err(Error::Mismatch(format!(
            "embedding has {n} rows, node index {} entries",
            nodes.len()
        )));
    }
    EmbeddingMatrix::new(nodes, d, data)
}

#[derive(Serialize, Deserialize)]
struct IndexRow {
    index: usize,
    node: String,
}

pub fn write_node_index<W: Write>(out: W, nodes: &NodeIndex) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (index, node) in nodes.ids().iter().enumerate() {
        w.serialize(IndexRow {
            index,
            node: node.clone(),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_node_index<R: Read>(input: R) -> Result<NodeIndex> {
    let mut ids = Vec::new();
    for (expected, row) in csv::Reader::from_reader(input)
        .deserialize::<IndexRow>()
        .enumerate()
    {
        let row = row?;
        if row.index != expected {
            return Err(Error::input(format!(
                "node index row {expected} has index {}",
                row.index
            )));
        }
        ids.push(row.node);
    }
    NodeIndex::new(ids)
}

/// One line of the PCA export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaRow {
    pub node: String,
    pub x: f64,
    pub y: f64,
    pub score: Option<f64>,
    pub label: Option<String>,
}

pub fn write_pca_csv<W: Write>(out: W, rows: &[PcaRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
