use std::io::BufRead;

use log::warn;

use super::{parse_int, IoError};
use crate::graph::{NodeInfo, NodeTable};

/// Parse `node_id \t node_name \t node_type_id` lines.
///
/// Trailing attribute columns are ignored with a single warning.
pub fn read_node_file<R: BufRead>(input: R) -> Result<NodeTable, IoError> {
    let mut table = NodeTable::new();
    let mut warned = false;
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(IoError::NodeFieldCount { line: line_no, got: fields.len() });
        }
        if fields.len() > 3 && !warned {
            warn!("node file: ignoring attribute columns (first seen on line {line_no})");
            warned = true;
        }
        let id: u64 = parse_int(line_no, "node id", fields[0])?;
        let node_type: u32 = parse_int(line_no, "node type", fields[2])?;
        let info = NodeInfo { name: fields[1].to_string(), node_type };
        if table.insert(id, info).is_some() {
            return Err(IoError::DuplicateNode { line: line_no, id });
        }
    }
    Ok(table)
}
