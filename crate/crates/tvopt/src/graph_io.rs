//! Edge-list graph files: one `i j` pair per line, 0-indexed, `#` comments.

use std::path::Path;

use tvopt_core::distributed::Graph;

use crate::{Error, Result};

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(Graph::parse(&text)?)
}

pub fn write_graph(path: &Path, graph: &Graph) -> Result<()> {
    let text = format!("# {} nodes, {} edges\n{}", graph.nodes(), graph.edges().len(), graph.to_edge_list());
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
