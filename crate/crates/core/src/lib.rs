//! Exact solvers and supporting machinery for vertex-disjoint paths in
//! plane graphs.

pub mod dp;
pub mod flow;
pub mod instance;
pub mod oracle;
pub mod pipeline;
pub mod plane_graph;
pub mod reduction;
pub mod steiner;
pub mod treewidth;
