//! A laboratory for compact routing schemes on fixed-port networks.
//!
//! The crate builds routing tables, labels and headers for a family of
//! labeled routing schemes, executes routing as purely local per-hop
//! decisions in a message-forwarding simulator, and verifies the stretch of
//! every delivery against an exact shortest-path oracle.

pub mod bits;
pub mod error;
pub mod fnv;
pub mod graph;
pub mod weight;

pub mod centers;
pub mod coloring;
pub mod dist;
pub mod gen;
pub mod hitting;
pub mod io;
pub mod header;
pub mod label;
pub mod local;
pub mod measure;
pub mod scheme;
pub mod sim;
pub mod t1;
pub mod t2;
pub mod table;
pub mod tree;
pub mod vicinity;
pub mod wire;
pub mod waypoint;

pub use graph::{Graph, Port, VertexId};
pub use weight::W;
