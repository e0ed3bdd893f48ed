//! Local edge coloring of bounded-degree graphs.
//!
//! The pipeline peels one matching per degree level using bounded-length
//! augmenting paths over sparse labelings, removes and later re-inserts
//! small low-boundary pieces ("stumps"), and colors what is left with
//! Kőnig, Fournier or Vizing. A diagnostic layer checks the structural
//! statements behind the decay of the unhappy set, and a brute-force oracle
//! cross-checks everything on small graphs.

pub mod analysis;
pub mod coloring;
pub mod decomposition;
pub mod driver;
pub mod engine;
pub mod generators;
pub mod graph;
pub mod labeling;
pub mod oracle;
pub mod par;
pub mod precolor;
pub mod stats;

pub use generators::Instance;
pub use graph::{Edge, Graph, Matching, Vertex, VertexSet};
pub use par::Exec;
