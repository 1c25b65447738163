//! Exact graph polynomials for Feynman-graph combinatorics.
//!
//! The crate computes Kirchhoff polynomials, Dodgson polynomials and
//! spanning forest polynomials of finite multigraphs with exact integer
//! arithmetic, and builds on them to run denominator reduction and to
//! predict weight drop from graph structure alone.

pub mod catalog;
pub mod cuts;
pub mod dodgson;
pub mod double_triangle;
pub mod error;
pub mod forest;
pub mod graph;
pub mod identities;
pub mod io;
pub mod matrix;
pub mod partition;
pub mod poly;
pub mod predictor;
pub mod random;
pub mod reduction;
pub mod suite;

pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, VertexId};
pub use poly::{Monomial, Poly, Var};
