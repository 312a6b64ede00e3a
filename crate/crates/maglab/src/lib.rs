//! Categories enriched over scalar and matrix arithmetic on finite digraphs,
//! their similarity matrices, and the weighting/magnitude machinery built on
//! top of them.
//!
//! The crate is organized around one pipeline:
//!
//! 1. a [`Digraph`] determines a [`ClosureCategory`] (loops plus the
//!    transitive closure);
//! 2. generating data on a spanning structure extends to an enrichment of the
//!    closure (scalar rationals, square matrices under multiplication,
//!    rectangular matrices under the Kronecker product, or stochastic channel
//!    matrices);
//! 3. a size map turns the enrichment into a [`SimilarityMatrix`], whose
//!    weightings, kernel, and magnitude are the analysis output.
//!
//! Experiment surfaces on top of the pipeline: grammar-generated program
//! control-flow graphs ([`program_cfg`]), sparse layered DAG weighting
//! ensembles with outlier extraction ([`nn_outliers`]), and networks of
//! discrete memoryless channels sized by exponentiated capacity
//! ([`channels`]).

pub mod channels;
pub mod cocycle;
pub mod digraph;
pub mod error;
pub mod io;
pub mod magnitude;
pub mod matrix_cat;
pub mod nn_outliers;
pub mod program_cfg;
pub mod randgen;
pub mod ratio;
pub mod ratlin;

pub use digraph::{ClosureCategory, Digraph, SccInfo, SpanningStructure};
pub use error::{MagError, Result};
pub use ratio::Q;
pub use ratlin::MatQ;
