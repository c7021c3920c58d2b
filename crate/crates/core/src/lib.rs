//! Index-3 current graphs over cyclic groups and the triangular biembeddings
//! of complete graphs they generate.
//!
//! The crate is `no_std` (it needs `alloc`). Modules, bottom-up:
//!
//! - [`topology`]: darts, rotation systems, face tracing, Euler genus.
//! - [`current`]: current graphs, circuit labeling, logs and the pairing checks.
//! - [`derive`]: derived embeddings on `Z_n` and biembedding certificates.
//! - [`family`]: ladder templates for `Z_{24s+21}` and the rung swap.
//! - [`search`]: backtracking completion of ladder templates.
//! - [`bounds`]: closed-form bounds in exact integer arithmetic.
#![no_std]

extern crate alloc;

pub mod bounds;
pub mod current;
pub mod derive;
pub mod family;
pub mod search;
pub mod topology;

pub use current::{CurrentGraph, Label, LabeledCircuits, PairReport};
pub use derive::{BiembeddingCertificate, DerivedEmbedding};
pub use topology::{Dart, EmbeddedMultigraph, FaceWalk, Sign};
