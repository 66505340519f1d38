//! Random feedback-shift-register permutations: sampling, cycle structure,
//! coin editing, toggle classes and the comparison laws used to test them.

pub mod editing;
pub mod fsr;
pub mod oracle;
pub mod pd;
pub mod perm;
pub mod rng;
pub mod toggling;

pub use fsr::{Edge, FeedbackLogic, FsrError, Segment, Vertex};
pub use perm::Perm;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
