//! Information-flow architectures over finite-horizon timed streams.
//!
//! Components are executable nondeterministic transducers ([`behavior`]),
//! wired into systems ([`model`]) whose black-box meaning is computed by
//! composition and cross-checked by an independent oracle ([`semantics`]).
//! [`calculus`] transforms systems step by step and checks every premise;
//! [`scriptio`] reads and writes architectures, refinement scripts, run
//! reports and DOT diagrams.

pub mod behavior;
pub mod calculus;
pub mod fixtures;
pub mod model;
pub mod scriptio;
pub mod semantics;
pub mod streams;
