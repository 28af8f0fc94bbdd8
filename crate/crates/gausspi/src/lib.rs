//! Gauss diagrams decorated by a weighted group (π, w).
//!
//! The crate covers canonical forms and symmetries of diagrams, the
//! Reidemeister and conjugacy moves, homological formulas on the diagram
//! 1-complex, exact series of diagrams with the Polyak relations, a pipeline
//! certifying arrow diagram formulas, and a few concrete invariants.

pub mod cli;
pub mod diagram;
pub mod error;
pub mod group;
pub mod homology;
pub mod invariance;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod moves;
pub mod random;
pub mod selftest;
pub mod series;

pub use diagram::{abelianize, AbelianDiagram, Arrow, Diagram, EdgeSigns};
pub use error::{Error, Result};
pub use group::{Elem, WeightedGroup};
