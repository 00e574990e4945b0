//! Group-coloured partition algebras: canonical diagram calculus, sparse
//! exact linear algebra over their bar complexes, and verification suites
//! for the ideal-cover combinatorics that drive their homological stability.

pub mod algebra;
pub mod cover;
pub mod diagram;
pub mod error;
pub mod group;
pub mod homology;
pub mod ring;
pub mod rng;
pub mod snf;
pub mod suites;

pub use algebra::{AlgebraContext, AlgebraElement, WreathAlgebraElement};
pub use cover::{CoverReport, CoverSpec, IdealBasis};
pub use diagram::{ColouredDiagram, CompositionOutcome, DiagramArena, NodeId, SetPartition, Side};
pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupElem};
pub use ring::{CoefficientRing, IntegerRing, PrimeField, RationalRing, RingOps};
