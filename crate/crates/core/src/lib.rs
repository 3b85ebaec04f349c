pub mod classify;
pub mod error;
pub mod fiberhom;
pub mod quadrangle;
pub mod reduction;
pub mod searches;
pub mod zlattice;

pub use error::{Error, Result};
pub use fiberhom::{BettiEntry, BettiTable, FiberClass, Field, Polygon, SimplicialComplex};
pub use zlattice::{CanonicalKey, GaleDiagram, Hnf, Lattice, Mat2, Vec2};
