//! Tensor calculus of codimension-one foliations inside a distribution `D`
//! of a closed Riemannian manifold, and numerical verification of the
//! associated integral formulas.

pub mod error;
pub mod foliation;
pub mod jet;
pub mod linalg;
pub mod manifold;
pub mod quadrature;
pub mod scenarios;
pub mod subriemannian;
pub mod symmetric;
pub mod tolerances;
pub mod verify;

pub use error::{GeometryError, Result};
pub use jet::{Jet1, Jet2, Lower, Scalar, MAX_DIM};
pub use linalg::Mat;
pub use manifold::{ChartManifold, InvariantFrameManifold, Manifold, Point, TangentVector};
pub use subriemannian::{AdaptedFrame, FoliatedManifold, IntegrabilityWitness, Projector};
