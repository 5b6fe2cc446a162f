//! Two-dimensional ferromagnetic Ising model in a non-uniform external field.
//!
//! * [`lattice`] and [`field`]: square boxes, boundaries, dual sites and
//!   field specifications with certified ℓ¹ norms.
//! * [`gibbs`]: exact partition functions (brute force and transfer matrix),
//!   magnetizations, truncated correlations and boundary-condition gaps.
//! * [`contour`]: signed dual-lattice contours under the minus boundary
//!   condition, their weights and the contour expansion of Z⁻.
//! * [`bounds`]: closed forms of the Peierls-type series and contour counts.
//! * [`sampler`]: reproducible Metropolis estimates for larger boxes.

pub mod bounds;
pub mod contour;
pub mod error;
pub mod field;
pub mod gibbs;
pub mod lattice;
pub mod logsum;
pub mod sampler;

pub use error::{Error, Result};
pub use field::{FieldNorms, FieldSpec, ModelParams, PowerLaw};
pub use gibbs::{BoundaryCondition, ExactMethod, ExactSolver, Method, Pin, Spin, SpinConfiguration};
pub use lattice::{make_box, DualPoint, Region, Site};
