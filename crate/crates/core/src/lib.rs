//! Exact tools for the {0,1/2}-closure of rational polyhedra.
//!
//! The crate covers exact linear programming and redundancy removal, GF(2)
//! kernels of constraint matrices, generation of all {0,1/2}-cuts of a system,
//! vertex enumeration and integrality testing, total dual integrality checks,
//! and the Stable Set reduction whose closures are integral exactly when the
//! graph has a large stable set.
//!
//! All numeric code is generic over an exact [`Field`]; [`Rational`] is the
//! arbitrary-precision instance used by the higher-level routines.

mod dd;
pub mod error;
pub mod gf2;
pub mod halfclosure;
pub mod inequality;
pub mod linalg;
pub mod lp;
pub mod polyhedra;
pub mod redundancy;
pub mod reduction;
pub mod scalar;
pub mod system;
pub mod tdi;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector, KernelBasis};
pub use halfclosure::{CutFamily, HalfCut, MembershipCertificate};
pub use inequality::Inequality;
pub use lp::{LpResult, LpStatus, Sense};
pub use polyhedra::{IntegerPointSet, Integrality, Polytope};
pub use reduction::{Graph, ReductionInstance};
pub use scalar::{Field, Rational};
pub use system::{LinearSystem, RowTag};
pub use tdi::{HilbertQuery, TdiCertificate};

/// Rational LP optimum.
pub type LpOptimum = lp::LpOptimum<Rational>;
/// Vertex set of a polytope with rational coordinates.
pub type RationalPolytope = Polytope<Rational>;

/// Default cap on enumerated GF(2) kernel elements.
pub const DEFAULT_KERNEL_LIMIT: u64 = 1 << 24;
/// Default cap on integer candidates scanned in a box.
pub const DEFAULT_BOX_LIMIT: u64 = 1 << 22;
/// Default cap on row subsets tried when searching for cut sets.
pub const DEFAULT_BASIS_LIMIT: u64 = 1 << 20;

/// Enumeration caps shared by the exhaustive routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub kernel: u64,
    pub boxes: u64,
    pub basis: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            kernel: DEFAULT_KERNEL_LIMIT,
            boxes: DEFAULT_BOX_LIMIT,
            basis: DEFAULT_BASIS_LIMIT,
        }
    }
}
