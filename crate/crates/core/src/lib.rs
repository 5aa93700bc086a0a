//! Exact computations with prime congruences on tropical Laurent polynomial
//! semirings over `Q`: canonical defining matrices, equality with witnesses,
//! flags of polyhedra, prime filters and Farkas certificates.
//!
//! ```
//! use valflag::{canonicalize, decide_equal, DefiningMatrix};
//!
//! let a = DefiningMatrix::parse(&[&["1", "sqrt(2)", "0"], &["0", "1", "sqrt(3)"]]).unwrap();
//! let b = DefiningMatrix::parse(&[&["1", "sqrt(2)", "0"], &["0", "0", "1"]]).unwrap();
//! let (a, b) = (canonicalize(&a).unwrap(), canonicalize(&b).unwrap());
//! assert!(decide_equal(&a, &b).unwrap().is_equal());
//! ```

pub mod cli;
pub mod error;
pub mod filters;
pub mod io;
pub mod lattice;
pub mod polyhedra;
pub mod prime;
pub mod scalars;
pub mod tropical;

pub use error::{Error, Result};
pub use filters::{
    farkas_certify, filter_member, halfspace_member, mindim_witness, reconstruct_preorder, FarkasCertificate,
    FarkasOutcome, MembershipAnswer,
};
pub use polyhedra::{
    fm_feasible, flag_from_matrix, is_neighborhood, locally_equivalent, rational_set, simplicialize, Flag, FlagKind,
    GammaPolyhedralSet, GammaPolyhedron, IneqSystem, RationalSet,
};
pub use prime::{
    canonicalize, classify, compare, decide_equal, final_kernel, height, is_order, min_filter_dim, phi,
    Classification, DefiningMatrix, EqualityVerdict, KernelSubgroup, Prime,
};
pub use scalars::{Rational, Scalar};
pub use tropical::{ExponentVector, LexValue, Term, TropNumber, TropPolynomial};
