//! Exact computational tools for arcs of F_q^k: sets of vectors in which every
//! subset of basis size is a basis, equivalently the columns of a generator
//! matrix of an MDS code.
//!
//! * [`gf`]: arithmetic in GF(p^h).
//! * [`linalg`]: determinants, annihilators and hyperplane pencils.
//! * [`arc`]: arc constructions, MDS checks, duality and tangent census.
//! * [`tangent`]: tangent functions and Segre products.
//! * [`identity`]: evaluators for the tangent-function identities.
//! * [`search`]: exhaustive search for maximal arcs.
//! * [`io`]: text and JSON formats.

pub mod arc;
pub mod error;
pub mod gf;
pub mod identity;
pub mod io;
pub mod linalg;
pub mod search;
pub mod tangent;

pub use arc::{bush_frame, dual_arc, hyperoval, mds_check, nrc, secant_tangent_census, Arc, Census, MdsVerdict};
pub use error::{Error, Result};
pub use gf::{Fe, FieldSpec};
pub use identity::{run_suite, IdentityReport, Lemma, SamplingPolicy, SuiteOutcome};
pub use linalg::{det_seq, nullspace_forms, pencil, LinearForm, Pencil, Vek};
pub use search::{extend_candidates, frame_fix, max_arc_size, SearchOutcome, SearchTask};
pub use tangent::{sigma, SegreQuery, TangentBundle};
