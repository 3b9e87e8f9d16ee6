//! Credal networks under epistemic irrelevance, computed with exact
//! rational arithmetic.
//!
//! Local models are coherent sets of desirable gambles given by finitely
//! many generators. The joint model of a network is the positive hull of
//! context-indicator products of local generators; inference reduces to
//! conic membership, decided by an exact simplex solver.

pub mod cone;
pub mod dag;
pub mod error;
pub mod gamble;
pub mod lp;
pub mod net;
pub mod oracle;
pub mod rational;
pub mod sample;
pub mod space;

pub use cone::{AssessmentCone, CoherenceReport, ZeroCertificate};
pub use dag::{Dag, Validation};
pub use error::{Error, Result};
pub use gamble::{Gamble, Sign};
pub use net::{CredalNet, JointModel, LocalAssessment, LocalModel, RequirementsReport, VerifyOptions};
pub use oracle::{fm_membership, PreciseNet};
pub use rational::Rational;
pub use space::{Configuration, Domain, NodeId, Scope, VariableSpace};
