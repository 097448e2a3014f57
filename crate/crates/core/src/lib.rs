//! Exact Birkhoff sums of step functions over irrational circle rotations.
pub mod birkhoff;
pub mod certified;
pub mod contfrac;
pub mod error;
pub mod exact;
pub mod limits;
pub mod stats;
pub mod stepfun;
pub mod verify;

pub use birkhoff::{birkhoff_law, birkhoff_sum, birkhoff_value, psi_star, BirkhoffConfig};
pub use certified::{Bounds, ComplexInterval, Interval, RationalInterval};
pub use contfrac::{Convergent, PartialQuotients, QuotientSpec, ShadowRational};
pub use error::{Error, Result};
pub use limits::{PlanKind, PlanStatus, StageRecord, SubsequencePlan};
pub use stats::{GaussianRef, ScaledLaw};
pub use stepfun::{Norms, StepFunction, ValueDistribution};
pub use verify::{CheckKind, SuiteReport, TrendRule, VerificationReport};
