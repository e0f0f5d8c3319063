//! One convex-integration stage q -> q+1 and everything it needs.

pub mod energy;
pub mod flow;
pub mod ledger;
pub mod perturbation;
pub mod profile;
pub mod residual;
pub mod reynolds;
pub mod schedule;
pub mod slices;
pub mod smooth;
pub mod start;
pub mod state;

pub use profile::{family_bounds, profile_family, EnergyProfile, ProfileKind};
pub use schedule::{family_mode_lambda_bar, Condition, ParameterSchedule, ProfileBounds, ScheduleParams};
pub use start::StartTriple;
pub use state::{iterate_once, IterationState, StageOptions, StateFields};
