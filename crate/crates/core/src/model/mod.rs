//! The universal model: a finite-valued `f` built in stages on a Bernoulli
//! shift, its factor map `φ_f(x) = (f(T_g x))_g`, and the verification battery.

pub mod balls;
pub mod build;
pub mod feldman;
pub mod function;
pub mod verify;

pub use balls::{basis_ball, BallIndex};
pub use build::{build_model, compute_eta, BuildConfig, BuildFailure, Budgets, ModelBuild, StageRecord};
pub use feldman::{feldman_baseline, FeldmanReport};
pub use function::{ball_membership, phi, Membership, ModelFunction, PhiValue};
pub use verify::{equivariance_check, model_orbit_frequency, orbit_frequency, support_and_iso_check};
