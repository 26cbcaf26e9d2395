//! Bridge response to a moving train.
//!
//! Two independent routes produce modal responses:
//!
//! * [`closed_form`]: the analytic Duhamel integral for a single raised-cosine
//!   bump acting as a moving harmonic load.
//! * [`simulate`]: implicit time stepping of every modal equation under the
//!   full axle set, for arbitrary track profiles.
//!
//! [`quadrature`] evaluates the Duhamel integral numerically and serves as
//! the oracle for the closed form.

pub mod beam;
pub mod closed_form;
pub mod filter;
pub mod quadrature;
pub mod record;
pub mod simulate;
pub mod train;

pub use beam::BeamModel;
pub use closed_form::{bridge_acceleration_closed_form, harmonic_force, modal_response_closed_form};
pub use quadrature::{duhamel_quadrature, Forcing, LoadPath};
pub use record::{resample_spatial, AccelerationRecord, SpatialSeries};
pub use simulate::{
    record_from_solution, simulate_modal, simulate_train_passage, simulate_train_passage_with, ModalSolution,
    SimulationOptions,
};
pub use train::{Axle, SensorLayout, TrainConfig};
