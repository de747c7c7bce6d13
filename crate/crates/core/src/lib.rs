//! Ground-to-air microwave power beaming from solar-farm phased arrays.
//!
//! The crate is split the same way the calculation flows:
//!
//! * [`model`]: constants, RF parameters and farm array geometry.
//! * [`engine`]: focusing phases, direct-sum and parallel field evaluation,
//!   diffraction spot size, encircled energy, grating lobes and thinning.
//! * [`link`]: efficiency chain, receiver panels and safety densities.
//! * [`mission`]: aircraft power model, farm visibility, greedy farm
//!   assignment and time-stepped mission simulation.
//! * [`econ`]: beamed-energy price, hourly costs, breakeven efficiency and
//!   farm-count estimates.

// `!(x > 0.0)` also rejects NaN; keep that form in argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod econ;
pub mod engine;
pub mod error;
pub mod link;
pub mod mission;
pub mod model;

pub use error::{Error, Result};
pub use model::{constants, ArrayLayout, BeamCommand, RfSpec, Vec3};

pub use engine::{FieldMap, PlaneGrid, SpotReport};
pub use link::{EfficiencyChain, ReceiverPanel};
pub use mission::{Aircraft, FarmNetwork, FlightPlan, MissionTrace};
pub use econ::CostModel;
