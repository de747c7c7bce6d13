//! Focusing and field evaluation for farm-scale phased arrays.
//!
//! The field model is scalar: each active element radiates a spherical wave
//! `sqrt(P·G(θ)/4π) · exp(i(k·r + φ)) / r`, and power density is the squared
//! magnitude of the coherent sum. Distances are exact per element, so the
//! same code covers near-field focusing and the far field.

mod export;
mod field;
mod phases;
mod spot;
mod steering;
mod thinning;

pub use export::{read_field_binary, write_field_binary, write_field_csv, FIELD_CSV_HEADER};
pub use field::{
    evaluate_field_fast, evaluate_field_oracle, evaluate_field_oracle_grid, ElementPattern, FieldMap,
    FieldModel, FieldSamples, PlaneGrid,
};
pub use phases::{focus_command, quantize_phases, solve_focus_phases};
pub use spot::{
    encircled_energy, first_null_spot_diameter, measure_first_null_radius, similarity_scale, spot_report,
    SpotReport,
};
pub use steering::{grating_lobe_margin, line_array_factor, pattern_peaks, GratingLobeCheck};
pub use thinning::thinning_efficiency_ratio;
