//! Fixtures shared by the field-engine benchmarks.

use farmbeam_core::engine::{focus_command, ElementPattern, FieldModel, PlaneGrid};
use farmbeam_core::model::make_square_array;
use farmbeam_core::{ArrayLayout, BeamCommand, RfSpec, Vec3};

/// Focused `n × n` half-wavelength array at 10 cm plus a `grid_n × grid_n`
/// focal-plane grid 10 km up.
pub struct Workload {
    pub layout: ArrayLayout,
    pub model: FieldModel,
    pub command: BeamCommand,
    pub grid: PlaneGrid,
}

impl Workload {
    pub fn square(n: usize, grid_n: usize) -> Self {
        let rf = RfSpec::from_wavelength(0.1).expect("valid wavelength");
        let layout = make_square_array(n, 0.05, 1.0, 0).expect("valid layout");
        let target = Vec3::new(0.0, 0.0, 10_000.0);
        let command = focus_command(&layout, &rf, target, 1e6).expect("target off the array");
        let grid = PlaneGrid::horizontal(target, 500.0, grid_n).expect("valid grid");
        Self {
            layout,
            model: FieldModel::new(rf, ElementPattern::Cosine),
            command,
            grid,
        }
    }

    /// Element-point pairs evaluated per pass.
    pub fn pair_count(&self) -> u64 {
        (self.layout.active_count() * self.grid.len()) as u64
    }
}
