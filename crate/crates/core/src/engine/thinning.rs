use crate::engine::field::{evaluate_field_fast, FieldModel, PlaneGrid};
use crate::engine::phases::focus_command;
use crate::engine::spot::encircled_energy;
use crate::error::{Error, Result};
use crate::model::{ArrayLayout, Vec3};

/// Samples across the focal disk diameter used for the comparison.
const SAMPLES_ACROSS_DISK: usize = 40;

/// Focal-disk collection of a thinned layout relative to the full one, both
/// radiating the same total power at `target`.
pub fn thinning_efficiency_ratio(
    full: &ArrayLayout,
    thinned: &ArrayLayout,
    model: &FieldModel,
    target: Vec3,
    disk_diameter: f64,
) -> Result<f64> {
    if full.positions() != thinned.positions() {
        return Err(Error::invalid("full and thinned layouts must share element positions"));
    }
    if !(disk_diameter > 0.0) {
        return Err(Error::invalid(format!("disk diameter must be positive, got {disk_diameter}")));
    }
    let full_ee = focal_collection(full, model, target, disk_diameter)?;
    let thin_ee = focal_collection(thinned, model, target, disk_diameter)?;
    if full_ee <= 0.0 {
        return Err(Error::invalid("full layout delivers no power to the focal disk"));
    }
    Ok(thin_ee / full_ee)
}

fn focal_collection(layout: &ArrayLayout, model: &FieldModel, target: Vec3, disk_diameter: f64) -> Result<f64> {
    // Total power cancels in the ratio.
    let command = focus_command(layout, &model.rf, target, 1.0)?;
    let half = 0.5 * disk_diameter * (1.0 + 2.0 / SAMPLES_ACROSS_DISK as f64);
    let n = SAMPLES_ACROSS_DISK + 3;
    let grid = PlaneGrid::horizontal(target, half, n)?;
    let map = evaluate_field_fast(layout, model, &command, &grid)?;
    encircled_energy(&map, target, disk_diameter, 1.0)
}
