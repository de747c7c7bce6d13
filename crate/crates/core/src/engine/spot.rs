use crate::engine::field::{evaluate_field_fast, FieldMap, FieldModel, PlaneGrid};
use crate::error::{Error, Result};
use crate::model::{ArrayLayout, BeamCommand, RfSpec, Vec3};

/// Diffraction-limited spot size `1.22·λ·R/D`, in metres.
///
/// This is the radial distance from the beam centre to the first dark ring of
/// a uniformly filled circular aperture; the disk bounded by that ring is
/// twice as wide.
pub fn first_null_spot_diameter(aperture: f64, rf: &RfSpec, range: f64) -> Result<f64> {
    if !(aperture > 0.0 && range > 0.0) {
        return Err(Error::invalid(format!(
            "aperture and range must be positive, got ({aperture}, {range})"
        )));
    }
    Ok(1.22 * rf.wavelength() * range / aperture)
}

/// Minimum number of samples the integration disk must span.
const MIN_SAMPLES_ACROSS: f64 = 8.0;
/// Sub-cell resolution used on cells straddling the disk rim.
const RIM_SUBSAMPLES: usize = 16;

/// Fraction of `total_power` falling on a disk of `disk_diameter` centred on
/// `center` in the map plane.
///
/// Cells fully inside the disk count whole, cells cut by the rim are weighted
/// by their covered area.
pub fn encircled_energy(map: &FieldMap, center: Vec3, disk_diameter: f64, total_power: f64) -> Result<f64> {
    if !(disk_diameter > 0.0 && total_power > 0.0) {
        return Err(Error::invalid(format!(
            "disk diameter and total power must be positive, got ({disk_diameter}, {total_power})"
        )));
    }
    let grid = &map.grid;
    let (du, dv) = grid.spacing();
    let (nu, nv) = grid.dims();
    if disk_diameter < MIN_SAMPLES_ACROSS * du.max(dv) {
        return Err(Error::Resolution(format!(
            "disk of {disk_diameter} m spans fewer than {MIN_SAMPLES_ACROSS} samples at spacing {}",
            du.max(dv)
        )));
    }
    if grid.plane_offset(center).abs() > 1e-9 * (1.0 + center.norm()) {
        return Err(Error::invalid("disk centre is not on the map plane"));
    }
    let (ci, cj) = grid.to_index_coords(center);
    let r = 0.5 * disk_diameter;
    let (ri, rj) = (r / du, r / dv);
    // Map cells span index ±0.5 around each sample.
    let inside_map = ci - ri >= -0.5 - 1e-9
        && ci + ri <= nu as f64 - 0.5 + 1e-9
        && cj - rj >= -0.5 - 1e-9
        && cj + rj <= nv as f64 - 0.5 + 1e-9;
    if !inside_map {
        return Err(Error::invalid("integration disk extends past the map"));
    }

    let r2 = r * r;
    let i_lo = ((ci - ri).floor() as isize).max(0) as usize;
    let i_hi = ((ci + ri).ceil() as usize).min(nu - 1);
    let j_lo = ((cj - rj).floor() as isize).max(0) as usize;
    let j_hi = ((cj + rj).ceil() as usize).min(nv - 1);
    let mut sum = 0.0;
    for j in j_lo..=j_hi {
        for i in i_lo..=i_hi {
            let x = (i as f64 - ci) * du;
            let y = (j as f64 - cj) * dv;
            let frac = cell_coverage(x, y, du, dv, r2);
            if frac > 0.0 {
                sum += frac * map.density_at(i, j);
            }
        }
    }
    Ok(sum * grid.cell_area() / total_power)
}

fn cell_coverage(x: f64, y: f64, du: f64, dv: f64, r2: f64) -> f64 {
    let (hx, hy) = (0.5 * du, 0.5 * dv);
    let near = (x.abs() - hx).max(0.0).powi(2) + (y.abs() - hy).max(0.0).powi(2);
    let far = (x.abs() + hx).powi(2) + (y.abs() + hy).powi(2);
    if far <= r2 {
        return 1.0;
    }
    if near >= r2 {
        return 0.0;
    }
    let n = RIM_SUBSAMPLES;
    let mut hits = 0usize;
    for a in 0..n {
        let sx = x - hx + (a as f64 + 0.5) * du / n as f64;
        for b in 0..n {
            let sy = y - hy + (b as f64 + 0.5) * dv / n as f64;
            if sx * sx + sy * sy <= r2 {
                hits += 1;
            }
        }
    }
    hits as f64 / (n * n) as f64
}

/// Radius of the first dark ring, read along the grid's `u` axis through
/// `center` and averaged over both directions.
///
/// The minimum is refined with a parabola through the three samples around
/// it.
pub fn measure_first_null_radius(map: &FieldMap, center: Vec3) -> Result<f64> {
    let grid = &map.grid;
    let (nu, nv) = grid.dims();
    let (du, _) = grid.spacing();
    let (ci, cj) = grid.to_index_coords(center);
    let j = cj.round();
    if j < 0.0 || j >= nv as f64 || ci < 0.0 || ci > (nu - 1) as f64 {
        return Err(Error::invalid("centre lies outside the map"));
    }
    let j = j as usize;
    let row: Vec<f64> = (0..nu).map(|i| map.density_at(i, j)).collect();
    let c = ci.round() as usize;

    let mut radii = Vec::with_capacity(2);
    for dir in [1isize, -1] {
        let mut idx = c as isize;
        let mut found = None;
        loop {
            let next = idx + dir;
            let after = next + dir;
            if after < 0 || after >= nu as isize {
                break;
            }
            let (a, b, d) = (row[idx as usize], row[next as usize], row[after as usize]);
            if b <= a && b <= d {
                let denom = a - 2.0 * b + d;
                let offset = if denom > 0.0 { 0.5 * (a - d) / denom } else { 0.0 };
                let pos = next as f64 + dir as f64 * offset;
                found = Some((pos - ci).abs() * du);
                break;
            }
            idx = next;
        }
        if let Some(r) = found {
            radii.push(r);
        }
    }
    if radii.is_empty() {
        return Err(Error::Resolution("no first null inside the map".into()));
    }
    Ok(radii.iter().sum::<f64>() / radii.len() as f64)
}

/// Spot metrics from a focal-plane map.
#[derive(Debug, Clone, PartialEq)]
pub struct SpotReport {
    /// Closed-form `1.22·λR/D`, metres.
    pub spot_diameter: f64,
    /// Radius of the first dark ring measured on the map, metres.
    pub first_null_radius_measured: f64,
    /// Diameter of the disk bounded by the first dark ring (`2·spot_diameter`).
    pub first_null_disk_diameter: f64,
    /// Encircled fraction within that disk.
    pub encircled_fraction_first_null: f64,
    /// W/m².
    pub peak_density: f64,
    /// Cumulative `(radius, fraction)` pairs sorted by radius.
    curve: Vec<(f64, f64)>,
}

impl SpotReport {
    /// Encircled fraction of radiated power within a disk of diameter `d`,
    /// read from the per-sample cumulative curve. Nondecreasing in `d`.
    pub fn encircled_fraction_at(&self, d: f64) -> f64 {
        let r = 0.5 * d;
        let n = self.curve.partition_point(|(ri, _)| *ri <= r);
        if n == 0 {
            0.0
        } else {
            self.curve[n - 1].1
        }
    }
}

/// Focal spot of `command` on an `n × n` horizontal map through its target,
/// spanning `±half_extent`. The range used for the closed-form reference is
/// the target's distance from the array centre.
pub fn spot_report(
    layout: &ArrayLayout,
    model: &FieldModel,
    command: &BeamCommand,
    half_extent: f64,
    n: usize,
) -> Result<SpotReport> {
    let target = command.target;
    let range = target.norm();
    let spot = first_null_spot_diameter(layout.aperture_diameter(), &model.rf, range)?;
    let grid = PlaneGrid::horizontal(target, half_extent, n)?;
    let map = evaluate_field_fast(layout, model, command, &grid)?;
    let null_r = measure_first_null_radius(&map, target)?;
    let disk = 2.0 * spot;
    let ee = encircled_energy(&map, target, disk, command.total_radiated_power)?;

    let area = grid.cell_area();
    let mut samples: Vec<(f64, f64)> = grid
        .points()
        .into_iter()
        .zip(&map.power_density)
        .map(|(p, d)| ((p - target).norm(), d * area / command.total_radiated_power))
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    let curve = samples
        .into_iter()
        .map(|(r, f)| {
            acc += f;
            (r, acc)
        })
        .collect();

    Ok(SpotReport {
        spot_diameter: spot,
        first_null_radius_measured: null_r,
        first_null_disk_diameter: disk,
        encircled_fraction_first_null: ee,
        peak_density: map.peak_density(),
        curve,
    })
}

/// Shrink factor `s ≥ 1` for a geometrically similar run: dividing aperture
/// and range by `s` at fixed wavelength keeps `λR/D`, hence the focal spot,
/// unchanged while bringing a disk-filled array under `max_elements`.
pub fn similarity_scale(aperture: f64, spacing: f64, max_elements: usize) -> Result<f64> {
    if !(aperture > 0.0 && spacing > 0.0) || max_elements == 0 {
        return Err(Error::invalid("similarity scaling needs positive aperture, spacing and budget"));
    }
    let max_diameter = spacing * (4.0 * max_elements as f64 / std::f64::consts::PI).sqrt();
    Ok((aperture / max_diameter).max(1.0))
}
