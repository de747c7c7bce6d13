//! Shared domain types, physical constants and array geometry.
//!
//! Everything lives in one local Cartesian frame: farm center at the origin,
//! `z` up, metres. Ranges of interest stay below ~20 km so a flat-earth frame
//! is used throughout.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Physical constants used across the crate.
pub mod constants {
    /// Speed of light in vacuum, m/s.
    pub const C: f64 = 299_792_458.0;
    /// Standard gravity, m/s².
    pub const G: f64 = 9.80665;
    /// Specific energy of jet fuel, J/kg.
    pub const JET_FUEL_SPECIFIC_ENERGY: f64 = 43.1e6;
}

/// Point or direction in the local frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn horizontal_norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction. Returns `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Carrier frequency with its derived wavelength and wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfSpec {
    frequency: f64,
    wavelength: f64,
    wavenumber: f64,
}

impl RfSpec {
    pub fn from_frequency(frequency: f64) -> Result<Self> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::invalid(format!("frequency must be positive, got {frequency}")));
        }
        let wavelength = constants::C / frequency;
        Ok(Self {
            frequency,
            wavelength,
            wavenumber: std::f64::consts::TAU / wavelength,
        })
    }

    pub fn from_wavelength(wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::invalid(format!("wavelength must be positive, got {wavelength}")));
        }
        Ok(Self {
            frequency: constants::C / wavelength,
            wavelength,
            wavenumber: std::f64::consts::TAU / wavelength,
        })
    }

    /// Hz.
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Metres.
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Radians per metre.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
}

/// Half-wavelength element edge for a carrier frequency, in metres.
pub fn element_size_for(frequency: f64) -> Result<f64> {
    Ok(0.5 * RfSpec::from_frequency(frequency)?.wavelength())
}

/// Element positions of a planar farm array with an activity mask.
///
/// Positions of inactive (thinned) elements are kept so that a thinned layout
/// shares its grid with the full one.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayLayout {
    positions: Vec<Vec3>,
    active: Vec<bool>,
    spacing: f64,
    aperture_diameter: f64,
}

impl ArrayLayout {
    /// Builds a layout from explicit positions; all elements active.
    ///
    /// `aperture_diameter` is taken as the largest pairwise horizontal extent.
    pub fn from_positions(positions: Vec<Vec3>, spacing: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("layout needs at least one element"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid(format!("spacing must be positive, got {spacing}")));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("element positions must be finite"));
        }
        let aperture_diameter = max_horizontal_extent(&positions);
        let active = vec![true; positions.len()];
        Ok(Self {
            positions,
            active,
            spacing,
            aperture_diameter,
        })
    }

    /// Replaces the activity mask. Lengths must match.
    pub fn with_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.positions.len() {
            return Err(Error::invalid(format!(
                "mask has {} entries for {} elements",
                mask.len(),
                self.positions.len()
            )));
        }
        self.active = mask;
        Ok(self)
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn mask(&self) -> &[bool] {
        &self.active
    }

    pub fn active_positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.positions
            .iter()
            .zip(&self.active)
            .filter_map(|(p, a)| a.then_some(*p))
    }

    pub fn total_count(&self) -> usize {
        self.positions.len()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    pub fn fill_fraction(&self) -> f64 {
        self.active_count() as f64 / self.total_count() as f64
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn aperture_diameter(&self) -> f64 {
        self.aperture_diameter
    }
}

fn max_horizontal_extent(positions: &[Vec3]) -> f64 {
    // Farthest pair lies on the convex hull (Andrew's monotone chain).
    let mut pts: Vec<(f64, f64)> = positions.iter().map(|p| (p.x, p.y)).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));
    pts.dedup();
    if pts.len() < 3 {
        return match pts.as_slice() {
            [a, b] => (a.0 - b.0).hypot(a.1 - b.1),
            _ => 0.0,
        };
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut best = 0.0f64;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a.0 - b.0).hypot(a.1 - b.1));
        }
    }
    best
}

/// Square-grid elements inside a disk of `aperture_diameter`, centred at the
/// origin in the `z = 0` plane.
///
/// With `fill_fraction < 1` each element is kept independently with that
/// probability, drawn from a ChaCha8 stream seeded by `seed`.
pub fn make_planar_array(
    aperture_diameter: f64,
    spacing: f64,
    fill_fraction: f64,
    seed: u64,
) -> Result<ArrayLayout> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::invalid(format!("spacing must be positive, got {spacing}")));
    }
    if !(aperture_diameter > spacing && aperture_diameter.is_finite()) {
        return Err(Error::invalid(format!(
            "aperture diameter {aperture_diameter} must exceed spacing {spacing}"
        )));
    }
    check_fill(fill_fraction)?;
    let radius = 0.5 * aperture_diameter;
    // Small slack so points exactly on the rim survive rounding in i·spacing.
    let r2 = radius * radius * (1.0 + 1e-12);
    let half = (radius / spacing + 1e-9).floor() as i64;
    let mut positions = Vec::new();
    for iy in -half..=half {
        for ix in -half..=half {
            let (x, y) = (ix as f64 * spacing, iy as f64 * spacing);
            if x * x + y * y <= r2 {
                positions.push(Vec3::new(x, y, 0.0));
            }
        }
    }
    let mut layout = ArrayLayout::from_positions(positions, spacing)?;
    layout.aperture_diameter = aperture_diameter;
    thin(layout, fill_fraction, seed)
}

/// `n × n` square grid centred at the origin in the `z = 0` plane.
pub fn make_square_array(n: usize, spacing: f64, fill_fraction: f64, seed: u64) -> Result<ArrayLayout> {
    if n == 0 {
        return Err(Error::invalid("square array needs n >= 1"));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::invalid(format!("spacing must be positive, got {spacing}")));
    }
    check_fill(fill_fraction)?;
    let offset = 0.5 * (n as f64 - 1.0);
    let positions = (0..n)
        .flat_map(|iy| (0..n).map(move |ix| (ix, iy)))
        .map(|(ix, iy)| Vec3::new((ix as f64 - offset) * spacing, (iy as f64 - offset) * spacing, 0.0))
        .collect();
    let layout = ArrayLayout::from_positions(positions, spacing)?;
    thin(layout, fill_fraction, seed)
}

/// Evenly spaced line of `n` elements along `x`, centred at the origin.
pub fn make_line_array(n: usize, spacing: f64) -> Result<ArrayLayout> {
    if n == 0 {
        return Err(Error::invalid("line array needs n >= 1"));
    }
    let offset = 0.5 * (n as f64 - 1.0);
    let positions = (0..n)
        .map(|i| Vec3::new((i as f64 - offset) * spacing, 0.0, 0.0))
        .collect();
    ArrayLayout::from_positions(positions, spacing)
}

fn check_fill(fill_fraction: f64) -> Result<()> {
    if !(fill_fraction > 0.0 && fill_fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "fill fraction must lie in (0, 1], got {fill_fraction}"
        )));
    }
    Ok(())
}

fn thin(layout: ArrayLayout, fill_fraction: f64, seed: u64) -> Result<ArrayLayout> {
    if fill_fraction >= 1.0 {
        return Ok(layout);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask: Vec<bool> = (0..layout.total_count())
        .map(|_| rng.gen::<f64>() < fill_fraction)
        .collect();
    // Keep the element-count invariant even for tiny fills.
    if !mask.iter().any(|a| *a) {
        let pick = rng.gen_range(0..mask.len());
        mask[pick] = true;
    }
    layout.with_mask(mask)
}

/// Target point, radiated power and per-active-element phases.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCommand {
    pub target: Vec3,
    pub total_radiated_power: f64,
    pub phases: Vec<f64>,
}

impl BeamCommand {
    pub fn new(target: Vec3, total_radiated_power: f64, phases: Vec<f64>) -> Result<Self> {
        if !(total_radiated_power > 0.0 && total_radiated_power.is_finite()) {
            return Err(Error::invalid(format!(
                "radiated power must be positive, got {total_radiated_power}"
            )));
        }
        Ok(Self {
            target,
            total_radiated_power,
            phases,
        })
    }

    /// Per-element power for a uniform taper over the active elements.
    pub fn element_power(&self) -> f64 {
        if self.phases.is_empty() {
            0.0
        } else {
            self.total_radiated_power / self.phases.len() as f64
        }
    }

    pub(crate) fn check_against(&self, layout: &ArrayLayout) -> Result<()> {
        if self.phases.len() != layout.active_count() {
            return Err(Error::invalid(format!(
                "beam command carries {} phases for {} active elements",
                self.phases.len(),
                layout.active_count()
            )));
        }
        Ok(())
    }
}
