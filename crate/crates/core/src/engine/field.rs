use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ArrayLayout, BeamCommand, RfSpec, Vec3};

/// Single-element power gain pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElementPattern {
    /// `G = 1` in every direction.
    Isotropic,
    /// `G = 4·cos θ` above the array plane: a lone element radiating its
    /// power into the upper hemisphere.
    IsolatedCosine,
    /// `G = G₀·cos θ` with `G₀ = min(4, 4π·s²/λ²)`, the gain of one lattice
    /// cell of side `s`. Inside a dense lattice this is the pattern under which
    /// each element radiates its own share of the power; sparse lattices fall
    /// back to the isolated element.
    #[default]
    Cosine,
}

impl ElementPattern {
    /// Peak gain for elements on a lattice of `spacing` at `wavelength`.
    pub fn peak_gain(self, spacing: f64, wavelength: f64) -> f64 {
        match self {
            ElementPattern::Isotropic => 1.0,
            ElementPattern::IsolatedCosine => 4.0,
            ElementPattern::Cosine => (4.0 * PI * spacing * spacing / (wavelength * wavelength)).min(4.0),
        }
    }

    /// Gain toward a direction whose cosine from the array normal is
    /// `cos_theta`, given the pattern's `peak`.
    #[inline]
    pub fn gain(self, peak: f64, cos_theta: f64) -> f64 {
        match self {
            ElementPattern::Isotropic => peak,
            ElementPattern::IsolatedCosine | ElementPattern::Cosine => peak * cos_theta.max(0.0),
        }
    }
}

/// Carrier plus element pattern: everything the field sum needs besides
/// geometry and excitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldModel {
    pub rf: RfSpec,
    pub pattern: ElementPattern,
}

impl FieldModel {
    pub fn new(rf: RfSpec, pattern: ElementPattern) -> Self {
        Self { rf, pattern }
    }
}

/// Rectangular sampling grid on a plane: sample `(i, j)` sits at
/// `origin + i·du·u + j·dv·v`, stored row-major with `j` as the row.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneGrid {
    origin: Vec3,
    u: Vec3,
    v: Vec3,
    du: f64,
    dv: f64,
    nu: usize,
    nv: usize,
}

impl PlaneGrid {
    pub fn new(origin: Vec3, u: Vec3, v: Vec3, du: f64, dv: f64, nu: usize, nv: usize) -> Result<Self> {
        if !(du > 0.0 && dv > 0.0 && du.is_finite() && dv.is_finite()) {
            return Err(Error::invalid(format!("grid spacing must be positive, got ({du}, {dv})")));
        }
        if nu == 0 || nv == 0 {
            return Err(Error::invalid("grid needs at least one sample per axis"));
        }
        let u = u.normalized().ok_or_else(|| Error::invalid("grid u axis is zero"))?;
        let v = v.normalized().ok_or_else(|| Error::invalid("grid v axis is zero"))?;
        if u.dot(v).abs() > 1e-9 {
            return Err(Error::invalid("grid axes must be orthogonal"));
        }
        Ok(Self {
            origin,
            u,
            v,
            du,
            dv,
            nu,
            nv,
        })
    }

    /// `n × n` horizontal grid centred on `center`, spanning `±half_extent`
    /// along `x` and `y`. Odd `n` puts a sample exactly on the centre.
    pub fn horizontal(center: Vec3, half_extent: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("horizontal grid needs n >= 2"));
        }
        if !(half_extent > 0.0) {
            return Err(Error::invalid(format!("grid half extent must be positive, got {half_extent}")));
        }
        let d = 2.0 * half_extent / (n - 1) as f64;
        let origin = center - Vec3::new(half_extent, half_extent, 0.0);
        Self::new(origin, Vec3::X, Vec3::Y, d, d, n, n)
    }

    /// `n` samples on a line through `center` along `direction`, spanning
    /// `±half_extent`.
    pub fn line(center: Vec3, direction: Vec3, half_extent: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("line grid needs n >= 2"));
        }
        if !(half_extent > 0.0) {
            return Err(Error::invalid(format!("grid half extent must be positive, got {half_extent}")));
        }
        let u = direction.normalized().ok_or_else(|| Error::invalid("line direction is zero"))?;
        let helper = if u.z.abs() < 0.9 { Vec3::Z } else { Vec3::X };
        let v = u.cross(helper).normalized().expect("non-parallel helper axis");
        let d = 2.0 * half_extent / (n - 1) as f64;
        Self::new(center - u * half_extent, u, v, d, d, n, 1)
    }

    pub fn point(&self, i: usize, j: usize) -> Vec3 {
        self.origin + self.u * (i as f64 * self.du) + self.v * (j as f64 * self.dv)
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.nv)
            .flat_map(|j| (0..self.nu).map(move |i| (i, j)))
            .map(|(i, j)| self.point(i, j))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.du, self.dv)
    }

    pub fn axes(&self) -> (Vec3, Vec3) {
        (self.u, self.v)
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    /// Area represented by one sample.
    pub fn cell_area(&self) -> f64 {
        self.du * self.dv
    }

    /// In-plane coordinates of `p`, in sample-index units.
    pub fn to_index_coords(&self, p: Vec3) -> (f64, f64) {
        let w = p - self.origin;
        (w.dot(self.u) / self.du, w.dot(self.v) / self.dv)
    }

    /// Distance of `p` from the grid plane.
    pub fn plane_offset(&self, p: Vec3) -> f64 {
        (p - self.origin).dot(self.u.cross(self.v))
    }
}

/// Complex field and power density at arbitrary points.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub field: Vec<Complex64>,
    /// W/m².
    pub power_density: Vec<f64>,
    /// Indices of points lying in the array plane within one element spacing
    /// of an element, where the 1/r term dominates.
    pub near_singular: Vec<usize>,
}

/// Field sampled on a [`PlaneGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub grid: PlaneGrid,
    pub field: Vec<Complex64>,
    /// W/m², row-major like the grid.
    pub power_density: Vec<f64>,
    pub near_singular: Vec<usize>,
}

impl FieldMap {
    pub fn density_at(&self, i: usize, j: usize) -> f64 {
        self.power_density[j * self.grid.nu + i]
    }

    pub fn peak_density(&self) -> f64 {
        self.power_density.iter().copied().fold(0.0, f64::max)
    }

    /// Largest density deviation from `other`, relative to this map's peak.
    pub fn max_relative_deviation(&self, other: &FieldMap) -> f64 {
        let peak = self.peak_density();
        let dev = self
            .power_density
            .iter()
            .zip(&other.power_density)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if peak > 0.0 {
            dev / peak
        } else {
            dev
        }
    }
}

/// Direct summation over every active element for every point, in element
/// order. This is the reference the fast path is checked against.
pub fn evaluate_field_oracle(
    layout: &ArrayLayout,
    model: &FieldModel,
    command: &BeamCommand,
    points: &[Vec3],
) -> Result<FieldSamples> {
    command.check_against(layout)?;
    let k = model.rf.wavenumber();
    let amp = (command.element_power() / (4.0 * PI)).sqrt();
    let spacing = layout.spacing();
    let peak = model.pattern.peak_gain(spacing, model.rf.wavelength());
    let elements: Vec<(Vec3, f64)> = layout.active_positions().zip(command.phases.iter().copied()).collect();

    let mut field = Vec::with_capacity(points.len());
    let mut near_singular = Vec::new();
    for (idx, &p) in points.iter().enumerate() {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut flagged = false;
        for &(e, phase) in &elements {
            let d = p - e;
            let r = d.norm();
            if r == 0.0 {
                return Err(coincident(p));
            }
            if !flagged && r < spacing && d.z.abs() < spacing {
                flagged = true;
            }
            let g = model.pattern.gain(peak, d.z / r);
            sum += Complex64::from_polar(amp * g.sqrt() / r, k * r + phase);
        }
        if flagged {
            near_singular.push(idx);
        }
        field.push(sum);
    }
    let power_density = field.iter().map(|f| f.norm_sqr()).collect();
    Ok(FieldSamples {
        field,
        power_density,
        near_singular,
    })
}

/// Oracle evaluation over a grid, packaged as a [`FieldMap`].
pub fn evaluate_field_oracle_grid(
    layout: &ArrayLayout,
    model: &FieldModel,
    command: &BeamCommand,
    grid: &PlaneGrid,
) -> Result<FieldMap> {
    let s = evaluate_field_oracle(layout, model, command, &grid.points())?;
    Ok(FieldMap {
        grid: grid.clone(),
        field: s.field,
        power_density: s.power_density,
        near_singular: s.near_singular,
    })
}

const TILE: usize = 64;

/// Grid evaluation, parallel over rows.
///
/// Per row, the element-to-row-start vectors are reduced to three scalars per
/// element, so each sample only costs one square root and one `sin_cos` per
/// element. Elements are summed in fixed tiles combined pairwise; the order
/// never depends on the worker count, so output is bit-identical for any
/// thread pool size.
pub fn evaluate_field_fast(
    layout: &ArrayLayout,
    model: &FieldModel,
    command: &BeamCommand,
    grid: &PlaneGrid,
) -> Result<FieldMap> {
    command.check_against(layout)?;
    let k = model.rf.wavenumber();
    let amp = (command.element_power() / (4.0 * PI)).sqrt();
    let spacing = layout.spacing();
    let pattern = model.pattern;
    let peak = pattern.peak_gain(spacing, model.rf.wavelength());
    let positions: Vec<Vec3> = layout.active_positions().collect();
    let phases = &command.phases;
    let (nu, nv) = grid.dims();
    let (u, _) = grid.axes();
    let du = grid.du;
    // Array normal is +z.
    let u_z = u.z;

    let rows: Vec<Result<(Vec<Complex64>, Vec<usize>)>> = (0..nv)
        .into_par_iter()
        .map(|j| {
            let row_start = grid.point(0, j);
            let n = positions.len();
            let mut w2 = Vec::with_capacity(n);
            let mut uw = Vec::with_capacity(n);
            let mut wz = Vec::with_capacity(n);
            for e in &positions {
                let w = row_start - *e;
                w2.push(w.dot(w));
                uw.push(2.0 * w.dot(u));
                wz.push(w.z);
            }
            let mut out = Vec::with_capacity(nu);
            let mut flagged = Vec::new();
            let mut tiles: Vec<Complex64> = Vec::with_capacity(n.div_ceil(TILE));
            for i in 0..nu {
                let s = i as f64 * du;
                let s2 = s * s;
                let dz_shift = s * u_z;
                tiles.clear();
                let mut near = false;
                for start in (0..n).step_by(TILE) {
                    let end = (start + TILE).min(n);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for e in start..end {
                        let r2 = w2[e] + s * uw[e] + s2;
                        if r2 <= 0.0 {
                            return Err(coincident(grid.point(i, j)));
                        }
                        let r = r2.sqrt();
                        let dz = wz[e] + dz_shift;
                        if r < spacing && dz.abs() < spacing {
                            near = true;
                        }
                        let g = pattern.gain(peak, dz / r);
                        let (sin, cos) = (k * r + phases[e]).sin_cos();
                        let a = amp * g.sqrt() / r;
                        acc += Complex64::new(a * cos, a * sin);
                    }
                    tiles.push(acc);
                }
                if near {
                    flagged.push(j * nu + i);
                }
                out.push(pairwise_sum(&tiles));
            }
            Ok((out, flagged))
        })
        .collect();

    let mut field = Vec::with_capacity(grid.len());
    let mut near_singular = Vec::new();
    for row in rows {
        let (f, n) = row?;
        field.extend(f);
        near_singular.extend(n);
    }
    let power_density = field.iter().map(|f| f.norm_sqr()).collect();
    Ok(FieldMap {
        grid: grid.clone(),
        field,
        power_density,
        near_singular,
    })
}

fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn coincident(p: Vec3) -> Error {
    Error::DegenerateGeometry(format!(
        "observation point ({}, {}, {}) coincides with an element",
        p.x, p.y, p.z
    ))
}
