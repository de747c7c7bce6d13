//! Efficiency chain from farm DC input to aircraft DC output, receiver panel
//! selection, and the two safety densities (farm surface and reflected beam
//! on the ground).

use std::f64::consts::PI;

use crate::engine::{encircled_energy, first_null_spot_diameter, FieldMap};
use crate::error::{Error, Result};
use crate::model::{RfSpec, Vec3};

/// Multiplicative stages from farm DC to aircraft DC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyChain {
    pub dc_to_rf: f64,
    pub beam_collection: f64,
    pub incidence_cosine: f64,
    pub rf_to_dc: f64,
    /// Lossless unless set; kept separate from the four physical stages.
    pub atmospheric_transmission: f64,
}

impl Default for EfficiencyChain {
    /// Four stages multiplying to ≈0.201, with the 85% rectenna figure.
    fn default() -> Self {
        Self {
            dc_to_rf: 0.5,
            beam_collection: 0.55,
            incidence_cosine: 0.86,
            rf_to_dc: 0.85,
            atmospheric_transmission: 1.0,
        }
    }
}

impl EfficiencyChain {
    pub fn new(dc_to_rf: f64, beam_collection: f64, incidence_cosine: f64, rf_to_dc: f64) -> Result<Self> {
        let chain = Self {
            dc_to_rf,
            beam_collection,
            incidence_cosine,
            rf_to_dc,
            atmospheric_transmission: 1.0,
        };
        chain.validate()?;
        Ok(chain)
    }

    pub fn with_atmosphere(mut self, transmission: f64) -> Result<Self> {
        self.atmospheric_transmission = transmission;
        self.validate()?;
        Ok(self)
    }

    /// Same chain with the incidence stage replaced, e.g. by a panel cosine.
    pub fn with_incidence(mut self, cosine: f64) -> Result<Self> {
        self.incidence_cosine = cosine;
        self.validate()?;
        Ok(self)
    }

    /// `(name, value)` for each stage in chain order.
    pub fn stages(&self) -> [(&'static str, f64); 5] {
        [
            ("dc_to_rf", self.dc_to_rf),
            ("beam_collection", self.beam_collection),
            ("incidence_cosine", self.incidence_cosine),
            ("rf_to_dc", self.rf_to_dc),
            ("atmospheric_transmission", self.atmospheric_transmission),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.stages() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("efficiency stage {name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

pub fn end_to_end(chain: &EfficiencyChain) -> f64 {
    chain.stages().iter().map(|(_, v)| v).product()
}

/// Watts reaching the aircraft bus for `input_power` watts drawn at the farm.
pub fn delivered_power(input_power: f64, chain: &EfficiencyChain) -> Result<f64> {
    if !(input_power >= 0.0) {
        return Err(Error::invalid(format!("input power must be non-negative, got {input_power}")));
    }
    Ok(input_power * end_to_end(chain))
}

/// Fraction of radiated power landing on a receiver footprint disk.
pub fn collection_efficiency(map: &FieldMap, center: Vec3, footprint_diameter: f64, total_power: f64) -> Result<f64> {
    encircled_energy(map, center, footprint_diameter, total_power)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PanelLabel {
    Underside,
    LowerFront,
    LowerTail,
}

impl PanelLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PanelLabel::Underside => "underside",
            PanelLabel::LowerFront => "lower-front",
            PanelLabel::LowerTail => "lower-tail",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "underside" => Some(PanelLabel::Underside),
            "lower-front" => Some(PanelLabel::LowerFront),
            "lower-tail" => Some(PanelLabel::LowerTail),
            _ => None,
        }
    }
}

/// Receiving rectenna panel. `normal` is the outward unit normal in the body
/// frame (`x` forward, `y` left, `z` up).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverPanel {
    pub label: PanelLabel,
    pub normal: Vec3,
    /// m².
    pub area: f64,
    pub rf_to_dc: f64,
}

impl ReceiverPanel {
    pub fn new(label: PanelLabel, normal: Vec3, area: f64, rf_to_dc: f64) -> Result<Self> {
        if ((normal.norm()) - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("{} panel normal must be a unit vector", label.as_str())));
        }
        if !(area > 0.0) {
            return Err(Error::invalid(format!("{} panel area must be positive", label.as_str())));
        }
        if !(0.0..=1.0).contains(&rf_to_dc) {
            return Err(Error::invalid(format!("{} panel rf_to_dc must lie in [0, 1]", label.as_str())));
        }
        Ok(Self {
            label,
            normal,
            area,
            rf_to_dc,
        })
    }

    /// Underside plus fore and aft panels tilted `tilt_deg` from straight
    /// down toward the nose and tail.
    pub fn airliner_set(tilt_deg: f64, rf_to_dc: f64) -> Vec<ReceiverPanel> {
        let (s, c) = tilt_deg.to_radians().sin_cos();
        vec![
            ReceiverPanel {
                label: PanelLabel::Underside,
                normal: Vec3::new(0.0, 0.0, -1.0),
                area: 40.0,
                rf_to_dc,
            },
            ReceiverPanel {
                label: PanelLabel::LowerFront,
                normal: Vec3::new(s, 0.0, -c),
                area: 12.0,
                rf_to_dc,
            },
            ReceiverPanel {
                label: PanelLabel::LowerTail,
                normal: Vec3::new(-s, 0.0, -c),
                area: 12.0,
                rf_to_dc,
            },
        ]
    }
}

/// Body-to-world rotation of the aircraft.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attitude {
    m: [[f64; 3]; 3],
}

impl Attitude {
    pub const IDENTITY: Attitude = Attitude {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Wings level, nose along `heading_rad` measured counter-clockwise from
    /// world `+x`.
    pub fn level(heading_rad: f64) -> Self {
        let (s, c) = heading_rad.sin_cos();
        Self {
            m: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Rotation by `angle_rad` about a unit `axis` (Rodrigues).
    pub fn axis_angle(axis: Vec3, angle_rad: f64) -> Result<Self> {
        let a = axis.normalized().ok_or_else(|| Error::invalid("rotation axis is zero"))?;
        let (s, c) = angle_rad.sin_cos();
        let t = 1.0 - c;
        Ok(Self {
            m: [
                [t * a.x * a.x + c, t * a.x * a.y - s * a.z, t * a.x * a.z + s * a.y],
                [t * a.x * a.y + s * a.z, t * a.y * a.y + c, t * a.y * a.z - s * a.x],
                [t * a.x * a.z - s * a.y, t * a.y * a.z + s * a.x, t * a.z * a.z + c],
            ],
        })
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let r = |row: [f64; 3]| row[0] * v.x + row[1] * v.y + row[2] * v.z;
        Vec3::new(r(self.m[0]), r(self.m[1]), r(self.m[2]))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Attitude) -> Attitude {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Attitude { m }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelChoice {
    pub index: usize,
    pub label: PanelLabel,
    /// Cosine between the incoming beam and the panel normal.
    pub cosine: f64,
}

/// Panel facing the beam most squarely. `beam_dir` is the unit propagation
/// direction in the world frame (farm toward aircraft).
pub fn best_panel(panels: &[ReceiverPanel], beam_dir: Vec3, attitude: &Attitude) -> Result<PanelChoice> {
    if panels.is_empty() {
        return Err(Error::invalid("aircraft has no receiver panels"));
    }
    if (beam_dir.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("beam direction must be a unit vector"));
    }
    let mut best: Option<PanelChoice> = None;
    for (index, p) in panels.iter().enumerate() {
        let cosine = (-attitude.apply(p.normal).dot(beam_dir)).max(0.0);
        let better = match best {
            None => true,
            Some(b) => cosine > b.cosine + 1e-12 || ((cosine - b.cosine).abs() <= 1e-12 && p.label < b.label),
        };
        if better {
            best = Some(PanelChoice {
                index,
                label: p.label,
                cosine,
            });
        }
    }
    match best {
        Some(b) if b.cosine > 0.0 => Ok(b),
        _ => Err(Error::NoVisiblePanel),
    }
}

/// Mean RF power density over the farm surface, W/m².
pub fn farm_surface_density(input_power: f64, farm_area: f64) -> Result<f64> {
    if !(farm_area > 0.0) {
        return Err(Error::invalid(format!("farm area must be positive, got {farm_area}")));
    }
    if !(input_power >= 0.0) {
        return Err(Error::invalid(format!("input power must be non-negative, got {input_power}")));
    }
    Ok(input_power / farm_area)
}

/// Ground footprint of a beam specularly reflected off a flat patch of
/// `spot_diameter`, treating the patch as a radiating aperture of that size:
/// `max(spot, 1.22·λ·range/spot)`.
pub fn reflected_ground_diameter(spot_diameter: f64, rf: &RfSpec, range: f64) -> Result<f64> {
    if !(spot_diameter > 0.0) {
        return Err(Error::invalid(format!("spot diameter must be positive, got {spot_diameter}")));
    }
    if range == 0.0 {
        return Ok(spot_diameter);
    }
    Ok(spot_diameter.max(first_null_spot_diameter(spot_diameter, rf, range)?))
}

/// Mean density on the ground footprint of a reflected beam, W/m².
pub fn reflected_ground_density(reflected_power: f64, spot_diameter: f64, rf: &RfSpec, range: f64) -> Result<f64> {
    if !(reflected_power >= 0.0 && range >= 0.0) {
        return Err(Error::invalid("reflected power and range must be non-negative"));
    }
    let d = reflected_ground_diameter(spot_diameter, rf, range)?;
    Ok(reflected_power / (PI * 0.25 * d * d))
}

/// Density thresholds the safety checks compare against, W/m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyLimits {
    pub farm_surface: f64,
    pub reflected_ground: f64,
}

impl Default for SafetyLimits {
    fn default() -> Self {
        Self {
            farm_surface: 100.0,
            reflected_ground: 100.0,
        }
    }
}

/// Everything a link-budget report prints.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub chain: EfficiencyChain,
    pub end_to_end: f64,
    pub input_power: f64,
    pub delivered_power: f64,
    pub farm_area: f64,
    pub surface_density: f64,
    pub reflected_power: f64,
    pub spot_diameter: f64,
    pub reflection_range: f64,
    pub reflected_ground_diameter: f64,
    pub reflected_density: f64,
    pub limits: SafetyLimits,
}

impl LinkBudget {
    #[allow(clippy::too_many_arguments)]
    pub fn compute(
        chain: EfficiencyChain,
        input_power: f64,
        farm_area: f64,
        reflected_fraction: f64,
        spot_diameter: f64,
        rf: &RfSpec,
        reflection_range: f64,
        limits: SafetyLimits,
    ) -> Result<Self> {
        chain.validate()?;
        if !(0.0..=1.0).contains(&reflected_fraction) {
            return Err(Error::invalid("reflected fraction must lie in [0, 1]"));
        }
        // Conservative: the whole farm input is treated as beam power.
        let reflected_power = input_power * reflected_fraction;
        Ok(Self {
            chain,
            end_to_end: end_to_end(&chain),
            input_power,
            delivered_power: delivered_power(input_power, &chain)?,
            farm_area,
            surface_density: farm_surface_density(input_power, farm_area)?,
            reflected_power,
            spot_diameter,
            reflection_range,
            reflected_ground_diameter: reflected_ground_diameter(spot_diameter, rf, reflection_range)?,
            reflected_density: reflected_ground_density(reflected_power, spot_diameter, rf, reflection_range)?,
            limits,
        })
    }

    pub fn surface_pass(&self) -> bool {
        self.surface_density <= self.limits.farm_surface
    }

    pub fn reflected_pass(&self) -> bool {
        self.reflected_density <= self.limits.reflected_ground
    }
}
