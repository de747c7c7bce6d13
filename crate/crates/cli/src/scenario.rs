//! Scenario files: JSON with every field optional. Omitted fields take the
//! defaults below (A320, 1 km farm, 3 GHz).

use std::fs;
use std::io;
use std::path::Path;

use farmbeam_core::engine::ElementPattern;
use farmbeam_core::link::{PanelLabel, SafetyLimits};
use farmbeam_core::mission::{Farm, MassMode};
use farmbeam_core::{Aircraft, CostModel, EfficiencyChain, FarmNetwork, FlightPlan, ReceiverPanel, RfSpec, Vec3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario file {path}: {source}")]
    Missing { path: String, source: io::Error },
    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario field {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.to_owned(),
        message: message.into(),
    }
}

const LATTICE_SPACING: f64 = 31_622.776_601_683_792;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub rf: RfSection,
    pub array: ArraySection,
    pub beam: BeamSection,
    pub chain: ChainSection,
    pub aircraft: AircraftSection,
    pub network: NetworkSection,
    pub plan: PlanSection,
    pub cost: CostSection,
    pub safety: SafetySection,
    pub territories: Vec<Territory>,
    pub output: OutputSection,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            seed: 0,
            rf: RfSection::default(),
            array: ArraySection::default(),
            beam: BeamSection::default(),
            chain: ChainSection::default(),
            aircraft: AircraftSection::default(),
            network: NetworkSection::default(),
            plan: PlanSection::default(),
            cost: CostSection::default(),
            safety: SafetySection::default(),
            territories: vec![Territory::default()],
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfSection {
    /// Hz.
    pub frequency: f64,
}

impl Default for RfSection {
    fn default() -> Self {
        // λ = 0.1 m exactly.
        Self { frequency: 2.997_924_58e9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PatternName {
    Isotropic,
    IsolatedCosine,
    #[default]
    Cosine,
}

impl From<PatternName> for ElementPattern {
    fn from(p: PatternName) -> Self {
        match p {
            PatternName::Isotropic => ElementPattern::Isotropic,
            PatternName::IsolatedCosine => ElementPattern::IsolatedCosine,
            PatternName::Cosine => ElementPattern::Cosine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArraySection {
    /// m.
    pub diameter: f64,
    /// m; `None` means half a wavelength.
    pub spacing: Option<f64>,
    pub fill_fraction: f64,
    /// Element budget for field maps; larger farms are run at a
    /// geometrically similar reduced size.
    pub max_elements: usize,
    pub element_pattern: PatternName,
}

impl Default for ArraySection {
    fn default() -> Self {
        Self {
            diameter: 1000.0,
            spacing: None,
            fill_fraction: 1.0,
            max_elements: 8000,
            element_pattern: PatternName::Cosine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamSection {
    /// m, farm centre at the origin.
    pub target: [f64; 3],
    /// W of DC input to the farm; the beam radiates this times `chain.dc_to_rf`.
    pub input_power: f64,
    pub phase_bits: Option<u32>,
}

impl Default for BeamSection {
    fn default() -> Self {
        Self {
            target: [0.0, 0.0, 10_000.0],
            input_power: 1e8,
            phase_bits: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSection {
    pub dc_to_rf: f64,
    pub beam_collection: f64,
    pub incidence_cosine: f64,
    pub rf_to_dc: f64,
    pub atmospheric_transmission: f64,
}

impl Default for ChainSection {
    fn default() -> Self {
        let c = EfficiencyChain::default();
        Self {
            dc_to_rf: c.dc_to_rf,
            beam_collection: c.beam_collection,
            incidence_cosine: c.incidence_cosine,
            rf_to_dc: c.rf_to_dc,
            atmospheric_transmission: c.atmospheric_transmission,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelSpec {
    pub label: String,
    pub normal: [f64; 3],
    /// m².
    pub area: f64,
    pub rf_to_dc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AircraftSection {
    /// kg.
    pub mass: f64,
    pub lift_to_drag: f64,
    pub propulsive_efficiency: f64,
    /// m/s.
    pub cruise_speed: f64,
    /// kg/h.
    pub fuel_burn_reference: f64,
    /// kg.
    pub fuel_mass: f64,
    /// Explicit panels; `None` gives the standard underside/front/tail set.
    pub panels: Option<Vec<PanelSpec>>,
    /// Degrees from horizontal for the front and tail panels of the standard set.
    pub panel_tilt: f64,
    pub panel_rf_to_dc: f64,
}

impl Default for AircraftSection {
    fn default() -> Self {
        let a = Aircraft::a320();
        Self {
            mass: a.mass,
            lift_to_drag: a.lift_to_drag,
            propulsive_efficiency: a.propulsive_efficiency,
            cruise_speed: a.cruise_speed,
            fuel_burn_reference: a.fuel_burn_reference,
            fuel_mass: a.fuel_mass,
            panels: None,
            panel_tilt: 45.0,
            panel_rf_to_dc: 0.85,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarmSpec {
    pub site: [f64; 3],
    /// W.
    pub max_input_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSpec {
    /// m.
    pub spacing: f64,
    pub x: [f64; 2],
    pub y: [f64; 2],
    /// W per farm.
    pub max_input_power: f64,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        Self {
            spacing: LATTICE_SPACING,
            x: [0.0, 16.0 * LATTICE_SPACING],
            y: [-LATTICE_SPACING, LATTICE_SPACING],
            max_input_power: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    /// Explicit farms, used in addition to the lattice.
    pub farms: Vec<FarmSpec>,
    pub lattice: Option<LatticeSpec>,
    /// Degrees from zenith.
    pub max_scan: f64,
    /// m.
    pub max_slant_range: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            farms: Vec::new(),
            lattice: Some(LatticeSpec::default()),
            max_scan: 60.0,
            max_slant_range: 20_000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MassModeName {
    #[default]
    Constant,
    Integrating,
}

impl From<MassModeName> for MassMode {
    fn from(m: MassModeName) -> Self {
        match m {
            MassModeName::Constant => MassMode::Constant,
            MassModeName::Integrating => MassMode::Integrating,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanSection {
    /// m.
    pub waypoints: Vec<[f64; 3]>,
    /// m/s; `None` uses the aircraft cruise speed.
    pub speed: Option<f64>,
    /// s.
    pub timestep: f64,
    pub mass_mode: MassModeName,
}

impl Default for PlanSection {
    fn default() -> Self {
        Self {
            waypoints: vec![[0.0, 0.0, 10_000.0], [500_000.0, 0.0, 10_000.0]],
            speed: None,
            timestep: 10.0,
            mass_mode: MassModeName::Constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostSection {
    /// $/MWh.
    pub solar_lcoe: f64,
    pub rf_uplift: Option<f64>,
    /// $/m².
    pub panel_cost: f64,
    /// $/m².
    pub rf_added_cost: f64,
    /// $/h.
    pub fuel_cost_per_hour: f64,
}

impl Default for CostSection {
    fn default() -> Self {
        let c = CostModel::default();
        Self {
            solar_lcoe: c.solar_lcoe,
            rf_uplift: c.rf_uplift,
            panel_cost: c.panel_cost,
            rf_added_cost: c.rf_added_cost,
            fuel_cost_per_hour: c.fuel_cost_per_hour,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SafetySection {
    /// m².
    pub farm_area: f64,
    /// Share of the input power assumed reflected by the aircraft.
    pub reflected_fraction: f64,
    /// m, diameter of the reflecting spot.
    pub reflecting_spot_diameter: f64,
    /// m from reflector to ground; `None` uses the beam target altitude.
    pub reflection_range: Option<f64>,
    /// W/m².
    pub surface_limit: f64,
    /// W/m².
    pub reflected_limit: f64,
}

impl Default for SafetySection {
    fn default() -> Self {
        let l = SafetyLimits::default();
        Self {
            farm_area: 1e6,
            reflected_fraction: 1.0,
            reflecting_spot_diameter: 3.7,
            reflection_range: None,
            surface_limit: l.farm_surface,
            reflected_limit: l.reflected_ground,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Territory {
    pub name: String,
    /// km².
    pub area: f64,
    pub coverage_fraction: f64,
    /// km².
    pub farm_area: f64,
}

impl Default for Territory {
    fn default() -> Self {
        Self {
            name: "contiguous_us".into(),
            area: 8.08e6,
            coverage_fraction: 0.001,
            farm_area: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Samples per side of the beam map.
    pub grid_n: usize,
    /// Map half extent in units of the closed-form spot diameter.
    pub map_half_extent_spots: f64,
    /// m; disk radii at which the spot report gives the encircled fraction.
    pub encircled_radii: Vec<f64>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            grid_n: 129,
            map_half_extent_spots: 3.2,
            encircled_radii: vec![3.7],
        }
    }
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn finite(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be finite, got {v}")))
    }
}

fn positive(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be non-negative, got {v}")))
    }
}

fn fraction(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(invalid(field, format!("must lie in [0, 1], got {v}")))
    }
}

fn point(field: &str, a: [f64; 3]) -> Result<Vec3, ScenarioError> {
    for (i, v) in a.iter().enumerate() {
        finite(&format!("{field}[{i}]"), *v)?;
    }
    Ok(vec3(a))
}

/// Scenario after validation, converted to core types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub seed: u64,
    pub rf: RfSpec,
    pub diameter: f64,
    pub spacing: f64,
    pub fill_fraction: f64,
    pub max_elements: usize,
    pub pattern: ElementPattern,
    pub target: Vec3,
    pub input_power: f64,
    pub phase_bits: Option<u32>,
    pub chain: EfficiencyChain,
    pub aircraft: Aircraft,
    pub network: FarmNetwork,
    pub plan: FlightPlan,
    pub mass_mode: MassMode,
    pub cost: CostModel,
    pub safety: SafetySection,
    pub reflection_range: f64,
    pub limits: SafetyLimits,
    pub territories: Vec<Territory>,
    pub grid_n: usize,
    pub map_half_extent_spots: f64,
    pub encircled_radii: Vec<f64>,
}

impl Scenario {
    /// Checks every field and builds the core types. The error names the
    /// offending field by its JSON path.
    pub fn resolve(&self) -> Result<Resolved, ScenarioError> {
        let frequency = positive("rf.frequency", self.rf.frequency)?;
        let rf = RfSpec::from_frequency(frequency).map_err(|e| invalid("rf.frequency", e.to_string()))?;

        let a = &self.array;
        let diameter = positive("array.diameter", a.diameter)?;
        let spacing = match a.spacing {
            Some(s) => positive("array.spacing", s)?,
            None => 0.5 * rf.wavelength(),
        };
        if spacing > diameter {
            return Err(invalid("array.spacing", "must not exceed array.diameter"));
        }
        let fill_fraction = a.fill_fraction;
        if !(fill_fraction > 0.0 && fill_fraction <= 1.0) {
            return Err(invalid("array.fill_fraction", format!("must lie in (0, 1], got {fill_fraction}")));
        }
        if a.max_elements == 0 {
            return Err(invalid("array.max_elements", "must be at least 1"));
        }

        let b = &self.beam;
        let target = point("beam.target", b.target)?;
        if !(target.z > 0.0) {
            return Err(invalid("beam.target", "must lie above the farm (z > 0)"));
        }
        let input_power = positive("beam.input_power", b.input_power)?;
        if let Some(bits) = b.phase_bits {
            if !(1..=24).contains(&bits) {
                return Err(invalid("beam.phase_bits", format!("must lie in 1..=24, got {bits}")));
            }
        }

        let c = &self.chain;
        let chain = EfficiencyChain {
            dc_to_rf: fraction("chain.dc_to_rf", c.dc_to_rf)?,
            beam_collection: fraction("chain.beam_collection", c.beam_collection)?,
            incidence_cosine: fraction("chain.incidence_cosine", c.incidence_cosine)?,
            rf_to_dc: fraction("chain.rf_to_dc", c.rf_to_dc)?,
            atmospheric_transmission: fraction("chain.atmospheric_transmission", c.atmospheric_transmission)?,
        };

        let aircraft = self.resolve_aircraft()?;
        let network = self.resolve_network()?;

        let p = &self.plan;
        if p.waypoints.len() < 2 {
            return Err(invalid("plan.waypoints", "needs at least two waypoints"));
        }
        let mut waypoints = Vec::with_capacity(p.waypoints.len());
        for (i, w) in p.waypoints.iter().enumerate() {
            let v = point(&format!("plan.waypoints[{i}]"), *w)?;
            if !(v.z > 0.0) {
                return Err(invalid(&format!("plan.waypoints[{i}]"), "altitude must be positive"));
            }
            waypoints.push(v);
        }
        let speed = match p.speed {
            Some(s) => positive("plan.speed", s)?,
            None => aircraft.cruise_speed,
        };
        let plan = FlightPlan {
            waypoints,
            speed,
            timestep: positive("plan.timestep", p.timestep)?,
        };
        plan.validate().map_err(|e| invalid("plan", e.to_string()))?;

        let k = &self.cost;
        let cost = CostModel {
            solar_lcoe: non_negative("cost.solar_lcoe", k.solar_lcoe)?,
            rf_uplift: k.rf_uplift.map(|u| non_negative("cost.rf_uplift", u)).transpose()?,
            panel_cost: non_negative("cost.panel_cost", k.panel_cost)?,
            rf_added_cost: non_negative("cost.rf_added_cost", k.rf_added_cost)?,
            fuel_cost_per_hour: positive("cost.fuel_cost_per_hour", k.fuel_cost_per_hour)?,
        };
        if cost.rf_uplift.is_none() && cost.panel_cost == 0.0 {
            return Err(invalid("cost.panel_cost", "must be positive when cost.rf_uplift is not given"));
        }

        let s = &self.safety;
        positive("safety.farm_area", s.farm_area)?;
        fraction("safety.reflected_fraction", s.reflected_fraction)?;
        positive("safety.reflecting_spot_diameter", s.reflecting_spot_diameter)?;
        let reflection_range = match s.reflection_range {
            Some(r) => non_negative("safety.reflection_range", r)?,
            None => target.z,
        };
        let limits = SafetyLimits {
            farm_surface: positive("safety.surface_limit", s.surface_limit)?,
            reflected_ground: positive("safety.reflected_limit", s.reflected_limit)?,
        };

        for (i, t) in self.territories.iter().enumerate() {
            let f = |name: &str| format!("territories[{i}].{name}");
            if t.name.is_empty() {
                return Err(invalid(&f("name"), "must not be empty"));
            }
            positive(&f("area"), t.area)?;
            fraction(&f("coverage_fraction"), t.coverage_fraction)?;
            positive(&f("farm_area"), t.farm_area)?;
        }

        let o = &self.output;
        if o.grid_n < 16 {
            return Err(invalid("output.grid_n", format!("must be at least 16, got {}", o.grid_n)));
        }
        positive("output.map_half_extent_spots", o.map_half_extent_spots)?;
        for (i, r) in o.encircled_radii.iter().enumerate() {
            positive(&format!("output.encircled_radii[{i}]"), *r)?;
        }

        Ok(Resolved {
            seed: self.seed,
            rf,
            diameter,
            spacing,
            fill_fraction,
            max_elements: a.max_elements,
            pattern: a.element_pattern.into(),
            target,
            input_power,
            phase_bits: b.phase_bits,
            chain,
            aircraft,
            network,
            plan,
            mass_mode: p.mass_mode.into(),
            cost,
            safety: s.clone(),
            reflection_range,
            limits,
            territories: self.territories.clone(),
            grid_n: o.grid_n,
            map_half_extent_spots: o.map_half_extent_spots,
            encircled_radii: o.encircled_radii.clone(),
        })
    }

    fn resolve_aircraft(&self) -> Result<Aircraft, ScenarioError> {
        let a = &self.aircraft;
        let mass = positive("aircraft.mass", a.mass)?;
        let fuel_mass = non_negative("aircraft.fuel_mass", a.fuel_mass)?;
        if fuel_mass >= mass {
            return Err(invalid("aircraft.fuel_mass", "must be less than aircraft.mass"));
        }
        let eta = a.propulsive_efficiency;
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid("aircraft.propulsive_efficiency", format!("must lie in (0, 1], got {eta}")));
        }
        let panels = match &a.panels {
            None => {
                let tilt = a.panel_tilt;
                if !(0.0..=90.0).contains(&tilt) {
                    return Err(invalid("aircraft.panel_tilt", format!("must lie in [0, 90], got {tilt}")));
                }
                ReceiverPanel::airliner_set(tilt, fraction("aircraft.panel_rf_to_dc", a.panel_rf_to_dc)?)
            }
            Some(list) => {
                if list.is_empty() {
                    return Err(invalid("aircraft.panels", "must not be empty"));
                }
                let mut out = Vec::with_capacity(list.len());
                for (i, p) in list.iter().enumerate() {
                    let field = |name: &str| format!("aircraft.panels[{i}].{name}");
                    let label = PanelLabel::parse(&p.label).ok_or_else(|| {
                        invalid(&field("label"), format!("unknown panel {:?}", p.label))
                    })?;
                    let normal = point(&field("normal"), p.normal)?;
                    let panel = ReceiverPanel::new(
                        label,
                        normal,
                        positive(&field("area"), p.area)?,
                        fraction(&field("rf_to_dc"), p.rf_to_dc)?,
                    )
                    .map_err(|e| invalid(&field("normal"), e.to_string()))?;
                    out.push(panel);
                }
                out
            }
        };
        Ok(Aircraft {
            mass,
            lift_to_drag: positive("aircraft.lift_to_drag", a.lift_to_drag)?,
            propulsive_efficiency: eta,
            cruise_speed: positive("aircraft.cruise_speed", a.cruise_speed)?,
            fuel_burn_reference: positive("aircraft.fuel_burn_reference", a.fuel_burn_reference)?,
            fuel_mass,
            panels,
        })
    }

    fn resolve_network(&self) -> Result<FarmNetwork, ScenarioError> {
        let n = &self.network;
        let scan = n.max_scan;
        if !(scan > 0.0 && scan < 90.0) {
            return Err(invalid("network.max_scan", format!("must lie in (0, 90) degrees, got {scan}")));
        }
        let range = positive("network.max_slant_range", n.max_slant_range)?;
        let mut farms = Vec::new();
        if let Some(l) = &n.lattice {
            positive("network.lattice.spacing", l.spacing)?;
            non_negative("network.lattice.max_input_power", l.max_input_power)?;
            if !(l.x[0] <= l.x[1]) || !l.x[1].is_finite() {
                return Err(invalid("network.lattice.x", "bounds must be finite and ordered"));
            }
            if !(l.y[0] <= l.y[1]) || !l.y[1].is_finite() {
                return Err(invalid("network.lattice.y", "bounds must be finite and ordered"));
            }
            let grid = FarmNetwork::lattice(l.spacing, (l.x[0], l.x[1]), (l.y[0], l.y[1]), l.max_input_power, scan, range)
                .map_err(|e| invalid("network.lattice", e.to_string()))?;
            farms.extend(grid.farms);
        }
        for (i, f) in n.farms.iter().enumerate() {
            farms.push(Farm {
                site: point(&format!("network.farms[{i}].site"), f.site)?,
                max_input_power: non_negative(&format!("network.farms[{i}].max_input_power"), f.max_input_power)?,
            });
        }
        FarmNetwork::new(farms, scan, range).map_err(|e| invalid("network", e.to_string()))
    }
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario: Scenario = serde_json::from_str(text)?;
    scenario.resolve()?;
    Ok(scenario)
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Missing {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario_str(&text)
}
