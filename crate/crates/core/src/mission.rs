//! Cruise-phase mission simulation over a network of beaming farms.
//!
//! Each timestep the aircraft position is interpolated along the flight plan,
//! visible farms are found, the best receiver panel is picked per farm, and a
//! farm is assigned greedily. Whatever the beam does not cover is burned as
//! fuel through a turbo-generator path whose efficiency is calibrated so the
//! aircraft's reference fuel burn reproduces its fuel-only cruise power.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::link::{best_panel, end_to_end, Attitude, EfficiencyChain, PanelLabel, ReceiverPanel};
use crate::model::{constants, Vec3};

/// Fraction of required power that counts a step as covered.
pub const COVERED_THRESHOLD: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct Aircraft {
    /// kg, at the start of the mission.
    pub mass: f64,
    pub lift_to_drag: f64,
    /// Combined motor and fan efficiency.
    pub propulsive_efficiency: f64,
    /// m/s.
    pub cruise_speed: f64,
    /// kg/h burned in fuel-only cruise at `mass`.
    pub fuel_burn_reference: f64,
    /// kg of fuel on board at the start; `mass − fuel_mass` is zero-fuel mass.
    pub fuel_mass: f64,
    pub panels: Vec<ReceiverPanel>,
}

impl Aircraft {
    /// Turbo-electric A320-class airliner.
    pub fn a320() -> Self {
        Self {
            mass: 50_000.0,
            lift_to_drag: 18.0,
            propulsive_efficiency: 0.6,
            cruise_speed: 250.0,
            fuel_burn_reference: 2400.0,
            fuel_mass: 10_000.0,
            panels: ReceiverPanel::airliner_set(45.0, 0.85),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("cruise_speed", self.cruise_speed),
            ("fuel_burn_reference", self.fuel_burn_reference),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("aircraft {name} must be positive, got {v}")));
            }
        }
        if !(self.lift_to_drag > 1.0) {
            return Err(Error::invalid(format!(
                "aircraft lift_to_drag must exceed 1, got {}",
                self.lift_to_drag
            )));
        }
        if !(self.propulsive_efficiency > 0.0 && self.propulsive_efficiency <= 1.0) {
            return Err(Error::invalid(format!(
                "aircraft propulsive_efficiency must lie in (0, 1], got {}",
                self.propulsive_efficiency
            )));
        }
        if !(self.fuel_mass >= 0.0 && self.fuel_mass < self.mass) {
            return Err(Error::invalid("aircraft fuel_mass must lie in [0, mass)"));
        }
        if self.panels.is_empty() {
            return Err(Error::invalid("aircraft needs at least one receiver panel"));
        }
        Ok(())
    }

    pub fn zero_fuel_mass(&self) -> f64 {
        self.mass - self.fuel_mass
    }

    /// Shaft power to hold level flight at `mass` and `speed`, W.
    pub fn power_at(&self, mass: f64, speed: f64) -> f64 {
        mass * constants::G * speed / (self.lift_to_drag * self.propulsive_efficiency)
    }

    /// Efficiency from fuel chemical energy to the electric bus implied by
    /// the reference burn at the initial mass and cruise speed.
    pub fn fuel_path_efficiency(&self) -> f64 {
        let fuel_power = self.fuel_burn_reference / 3600.0 * constants::JET_FUEL_SPECIFIC_ENERGY;
        cruise_power(self) / fuel_power
    }
}

/// `m·g·V / (L/D · η)`, W.
pub fn cruise_power(aircraft: &Aircraft) -> f64 {
    aircraft.power_at(aircraft.mass, aircraft.cruise_speed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Farm {
    /// Ground position; `z` is the farm surface height.
    pub site: Vec3,
    /// W drawn at the farm, at most.
    pub max_input_power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarmNetwork {
    pub farms: Vec<Farm>,
    pub max_scan_deg: f64,
    pub max_slant_range: f64,
}

impl FarmNetwork {
    pub fn new(farms: Vec<Farm>, max_scan_deg: f64, max_slant_range: f64) -> Result<Self> {
        let net = Self {
            farms,
            max_scan_deg,
            max_slant_range,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn empty(max_scan_deg: f64, max_slant_range: f64) -> Result<Self> {
        Self::new(Vec::new(), max_scan_deg, max_slant_range)
    }

    /// Farms on a square lattice of `spacing` covering the closed rectangle
    /// `[x0, x1] × [y0, y1]`, lattice anchored at `(x0, y0)`.
    #[allow(clippy::too_many_arguments)]
    pub fn lattice(
        spacing: f64,
        x: (f64, f64),
        y: (f64, f64),
        max_input_power: f64,
        max_scan_deg: f64,
        max_slant_range: f64,
    ) -> Result<Self> {
        if !(spacing > 0.0) || x.1 < x.0 || y.1 < y.0 {
            return Err(Error::invalid("farm lattice needs positive spacing and ordered bounds"));
        }
        let nx = ((x.1 - x.0) / spacing + 1e-9).floor() as usize + 1;
        let ny = ((y.1 - y.0) / spacing + 1e-9).floor() as usize + 1;
        let farms = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| Farm {
                site: Vec3::new(x.0 + i as f64 * spacing, y.0 + j as f64 * spacing, 0.0),
                max_input_power,
            })
            .collect();
        Self::new(farms, max_scan_deg, max_slant_range)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_slant_range > 0.0) {
            return Err(Error::invalid("network max_slant_range must be positive"));
        }
        if !(self.max_scan_deg > 0.0 && self.max_scan_deg < 90.0) {
            return Err(Error::invalid("network max_scan_deg must lie in (0, 90)"));
        }
        for (i, f) in self.farms.iter().enumerate() {
            if !(f.max_input_power >= 0.0) || !f.site.is_finite() {
                return Err(Error::invalid(format!("farm {i} has an invalid site or power cap")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visibility {
    pub visible: bool,
    /// m.
    pub slant_range: f64,
    /// Degrees from the farm zenith.
    pub scan_angle_deg: f64,
}

/// Slant range and scan angle from `farm_site` to `aircraft`, gated by the
/// network's range and steering limits.
pub fn farm_visibility(farm_site: Vec3, aircraft: Vec3, network: &FarmNetwork) -> Result<Visibility> {
    let d = aircraft - farm_site;
    if !(d.z > 0.0) {
        return Err(Error::invalid("aircraft must be above the farm"));
    }
    let slant = d.norm();
    let scan = (d.z / slant).clamp(-1.0, 1.0).acos().to_degrees();
    let tol = 1e-9;
    let visible = slant <= network.max_slant_range * (1.0 + tol) && scan <= network.max_scan_deg + tol;
    Ok(Visibility {
        visible,
        slant_range: slant,
        scan_angle_deg: scan,
    })
}

/// A farm an aircraft could draw from, with the efficiency it would see.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Index into [`FarmNetwork::farms`].
    pub farm: usize,
    /// Farm input to aircraft bus, including the panel cosine.
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRequest {
    /// W needed on the aircraft bus.
    pub required: f64,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub farm: Option<usize>,
    /// W drawn at the farm.
    pub input_power: f64,
    /// W arriving on the bus.
    pub delivered: f64,
    pub shortfall: f64,
}

/// Greedy single-farm assignment.
///
/// Aircraft with the fewest candidates choose first (ties by request order).
/// Each takes the candidate farm with the most spare input (ties by farm
/// index) and draws `min(spare·η, need)`. A farm can serve several aircraft
/// until its input cap is used up. Unmet demand is reported as shortfall.
pub fn assign_farms(requests: &[PowerRequest], network: &FarmNetwork) -> Result<Vec<Allocation>> {
    let mut spare: Vec<f64> = network.farms.iter().map(|f| f.max_input_power).collect();
    let mut order: Vec<usize> = (0..requests.len()).collect();
    order.sort_by_key(|&i| (requests[i].candidates.len(), i));

    let mut out = vec![
        Allocation {
            farm: None,
            input_power: 0.0,
            delivered: 0.0,
            shortfall: 0.0,
        };
        requests.len()
    ];
    for i in order {
        let req = &requests[i];
        if !(req.required >= 0.0) {
            return Err(Error::invalid(format!("request {i} has negative required power")));
        }
        let mut pick: Option<Candidate> = None;
        for c in &req.candidates {
            if c.farm >= spare.len() {
                return Err(Error::invalid(format!("request {i} names unknown farm {}", c.farm)));
            }
            if !(c.efficiency > 0.0 && c.efficiency <= 1.0) {
                continue;
            }
            let better = match pick {
                None => true,
                Some(p) => spare[c.farm] > spare[p.farm] || (spare[c.farm] == spare[p.farm] && c.farm < p.farm),
            };
            if better {
                pick = Some(*c);
            }
        }
        out[i] = match pick {
            Some(c) if spare[c.farm] > 0.0 && req.required > 0.0 => {
                let delivered = (spare[c.farm] * c.efficiency).min(req.required);
                let input = delivered / c.efficiency;
                spare[c.farm] = (spare[c.farm] - input).max(0.0);
                Allocation {
                    farm: Some(c.farm),
                    input_power: input,
                    delivered,
                    shortfall: req.required - delivered,
                }
            }
            _ => Allocation {
                farm: None,
                input_power: 0.0,
                delivered: 0.0,
                shortfall: req.required,
            },
        };
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlightPlan {
    /// `(x, y, altitude)` in metres.
    pub waypoints: Vec<Vec3>,
    /// m/s.
    pub speed: f64,
    /// s.
    pub timestep: f64,
}

impl FlightPlan {
    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::invalid("flight plan needs at least two waypoints"));
        }
        if self.waypoints.iter().any(|w| !(w.z > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("waypoint altitudes must be positive"));
        }
        if !(self.speed > 0.0) {
            return Err(Error::invalid("flight plan speed must be positive"));
        }
        if !(self.timestep > 0.0) {
            return Err(Error::invalid("flight plan timestep must be positive"));
        }
        if !(self.length() > 0.0) {
            return Err(Error::invalid("flight plan has zero length"));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn duration(&self) -> f64 {
        self.length() / self.speed
    }

    /// Position and heading after flying `distance` metres along the plan.
    pub fn locate(&self, distance: f64) -> (Vec3, f64) {
        let mut left = distance.max(0.0);
        let last = self.waypoints.len() - 2;
        for (i, w) in self.waypoints.windows(2).enumerate() {
            let seg = w[1] - w[0];
            let len = seg.norm();
            if left <= len || i == last {
                let frac = if len > 0.0 { (left / len).min(1.0) } else { 0.0 };
                let heading = if seg.horizontal_norm() > 0.0 { seg.y.atan2(seg.x) } else { 0.0 };
                return (w[0] + seg * frac, heading);
            }
            left -= len;
        }
        unreachable!("validated plan has at least one segment")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassMode {
    /// Mass fixed at the initial value; fuel is not limited by the tank.
    #[default]
    Constant,
    /// Mass decreases with fuel burned, down to zero-fuel mass.
    Integrating,
}

/// Beam link used for one timestep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServingLink {
    pub farm: usize,
    pub slant_range: f64,
    pub scan_angle_deg: f64,
    pub panel: PanelLabel,
    pub cosine: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionStep {
    /// s, at the start of the step.
    pub time: f64,
    /// s.
    pub duration: f64,
    pub position: Vec3,
    pub link: Option<ServingLink>,
    /// W.
    pub required_power: f64,
    pub delivered_power: f64,
    pub fuel_power: f64,
    /// Power neither beamed nor burned (empty tank).
    pub unmet_power: f64,
    /// kg/s.
    pub fuel_rate: f64,
    /// kg burned up to the end of this step.
    pub cumulative_fuel: f64,
    /// kg at the start of the step.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionTrace {
    pub steps: Vec<MissionStep>,
    pub fuel_path_efficiency: f64,
    pub mass_mode: MassMode,
}

impl MissionTrace {
    pub fn total_fuel(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cumulative_fuel)
    }

    pub fn duration(&self) -> f64 {
        self.steps.iter().map(|s| s.duration).sum()
    }
}

pub const TRACE_CSV_HEADER: &str =
    "t_s,x_m,y_m,z_m,farm_id,slant_m,scan_deg,panel,cosine,delivered_W,fuel_rate_kg_s,fuel_kg";

/// One row per step. Steps without a serving farm leave the link columns
/// empty.
pub fn write_trace_csv<W: Write>(trace: &MissionTrace, mut out: W) -> io::Result<()> {
    writeln!(out, "{TRACE_CSV_HEADER}")?;
    for s in &trace.steps {
        write!(out, "{:.3},{:.3},{:.3},{:.3},", s.time, s.position.x, s.position.y, s.position.z)?;
        match s.link {
            Some(l) => write!(
                out,
                "{},{:.3},{:.6},{},{:.9},",
                l.farm,
                l.slant_range,
                l.scan_angle_deg,
                l.panel.as_str(),
                l.cosine
            )?,
            None => write!(out, ",,,,,")?,
        }
        writeln!(out, "{:.6},{:.9},{:.6}", s.delivered_power, s.fuel_rate, s.cumulative_fuel)?;
    }
    Ok(())
}

/// Farms the aircraft at `position` could draw from, with the best panel
/// for each.
pub fn visible_candidates(
    position: Vec3,
    attitude: &Attitude,
    aircraft: &Aircraft,
    network: &FarmNetwork,
    chain: &EfficiencyChain,
) -> Result<Vec<(Candidate, ServingLink)>> {
    let mut out = Vec::new();
    for (idx, farm) in network.farms.iter().enumerate() {
        let d = position - farm.site;
        // Cheap horizontal reject before the exact test.
        if d.horizontal_norm() > network.max_slant_range {
            continue;
        }
        let vis = farm_visibility(farm.site, position, network)?;
        if !vis.visible {
            continue;
        }
        let dir = d * (1.0 / vis.slant_range);
        let choice = match best_panel(&aircraft.panels, dir, attitude) {
            Ok(c) => c,
            Err(Error::NoVisiblePanel) => continue,
            Err(e) => return Err(e),
        };
        let panel = &aircraft.panels[choice.index];
        let mut link_chain = chain.with_incidence(choice.cosine)?;
        link_chain.rf_to_dc = panel.rf_to_dc;
        let efficiency = end_to_end(&link_chain);
        if efficiency <= 0.0 {
            continue;
        }
        out.push((
            Candidate { farm: idx, efficiency },
            ServingLink {
                farm: idx,
                slant_range: vis.slant_range,
                scan_angle_deg: vis.scan_angle_deg,
                panel: choice.label,
                cosine: choice.cosine,
            },
        ));
    }
    Ok(out)
}

/// Time-stepped cruise simulation for one aircraft.
///
/// The chain's incidence stage is replaced per farm by the selected panel's
/// cosine and its rectenna stage by the panel's own efficiency.
pub fn simulate_mission(
    plan: &FlightPlan,
    aircraft: &Aircraft,
    network: &FarmNetwork,
    chain: &EfficiencyChain,
    mass_mode: MassMode,
) -> Result<MissionTrace> {
    plan.validate()?;
    aircraft.validate()?;
    network.validate()?;
    chain.validate()?;

    let eta_fuel = aircraft.fuel_path_efficiency();
    let fuel_energy = constants::JET_FUEL_SPECIFIC_ENERGY * eta_fuel;
    let total = plan.duration();
    let n_steps = ((total / plan.timestep) - 1e-9).ceil().max(1.0) as usize;

    let mut mass = aircraft.mass;
    let zero_fuel = aircraft.zero_fuel_mass();
    let mut burned = 0.0;
    let mut steps = Vec::with_capacity(n_steps);
    for k in 0..n_steps {
        let time = k as f64 * plan.timestep;
        let duration = plan.timestep.min(total - time);
        let (position, heading) = plan.locate(time * plan.speed);
        let attitude = Attitude::level(heading);
        let required = aircraft.power_at(mass, plan.speed);

        let options = visible_candidates(position, &attitude, aircraft, network, chain)?;
        let request = PowerRequest {
            required,
            candidates: options.iter().map(|(c, _)| *c).collect(),
        };
        let alloc = assign_farms(std::slice::from_ref(&request), network)?[0];
        let link = alloc
            .farm
            .and_then(|f| options.iter().find(|(c, _)| c.farm == f).map(|(_, l)| *l));

        let mut fuel_power = required - alloc.delivered;
        let mut fuel_rate = fuel_power / fuel_energy;
        let mut unmet = 0.0;
        if mass_mode == MassMode::Integrating {
            let available = (mass - zero_fuel).max(0.0);
            if fuel_rate * duration > available {
                fuel_rate = available / duration;
                let burnable = fuel_rate * fuel_energy;
                unmet = fuel_power - burnable;
                fuel_power = burnable;
            }
        }
        burned += fuel_rate * duration;
        steps.push(MissionStep {
            time,
            duration,
            position,
            link,
            required_power: required,
            delivered_power: alloc.delivered,
            fuel_power,
            unmet_power: unmet,
            fuel_rate,
            cumulative_fuel: burned,
            mass,
        });
        if mass_mode == MassMode::Integrating {
            mass = (mass - fuel_rate * duration).max(zero_fuel);
        }
    }
    Ok(MissionTrace {
        steps,
        fuel_path_efficiency: eta_fuel,
        mass_mode,
    })
}

/// Time-weighted share of the mission with at least 95% of the required
/// power beamed.
pub fn coverage_fraction(trace: &MissionTrace) -> Result<f64> {
    let total = trace.duration();
    if trace.steps.is_empty() || !(total > 0.0) {
        return Err(Error::invalid("coverage needs a non-empty trace"));
    }
    let covered: f64 = trace
        .steps
        .iter()
        .filter(|s| s.delivered_power >= COVERED_THRESHOLD * s.required_power)
        .map(|s| s.duration)
        .sum();
    Ok(covered / total)
}

/// Mission compared against the same plan flown on fuel alone.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionSummary {
    pub coverage_fraction: f64,
    /// kg.
    pub total_fuel: f64,
    /// kg, same plan with no farms.
    pub fuel_only_baseline: f64,
    /// kg.
    pub fuel_saved: f64,
    pub fuel_path_efficiency: f64,
    /// s.
    pub duration: f64,
    pub mass_mode: MassMode,
}

pub fn summarize_mission(
    plan: &FlightPlan,
    aircraft: &Aircraft,
    network: &FarmNetwork,
    chain: &EfficiencyChain,
    mass_mode: MassMode,
) -> Result<(MissionTrace, MissionSummary)> {
    let trace = simulate_mission(plan, aircraft, network, chain, mass_mode)?;
    let empty = FarmNetwork::empty(network.max_scan_deg, network.max_slant_range)?;
    let baseline = simulate_mission(plan, aircraft, &empty, chain, mass_mode)?;
    let summary = MissionSummary {
        coverage_fraction: coverage_fraction(&trace)?,
        total_fuel: trace.total_fuel(),
        fuel_only_baseline: baseline.total_fuel(),
        fuel_saved: baseline.total_fuel() - trace.total_fuel(),
        fuel_path_efficiency: trace.fuel_path_efficiency,
        duration: trace.duration(),
        mass_mode,
    };
    Ok((trace, summary))
}
