//! Subcommand bodies. Each returns its artifacts as bytes so the caller
//! decides whether they go to stdout or to files.

use std::fmt::Write as _;

use farmbeam_core::econ::{
    beamed_cost, beamed_cost_per_hour, breakeven_efficiency, farm_network_estimate, fuel_price_per_kg,
};
use farmbeam_core::engine::{
    encircled_energy, evaluate_field_fast, first_null_spot_diameter, focus_command, grating_lobe_margin,
    measure_first_null_radius, quantize_phases, similarity_scale, write_field_binary, write_field_csv, FieldMap,
    FieldModel, PlaneGrid,
};
use farmbeam_core::link::{end_to_end, LinkBudget};
use farmbeam_core::mission::{cruise_power, summarize_mission, write_trace_csv, MassMode};
use farmbeam_core::model::make_planar_array;
use farmbeam_core::Vec3;
use serde::Serialize;
use serde_json::json;

use crate::scenario::Resolved;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: &'static str,
    pub bytes: Vec<u8>,
}

/// Output of one subcommand: every artifact it can write, and which of them
/// goes to stdout for each format.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub text: &'static str,
    pub json: &'static str,
}

impl Outcome {
    pub fn primary(&self, format: Format) -> &Artifact {
        let name = match format {
            Format::Csv => self.text,
            Format::Json => self.json,
        };
        self.artifacts.iter().find(|a| a.name == name).expect("primary artifact present")
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report serialises");
    v.push(b'\n');
    v
}

/// Aligned `key  value` lines.
fn kv_text(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        writeln!(s, "{k:<width$}  {v}").unwrap();
    }
    s
}

fn map_err(e: farmbeam_core::Error) -> String {
    e.to_string()
}

/// Focal map of the farm, computed at a geometrically similar scale when the
/// full farm exceeds the element budget.
pub struct FocalRun {
    pub scale: f64,
    pub simulated_aperture: f64,
    pub simulated_target: Vec3,
    pub elements: usize,
    pub radiated_power: f64,
    pub spot_diameter: f64,
    pub half_extent: f64,
    pub map: FieldMap,
}

pub fn focal_run(r: &Resolved, grid_n: usize) -> Result<FocalRun, String> {
    let mut scale = similarity_scale(r.diameter, r.spacing, r.max_elements).map_err(map_err)?;
    // The disk estimate can overshoot the budget by a few lattice points.
    let mut layout = make_planar_array(r.diameter / scale, r.spacing, r.fill_fraction, r.seed).map_err(map_err)?;
    while layout.total_count() > r.max_elements {
        scale *= 1.002;
        layout = make_planar_array(r.diameter / scale, r.spacing, r.fill_fraction, r.seed).map_err(map_err)?;
    }
    let aperture = r.diameter / scale;
    let target = r.target * (1.0 / scale);
    let model = FieldModel::new(r.rf, r.pattern);
    let radiated = r.input_power * r.chain.dc_to_rf;
    let mut cmd = focus_command(&layout, &r.rf, target, radiated).map_err(map_err)?;
    if let Some(bits) = r.phase_bits {
        quantize_phases(&mut cmd.phases, bits).map_err(map_err)?;
    }
    let spot = first_null_spot_diameter(r.diameter, &r.rf, r.target.norm()).map_err(map_err)?;
    let half = r.map_half_extent_spots * spot;
    let grid = PlaneGrid::horizontal(target, half, grid_n).map_err(map_err)?;
    let map = evaluate_field_fast(&layout, &model, &cmd, &grid).map_err(map_err)?;
    Ok(FocalRun {
        scale,
        simulated_aperture: aperture,
        simulated_target: target,
        elements: layout.active_count(),
        radiated_power: radiated,
        spot_diameter: spot,
        half_extent: half,
        map,
    })
}

pub fn spot(r: &Resolved, grid_n: usize) -> Result<Outcome, String> {
    let run = focal_run(r, grid_n)?;
    let t = run.simulated_target;
    let null_r = measure_first_null_radius(&run.map, t).map_err(map_err)?;
    let disk = 2.0 * run.spot_diameter;
    let ee_null = encircled_energy(&run.map, t, disk, run.radiated_power).map_err(map_err)?;
    let mut disks = Vec::new();
    for &radius in &r.encircled_radii {
        let f = encircled_energy(&run.map, t, 2.0 * radius, run.radiated_power).map_err(map_err)?;
        disks.push((radius, f));
    }

    let mut rows = vec![
        ("aperture_m", format!("{:.3}", r.diameter)),
        ("range_m", format!("{:.3}", r.target.norm())),
        ("wavelength_m", format!("{:.6}", r.rf.wavelength())),
        ("element_spacing_m", format!("{:.6}", r.spacing)),
        ("similarity_scale", format!("{:.6}", run.scale)),
        ("simulated_aperture_m", format!("{:.6}", run.simulated_aperture)),
        ("simulated_range_m", format!("{:.6}", run.simulated_target.norm())),
        ("simulated_elements", run.elements.to_string()),
        ("grid_samples_per_side", grid_n.to_string()),
        ("spot_diameter_m", format!("{:.6}", run.spot_diameter)),
        ("first_null_radius_measured_m", format!("{null_r:.6}")),
        ("first_null_disk_diameter_m", format!("{disk:.6}")),
        ("encircled_fraction_first_null", format!("{ee_null:.6}")),
        ("peak_density_W_per_m2", format!("{:.6e}", run.map.peak_density())),
    ];
    let labels: Vec<String> = disks.iter().map(|(rad, _)| format!("encircled_fraction_radius_{rad}_m")).collect();
    for ((_, f), label) in disks.iter().zip(&labels) {
        rows.push((label.as_str(), format!("{f:.6}")));
    }
    let text = kv_text(&rows);
    let report = json!({
        "aperture_m": r.diameter,
        "range_m": r.target.norm(),
        "wavelength_m": r.rf.wavelength(),
        "element_spacing_m": r.spacing,
        "similarity_scale": run.scale,
        "simulated_aperture_m": run.simulated_aperture,
        "simulated_range_m": run.simulated_target.norm(),
        "simulated_elements": run.elements,
        "grid_samples_per_side": grid_n,
        "spot_diameter_m": run.spot_diameter,
        "first_null_radius_measured_m": null_r,
        "first_null_disk_diameter_m": disk,
        "encircled_fraction_first_null": ee_null,
        "peak_density_W_per_m2": run.map.peak_density(),
        "encircled_fraction_by_radius": disks
            .iter()
            .map(|(radius, f)| json!({"radius_m": radius, "fraction": f}))
            .collect::<Vec<_>>(),
    });
    Ok(Outcome {
        artifacts: vec![
            Artifact {
                name: "spot.txt",
                bytes: text.into_bytes(),
            },
            Artifact {
                name: "spot.json",
                bytes: json_bytes(&report),
            },
        ],
        text: "spot.txt",
        json: "spot.json",
    })
}

pub fn beam_map(r: &Resolved, grid_n: usize) -> Result<Outcome, String> {
    let run = focal_run(r, grid_n)?;
    // Report the map around the real target; the similar run has the same
    // spot in the same plane-relative coordinates.
    let grid = PlaneGrid::horizontal(r.target, run.half_extent, grid_n).map_err(map_err)?;
    let map = FieldMap { grid, ..run.map };
    let mut csv = Vec::new();
    write_field_csv(&map, &mut csv).map_err(|e| e.to_string())?;
    let mut bin = Vec::new();
    write_field_binary(&map, &mut bin).map_err(|e| e.to_string())?;
    let (nu, nv) = map.grid.dims();
    let (du, dv) = map.grid.spacing();
    let meta = json!({
        "columns": nu,
        "rows": nv,
        "origin_m": [map.grid.origin().x, map.grid.origin().y, map.grid.origin().z],
        "column_spacing_m": du,
        "row_spacing_m": dv,
        "similarity_scale": run.scale,
        "peak_density_W_per_m2": map.peak_density(),
        "power_density_W_per_m2": map.power_density,
    });
    Ok(Outcome {
        artifacts: vec![
            Artifact {
                name: "beam_map.csv",
                bytes: csv,
            },
            Artifact {
                name: "beam_map.bin",
                bytes: bin,
            },
            Artifact {
                name: "beam_map.json",
                bytes: json_bytes(&meta),
            },
        ],
        text: "beam_map.csv",
        json: "beam_map.json",
    })
}

fn link_budget(r: &Resolved) -> Result<LinkBudget, String> {
    LinkBudget::compute(
        r.chain,
        r.input_power,
        r.safety.farm_area,
        r.safety.reflected_fraction,
        r.safety.reflecting_spot_diameter,
        &r.rf,
        r.reflection_range,
        r.limits,
    )
    .map_err(map_err)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn link(r: &Resolved) -> Result<Outcome, String> {
    let b = link_budget(r)?;
    let lobes = grating_lobe_margin(r.spacing, &r.rf, r.network.max_scan_deg).map_err(map_err)?;
    let mut rows: Vec<(String, String)> = b
        .chain
        .stages()
        .iter()
        .map(|(name, v)| (format!("stage_{name}"), format!("{v:.6}")))
        .collect();
    rows.extend([
        ("end_to_end".to_owned(), format!("{:.6}", b.end_to_end)),
        ("input_power_W".to_owned(), format!("{:.6e}", b.input_power)),
        ("delivered_power_W".to_owned(), format!("{:.6e}", b.delivered_power)),
        ("farm_area_m2".to_owned(), format!("{:.3}", b.farm_area)),
        ("farm_surface_density_W_per_m2".to_owned(), format!("{:.6}", b.surface_density)),
        ("reflected_power_W".to_owned(), format!("{:.6e}", b.reflected_power)),
        ("reflecting_spot_diameter_m".to_owned(), format!("{:.6}", b.spot_diameter)),
        ("reflection_range_m".to_owned(), format!("{:.3}", b.reflection_range)),
        ("reflected_ground_diameter_m".to_owned(), format!("{:.6}", b.reflected_ground_diameter)),
        ("reflected_ground_density_W_per_m2".to_owned(), format!("{:.6}", b.reflected_density)),
        ("surface_limit_W_per_m2".to_owned(), format!("{:.3}", b.limits.farm_surface)),
        ("reflected_limit_W_per_m2".to_owned(), format!("{:.3}", b.limits.reflected_ground)),
        ("surface_check".to_owned(), pass(b.surface_pass()).to_owned()),
        ("reflected_check".to_owned(), pass(b.reflected_pass()).to_owned()),
        ("grating_lobe_margin".to_owned(), format!("{:.6}", lobes.margin)),
        ("grating_lobe_free_to_max_scan".to_owned(), lobes.lobe_free.to_string()),
    ]);
    let borrowed: Vec<(&str, String)> = rows.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    let stages: serde_json::Map<String, serde_json::Value> =
        b.chain.stages().iter().map(|(k, v)| ((*k).to_owned(), json!(v))).collect();
    let report = json!({
        "stages": stages,
        "end_to_end": b.end_to_end,
        "input_power_W": b.input_power,
        "delivered_power_W": b.delivered_power,
        "farm_area_m2": b.farm_area,
        "farm_surface_density_W_per_m2": b.surface_density,
        "reflected_power_W": b.reflected_power,
        "reflecting_spot_diameter_m": b.spot_diameter,
        "reflection_range_m": b.reflection_range,
        "reflected_ground_diameter_m": b.reflected_ground_diameter,
        "reflected_ground_density_W_per_m2": b.reflected_density,
        "surface_limit_W_per_m2": b.limits.farm_surface,
        "reflected_limit_W_per_m2": b.limits.reflected_ground,
        "surface_pass": b.surface_pass(),
        "reflected_pass": b.reflected_pass(),
        "grating_lobe_margin": lobes.margin,
        "grating_lobe_free_to_max_scan": lobes.lobe_free,
    });
    Ok(Outcome {
        artifacts: vec![
            Artifact {
                name: "link.txt",
                bytes: kv_text(&borrowed).into_bytes(),
            },
            Artifact {
                name: "link.json",
                bytes: json_bytes(&report),
            },
        ],
        text: "link.txt",
        json: "link.json",
    })
}

pub fn safety(r: &Resolved) -> Result<Outcome, String> {
    let b = link_budget(r)?;
    let mut text = String::new();
    writeln!(
        text,
        "{} farm_surface_density {:.6} W/m2 limit {:.3} W/m2",
        pass(b.surface_pass()),
        b.surface_density,
        b.limits.farm_surface
    )
    .unwrap();
    writeln!(
        text,
        "{} reflected_ground_density {:.6} W/m2 limit {:.3} W/m2 ground_diameter {:.6} m",
        pass(b.reflected_pass()),
        b.reflected_density,
        b.limits.reflected_ground,
        b.reflected_ground_diameter
    )
    .unwrap();
    let report = json!({
        "farm_surface_density_W_per_m2": b.surface_density,
        "surface_limit_W_per_m2": b.limits.farm_surface,
        "surface_pass": b.surface_pass(),
        "reflected_ground_density_W_per_m2": b.reflected_density,
        "reflected_ground_diameter_m": b.reflected_ground_diameter,
        "reflected_limit_W_per_m2": b.limits.reflected_ground,
        "reflected_pass": b.reflected_pass(),
    });
    Ok(Outcome {
        artifacts: vec![
            Artifact {
                name: "safety.txt",
                bytes: text.into_bytes(),
            },
            Artifact {
                name: "safety.json",
                bytes: json_bytes(&report),
            },
        ],
        text: "safety.txt",
        json: "safety.json",
    })
}

pub fn coverage(r: &Resolved) -> Result<Outcome, String> {
    let (trace, s) = summarize_mission(&r.plan, &r.aircraft, &r.network, &r.chain, r.mass_mode).map_err(map_err)?;
    let mut csv = Vec::new();
    write_trace_csv(&trace, &mut csv).map_err(|e| e.to_string())?;
    let unmet: f64 = trace.steps.iter().map(|st| st.unmet_power * st.duration).sum();
    let mode = match s.mass_mode {
        MassMode::Constant => "constant",
        MassMode::Integrating => "integrating",
    };
    let report = json!({
        "farms": r.network.farms.len(),
        "route_length_m": r.plan.length(),
        "duration_s": s.duration,
        "timestep_s": r.plan.timestep,
        "mass_mode": mode,
        "coverage_fraction": s.coverage_fraction,
        "fuel_kg": s.total_fuel,
        "fuel_only_baseline_kg": s.fuel_only_baseline,
        "fuel_saved_kg": s.fuel_saved,
        "fuel_path_efficiency": s.fuel_path_efficiency,
        "unmet_energy_J": unmet,
    });
    Ok(Outcome {
        artifacts: vec![
            Artifact {
                name: "coverage_trace.csv",
                bytes: csv,
            },
            Artifact {
                name: "coverage_summary.json",
                bytes: json_bytes(&report),
            },
        ],
        text: "coverage_trace.csv",
        json: "coverage_summary.json",
    })
}

pub fn econ(r: &Resolved) -> Result<Outcome, String> {
    let power = cruise_power(&r.aircraft);
    let eta = end_to_end(&r.chain);
    let price = beamed_cost(&r.cost);
    let hourly = beamed_cost_per_hour(power, eta, price).map_err(map_err)?;
    let breakeven = breakeven_efficiency(power, price, r.cost.fuel_cost_per_hour).map_err(map_err)?;
    let fuel_kg = fuel_price_per_kg(r.cost.fuel_cost_per_hour, r.aircraft.fuel_burn_reference).map_err(map_err)?;

    let mut text = kv_text(&[
        ("cruise_power_W", format!("{power:.6e}")),
        ("solar_lcoe_USD_per_MWh", format!("{:.3}", r.cost.solar_lcoe)),
        ("rf_uplift", format!("{:.6}", r.cost.uplift())),
        ("beamed_price_USD_per_MWh", format!("{price:.3}")),
        ("end_to_end", format!("{eta:.6}")),
        ("beamed_cost_USD_per_h", format!("{hourly:.3}")),
        ("fuel_cost_USD_per_h", format!("{:.3}", r.cost.fuel_cost_per_hour)),
        ("breakeven_end_to_end", format!("{breakeven:.6}")),
        ("fuel_price_USD_per_kg", format!("{fuel_kg:.6}")),
    ]);
    text.push('\n');
    let name_w = r.territories.iter().map(|t| t.name.len()).max().unwrap_or(0).max("territory".len());
    writeln!(
        text,
        "{:<name_w$}  {:>14}  {:>10}  {:>14}  {:>12}  {:>16}",
        "territory", "area_km2", "coverage", "farm_area_km2", "farms", "spacing_km"
    )
    .unwrap();
    let mut table = Vec::new();
    for t in &r.territories {
        let e = farm_network_estimate(t.area, t.coverage_fraction, t.farm_area).map_err(map_err)?;
        let spacing = e.mean_spacing_km.map_or("-".to_owned(), |s| format!("{s:.3}"));
        writeln!(
            text,
            "{:<name_w$}  {:>14.3}  {:>10.6}  {:>14.3}  {:>12.3}  {:>16}",
            t.name, t.area, t.coverage_fraction, t.farm_area, e.farm_count, spacing
        )
        .unwrap();
        table.push(json!({
            "name": t.name,
            "area_km2": t.area,
            "coverage_fraction": t.coverage_fraction,
            "farm_area_km2": t.farm_area,
            "farm_count": e.farm_count,
            "mean_spacing_km": e.mean_spacing_km,
        }));
    }
    let report = json!({
        "cruise_power_W": power,
        "solar_lcoe_USD_per_MWh": r.cost.solar_lcoe,
        "rf_uplift": r.cost.uplift(),
        "beamed_price_USD_per_MWh": price,
        "end_to_end": eta,
        "beamed_cost_USD_per_h": hourly,
        "fuel_cost_USD_per_h": r.cost.fuel_cost_per_hour,
        "breakeven_end_to_end": breakeven,
        "fuel_price_USD_per_kg": fuel_kg,
        "territories": table,
    });
    Ok(Outcome {
        artifacts: vec![
            Artifact {
                name: "econ.txt",
                bytes: text.into_bytes(),
            },
            Artifact {
                name: "econ.json",
                bytes: json_bytes(&report),
            },
        ],
        text: "econ.txt",
        json: "econ.json",
    })
}
