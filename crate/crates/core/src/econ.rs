//! Steady-state cost model: beamed-energy price, hourly cost of flying on
//! beamed power, the efficiency at which that matches fuel, and how many
//! farms a territory supports.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    /// $/MWh.
    pub solar_lcoe: f64,
    /// Fractional price increase from the RF layer. `None` derives it from
    /// the per-area costs.
    pub rf_uplift: Option<f64>,
    /// $/m².
    pub panel_cost: f64,
    /// $/m².
    pub rf_added_cost: f64,
    /// $/h.
    pub fuel_cost_per_hour: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            solar_lcoe: 24.0,
            rf_uplift: None,
            panel_cost: 200.0,
            rf_added_cost: 100.0,
            fuel_cost_per_hour: 1992.0,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("solar_lcoe", self.solar_lcoe),
            ("panel_cost", self.panel_cost),
            ("rf_added_cost", self.rf_added_cost),
            ("fuel_cost_per_hour", self.fuel_cost_per_hour),
            ("rf_uplift", self.rf_uplift.unwrap_or(0.0)),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("cost {name} must be non-negative, got {v}")));
            }
        }
        if self.rf_uplift.is_none() && self.panel_cost == 0.0 {
            return Err(Error::invalid("cannot derive rf uplift from a zero panel cost"));
        }
        Ok(())
    }

    pub fn uplift(&self) -> f64 {
        self.rf_uplift.unwrap_or(self.rf_added_cost / self.panel_cost)
    }
}

/// `lcoe · (1 + uplift)`, $/MWh.
pub fn beamed_cost(model: &CostModel) -> f64 {
    model.solar_lcoe * (1.0 + model.uplift())
}

/// Hourly cost of buying `cruise_power / end_to_end` at the farm, $/h.
pub fn beamed_cost_per_hour(cruise_power: f64, end_to_end: f64, price: f64) -> Result<f64> {
    if !(end_to_end > 0.0 && end_to_end <= 1.0) {
        return Err(Error::invalid(format!("end-to-end efficiency must lie in (0, 1], got {end_to_end}")));
    }
    Ok(cruise_power / end_to_end / 1e6 * price)
}

/// End-to-end efficiency at which beamed energy costs the same per hour as
/// fuel.
pub fn breakeven_efficiency(cruise_power: f64, price: f64, fuel_cost_per_hour: f64) -> Result<f64> {
    if !(fuel_cost_per_hour > 0.0) {
        return Err(Error::invalid(format!(
            "fuel cost per hour must be positive, got {fuel_cost_per_hour}"
        )));
    }
    Ok(cruise_power / 1e6 * price / fuel_cost_per_hour)
}

/// Fuel price implied by an hourly fuel bill and burn rate, $/kg.
pub fn fuel_price_per_kg(fuel_cost_per_hour: f64, burn_kg_per_hour: f64) -> Result<f64> {
    if !(burn_kg_per_hour > 0.0) {
        return Err(Error::invalid("burn rate must be positive"));
    }
    Ok(fuel_cost_per_hour / burn_kg_per_hour)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarmEstimate {
    pub farm_count: f64,
    /// km between farms on an equivalent square lattice; `None` with no farms.
    pub mean_spacing_km: Option<f64>,
}

/// Farms needed to cover `coverage_fraction` of a territory with farms of
/// `farm_area` each, and their mean spacing.
pub fn farm_network_estimate(territory_area_km2: f64, coverage_fraction: f64, farm_area_km2: f64) -> Result<FarmEstimate> {
    if !(territory_area_km2 > 0.0 && farm_area_km2 > 0.0) {
        return Err(Error::invalid("territory and farm areas must be positive"));
    }
    if !(0.0..=1.0).contains(&coverage_fraction) {
        return Err(Error::invalid(format!("coverage fraction must lie in [0, 1], got {coverage_fraction}")));
    }
    let farm_count = territory_area_km2 * coverage_fraction / farm_area_km2;
    let mean_spacing_km = (farm_count > 0.0).then(|| (territory_area_km2 / farm_count).sqrt());
    Ok(FarmEstimate {
        farm_count,
        mean_spacing_km,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beamed_price() {
        let m = CostModel {
            rf_uplift: Some(0.5),
            ..CostModel::default()
        };
        assert_eq!(beamed_cost(&m), 36.0);
        let none = CostModel {
            rf_uplift: Some(0.0),
            ..CostModel::default()
        };
        assert_eq!(beamed_cost(&none), 24.0);
        assert_eq!(CostModel::default().uplift(), 0.5);
        assert_eq!(beamed_cost(&CostModel::default()), 36.0);
    }

    #[test]
    fn hourly_cost() {
        let c = beamed_cost_per_hour(11.354e6, 0.20, 36.0).unwrap();
        assert!((c - 2043.72).abs() < 1e-6, "{c}");
        let floor = beamed_cost_per_hour(11.354e6, 1.0, 36.0).unwrap();
        assert!((floor - 408.744).abs() < 1e-9);
        let double = beamed_cost_per_hour(11.354e6, 0.20, 72.0).unwrap();
        assert!((double - 2.0 * c).abs() < 1e-9);
        assert!(beamed_cost_per_hour(1.0, 0.0, 36.0).is_err());
    }

    #[test]
    fn breakeven() {
        let b = breakeven_efficiency(11.354e6, 36.0, 1992.0).unwrap();
        assert!((b - 0.2052).abs() < 1e-4, "{b}");
        assert_eq!(breakeven_efficiency(11.354e6, 0.0, 1992.0).unwrap(), 0.0);
        let half = breakeven_efficiency(11.354e6, 36.0, 3984.0).unwrap();
        assert!((half - 0.5 * b).abs() < 1e-15);
        assert!(breakeven_efficiency(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn fuel_price() {
        let p = fuel_price_per_kg(1992.0, 2400.0).unwrap();
        assert!((p - 0.83).abs() < 1e-12);
    }

    #[test]
    fn farm_counts() {
        let e = farm_network_estimate(8.08e6, 0.001, 1.0).unwrap();
        assert!((e.farm_count - 8080.0).abs() < 1e-6);
        assert!((e.mean_spacing_km.unwrap() - 31.6228).abs() < 1e-3);
        let z = farm_network_estimate(8.08e6, 0.0, 1.0).unwrap();
        assert_eq!(z.farm_count, 0.0);
        assert_eq!(z.mean_spacing_km, None);
        let small = farm_network_estimate(1e6, 0.001, 1.0).unwrap();
        assert!((small.farm_count - 1000.0).abs() < 1e-9);
        assert!((small.mean_spacing_km.unwrap() - e.mean_spacing_km.unwrap()).abs() < 1e-9);
    }
}
