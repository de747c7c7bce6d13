use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::{ArrayLayout, BeamCommand, RfSpec, Vec3};

/// Phases that bring every active element's spherical wave to `target` in
/// phase: `φ_i = −k·|target − p_i| mod 2π`, one per active element.
pub fn solve_focus_phases(layout: &ArrayLayout, rf: &RfSpec, target: Vec3) -> Result<Vec<f64>> {
    let k = rf.wavenumber();
    layout
        .active_positions()
        .map(|p| {
            let r = target.distance(p);
            if r <= 0.0 {
                return Err(Error::DegenerateGeometry(format!(
                    "focus target ({}, {}, {}) coincides with an element",
                    target.x, target.y, target.z
                )));
            }
            Ok(wrap_phase(-k * r))
        })
        .collect()
}

/// Focused beam command radiating `total_power` watts toward `target`.
pub fn focus_command(layout: &ArrayLayout, rf: &RfSpec, target: Vec3, total_power: f64) -> Result<BeamCommand> {
    let phases = solve_focus_phases(layout, rf, target)?;
    BeamCommand::new(target, total_power, phases)
}

/// Rounds phases to the nearest of `2^bits` equally spaced states.
pub fn quantize_phases(phases: &mut [f64], bits: u32) -> Result<()> {
    if bits == 0 || bits > 24 {
        return Err(Error::invalid(format!("phase quantization needs 1..=24 bits, got {bits}")));
    }
    let step = TAU / f64::from(1u32 << bits);
    for p in phases.iter_mut() {
        *p = wrap_phase((*p / step).round() * step);
    }
    Ok(())
}

pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_line_array;

    #[test]
    fn equidistant_elements_share_phase() {
        let layout = make_line_array(2, 0.05).unwrap();
        let rf = RfSpec::from_wavelength(0.1).unwrap();
        let ph = solve_focus_phases(&layout, &rf, Vec3::new(0.0, 0.0, 1000.0)).unwrap();
        assert_eq!(ph.len(), 2);
        assert!((ph[0] - ph[1]).abs() < 1e-9);
    }

    #[test]
    fn integer_wavelength_path_gives_zero_phase() {
        let layout = ArrayLayout::from_positions(vec![Vec3::ZERO], 0.05).unwrap();
        let rf = RfSpec::from_wavelength(0.1).unwrap();
        let ph = solve_focus_phases(&layout, &rf, Vec3::new(0.0, 0.0, 10_000.0)).unwrap();
        let d = ph[0].min(TAU - ph[0]);
        assert!(d < 1e-9, "{}", ph[0]);
        assert!((0.0..TAU).contains(&ph[0]));
    }

    #[test]
    fn target_on_element_is_degenerate() {
        let layout = make_line_array(3, 0.05).unwrap();
        let rf = RfSpec::from_wavelength(0.1).unwrap();
        let err = solve_focus_phases(&layout, &rf, Vec3::new(0.05, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry(_)));
    }

    #[test]
    fn quantization_snaps_to_grid() {
        let mut ph = vec![0.1, 1.0, 3.0, 6.2];
        quantize_phases(&mut ph, 2).unwrap();
        let step = TAU / 4.0;
        for p in &ph {
            let q = p / step;
            assert!((q - q.round()).abs() < 1e-12);
            assert!((0.0..TAU).contains(p));
        }
        assert_eq!(ph[3], 0.0);
        assert!(quantize_phases(&mut ph, 0).is_err());
    }
}
