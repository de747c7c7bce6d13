use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::RfSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingLobeCheck {
    /// `min over m ≠ 0 of |sin θ_scan − m·λ/d| − 1`. Positive means every
    /// grating lobe sits outside visible space.
    pub margin: f64,
    pub lobe_free: bool,
}

/// Grating-lobe margin for a uniform element `spacing` steered up to
/// `max_scan_deg` from the array normal.
pub fn grating_lobe_margin(spacing: f64, rf: &RfSpec, max_scan_deg: f64) -> Result<GratingLobeCheck> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::invalid(format!("spacing must be positive, got {spacing}")));
    }
    if !(0.0..=90.0).contains(&max_scan_deg) {
        return Err(Error::invalid(format!("scan angle must lie in [0, 90] degrees, got {max_scan_deg}")));
    }
    let s = max_scan_deg.to_radians().sin();
    let step = rf.wavelength() / spacing;
    // Lobes with |m·λ/d| > 2 can never be within one of sin θ_scan.
    let m_max = (2.0 / step).ceil() as i64 + 1;
    let margin = (1..=m_max)
        .flat_map(|m| [m, -m])
        .map(|m| (s - m as f64 * step).abs() - 1.0)
        .fold(f64::INFINITY, f64::min);
    Ok(GratingLobeCheck {
        margin,
        lobe_free: margin > 0.0,
    })
}

/// Normalised power pattern `|AF(θ)|²/n²` of an `n`-element line array
/// steered to `scan_deg`, evaluated at `angles_deg` (both from broadside).
pub fn line_array_factor(n: usize, spacing: f64, rf: &RfSpec, scan_deg: f64, angles_deg: &[f64]) -> Vec<f64> {
    let k = rf.wavenumber();
    let s0 = scan_deg.to_radians().sin();
    let norm = (n * n) as f64;
    angles_deg
        .iter()
        .map(|a| {
            let psi = k * spacing * (a.to_radians().sin() - s0);
            let af: Complex64 = (0..n).map(|i| Complex64::from_polar(1.0, i as f64 * psi)).sum();
            af.norm_sqr() / norm
        })
        .collect()
}

/// Local maxima of a sampled pattern at or above `threshold`, as
/// `(angle, value)` pairs. Plateaus report their first sample.
pub fn pattern_peaks(angles_deg: &[f64], values: &[f64], threshold: f64) -> Vec<(f64, f64)> {
    let n = values.len().min(angles_deg.len());
    (0..n)
        .filter(|&i| {
            let v = values[i];
            let left = if i == 0 { f64::NEG_INFINITY } else { values[i - 1] };
            let right = if i + 1 == n { f64::NEG_INFINITY } else { values[i + 1] };
            v >= threshold && v > left && v >= right
        })
        .map(|i| (angles_deg[i], values[i]))
        .collect()
}
