use std::f64::consts::PI;

use quann_core::GateParams;

/// Reads an angle in radians: a decimal, `pi`, or a decimal followed by `pi`
/// (`0.5pi`, `-1.5pi`, `2*pi`).
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let lower = t.to_ascii_lowercase();
    let value = match lower.strip_suffix("pi") {
        Some(coeff) => {
            let coeff = coeff.trim().trim_end_matches('*').trim();
            let k = match coeff {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| format!("invalid angle {t:?}"))?,
            };
            k * PI
        }
        None => lower.parse::<f64>().map_err(|_| format!("invalid angle {t:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("angle {t:?} is not finite"))
    }
}

/// Reads `φ0,φ1,φ2,φ3`.
pub fn parse_phi(text: &str) -> Result<GateParams, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected four comma-separated angles, got {text:?}"));
    }
    let mut angles = [0.0; 4];
    for (slot, part) in angles.iter_mut().zip(parts) {
        *slot = parse_angle(part)?;
    }
    GateParams::from_array(angles).map_err(|e| e.to_string())
}
