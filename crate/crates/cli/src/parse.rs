//! Parsers for the compact command-line value syntaxes.

use std::path::Path;

use bifrac::bifrac::BifracAngles;
use bifrac::fock::{self, FockOperator, FockState};
use bifrac::quadrature::UniformGrid;

/// `MIN:MAX:COUNT`, both ends included.
pub fn axis(text: &str) -> Result<UniformGrid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [min, max, count] = parts[..] else {
        return Err(format!("range `{text}` is not MIN:MAX:COUNT"));
    };
    let min = number(min)?;
    let max = number(max)?;
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| format!("count `{count}` is not a positive integer"))?;
    if count < 2 {
        return Err(format!("range `{text}` needs at least 2 points"));
    }
    if max <= min {
        return Err(format!("range `{text}` is empty"));
    }
    UniformGrid::linspace(min, max, count).map_err(|e| e.to_string())
}

/// `START:STOP:STEP`, inclusive of STOP when it lies on the lattice.
pub fn sweep(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("sweep `{text}` is not START:STOP:STEP"));
    };
    let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
    if step <= 0.0 || stop < start {
        return Err(format!("sweep `{text}` needs STEP > 0 and STOP ≥ START"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(format!("sweep `{text}` has too many points"));
    }
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

fn number(text: &str) -> Result<f64, String> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

/// A malformed spec, or a failure in the numerical layer.
pub enum OpError {
    Usage(String),
    Numeric(bifrac::Error),
}

impl From<bifrac::Error> for OpError {
    fn from(e: bifrac::Error) -> Self {
        OpError::Numeric(e)
    }
}

/// Operator mini-language:
///
/// ```text
/// fock:n         |n⟩⟨n|
/// coherent:a,b   D(a,b)|0⟩⟨0|D†(a,b)
/// thermal:s      (1−s) Σ sⁿ |n⟩⟨n|
/// file:PATH      operator JSON {dim, rows}
/// ```
///
/// Also returns the probability lost to truncation: `1 − ‖ψ‖²` for a
/// coherent state, `s^N` for the thermal state, zero otherwise.
pub fn operator(spec: &str, dim: usize) -> Result<(FockOperator, f64), OpError> {
    let (tag, arg) = spec
        .split_once(':')
        .ok_or_else(|| OpError::Usage(format!("operator `{spec}` is not TAG:ARGS")))?;
    match tag {
        "fock" => {
            let n: usize = arg
                .trim()
                .parse()
                .map_err(|_| OpError::Usage(format!("`{arg}` is not a number-state index")))?;
            if n >= dim {
                return Err(OpError::Usage(format!("|{n}⟩ does not fit in --fock-dim {dim}")));
            }
            Ok((FockOperator::projector(&FockState::number(n, dim)?), 0.0))
        }
        "coherent" => {
            let (a, b) = arg
                .split_once(',')
                .ok_or_else(|| OpError::Usage(format!("coherent needs `a,b`, got `{arg}`")))?;
            let (a, b) = (number(a).map_err(OpError::Usage)?, number(b).map_err(OpError::Usage)?);
            let d = fock::displacement_exact(a, b, dim)?;
            let psi = FockState::checked_raw(d.matrix().column(0).to_owned())?;
            let lost = (1.0 - psi.norm().powi(2)).max(0.0);
            Ok((FockOperator::projector(&psi), lost))
        }
        "thermal" => {
            let s = number(arg).map_err(OpError::Usage)?;
            if !(0.0..1.0).contains(&s) {
                return Err(OpError::Usage(format!("thermal ratio {s} must lie in [0, 1)")));
            }
            Ok((fock::thermal_state(s, dim)?, s.powi(dim as i32)))
        }
        "file" => {
            let text = std::fs::read_to_string(Path::new(arg))
                .map_err(|e| OpError::Usage(format!("cannot read `{arg}`: {e}")))?;
            let op = FockOperator::from_json(&text).map_err(|e| OpError::Usage(format!("`{arg}`: {e}")))?;
            Ok((op, 0.0))
        }
        _ => Err(OpError::Usage(format!(
            "unknown operator `{tag}` (expected fock, coherent, thermal or file)"
        ))),
    }
}

pub fn angles(theta_alpha: f64, theta_beta: f64) -> bifrac::Result<BifracAngles> {
    BifracAngles::new(theta_alpha, theta_beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_syntax() {
        let g = axis("-3:3:61").unwrap();
        assert_eq!(g.len(), 61);
        assert_eq!(g.point(30), 0.0);
        assert!(axis("-3:3").is_err());
        assert!(axis("3:-3:5").is_err());
        assert!(axis("0:1:1").is_err());
    }

    #[test]
    fn sweep_syntax() {
        let t = sweep("0.05:1.5:0.05").unwrap();
        assert_eq!(t.len(), 30);
        assert!((t[29] - 1.5).abs() < 1e-12);
        assert_eq!(sweep("1:1:0.1").unwrap(), vec![1.0]);
        assert!(sweep("0:1:0").is_err());
    }

    #[test]
    fn operator_syntax() {
        let (v, _) = match operator("fock:0", 8) {
            Ok(v) => v,
            Err(_) => panic!("fock:0"),
        };
        assert_eq!(v.get(0, 0).re, 1.0);
        assert!(matches!(operator("fock:9", 8), Err(OpError::Usage(_))));
        assert!(matches!(operator("squeezed:1", 8), Err(OpError::Usage(_))));
        assert!(matches!(operator("thermal:1.5", 8), Err(OpError::Usage(_))));
        let (c, lost) = match operator("coherent:0.5,-0.5", 32) {
            Ok(c) => c,
            Err(_) => panic!("coherent"),
        };
        assert!((c.trace().re - 1.0).abs() < 1e-12 && lost < 1e-12);
        let lost = match operator("coherent:7,7", 32) {
            Ok((_, lost)) => lost,
            Err(_) => panic!("coherent far out"),
        };
        assert!(lost > 0.5);
    }
}
