use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    Sine,
    Triangle,
}

impl std::fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReferenceKind::Sine => "sine",
            ReferenceKind::Triangle => "triangle",
        })
    }
}

/// Periodic position reference in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub kind: ReferenceKind,
    /// Hz.
    pub frequency: f64,
    /// mm; zero gives the resting reference.
    pub amplitude: f64,
    /// s.
    pub duration: f64,
}

impl Reference {
    pub fn sine(frequency: f64, amplitude: f64, duration: f64) -> Self {
        Self {
            kind: ReferenceKind::Sine,
            frequency,
            amplitude,
            duration,
        }
    }

    pub fn triangle(frequency: f64, amplitude: f64, duration: f64) -> Self {
        Self {
            kind: ReferenceKind::Triangle,
            frequency,
            amplitude,
            duration,
        }
    }

    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return Err(HarnessError::Usage(format!(
                "reference frequency must be positive, got {}",
                self.frequency
            )));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(HarnessError::Usage(format!(
                "reference amplitude must be non-negative, got {}",
                self.amplitude
            )));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(HarnessError::Usage(format!(
                "reference duration must be positive, got {}",
                self.duration
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("{} {} Hz", self.kind, self.frequency)
    }
}

/// Position, velocity and acceleration of the reference at `t`.
///
/// The triangle peaks a quarter period in; at a vertex the velocity is the
/// slope arriving at it and the acceleration is zero everywhere.
pub fn reference_at(r: &Reference, t: f64) -> Result<(f64, f64, f64), HarnessError> {
    r.validate()?;
    let slack = 1e-9 * r.duration.max(1.0);
    if !(t >= -slack && t <= r.duration + slack) {
        return Err(HarnessError::Usage(format!(
            "time {t} outside the reference span [0, {}]",
            r.duration
        )));
    }
    let (a, f) = (r.amplitude, r.frequency);
    Ok(match r.kind {
        ReferenceKind::Sine => {
            let w = TAU * f;
            let (sin, cos) = (w * t).sin_cos();
            (a * sin, w * a * cos, -w * w * a * sin)
        }
        ReferenceKind::Triangle => {
            let ph = (t * f).rem_euclid(1.0);
            let slope = 4.0 * a * f;
            let pos = if ph <= 0.25 {
                4.0 * a * ph
            } else if ph <= 0.75 {
                2.0 * a - 4.0 * a * ph
            } else {
                4.0 * a * ph - 4.0 * a
            };
            let vel = if ph <= 0.25 || ph > 0.75 { slope } else { -slope };
            (pos, vel, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_quarter_period() {
        let r = Reference::sine(1.0, 1.0, 2.0);
        let (p, v, a) = reference_at(&r, 0.25).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(v.abs() < 1e-14);
        assert!((a + TAU * TAU).abs() < 1e-12);
    }

    #[test]
    fn sine_origin() {
        let r = Reference::sine(3.0, 0.5, 2.0);
        let (p, v, a) = reference_at(&r, 0.0).unwrap();
        assert_eq!(p, 0.0);
        assert_eq!(v, TAU * 3.0 * 0.5);
        assert_eq!(a, 0.0);
    }

    #[test]
    fn triangle_vertex() {
        let r = Reference::triangle(1.0, 1.0, 4.0);
        let (p, v, a) = reference_at(&r, 0.25).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(v, 4.0);
        assert_eq!(a, 0.0);
        let (_, after, _) = reference_at(&r, 0.2501).unwrap();
        assert_eq!(after, -4.0);
        let (p, v, _) = reference_at(&r, 0.75).unwrap();
        assert_eq!(p, -1.0);
        assert_eq!(v, -4.0);
        let (_, v, _) = reference_at(&r, 0.7501).unwrap();
        assert_eq!(v, 4.0);
    }

    #[test]
    fn triangle_is_continuous() {
        let r = Reference::triangle(2.0, 0.7, 2.0);
        let mut prev = reference_at(&r, 0.0).unwrap().0;
        for k in 1..=2000 {
            let p = reference_at(&r, k as f64 * 1e-3).unwrap().0;
            assert!((p - prev).abs() <= 4.0 * 0.7 * 2.0 * 1e-3 + 1e-12);
            assert!(p.abs() <= 0.7 + 1e-12);
            prev = p;
        }
    }

    #[test]
    fn out_of_span() {
        let r = Reference::sine(1.0, 1.0, 1.0);
        assert!(reference_at(&r, -0.1).is_err());
        assert!(reference_at(&r, 1.5).is_err());
        assert!(reference_at(&r, f64::NAN).is_err());
        assert!(reference_at(&Reference::sine(0.0, 1.0, 1.0), 0.5).is_err());
    }
}
