use std::f64::consts::PI;

use super::SPHERE_HIT_TOLERANCE;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneAtom {
    pub location: [f64; 2],
    pub weight: f64,
}

/// Finite sum of scalar atoms in the plane, extended by zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneMeasure {
    atoms: Vec<PlaneAtom>,
}

impl PlaneMeasure {
    pub fn new(atoms: Vec<PlaneAtom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !a.weight.is_finite() || a.location.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite atom".into()));
            }
            if atoms[..i].iter().any(|o| o.location == a.location) {
                return Err(Error::InvalidMeasure(format!("two atoms at {:?}", a.location)));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[PlaneAtom] {
        &self.atoms
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).sum()
    }

    /// `mu(B_s(x)) / (pi s^2)`; an atom on the circle is an error.
    pub fn spherical_of_measure(&self, s: f64, x: [f64; 2]) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {s}")));
        }
        let tol = SPHERE_HIT_TOLERANCE * s.max(1.0);
        let mut mass = 0.0;
        for a in &self.atoms {
            let d = (a.location[0] - x[0]).hypot(a.location[1] - x[1]);
            if (d - s).abs() <= tol {
                return Err(Error::AtomOnSphere {
                    location: a.location.to_vec(),
                    center: x.to_vec(),
                    radius: s,
                });
            }
            if d < s {
                mass += a.weight;
            }
        }
        Ok(mass / (PI * s * s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_counting() {
        let m = PlaneMeasure::new(vec![
            PlaneAtom { location: [0.0, 1.0], weight: 1.0 },
            PlaneAtom { location: [1.0, 0.0], weight: -1.0 },
        ])
        .unwrap();
        assert!((m.spherical_of_measure(1.0, [0.01, 0.0]).unwrap() + 1.0 / PI).abs() < 1e-15);
        assert_eq!(m.spherical_of_measure(1.0, [-0.01, 0.0]).unwrap(), 0.0);
        assert_eq!(m.spherical_of_measure(1.0, [10.0, 10.0]).unwrap(), 0.0);
        assert!(m.spherical_of_measure(1.0, [0.0, 0.0]).is_err());
        assert_eq!(m.total_variation(), 2.0);
    }
}
