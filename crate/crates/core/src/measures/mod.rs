//! Vector measures on a window of the line (cell-constant density plus atoms)
//! and atomic measures in the plane, with exact spherical and radial
//! operators, area functionals and the examples built on them.
//!
//! Outside the window a line measure is extended by zero. Ball masses use
//! the exact cumulative integral of the cell-constant density, so step
//! densities whose jumps sit on cell edges are represented exactly.

mod area;
mod bv;
mod examples;
mod plane;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, Tolerance};
use crate::weights::{RadialPanels, RadialWeight};

pub use area::{
    area_convergence_table, area_functional, area_vs_l1, AreaIntegrand, AreaL1Report, AreaL1Row, AreaRow,
    RECESSION_RAY,
};
pub use bv::{gauss_green_check, PiecewiseSmooth};
pub use examples::{
    atomic_divergence_demo, default_atomic_probes, dirac_spherical_scenario, linf_gap, radial_smooth_scenario,
    smooth_bump_density, AtomicProbe, LinfGap,
};
pub use plane::{PlaneAtom, PlaneMeasure};

/// Relative distance below which an atom counts as sitting on a sphere.
pub const SPHERE_HIT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct LineAtom {
    pub location: f64,
    pub weight: Vec<f64>,
}

/// Vector measure on `[a, b]`: cell-constant density on `cells` uniform cells plus atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct LineMeasure {
    a: f64,
    b: f64,
    cells: usize,
    components: usize,
    /// component-major, `density[c * cells + k]`
    density: Vec<f64>,
    atoms: Vec<LineAtom>,
    /// component-major cumulative integrals at the `cells + 1` edges
    cumulative: Vec<f64>,
}

impl LineMeasure {
    /// `density` is component-major with one value per cell.
    pub fn new(a: f64, b: f64, cells: usize, components: usize, density: Vec<f64>, atoms: Vec<LineAtom>) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidMeasure(format!("window [{a}, {b}] is empty or infinite")));
        }
        if cells == 0 || components == 0 {
            return Err(Error::InvalidMeasure("cells and components must be positive".into()));
        }
        if density.len() != cells * components {
            return Err(Error::InvalidMeasure(format!(
                "expected {} density values, got {}",
                cells * components,
                density.len()
            )));
        }
        if density.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite density".into()));
        }
        for (i, atom) in atoms.iter().enumerate() {
            if !(atom.location > a && atom.location < b) {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {} is not strictly inside [{a}, {b}]",
                    atom.location
                )));
            }
            if atom.weight.len() != components || atom.weight.iter().any(|w| !w.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom at {} has an invalid weight", atom.location)));
            }
            if atoms[..i].iter().any(|o| o.location == atom.location) {
                return Err(Error::InvalidMeasure(format!("two atoms at {}", atom.location)));
            }
        }
        let h = (b - a) / cells as f64;
        let mut cumulative = vec![0.0; (cells + 1) * components];
        for c in 0..components {
            let base = c * (cells + 1);
            for k in 0..cells {
                cumulative[base + k + 1] = cumulative[base + k] + h * density[c * cells + k];
            }
        }
        Ok(Self {
            a,
            b,
            cells,
            components,
            density,
            atoms,
            cumulative,
        })
    }

    pub fn zero(a: f64, b: f64, cells: usize, components: usize) -> Result<Self> {
        Self::new(a, b, cells, components, vec![0.0; cells * components], Vec::new())
    }

    /// Scalar unit atom at `location` with zero density.
    pub fn dirac(a: f64, b: f64, cells: usize, location: f64) -> Result<Self> {
        Self::new(
            a,
            b,
            cells,
            1,
            vec![0.0; cells],
            vec![LineAtom {
                location,
                weight: vec![1.0],
            }],
        )
    }

    /// Density sampled at cell midpoints.
    pub fn from_density_fn<F: FnMut(f64, &mut [f64])>(
        a: f64,
        b: f64,
        cells: usize,
        components: usize,
        mut f: F,
    ) -> Result<Self> {
        let h = (b - a) / cells.max(1) as f64;
        let mut density = vec![0.0; cells * components];
        let mut out = vec![0.0; components];
        for k in 0..cells {
            f(a + (k as f64 + 0.5) * h, &mut out);
            for c in 0..components {
                density[c * cells + k] = out[c];
            }
        }
        Self::new(a, b, cells, components, density, Vec::new())
    }

    pub fn with_atoms(self, atoms: Vec<LineAtom>) -> Result<Self> {
        let mut all = self.atoms.clone();
        all.extend(atoms);
        Self::new(self.a, self.b, self.cells, self.components, self.density, all)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn cell_width(&self) -> f64 {
        (self.b - self.a) / self.cells as f64
    }

    pub fn atoms(&self) -> &[LineAtom] {
        &self.atoms
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn density_in_cell(&self, k: usize) -> Vec<f64> {
        (0..self.components).map(|c| self.density[c * self.cells + k]).collect()
    }

    pub fn edge(&self, k: usize) -> f64 {
        if k == self.cells {
            self.b
        } else {
            self.a + k as f64 * self.cell_width()
        }
    }

    pub fn midpoint(&self, k: usize) -> f64 {
        self.a + (k as f64 + 0.5) * self.cell_width()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.cells == other.cells && self.components == other.components
    }

    /// `|mu|(window) = int |density| + sum |weights|` with the Euclidean fiber norm.
    pub fn total_variation(&self) -> f64 {
        let h = self.cell_width();
        let dens: f64 = (0..self.cells).map(|k| norm(&self.density_in_cell(k)) * h).sum();
        dens + self.atoms.iter().map(|a| norm(&a.weight)).sum::<f64>()
    }

    /// Smallest interval containing the support (density cells with a nonzero value and atoms).
    pub fn support(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..self.cells {
            if self.density_in_cell(k).iter().any(|&d| d != 0.0) {
                lo = lo.min(self.edge(k));
                hi = hi.max(self.edge(k + 1));
            }
        }
        for atom in &self.atoms {
            lo = lo.min(atom.location);
            hi = hi.max(atom.location);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Errors unless the support enlarged by `radius` stays inside the window.
    pub fn check_support_margin(&self, radius: f64) -> Result<()> {
        if let Some((lo, hi)) = self.support() {
            let slack = 1e-12 * (self.b - self.a);
            if lo - radius < self.a - slack || hi + radius > self.b + slack {
                let center = 0.5 * (lo + hi);
                return Err(Error::BallOutsideWindow {
                    center,
                    radius: 0.5 * (hi - lo) + radius,
                    a: self.a,
                    b: self.b,
                });
            }
        }
        Ok(())
    }

    /// `int_{-inf}^x density`, zero-extended outside the window.
    fn cumulative_at(&self, x: f64, c: usize) -> f64 {
        let base = c * (self.cells + 1);
        if x <= self.a {
            return 0.0;
        }
        if x >= self.b {
            return self.cumulative[base + self.cells];
        }
        let h = self.cell_width();
        let k = (((x - self.a) / h).floor() as usize).min(self.cells - 1);
        self.cumulative[base + k] + (x - self.edge(k)) * self.density[c * self.cells + k]
    }

    /// `mu(B_s(x))`, erroring when an atom sits on the sphere.
    pub fn ball_mass(&self, x: f64, s: f64) -> Result<Vec<f64>> {
        let tol = SPHERE_HIT_TOLERANCE * x.abs().max(s).max(1.0);
        for atom in &self.atoms {
            if ((atom.location - x).abs() - s).abs() <= tol {
                return Err(Error::AtomOnSphere {
                    location: vec![atom.location],
                    center: vec![x],
                    radius: s,
                });
            }
        }
        Ok(self.ball_mass_unchecked(x, s))
    }

    fn ball_mass_unchecked(&self, x: f64, s: f64) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.components)
            .map(|c| self.cumulative_at(x + s, c) - self.cumulative_at(x - s, c))
            .collect();
        for atom in &self.atoms {
            if (atom.location - x).abs() < s {
                for (o, w) in out.iter_mut().zip(&atom.weight) {
                    *o += w;
                }
            }
        }
        out
    }

    /// `A_s mu(x) = mu(B_s(x)) / (2 s)`; the ball must lie inside the window.
    pub fn spherical_of_measure(&self, s: f64, x: f64) -> Result<Vec<f64>> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {s}")));
        }
        let slack = 1e-12 * (self.b - self.a);
        if x - s < self.a - slack || x + s > self.b + slack {
            return Err(Error::BallOutsideWindow {
                center: x,
                radius: s,
                a: self.a,
                b: self.b,
            });
        }
        let mass = self.ball_mass(x, s)?;
        Ok(mass.into_iter().map(|m| m / (2.0 * s)).collect())
    }

    /// `A_s mu` at every probe; a probe with an atom on its sphere is moved right by one cell.
    pub fn spherical_profile(&self, s: f64, probes: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
        probes
            .iter()
            .map(|&x| match self.spherical_of_measure(s, x) {
                Err(Error::AtomOnSphere { .. }) => {
                    let moved = x + self.cell_width();
                    self.spherical_of_measure(s, moved).map(|v| (moved, v))
                }
                other => other.map(|v| (x, v)),
            })
            .collect()
    }

    /// Breakpoints of `x -> A_s mu(x)` inside the window; the field is affine between them.
    fn spherical_breakpoints(&self, s: f64) -> Vec<f64> {
        let mut pts = vec![self.a, self.b];
        for k in 0..=self.cells {
            let e = self.edge(k);
            pts.push(e - s);
            pts.push(e + s);
        }
        for atom in &self.atoms {
            pts.push(atom.location - s);
            pts.push(atom.location + s);
        }
        let mut pts: Vec<f64> = pts.into_iter().filter(|p| *p >= self.a && *p <= self.b).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (self.b - self.a));
        pts
    }

    /// `int_window g(A_s mu(x)) dx` with the zero extension outside the window.
    pub fn spherical_integral<G: Fn(&[f64]) -> f64>(&self, s: f64, g: G) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {s}")));
        }
        let pts = self.spherical_breakpoints(s);
        let tol = Tolerance {
            abs: 1e-15,
            rel: 1e-13,
            max_segments: 64,
        };
        let mut total = 0.0;
        let mut buf = vec![0.0; self.components];
        for w in pts.windows(2) {
            let est = integrate_adaptive(
                |x| {
                    for (c, o) in buf.iter_mut().enumerate() {
                        *o = self.cumulative_at(x + s, c) - self.cumulative_at(x - s, c);
                    }
                    for atom in &self.atoms {
                        if (atom.location - x).abs() < s {
                            for (o, wt) in buf.iter_mut().zip(&atom.weight) {
                                *o += wt;
                            }
                        }
                    }
                    for o in buf.iter_mut() {
                        *o /= 2.0 * s;
                    }
                    g(&buf)
                },
                w[0],
                w[1],
                tol,
            );
            total += est.value;
        }
        Ok(total)
    }

    /// `int_window |A_s mu|`.
    pub fn spherical_l1(&self, s: f64) -> Result<f64> {
        self.spherical_integral(s, norm)
    }

    /// `A_rho mu(x) = int_0^inf 2 rho_hat(r) mu(B_r(x)) / (2 r) dr` for a weight on the line.
    pub fn radial_of_measure(&self, w: &RadialWeight, x: f64) -> Result<Vec<f64>> {
        if w.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: w.dim(),
            });
        }
        let outer = w.truncation_radius(1e-13 * w.mass())?;
        let slack = 1e-12 * (self.b - self.a);
        if x - outer < self.a - slack || x + outer > self.b + slack {
            // zero extension is exact when the support keeps its distance from the edges
            self.check_support_margin(outer).map_err(|_| Error::BallOutsideWindow {
                center: x,
                radius: outer,
                a: self.a,
                b: self.b,
            })?;
        }
        let at_origin = w.eval(1e-9 * outer) > 0.0;
        if at_origin && self.atoms.iter().any(|a| (a.location - x).abs() <= SPHERE_HIT_TOLERANCE) {
            return Err(Error::Domain(format!(
                "atom at the evaluation point {x} against a weight charging the origin"
            )));
        }
        let mut edges = vec![0.0, outer];
        for k in 0..=self.cells {
            let d = (self.edge(k) - x).abs();
            if d > 0.0 && d < outer {
                edges.push(d);
            }
        }
        for atom in &self.atoms {
            let d = (atom.location - x).abs();
            if d > 0.0 && d < outer {
                edges.push(d);
            }
        }
        for k in 1..32 {
            edges.push(outer * k as f64 / 32.0);
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|p, q| (*p - *q).abs() <= 1e-15 * outer);
        let measure = w.superposition_measure(&RadialPanels { edges, order: 16 })?;
        let mut out = vec![0.0; self.components];
        for (&r, &wt) in measure.radii.iter().zip(&measure.weights) {
            if wt == 0.0 {
                continue;
            }
            let mass = self.ball_mass_unchecked(x, r);
            for (o, m) in out.iter_mut().zip(mass) {
                *o += wt * m / (2.0 * r);
            }
        }
        Ok(out)
    }

    /// `int_window |A_rho mu(x)| dx`, adaptive in `x` between the kinks of the field.
    pub fn radial_l1(&self, w: &RadialWeight) -> Result<f64> {
        let outer = w.truncation_radius(1e-13 * w.mass())?;
        let mut radii = vec![0.0, outer];
        radii.extend(w.profile().breakpoints());
        let mut pts = vec![self.a, self.b];
        let mut centers: Vec<f64> = (0..=self.cells).map(|k| self.edge(k)).collect();
        centers.extend(self.atoms.iter().map(|a| a.location));
        for c in &centers {
            for r in &radii {
                pts.push(c - r);
                pts.push(c + r);
            }
        }
        let mut pts: Vec<f64> = pts.into_iter().filter(|p| *p >= self.a && *p <= self.b).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|p, q| (*p - *q).abs() <= 1e-14 * (self.b - self.a));
        let tol = Tolerance {
            abs: 1e-13,
            rel: 1e-11,
            max_segments: 200,
        };
        let mut total = 0.0;
        let mut failure = None;
        for seg in pts.windows(2) {
            let est = integrate_adaptive(
                |x| match self.radial_of_measure(w, x) {
                    Ok(v) => norm(&v),
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                seg[0],
                seg[1],
                tol,
            );
            total += est.value;
        }
        match failure {
            Some(e) => Err(e),
            None => Ok(total),
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign_measure(cells: usize) -> LineMeasure {
        LineMeasure::from_density_fn(-1.0, 1.0, cells, 1, |x, o| o[0] = x.signum()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(LineMeasure::zero(1.0, 0.0, 4, 1).is_err());
        assert!(LineMeasure::dirac(-1.0, 1.0, 4, 1.0).is_err());
        let two = vec![
            LineAtom { location: 0.1, weight: vec![1.0] },
            LineAtom { location: 0.1, weight: vec![2.0] },
        ];
        assert!(LineMeasure::new(-1.0, 1.0, 2, 1, vec![0.0; 2], two).is_err());
    }

    #[test]
    fn spherical_values_of_an_atom() {
        let d = LineMeasure::dirac(-1.0, 1.0, 8, 0.0).unwrap();
        assert_eq!(d.spherical_of_measure(0.25, 0.1).unwrap(), vec![2.0]);
        assert_eq!(d.spherical_of_measure(0.25, 0.5).unwrap(), vec![0.0]);
        assert!(matches!(d.spherical_of_measure(0.25, 0.25), Err(Error::AtomOnSphere { .. })));
        assert!(matches!(d.spherical_of_measure(0.5, 0.6), Err(Error::BallOutsideWindow { .. })));
        let prof = d.spherical_profile(0.25, &[0.25]).unwrap();
        assert_eq!(prof[0].0, 0.5);
    }

    #[test]
    fn spherical_values_of_the_sign_density() {
        let m = sign_measure(400);
        for s in [0.05, 0.3] {
            for x in [-0.4, -0.01, 0.0, 0.02, 0.29] {
                let v = m.spherical_of_measure(s, x).unwrap()[0];
                assert!((v - (x / s).clamp(-1.0, 1.0)).abs() < 1e-13, "s={s} x={x}");
            }
        }
    }

    #[test]
    fn radial_values() {
        let eps = 0.05;
        let w = RadialWeight::annulus(1, eps).unwrap();
        let m = sign_measure(400);
        for t in [-eps, -0.5 * eps, 0.0, 0.3 * eps, 0.99 * eps] {
            let v = m.radial_of_measure(&w, t).unwrap()[0];
            assert!((v - t / eps * 2f64.ln()).abs() < 1e-12, "t={t}: {v}");
        }
        let d = LineMeasure::dirac(-1.0, 1.0, 8, 0.0).unwrap();
        let v = d.radial_of_measure(&w, 0.0).unwrap()[0];
        assert!((v - 2f64.ln() / (2.0 * eps)).abs() < 1e-10);
        let z = LineMeasure::zero(-1.0, 1.0, 8, 2).unwrap();
        assert_eq!(z.radial_of_measure(&w, 0.3).unwrap(), vec![0.0, 0.0]);
        let bump = RadialWeight::bump(1, 0.1).unwrap();
        assert!(d.radial_of_measure(&bump, 0.0).is_err());
    }

    #[test]
    fn total_variation_bounds() {
        let m = sign_measure(64)
            .with_atoms(vec![LineAtom { location: 0.33, weight: vec![-0.7] }])
            .unwrap();
        let tv = m.total_variation();
        assert!((tv - 2.7).abs() < 1e-12);
        for s in [0.02, 0.1, 0.4] {
            assert!(m.spherical_l1(s).unwrap() <= tv + 1e-10);
        }
        let w = RadialWeight::annulus(1, 0.1).unwrap();
        let inner = LineMeasure::from_density_fn(-1.0, 1.0, 16, 1, |x, o| o[0] = if x.abs() < 0.5 { x.signum() } else { 0.0 })
            .unwrap()
            .with_atoms(vec![LineAtom { location: 0.2, weight: vec![1.0] }])
            .unwrap();
        let lifted = inner.radial_l1(&w).unwrap();
        assert!(lifted <= w.mass() * inner.total_variation() + 1e-8, "{lifted}");
        assert!(lifted > 0.5);
    }
}
