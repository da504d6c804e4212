//! Quadrature rules shared by the special functions, weights and direct oracles.
//!
//! Three families live here: Gauss-Legendre panels, an adaptive 7/15-point
//! Gauss-Kronrod integrator with a global error queue, and averaging rules on
//! the unit sphere `S^{n-1}` for `n = 1, 2, 3`.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Value of an integral together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error: 0.0,
            converged: true,
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Self) -> Self {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            converged: self.converged && rhs.converged,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `order`-point rule by Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        let half = order.div_ceil(2);
        for i in 0..half {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Tolerances for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-14,
            rel: 1e-12,
            max_segments: 2000,
        }
    }
}

/// Adaptive Gauss-Kronrod quadrature on `[a, b]`, bisecting the segment with the
/// largest error until `error <= max(abs, rel * |value|)`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Estimate {
    if a == b {
        return Estimate::exact(0.0);
    }
    let (value, error) = kronrod15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > tol.abs.max(tol.rel * total.abs()) && heap.len() < tol.max_segments {
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod15(&mut f, worst.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of the running updates.
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Estimate {
        value,
        error,
        converged: error <= tol.abs.max(tol.rel * value.abs()),
    }
}

/// Averaging rule on the unit sphere `S^{n-1}`: weights are nonnegative and sum to one.
#[derive(Debug, Clone)]
pub struct SphereRule {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereRule {
    /// `n = 1`: the two points `{-1, +1}`; `n = 2`: `order` equispaced angles;
    /// `n = 3`: `order` Gauss-Legendre nodes in `cos(theta)` times `2 * order`
    /// equispaced azimuths.
    pub fn new(n: usize, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("sphere quadrature order must be positive".into()));
        }
        match n {
            1 => Ok(Self {
                dim: 1,
                points: vec![-1.0, 1.0],
                weights: vec![0.5, 0.5],
            }),
            2 => {
                let mut points = Vec::with_capacity(2 * order);
                for k in 0..order {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / order as f64;
                    points.push(t.cos());
                    points.push(t.sin());
                }
                Ok(Self {
                    dim: 2,
                    points,
                    weights: vec![1.0 / order as f64; order],
                })
            }
            3 => {
                let gl = GaussLegendre::new(order);
                let azimuths = 2 * order;
                let mut points = Vec::with_capacity(3 * order * azimuths);
                let mut weights = Vec::with_capacity(order * azimuths);
                for (&z, &wz) in gl.nodes().iter().zip(gl.weights()) {
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    for k in 0..azimuths {
                        let phi = 2.0 * std::f64::consts::PI * k as f64 / azimuths as f64;
                        points.extend_from_slice(&[rho * phi.cos(), rho * phi.sin(), z]);
                        weights.push(0.5 * wz / azimuths as f64);
                    }
                }
                Ok(Self {
                    dim: 3,
                    points,
                    weights,
                })
            }
            other => Err(Error::UnsupportedDimension(other)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(5);
        // degree 9 is the highest exact degree for 5 nodes
        let v = gl.integrate(|x| x.powi(8) + 3.0 * x.powi(3), -1.0, 1.0);
        assert!((v - 2.0 / 9.0).abs() < 1e-15);
        let w: f64 = gl.weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_high_order_is_accurate() {
        let gl = GaussLegendre::new(64);
        let v = gl.integrate(f64::exp, 0.0, 1.0);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let est = integrate_adaptive(|x| 1.0 / x.sqrt(), 0.0, 1.0, Tolerance::default());
        assert!((est.value - 2.0).abs() < 1e-9, "{est:?}");
    }

    #[test]
    fn adaptive_oscillatory() {
        let est = integrate_adaptive(|x| (40.0 * x).cos(), 0.0, 3.0, Tolerance::default());
        assert!((est.value - (120.0f64).sin() / 40.0).abs() < 1e-13);
        assert!(est.converged);
    }

    #[test]
    fn sphere_rules_average_constants_and_quadratics() {
        for n in 1..=3 {
            let rule = SphereRule::new(n, 16).unwrap();
            let total: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-14);
            // mean of x_1^2 over S^{n-1} is 1/n
            let m2: f64 = rule.iter().map(|(p, w)| w * p[0] * p[0]).sum();
            assert!((m2 - 1.0 / n as f64).abs() < 1e-14, "n={n}: {m2}");
        }
        assert!(SphereRule::new(4, 8).is_err());
    }
}
