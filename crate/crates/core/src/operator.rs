//! Constant-coefficient first-order operators `A = sum_i A_i d_i` mapping
//! `V = R^{dim_v}`-valued fields to `W = R^{dim_w}`-valued fields.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quadrature::SphereRule;
use crate::special::unit_sphere_area;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderOperator {
    name: String,
    n: usize,
    dim_v: usize,
    dim_w: usize,
    coeffs: Vec<DMatrix<f64>>,
}

/// Names accepted by [`FirstOrderOperator::preset`].
pub const PRESETS: [&str; 5] = ["gradient", "divergence", "curl", "symmetric-gradient", "derivative"];

impl FirstOrderOperator {
    /// Builds an operator from `n` coefficient matrices of identical shape `dim_w x dim_v`.
    pub fn new(name: impl Into<String>, coeffs: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 {
            return Err(Error::InvalidOperator("need at least one coefficient matrix".into()));
        }
        let (dim_w, dim_v) = coeffs[0].shape();
        if dim_w == 0 || dim_v == 0 {
            return Err(Error::InvalidOperator("fiber dimensions must be positive".into()));
        }
        for (i, a) in coeffs.iter().enumerate() {
            if a.shape() != (dim_w, dim_v) {
                return Err(Error::InvalidOperator(format!(
                    "coefficient A_{} has shape {:?}, expected {:?}",
                    i + 1,
                    a.shape(),
                    (dim_w, dim_v)
                )));
            }
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidOperator(format!("coefficient A_{} is not finite", i + 1)));
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            dim_v,
            dim_w,
            coeffs,
        })
    }

    /// `grad u`: `dim_v = 1`, `dim_w = n`, `A_i = e_i`.
    pub fn gradient(n: usize) -> Self {
        let coeffs = (0..n)
            .map(|i| DMatrix::from_fn(n, 1, |r, _| if r == i { 1.0 } else { 0.0 }))
            .collect();
        Self::new("gradient", coeffs).expect("valid preset")
    }

    /// `div u`: `dim_v = n`, `dim_w = 1`, `A_i = e_i^T`.
    pub fn divergence(n: usize) -> Self {
        let coeffs = (0..n)
            .map(|i| DMatrix::from_fn(1, n, |_, c| if c == i { 1.0 } else { 0.0 }))
            .collect();
        Self::new("divergence", coeffs).expect("valid preset")
    }

    /// `curl u` in three dimensions; the symbol is `xi x v`.
    pub fn curl() -> Self {
        let mut coeffs = vec![DMatrix::zeros(3, 3); 3];
        // (curl u)_1 = d2 u3 - d3 u2, cyclically
        for i in 0..3 {
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            coeffs[j][(i, k)] = 1.0;
            coeffs[k][(i, j)] = -1.0;
        }
        Self::new("curl", coeffs).expect("valid preset")
    }

    /// `E u = (Du + Du^T) / 2`, stored as the full `n x n` matrix (row-major, `dim_w = n^2`).
    pub fn symmetric_gradient(n: usize) -> Self {
        let mut coeffs = vec![DMatrix::zeros(n * n, n); n];
        for (i, a) in coeffs.iter_mut().enumerate() {
            for j in 0..n {
                for k in 0..n {
                    // (Eu)_{jk} = (d_k u_j + d_j u_k) / 2
                    if k == i {
                        a[(j * n + k, j)] += 0.5;
                    }
                    if j == i {
                        a[(j * n + k, k)] += 0.5;
                    }
                }
            }
        }
        Self::new("symmetric-gradient", coeffs).expect("valid preset")
    }

    /// `d/dt` on scalar functions of one variable.
    pub fn derivative() -> Self {
        Self::new("derivative", vec![DMatrix::from_element(1, 1, 1.0)]).expect("valid preset")
    }

    /// Looks up a preset by name in dimension `n`.
    pub fn preset(name: &str, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOperator("dimension must be at least 1".into()));
        }
        match name {
            "gradient" | "grad" => Ok(Self::gradient(n)),
            "divergence" | "div" => Ok(Self::divergence(n)),
            "curl" if n == 3 => Ok(Self::curl()),
            "curl" => Err(Error::InvalidOperator(format!("curl needs n = 3, got {n}"))),
            "symmetric-gradient" | "symgrad" => Ok(Self::symmetric_gradient(n)),
            "derivative" if n == 1 => Ok(Self::derivative()),
            "derivative" => Err(Error::InvalidOperator(format!("derivative needs n = 1, got {n}"))),
            other => Err(Error::InvalidOperator(format!("unknown preset '{other}'"))),
        }
    }

    /// Parses the plain-text operator format:
    ///
    /// ```text
    /// # comment
    /// n = 2
    /// dim_v = 1
    /// dim_w = 2
    /// A1 = 1 0
    /// A2 = 0 1
    /// ```
    ///
    /// Each `A<i>` lists the `dim_w * dim_v` entries of `A_i` in row-major order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut dim_v = None;
        let mut dim_w = None;
        let mut name = String::from("custom");
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let int = |v: &str| {
                v.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            match key {
                "n" => n = Some(int(value)?),
                "dim_v" => dim_v = Some(int(value)?),
                "dim_w" => dim_w = Some(int(value)?),
                "name" => name = value.trim_matches('"').to_string(),
                k if k.starts_with('A') => {
                    let idx = int(&k[1..])?;
                    let entries = value
                        .split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|s| !s.is_empty())
                        .map(|s| {
                            s.parse::<f64>()
                                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    rows.push((idx, entries));
                }
                other => {
                    return Err(Error::Parse(format!("line {}: unknown key '{other}'", lineno + 1)))
                }
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing 'n'".into()))?;
        let dim_v = dim_v.ok_or_else(|| Error::Parse("missing 'dim_v'".into()))?;
        let dim_w = dim_w.ok_or_else(|| Error::Parse("missing 'dim_w'".into()))?;
        let mut coeffs: Vec<Option<DMatrix<f64>>> = vec![None; n];
        for (idx, entries) in rows {
            if idx == 0 || idx > n {
                return Err(Error::Parse(format!("coefficient index A{idx} outside 1..={n}")));
            }
            if entries.len() != dim_w * dim_v {
                return Err(Error::Parse(format!(
                    "A{idx} has {} entries, expected {}",
                    entries.len(),
                    dim_w * dim_v
                )));
            }
            coeffs[idx - 1] = Some(DMatrix::from_row_slice(dim_w, dim_v, &entries));
        }
        let coeffs = coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Parse(format!("missing A{}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, coeffs)
    }

    /// Serializes to the format read by [`FirstOrderOperator::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "name = {}\nn = {}\ndim_v = {}\ndim_w = {}\n",
            self.name, self.n, self.dim_v, self.dim_w
        );
        for (i, a) in self.coeffs.iter().enumerate() {
            let entries: Vec<String> = (0..self.dim_w)
                .flat_map(|r| (0..self.dim_v).map(move |c| (r, c)))
                .map(|(r, c)| format!("{}", a[(r, c)]))
                .collect();
            out.push_str(&format!("A{} = {}\n", i + 1, entries.join(" ")));
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_w(&self) -> usize {
        self.dim_w
    }

    pub fn coeffs(&self) -> &[DMatrix<f64>] {
        &self.coeffs
    }

    /// True when every coefficient matrix vanishes.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|a| a.iter().all(|&x| x == 0.0))
    }

    fn check_len(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: xi.len(),
            });
        }
        Ok(())
    }

    /// Principal symbol `A(xi) = sum_i xi_i A_i`.
    pub fn symbol(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(xi)?;
        Ok(self.symbol_unchecked(xi))
    }

    pub(crate) fn symbol_unchecked(&self, xi: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim_w, self.dim_v);
        for (a, &x) in self.coeffs.iter().zip(xi) {
            if x != 0.0 {
                out += a * x;
            }
        }
        out
    }

    /// Zero-homogeneous profile `Omega(xi) = A(xi / |xi|)`.
    pub fn omega_profile(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(xi)?;
        let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let unit: Vec<f64> = xi.iter().map(|x| x / norm).collect();
        Ok(self.symbol_unchecked(&unit))
    }

    /// Norm of the sphere-quadrature approximation of `int_{S^{n-1}} A(omega) dS(omega)`.
    pub fn cancellation_residual(&self, quad_order: usize) -> Result<f64> {
        let rule = SphereRule::new(self.n, quad_order)?;
        let mut acc = DMatrix::zeros(self.dim_w, self.dim_v);
        for (omega, w) in rule.iter() {
            acc += self.symbol_unchecked(omega) * w;
        }
        Ok(acc.norm() * unit_sphere_area(self.n))
    }

    /// Formal `L^2` adjoint `A* = -sum_i A_i^T d_i`.
    pub fn adjoint(&self) -> Self {
        let name = match self.name.strip_suffix("*") {
            Some(base) => base.to_string(),
            None => format!("{}*", self.name),
        };
        Self {
            name,
            n: self.n,
            dim_v: self.dim_w,
            dim_w: self.dim_v,
            coeffs: self.coeffs.iter().map(|a| -a.transpose()).collect(),
        }
    }

    /// Numerical rank of `A(xi)`; `xi` lies in the wave set iff the rank is positive.
    pub fn wave_rank(&self, xi: &[f64]) -> Result<usize> {
        self.check_len(xi)?;
        Ok(numerical_rank(&self.symbol_unchecked(xi)))
    }
}

impl fmt::Display for FirstOrderOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (n={}, V=R^{}, W=R^{})",
            self.name, self.n, self.dim_v, self.dim_w
        )
    }
}

/// Rank with singular values below `RANK_TOLERANCE * sigma_max` treated as zero.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.iter().all(|&x| x == 0.0) {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * max).count()
}
