//! Experiment configuration: TOML with one section per ingredient. Every
//! section is optional; missing keys fall back to the documented defaults.

use std::path::{Path, PathBuf};

use nonlocal_core::fields::{TorusField, TrigPolynomial, TrigTerm, DEFAULT_GRID};
use nonlocal_core::measures::{smooth_bump_density, AreaIntegrand, LineAtom, LineMeasure};
use nonlocal_core::operator::FirstOrderOperator;
use nonlocal_core::weights::{ConcentratingFamily, RadialWeight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub operator: OperatorSection,
    pub weight: WeightSection,
    pub family: FamilySection,
    pub field: FieldSection,
    pub sweep: SweepSection,
    pub kernel: KernelSection,
    pub measure: MeasureSection,
    pub area: AreaSection,
    pub gauss_green: GaussGreenSection,
    pub atomic: AtomicSection,
    pub bessel: BesselSection,
    pub bench: BenchSection,
    /// Directory that relative paths in the config are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorSection {
    pub preset: Option<String>,
    /// Plain-text operator file; overrides `preset`.
    pub file: Option<String>,
    pub n: usize,
}

impl Default for OperatorSection {
    fn default() -> Self {
        Self {
            preset: Some("derivative".into()),
            file: None,
            n: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct WeightSection {
    pub preset: String,
    pub param: f64,
    /// Defaults to the operator dimension.
    pub n: Option<usize>,
    pub normalize: bool,
}

impl Default for WeightSection {
    fn default() -> Self {
        Self {
            preset: "gaussian".into(),
            param: 0.3,
            n: None,
            normalize: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FamilySection {
    pub preset: String,
    /// Fractional order for the `fractional` family.
    pub param: f64,
}

impl Default for FamilySection {
    fn default() -> Self {
        Self {
            preset: "annulus".into(),
            param: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub mode: Vec<i64>,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FieldSection {
    pub grid: usize,
    /// Explicit trigonometric terms; when empty a random polynomial is drawn from `--seed`.
    pub terms: Vec<TermSpec>,
    pub random_terms: usize,
    pub bandwidth: i64,
}

impl Default for FieldSection {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            terms: Vec::new(),
            random_terms: 5,
            bandwidth: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub p: f64,
    pub eps_list: Vec<f64>,
    pub s_list: Vec<f64>,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_count: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            p: 2.0,
            eps_list: vec![0.1, 0.05, 0.025, 0.0125],
            s_list: vec![0.1, 0.05, 0.025],
            xi_min: 0.0,
            xi_max: 2.0,
            xi_count: 41,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    pub s: f64,
    pub budget: i64,
    pub mode: Vec<i64>,
    pub vector: Vec<f64>,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            s: 0.5,
            budget: 4,
            mode: vec![1],
            vector: vec![1.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub location: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct MeasureSection {
    pub window: [f64; 2],
    pub cells: usize,
    /// `zero`, `sign`, `smooth-bump` or `indicator` (1 on |x| < 1/2).
    pub density: String,
    pub atoms: Vec<AtomSpec>,
}

impl Default for MeasureSection {
    fn default() -> Self {
        Self {
            window: [-1.0, 1.0],
            cells: 2000,
            density: "zero".into(),
            atoms: vec![AtomSpec {
                location: 0.0,
                weight: 1.0,
            }],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AreaSection {
    /// `area`, `shifted-area` or `norm`.
    pub integrand: String,
    /// `table` (area_convergence_table on `[measure]`), `radial-smooth` or `dirac-spherical`.
    pub scenario: String,
    pub cells: usize,
}

impl Default for AreaSection {
    fn default() -> Self {
        Self {
            integrand: "area".into(),
            scenario: "table".into(),
            cells: 400,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GaussGreenSection {
    pub pairs: usize,
    /// `(location, height)` pairs.
    pub jumps: Vec<[f64; 2]>,
    /// Add a random smooth part drawn from `--seed`.
    pub smooth: bool,
    pub s_max: f64,
}

impl Default for GaussGreenSection {
    fn default() -> Self {
        Self {
            pairs: 100,
            jumps: vec![[0.0, 1.0]],
            smooth: false,
            s_max: 0.8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AtomicSection {
    pub s: f64,
    /// Defaults to `(+-h, 0)`, `(0, +-h)` for `h in {0.1, 0.01}`.
    pub probes: Vec<[f64; 2]>,
}

impl Default for AtomicSection {
    fn default() -> Self {
        Self {
            s: 1.0,
            probes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BesselSection {
    pub order: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub zeros: usize,
}

impl Default for BesselSection {
    fn default() -> Self {
        Self {
            order: 0.5,
            t_min: 0.0,
            t_max: 20.0,
            t_count: 201,
            zeros: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSection {
    pub s: f64,
    pub quad_order: usize,
    pub repeats: usize,
    /// Truncation radius of the direct radial path.
    pub delta: f64,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            s: 0.2,
            quad_order: 128,
            repeats: 3,
            delta: 1e-7,
        }
    }
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Canonical TOML of the effective configuration, echoed into every CSV.
    pub fn echo(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    pub fn operator(&self) -> Result<FirstOrderOperator, CliError> {
        match (&self.operator.file, &self.operator.preset) {
            (Some(file), _) => {
                let path = self.base_dir.join(file);
                let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path, source })?;
                FirstOrderOperator::parse(&text).map_err(|e| config_error(format!("operator file: {e}")))
            }
            (None, Some(name)) => FirstOrderOperator::preset(name, self.operator.n)
                .map_err(|e| config_error(format!("operator: {e}"))),
            (None, None) => Err(config_error("operator: give `preset` or `file`")),
        }
    }

    pub fn weight(&self, n: usize) -> Result<RadialWeight, CliError> {
        let w = &self.weight;
        let dim = w.n.unwrap_or(n);
        let weight = RadialWeight::preset(&w.preset, dim, w.param).map_err(|e| config_error(format!("weight: {e}")))?;
        if w.normalize {
            Ok(weight.normalize()?)
        } else {
            Ok(weight)
        }
    }

    pub fn family(&self, n: usize) -> Result<ConcentratingFamily, CliError> {
        ConcentratingFamily::preset(&self.family.preset, n, self.family.param)
            .map_err(|e| config_error(format!("family: {e}")))
    }

    /// The test field for `op`: explicit terms, or a random polynomial seeded by `seed`.
    pub fn field(&self, op: &FirstOrderOperator, seed: u64) -> Result<TorusField, CliError> {
        let f = &self.field;
        let poly = if f.terms.is_empty() {
            if f.random_terms == 0 {
                return Err(config_error("field: no terms and random_terms = 0"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            TrigPolynomial::random(&mut rng, op.dim(), op.dim_v(), f.bandwidth, f.random_terms)
                .map_err(|e| config_error(format!("field: {e}")))?
        } else {
            let terms = f
                .terms
                .iter()
                .map(|t| {
                    let zeros = vec![0.0; op.dim_v()];
                    TrigTerm {
                        mode: t.mode.clone(),
                        cos_amp: if t.cos.is_empty() { zeros.clone() } else { t.cos.clone() },
                        sin_amp: if t.sin.is_empty() { zeros } else { t.sin.clone() },
                    }
                })
                .collect();
            TrigPolynomial::new(op.dim(), op.dim_v(), terms).map_err(|e| config_error(format!("field: {e}")))?
        };
        poly.sample(f.grid).map_err(|e| config_error(format!("field: {e}")))
    }

    pub fn measure(&self) -> Result<LineMeasure, CliError> {
        let m = &self.measure;
        let [a, b] = m.window;
        let density: fn(f64) -> f64 = match m.density.as_str() {
            "zero" => |_| 0.0,
            "sign" => f64::signum,
            "smooth-bump" => smooth_bump_density,
            "indicator" => |x| if x.abs() < 0.5 { 1.0 } else { 0.0 },
            other => return Err(config_error(format!("measure: unknown density preset '{other}'"))),
        };
        let atoms = m
            .atoms
            .iter()
            .map(|a| LineAtom {
                location: a.location,
                weight: vec![a.weight],
            })
            .collect();
        LineMeasure::from_density_fn(a, b, m.cells, 1, |x, o| o[0] = density(x))
            .and_then(|mu| mu.with_atoms(atoms))
            .map_err(|e| config_error(format!("measure: {e}")))
    }

    pub fn integrand(&self) -> Result<AreaIntegrand, CliError> {
        AreaIntegrand::preset(&self.area.integrand).map_err(|e| config_error(format!("area: {e}")))
    }
}

/// Nonempty, finite, strictly decreasing and positive.
pub fn check_decreasing(name: &str, list: &[f64]) -> Result<(), CliError> {
    if list.is_empty() {
        return Err(config_error(format!("{name} is empty")));
    }
    if list.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(config_error(format!("{name} entries must be positive and finite")));
    }
    if list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(config_error(format!("{name} must be strictly decreasing")));
    }
    Ok(())
}

/// `count` equispaced points on `[lo, hi]`.
pub fn linspace(name: &str, lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if count == 0 || !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(config_error(format!("{name}: need finite lo <= hi and count >= 1")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect())
}
