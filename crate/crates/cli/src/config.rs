//! Run configuration: a single TOML tree with five blocks. Unknown keys are
//! rejected so a misspelled option can never fall back to a silent default.

use gapflow::error::Result as CoreResult;
use gapflow::fields::{CutoffSpec, RigidMotion, SlideRoll, SqueezeSpin, VelocityField};
use gapflow::geometry::{GapGeometry, GapState};
use gapflow::linalg::Vec3;
use gapflow::quadrature::QuadratureConfig;
use serde::Deserialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub schema: u32,
    pub seed: u64,
    pub geometry: GeometryBlock,
    pub field: FieldBlock,
    pub quadrature: QuadratureBlock,
    pub sweep: SweepBlock,
    pub output: OutputBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            seed: 42,
            geometry: GeometryBlock::default(),
            field: FieldBlock::default(),
            quadrature: QuadratureBlock::default(),
            sweep: SweepBlock::default(),
            output: OutputBlock::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryBlock {
    /// Cap amplitude k in k·r^{1+α}.
    pub k: f64,
    /// Base cap exponent used where the sweep does not supply one.
    pub alpha: f64,
    /// Contact-chart radius σ₀.
    pub sigma0: f64,
    /// Diameter bound H for the gap.
    pub big_h: f64,
    /// Hessian-scale constant K of the strong bound.
    pub big_k: f64,
    /// Optional inner-sphere radius R; enters only as H₀ = min{R, H*}.
    pub r: Option<f64>,
}

impl Default for GeometryBlock {
    fn default() -> Self {
        Self {
            k: 1.0,
            alpha: 1.0,
            sigma0: 1.6,
            big_h: 1.0,
            big_k: 1.0,
            r: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldBlock {
    /// "rigid", "example4" (squeeze/spin) or "example4b" (slide/roll).
    pub kind: String,
    /// Gap distance at which the field is built.
    pub h: f64,
    pub hdot: f64,
    pub omega3: f64,
    /// Slide speed (example4b).
    pub v1: f64,
    /// Roll rate (example4b).
    pub omega2: f64,
    /// Rigid-kind parameters.
    pub u_star: [f64; 3],
    pub omega: [f64; 3],
    pub x_star: [f64; 3],
    pub cutoff: CutoffBlock,
}

impl Default for FieldBlock {
    fn default() -> Self {
        Self {
            kind: "example4".to_string(),
            h: 0.8,
            hdot: 1.0,
            omega3: 1.0,
            v1: 1.0,
            omega2: 0.0,
            u_star: [0.0, 0.0, 1.0],
            omega: [0.0, 0.0, 1.0],
            x_star: [0.0, 0.0, 0.0],
            cutoff: CutoffBlock::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CutoffBlock {
    /// Smoothstep order; 4 gives C³ matching.
    pub q: usize,
    /// Radial cutoff scale.
    pub rho: f64,
    /// Vertical cutoff scale.
    pub big_h: f64,
}

impl Default for CutoffBlock {
    fn default() -> Self {
        Self {
            q: 4,
            rho: 2.0,
            big_h: 2.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureBlock {
    pub radial_order: usize,
    pub angular_order: usize,
    pub vertical_order: usize,
    pub radial_cells: usize,
    pub vertical_cells: usize,
    pub refine_tol: f64,
    pub defect_budget: f64,
}

impl Default for QuadratureBlock {
    fn default() -> Self {
        let d = QuadratureConfig::<f64>::default();
        Self {
            radial_order: d.radial_order,
            angular_order: d.angular_order,
            vertical_order: d.vertical_order,
            radial_cells: d.radial_cells,
            vertical_cells: d.vertical_cells,
            refine_tol: d.refine_tol,
            defect_budget: d.defect_budget,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    /// Cap exponents swept by the field studies.
    pub alphas: Vec<f64>,
    /// Integrability exponents for the component bounds.
    pub ps: Vec<f64>,
    /// One [h_min, h_max] window per alpha; the asymptotic regime moves to
    /// smaller gaps as the cap flattens.
    pub h_windows: Vec<[f64; 2]>,
    /// Log-spaced gap samples per window.
    pub points: usize,
    /// Randomized cases per identity family.
    pub cases: usize,
    /// Pivot-scale rule: "weak" or "strong".
    pub sigma_rule: String,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            alphas: vec![1.0, 0.5],
            ps: vec![2.0],
            h_windows: vec![[1e-3, 1e-1], [1e-4, 1e-2]],
            points: 8,
            cases: 50,
            sigma_rule: "weak".to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: String,
    /// Subset of {"csv", "json"}.
    pub formats: Vec<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: "out".to_string(),
            formats: vec!["csv".to_string(), "json".to_string()],
        }
    }
}

impl RunConfig {
    /// Loads the file (when given), applies `--set key=value` overrides on
    /// the raw tree, then deserializes with unknown-key rejection.
    pub fn load(path: Option<&std::path::Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut tree: toml::Value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                text.parse()
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Value::Table(toml::map::Map::new()),
        };
        for kv in overrides {
            apply_override(&mut tree, kv)?;
        }
        let cfg: RunConfig = tree
            .try_into()
            .map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema {} not supported (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        match self.field.kind.as_str() {
            "rigid" | "example4" | "example4b" => {}
            other => {
                return Err(CliError::Config(format!(
                    "field.kind '{other}' (expected rigid, example4 or example4b)"
                )))
            }
        }
        match self.sweep.sigma_rule.as_str() {
            "weak" | "strong" => {}
            other => {
                return Err(CliError::Config(format!(
                    "sweep.sigma_rule '{other}' (expected weak or strong)"
                )))
            }
        }
        if self.sweep.alphas.is_empty() || self.sweep.ps.is_empty() {
            return Err(CliError::Config(
                "sweep.alphas and sweep.ps must be non-empty".into(),
            ));
        }
        if self.sweep.h_windows.len() != self.sweep.alphas.len() {
            return Err(CliError::Config(format!(
                "sweep.h_windows has {} entries for {} alphas",
                self.sweep.h_windows.len(),
                self.sweep.alphas.len()
            )));
        }
        if self.sweep.points < 4 {
            return Err(CliError::Config("sweep.points must be at least 4".into()));
        }
        for w in &self.sweep.h_windows {
            if !(w[0] > 0.0 && w[1] > w[0]) {
                return Err(CliError::Config(format!(
                    "sweep.h_windows entry [{}, {}] is not an increasing positive window",
                    w[0], w[1]
                )));
            }
        }
        if self.output.formats.is_empty() {
            return Err(CliError::Config("output.formats must be non-empty".into()));
        }
        for f in &self.output.formats {
            if f != "csv" && f != "json" {
                return Err(CliError::Config(format!(
                    "output format '{f}' (expected csv or json)"
                )));
            }
        }
        Ok(())
    }

    pub fn quad(&self) -> QuadratureConfig<f64> {
        QuadratureConfig {
            radial_order: self.quadrature.radial_order,
            angular_order: self.quadrature.angular_order,
            vertical_order: self.quadrature.vertical_order,
            radial_cells: self.quadrature.radial_cells,
            vertical_cells: self.quadrature.vertical_cells,
            refine_tol: self.quadrature.refine_tol,
            defect_budget: self.quadrature.defect_budget,
        }
    }

    pub fn gap_geometry(&self, alpha: f64) -> CoreResult<GapGeometry<f64>> {
        GapGeometry::power_law(self.geometry.k, alpha, self.geometry.sigma0)
    }

    pub fn gap_state(&self, h: f64) -> CoreResult<GapState<f64>> {
        GapState::new(h, self.geometry.big_h)
    }

    pub fn cutoff(&self) -> CoreResult<CutoffSpec<f64>> {
        CutoffSpec::new(self.field.cutoff.q, self.field.cutoff.rho, self.field.cutoff.big_h)
    }

    /// Builds the configured field at cap exponent `alpha` and gap `h`.
    pub fn field(&self, alpha: f64, h: f64) -> CoreResult<VelocityField<f64>> {
        let geom = self.gap_geometry(alpha)?;
        let state = self.gap_state(h)?;
        let cutoff = self.cutoff()?;
        Ok(match self.field.kind.as_str() {
            "rigid" => {
                let v = |a: [f64; 3]| Vec3::new(a[0], a[1], a[2]);
                VelocityField::rigid(RigidMotion::new(
                    v(self.field.u_star),
                    v(self.field.omega),
                    v(self.field.x_star),
                ))
            }
            "example4b" => VelocityField::slide_roll(SlideRoll::new(
                self.field.v1,
                self.field.omega2,
                geom,
                state,
                cutoff,
            )?),
            _ => VelocityField::squeeze_spin(SqueezeSpin::new(
                self.field.hdot,
                self.field.omega3,
                geom,
                state,
                cutoff,
            )?),
        })
    }

    /// Log-spaced gap samples for the window paired with `alphas[i]`.
    pub fn h_grid(&self, window_index: usize) -> Vec<f64> {
        let [lo, hi] = self.sweep.h_windows[window_index];
        let n = self.sweep.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                lo * (hi / lo).powf(t)
            })
            .collect()
    }
}

/// Applies one `key.path=value` override onto the raw TOML tree.
fn apply_override(tree: &mut toml::Value, kv: &str) -> Result<(), CliError> {
    let (path, raw) = kv
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set '{kv}' is not key=value")))?;
    let path = path.trim();
    if path.is_empty() {
        return Err(CliError::Config(format!("--set '{kv}' has an empty key")));
    }
    // parse the value as a TOML literal; fall back to a bare string
    let value = match format!("v = {raw}").parse::<toml::Value>() {
        Ok(toml::Value::Table(mut t)) => t.remove("v").unwrap(),
        _ => toml::Value::String(raw.trim().to_string()),
    };
    let mut node = tree;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = node.as_table_mut().ok_or_else(|| {
            CliError::Config(format!("--set '{kv}': '{part}' is not inside a table"))
        })?;
        if i + 1 == parts.len() {
            table.insert(part.to_string(), value);
            return Ok(());
        }
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::map::Map::new()));
    }
    unreachable!("override path exhausted without insertion")
}
