//! Experiment configuration: JSON schema, defaults and validation.
//!
//! Schema (all fields optional except `name`):
//! `{name, grid_N, model, sector: {alpha, scale}, bump: {width}, etas, nu_list, output_dir, seed}`.
//!
//! Defaults: `grid_N = 2048`, bump width `pi/8`, `alpha = 1/k + 0.1` on the
//! plus side and `1/k - 0.1` on the minus side (`k` from the model, 3 when the
//! model does not fix one). Experiment-specific defaults are listed on
//! [`Experiment`].

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use crdisc_core::manifolds::Side;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::model::{ModelDoc, ModelKind, SideDoc, DEFAULT_EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Plus and minus sector models side by side; default model the k=3
    /// sector with collar `[1]`, etas `[0, 1e-3, 2e-3, 4e-3, 1e-2]`.
    Dichotomy,
    /// Regularity of the solved disc at `grid_N` and `2 grid_N`.
    CompositionRegularity,
    /// Convergence table over `nu_list` with `alpha' = alpha - 0.05`.
    ApproximationRate,
    /// Derivative law at bump widths `2w, w, w/2`; default model the coupled
    /// `d = 2` polynomial with collar `(1,1)/sqrt 2`, scale 0.2.
    Eq103,
    /// Gradient-to-Holder check on `scale (1-z)^alpha` and a log control.
    HardyLittlewood,
    /// Three-link transport chain on the coupled model with links
    /// `scale e^{i phi} (1 - tau)` (scale 0.15; `alpha` is not used).
    ChainPropagation,
    /// Rank of the swept manifold at `(0, 0, 1)`; default model the k=3 sector
    /// with collar `[1]`, frozen collar data `max(etas) chi`.
    SweepRank,
}

pub const EXPERIMENTS: [Experiment; 7] = [
    Experiment::Dichotomy,
    Experiment::CompositionRegularity,
    Experiment::ApproximationRate,
    Experiment::Eq103,
    Experiment::HardyLittlewood,
    Experiment::ChainPropagation,
    Experiment::SweepRank,
];

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Dichotomy => "dichotomy",
            Experiment::CompositionRegularity => "composition-regularity",
            Experiment::ApproximationRate => "approximation-rate",
            Experiment::Eq103 => "eq103",
            Experiment::HardyLittlewood => "hardy-littlewood",
            Experiment::ChainPropagation => "chain-propagation",
            Experiment::SweepRank => "sweep-rank",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        EXPERIMENTS.into_iter().find(|e| e.as_str() == name)
    }

    pub fn default_model(self) -> ModelDoc {
        match self {
            Experiment::Dichotomy | Experiment::SweepRank => ModelDoc::sector(3, DEFAULT_EPS, SideDoc::Plus).with_collar(vec![1.0]),
            Experiment::Eq103 => ModelDoc::coupled_collar(),
            Experiment::ChainPropagation => ModelDoc::coupled(),
            _ => ModelDoc::sector(3, DEFAULT_EPS, SideDoc::Plus),
        }
    }

    fn default_scale(self) -> f64 {
        match self {
            Experiment::Eq103 => 0.2,
            Experiment::ChainPropagation => 0.15,
            _ => 0.05,
        }
    }

    fn default_etas(self) -> Vec<f64> {
        match self {
            Experiment::Dichotomy => vec![0.0, 1e-3, 2e-3, 4e-3, 1e-2],
            _ => vec![0.0, 1e-3, 2e-3, 4e-3],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorConfig {
    pub alpha: f64,
    pub scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpConfig {
    pub width: f64,
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: Experiment,
    pub grid_N: usize,
    pub model: ModelDoc,
    pub sector: SectorConfig,
    pub bump: BumpConfig,
    pub etas: Vec<f64>,
    pub nu_list: Vec<f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

pub const DEFAULT_GRID_N: usize = 2048;
pub const MAX_GRID_N: usize = 1 << 16;
/// Largest sector scale accepted by the sector datum.
pub const MAX_SCALE: f64 = 0.2;
pub const DEFAULT_NU_LIST: [f64; 5] = [8.0, 16.0, 32.0, 64.0, 128.0];
/// `alpha - alpha'` in the approximation-rate experiment.
pub const ALPHA_PRIME_OFFSET: f64 = 0.05;

impl ExperimentConfig {
    /// The `k` used for default exponents: the model's vertex order, else 3.
    pub fn k(&self) -> u32 {
        self.model.vertex_order().unwrap_or(3)
    }

    pub fn alpha_prime(&self) -> f64 {
        self.sector.alpha - ALPHA_PRIME_OFFSET
    }
}

const FIELDS: [&str; 9] = ["name", "grid_N", "model", "sector", "bump", "etas", "nu_list", "output_dir", "seed"];

/// Validation failures collected from a whole document.
pub type Violations = Vec<String>;

/// Parses and validates a JSON configuration, applying defaults. Returns the
/// complete list of violations on failure.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig, Violations> {
    let value: Value = serde_json::from_str(raw).map_err(|e| vec![format!("config is not valid JSON: {e}")])?;
    validate_value(&value)
}

pub fn validate_value(value: &Value) -> Result<ExperimentConfig, Violations> {
    let Some(obj) = value.as_object() else {
        return Err(vec!["config must be a JSON object".into()]);
    };
    let mut errs = Violations::new();
    for key in obj.keys() {
        if !FIELDS.contains(&key.as_str()) {
            errs.push(format!("unknown field {key:?}"));
        }
    }

    let name = match obj.get("name") {
        None => {
            errs.push("name is required".into());
            None
        }
        Some(Value::String(s)) => {
            let e = Experiment::parse(s);
            if e.is_none() {
                errs.push(format!("unknown experiment {s:?}"));
            }
            e
        }
        Some(_) => {
            errs.push("name must be a string".into());
            None
        }
    };

    let grid_n = match obj.get("grid_N") {
        None => Some(DEFAULT_GRID_N),
        Some(v) => match v.as_u64() {
            Some(n) if !n.is_power_of_two() => {
                errs.push("grid_N must be a power of two".into());
                None
            }
            Some(n) if n < 256 || n > MAX_GRID_N as u64 => {
                errs.push(format!("grid_N must lie in [256, {MAX_GRID_N}]"));
                None
            }
            Some(n) => Some(n as usize),
            None => {
                errs.push("grid_N must be a positive integer".into());
                None
            }
        },
    };

    let model = match obj.get("model") {
        None => name.map(Experiment::default_model),
        Some(v) => match serde_json::from_value::<ModelDoc>(v.clone()) {
            Ok(doc) => match doc.build() {
                Ok(_) => Some(doc),
                Err(e) => {
                    errs.push(e.to_string());
                    None
                }
            },
            Err(e) => {
                errs.push(format!("model: {e}"));
                None
            }
        },
    };

    let sector = section(obj, "sector", &["alpha", "scale"], &mut errs);
    let alpha = number(&sector, "alpha", "sector.alpha", &mut errs);
    if let Some(a) = alpha {
        if !(a > 0.0 && a < 1.0) {
            errs.push("alpha in (0,1)".into());
        }
    }
    let scale = number(&sector, "scale", "sector.scale", &mut errs);
    if let Some(s) = scale {
        if !(s > 0.0 && s <= MAX_SCALE) {
            errs.push(format!("scale in (0,{MAX_SCALE}]"));
        }
    }

    let bump = section(obj, "bump", &["width"], &mut errs);
    let width = number(&bump, "width", "bump.width", &mut errs);
    if let Some(w) = width {
        if !(w > 0.0 && w < PI / 2.0) {
            errs.push("bump width in (0,pi/2)".into());
        }
    }

    let etas = list(obj, "etas", &mut errs);
    if let Some(e) = &etas {
        if e.first() != Some(&0.0) {
            errs.push("etas must start with 0".into());
        }
        if !e.windows(2).all(|p| p[1] > p[0]) || e.iter().any(|x| !x.is_finite()) {
            errs.push("etas must be finite and strictly increasing".into());
        }
    }
    let nu_list = list(obj, "nu_list", &mut errs);
    if let Some(nu) = &nu_list {
        if nu.is_empty() || nu.iter().any(|&x| !(x > 1.0 && x.is_finite())) {
            errs.push("nu_list entries must be finite and exceed 1".into());
        }
        if !nu.windows(2).all(|p| p[1] > p[0]) {
            errs.push("nu_list must be strictly increasing".into());
        }
    }

    let output_dir = match obj.get("output_dir") {
        None => None,
        Some(Value::String(s)) if !s.is_empty() => Some(PathBuf::from(s)),
        Some(_) => {
            errs.push("output_dir must be a nonempty string".into());
            None
        }
    };
    let seed = match obj.get("seed") {
        None => Some(0),
        Some(v) => {
            let s = v.as_u64();
            if s.is_none() {
                errs.push("seed must be a nonnegative integer".into());
            }
            s
        }
    };

    if !errs.is_empty() {
        return Err(errs);
    }
    let (name, model) = (name.unwrap(), model.unwrap());
    let k = model.vertex_order().unwrap_or(3) as f64;
    let side = if model.kind == ModelKind::Sector { model.side() } else { Side::Plus };
    let alpha = alpha.unwrap_or(match side {
        Side::Plus => 1.0 / k + 0.1,
        Side::Minus => 1.0 / k - 0.1,
    });
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(vec!["alpha in (0,1)".into()]);
    }
    Ok(ExperimentConfig {
        name,
        grid_N: grid_n.unwrap(),
        model,
        sector: SectorConfig { alpha, scale: scale.unwrap_or(name.default_scale()) },
        bump: BumpConfig { width: width.unwrap_or(PI / 8.0) },
        etas: etas.unwrap_or_else(|| name.default_etas()),
        nu_list: nu_list.unwrap_or_else(|| DEFAULT_NU_LIST.to_vec()),
        output_dir: output_dir.unwrap_or_else(|| PathBuf::from("out").join(name.as_str())),
        seed: seed.unwrap(),
    })
}

fn section(obj: &Map<String, Value>, key: &str, fields: &[&str], errs: &mut Violations) -> Map<String, Value> {
    match obj.get(key) {
        None => Map::new(),
        Some(Value::Object(m)) => {
            for k in m.keys() {
                if !fields.contains(&k.as_str()) {
                    errs.push(format!("unknown field {key}.{k}"));
                }
            }
            m.clone()
        }
        Some(_) => {
            errs.push(format!("{key} must be an object"));
            Map::new()
        }
    }
}

fn number(obj: &Map<String, Value>, key: &str, label: &str, errs: &mut Violations) -> Option<f64> {
    let v = obj.get(key)?;
    let x = v.as_f64();
    if x.is_none() {
        errs.push(format!("{label} must be a number"));
    }
    x
}

fn list(obj: &Map<String, Value>, key: &str, errs: &mut Violations) -> Option<Vec<f64>> {
    let v = obj.get(key)?;
    let xs: Option<Vec<f64>> = v.as_array().and_then(|a| a.iter().map(Value::as_f64).collect());
    if xs.is_none() {
        errs.push(format!("{key} must be a list of numbers"));
    }
    xs
}

/// Command-line overrides for `run --name`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub k: Option<u32>,
    pub eps: Option<f64>,
    pub alpha: Option<f64>,
    pub grid_n: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Builds the configuration for `run --name`, going through the same
/// validation as a config file. `k` and `eps` edit the default model, which
/// must then be a sector model.
pub fn config_from_flags(name: &str, o: &Overrides) -> Result<ExperimentConfig, Violations> {
    let mut obj = Map::new();
    obj.insert("name".into(), Value::from(name));
    if o.k.is_some() || o.eps.is_some() {
        let Some(exp) = Experiment::parse(name) else {
            return Err(vec![format!("unknown experiment {name:?}")]);
        };
        let mut model = exp.default_model();
        if model.kind != ModelKind::Sector {
            return Err(vec![format!("--k and --eps need a sector model; {exp} uses a {:?} model", model.kind)]);
        }
        model.k = o.k.or(model.k);
        model.eps = o.eps.or(model.eps);
        obj.insert("model".into(), serde_json::to_value(model).expect("model documents serialize"));
    }
    if let Some(a) = o.alpha {
        obj.insert("sector".into(), serde_json::json!({ "alpha": a }));
    }
    if let Some(n) = o.grid_n {
        obj.insert("grid_N".into(), Value::from(n));
    }
    if let Some(out) = &o.out {
        obj.insert("output_dir".into(), Value::from(out.to_string_lossy().into_owned()));
    }
    validate_value(&Value::Object(obj))
}
