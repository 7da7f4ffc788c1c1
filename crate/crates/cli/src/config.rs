//! JSON experiment configuration. Unknown keys are rejected so a typo never
//! silently falls back to a default.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use blpp_core::initcond::InitialCondition;
use evalexpr::{ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const EXPERIMENTS: &[&str] = &[
    "verify",
    "growth",
    "gue-oracle",
    "weight-diff",
    "modulus",
    "curvature",
    "reg-tails",
    "two-point",
    "regfluc",
    "limit-stability",
];

pub const DEFAULT_RESOLUTION: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum InitialSpec {
    /// `"flat"` or `"narrow-wedge"`.
    Named(String),
    /// Two-column text file, relative paths resolved against the config.
    Table {
        table: PathBuf,
        #[serde(default)]
        extend: Option<String>,
    },
    /// An expression in `x`; non-finite values mean "no reward".
    Expression { expression: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusConstants {
    pub c_minus: Option<f64>,
    pub c_plus: Option<f64>,
    pub c_prime: Option<f64>,
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    pub c: f64,
    pub big_c: f64,
}

/// Test hook: perturbs one DP cell of the named verify instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultHook {
    pub check: String,
    pub instance: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub master_seed: u64,
    pub n: OneOrMany<u32>,
    pub samples: usize,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    /// `R`: truncation windows are `[-(R+1), R+1]` unless stated otherwise.
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub initial: Option<OneOrMany<InitialSpec>>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub levels: Vec<f64>,
    #[serde(default)]
    pub points: Option<Vec<f64>>,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub cutoff: Option<f64>,
    #[serde(default)]
    pub continuity_correction: bool,
    #[serde(default)]
    pub modulus_constants: Option<ModulusConstants>,
    #[serde(default)]
    pub theorem_constants: Option<ConstantsSpec>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub plots: bool,
    #[serde(default)]
    pub inject_fault: Option<FaultHook>,
    /// Directory the config was read from; relative paths resolve here.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_in(text, Path::new(""))
    }

    /// Parses and validates, resolving relative paths against `base_dir`.
    pub fn from_json_in(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json_in(&text, &base)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return bad(format!("unknown experiment {:?}; known: {}", self.experiment, EXPERIMENTS.join(", ")));
        }
        let ns = self.ns();
        if ns.is_empty() || ns.contains(&0) {
            return bad("n must be a nonempty list of integers >= 1".into());
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return bad(format!("resolution must be positive, got {}", self.resolution));
        }
        if let Some(&e) = self.epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return bad(format!("epsilon values must lie in (0, 1), got {e}"));
        }
        if let Some(r) = self.window {
            if !(r >= 0.0 && r.is_finite()) {
                return bad(format!("window R must be nonnegative, got {r}"));
            }
        }
        if self.levels.iter().any(|l| !l.is_finite()) || !self.levels.windows(2).all(|w| w[0] <= w[1]) {
            return bad("levels must be finite and sorted ascending".into());
        }
        if let Some(c) = self.cutoff {
            if !(c > 0.0 && c < 1.0) {
                return bad(format!("cutoff must lie in (0, 1), got {c}"));
            }
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if let Some(c) = self.theorem_constants {
            if !(c.c > 0.0 && c.big_c > 0.0) {
                return bad("theorem constants must be positive".into());
            }
        }
        if let Some(specs) = &self.initial {
            for s in specs.to_vec() {
                build_initial(&s, &self.base_dir)?;
            }
        }
        Ok(())
    }

    pub fn ns(&self) -> Vec<u32> {
        self.n.to_vec()
    }

    pub fn initial_conditions(&self, default: &[&str]) -> Result<Vec<InitialCondition>> {
        let specs = match &self.initial {
            Some(s) => s.to_vec(),
            None => default.iter().map(|s| InitialSpec::Named(s.to_string())).collect(),
        };
        specs.iter().map(|s| build_initial(s, &self.base_dir)).collect()
    }

    /// Thread count: `BLPP_THREADS`, then the command line, then the config.
    pub fn effective_threads(&self, cli: Option<usize>) -> Result<usize> {
        if let Ok(v) = std::env::var("BLPP_THREADS") {
            return match v.trim().parse::<usize>() {
                Ok(t) if t >= 1 => Ok(t),
                _ => Err(CliError::Config(format!("BLPP_THREADS must be a positive integer, got {v:?}"))),
            };
        }
        Ok(cli.or(self.threads).unwrap_or(1))
    }
}

pub fn build_initial(spec: &InitialSpec, base: &Path) -> Result<InitialCondition> {
    match spec {
        InitialSpec::Named(name) => match name.as_str() {
            "flat" => Ok(InitialCondition::flat()),
            "narrow-wedge" => Ok(InitialCondition::narrow_wedge()),
            other => Err(CliError::Config(format!(
                "unknown initial condition {other:?}; use \"flat\", \"narrow-wedge\", a table or an expression"
            ))),
        },
        InitialSpec::Table { table, extend } => {
            let linear = match extend.as_deref() {
                None | Some("none") => false,
                Some("linear") => true,
                Some(o) => return Err(CliError::Config(format!("extend must be \"linear\" or \"none\", got {o:?}"))),
            };
            let path = if table.is_absolute() { table.clone() } else { base.join(table) };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("table {}: {e}", path.display())))?;
            let f = InitialCondition::parse_table(&text, linear)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Ok(f.with_label(format!("table:{}", table.display())))
        }
        InitialSpec::Expression { expression } => {
            let node = evalexpr::build_operator_tree::<DefaultNumericTypes>(expression)
                .map_err(|e| CliError::Config(format!("expression {expression:?}: {e}")))?;
            // fail at load time rather than inside a worker
            eval_expr(&node, 0.0).map_err(|e| CliError::Config(format!("expression {expression:?}: {e}")))?;
            let node = Arc::new(node);
            Ok(InitialCondition::expression(format!("expr:{expression}"), move |x| {
                eval_expr(&node, x).ok().filter(|v| v.is_finite())
            }))
        }
    }
}

fn eval_expr(node: &Node<DefaultNumericTypes>, x: f64) -> std::result::Result<f64, String> {
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    ctx.set_value("x".into(), Value::Float(x)).map_err(|e| e.to_string())?;
    match node.eval_with_context(&ctx).map_err(|e| e.to_string())? {
        Value::Float(v) => Ok(v),
        Value::Int(v) => Ok(v as f64),
        other => Err(format!("expression must be numeric, got {other:?}")),
    }
}
