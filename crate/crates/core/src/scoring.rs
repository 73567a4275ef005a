//! Correlation degree, ontology similarity, domain correlation, diversity
//! and the objective interestingness function.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ServiceDescription;
use crate::recognition::RecognitionVector;

const WEIGHT_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_ETA: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
pub const DEFAULT_SIM_WEIGHTS: [f64; 4] = [0.25, 0.25, 0.25, 0.25];
pub const DEFAULT_INT_WEIGHTS: [f64; 3] = [0.3, 0.3, 0.4];
pub const DEFAULT_ZETA: f64 = 0.5;
pub const DEFAULT_XI: f64 = 0.7;
pub const DEFAULT_R0: f64 = 0.1;

/// Validated mining tunables. `lambda0` is always `-1 / ln(r0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MiningConfig {
    eta: [f64; 4],
    sim_weights: [f64; 4],
    int_weights: [f64; 3],
    zeta: f64,
    xi: f64,
    r0: f64,
    lambda0: f64,
    ignore_spatial: bool,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            eta: DEFAULT_ETA,
            sim_weights: DEFAULT_SIM_WEIGHTS,
            int_weights: DEFAULT_INT_WEIGHTS,
            zeta: DEFAULT_ZETA,
            xi: DEFAULT_XI,
            r0: DEFAULT_R0,
            lambda0: lambda_from_r0(DEFAULT_R0).expect("default r0 is in (0, 1)"),
            ignore_spatial: false,
        }
    }
}

impl MiningConfig {
    pub fn eta(&self) -> [f64; 4] {
        self.eta
    }
    pub fn sim_weights(&self) -> [f64; 4] {
        self.sim_weights
    }
    pub fn int_weights(&self) -> [f64; 3] {
        self.int_weights
    }
    pub fn zeta(&self) -> f64 {
        self.zeta
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }
    pub fn ignore_spatial(&self) -> bool {
        self.ignore_spatial
    }

    /// Returns a copy with the given overrides applied and re-validated.
    pub fn with(&self, overrides: &ConfigOverrides) -> Result<Self> {
        overrides.apply_to(self.clone())
    }

    pub fn with_zeta(&self, zeta: f64) -> Result<Self> {
        self.with(&ConfigOverrides { zeta: Some(zeta), ..Default::default() })
    }

    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        self.with(&ConfigOverrides { xi: Some(xi), ..Default::default() })
    }

    pub fn with_ignore_spatial(&self, ignore: bool) -> Self {
        MiningConfig { ignore_spatial: ignore, ..self.clone() }
    }

    /// Parses a JSON config; missing fields fall back to the defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let overrides: ConfigOverrides = serde_json::from_str(text)?;
        MiningConfig::default().with(&overrides)
    }

    fn validate(&self) -> Result<()> {
        check_weights("eta", &self.eta)?;
        check_weights("sim_weights", &self.sim_weights)?;
        check_weights("int_weights", &self.int_weights)?;
        for (name, v) in [("zeta", self.zeta), ("xi", self.xi)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

fn check_weights(name: &str, w: &[f64]) -> Result<()> {
    if w.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::config(format!("{name} entries must lie in [0, 1], got {w:?}")));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(Error::config(format!("{name} must sum to 1, got {sum}")));
    }
    Ok(())
}

/// Partial config, as read from a JSON file or assembled from CLI flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim_weights: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub int_weights: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Accepted for round-tripping a serialized config; must agree with `r0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ignore_spatial: Option<bool>,
}

impl ConfigOverrides {
    /// Layers `other` on top of `self`; fields set in `other` win.
    pub fn merged(&self, other: &ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            eta: other.eta.or(self.eta),
            sim_weights: other.sim_weights.or(self.sim_weights),
            int_weights: other.int_weights.or(self.int_weights),
            zeta: other.zeta.or(self.zeta),
            xi: other.xi.or(self.xi),
            r0: other.r0.or(self.r0),
            lambda0: other.lambda0.or(self.lambda0),
            ignore_spatial: other.ignore_spatial.or(self.ignore_spatial),
        }
    }

    fn apply_to(&self, mut cfg: MiningConfig) -> Result<MiningConfig> {
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(v) = self.sim_weights {
            cfg.sim_weights = v;
        }
        if let Some(v) = self.int_weights {
            cfg.int_weights = v;
        }
        if let Some(v) = self.zeta {
            cfg.zeta = v;
        }
        if let Some(v) = self.xi {
            cfg.xi = v;
        }
        if let Some(v) = self.ignore_spatial {
            cfg.ignore_spatial = v;
        }
        if let Some(r0) = self.r0 {
            cfg.lambda0 = lambda_from_r0(r0).map_err(|e| Error::config(e.to_string()))?;
            cfg.r0 = r0;
        }
        if let Some(l) = self.lambda0 {
            if (l - cfg.lambda0).abs() > 1e-9 * cfg.lambda0.abs().max(1.0) {
                return Err(Error::config(format!(
                    "lambda0 = {l} disagrees with r0 = {} (expected {})",
                    cfg.r0, cfg.lambda0
                )));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// All scores attached to a lead. Everything after `cd` is only computed
/// for pairs that pass the correlation-degree filter.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scores {
    pub cd: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::bits::opt")]
    pub act: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::bits::opt")]
    pub nov: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub div: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interestingness: Option<f64>,
}

/// Weighted sum of the four recognition bits.
pub fn correlation_degree(v: &RecognitionVector, cfg: &MiningConfig) -> f64 {
    let eta = cfg.eta;
    eta[0] * bit(v.state_dep) + eta[1] * bit(v.env_dep) + eta[2] * bit(v.people_dep) + eta[3] * bit(v.ope_comp)
}

fn bit(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// A symbolic ontology concept. Comparison is exact equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concept {
    Token(u32),
    Env(String),
    Type(String),
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Token(t) => write!(f, "#{t}"),
            Concept::Env(n) => write!(f, "env:{n}"),
            Concept::Type(t) => write!(f, "type:{t}"),
        }
    }
}

/// Service-level concept unions: preconditions, postconditions, input and
/// output parameter types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConceptSets {
    pub pre: BTreeSet<Concept>,
    pub pos: BTreeSet<Concept>,
    pub inputs: BTreeSet<Concept>,
    pub outputs: BTreeSet<Concept>,
}

impl ConceptSets {
    fn as_array(&self) -> [&BTreeSet<Concept>; 4] {
        [&self.pre, &self.pos, &self.inputs, &self.outputs]
    }
}

pub fn derive_concept_sets(service: &ServiceDescription) -> ConceptSets {
    let mut sets = ConceptSets::default();
    for op in &service.operations {
        for (cond, target) in [(&op.precondition, &mut sets.pre), (&op.postcondition, &mut sets.pos)] {
            target.extend(cond.tokens.iter().map(|&t| Concept::Token(t)));
            target.extend(cond.env_constraints.iter().map(|c| Concept::Env(c.name.clone())));
        }
        sets.inputs.extend(op.inputs.iter().map(|p| Concept::Type(p.data_type.clone())));
        sets.outputs.extend(op.outputs.iter().map(|p| Concept::Type(p.data_type.clone())));
    }
    sets
}

/// Decides concept overlap for the similarity ratio. The default is exact
/// symbolic equality; a subsumption-aware matcher can replace it.
pub trait ConceptMatcher {
    /// `(|a ∩ b|, |a ∪ b|)` under this matcher's notion of overlap.
    fn overlap(&self, a: &BTreeSet<Concept>, b: &BTreeSet<Concept>) -> (usize, usize);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExactMatch;

impl ConceptMatcher for ExactMatch {
    fn overlap(&self, a: &BTreeSet<Concept>, b: &BTreeSet<Concept>) -> (usize, usize) {
        let inter = a.intersection(b).count();
        (inter, a.len() + b.len() - inter)
    }
}

/// Jaccard ratio with `J(∅, ∅) = 0`.
pub fn jaccard(matcher: &impl ConceptMatcher, a: &BTreeSet<Concept>, b: &BTreeSet<Concept>) -> f64 {
    let (inter, union) = matcher.overlap(a, b);
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn similarity_of_sets(a: &ConceptSets, b: &ConceptSets, cfg: &MiningConfig) -> f64 {
    similarity_of_sets_with(&ExactMatch, a, b, cfg)
}

pub fn similarity_of_sets_with(
    matcher: &impl ConceptMatcher,
    a: &ConceptSets,
    b: &ConceptSets,
    cfg: &MiningConfig,
) -> f64 {
    let (xs, ys) = (a.as_array(), b.as_array());
    let u = cfg.sim_weights;
    u[0] * jaccard(matcher, xs[0], ys[0])
        + u[1] * jaccard(matcher, xs[1], ys[1])
        + u[2] * jaccard(matcher, xs[2], ys[2])
        + u[3] * jaccard(matcher, xs[3], ys[3])
}

pub fn ontology_similarity(si: &ServiceDescription, sk: &ServiceDescription, cfg: &MiningConfig) -> f64 {
    similarity_of_sets(&derive_concept_sets(si), &derive_concept_sets(sk), cfg)
}

/// `-1 / ln(r0)`, the decay constant for which `exp(-1/lambda0) = r0`.
pub fn lambda_from_r0(r0: f64) -> Result<f64> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::arg(format!("r0 = {r0} must lie in the open interval (0, 1)")));
    }
    Ok(-1.0 / r0.ln())
}

/// `exp(-1 / (lambda0 * (sim + 1)))`; equals `r0` at `sim = 0` and rises to
/// `sqrt(r0)` at `sim = 1`.
pub fn domain_correlation(sim: f64, cfg: &MiningConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&sim) {
        return Err(Error::arg(format!("similarity {sim} outside [0, 1]")));
    }
    Ok((-1.0 / (cfg.lambda0 * (sim + 1.0))).exp())
}

/// `min(1, r0 / dc)`.
pub fn diversity(dc: f64, cfg: &MiningConfig) -> Result<f64> {
    // domain_correlation(0) reproduces r0 only up to rounding.
    if dc.is_nan() || dc < cfg.r0 * (1.0 - 1e-12) {
        return Err(Error::arg(format!("domain correlation {dc} below r0 = {}", cfg.r0)));
    }
    Ok((cfg.r0 / dc).min(1.0))
}

pub fn interestingness(act: bool, nov: bool, div: f64, cfg: &MiningConfig) -> Result<f64> {
    if !(div > 0.0 && div <= 1.0) {
        return Err(Error::arg(format!("diversity {div} outside (0, 1]")));
    }
    let w = cfg.int_weights;
    Ok(w[0] * bit(act) + w[1] * bit(nov) + w[2] * div)
}
