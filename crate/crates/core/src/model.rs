//! Ontology data model for service descriptions and the value-level
//! predicates (interval overlap, spatial proximity, environment checks)
//! the rest of the crate builds on.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in meters, used by the haversine distance.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A GPS point with a user-defined proximity radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Location {
    pub lat: f64,
    pub lon: f64,
    pub radius_m: f64,
}

impl Location {
    pub fn new(lat: f64, lon: f64, radius_m: f64) -> Result<Self> {
        let loc = Location { lat, lon, radius_m };
        loc.check()?;
        Ok(loc)
    }

    pub fn check(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(Error::arg(format!("latitude {} out of [-90, 90]", self.lat)));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(Error::arg(format!("longitude {} out of [-180, 180]", self.lon)));
        }
        if self.radius_m.is_nan() || self.radius_m <= 0.0 {
            return Err(Error::arg(format!("radius {} must be > 0", self.radius_m)));
        }
        Ok(())
    }

    /// Great-circle distance in meters.
    pub fn distance_m(&self, other: &Location) -> f64 {
        let (phi1, phi2) = (self.lat.to_radians(), other.lat.to_radians());
        let dphi = phi2 - phi1;
        let dlambda = (other.lon - self.lon).to_radians();
        let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
        2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
    }
}

/// A measured environment value, e.g. `<temperature, 25, degree, 3pm, room>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    pub name: String,
    pub value: f64,
    pub unit: String,
    pub timestamp: f64,
    pub location: Location,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Eq,
    Leq,
    Geq,
    Lt,
    Gt,
}

impl Comparator {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Comparator::Eq => value == bound,
            Comparator::Leq => value <= bound,
            Comparator::Geq => value >= bound,
            Comparator::Lt => value < bound,
            Comparator::Gt => value > bound,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Leq => "<=",
            Comparator::Geq => ">=",
            Comparator::Lt => "<",
            Comparator::Gt => ">",
        }
    }
}

/// A comparison over a named environment value, such as `temperature >= 28`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConstraint {
    pub name: String,
    pub comparator: Comparator,
    pub bound: f64,
}

impl EnvConstraint {
    pub fn new(name: impl Into<String>, comparator: Comparator, bound: f64) -> Self {
        EnvConstraint { name: name.into(), comparator, bound }
    }

    /// Returns true when every value admitted by `self` is also admitted by
    /// `required`. Names must match exactly.
    ///
    /// Used to decide whether a postcondition effect establishes a
    /// precondition requirement: the effect `temperature >= 30` entails
    /// `temperature >= 28`, while `temperature = 25` does not.
    pub fn entails(&self, required: &EnvConstraint) -> bool {
        if self.name != required.name {
            return false;
        }
        let (lo, lo_open, hi, hi_open) = self.bounds();
        let (rlo, rlo_open, rhi, rhi_open) = required.bounds();
        let lower_ok = lo > rlo || (lo == rlo && (lo_open || !rlo_open));
        let upper_ok = hi < rhi || (hi == rhi && (hi_open || !rhi_open));
        lower_ok && upper_ok
    }

    // (lower, lower_open, upper, upper_open)
    fn bounds(&self) -> (f64, bool, f64, bool) {
        let b = self.bound;
        match self.comparator {
            Comparator::Eq => (b, false, b, false),
            Comparator::Geq => (b, false, f64::INFINITY, true),
            Comparator::Gt => (b, true, f64::INFINITY, true),
            Comparator::Leq => (f64::NEG_INFINITY, true, b, false),
            Comparator::Lt => (f64::NEG_INFINITY, true, b, true),
        }
    }
}

impl fmt::Display for EnvConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.name, self.comparator.symbol(), self.bound)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Ready,
    Start,
    Active,
    End,
}

/// An externally observable service state.
///
/// `start` and `end` are instantaneous and only carry `start_ts`.
/// `active` carries both timestamps; its duration is `end_ts - start_ts`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_ts: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_ts: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
}

impl StateRecord {
    pub fn ready() -> Self {
        StateRecord { kind: StateKind::Ready, start_ts: None, end_ts: None, location: None }
    }

    pub fn active(start_ts: f64, end_ts: f64, location: Location) -> Self {
        StateRecord {
            kind: StateKind::Active,
            start_ts: Some(start_ts),
            end_ts: Some(end_ts),
            location: Some(location),
        }
    }

    pub fn instant(kind: StateKind, ts: f64, location: Location) -> Self {
        StateRecord { kind, start_ts: Some(ts), end_ts: None, location: Some(location) }
    }

    /// `(start, end)` of an active record.
    pub fn interval(&self) -> Result<(f64, f64)> {
        match (self.kind, self.start_ts, self.end_ts) {
            (StateKind::Active, Some(s), Some(e)) if e >= s => Ok((s, e)),
            (StateKind::Active, Some(_), Some(_)) => Err(Error::arg("active state has negative duration")),
            (StateKind::Active, _, _) => Err(Error::arg("active state is missing a timestamp")),
            (kind, _, _) => Err(Error::arg(format!("expected an active state, got {kind:?}"))),
        }
    }

    /// Active duration `end_ts - start_ts`.
    pub fn duration(&self) -> Result<f64> {
        self.interval().map(|(s, e)| e - s)
    }
}

/// A pre- or postcondition. Carries the rich form (states and environment
/// constraints) and the symbolic token form used by simulated repositories.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Condition {
    #[serde(default)]
    pub states: Vec<StateRecord>,
    #[serde(default)]
    pub env_constraints: Vec<EnvConstraint>,
    #[serde(default)]
    pub tokens: BTreeSet<u32>,
}

impl Condition {
    pub fn is_empty(&self) -> bool {
        self.states.is_empty() && self.env_constraints.is_empty() && self.tokens.is_empty()
    }

    pub fn from_tokens(tokens: impl IntoIterator<Item = u32>) -> Self {
        Condition { tokens: tokens.into_iter().collect(), ..Default::default() }
    }

    pub fn from_env(constraints: impl IntoIterator<Item = EnvConstraint>) -> Self {
        Condition { env_constraints: constraints.into_iter().collect(), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameter {
    pub name: String,
    pub data_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl Parameter {
    pub fn new(name: impl Into<String>, data_type: impl Into<String>) -> Self {
        Parameter { name: name.into(), data_type: data_type.into(), unit: None }
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit = Some(unit.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationDescription {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub categories: BTreeSet<String>,
    #[serde(default)]
    pub mode: String,
    #[serde(default)]
    pub inputs: Vec<Parameter>,
    #[serde(default)]
    pub outputs: Vec<Parameter>,
    /// Opaque quality concepts; carried but never scored.
    #[serde(default)]
    pub qualities: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub precondition: Condition,
    #[serde(default)]
    pub postcondition: Condition,
}

impl OperationDescription {
    pub fn named(name: impl Into<String>) -> Self {
        OperationDescription { name: name.into(), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Person {
    pub id: String,
}

impl Person {
    pub fn new(id: impl Into<String>) -> Self {
        Person { id: id.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceDescription {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub bindings: BTreeSet<String>,
    #[serde(default)]
    pub categories: BTreeSet<String>,
    pub operations: Vec<OperationDescription>,
    #[serde(default)]
    pub states: Vec<StateRecord>,
    #[serde(default)]
    pub people: BTreeSet<Person>,
}

impl ServiceDescription {
    pub fn active_states(&self) -> impl Iterator<Item = &StateRecord> {
        self.states.iter().filter(|s| s.kind == StateKind::Active)
    }
}

/// Strict (positive-length) overlap of two active intervals.
pub fn interval_overlap(a: &StateRecord, b: &StateRecord) -> Result<bool> {
    let (a_start, a_end) = a.interval()?;
    let (b_start, b_end) = b.interval()?;
    Ok(a_start.max(b_start) < a_end.min(b_end))
}

/// True iff the great-circle distance is within the smaller of the two radii.
pub fn within_radius(a: &Location, b: &Location) -> Result<bool> {
    a.check()?;
    b.check()?;
    Ok(a.distance_m(b) <= a.radius_m.min(b.radius_m))
}

pub fn env_satisfies(env: &Environment, constraint: &EnvConstraint) -> bool {
    env.name == constraint.name && constraint.comparator.holds(env.value, constraint.bound)
}

/// Bounds enforced by [`validate_service_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationLimits {
    pub max_inputs: usize,
    pub max_outputs: usize,
    pub max_tokens_per_condition: usize,
    pub max_token: u32,
}

impl Default for ValidationLimits {
    fn default() -> Self {
        ValidationLimits { max_inputs: 5, max_outputs: 5, max_tokens_per_condition: 3, max_token: 9 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

pub fn validate_service(service: &ServiceDescription) -> Vec<Violation> {
    validate_service_with(service, &ValidationLimits::default())
}

pub fn validate_service_with(service: &ServiceDescription, limits: &ValidationLimits) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |path: String, message: &str| out.push(Violation { path, message: message.to_string() });
    let root = if service.name.is_empty() { "<unnamed>".to_string() } else { service.name.clone() };

    if service.name.is_empty() {
        push(root.clone(), "name empty");
    }
    if service.operations.is_empty() {
        push(root.clone(), "operations empty");
    }

    let mut op_names = HashSet::new();
    for (i, op) in service.operations.iter().enumerate() {
        let path = format!("{root}.operations[{i}]");
        if op.name.is_empty() {
            push(path.clone(), "operation name empty");
        } else if !op_names.insert(op.name.as_str()) {
            push(path.clone(), "duplicate operation name");
        }
        if op.inputs.len() > limits.max_inputs {
            push(path.clone(), "too many inputs");
        }
        if op.outputs.len() > limits.max_outputs {
            push(path.clone(), "too many outputs");
        }
        for (j, p) in op.inputs.iter().chain(op.outputs.iter()).enumerate() {
            if p.name.is_empty() || p.data_type.is_empty() {
                push(format!("{path}.parameters[{j}]"), "parameter name or data type empty");
            }
        }
        for (label, cond) in [("precondition", &op.precondition), ("postcondition", &op.postcondition)] {
            let cpath = format!("{path}.{label}");
            if cond.tokens.len() > limits.max_tokens_per_condition {
                push(cpath.clone(), "too many condition tokens");
            }
            if cond.tokens.iter().any(|&t| t > limits.max_token) {
                push(cpath.clone(), "condition token out of range");
            }
            for c in &cond.env_constraints {
                if c.name.is_empty() {
                    push(cpath.clone(), "environment constraint name empty");
                }
                if !c.bound.is_finite() {
                    push(cpath.clone(), "environment constraint bound not finite");
                }
            }
            for (k, st) in cond.states.iter().enumerate() {
                check_state(st, &format!("{cpath}.states[{k}]"), true, &mut push);
            }
        }
    }

    for (i, st) in service.states.iter().enumerate() {
        check_state(st, &format!("{root}.states[{i}]"), false, &mut push);
    }

    let active: Vec<(usize, &StateRecord)> =
        service.states.iter().enumerate().filter(|(_, s)| s.kind == StateKind::Active).collect();
    for (n, (i, a)) in active.iter().enumerate() {
        for (j, b) in &active[n + 1..] {
            if let Ok(true) = interval_overlap(a, b) {
                push(format!("{root}.states[{i}]"), &format!("active interval overlaps states[{j}]"));
            }
        }
    }

    for p in &service.people {
        if p.id.is_empty() {
            push(format!("{root}.people"), "person id empty");
        }
    }
    out
}

// Condition states are requirements ("must be active") and may omit timestamps.
fn check_state(st: &StateRecord, path: &str, requirement: bool, push: &mut impl FnMut(String, &str)) {
    for ts in [st.start_ts, st.end_ts].into_iter().flatten() {
        if ts.is_nan() || ts < 0.0 {
            push(path.to_string(), "negative timestamp");
        }
    }
    match st.kind {
        StateKind::Ready => {}
        StateKind::Start | StateKind::End => {
            if st.end_ts.is_some() {
                push(path.to_string(), "instantaneous state has end_ts");
            }
        }
        StateKind::Active => match (st.start_ts, st.end_ts) {
            (Some(s), Some(e)) if e < s => push(path.to_string(), "negative duration"),
            (Some(_), Some(_)) => {}
            _ if requirement => {}
            _ => push(path.to_string(), "active state missing start_ts or end_ts"),
        },
    }
    if let Some(loc) = &st.location {
        if let Err(e) = loc.check() {
            push(path.to_string(), &e.to_string());
        }
    }
}

/// Checks that service names are non-empty and unique.
pub fn check_unique_names(services: &[ServiceDescription]) -> Result<()> {
    let mut seen = HashSet::new();
    for s in services {
        if !seen.insert(s.name.as_str()) {
            return Err(Error::InvalidRepository(format!("duplicate service name {:?}", s.name)));
        }
    }
    Ok(())
}
