//! The four binary recognition predicates: state (temporal and spatial
//! co-occurrence), environment (postcondition effects feeding
//! preconditions), people (shared users) and operation composability
//! (exact output-to-input type match).
//!
//! Each predicate is existential: one witnessing pair of states,
//! operations or people is enough. Bits are symmetric in the two services;
//! the chaining direction of the environment and operation predicates is
//! kept separately in [`Direction`], relative to `(si, sk)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Condition, Location, ServiceDescription, StateKind};
use crate::scoring::MiningConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    None,
    Forward,
    Backward,
    Both,
}

impl Direction {
    pub fn from_flags(forward: bool, backward: bool) -> Self {
        match (forward, backward) {
            (false, false) => Direction::None,
            (true, false) => Direction::Forward,
            (false, true) => Direction::Backward,
            (true, true) => Direction::Both,
        }
    }

    pub fn forward(self) -> bool {
        matches!(self, Direction::Forward | Direction::Both)
    }

    pub fn backward(self) -> bool {
        matches!(self, Direction::Backward | Direction::Both)
    }

    pub fn union(self, other: Direction) -> Direction {
        Direction::from_flags(self.forward() || other.forward(), self.backward() || other.backward())
    }

    pub fn reversed(self) -> Direction {
        Direction::from_flags(self.backward(), self.forward())
    }
}

/// Outcome of the four predicates for one service pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecognitionVector {
    #[serde(with = "crate::bits")]
    pub state_dep: bool,
    #[serde(with = "crate::bits")]
    pub env_dep: bool,
    #[serde(with = "crate::bits")]
    pub people_dep: bool,
    #[serde(with = "crate::bits")]
    pub ope_comp: bool,
    pub direction: Direction,
}

impl RecognitionVector {
    /// Bits with a direction derived from the chaining predicates: `both`
    /// when environment or operation chaining holds, `none` otherwise.
    pub fn from_bits(state_dep: bool, env_dep: bool, people_dep: bool, ope_comp: bool) -> Self {
        let direction = if env_dep || ope_comp { Direction::Both } else { Direction::None };
        RecognitionVector { state_dep, env_dep, people_dep, ope_comp, direction }
    }

    pub fn bits(&self) -> [bool; 4] {
        [self.state_dep, self.env_dep, self.people_dep, self.ope_comp]
    }
}

/// Per-service data the predicates scan, extracted once so that pair
/// evaluation does not re-walk the description.
#[derive(Clone, Debug)]
pub struct ServiceProfile<'a> {
    pub name: &'a str,
    actives: Vec<(f64, f64, Option<Location>)>,
    people: BTreeSet<&'a str>,
    conditions: Vec<(&'a Condition, &'a Condition)>,
    input_types: BTreeSet<&'a str>,
    output_types: BTreeSet<&'a str>,
}

impl<'a> ServiceProfile<'a> {
    pub fn new(service: &'a ServiceDescription) -> Self {
        let actives = service
            .states
            .iter()
            .filter(|s| s.kind == StateKind::Active)
            .filter_map(|s| match (s.start_ts, s.end_ts) {
                (Some(st), Some(et)) => Some((st, et, s.location)),
                _ => None,
            })
            .collect();
        let ops = &service.operations;
        ServiceProfile {
            name: &service.name,
            actives,
            people: service.people.iter().map(|p| p.id.as_str()).collect(),
            conditions: ops.iter().map(|o| (&o.precondition, &o.postcondition)).collect(),
            input_types: ops.iter().flat_map(|o| &o.inputs).map(|p| p.data_type.as_str()).collect(),
            output_types: ops.iter().flat_map(|o| &o.outputs).map(|p| p.data_type.as_str()).collect(),
        }
    }
}

pub fn state_dependency(si: &ServiceDescription, sk: &ServiceDescription, cfg: &MiningConfig) -> bool {
    state_dep(&ServiceProfile::new(si), &ServiceProfile::new(sk), cfg)
}

pub fn env_dependency(si: &ServiceDescription, sk: &ServiceDescription) -> (bool, Direction) {
    env_dep(&ServiceProfile::new(si), &ServiceProfile::new(sk))
}

pub fn people_dependency(si: &ServiceDescription, sk: &ServiceDescription) -> bool {
    people_dep(&ServiceProfile::new(si), &ServiceProfile::new(sk))
}

pub fn operation_composability(si: &ServiceDescription, sk: &ServiceDescription) -> (bool, Direction) {
    ope_comp(&ServiceProfile::new(si), &ServiceProfile::new(sk))
}

pub fn recognize(si: &ServiceDescription, sk: &ServiceDescription, cfg: &MiningConfig) -> Result<RecognitionVector> {
    recognize_profiles(&ServiceProfile::new(si), &ServiceProfile::new(sk), cfg)
}

pub fn recognize_profiles(
    a: &ServiceProfile<'_>,
    b: &ServiceProfile<'_>,
    cfg: &MiningConfig,
) -> Result<RecognitionVector> {
    if a.name == b.name {
        return Err(Error::arg(format!("cannot relate service {:?} to itself", a.name)));
    }
    let (env, env_dir) = env_dep(a, b);
    let (ope, ope_dir) = ope_comp(a, b);
    Ok(RecognitionVector {
        state_dep: state_dep(a, b, cfg),
        env_dep: env,
        people_dep: people_dep(a, b),
        ope_comp: ope,
        direction: env_dir.union(ope_dir),
    })
}

fn state_dep(a: &ServiceProfile<'_>, b: &ServiceProfile<'_>, cfg: &MiningConfig) -> bool {
    a.actives.iter().any(|&(a_start, a_end, a_loc)| {
        b.actives.iter().any(|&(b_start, b_end, b_loc)| {
            let temporal = a_start.max(b_start) < a_end.min(b_end);
            temporal && (cfg.ignore_spatial() || proximate(a_loc, b_loc))
        })
    })
}

// A record without a location places no spatial restriction.
fn proximate(a: Option<Location>, b: Option<Location>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => crate::model::within_radius(&a, &b).unwrap_or(false),
        _ => true,
    }
}

/// Does the effect `post` establish something `pre` asks for? Token form
/// is used whenever either side carries tokens; otherwise an effect
/// constraint must entail a requirement constraint of the same name.
pub(crate) fn feeds(post: &Condition, pre: &Condition) -> bool {
    if !post.tokens.is_empty() || !pre.tokens.is_empty() {
        return post.tokens.intersection(&pre.tokens).next().is_some();
    }
    post.env_constraints.iter().any(|eff| pre.env_constraints.iter().any(|req| eff.entails(req)))
}

fn env_dep(a: &ServiceProfile<'_>, b: &ServiceProfile<'_>) -> (bool, Direction) {
    let chains = |up: &ServiceProfile<'_>, down: &ServiceProfile<'_>| {
        up.conditions.iter().any(|(_, post)| down.conditions.iter().any(|(pre, _)| feeds(post, pre)))
    };
    let dir = Direction::from_flags(chains(a, b), chains(b, a));
    (dir != Direction::None, dir)
}

fn people_dep(a: &ServiceProfile<'_>, b: &ServiceProfile<'_>) -> bool {
    a.people.intersection(&b.people).next().is_some()
}

fn ope_comp(a: &ServiceProfile<'_>, b: &ServiceProfile<'_>) -> (bool, Direction) {
    let forward = a.output_types.intersection(&b.input_types).next().is_some();
    let backward = b.output_types.intersection(&a.input_types).next().is_some();
    let dir = Direction::from_flags(forward, backward);
    (dir != Direction::None, dir)
}
