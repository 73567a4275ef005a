//! The bottom-up mining pipeline: enumerate every unordered service pair,
//! recognize and score it, apply the correlation-degree filter and then
//! the interestingness filter. Also holds the novelty registry and the
//! review transitions applied after a human has looked at a lead.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_unique_names, validate_service, Condition, ServiceDescription};
use crate::recognition::{recognize_profiles, Direction, RecognitionVector, ServiceProfile};
use crate::scoring::{
    correlation_degree, derive_concept_sets, diversity, domain_correlation, interestingness, similarity_of_sets,
    ConceptSets, MiningConfig, Scores,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadStatus {
    Candidate,
    FilteredCd,
    FilteredInterest,
    Interesting,
    Accepted,
    Rejected,
    Known,
}

impl LeadStatus {
    /// Legal moves: a candidate resolves to one of the three filter
    /// outcomes; an interesting lead resolves to one review outcome.
    pub fn can_transition_to(self, next: LeadStatus) -> bool {
        use LeadStatus::*;
        matches!(
            (self, next),
            (Candidate, FilteredCd | FilteredInterest | Interesting) | (Interesting, Accepted | Rejected | Known)
        )
    }
}

impl fmt::Display for LeadStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LeadStatus::Candidate => "candidate",
            LeadStatus::FilteredCd => "filtered_cd",
            LeadStatus::FilteredInterest => "filtered_interest",
            LeadStatus::Interesting => "interesting",
            LeadStatus::Accepted => "accepted",
            LeadStatus::Rejected => "rejected",
            LeadStatus::Known => "known",
        };
        f.write_str(s)
    }
}

/// A candidate composition of two services, stored with `service_a <
/// service_b`. The recognition direction is relative to that order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lead {
    pub service_a: String,
    pub service_b: String,
    pub recognition: RecognitionVector,
    pub scores: Scores,
    pub status: LeadStatus,
}

impl Lead {
    pub fn pair(&self) -> (&str, &str) {
        (&self.service_a, &self.service_b)
    }

    fn transition(&mut self, next: LeadStatus) -> Result<()> {
        if !self.status.can_transition_to(next) {
            return Err(Error::InvalidState(format!(
                "lead ({}, {}) cannot move from {} to {}",
                self.service_a, self.service_b, self.status, next
            )));
        }
        self.status = next;
        Ok(())
    }
}

/// Orders two names lexicographically.
pub fn canonical_pair<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Known compositions. A lead whose pair is registered is not novel.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NoveltyRegistry {
    known_pairs: BTreeSet<(String, String)>,
}

impl NoveltyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        let (a, b) = canonical_pair(a, b);
        self.known_pairs.contains(&(a.to_string(), b.to_string()))
    }

    /// Returns false if the pair was already known.
    pub fn insert(&mut self, a: &str, b: &str) -> Result<bool> {
        if a == b {
            return Err(Error::arg(format!("registry pair relates {a:?} to itself")));
        }
        let (a, b) = canonical_pair(a, b);
        Ok(self.known_pairs.insert((a.to_string(), b.to_string())))
    }

    pub fn len(&self) -> usize {
        self.known_pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.known_pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.known_pairs.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn to_json(&self) -> String {
        let pairs: Vec<[&str; 2]> = self.pairs().map(|(a, b)| [a, b]).collect();
        serde_json::to_string_pretty(&pairs).expect("string pairs always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let pairs: Vec<[String; 2]> = serde_json::from_str(text)?;
        let mut reg = NoveltyRegistry::new();
        for [a, b] in &pairs {
            reg.insert(a, b)?;
        }
        Ok(reg)
    }

    /// Loads a registry file; a missing file is an empty registry.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::from_json(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

pub fn check_novelty(pair: (&str, &str), registry: &NoveltyRegistry) -> bool {
    !registry.contains(pair.0, pair.1)
}

/// How actionability is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifierStrategy {
    /// Every lead is actionable.
    AlwaysTrue,
    /// Replays pre/postcondition chaining between the two services.
    ChainSim,
}

impl FromStr for VerifierStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "always_true" => Ok(VerifierStrategy::AlwaysTrue),
            "chain_sim" => Ok(VerifierStrategy::ChainSim),
            other => Err(Error::config(format!("unknown verifier strategy {other:?}"))),
        }
    }
}

/// Decides whether a lead between `a` and `b` is actionable. `direction`
/// is the recognized chaining direction from `a` to `b`.
pub trait Verifier: Sync {
    fn verify(&self, a: &ServiceDescription, b: &ServiceDescription, direction: Direction) -> bool;
}

impl Verifier for VerifierStrategy {
    fn verify(&self, a: &ServiceDescription, b: &ServiceDescription, direction: Direction) -> bool {
        match self {
            VerifierStrategy::AlwaysTrue => true,
            VerifierStrategy::ChainSim => chain_replay(a, b, direction),
        }
    }
}

fn chain_replay(a: &ServiceDescription, b: &ServiceDescription, direction: Direction) -> bool {
    let chains = |up: &ServiceDescription, down: &ServiceDescription| {
        up.operations.iter().any(|u| down.operations.iter().any(|d| establishes(&u.postcondition, &d.precondition)))
    };
    match direction {
        Direction::Forward => chains(a, b),
        Direction::Backward => chains(b, a),
        Direction::Both | Direction::None => chains(a, b) || chains(b, a),
    }
}

/// True when the effects in `post` meet every token and environment
/// requirement of `pre`. An empty precondition is always met.
pub fn establishes(post: &Condition, pre: &Condition) -> bool {
    pre.tokens.is_subset(&post.tokens)
        && pre.env_constraints.iter().all(|req| post.env_constraints.iter().any(|eff| eff.entails(req)))
}

pub fn verify_actionability(lead: &Lead, repo: &[ServiceDescription], strategy: &dyn Verifier) -> Result<bool> {
    let find = |name: &str| {
        repo.iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::arg(format!("lead references unknown service {name:?}")))
    };
    let (a, b) = (find(&lead.service_a)?, find(&lead.service_b)?);
    Ok(strategy.verify(a, b, lead.recognition.direction))
}

struct Prepared<'a> {
    service: &'a ServiceDescription,
    profile: ServiceProfile<'a>,
    concepts: ConceptSets,
}

/// Runs the two-stage objective evaluation over every unordered pair.
///
/// Every pair produces a lead; pairs below the correlation threshold are
/// kept with status `filtered_cd` and carry only `cd`. Output is sorted by
/// descending interestingness, then descending `cd`, then names.
pub fn mine(
    repo: &[ServiceDescription],
    cfg: &MiningConfig,
    registry: &NoveltyRegistry,
    verifier: &dyn Verifier,
) -> Result<Vec<Lead>> {
    check_unique_names(repo)?;
    for s in repo {
        if let Some(v) = validate_service(s).first() {
            return Err(Error::InvalidRepository(format!("service {:?} is invalid: {v}", s.name)));
        }
    }

    let mut prepared: Vec<Prepared<'_>> = repo
        .iter()
        .map(|s| Prepared { service: s, profile: ServiceProfile::new(s), concepts: derive_concept_sets(s) })
        .collect();
    prepared.sort_by(|x, y| x.service.name.cmp(&y.service.name));

    let row = |i: usize| -> Result<Vec<Lead>> {
        let a = &prepared[i];
        prepared[i + 1..].iter().map(|b| evaluate_pair(a, b, cfg, registry, verifier)).collect()
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<Lead>> = {
        use rayon::prelude::*;
        (0..prepared.len()).into_par_iter().map(row).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<Lead>> = (0..prepared.len()).map(row).collect::<Result<_>>()?;

    let mut leads: Vec<Lead> = rows.into_iter().flatten().collect();
    leads.sort_by(lead_order);
    Ok(leads)
}

fn evaluate_pair(
    a: &Prepared<'_>,
    b: &Prepared<'_>,
    cfg: &MiningConfig,
    registry: &NoveltyRegistry,
    verifier: &dyn Verifier,
) -> Result<Lead> {
    let recognition = recognize_profiles(&a.profile, &b.profile, cfg)?;
    let cd = correlation_degree(&recognition, cfg);
    let mut lead = Lead {
        service_a: a.service.name.clone(),
        service_b: b.service.name.clone(),
        recognition,
        scores: Scores { cd, ..Default::default() },
        status: LeadStatus::Candidate,
    };
    if cd < cfg.zeta() {
        lead.transition(LeadStatus::FilteredCd)?;
        return Ok(lead);
    }

    let act = verifier.verify(a.service, b.service, recognition.direction);
    let nov = check_novelty(lead.pair(), registry);
    let sim = similarity_of_sets(&a.concepts, &b.concepts, cfg);
    let dc = domain_correlation(sim, cfg)?;
    let div = diversity(dc, cfg)?;
    let score = interestingness(act, nov, div, cfg)?;
    lead.scores = Scores {
        cd,
        sim: Some(sim),
        dc: Some(dc),
        act: Some(act),
        nov: Some(nov),
        div: Some(div),
        interestingness: Some(score),
    };
    let next = if score >= cfg.xi() { LeadStatus::Interesting } else { LeadStatus::FilteredInterest };
    lead.transition(next)?;
    Ok(lead)
}

/// Descending interestingness (absent sorts last), descending `cd`, names.
pub fn lead_order(x: &Lead, y: &Lead) -> Ordering {
    let key = |l: &Lead| l.scores.interestingness.unwrap_or(f64::NEG_INFINITY);
    key(y)
        .total_cmp(&key(x))
        .then_with(|| y.scores.cd.total_cmp(&x.scores.cd))
        .then_with(|| x.service_a.cmp(&y.service_a))
        .then_with(|| x.service_b.cmp(&y.service_b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewDecision {
    Accept,
    Reject,
    MarkKnown,
}

/// Records a reviewer's verdict on an interesting lead. Marking a lead
/// known also registers its pair so later runs score it as not novel.
pub fn review_apply(lead: &mut Lead, decision: ReviewDecision, registry: &mut NoveltyRegistry) -> Result<()> {
    let next = match decision {
        ReviewDecision::Accept => LeadStatus::Accepted,
        ReviewDecision::Reject => LeadStatus::Rejected,
        ReviewDecision::MarkKnown => LeadStatus::Known,
    };
    lead.transition(next)?;
    if decision == ReviewDecision::MarkKnown {
        registry.insert(&lead.service_a, &lead.service_b)?;
    }
    Ok(())
}

pub fn write_leads<W: Write>(mut out: W, leads: &[Lead]) -> Result<()> {
    for lead in leads {
        serde_json::to_writer(&mut out, lead)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a JSON-lines lead file. Blank lines are skipped; parse errors
/// carry the 1-based line number.
pub fn read_leads<R: BufRead>(input: R) -> Result<Vec<Lead>> {
    let mut leads = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lead: Lead =
            serde_json::from_str(&line).map_err(|e| Error::InvalidRepository(format!("leads line {}: {e}", i + 1)))?;
        if lead.service_a >= lead.service_b {
            return Err(Error::InvalidRepository(format!("leads line {}: pair is not in canonical order", i + 1)));
        }
        leads.push(lead);
    }
    Ok(leads)
}
