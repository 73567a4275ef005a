//! Brute-force reference pipeline. Shares only the data types with the
//! crate; every predicate and formula is re-derived here from the
//! definitions with plain nested loops.

#![allow(dead_code)]

use std::collections::BTreeSet;

use svcmine::model::{Comparator, Condition, EnvConstraint, Location, ServiceDescription, StateKind};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleLead {
    pub a: String,
    pub b: String,
    pub bits: [bool; 4],
    pub forward: bool,
    pub backward: bool,
    pub cd: f64,
    pub second_stage: Option<SecondStage>,
    pub interesting: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondStage {
    pub sim: f64,
    pub dc: f64,
    pub act: bool,
    pub nov: bool,
    pub div: f64,
    pub interestingness: f64,
}

pub struct OracleConfig {
    pub eta: [f64; 4],
    pub u: [f64; 4],
    pub w: [f64; 3],
    pub zeta: f64,
    pub xi: f64,
    pub r0: f64,
    pub ignore_spatial: bool,
    pub chain_sim: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            eta: [0.1, 0.2, 0.3, 0.4],
            u: [0.25; 4],
            w: [0.3, 0.3, 0.4],
            zeta: 0.5,
            xi: 0.7,
            r0: 0.1,
            ignore_spatial: false,
            chain_sim: false,
        }
    }
}

fn haversine(a: &Location, b: &Location) -> f64 {
    let r = 6_371_000.0_f64;
    let (la1, la2) = (a.lat.to_radians(), b.lat.to_radians());
    let dla = la2 - la1;
    let dlo = (b.lon - a.lon).to_radians();
    let h = (dla / 2.0).sin().powi(2) + la1.cos() * la2.cos() * (dlo / 2.0).sin().powi(2);
    2.0 * r * h.sqrt().min(1.0).asin()
}

fn state_bit(x: &ServiceDescription, y: &ServiceDescription, ignore_spatial: bool) -> bool {
    for s in &x.states {
        for t in &y.states {
            if s.kind != StateKind::Active || t.kind != StateKind::Active {
                continue;
            }
            let (s0, s1) = (s.start_ts.unwrap(), s.end_ts.unwrap());
            let (t0, t1) = (t.start_ts.unwrap(), t.end_ts.unwrap());
            let lo = if s0 > t0 { s0 } else { t0 };
            let hi = if s1 < t1 { s1 } else { t1 };
            if lo >= hi {
                continue;
            }
            if ignore_spatial {
                return true;
            }
            match (&s.location, &t.location) {
                (Some(p), Some(q)) => {
                    let r = if p.radius_m < q.radius_m { p.radius_m } else { q.radius_m };
                    if haversine(p, q) <= r {
                        return true;
                    }
                }
                _ => return true,
            }
        }
    }
    false
}

// Interval of admitted values: (lo, lo_closed, hi, hi_closed)
fn admitted(c: &EnvConstraint) -> (f64, bool, f64, bool) {
    match c.comparator {
        Comparator::Eq => (c.bound, true, c.bound, true),
        Comparator::Geq => (c.bound, true, f64::INFINITY, false),
        Comparator::Gt => (c.bound, false, f64::INFINITY, false),
        Comparator::Leq => (f64::NEG_INFINITY, false, c.bound, true),
        Comparator::Lt => (f64::NEG_INFINITY, false, c.bound, false),
    }
}

fn subset(eff: &EnvConstraint, req: &EnvConstraint) -> bool {
    if eff.name != req.name {
        return false;
    }
    let (a0, a0c, a1, a1c) = admitted(eff);
    let (b0, b0c, b1, b1c) = admitted(req);
    let low = if a0 == b0 { b0c || !a0c } else { a0 > b0 };
    let high = if a1 == b1 { b1c || !a1c } else { a1 < b1 };
    low && high
}

fn feeds(post: &Condition, pre: &Condition) -> bool {
    if !post.tokens.is_empty() || !pre.tokens.is_empty() {
        for t in &post.tokens {
            for u in &pre.tokens {
                if t == u {
                    return true;
                }
            }
        }
        return false;
    }
    for e in &post.env_constraints {
        for r in &pre.env_constraints {
            if subset(e, r) {
                return true;
            }
        }
    }
    false
}

fn env_chain(up: &ServiceDescription, down: &ServiceDescription) -> bool {
    for o in &up.operations {
        for p in &down.operations {
            if feeds(&o.postcondition, &p.precondition) {
                return true;
            }
        }
    }
    false
}

fn type_chain(up: &ServiceDescription, down: &ServiceDescription) -> bool {
    for o in &up.operations {
        for out in &o.outputs {
            for p in &down.operations {
                for inp in &p.inputs {
                    if out.data_type == inp.data_type {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn people_bit(x: &ServiceDescription, y: &ServiceDescription) -> bool {
    for p in &x.people {
        for q in &y.people {
            if p.id == q.id {
                return true;
            }
        }
    }
    false
}

fn establishes(post: &Condition, pre: &Condition) -> bool {
    for t in &pre.tokens {
        if !post.tokens.contains(t) {
            return false;
        }
    }
    for r in &pre.env_constraints {
        if !post.env_constraints.iter().any(|e| subset(e, r)) {
            return false;
        }
    }
    true
}

fn replay(up: &ServiceDescription, down: &ServiceDescription) -> bool {
    for o in &up.operations {
        for p in &down.operations {
            if establishes(&o.postcondition, &p.precondition) {
                return true;
            }
        }
    }
    false
}

fn concepts(s: &ServiceDescription) -> [BTreeSet<String>; 4] {
    let mut out: [BTreeSet<String>; 4] = Default::default();
    for o in &s.operations {
        for t in &o.precondition.tokens {
            out[0].insert(format!("tok{t}"));
        }
        for c in &o.precondition.env_constraints {
            out[0].insert(format!("env{}", c.name));
        }
        for t in &o.postcondition.tokens {
            out[1].insert(format!("tok{t}"));
        }
        for c in &o.postcondition.env_constraints {
            out[1].insert(format!("env{}", c.name));
        }
        for p in &o.inputs {
            out[2].insert(format!("ty{}", p.data_type));
        }
        for p in &o.outputs {
            out[3].insert(format!("ty{}", p.data_type));
        }
    }
    out
}

fn ratio(x: &BTreeSet<String>, y: &BTreeSet<String>) -> f64 {
    let inter = x.iter().filter(|c| y.contains(*c)).count();
    let mut all = x.clone();
    all.extend(y.iter().cloned());
    if all.is_empty() {
        0.0
    } else {
        inter as f64 / all.len() as f64
    }
}

fn as_f(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Every unordered pair, scored from the definitions. `known` lists
/// registered pairs in either order.
pub fn brute_force(repo: &[ServiceDescription], cfg: &OracleConfig, known: &[(String, String)]) -> Vec<OracleLead> {
    let lambda0 = -1.0 / cfg.r0.ln();
    let mut out = Vec::new();
    for i in 0..repo.len() {
        for k in 0..repo.len() {
            let (x, y) = (&repo[i], &repo[k]);
            if x.name >= y.name {
                continue;
            }
            let env_f = env_chain(x, y);
            let env_b = env_chain(y, x);
            let ty_f = type_chain(x, y);
            let ty_b = type_chain(y, x);
            let bits = [state_bit(x, y, cfg.ignore_spatial), env_f || env_b, people_bit(x, y), ty_f || ty_b];
            let (forward, backward) = (env_f || ty_f, env_b || ty_b);
            let cd = cfg.eta[0] * as_f(bits[0])
                + cfg.eta[1] * as_f(bits[1])
                + cfg.eta[2] * as_f(bits[2])
                + cfg.eta[3] * as_f(bits[3]);
            let mut lead = OracleLead {
                a: x.name.clone(),
                b: y.name.clone(),
                bits,
                forward,
                backward,
                cd,
                second_stage: None,
                interesting: false,
            };
            if cd >= cfg.zeta {
                let act = if !cfg.chain_sim {
                    true
                } else if forward && !backward {
                    replay(x, y)
                } else if backward && !forward {
                    replay(y, x)
                } else {
                    replay(x, y) || replay(y, x)
                };
                let nov = !known.iter().any(|(p, q)| (*p == x.name && *q == y.name) || (*p == y.name && *q == x.name));
                let (cx, cy) = (concepts(x), concepts(y));
                let sim = cfg.u[0] * ratio(&cx[0], &cy[0])
                    + cfg.u[1] * ratio(&cx[1], &cy[1])
                    + cfg.u[2] * ratio(&cx[2], &cy[2])
                    + cfg.u[3] * ratio(&cx[3], &cy[3]);
                let dc = (-1.0 / (lambda0 * (sim + 1.0))).exp();
                let div = (cfg.r0 / dc).min(1.0);
                let score = cfg.w[0] * as_f(act) + cfg.w[1] * as_f(nov) + cfg.w[2] * div;
                lead.interesting = score >= cfg.xi;
                lead.second_stage = Some(SecondStage { sim, dc, act, nov, div, interestingness: score });
            }
            out.push(lead);
        }
    }
    out.sort_by(|p, q| {
        let key = |l: &OracleLead| l.second_stage.as_ref().map(|s| s.interestingness).unwrap_or(f64::NEG_INFINITY);
        key(q)
            .partial_cmp(&key(p))
            .unwrap()
            .then(q.cd.partial_cmp(&p.cd).unwrap())
            .then(p.a.cmp(&q.a))
            .then(p.b.cmp(&q.b))
    });
    out
}

/// Field-by-field comparison; returns a description of the first mismatch.
pub fn compare(mined: &[svcmine::Lead], oracle: &[OracleLead]) -> Result<(), String> {
    use svcmine::LeadStatus;
    if mined.len() != oracle.len() {
        return Err(format!("lead count {} vs oracle {}", mined.len(), oracle.len()));
    }
    for (i, (m, o)) in mined.iter().zip(oracle).enumerate() {
        let ctx = || format!("position {i}: ({}, {}) vs oracle ({}, {})", m.service_a, m.service_b, o.a, o.b);
        if m.service_a != o.a || m.service_b != o.b {
            return Err(ctx());
        }
        if m.recognition.bits() != o.bits {
            return Err(format!("{}: bits {:?} vs {:?}", ctx(), m.recognition.bits(), o.bits));
        }
        let d = m.recognition.direction;
        if (d.forward(), d.backward()) != (o.forward, o.backward) {
            return Err(format!("{}: direction {d:?}", ctx()));
        }
        if m.scores.cd != o.cd {
            return Err(format!("{}: cd {} vs {}", ctx(), m.scores.cd, o.cd));
        }
        let s = &m.scores;
        match &o.second_stage {
            None => {
                if m.status != LeadStatus::FilteredCd || s.interestingness.is_some() || s.sim.is_some() {
                    return Err(format!("{}: expected filtered_cd, got {:?}", ctx(), m.status));
                }
            }
            Some(t) => {
                let got = (s.sim, s.dc, s.act, s.nov, s.div, s.interestingness);
                let want = (Some(t.sim), Some(t.dc), Some(t.act), Some(t.nov), Some(t.div), Some(t.interestingness));
                if got != want {
                    return Err(format!("{}: scores {got:?} vs {want:?}", ctx()));
                }
                let want_status = if o.interesting { LeadStatus::Interesting } else { LeadStatus::FilteredInterest };
                if m.status != want_status {
                    return Err(format!("{}: status {:?} vs {:?}", ctx(), m.status, want_status));
                }
            }
        }
    }
    Ok(())
}
