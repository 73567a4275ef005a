//! Browser bindings for the mining engine. Every export takes plain numbers
//! and returns a JSON string so the page needs no glue beyond `JSON.parse`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use svcmine::harness::metrics_of;
use svcmine::scoring::{correlation_degree, diversity, domain_correlation, interestingness, ConfigOverrides};
use svcmine::{generate_repository, mine, GeneratorParams, Lead, MiningConfig, NoveltyRegistry, RecognitionVector};
use svcmine::{LeadStatus, VerifierStrategy};

/// Largest repository the page may request; mining is quadratic.
pub const MAX_SERVICES: usize = 400;

#[derive(Serialize)]
struct CurvePoint {
    sim: f64,
    dc: f64,
    div: f64,
    novel: f64,
    known: f64,
}

#[derive(Serialize)]
struct CdRow {
    bits: [bool; 4],
    cd: f64,
    passes: bool,
}

#[derive(Serialize)]
struct MineSummary<'a> {
    pairs: usize,
    total_leads: usize,
    avg_cd: Option<f64>,
    interesting_count: usize,
    avg_interestingness: Option<f64>,
    top: Vec<&'a Lead>,
}

fn config(r0: f64, zeta: f64, xi: f64) -> svcmine::Result<MiningConfig> {
    MiningConfig::default().with(&ConfigOverrides {
        r0: Some(r0),
        zeta: Some(zeta),
        xi: Some(xi),
        ..Default::default()
    })
}

/// Domain correlation, diversity and the interestingness of an actionable
/// lead (novel and already known) sampled over `sim` in [0, 1].
pub fn score_curve_json(r0: f64, samples: usize) -> svcmine::Result<String> {
    let cfg = config(r0, 0.5, 0.7)?;
    let samples = samples.clamp(2, 1000);
    let mut points = Vec::with_capacity(samples);
    for i in 0..samples {
        let sim = i as f64 / (samples - 1) as f64;
        let dc = domain_correlation(sim, &cfg)?;
        let div = diversity(dc, &cfg)?;
        points.push(CurvePoint {
            sim,
            dc,
            div,
            novel: interestingness(true, true, div, &cfg)?,
            known: interestingness(true, false, div, &cfg)?,
        });
    }
    Ok(serde_json::to_string(&points)?)
}

/// The correlation degree of all sixteen recognition vectors and whether each
/// clears `zeta`.
pub fn cd_table_json(eta: [f64; 4], zeta: f64) -> svcmine::Result<String> {
    let cfg =
        MiningConfig::default().with(&ConfigOverrides { eta: Some(eta), zeta: Some(zeta), ..Default::default() })?;
    let rows: Vec<CdRow> = (0u8..16)
        .map(|m| {
            let bits = [m & 8 != 0, m & 4 != 0, m & 2 != 0, m & 1 != 0];
            let cd = correlation_degree(&RecognitionVector::from_bits(bits[0], bits[1], bits[2], bits[3]), &cfg);
            CdRow { bits, cd, passes: cd >= cfg.zeta() }
        })
        .collect();
    Ok(serde_json::to_string(&rows)?)
}

/// Generates a repository and mines it, returning the aggregate metrics and
/// the `top` best leads.
pub fn mine_synthetic_json(n: usize, seed: u64, zeta: f64, xi: f64, top: usize) -> svcmine::Result<String> {
    if n > MAX_SERVICES {
        return Err(svcmine::Error::InvalidArgument(format!("at most {MAX_SERVICES} services")));
    }
    let cfg = config(0.1, zeta, xi)?;
    let repo = generate_repository(&GeneratorParams::with_services(n, seed))?;
    let leads = mine(&repo, &cfg, &NoveltyRegistry::new(), &VerifierStrategy::ChainSim)?;
    let m = metrics_of(&leads);
    let summary = MineSummary {
        pairs: leads.len(),
        total_leads: m.total_leads,
        avg_cd: m.avg_cd,
        interesting_count: m.interesting_count,
        avg_interestingness: m.avg_interestingness,
        top: leads.iter().filter(|l| l.status == LeadStatus::Interesting).take(top).collect(),
    };
    Ok(serde_json::to_string(&summary)?)
}

fn js(r: svcmine::Result<String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn score_curve(r0: f64, samples: usize) -> Result<String, JsValue> {
    js(score_curve_json(r0, samples))
}

#[wasm_bindgen]
pub fn cd_table(eta_state: f64, eta_env: f64, eta_people: f64, eta_ope: f64, zeta: f64) -> Result<String, JsValue> {
    js(cd_table_json([eta_state, eta_env, eta_people, eta_ope], zeta))
}

#[wasm_bindgen]
pub fn mine_synthetic(n: usize, seed: u64, zeta: f64, xi: f64, top: usize) -> Result<String, JsValue> {
    js(mine_synthetic_json(n, seed, zeta, xi, top))
}
