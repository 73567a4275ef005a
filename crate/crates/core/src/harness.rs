//! Experiment driver, CSV export and the terminal review loop.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mining::{mine, review_apply, Lead, LeadStatus, NoveltyRegistry, ReviewDecision, VerifierStrategy};
use crate::model::ServiceDescription;
use crate::recognition::Direction;
use crate::scoring::{ConfigOverrides, MiningConfig};
use crate::synth::{generate_repository, GeneratorParams};

/// One point of a parameter sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepPoint {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub generator: GeneratorParams,
    pub config: ConfigOverrides,
}

impl SweepPoint {
    pub fn parse_sweep(text: &str) -> Result<Vec<SweepPoint>> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The four reported quantities for one mined repository.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Metrics {
    /// Leads passing the correlation-degree filter.
    pub total_leads: usize,
    /// Mean `cd` over those leads.
    pub avg_cd: Option<f64>,
    pub interesting_count: usize,
    /// Mean interestingness over interesting leads.
    pub avg_interestingness: Option<f64>,
}

pub fn metrics_of(leads: &[Lead]) -> Metrics {
    let passing: Vec<&Lead> = leads.iter().filter(|l| l.status != LeadStatus::FilteredCd).collect();
    let interesting: Vec<f64> =
        leads.iter().filter(|l| l.status == LeadStatus::Interesting).filter_map(|l| l.scores.interestingness).collect();
    Metrics {
        total_leads: passing.len(),
        avg_cd: mean(passing.iter().map(|l| l.scores.cd)),
        interesting_count: interesting.len(),
        avg_interestingness: mean(interesting.iter().copied()),
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Mines `repo` with the always-true verifier and an empty registry.
pub fn measure(repo: &[ServiceDescription], cfg: &MiningConfig) -> Result<Metrics> {
    let leads = mine(repo, cfg, &NoveltyRegistry::new(), &VerifierStrategy::AlwaysTrue)?;
    Ok(metrics_of(&leads))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub params_summary: String,
    pub n_services: usize,
    pub total_leads: usize,
    pub avg_cd: Option<f64>,
    pub interesting_count: usize,
    pub avg_interestingness: Option<f64>,
    pub wall_time_ms: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

/// Runs every sweep point `repetitions` times with seeds `base_seed + rep`.
/// Wall time is only recorded when `timing` is set, since it is the one
/// column that is not reproducible.
pub fn run_experiment(
    sweep: &[SweepPoint],
    repetitions: usize,
    base_seed: u64,
    timing: bool,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::default();
    for (idx, point) in sweep.iter().enumerate() {
        let tag = |e: Error| Error::arg(format!("sweep point {idx} ({}): {e}", point.label.as_deref().unwrap_or("-")));
        let cfg = MiningConfig::default().with(&point.config).map_err(tag)?;
        for rep in 0..repetitions {
            let seed = base_seed.wrapping_add(rep as u64);
            let params = GeneratorParams { seed, ..point.generator.clone() };
            let started = Instant::now();
            let repo = generate_repository(&params).map_err(tag)?;
            let m = measure(&repo, &cfg).map_err(tag)?;
            let elapsed = started.elapsed().as_secs_f64() * 1e3;
            report.rows.push(ReportRow {
                params_summary: summary(point, &params, &cfg),
                n_services: params.n_services,
                total_leads: m.total_leads,
                avg_cd: m.avg_cd,
                interesting_count: m.interesting_count,
                avg_interestingness: m.avg_interestingness,
                wall_time_ms: timing.then_some(elapsed),
            });
        }
    }
    Ok(report)
}

fn summary(point: &SweepPoint, params: &GeneratorParams, cfg: &MiningConfig) -> String {
    let mut s = String::new();
    if let Some(label) = &point.label {
        let _ = write!(s, "{label} ");
    }
    let _ = write!(
        s,
        "seed={} ops={:?} in={:?} out={:?} cond={:?} zeta={} xi={} r0={}",
        params.seed,
        params.ops_per_service,
        params.inputs_per_op,
        params.outputs_per_op,
        params.cond_params_per_op,
        cfg.zeta(),
        cfg.xi(),
        cfg.r0()
    );
    s
}

pub const CSV_HEADER: [&str; 7] = [
    "params_summary",
    "n_services",
    "total_leads",
    "avg_cd",
    "interesting_count",
    "avg_interestingness",
    "wall_time_ms",
];

/// Writes the report as RFC 4180 CSV. Absent means are empty cells.
pub fn export_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(CSV_HEADER)?;
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in &report.rows {
        w.write_record([
            row.params_summary.clone(),
            row.n_services.to_string(),
            row.total_leads.to_string(),
            cell(row.avg_cd),
            row.interesting_count.to_string(),
            cell(row.avg_interestingness),
            cell(row.wall_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-language reading of a lead's recognition bits.
pub fn explain(lead: &Lead) -> String {
    let (a, b) = lead.pair();
    let r = &lead.recognition;
    let mut parts = Vec::new();
    if r.state_dep {
        parts.push(format!("{a} and {b} are active at the same time and place"));
    }
    if r.people_dep {
        parts.push("they are used by the same person".to_string());
    }
    let arrow = match r.direction {
        Direction::Forward => format!("{a} -> {b}"),
        Direction::Backward => format!("{b} -> {a}"),
        Direction::Both => format!("{a} <-> {b}"),
        Direction::None => String::new(),
    };
    if r.env_dep {
        parts.push(format!("effects of one establish conditions of the other ({arrow})"));
    }
    if r.ope_comp {
        parts.push(format!("outputs of one match inputs of the other ({arrow})"));
    }
    if parts.is_empty() {
        "no dependency recognized".to_string()
    } else {
        parts.join("; ")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReviewSummary {
    pub accepted: usize,
    pub rejected: usize,
    pub marked_known: usize,
    pub skipped: usize,
}

/// Walks the interesting leads one at a time and applies the reviewer's
/// answer: `a` accept, `r` reject, `k` mark known, `s` skip, `q` quit.
/// End of input ends the session. Leads in any other status are untouched.
pub fn review_session<R: BufRead, W: Write>(
    leads: &mut [Lead],
    registry: &mut NoveltyRegistry,
    mut input: R,
    mut out: W,
) -> Result<ReviewSummary> {
    let mut summary = ReviewSummary::default();
    let pending: Vec<usize> =
        leads.iter().enumerate().filter(|(_, l)| l.status == LeadStatus::Interesting).map(|(i, _)| i).collect();
    let total = pending.len();
    'leads: for (n, &i) in pending.iter().enumerate() {
        let lead = &mut leads[i];
        render(&mut out, lead, n + 1, total)?;
        loop {
            write!(out, "[a]ccept [r]eject [k]nown [s]kip [q]uit > ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                break 'leads;
            }
            let decision = match line.trim() {
                "a" | "accept" => ReviewDecision::Accept,
                "r" | "reject" => ReviewDecision::Reject,
                "k" | "known" => ReviewDecision::MarkKnown,
                "s" | "skip" => {
                    summary.skipped += 1;
                    continue 'leads;
                }
                "q" | "quit" => break 'leads,
                other => {
                    writeln!(out, "unrecognized answer {other:?}")?;
                    continue;
                }
            };
            review_apply(lead, decision, registry)?;
            match decision {
                ReviewDecision::Accept => summary.accepted += 1,
                ReviewDecision::Reject => summary.rejected += 1,
                ReviewDecision::MarkKnown => summary.marked_known += 1,
            }
            continue 'leads;
        }
    }
    Ok(summary)
}

fn render<W: Write>(out: &mut W, lead: &Lead, n: usize, total: usize) -> Result<()> {
    let r = &lead.recognition;
    let s = &lead.scores;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
    let flag = |v: Option<bool>| v.map(|b| u8::from(b).to_string()).unwrap_or_else(|| "-".into());
    writeln!(out, "\n--- lead {n}/{total}: {} + {}", lead.service_a, lead.service_b)?;
    writeln!(
        out,
        "state={} env={} people={} ope={} direction={:?}",
        u8::from(r.state_dep),
        u8::from(r.env_dep),
        u8::from(r.people_dep),
        u8::from(r.ope_comp),
        r.direction
    )?;
    writeln!(
        out,
        "cd={:.2} sim={} dc={} div={} act={} nov={} interestingness={}",
        s.cd,
        opt(s.sim),
        opt(s.dc),
        opt(s.div),
        flag(s.act),
        flag(s.nov),
        opt(s.interestingness)
    )?;
    writeln!(out, "{}", explain(lead))?;
    Ok(())
}
