//! Acceptance criteria. Each test prints one PASS/FAIL line; run with
//! `cargo test -p svcmine --test acceptance -- --nocapture` to see them.

mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force, compare, OracleConfig};
use svcmine::harness::{export_csv, run_experiment, SweepPoint};
use svcmine::mining::{lead_order, review_apply, write_leads, LeadStatus, ReviewDecision};
use svcmine::model::{interval_overlap, within_radius, StateKind};
use svcmine::recognition::{recognize, RecognitionVector};
use svcmine::scoring::{
    correlation_degree, diversity, domain_correlation, interestingness, jaccard, lambda_from_r0, Concept,
    ConfigOverrides, ExactMatch,
};
use svcmine::{
    generate_repository, mine, GeneratorParams, MiningConfig, NoveltyRegistry, RepositoryFile, VerifierStrategy,
};

// sqrt(0.1) and 0.6 + 0.4 * sqrt(0.1), evaluated with 40 significant digits.
const SQRT_TENTH: &str = "0.3162277660168379331998893544432718533720";
const INTEREST_AT_SQRT_TENTH: &str = "0.7264911064067351732799557417773087413488";
// 99th percentile of the chi-squared distribution with 9 degrees of freedom.
const CHI2_99_DF9: f64 = 21.665994333461924;

fn criterion(id: u32, title: &str, budget: Option<Duration>, check: impl FnOnce() -> Result<String, String>) {
    let started = Instant::now();
    let outcome = check();
    let elapsed = started.elapsed();
    let outcome = match (outcome, budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:?}, budget {b:?}")),
        (o, _) => o,
    };
    match outcome {
        Ok(detail) => println!("AC{id} PASS  {title} ({detail}; {:.2?})", elapsed),
        Err(why) => {
            println!("AC{id} FAIL  {title}: {why}");
            panic!("AC{id} failed: {why}");
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn ac1_domain_correlation_anchor() {
    criterion(1, "DC anchor and lambda0 round trip", Some(Duration::from_secs(1)), || {
        let cfg = MiningConfig::default();
        let dc0 = domain_correlation(0.0, &cfg).map_err(|e| e.to_string())?;
        ensure((dc0 - 0.1).abs() <= 1e-12, || format!("DC(0) = {dc0}"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let r0: f64 = rng.random_range(0.01..0.99);
            let lambda0 = lambda_from_r0(r0).map_err(|e| e.to_string())?;
            let err = ((-1.0 / lambda0).exp() - r0).abs();
            worst = worst.max(err);
            let cfg = MiningConfig::default().with(&ConfigOverrides { r0: Some(r0), ..Default::default() }).unwrap();
            let anchor = domain_correlation(0.0, &cfg).unwrap();
            ensure((anchor - r0).abs() <= 1e-12, || format!("DC(0) = {anchor} for r0 = {r0}"))?;
        }
        ensure(worst <= 1e-12, || format!("worst round-trip error {worst:e}"))?;
        Ok(format!("worst round-trip error {worst:.1e}"))
    });
}

#[test]
fn ac2_closed_form_spot_values() {
    criterion(2, "closed-form DC, Div and interestingness", None, || {
        let cfg = MiningConfig::default();
        let sqrt_tenth: f64 = SQRT_TENTH.parse().unwrap();
        let want_interest: f64 = INTEREST_AT_SQRT_TENTH.parse().unwrap();
        let dc1 = domain_correlation(1.0, &cfg).unwrap();
        ensure((dc1 - sqrt_tenth).abs() <= 1e-9, || format!("DC(1) = {dc1}"))?;
        let div = diversity(dc1, &cfg).unwrap();
        ensure((div - sqrt_tenth).abs() <= 1e-9, || format!("Div(DC(1)) = {div}"))?;
        let score = interestingness(true, true, sqrt_tenth, &cfg).unwrap();
        ensure((score - want_interest).abs() <= 1e-6, || format!("interestingness = {score}"))?;
        Ok(format!("DC(1) = {dc1:.10}, interestingness = {score:.7}"))
    });
}

#[test]
fn ac3_cd_subset_sums() {
    criterion(3, "CD takes the 16 subset sums; zeta = 0.5 is inclusive", None, || {
        let cfg = MiningConfig::default();
        let tenths = [1u32, 2, 3, 4];
        let mut passing = 0;
        for mask in 0u32..16 {
            let bits = [0, 1, 2, 3].map(|i| mask & (1 << i) != 0);
            let v = RecognitionVector::from_bits(bits[0], bits[1], bits[2], bits[3]);
            let cd = correlation_degree(&v, &cfg);
            let exact: u32 = (0..4).filter(|&i| bits[i]).map(|i| tenths[i]).sum();
            ensure((cd - exact as f64 / 10.0).abs() < 1e-12, || format!("mask {mask:04b}: cd {cd} vs {exact}/10"))?;
            let passes = cd >= cfg.zeta();
            ensure(passes == (exact >= 5), || format!("mask {mask:04b}: cd {cd} filter {passes}"))?;
            passing += usize::from(passes);
        }
        // {0.1,0.4} and {0.2,0.3} sit exactly on the threshold and pass.
        Ok(format!("{passing} of 16 vectors reach sum >= 0.5 and pass"))
    });
}

#[test]
fn ac4_oracle_equivalence() {
    criterion(4, "mine equals brute force on 50 repositories of 15", Some(Duration::from_secs(10)), || {
        let cfg = MiningConfig::default();
        let mut pairs = 0;
        for seed in 0..50u64 {
            let repo = generate_repository(&GeneratorParams::with_services(15, 1000 + seed)).unwrap();
            let leads = mine(&repo, &cfg, &NoveltyRegistry::new(), &VerifierStrategy::AlwaysTrue).unwrap();
            let oracle = brute_force(&repo, &OracleConfig::default(), &[]);
            compare(&leads, &oracle).map_err(|e| format!("seed {}: {e}", 1000 + seed))?;
            pairs += leads.len();
        }
        Ok(format!("{pairs} pairs matched"))
    });
}

#[test]
fn ac5_filter_collapse() {
    criterion(5, "interesting count equals CD-passing count (xi = 0.7 and 0.6)", None, || {
        let base = MiningConfig::default();
        let mut detail = Vec::new();
        for seed in 0..20u64 {
            let repo = generate_repository(&GeneratorParams::with_services(100, 500 + seed)).unwrap();
            for xi in [0.7, 0.6] {
                let cfg = base.with_xi(xi).unwrap();
                let leads = mine(&repo, &cfg, &NoveltyRegistry::new(), &VerifierStrategy::AlwaysTrue).unwrap();
                let cd_pass = leads.iter().filter(|l| l.scores.cd >= cfg.zeta()).count();
                let interesting = leads.iter().filter(|l| l.status == LeadStatus::Interesting).count();
                ensure(cd_pass == interesting, || format!("seed {seed}, xi {xi}: {interesting} vs {cd_pass}"))?;
                let min = leads.iter().filter_map(|l| l.scores.interestingness).fold(f64::INFINITY, f64::min);
                ensure(cd_pass == 0 || min >= 0.7264911, || format!("seed {seed}: min interestingness {min}"))?;
                if seed == 0 {
                    detail.push(format!("xi={xi}: {interesting}"));
                }
            }
        }
        Ok(format!("seed 0 counts {}", detail.join(", ")))
    });
}

#[test]
fn ac6_generator_conformance() {
    criterion(6, "generator bounds, token uniformity, ops mean at N = 10000", Some(Duration::from_secs(30)), || {
        let p = GeneratorParams::with_services(10_000, 2024);
        let repo = generate_repository(&p).unwrap();
        ensure(repo.len() == 10_000, || format!("{} services", repo.len()))?;
        let mut token_counts = [0u64; 10];
        let mut ops_total = 0usize;
        for s in &repo {
            let n_ops = s.operations.len();
            ensure((1..=5).contains(&n_ops), || format!("{}: {n_ops} operations", s.name))?;
            ops_total += n_ops;
            for op in &s.operations {
                ensure(op.inputs.len() <= 5 && op.outputs.len() <= 5, || format!("{}: parameter count", s.name))?;
                for param in op.inputs.iter().chain(&op.outputs) {
                    let k: usize = param.data_type[1..].parse().map_err(|_| format!("type {}", param.data_type))?;
                    ensure(k < p.type_alphabet_size, || format!("type tag {}", param.data_type))?;
                }
                for cond in [&op.precondition, &op.postcondition] {
                    ensure(cond.tokens.len() <= 3, || format!("{}: {} tokens", s.name, cond.tokens.len()))?;
                    for &t in &cond.tokens {
                        ensure(t <= 9, || format!("token {t}"))?;
                        token_counts[t as usize] += 1;
                    }
                }
            }
            let active: Vec<_> = s.states.iter().filter(|st| st.kind == StateKind::Active).collect();
            ensure(active.len() == 1, || format!("{}: {} active states", s.name, active.len()))?;
            let (start, end) = active[0].interval().map_err(|e| e.to_string())?;
            ensure(start >= 0.0 && end <= 24.0 * 3600.0 && start <= end, || format!("interval {start}..{end}"))?;
            ensure(s.people.len() == 1, || format!("{}: people", s.name))?;
            let id = &s.people.iter().next().unwrap().id;
            ensure(id.len() == 1 && id.chars().all(|c| c.is_ascii_uppercase()), || format!("person {id}"))?;
        }
        let n: u64 = token_counts.iter().sum();
        let expected = n as f64 / 10.0;
        let chi2: f64 = token_counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        ensure(chi2 < CHI2_99_DF9, || format!("chi2 {chi2:.3} over {token_counts:?}"))?;
        let mean_ops = ops_total as f64 / repo.len() as f64;
        ensure((2.8..=3.2).contains(&mean_ops), || format!("mean ops {mean_ops}"))?;
        Ok(format!("chi2 = {chi2:.2} over {n} tokens, mean ops = {mean_ops:.3}"))
    });
}

#[test]
fn ac7_determinism_and_throughput() {
    criterion(7, "byte-identical reruns; N = 500 mine under 10 s", None, || {
        let artifacts = || {
            let repo = RepositoryFile::generate(&GeneratorParams::with_services(120, 77)).unwrap();
            let leads =
                mine(&repo.services, &MiningConfig::default(), &NoveltyRegistry::new(), &VerifierStrategy::AlwaysTrue)
                    .unwrap();
            let mut leads_bytes = Vec::new();
            write_leads(&mut leads_bytes, &leads).unwrap();
            let sweep = [
                SweepPoint { generator: GeneratorParams::with_services(40, 0), ..Default::default() },
                SweepPoint {
                    label: Some("xi=0.6".into()),
                    generator: GeneratorParams::with_services(60, 0),
                    config: ConfigOverrides { xi: Some(0.6), ..Default::default() },
                },
            ];
            let report = run_experiment(&sweep, 2, 5, false).unwrap();
            let mut csv = Vec::new();
            export_csv(&report, &mut csv).unwrap();
            (repo.to_json().into_bytes(), leads_bytes, csv)
        };
        let first = artifacts();
        ensure(first == artifacts(), || "artifacts differ between runs".into())?;

        let repo = generate_repository(&GeneratorParams::with_services(500, 31)).unwrap();
        let started = Instant::now();
        let leads =
            mine(&repo, &MiningConfig::default(), &NoveltyRegistry::new(), &VerifierStrategy::AlwaysTrue).unwrap();
        let took = started.elapsed();
        ensure(leads.len() == 124_750, || format!("{} pairs", leads.len()))?;
        ensure(took < Duration::from_secs(10), || format!("N = 500 mine took {took:?}"))?;
        Ok(format!("124750 pairs in {took:.2?}"))
    });
}

#[test]
fn ac8_novelty_feedback() {
    criterion(8, "mark_known flips exactly one lead's novelty", None, || {
        let cfg = MiningConfig::default();
        let repo = generate_repository(&GeneratorParams::with_services(60, 8)).unwrap();
        let mut registry = NoveltyRegistry::new();
        let before = mine(&repo, &cfg, &registry, &VerifierStrategy::AlwaysTrue).unwrap();
        let mut target =
            before.iter().find(|l| l.status == LeadStatus::Interesting).cloned().ok_or("no interesting lead")?;
        review_apply(&mut target, ReviewDecision::MarkKnown, &mut registry).map_err(|e| e.to_string())?;
        let after = mine(&repo, &cfg, &registry, &VerifierStrategy::AlwaysTrue).unwrap();

        let index: HashMap<(String, String), &svcmine::Lead> =
            after.iter().map(|l| ((l.service_a.clone(), l.service_b.clone()), l)).collect();
        ensure(after.len() == before.len(), || "lead count changed".into())?;
        let mut changed = 0;
        for old in &before {
            let new = index[&(old.service_a.clone(), old.service_b.clone())];
            if old.pair() == target.pair() {
                ensure(old.scores.nov == Some(true) && new.scores.nov == Some(false), || "nov did not flip".into())?;
                let drop = old.scores.interestingness.unwrap() - new.scores.interestingness.unwrap();
                ensure((drop - 0.3).abs() < 1e-12, || format!("interestingness dropped by {drop}"))?;
                changed += 1;
            } else {
                let (a, b) = (serde_json::to_string(old).unwrap(), serde_json::to_string(new).unwrap());
                ensure(a == b, || format!("lead {:?} changed", old.pair()))?;
            }
        }
        ensure(changed == 1, || format!("{changed} target leads"))?;
        Ok(format!("lead {:?} dropped by w2 = 0.3", target.pair()))
    });
}

#[test]
fn ac9_invariants() {
    criterion(9, "module invariants on seeded random inputs", None, || {
        let cfg = MiningConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checks = 0usize;

        // predicate symmetry and purity on generated pairs, plus the
        // single-location reduction of the state predicate
        let repo = generate_repository(&GeneratorParams::with_services(40, 99)).unwrap();
        for (i, x) in repo.iter().enumerate() {
            for y in &repo[i + 1..] {
                let xy = recognize(x, y, &cfg).unwrap();
                let yx = recognize(y, x, &cfg).unwrap();
                ensure(xy.bits() == yx.bits(), || format!("asymmetric bits for {} {}", x.name, y.name))?;
                ensure(xy.direction == yx.direction.reversed(), || "direction does not mirror".into())?;
                ensure(xy == recognize(x, y, &cfg).unwrap(), || "recognize not deterministic".into())?;
                let ax = x.states.iter().find(|s| s.kind == StateKind::Active).unwrap();
                let ay = y.states.iter().find(|s| s.kind == StateKind::Active).unwrap();
                ensure(xy.state_dep == interval_overlap(ax, ay).unwrap(), || "state != overlap".into())?;
                ensure(interval_overlap(ax, ay).unwrap() == interval_overlap(ay, ax).unwrap(), || "overlap".into())?;
                checks += 5;
            }
        }

        // spatial symmetry with equal radii
        for _ in 0..500 {
            let r = rng.random_range(1.0..5000.0);
            let p = svcmine::model::Location::new(rng.random_range(-89.0..89.0), rng.random_range(-179.0..179.0), r)
                .unwrap();
            let q = svcmine::model::Location::new(
                (p.lat + rng.random_range(-0.05..0.05)).clamp(-90.0, 90.0),
                (p.lon + rng.random_range(-0.05..0.05)).clamp(-180.0, 180.0),
                r,
            )
            .unwrap();
            ensure(within_radius(&p, &q).unwrap() == within_radius(&q, &p).unwrap(), || "radius asymmetry".into())?;
            checks += 1;
        }

        // Jaccard bounds
        for _ in 0..500 {
            let mut set = || -> std::collections::BTreeSet<Concept> {
                (0..rng.random_range(0..6)).map(|_| Concept::Token(rng.random_range(0..8))).collect()
            };
            let (a, b) = (set(), set());
            let j = jaccard(&ExactMatch, &a, &b);
            ensure((0.0..=1.0).contains(&j), || format!("jaccard {j}"))?;
            ensure((j == 1.0) == (a == b && !a.is_empty()), || format!("jaccard {j} for {a:?} {b:?}"))?;
            checks += 1;
        }

        // DC strictly increasing on [0, 1]; Div in [sqrt(r0), 1]
        let r0 = cfg.r0();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let sim = i as f64 / 1000.0;
            let dc = domain_correlation(sim, &cfg).unwrap();
            ensure(dc > prev, || format!("DC not increasing at {sim}"))?;
            ensure(dc >= r0 * (1.0 - 1e-12) && dc <= r0.sqrt() * (1.0 + 1e-12), || format!("DC {dc} out of range"))?;
            let div = diversity(dc, &cfg).unwrap();
            ensure(div >= r0.sqrt() * (1.0 - 1e-12) && div <= 1.0, || format!("Div {div} out of range"))?;
            prev = dc;
            checks += 1;
        }

        // status transitions: exactly the pipeline moves are legal
        use LeadStatus::*;
        let all = [Candidate, FilteredCd, FilteredInterest, Interesting, Accepted, Rejected, Known];
        let legal = [
            (Candidate, FilteredCd),
            (Candidate, FilteredInterest),
            (Candidate, Interesting),
            (Interesting, Accepted),
            (Interesting, Rejected),
            (Interesting, Known),
        ];
        for from in all {
            for to in all {
                ensure(from.can_transition_to(to) == legal.contains(&(from, to)), || format!("{from} -> {to}"))?;
                checks += 1;
            }
        }

        // mined output: full pair coverage, nested filters, canonical order
        let leads = mine(&repo, &cfg, &NoveltyRegistry::new(), &VerifierStrategy::AlwaysTrue).unwrap();
        ensure(leads.len() == 40 * 39 / 2, || "pair coverage".into())?;
        for l in &leads {
            ensure(l.service_a < l.service_b, || "canonical order".into())?;
            if l.status == Interesting {
                ensure(l.scores.cd >= cfg.zeta(), || "interesting lead below zeta".into())?;
            }
        }
        ensure(leads.windows(2).all(|w| lead_order(&w[0], &w[1]).is_le()), || "sort order".into())?;
        checks += leads.len();
        Ok(format!("{checks} checks"))
    });
}
