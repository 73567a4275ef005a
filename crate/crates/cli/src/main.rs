use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use svcmine::harness::{export_csv, review_session, run_experiment, SweepPoint};
use svcmine::mining::{read_leads, write_leads};
use svcmine::schema::validate_repository_text;
use svcmine::scoring::ConfigOverrides;
use svcmine::{mine, GeneratorParams, MiningConfig, NoveltyRegistry, RepositoryFile, VerifierStrategy};

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "svcmine", version, about = "Mine composition leads among IoT services")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic service repository.
    Generate {
        #[arg(long)]
        services: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Generator parameters; --services and --seed override it.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Score every service pair and write the leads as JSON lines.
    Mine {
        #[arg(long)]
        repo: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Known compositions; a missing file is treated as empty.
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        zeta: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long, default_value = "always_true")]
        verifier: String,
    },
    /// Accept, reject or mark known the interesting leads, one at a time.
    Review {
        #[arg(long)]
        leads: PathBuf,
        #[arg(long)]
        registry: PathBuf,
    },
    /// Run a parameter sweep and write a CSV report.
    Experiment {
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Record wall time per row (makes the report non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Check a repository against the schema and the model invariants.
    Validate {
        #[arg(long)]
        repo: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Generate { services, seed, out, params } => {
            let base = match params {
                Some(p) => serde_json::from_str(&read(&p)?).with_context(|| format!("parsing {}", p.display()))?,
                None => GeneratorParams::default(),
            };
            let params = GeneratorParams { n_services: services, seed, ..base };
            let repo = RepositoryFile::generate(&params)?;
            repo.save(&out).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("wrote {} services to {}", repo.services.len(), out.display());
        }
        Command::Mine { repo, config, registry, out, zeta, xi, verifier } => {
            let file_overrides: ConfigOverrides = match config {
                Some(p) => serde_json::from_str(&read(&p)?).with_context(|| format!("parsing {}", p.display()))?,
                None => ConfigOverrides::default(),
            };
            let flags = ConfigOverrides { zeta, xi, ..Default::default() };
            let cfg = MiningConfig::default().with(&file_overrides.merged(&flags))?;
            let verifier: VerifierStrategy = verifier.parse()?;
            let registry = match registry {
                Some(p) => NoveltyRegistry::load(&p).with_context(|| format!("loading {}", p.display()))?,
                None => NoveltyRegistry::new(),
            };
            let repo =
                RepositoryFile::from_json(&read(&repo)?).with_context(|| format!("parsing {}", repo.display()))?;
            let leads = mine(&repo.services, &cfg, &registry, &verifier)?;
            let mut w = create(&out)?;
            write_leads(&mut w, &leads)?;
            w.flush()?;
            let interesting = leads.iter().filter(|l| l.status == svcmine::LeadStatus::Interesting).count();
            eprintln!("{} pairs, {} interesting, written to {}", leads.len(), interesting, out.display());
        }
        Command::Review { leads: leads_path, registry: registry_path } => {
            let file = File::open(&leads_path).with_context(|| format!("opening {}", leads_path.display()))?;
            let mut leads =
                read_leads(BufReader::new(file)).with_context(|| format!("parsing {}", leads_path.display()))?;
            let mut registry = NoveltyRegistry::load(&registry_path)
                .with_context(|| format!("loading {}", registry_path.display()))?;
            let stdin = io::stdin();
            let summary = review_session(&mut leads, &mut registry, stdin.lock(), io::stdout().lock())?;
            let mut w = create(&leads_path)?;
            write_leads(&mut w, &leads)?;
            w.flush()?;
            registry.save(&registry_path)?;
            eprintln!(
                "accepted {}, rejected {}, marked known {}, skipped {}",
                summary.accepted, summary.rejected, summary.marked_known, summary.skipped
            );
        }
        Command::Experiment { sweep, reps, seed, out, timing } => {
            let points =
                SweepPoint::parse_sweep(&read(&sweep)?).with_context(|| format!("parsing {}", sweep.display()))?;
            if reps == 0 {
                bail!("--reps must be at least 1");
            }
            let report = run_experiment(&points, reps, seed, timing)?;
            let mut w = create(&out)?;
            export_csv(&report, &mut w)?;
            w.flush()?;
            eprintln!("{} rows written to {}", report.rows.len(), out.display());
        }
        Command::Validate { repo } => {
            let (_, violations) =
                validate_repository_text(&read(&repo)?).with_context(|| format!("parsing {}", repo.display()))?;
            if violations.is_empty() {
                println!("{}: ok", repo.display());
            } else {
                for v in &violations {
                    println!("{v}");
                }
                eprintln!("{} violation(s)", violations.len());
                return Ok(ExitCode::from(EXIT_VALIDATION));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
