use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use normlab_core::blocks::InstanceKind;
use normlab_core::explorer::{
    hunt, read_reports, run_sweep, write_reports, write_summary_csv, ParamGrid, ReportFile, SearchConfig, SearchResult,
    SpectrumLaw, Summary, SweepConfig, SweepTarget,
};
use normlab_core::norms::NormSelector;
use normlab_core::suite::Status;
use normlab_core::Error;

const EXIT_PASS: u8 = 0;
const EXIT_RUNTIME: u8 = 1;
const EXIT_PROVEN_CANDIDATE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(
    name = "normlab",
    version,
    about = "Randomized checks of norm inequalities for matrix geometric means"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one target on seeded instances of a single shape.
    Verify(VerifyArgs),
    /// Run a sweep described by a JSON configuration file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random search with local refinement over the t-chain.
    Hunt(HuntArgs),
    /// Print the summary of a report file and optionally export it as CSV.
    Show {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// main, geo-z, t-chain, commuting or lemmas.
    #[arg(long)]
    chain: SweepTarget,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    r: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    t: Vec<f64>,
    #[arg(long, default_value = "kyfan:all,schatten:1,schatten:2,schatten:inf")]
    norms: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 1e8)]
    cap: f64,
    /// Lower end of the loguniform eigenvalue law.
    #[arg(long, default_value_t = 0.1)]
    lo: f64,
    #[arg(long, default_value_t = 10.0)]
    hi: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HuntArgs {
    /// JSON search configuration; replaces every other option except --out.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    s_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    s_hi: f64,
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    /// Upper end of the t range; defaults to --t.
    #[arg(long)]
    t_hi: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    refine: usize,
    #[arg(long, default_value_t = 0.05)]
    refine_scale: f64,
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, default_value_t = 3)]
    m_max: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::InvalidSpectrumLaw(_)
            | Error::InvalidSpec(_)
            | Error::HypothesisViolation(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn verify_config(a: &VerifyArgs) -> Result<SweepConfig, Failure> {
    let norms = NormSelector::parse_list(&a.norms)?;
    Ok(SweepConfig {
        n_values: vec![a.n],
        m_values: vec![a.m],
        instance_count: a.count,
        base_seed: a.seed,
        generator: if a.chain == SweepTarget::Commuting {
            InstanceKind::Commuting
        } else {
            InstanceKind::Generic
        },
        spectrum_law: SpectrumLaw::Loguniform { lo: a.lo, hi: a.hi },
        param_grid: ParamGrid {
            s: a.s.clone(),
            r: a.r.clone(),
            p: a.p.clone(),
            t: a.t.clone(),
        },
        norms,
        tol_rel: a.tol,
        condition_cap: a.cap,
        chains: vec![a.chain],
    })
}

fn print_summary(summary: &Summary) {
    println!(
        "{:<22} {:<10} {:>8} {:>8} {:>6} {:>6} {:>6} {:>14}",
        "target", "norm", "records", "pass", "fail", "gated", "cand", "min_margin"
    );
    for row in &summary.rows {
        let margin = row.min_margin.map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
        println!(
            "{:<22} {:<10} {:>8} {:>8} {:>6} {:>6} {:>6} {:>14}",
            row.target, row.norm_class, row.records, row.pass, row.fail, row.gated, row.candidates, margin
        );
    }
    println!(
        "total: {} records, {} pass, {} fail, {} gated, {} candidates ({} proven regime), {} evaluation errors",
        summary.records,
        summary.pass,
        summary.fail,
        summary.gated,
        summary.candidates,
        summary.proven_candidates,
        summary.failures
    );
}

fn summary_exit(summary: &Summary) -> u8 {
    if summary.proven_candidates > 0 {
        EXIT_PROVEN_CANDIDATE
    } else if summary.failures > 0 {
        EXIT_RUNTIME
    } else {
        EXIT_PASS
    }
}

fn print_search(res: &SearchResult) {
    let margin = res.min_margin.map_or_else(|| "-".to_string(), |m| format!("{m:.6e}"));
    println!(
        "samples {} | gated {} | errors {} | refinements kept {} | min normalized margin {}",
        res.samples_evaluated, res.gated_count, res.failure_count, res.refine_accepted, margin
    );
    if let Some(arg) = &res.argmin {
        println!(
            "argmin: sample {} n={} m={} s={} r={} p={} t={} norm={} ({:?})",
            arg.sample_index,
            arg.instance.n,
            arg.instance.m,
            arg.params.s,
            arg.params.r,
            arg.params.p,
            arg.params.t,
            arg.norm,
            arg.status
        );
    }
    if res.violation_candidate {
        println!("violation candidate survived the extended-precision re-check");
    }
}

fn search_exit(res: &SearchResult) -> u8 {
    let proven = res.argmin.as_ref().is_some_and(|a| a.status == Status::Proven);
    if res.violation_candidate && proven {
        EXIT_PROVEN_CANDIDATE
    } else {
        EXIT_PASS
    }
}

fn finish_reports(cfg: &SweepConfig, out: Option<&PathBuf>) -> Result<u8, Failure> {
    let rs = run_sweep(cfg)?;
    print_summary(&rs.summary);
    let code = summary_exit(&rs.summary);
    if let Some(path) = out {
        write_reports(&ReportFile::Reports(rs), path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(code)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Verify(args) => {
            let cfg = verify_config(&args)?;
            finish_reports(&cfg, args.out.as_ref())
        }
        Command::Sweep { config, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg: SweepConfig =
                serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
            finish_reports(&cfg, out.as_ref())
        }
        Command::Hunt(args) => {
            let cfg = match &args.config {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
                }
                None => {
                    let mut cfg = SearchConfig::new(
                        args.n_max,
                        args.m_max,
                        [args.s_lo, args.s_hi],
                        [args.t, args.t_hi.unwrap_or(args.t)],
                        args.samples,
                        args.seed,
                    );
                    cfg.refine_steps = args.refine;
                    cfg.refine_scale = args.refine_scale;
                    cfg
                }
            };
            let res = hunt(&cfg)?;
            print_search(&res);
            println!("wall time {:.2}s", res.wall_seconds);
            let code = search_exit(&res);
            if let Some(path) = &args.out {
                write_reports(&ReportFile::Search(res), path).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(code)
        }
        Command::Show { input, csv } => match read_reports(&input)? {
            ReportFile::Reports(rs) => {
                print_summary(&rs.summary);
                if let Some(path) = csv {
                    write_summary_csv(&rs.summary, &path)?;
                }
                Ok(summary_exit(&rs.summary))
            }
            ReportFile::Search(res) => {
                if csv.is_some() {
                    return Err(Failure::Config(
                        "--csv needs a sweep report, not a search result".into(),
                    ));
                }
                print_search(&res);
                Ok(search_exit(&res))
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
