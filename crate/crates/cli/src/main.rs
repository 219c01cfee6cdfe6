mod experiment;
mod failure;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tailcomb::combine::WeightVector;
use tailcomb::simulate::MinPCalibration;
use tailcomb::{
    bh_adjust, calibrate_minp, closed_test_bruteforce, closed_test_shortcut,
    estimate_equivalence_ratio, estimate_rejection_rate, tail_dependence_t, CombinationMethod,
    Distribution, ExperimentConfig,
};

use crate::experiment::{ExperimentFile, FamilyName, Scenario};
use crate::failure::Failure;
use crate::input::{open, GroupReader};
use crate::output::{Cell, Format, Table};

/// Heavy-tailed p-value combination tests, closed testing and Monte Carlo
/// experiments.
///
/// Distributions: cauchy, log_cauchy, levy, pareto:G, frechet:G, inv_gamma:G,
/// log_gamma:G, t:G, trunc_t:G:P0.
///
/// Exit codes: 0 success, 1 invalid input, 2 configuration or usage error,
/// 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "tailcomb", version, about, long_about)]
struct Cli {
    /// Seed for simulation commands; overrides the experiment file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for simulation commands [default: available cores].
    #[arg(long, global = true, env = "TAILCOMB_WORKERS")]
    workers: Option<usize>,

    /// Output file; `-` or absent writes to stdout. CSV output to a file also
    /// writes `<output>.manifest.json`.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Combine the p-values of each group (`group_id,p1,p2,...` per line).
    Combine(CombineArgs),
    /// Closed testing of the standard combination test within each group.
    ClosedTest(ClosedTestArgs),
    /// Benjamini-Hochberg adjustment across groups (one p-value per group).
    AdjustBh(AdjustArgs),
    /// Monte Carlo rejection rates (type-I error or power).
    Simulate(ExperimentArgs),
    /// Monte Carlo cutoff for the minP test.
    CalibrateMinp(ExperimentArgs),
    /// Tail dependence coefficient of the bivariate t.
    TailDep(TailDepArgs),
    /// Disagreement ratio between a weighted combination test and weighted
    /// Bonferroni with mapped weights.
    EquivRatio(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Standard,
    Average,
    Weighted,
    Bonferroni,
    Fisher,
}

fn dist_arg(s: &str) -> std::result::Result<Distribution, String> {
    s.parse::<Distribution>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct CombineArgs {
    /// Input file, `-` for stdin.
    #[arg(default_value = "-")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Standard)]
    method: MethodArg,
    #[arg(long, value_parser = dist_arg, default_value = "cauchy")]
    dist: Distribution,
    /// Comma-separated weights, one per p-value in every group.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Adds a reject column for this level.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct ClosedTestArgs {
    #[arg(default_value = "-")]
    input: PathBuf,
    #[arg(long, value_parser = dist_arg, default_value = "cauchy")]
    dist: Distribution,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Enumerate every subset instead of using the shortcut (n ≤ 20).
    #[arg(long)]
    brute_force: bool,
}

#[derive(Debug, Args)]
struct AdjustArgs {
    /// `group_id,p` per line, or a file with a `combined_p` column.
    #[arg(default_value = "-")]
    input: PathBuf,
    /// FDR levels; one discovery column each.
    #[arg(long = "q", value_delimiter = ',', default_value = "0.05")]
    q: Vec<f64>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Built-in experiment: table2a, tableS1, tableS2, tableS3, fig3, fig5.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the replication count of the experiment.
    #[arg(long)]
    replications: Option<u64>,
}

#[derive(Debug, Args)]
struct TailDepArgs {
    #[arg(long, default_value_t = 2.0)]
    nu: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,0.9,0.99")]
    rho: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(Failure::classify(&err).code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Combine(a) => combine(a, cli.format, out),
        Command::ClosedTest(a) => closed_test(a, cli.format, out),
        Command::AdjustBh(a) => adjust_bh(a, cli.format, out),
        Command::TailDep(a) => tail_dep(a, cli.format, out),
        Command::Simulate(a) | Command::CalibrateMinp(a) | Command::EquivRatio(a) => {
            let mut file = ExperimentFile::load(a.preset.as_deref(), a.config.as_deref())?;
            if let Some(r) = a.replications {
                file.replications = r;
            }
            if let Some(s) = cli.seed {
                file.seed = s;
            }
            let workers = match cli.workers {
                Some(0) => return Err(Failure::Config.msg("--workers must be at least 1")),
                Some(w) => w,
                None => std::thread::available_parallelism().map_or(1, |n| n.get()),
            };
            let table = |cmd: &str, header: &[&str]| {
                Ok::<_, anyhow::Error>(
                    Table::new(cmd, header, cli.format, out, serde_json::to_value(&file)?)?
                        .with_run(file.seed, workers),
                )
            };
            match &cli.command {
                Command::Simulate(_) => {
                    simulate(&file, workers, table("simulate", SIMULATE_HEADER)?)
                }
                Command::CalibrateMinp(_) => {
                    calibrate(&file, workers, table("calibrate-minp", MINP_HEADER)?)
                }
                _ => equiv_ratio(&file, workers, table("equiv-ratio", EQUIV_HEADER)?),
            }
        }
    }
}

fn check_level(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Failure::Config.msg(format!("{name} must lie in (0, 1), got {v}")))
    }
}

fn combine(a: &CombineArgs, format: Format, out: Option<&std::path::Path>) -> Result<()> {
    if let Some(alpha) = a.alpha {
        check_level("--alpha", alpha)?;
    }
    let weights = a
        .weights
        .clone()
        .map(WeightVector::new)
        .transpose()
        .map_err(|e| Failure::Config.wrap(e.into()))?;
    let method = |n: usize| -> Result<CombinationMethod> {
        let w = || -> Result<WeightVector<f64>> {
            match &weights {
                Some(w) if w.len() == n => Ok(w.clone()),
                Some(w) => Err(Failure::Validation
                    .msg(format!("{} weights for a group of {n} p-values", w.len()))),
                None => Err(Failure::Config.msg("--weights is required for this method")),
            }
        };
        Ok(match a.method {
            MethodArg::Standard => CombinationMethod::Standard(a.dist.clone()),
            MethodArg::Average => CombinationMethod::Average(a.dist.clone()),
            MethodArg::Weighted => CombinationMethod::Weighted(a.dist.clone(), w()?),
            MethodArg::Bonferroni => {
                CombinationMethod::Bonferroni(if weights.is_some() { Some(w()?) } else { None })
            }
            MethodArg::Fisher => CombinationMethod::Fisher,
        })
    };
    let mut header = vec![
        "group_id",
        "n",
        "method",
        "statistic",
        "combined_p",
        "kappa",
    ];
    if a.alpha.is_some() {
        header.push("reject");
    }
    let config = json!({
        "input": a.input, "method": format!("{:?}", a.method).to_lowercase(),
        "dist": a.dist.to_string(), "weights": a.weights, "alpha": a.alpha,
    });
    let mut table = Table::new("combine", &header, format, out, config)?;
    for group in GroupReader::new(open(&a.input)?) {
        let g = group?;
        let m = method(g.p.len()).map_err(|e| e.context(format!("line {}", g.line)))?;
        let r = m
            .combine(&g.p)
            .map_err(|e| anyhow::Error::new(e).context(format!("line {}", g.line)))?;
        let mut row: Vec<Cell> = vec![
            g.id.into(),
            g.p.len().into(),
            m.label().into(),
            r.statistic.into(),
            r.combined_p.into(),
            r.kappa.into(),
        ];
        if let Some(alpha) = a.alpha {
            row.push(r.rejects(alpha).into());
        }
        table.row(row)?;
    }
    table.finish()
}

fn closed_test(a: &ClosedTestArgs, format: Format, out: Option<&std::path::Path>) -> Result<()> {
    check_level("--alpha", a.alpha)?;
    let config = json!({
        "input": a.input, "dist": a.dist.to_string(), "alpha": a.alpha, "brute_force": a.brute_force,
    });
    let header = ["group_id", "index", "p", "adjusted_p", "rejected"];
    let mut table = Table::new("closed-test", &header, format, out, config)?;
    for group in GroupReader::new(open(&a.input)?) {
        let g = group?;
        let r = if a.brute_force {
            closed_test_bruteforce(&g.p, &a.dist, a.alpha)
        } else {
            closed_test_shortcut(&g.p, &a.dist, a.alpha)
        }
        .map_err(|e| anyhow::Error::new(e).context(format!("line {}", g.line)))?;
        for (i, &p) in g.p.as_slice().iter().enumerate() {
            table.row(vec![
                g.id.as_str().into(),
                (i + 1).into(),
                p.into(),
                r.adjusted_p[i].into(),
                r.rejected[i].into(),
            ])?;
        }
    }
    table.finish()
}

fn adjust_bh(a: &AdjustArgs, format: Format, out: Option<&std::path::Path>) -> Result<()> {
    for &q in &a.q {
        check_level("--q", q)?;
    }
    let mut ids = Vec::new();
    let mut p = Vec::new();
    for group in GroupReader::new(open(&a.input)?).single_value("combined_p") {
        let g = group?;
        if g.p.len() != 1 {
            return Err(Failure::Validation.msg(format!(
                "line {}: expected one p-value per group, found {}",
                g.line,
                g.p.len()
            )));
        }
        ids.push(g.id);
        p.push(g.p.as_slice()[0]);
    }
    if p.is_empty() {
        return Err(Failure::Validation.msg("no p-values in the input"));
    }
    let adjusted = bh_adjust(&tailcomb::combine::PValueVector::new(p.clone())?);
    let flags: Vec<String> = a.q.iter().map(|q| format!("discovered_{q}")).collect();
    let mut header = vec!["group_id", "p", "adjusted_p"];
    header.extend(flags.iter().map(String::as_str));
    let config = json!({ "input": a.input, "q": a.q });
    let mut table = Table::new("adjust-bh", &header, format, out, config)?;
    for ((id, p), adj) in ids.into_iter().zip(p).zip(adjusted) {
        let mut row: Vec<Cell> = vec![id.into(), p.into(), adj.into()];
        row.extend(a.q.iter().map(|&q| Cell::from(adj <= q)));
        table.row(row)?;
    }
    table.finish()
}

fn tail_dep(a: &TailDepArgs, format: Format, out: Option<&std::path::Path>) -> Result<()> {
    let config = json!({ "nu": a.nu, "rho": a.rho });
    let mut table = Table::new("tail-dep", &["nu", "rho", "lambda"], format, out, config)?;
    for &rho in &a.rho {
        let lambda = tail_dependence_t(a.nu, rho)?;
        table.row(vec![a.nu.into(), rho.into(), lambda.into()])?;
    }
    table.finish()
}

fn scenario_cells(file: &ExperimentFile, s: &Scenario) -> Vec<Cell> {
    let m = &file.model;
    vec![
        Cell::from(match m.family {
            FamilyName::Normal => "normal",
            FamilyName::StudentT => "student_t",
        }),
        m.nu.into(),
        s.n.into(),
        s.rho.into(),
        s.mu.into(),
        Cell::from(match m.sided {
            tailcomb::Sidedness::OneSided => "one_sided",
            tailcomb::Sidedness::TwoSided => "two_sided",
        }),
    ]
}

const SIMULATE_HEADER: &[&str] = &[
    "family",
    "nu",
    "n",
    "rho",
    "mu",
    "sided",
    "method",
    "alpha",
    "rejections",
    "replications",
    "estimate",
    "std_error",
    "ratio_to_alpha",
];

fn simulate(file: &ExperimentFile, workers: usize, mut table: Table) -> Result<()> {
    for s in file.scenarios()? {
        let config = ExperimentConfig {
            model: s.model.clone(),
            methods: file.methods(s.n)?,
            alphas: file.alphas.clone(),
            replications: file.replications,
            seed: file.seed,
            workers,
        };
        for row in estimate_rejection_rate(&config)?.rows {
            let mut cells = scenario_cells(file, &s);
            cells.extend([
                row.method.into(),
                row.alpha.into(),
                row.rejections.into(),
                row.replications.into(),
                row.estimate.into(),
                row.std_error.into(),
                row.ratio_to_alpha.into(),
            ]);
            table.row(cells)?;
        }
    }
    table.finish()
}

const MINP_HEADER: &[&str] = &[
    "family",
    "nu",
    "n",
    "rho",
    "mu",
    "sided",
    "alpha",
    "replications",
    "cutoff",
    "bonferroni_cutoff",
    "cutoff_ratio",
];

fn calibrate(file: &ExperimentFile, workers: usize, mut table: Table) -> Result<()> {
    for s in file.scenarios()? {
        for &alpha in &file.alphas {
            let c: MinPCalibration =
                calibrate_minp(&s.model, alpha, file.replications, file.seed, workers)?;
            if let Some(w) = &c.warning {
                eprintln!(
                    "warning: n = {}, rho = {}, alpha = {alpha}: {w}",
                    s.n, s.rho
                );
            }
            let mut cells = scenario_cells(file, &s);
            cells.extend([
                alpha.into(),
                c.replications.into(),
                c.cutoff.into(),
                (alpha / s.n as f64).into(),
                c.cutoff_ratio.into(),
            ]);
            table.row(cells)?;
        }
    }
    table.finish()
}

const EQUIV_HEADER: &[&str] = &[
    "family",
    "nu",
    "n",
    "rho",
    "mu",
    "sided",
    "dist",
    "alpha",
    "replications",
    "combination_rejections",
    "bonferroni_rejections",
    "disagreements",
    "both_reject",
    "ratio",
    "std_error",
];

fn equiv_ratio(file: &ExperimentFile, workers: usize, mut table: Table) -> Result<()> {
    let d = file.distribution()?;
    for s in file.scenarios()? {
        let config = ExperimentConfig {
            model: s.model.clone(),
            methods: Vec::new(),
            alphas: file.alphas.clone(),
            replications: file.replications,
            seed: file.seed,
            workers,
        };
        let report = estimate_equivalence_ratio(&config, &d, &file.weights(s.n)?)?;
        for row in report.rows {
            // Too few rejections leaves the ratio blank rather than failing the sweep.
            let (ratio, se) = match (row.ratio(), row.std_error()) {
                (Ok(r), Ok(se)) => (Some(r), Some(se)),
                (Err(e), _) | (_, Err(e)) => {
                    eprintln!(
                        "warning: n = {}, rho = {}, alpha = {}: {e}",
                        s.n, s.rho, row.alpha
                    );
                    (None, None)
                }
            };
            let mut cells = scenario_cells(file, &s);
            cells.extend([
                d.to_string().into(),
                row.alpha.into(),
                row.replications.into(),
                row.combination_rejections.into(),
                row.bonferroni_rejections.into(),
                row.disagreements.into(),
                row.both_reject.into(),
                ratio.into(),
                se.into(),
            ]);
            table.row(cells)?;
        }
    }
    table.finish()
}
