//! `vbank` command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::bank_engine::{break_even_rate, simulate_bank};
use crate::calibration::{calibrate, Anchors, Calibration, RateReading};
use crate::config::{parse_premium_base, RunConfig};
use crate::din::{
    coverage_breakeven_method, coverage_sigma_method, underwriter_ledger, PremiumBase,
    COVERAGE_CSV_HEADER, COVERAGE_FLOOR_PCT,
};
use crate::market_data::{funds_rate, load_libor_csv, snapshot_path, window_stats_years};
use crate::portfolio::{
    metadata_block, read_portfolio_csv, synthesize_kauffman, write_portfolio_csv,
    KauffmanConstraints,
};
use crate::report::{emit_report, ReportKind};
use crate::sweep::{parse_grid, reference_portfolios, run_sweep, target_label};

#[derive(Debug, Parser)]
#[command(
    name = "vbank",
    version,
    about = "Venture-bank double-coverage simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a FRED LIBOR export and print window statistics.
    Ingest(IngestArgs),
    /// Synthesize a fund-return portfolio matching target summary statistics.
    Synth(SynthArgs),
    /// Size DIN coverage on a portfolio file with both clamp methods.
    Coverage(CoverageArgs),
    /// Run one bank scenario and write its ledgers.
    Simulate(SimulateArgs),
    /// Solve for the break-even funding rate.
    Breakeven(BreakevenArgs),
    /// Sweep rates across portfolios and leverage; write CSV and SVG reports.
    Sweep(SweepArgs),
    /// Score premium-base / rate-reading modes against the reference points.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// FRED CSV export (defaults to the bundled snapshot).
    #[arg(long)]
    file: Option<PathBuf>,
    /// Year windows as FIRST:LAST; repeatable.
    #[arg(long = "window")]
    windows: Vec<String>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "kauffman.csv")]
    out: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    mean: Option<f64>,
    #[arg(long)]
    stddev: Option<f64>,
    #[arg(long)]
    sigma_loss_pct: Option<f64>,
    #[arg(long)]
    breakeven_loss_pct: Option<f64>,
}

#[derive(Debug, Args)]
struct CoverageArgs {
    #[arg(long)]
    portfolio: PathBuf,
    #[arg(long, default_value_t = COVERAGE_FLOOR_PCT)]
    floor_pct: f64,
}

/// Model options shared by the scenario commands; each overrides the
/// config file when given.
#[derive(Debug, Args)]
struct ModelArgs {
    /// key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    coverage_pct: Option<f64>,
    #[arg(long)]
    floor_pct: Option<f64>,
    #[arg(long)]
    premium_rate_pct: Option<f64>,
    /// face-annual | principal-annual | principal-upfront | calibrated
    #[arg(long)]
    premium_base: Option<String>,
    #[arg(long)]
    payoff_year: Option<u32>,
    #[arg(long)]
    term_years: Option<u32>,
    #[arg(long)]
    capital: Option<f64>,
    #[arg(long)]
    surplus_rate_pct: Option<f64>,
    /// Use the full (uncompressed) synthesized portfolio.
    #[arg(long)]
    no_compress: bool,
}

impl ModelArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read config {}", path.display()))?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.coverage_pct {
            cfg.coverage_pct = v;
        }
        if let Some(v) = self.floor_pct {
            cfg.coverage_floor_pct = v;
        }
        if let Some(v) = self.premium_rate_pct {
            cfg.premium_rate_pct = v;
        }
        if let Some(v) = &self.premium_base {
            cfg.premium_base =
                parse_premium_base(v).ok_or_else(|| anyhow!("unknown premium base {v:?}"))?;
        }
        if let Some(v) = self.payoff_year {
            cfg.payoff_year = v;
        }
        if let Some(v) = self.term_years {
            cfg.term_years = v;
        }
        if let Some(v) = self.capital {
            cfg.original_capital = v;
        }
        if let Some(v) = self.surplus_rate_pct {
            cfg.surplus_rate_pct = v;
        }
        if self.no_compress {
            cfg.compress = false;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Portfolio CSV; otherwise the synthesized reference shifted to --target.
    #[arg(long)]
    portfolio: Option<PathBuf>,
    #[arg(long, default_value_t = 1.31)]
    target: f64,
    #[arg(long, default_value_t = 30.0)]
    moc: f64,
    /// Bank funding rate in percent.
    #[arg(long, conflicts_with = "libor_pct")]
    rate_pct: Option<f64>,
    /// LIBOR in percent; the bank pays LIBOR + 0.25.
    #[arg(long)]
    libor_pct: Option<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct BreakevenArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    portfolio: Option<PathBuf>,
    #[arg(long, default_value_t = 1.31)]
    target: f64,
    #[arg(long, default_value_t = 30.0)]
    moc: f64,
    #[arg(long, default_value_t = 0.5)]
    lo_pct: f64,
    #[arg(long, default_value_t = 7.5)]
    hi_pct: f64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// LIBOR grid lo:hi:step (percent), endpoints inclusive.
    #[arg(long)]
    grid: Option<String>,
    /// Comma-separated MOC values.
    #[arg(long)]
    mocs: Option<String>,
    /// Comma-separated target mean multiples.
    #[arg(long)]
    targets: Option<String>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", one_line(&e));
            1
        }
    }
}

/// Joins the error chain, dropping causes already quoted by their parent.
fn one_line(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !out.contains(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out.replace('\n', " ")
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest(a) => ingest(a),
        Command::Synth(a) => synth(a),
        Command::Coverage(a) => coverage(a),
        Command::Simulate(a) => simulate(a),
        Command::Breakeven(a) => breakeven(a),
        Command::Sweep(a) => sweep(a),
        Command::Calibrate(a) => calibrate_cmd(a),
    }
}

fn ingest(a: IngestArgs) -> Result<()> {
    let path = a.file.unwrap_or_else(snapshot_path);
    let series = load_libor_csv(&path)?;
    println!(
        "series={} observations={} first={} last={}",
        series.series_id,
        series.len(),
        series.first_date(),
        series.last_date()
    );
    let windows = if a.windows.is_empty() {
        vec!["1986:2016".into(), "1996:2016".into(), "2006:2016".into()]
    } else {
        a.windows
    };
    println!("window,count,median,mean,min,max");
    for w in windows {
        let (first, last) = w
            .split_once(':')
            .and_then(|(f, l)| Some((f.parse::<i32>().ok()?, l.parse::<i32>().ok()?)))
            .ok_or_else(|| anyhow!("window must be FIRST:LAST, got {w:?}"))?;
        let s = window_stats_years(&series, first, last)?;
        println!(
            "{first}-{last},{},{:.4},{:.4},{:.4},{:.4}",
            s.count, s.median, s.mean, s.min, s.max
        );
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let d = KauffmanConstraints::default();
    let c = KauffmanConstraints {
        n: a.n.unwrap_or(d.n),
        mean: a.mean.unwrap_or(d.mean),
        stddev: a.stddev.unwrap_or(d.stddev),
        sigma_clamp_loss: a.sigma_loss_pct.unwrap_or(d.sigma_clamp_loss),
        breakeven_clamp_loss: a.breakeven_loss_pct.unwrap_or(d.breakeven_clamp_loss),
    };
    let s = synthesize_kauffman(&c, a.seed)?;
    write_portfolio_csv(&s.portfolio, &a.out)?;
    let meta = a.out.with_extension("meta");
    fs::write(&meta, metadata_block(&s))
        .with_context(|| format!("cannot write {}", meta.display()))?;
    let st = s.portfolio.stats();
    println!(
        "wrote {} ({} funds, mean {:.4}, stddev {:.4}) and {}",
        a.out.display(),
        s.portfolio.len(),
        st.mean,
        st.stddev,
        meta.display()
    );
    Ok(())
}

fn coverage(a: CoverageArgs) -> Result<()> {
    let p = read_portfolio_csv(&a.portfolio)?;
    println!("{COVERAGE_CSV_HEADER}");
    println!("{}", coverage_sigma_method(&p, a.floor_pct).csv_row());
    println!("{}", coverage_breakeven_method(&p, a.floor_pct).csv_row());
    Ok(())
}

/// Premium base and rate reading to use for a run: explicit when the
/// config names a base, otherwise the calibration winner.
struct Mode {
    base: PremiumBase,
    reading: RateReading,
    calibration: Option<Calibration>,
}

fn resolve_mode(cfg: &RunConfig) -> Result<Mode> {
    let refs = reference_portfolios(cfg.seed, &[1.31], cfg.compress)?;
    let cal = calibrate(
        &refs.shifted[0],
        &cfg.din_terms(PremiumBase::FaceAnnual),
        &Anchors::default(),
    )?;
    let best = *cal.best();
    Ok(match cfg.premium_base {
        Some(base) => Mode {
            base,
            reading: best.reading,
            calibration: None,
        },
        None => Mode {
            base: best.premium_base,
            reading: best.reading,
            calibration: Some(cal),
        },
    })
}

fn scenario_portfolio(
    cfg: &RunConfig,
    path: &Option<PathBuf>,
    target: f64,
) -> Result<crate::portfolio::ReturnPortfolio> {
    match path {
        Some(p) => Ok(read_portfolio_csv(p)?),
        None => Ok(reference_portfolios(cfg.seed, &[target], cfg.compress)?
            .shifted
            .remove(0)),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let cfg = a.model.resolve()?;
    let mode = resolve_mode(&cfg)?;
    let bank_rate_pct = match (a.rate_pct, a.libor_pct) {
        (Some(r), _) => r,
        (None, Some(l)) => funds_rate(l)?,
        (None, None) => funds_rate(1.57)?,
    };
    let portfolio = scenario_portfolio(&cfg, &a.portfolio, a.target)?;
    let scenario = cfg.scenario(portfolio, a.moc, bank_rate_pct / 100.0, mode.base);
    let result = simulate_bank(&scenario)?;
    let uw = underwriter_ledger(
        &scenario.portfolio,
        &scenario.din_terms,
        scenario.bank_rate,
        scenario.principal_per_fund(),
    )?;
    ensure_dir(&a.out_dir)?;
    let ledger_path = a.out_dir.join("ledger.csv");
    let uw_path = a.out_dir.join("underwriter.csv");
    fs::write(&ledger_path, result.ledger.to_csv())?;
    fs::write(&uw_path, uw.to_csv())?;
    print!("{}", result.summary(&scenario));
    for line in uw.summary().lines() {
        println!("underwriter_{line}");
    }
    println!("ledger_csv={}", ledger_path.display());
    println!("underwriter_csv={}", uw_path.display());
    Ok(())
}

fn breakeven(a: BreakevenArgs) -> Result<()> {
    let cfg = a.model.resolve()?;
    let mode = resolve_mode(&cfg)?;
    let portfolio = scenario_portfolio(&cfg, &a.portfolio, a.target)?;
    let scenario = cfg.scenario(portfolio, a.moc, 0.0, mode.base);
    println!("premium_base={}", mode.base);
    match break_even_rate(&scenario, a.lo_pct / 100.0, a.hi_pct / 100.0)? {
        Some(r) => {
            let pct = r * 100.0;
            println!("break_even_bank_rate_pct={pct:.4}");
            println!(
                "break_even_libor_pct={:.4}",
                RateReading::Libor.quoted_pct(pct)
            );
            println!("calibrated_rate_reading={}", mode.reading);
        }
        None => println!("break_even_bank_rate_pct=none"),
    }
    Ok(())
}

fn parse_csv_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("not a number: {x:?}"))
        })
        .collect()
}

fn sweep(a: SweepArgs) -> Result<()> {
    let mut cfg = a.model.resolve()?;
    if let Some(g) = a.grid {
        cfg.grid = g;
    }
    if let Some(m) = a.mocs {
        cfg.mocs = parse_csv_list(&m)?;
    }
    if let Some(t) = a.targets {
        cfg.targets = parse_csv_list(&t)?;
    }
    if cfg.targets.is_empty() || cfg.mocs.is_empty() {
        bail!("need at least one target and one moc");
    }
    let grid = parse_grid(&cfg.grid)?;
    let mode = resolve_mode(&cfg)?;
    let refs = reference_portfolios(cfg.seed, &cfg.targets, cfg.compress)?;
    let configs: Vec<_> = refs
        .shifted
        .iter()
        .flat_map(|p| {
            cfg.mocs
                .iter()
                .map(|&moc| cfg.scenario(p.clone(), moc, 0.0, mode.base))
                .collect::<Vec<_>>()
        })
        .collect();
    let table = run_sweep(&configs, &grid, Some(cfg.seed))?;

    ensure_dir(&a.out_dir)?;
    let csv_path = a.out_dir.join("sweep.csv");
    table.write_csv(&csv_path)?;
    let (fig3, _) = emit_report(
        &table,
        ReportKind::BankMultiple,
        &a.out_dir.join("fig3.svg"),
    )?;
    let (fig4, _) = emit_report(
        &table,
        ReportKind::UnderwriterReturn,
        &a.out_dir.join("fig4.svg"),
    )?;
    let prov = a.out_dir.join("sweep.provenance.txt");
    fs::write(
        &prov,
        format!(
            "{}\npremium_base={}\n{}",
            table.provenance.line(),
            mode.base,
            cfg.to_kv()
        ),
    )?;
    if let Some(cal) = &mode.calibration {
        fs::write(a.out_dir.join("calibration.txt"), cal.report())?;
    }
    let curves = table.curves().len();
    println!(
        "wrote {} ({} rows, {curves} curves), {}, {}",
        csv_path.display(),
        table.rows.len(),
        fig3.display(),
        fig4.display()
    );
    println!(
        "premium_base={} targets={}",
        mode.base,
        cfg.targets
            .iter()
            .map(|t| target_label(*t))
            .collect::<Vec<_>>()
            .join(",")
    );
    Ok(())
}

fn calibrate_cmd(a: CalibrateArgs) -> Result<()> {
    let cfg = a.model.resolve()?;
    let refs = reference_portfolios(cfg.seed, &[1.31], cfg.compress)?;
    let cal = calibrate(
        &refs.shifted[0],
        &cfg.din_terms(PremiumBase::FaceAnnual),
        &Anchors::default(),
    )?;
    ensure_dir(&a.out_dir)?;
    let path = a.out_dir.join("calibration.txt");
    fs::write(&path, cal.report())?;
    let b = cal.best();
    println!(
        "best premium_base={} rate_reading={} moc30={:.4} moc43={:.4} uplift={:+.4} score={:.4}",
        b.premium_base, b.reading, b.multiple_moc30, b.multiple_moc43, b.uplift, b.score
    );
    println!("wrote {}", path.display());
    Ok(())
}
