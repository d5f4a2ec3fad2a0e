//! Interest-rate sweeps across portfolios and leverage levels.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bank_engine::{simulate_bank, BankError, ScenarioConfig};
use crate::din::{underwriter_ledger, DinError};
use crate::market_data::funds_rate;
use crate::portfolio::{
    compress_pairs, shift_to_mean, synthesize_kauffman, KauffmanConstraints, PortfolioError,
    ReturnPortfolio,
};

/// Historical LIBOR span used for the default grid: low 0.53, high 7.50.
pub const DEFAULT_GRID: &str = "0.53:7.50:0.25";
pub const DEFAULT_TARGETS: [f64; 3] = [1.10, 1.31, 1.50];
pub const DEFAULT_MOCS: [f64; 2] = [30.0, 43.0];
const MAX_RATE_PCT: f64 = 50.0;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("rate grid: {0}")]
    Grid(String),
    #[error("duplicate scenario key ({label}, moc {moc})")]
    DuplicateKey { label: String, moc: f64 },
    #[error("scenario ({label}, moc {moc}) at {rate_pct}%: {message}")]
    Scenario {
        label: String,
        moc: f64,
        rate_pct: f64,
        message: String,
    },
    #[error(transparent)]
    Portfolio(#[from] PortfolioError),
    #[error("sweep csv line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

/// Parses `lo:hi:step` into an ascending grid including both endpoints; a
/// final partial step is clamped to `hi`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, SweepError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| SweepError::Grid(format!("cannot parse {spec:?}")))?;
    let grid = match nums.as_slice() {
        [single] => vec![*single],
        [lo, hi, step] => {
            if !(step > &0.0) || !(lo <= hi) {
                return Err(SweepError::Grid(format!(
                    "need lo <= hi and step > 0 in {spec:?}"
                )));
            }
            let mut out = Vec::new();
            let mut i = 0u32;
            loop {
                let x = round_grid(lo + step * f64::from(i));
                if x >= *hi - 1e-9 {
                    break;
                }
                out.push(x);
                i += 1;
            }
            out.push(*hi);
            out
        }
        _ => {
            return Err(SweepError::Grid(format!(
                "expected lo:hi:step or a single rate, got {spec:?}"
            )))
        }
    };
    validate_grid(&grid)?;
    Ok(grid)
}

fn round_grid(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

pub fn validate_grid(grid: &[f64]) -> Result<(), SweepError> {
    if grid.is_empty() {
        return Err(SweepError::Grid("grid is empty".into()));
    }
    if grid.iter().any(|r| !(0.0..=MAX_RATE_PCT).contains(r)) {
        return Err(SweepError::Grid("rates must lie in [0, 50]".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SweepError::Grid("rates must be strictly ascending".into()));
    }
    Ok(())
}

/// The compressed reference portfolio and its shifted variants, labelled by
/// target mean (`"1.31"` etc.).
#[derive(Debug, Clone)]
pub struct ReferencePortfolios {
    pub seed: u64,
    pub base: ReturnPortfolio,
    pub shifted: Vec<ReturnPortfolio>,
}

pub fn target_label(target: f64) -> String {
    format!("{target:.2}")
}

pub fn reference_portfolios(
    seed: u64,
    targets: &[f64],
    compress: bool,
) -> Result<ReferencePortfolios, PortfolioError> {
    let synth = synthesize_kauffman(&KauffmanConstraints::default(), seed)?;
    let base = if compress {
        compress_pairs(&synth.portfolio)?
    } else {
        synth.portfolio
    };
    let shifted = targets
        .iter()
        .map(|&t| shift_to_mean(&base, t).map(|p| p.with_label(target_label(t))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReferencePortfolios {
        seed,
        base,
        shifted,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub portfolio_label: String,
    pub moc: f64,
    /// Grid rate (LIBOR, percent).
    pub libor_pct: f64,
    /// Funding rate actually charged (percent).
    pub bank_rate_pct: f64,
    pub bank_multiple: f64,
    pub underwriter_return: f64,
    pub survived: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub config_digest: String,
    pub seed: Option<u64>,
    pub generated_at: String,
}

impl Provenance {
    pub fn line(&self) -> String {
        format!(
            "config_digest={} seed={} generated_at={}",
            self.config_digest,
            self.seed.map_or_else(|| "none".into(), |s| s.to_string()),
            self.generated_at
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub provenance: Provenance,
}

pub const SWEEP_CSV_HEADER: &str =
    "portfolio,moc,libor_pct,bank_rate_pct,bank_multiple,underwriter_return,survived";

impl SweepTable {
    /// Curves keyed by (portfolio, moc), in table order.
    pub fn curves(&self) -> Vec<((String, f64), Vec<&SweepRow>)> {
        let mut out: Vec<((String, f64), Vec<&SweepRow>)> = Vec::new();
        for row in &self.rows {
            match out.last_mut() {
                Some((key, rows)) if key.0 == row.portfolio_label && key.1 == row.moc => {
                    rows.push(row)
                }
                _ => out.push(((row.portfolio_label.clone(), row.moc), vec![row])),
            }
        }
        out
    }

    /// Deterministic CSV body; provenance is kept out of it.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.portfolio_label,
                r.moc,
                r.libor_pct,
                r.bank_rate_pct,
                r.bank_multiple,
                r.underwriter_return,
                r.survived
            )
            .unwrap();
        }
        out
    }

    pub fn from_csv(text: &str, provenance: Provenance) -> Result<Self, SweepError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == SWEEP_CSV_HEADER => {}
            _ => {
                return Err(SweepError::Parse {
                    line: 1,
                    message: "unexpected header".into(),
                })
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| SweepError::Parse {
                line: i + 1,
                message,
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad(format!("expected 7 fields, got {}", f.len())));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| bad(format!("bad number {s:?}")))
            };
            rows.push(SweepRow {
                portfolio_label: f[0].to_string(),
                moc: num(f[1])?,
                libor_pct: num(f[2])?,
                bank_rate_pct: num(f[3])?,
                bank_multiple: num(f[4])?,
                underwriter_return: num(f[5])?,
                survived: f[6]
                    .parse::<bool>()
                    .map_err(|_| bad(format!("bad flag {:?}", f[6])))?,
            });
        }
        Ok(Self { rows, provenance })
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), SweepError> {
        fs::write(path, self.to_csv())
            .map_err(|e| SweepError::Io(format!("{}: {e}", path.display())))
    }
}

/// Digest over everything that determines a sweep's numbers.
pub fn config_digest(configs: &[ScenarioConfig], grid: &[f64]) -> String {
    let mut h = Sha256::new();
    for c in configs {
        let t = &c.din_terms;
        h.update(format!(
            "{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}\n",
            c.portfolio.label,
            c.moc,
            c.original_capital,
            c.surplus_rate,
            c.horizon_years,
            t.coverage_fraction,
            t.coverage_floor,
            t.premium_rate,
            t.premium_base,
            t.payoff_year,
            t.term_years
        ));
        for m in c.portfolio.funds() {
            h.update(m.to_bits().to_le_bytes());
        }
    }
    for r in grid {
        h.update(r.to_bits().to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Runs every config at every grid rate. Grid rates are LIBOR percentages;
/// each is converted to the bank's funding rate before simulation. The
/// `bank_rate` stored in each config is ignored.
pub fn run_sweep(
    configs: &[ScenarioConfig],
    rate_grid: &[f64],
    seed: Option<u64>,
) -> Result<SweepTable, SweepError> {
    validate_grid(rate_grid)?;
    let mut keys: Vec<(String, f64)> = configs
        .iter()
        .map(|c| (c.portfolio.label.clone(), c.moc))
        .collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
        return Err(SweepError::DuplicateKey {
            label: w[0].0.clone(),
            moc: w[0].1,
        });
    }

    let jobs: Vec<(&ScenarioConfig, f64)> = configs
        .iter()
        .flat_map(|c| rate_grid.iter().map(move |&r| (c, r)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(cfg, libor_pct)| evaluate(cfg, libor_pct))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| {
        a.portfolio_label
            .cmp(&b.portfolio_label)
            .then(a.moc.total_cmp(&b.moc))
            .then(a.libor_pct.total_cmp(&b.libor_pct))
    });
    Ok(SweepTable {
        rows,
        provenance: Provenance {
            config_digest: config_digest(configs, rate_grid),
            seed,
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        },
    })
}

fn evaluate(cfg: &ScenarioConfig, libor_pct: f64) -> Result<SweepRow, SweepError> {
    let fail = |message: String| SweepError::Scenario {
        label: cfg.portfolio.label.clone(),
        moc: cfg.moc,
        rate_pct: libor_pct,
        message,
    };
    let bank_rate_pct = funds_rate(libor_pct).map_err(|e| fail(e.to_string()))?;
    let scenario = cfg.with_rate(bank_rate_pct / 100.0);
    let bank = simulate_bank(&scenario).map_err(|e: BankError| fail(e.to_string()))?;
    let uw = underwriter_ledger(
        &scenario.portfolio,
        &scenario.din_terms,
        scenario.bank_rate,
        scenario.principal_per_fund(),
    )
    .map_err(|e: DinError| fail(e.to_string()))?;
    Ok(SweepRow {
        portfolio_label: cfg.portfolio.label.clone(),
        moc: cfg.moc,
        libor_pct,
        bank_rate_pct,
        bank_multiple: bank.final_multiple,
        underwriter_return: uw.gross_return,
        survived: bank.survived,
    })
}
