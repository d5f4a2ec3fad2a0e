//! Flat `key=value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! seed=42
//! targets=1.10,1.31,1.50
//! mocs=30,43
//! grid=0.53:7.50:0.25
//! compress=true
//! original_capital=1
//! coverage_pct=3.88
//! coverage_floor_pct=2.88
//! premium_rate_pct=5
//! premium_base=calibrated      # or face-annual | principal-annual | principal-upfront
//! payoff_year=5
//! term_years=10
//! surplus_rate_pct=0
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::bank_engine::ScenarioConfig;
use crate::din::{DinTerms, PremiumBase, COVERAGE_FLOOR_PCT, COVERAGE_WORKING_PCT};
use crate::portfolio::ReturnPortfolio;
use crate::sweep::{DEFAULT_GRID, DEFAULT_MOCS, DEFAULT_TARGETS};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: bad value for {key}: {value:?}")]
    Value {
        line: usize,
        key: String,
        value: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub targets: Vec<f64>,
    pub mocs: Vec<f64>,
    pub grid: String,
    /// Use the pair-compressed portfolio in the bank model.
    pub compress: bool,
    pub original_capital: f64,
    pub coverage_pct: f64,
    pub coverage_floor_pct: f64,
    pub premium_rate_pct: f64,
    /// `None` selects the calibrated premium base.
    pub premium_base: Option<PremiumBase>,
    pub payoff_year: u32,
    pub term_years: u32,
    pub surplus_rate_pct: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            targets: DEFAULT_TARGETS.to_vec(),
            mocs: DEFAULT_MOCS.to_vec(),
            grid: DEFAULT_GRID.to_string(),
            compress: true,
            original_capital: 1.0,
            coverage_pct: COVERAGE_WORKING_PCT,
            coverage_floor_pct: COVERAGE_FLOOR_PCT,
            premium_rate_pct: 5.0,
            premium_base: None,
            payoff_year: 5,
            term_years: 10,
            surplus_rate_pct: 0.0,
        }
    }
}

fn parse_list(v: &str) -> Option<Vec<f64>> {
    let out: Option<Vec<f64>> = v.split(',').map(|s| s.trim().parse().ok()).collect();
    out.filter(|l| !l.is_empty())
}

pub fn parse_premium_base(v: &str) -> Option<Option<PremiumBase>> {
    if v == "calibrated" {
        Some(None)
    } else {
        v.parse().ok().map(Some)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or(ConfigError::Syntax { line })?;
            cfg.set(key, value).map_err(|e| match e {
                SetError::Unknown => ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                },
                SetError::Value => ConfigError::Value {
                    line,
                    key: key.to_string(),
                    value: value.to_string(),
                },
            })?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), SetError> {
        fn num<T: std::str::FromStr>(v: &str) -> Result<T, SetError> {
            v.parse().map_err(|_| SetError::Value)
        }
        match key {
            "seed" => self.seed = num(value)?,
            "targets" => self.targets = parse_list(value).ok_or(SetError::Value)?,
            "mocs" => self.mocs = parse_list(value).ok_or(SetError::Value)?,
            "grid" => self.grid = value.to_string(),
            "compress" => self.compress = num(value)?,
            "original_capital" => self.original_capital = num(value)?,
            "coverage_pct" => self.coverage_pct = num(value)?,
            "coverage_floor_pct" => self.coverage_floor_pct = num(value)?,
            "premium_rate_pct" => self.premium_rate_pct = num(value)?,
            "premium_base" => {
                self.premium_base = parse_premium_base(value).ok_or(SetError::Value)?
            }
            "payoff_year" => self.payoff_year = num(value)?,
            "term_years" => self.term_years = num(value)?,
            "surplus_rate_pct" => self.surplus_rate_pct = num(value)?,
            _ => return Err(SetError::Unknown),
        }
        Ok(())
    }

    pub fn to_kv(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
        kv("seed", self.seed.to_string());
        kv("targets", list(&self.targets));
        kv("mocs", list(&self.mocs));
        kv("grid", self.grid.clone());
        kv("compress", self.compress.to_string());
        kv("original_capital", self.original_capital.to_string());
        kv("coverage_pct", self.coverage_pct.to_string());
        kv("coverage_floor_pct", self.coverage_floor_pct.to_string());
        kv("premium_rate_pct", self.premium_rate_pct.to_string());
        kv(
            "premium_base",
            self.premium_base
                .map_or_else(|| "calibrated".to_string(), |b| b.to_string()),
        );
        kv("payoff_year", self.payoff_year.to_string());
        kv("term_years", self.term_years.to_string());
        kv("surplus_rate_pct", self.surplus_rate_pct.to_string());
        out
    }

    pub fn din_terms(&self, base: PremiumBase) -> DinTerms {
        DinTerms {
            coverage_fraction: self.coverage_pct / 100.0,
            coverage_floor: self.coverage_floor_pct / 100.0,
            premium_rate: self.premium_rate_pct / 100.0,
            premium_base: base,
            payoff_year: self.payoff_year,
            term_years: self.term_years,
        }
    }

    pub fn scenario(
        &self,
        portfolio: ReturnPortfolio,
        moc: f64,
        bank_rate: f64,
        base: PremiumBase,
    ) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::new(portfolio, moc, bank_rate, self.din_terms(base));
        cfg.original_capital = self.original_capital;
        cfg.surplus_rate = self.surplus_rate_pct / 100.0;
        cfg
    }
}

enum SetError {
    Unknown,
    Value,
}
