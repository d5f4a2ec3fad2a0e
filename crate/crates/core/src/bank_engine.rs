//! Ten-year cash-flow ledger of a venture bank whose insured investment
//! loans must also be fully funded with interbank borrowing.
//!
//! Year 0 invests `moc × original_capital`, split equally across the funds,
//! and borrows the same amount. Each following year the debt compounds at
//! the bank rate and DIN premiums are borrowed on top. Failing funds
//! (multiple < 1) are resolved in the payoff year: their residual value and
//! the DIN payout pay down debt. Surviving funds pay out at the horizon.
//! Debt paid below zero becomes surplus cash earning `surplus_rate`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::din::{self, DinError, DinTerms};
use crate::portfolio::ReturnPortfolio;

#[derive(Debug, Error, PartialEq)]
pub enum BankError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error(transparent)]
    Din(#[from] DinError),
    #[error("invalid bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error(
        "final multiple crosses break-even {crossings} times in [{lo}, {hi}]; not monotone in rate"
    )]
    NonMonotone { lo: f64, hi: f64, crossings: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub original_capital: f64,
    /// Outstanding investments as a multiple of original capital.
    pub moc: f64,
    pub portfolio: ReturnPortfolio,
    pub din_terms: DinTerms,
    /// Interbank funding rate, fraction per year.
    pub bank_rate: f64,
    pub horizon_years: u32,
    /// Rate earned on surplus cash, fraction per year.
    pub surplus_rate: f64,
}

impl ScenarioConfig {
    pub fn new(portfolio: ReturnPortfolio, moc: f64, bank_rate: f64, din_terms: DinTerms) -> Self {
        Self {
            original_capital: 1.0,
            moc,
            portfolio,
            horizon_years: din_terms.term_years,
            din_terms,
            bank_rate,
            surplus_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), BankError> {
        self.din_terms.validate()?;
        let bad = |m: String| Err(BankError::Config(m));
        if !(self.moc > 0.0) || !self.moc.is_finite() {
            return bad(format!("moc must be positive, got {}", self.moc));
        }
        if !(self.original_capital > 0.0) || !self.original_capital.is_finite() {
            return bad(format!(
                "original capital must be positive, got {}",
                self.original_capital
            ));
        }
        if !(self.bank_rate >= 0.0) || !self.bank_rate.is_finite() {
            return bad(format!(
                "bank rate must be non-negative, got {}",
                self.bank_rate
            ));
        }
        if !(self.surplus_rate >= 0.0) || !self.surplus_rate.is_finite() {
            return bad(format!(
                "surplus rate must be non-negative, got {}",
                self.surplus_rate
            ));
        }
        if self.horizon_years != self.din_terms.term_years {
            return bad(format!(
                "horizon {} differs from DIN term {}",
                self.horizon_years, self.din_terms.term_years
            ));
        }
        Ok(())
    }

    pub fn invested(&self) -> f64 {
        self.moc * self.original_capital
    }

    pub fn principal_per_fund(&self) -> f64 {
        self.invested() / self.portfolio.len() as f64
    }

    pub fn with_rate(&self, bank_rate: f64) -> Self {
        Self {
            bank_rate,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LedgerRow {
    pub year: u32,
    pub interest_accrued: f64,
    pub premiums_paid: f64,
    pub din_receipts: f64,
    pub exit_proceeds: f64,
    pub surplus_interest: f64,
    pub debt_balance_end: f64,
    pub surplus_end: f64,
    /// Original capital plus surplus cash minus debt; unrealized
    /// investments are not counted.
    pub equity_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BankLedger {
    pub rows: Vec<LedgerRow>,
}

impl BankLedger {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("year,interest,premiums,din_receipts,exit_proceeds,debt,equity\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.year,
                r.interest_accrued,
                r.premiums_paid,
                r.din_receipts,
                r.exit_proceeds,
                r.debt_balance_end,
                r.equity_estimate
            )
            .unwrap();
        }
        out
    }

    pub fn premiums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.premiums_paid).collect()
    }

    pub fn din_receipts(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.din_receipts).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BankResult {
    /// Final equity over original capital; break-even at 1.0.
    pub final_multiple: f64,
    pub survived: bool,
    /// First year in which equity, with open investments carried at cost,
    /// was negative. Informational only.
    pub first_underwater_year: Option<u32>,
    pub ledger: BankLedger,
}

impl BankResult {
    pub fn summary(&self, cfg: &ScenarioConfig) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
        kv("portfolio", cfg.portfolio.label.clone());
        kv("funds", cfg.portfolio.len().to_string());
        kv("moc", cfg.moc.to_string());
        kv("original_capital", cfg.original_capital.to_string());
        kv("bank_rate", cfg.bank_rate.to_string());
        kv("surplus_rate", cfg.surplus_rate.to_string());
        kv(
            "coverage_fraction",
            cfg.din_terms.coverage_fraction.to_string(),
        );
        kv("premium_rate", cfg.din_terms.premium_rate.to_string());
        kv("premium_base", cfg.din_terms.premium_base.to_string());
        kv("payoff_year", cfg.din_terms.payoff_year.to_string());
        kv("horizon_years", cfg.horizon_years.to_string());
        kv("final_multiple", self.final_multiple.to_string());
        kv("survived", self.survived.to_string());
        kv(
            "first_underwater_year",
            self.first_underwater_year
                .map_or_else(|| "none".to_string(), |y| y.to_string()),
        );
        out
    }
}

pub fn simulate_bank(cfg: &ScenarioConfig) -> Result<BankResult, BankError> {
    cfg.validate()?;
    let terms = &cfg.din_terms;
    let horizon = cfg.horizon_years;
    let capital = cfg.original_capital;
    let principal = cfg.principal_per_fund();
    let funds = cfg.portfolio.funds();

    let premiums = din::premium_schedule(&cfg.portfolio, terms, principal);
    let receipts = din::payout_schedule(&cfg.portfolio, terms, principal);
    let failed_residual: f64 = funds
        .iter()
        .filter(|m| din::defaults(**m))
        .map(|m| m * principal)
        .sum();
    let survivor_proceeds: f64 = funds
        .iter()
        .filter(|m| !din::defaults(**m))
        .map(|m| m * principal)
        .sum();
    let failed_count = funds.iter().filter(|m| din::defaults(**m)).count() as f64;

    let mut rows = Vec::with_capacity(horizon as usize + 1);
    let mut debt = cfg.invested() + premiums[0];
    let mut surplus = 0.0;
    let mut outstanding_principal = cfg.invested();
    let mut first_underwater_year = None;
    rows.push(LedgerRow {
        year: 0,
        premiums_paid: premiums[0],
        debt_balance_end: debt,
        equity_estimate: capital - debt,
        ..Default::default()
    });

    for year in 1..=horizon {
        let surplus_interest = surplus * cfg.surplus_rate;
        surplus += surplus_interest;
        let interest_accrued = debt * cfg.bank_rate;
        debt += interest_accrued;
        let premiums_paid = premiums[year as usize];
        debt += premiums_paid;

        let din_receipts = receipts[year as usize];
        let mut exit_proceeds = 0.0;
        if year == terms.payoff_year {
            exit_proceeds += failed_residual;
            outstanding_principal -= failed_count * principal;
        }
        if year == horizon {
            exit_proceeds += survivor_proceeds;
            outstanding_principal = 0.0;
        }
        debt -= din_receipts + exit_proceeds;
        if debt < 0.0 {
            surplus -= debt;
            debt = 0.0;
        } else if surplus > 0.0 {
            let applied = surplus.min(debt);
            surplus -= applied;
            debt -= applied;
        }

        let equity_estimate = capital + surplus - debt;
        if first_underwater_year.is_none() && equity_estimate + outstanding_principal.max(0.0) < 0.0
        {
            first_underwater_year = Some(year);
        }
        rows.push(LedgerRow {
            year,
            interest_accrued,
            premiums_paid,
            din_receipts,
            exit_proceeds,
            surplus_interest,
            debt_balance_end: debt,
            surplus_end: surplus,
            equity_estimate,
        });
    }

    let final_equity = capital + surplus - debt;
    let final_multiple = final_equity / capital;
    Ok(BankResult {
        final_multiple,
        survived: final_multiple >= 1.0,
        first_underwater_year,
        ledger: BankLedger { rows },
    })
}

/// Rate tolerance of the break-even solve.
pub const BREAK_EVEN_RATE_TOL: f64 = 1e-6;
const BRACKET_SCAN_STEPS: usize = 64;

/// Bank rate (fraction) at which the final multiple equals 1.0, searched in
/// `[lo, hi]`. `None` when the bracket shows no crossing.
pub fn break_even_rate(cfg: &ScenarioConfig, lo: f64, hi: f64) -> Result<Option<f64>, BankError> {
    if !(lo < hi) || !(lo >= 0.0) || !hi.is_finite() {
        return Err(BankError::Bracket { lo, hi });
    }
    let excess = |rate: f64| -> Result<f64, BankError> {
        Ok(simulate_bank(&cfg.with_rate(rate))?.final_multiple - 1.0)
    };

    let step = (hi - lo) / BRACKET_SCAN_STEPS as f64;
    let grid: Vec<f64> = (0..=BRACKET_SCAN_STEPS)
        .map(|i| {
            if i == BRACKET_SCAN_STEPS {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect();
    let values = grid
        .iter()
        .map(|&r| excess(r))
        .collect::<Result<Vec<_>, _>>()?;

    let mut crossings = Vec::new();
    for i in 0..BRACKET_SCAN_STEPS {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            if i == 0 || values[i - 1] != 0.0 {
                crossings.push((grid[i], grid[i]));
            }
        } else if (a > 0.0) != (b > 0.0) && b != 0.0 {
            crossings.push((grid[i], grid[i + 1]));
        }
    }
    if values[BRACKET_SCAN_STEPS] == 0.0 && values[BRACKET_SCAN_STEPS - 1] != 0.0 {
        crossings.push((hi, hi));
    }
    match crossings.len() {
        0 => Ok(None),
        1 => {
            let (mut a, mut b) = crossings[0];
            if a == b {
                return Ok(Some(a));
            }
            let mut fa = excess(a)?;
            while b - a > BREAK_EVEN_RATE_TOL {
                let mid = 0.5 * (a + b);
                let fm = excess(mid)?;
                if fm == 0.0 {
                    return Ok(Some(mid));
                }
                if (fm > 0.0) == (fa > 0.0) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            Ok(Some(0.5 * (a + b)))
        }
        n => Err(BankError::NonMonotone {
            lo,
            hi,
            crossings: n,
        }),
    }
}
