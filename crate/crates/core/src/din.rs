//! Default Insurance Note terms, coverage sizing, payouts and the
//! underwriter's side of the contract.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::portfolio::{ReturnPortfolio, BREAK_EVEN};

/// Coverage required to meet Tier 1/Tier 2 reserve maintenance (percent).
pub const COVERAGE_FLOOR_PCT: f64 = 2.88;
/// Working coverage level (percent).
pub const COVERAGE_WORKING_PCT: f64 = 3.88;

#[derive(Debug, Error, PartialEq)]
pub enum DinError {
    #[error("invalid DIN terms: {0}")]
    Terms(String),
    #[error("insured face is zero, gross return undefined")]
    ZeroFace,
    #[error("bank rate must be non-negative, got {0}")]
    NegativeRate(f64),
    #[error("unknown premium base {0:?}")]
    UnknownPremiumBase(String),
}

/// What the annual premium rate is charged on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PremiumBase {
    /// Rate × insured face, every year the contract is live.
    FaceAnnual,
    /// Rate × loan principal, every year the contract is live.
    PrincipalAnnual,
    /// Rate × loan principal, once at origination.
    PrincipalUpfront,
}

impl PremiumBase {
    pub const ALL: [PremiumBase; 3] = [
        PremiumBase::FaceAnnual,
        PremiumBase::PrincipalAnnual,
        PremiumBase::PrincipalUpfront,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PremiumBase::FaceAnnual => "face-annual",
            PremiumBase::PrincipalAnnual => "principal-annual",
            PremiumBase::PrincipalUpfront => "principal-upfront",
        }
    }
}

impl fmt::Display for PremiumBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PremiumBase {
    type Err = DinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "face-annual" => Ok(PremiumBase::FaceAnnual),
            "principal-annual" => Ok(PremiumBase::PrincipalAnnual),
            "principal-upfront" => Ok(PremiumBase::PrincipalUpfront),
            _ => Err(DinError::UnknownPremiumBase(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DinTerms {
    /// Fraction of each loan's principal that is insured.
    pub coverage_fraction: f64,
    pub coverage_floor: f64,
    /// Premium per year (or once, for the upfront base), as a fraction.
    pub premium_rate: f64,
    pub premium_base: PremiumBase,
    /// Year in which failing investments are resolved and DINs pay.
    pub payoff_year: u32,
    pub term_years: u32,
}

impl Default for DinTerms {
    fn default() -> Self {
        Self {
            coverage_fraction: COVERAGE_WORKING_PCT / 100.0,
            coverage_floor: COVERAGE_FLOOR_PCT / 100.0,
            premium_rate: 0.05,
            premium_base: PremiumBase::FaceAnnual,
            payoff_year: 5,
            term_years: 10,
        }
    }
}

impl DinTerms {
    pub fn validate(&self) -> Result<(), DinError> {
        let bad = |m: String| Err(DinError::Terms(m));
        if !(self.coverage_floor >= 0.0) || !(self.coverage_fraction <= 1.0) {
            return bad(format!(
                "coverage must lie in [0, 1], got floor {} fraction {}",
                self.coverage_floor, self.coverage_fraction
            ));
        }
        if !(self.coverage_fraction >= self.coverage_floor) {
            return bad(format!(
                "coverage {} is below the floor {}",
                self.coverage_fraction, self.coverage_floor
            ));
        }
        if self.payoff_year == 0 || self.payoff_year > self.term_years {
            return bad(format!(
                "payoff year {} must lie in 1..={}",
                self.payoff_year, self.term_years
            ));
        }
        if !(self.premium_rate >= 0.0) {
            return bad(format!("premium rate {} is negative", self.premium_rate));
        }
        Ok(())
    }

    /// Coverage as a multiple of the reserve floor.
    pub fn coverage_ratio(&self) -> f64 {
        self.coverage_fraction / self.coverage_floor
    }

    /// Validates the terms and reports the coverage ratio.
    pub fn check(&self) -> Result<TermsReport, DinError> {
        self.validate()?;
        Ok(TermsReport {
            coverage_pct: self.coverage_fraction * 100.0,
            floor_pct: self.coverage_floor * 100.0,
            coverage_ratio: self.coverage_ratio(),
        })
    }

    /// Last year in which a fund with this multiple pays premiums.
    pub fn last_premium_year(&self, multiple: f64) -> u32 {
        if defaults(multiple) {
            self.payoff_year
        } else {
            self.term_years
        }
    }

    /// Premiums one loan pays over its life, per unit of insured face.
    pub fn premium_per_face(&self, multiple: f64) -> f64 {
        match self.premium_base {
            PremiumBase::FaceAnnual => self.premium_rate * self.last_premium_year(multiple) as f64,
            PremiumBase::PrincipalAnnual => {
                self.premium_rate * self.last_premium_year(multiple) as f64 / self.coverage_fraction
            }
            PremiumBase::PrincipalUpfront => self.premium_rate / self.coverage_fraction,
        }
    }

    /// Premium owed on one loan in `year` (0 = origination).
    pub fn premium_due(&self, principal: f64, multiple: f64, year: u32) -> f64 {
        match self.premium_base {
            PremiumBase::PrincipalUpfront => {
                if year == 0 {
                    self.premium_rate * principal
                } else {
                    0.0
                }
            }
            PremiumBase::FaceAnnual | PremiumBase::PrincipalAnnual => {
                if year == 0 || year > self.last_premium_year(multiple) {
                    return 0.0;
                }
                let base = if self.premium_base == PremiumBase::FaceAnnual {
                    self.coverage_fraction * principal
                } else {
                    principal
                };
                self.premium_rate * base
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermsReport {
    pub coverage_pct: f64,
    pub floor_pct: f64,
    pub coverage_ratio: f64,
}

/// A fund defaults when it returns less than break-even; exactly 1.0 never does.
pub fn defaults(multiple: f64) -> bool {
    multiple < BREAK_EVEN
}

/// DIN payout on one loan: the shortfall below break-even, capped at the
/// insured face. `principal` is expected to be positive.
pub fn din_payout(principal: f64, multiple: f64, terms: &DinTerms) -> f64 {
    if !defaults(multiple) {
        return 0.0;
    }
    let shortfall = (BREAK_EVEN - multiple) * principal;
    shortfall.min(terms.coverage_fraction * principal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMethod {
    SigmaClamp,
    BreakevenClamp,
}

impl CoverageMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoverageMethod::SigmaClamp => "sigma-clamp",
            CoverageMethod::BreakevenClamp => "breakeven-clamp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageAssessment {
    pub method: CoverageMethod,
    /// Funds strictly above this multiple were reset to break-even.
    pub threshold: f64,
    pub clamp_loss: f64,
    pub recommended_coverage: f64,
}

impl CoverageAssessment {
    fn from_clamp(
        method: CoverageMethod,
        p: &ReturnPortfolio,
        threshold: f64,
        floor_pct: f64,
    ) -> Self {
        let clamped = p.clamped_mean(threshold);
        let clamp_loss = ((BREAK_EVEN - clamped) * 100.0).max(0.0);
        Self {
            method,
            threshold,
            clamp_loss,
            recommended_coverage: floor_pct + clamp_loss,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.4},{:.4}",
            self.method.as_str(),
            self.clamp_loss,
            self.recommended_coverage
        )
    }
}

pub const COVERAGE_CSV_HEADER: &str = "method,clamp_loss_pct,recommended_pct";

/// Coverage sized from the loss left after resetting funds more than one
/// standard deviation above break-even.
pub fn coverage_sigma_method(p: &ReturnPortfolio, floor_pct: f64) -> CoverageAssessment {
    let sigma = p.stats().stddev;
    CoverageAssessment::from_clamp(CoverageMethod::SigmaClamp, p, BREAK_EVEN + sigma, floor_pct)
}

/// Coverage sized from the loss left after resetting every winner to break-even.
pub fn coverage_breakeven_method(p: &ReturnPortfolio, floor_pct: f64) -> CoverageAssessment {
    CoverageAssessment::from_clamp(CoverageMethod::BreakevenClamp, p, BREAK_EVEN, floor_pct)
}

/// Total premium flow per year (index 0..=term_years) across a portfolio of
/// equally sized loans. Shared by both sides of the contract.
pub fn premium_schedule(
    p: &ReturnPortfolio,
    terms: &DinTerms,
    principal_per_fund: f64,
) -> Vec<f64> {
    (0..=terms.term_years)
        .map(|year| {
            p.funds()
                .iter()
                .map(|&m| terms.premium_due(principal_per_fund, m, year))
                .sum()
        })
        .collect()
}

/// Total DIN payouts per year (index 0..=term_years); non-zero only in the
/// payoff year.
pub fn payout_schedule(p: &ReturnPortfolio, terms: &DinTerms, principal_per_fund: f64) -> Vec<f64> {
    let mut out = vec![0.0; terms.term_years as usize + 1];
    out[terms.payoff_year as usize] = p
        .funds()
        .iter()
        .map(|&m| din_payout(principal_per_fund, m, terms))
        .sum();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UnderwriterYear {
    pub year: u32,
    pub premium_income: f64,
    pub payouts: f64,
    pub carry_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnderwriterResult {
    pub yearly: Vec<UnderwriterYear>,
    pub insured_face: f64,
    /// (premiums − payouts − carry) ÷ insured face; break-even at 0.
    pub gross_return: f64,
}

impl UnderwriterResult {
    pub fn total_premiums(&self) -> f64 {
        self.yearly.iter().map(|y| y.premium_income).sum()
    }

    pub fn total_payouts(&self) -> f64 {
        self.yearly.iter().map(|y| y.payouts).sum()
    }

    pub fn total_carry(&self) -> f64 {
        self.yearly.iter().map(|y| y.carry_cost).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,premium_income,payouts,carry_cost\n");
        for y in &self.yearly {
            writeln!(
                out,
                "{},{},{},{}",
                y.year, y.premium_income, y.payouts, y.carry_cost
            )
            .unwrap();
        }
        writeln!(
            out,
            "total,{},{},{}",
            self.total_premiums(),
            self.total_payouts(),
            self.total_carry()
        )
        .unwrap();
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "gross_return={}\nreturn_base=insured_face\ninsured_face={}\n",
            self.gross_return, self.insured_face
        )
    }
}

/// Underwriter P&L on a book of DINs written against `p`. Payouts are
/// financed at `bank_rate` (fraction) from the payoff year to term end,
/// compounding annually.
pub fn underwriter_ledger(
    p: &ReturnPortfolio,
    terms: &DinTerms,
    bank_rate: f64,
    principal_per_fund: f64,
) -> Result<UnderwriterResult, DinError> {
    terms.validate()?;
    if !(bank_rate >= 0.0) {
        return Err(DinError::NegativeRate(bank_rate));
    }
    let insured_face = terms.coverage_fraction * principal_per_fund * p.len() as f64;
    if !(insured_face > 0.0) {
        return Err(DinError::ZeroFace);
    }
    let premiums = premium_schedule(p, terms, principal_per_fund);
    let payouts = payout_schedule(p, terms, principal_per_fund);

    let mut financed = 0.0;
    let mut yearly = Vec::with_capacity(premiums.len());
    for (year, (&premium_income, &paid)) in premiums.iter().zip(&payouts).enumerate() {
        let carry_cost = financed * bank_rate;
        financed += carry_cost + paid;
        yearly.push(UnderwriterYear {
            year: year as u32,
            premium_income,
            payouts: paid,
            carry_cost,
        });
    }
    let mut result = UnderwriterResult {
        yearly,
        insured_face,
        gross_return: 0.0,
    };
    // Loans are equally sized, so the return on the whole face is the mean
    // of per-loan returns. Working per unit of face keeps the no-failure
    // case exact (premium_rate × term).
    let face_per_fund = terms.coverage_fraction * principal_per_fund;
    let per_loan: f64 = p
        .funds()
        .iter()
        .map(|&m| {
            terms.premium_per_face(m) - din_payout(principal_per_fund, m, terms) / face_per_fund
        })
        .sum();
    result.gross_return = per_loan / p.len() as f64 - result.total_carry() / insured_face;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(v: &[f64]) -> ReturnPortfolio {
        ReturnPortfolio::new("t", v.to_vec()).unwrap()
    }

    #[test]
    fn payout_examples() {
        let t = DinTerms::default();
        assert_eq!(din_payout(100.0, 1.2, &t), 0.0);
        assert_eq!(din_payout(100.0, 1.0, &t), 0.0);
        assert!((din_payout(100.0, 0.5, &t) - 3.88).abs() < 1e-12);
        assert!((din_payout(100.0, 0.99, &t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coverage_hand_examples() {
        let p = pf(&[0.2, 0.9, 3.6]);
        let s = coverage_sigma_method(&p, 2.88);
        assert!((s.threshold - 2.466).abs() < 1e-3);
        assert!((s.clamp_loss - 30.0).abs() < 1e-9);
        assert!((s.recommended_coverage - 32.88).abs() < 1e-9);
        let b = coverage_breakeven_method(&p, 2.88);
        assert!((b.clamp_loss - 30.0).abs() < 1e-9);
        assert!((b.recommended_coverage - 32.88).abs() < 1e-9);

        let flat = pf(&[1.0; 4]);
        assert_eq!(coverage_sigma_method(&flat, 2.88).clamp_loss, 0.0);
        assert_eq!(
            coverage_breakeven_method(&flat, 2.88).recommended_coverage,
            2.88
        );
        let winners = pf(&[1.0, 1.5, 3.0]);
        assert_eq!(
            coverage_breakeven_method(&winners, 2.88).recommended_coverage,
            2.88
        );
    }

    #[test]
    fn terms_validation_and_ratio() {
        let r = DinTerms::default().check().unwrap();
        assert!((r.coverage_ratio - 1.347).abs() < 1e-3);
        let mut t = DinTerms::default();
        t.coverage_fraction = 0.02;
        assert!(t.validate().is_err());
        t = DinTerms {
            payoff_year: 11,
            ..Default::default()
        };
        assert!(t.validate().is_err());
        t = DinTerms {
            payoff_year: 0,
            ..Default::default()
        };
        assert!(t.validate().is_err());
        t = DinTerms {
            premium_rate: -0.01,
            ..Default::default()
        };
        assert!(t.validate().is_err());
    }

    #[test]
    fn premium_base_parsing() {
        for b in PremiumBase::ALL {
            assert_eq!(b.as_str().parse::<PremiumBase>().unwrap(), b);
        }
        assert_eq!(
            "FACE_ANNUAL".parse::<PremiumBase>().unwrap(),
            PremiumBase::FaceAnnual
        );
        assert!("weekly".parse::<PremiumBase>().is_err());
    }

    #[test]
    fn all_survivors_earn_ten_years_of_premium() {
        let t = DinTerms::default();
        for rate in [0.0, 0.03, 0.2] {
            let r = underwriter_ledger(&pf(&[1.0, 1.2, 3.0]), &t, rate, 10.0).unwrap();
            assert!((r.gross_return - 0.5).abs() < 1e-12);
            assert_eq!(r.total_payouts(), 0.0);
        }
    }

    #[test]
    fn single_total_loss_hand_ledger() {
        let r = underwriter_ledger(&pf(&[0.0]), &DinTerms::default(), 0.0, 1.0).unwrap();
        assert!((r.gross_return + 0.75).abs() < 1e-12);
        assert_eq!(r.yearly.len(), 11);
        assert!(r.yearly[6].premium_income == 0.0);
        assert!((r.yearly[5].payouts - 0.0388).abs() < 1e-15);
    }

    #[test]
    fn carry_compounds_from_payoff_year() {
        let t = DinTerms::default();
        let r = underwriter_ledger(&pf(&[0.0]), &t, 0.1, 1.0).unwrap();
        let face = 0.0388;
        assert!((r.total_carry() - face * (1.1f64.powi(5) - 1.0)).abs() < 1e-15);
        assert_eq!(r.yearly[5].carry_cost, 0.0);
        assert!((r.yearly[6].carry_cost - face * 0.1).abs() < 1e-15);
    }

    #[test]
    fn upfront_premium_paid_once() {
        let t = DinTerms {
            premium_base: PremiumBase::PrincipalUpfront,
            ..Default::default()
        };
        let s = premium_schedule(&pf(&[0.5, 2.0]), &t, 10.0);
        assert_eq!(s[0], 1.0);
        assert!(s[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn zero_face_and_negative_rate() {
        let t = DinTerms::default();
        assert_eq!(
            underwriter_ledger(&pf(&[1.0]), &t, 0.0, 0.0).unwrap_err(),
            DinError::ZeroFace
        );
        assert!(matches!(
            underwriter_ledger(&pf(&[1.0]), &t, -0.01, 1.0),
            Err(DinError::NegativeRate(_))
        ));
    }
}
