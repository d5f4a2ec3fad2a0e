//! Per-fund return distributions: synthesis under target summary
//! constraints, pair compression, and additive shifting.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use thiserror::Error;

/// Return multiple at which an investment exactly breaks even.
pub const BREAK_EVEN: f64 = 1.0;

#[derive(Debug, Error)]
pub enum PortfolioError {
    #[error("portfolio must contain at least one fund")]
    Empty,
    #[error("fund {index} has invalid multiple {value}")]
    InvalidMultiple { index: usize, value: f64 },
    #[error("pair compression needs at least two funds, got {0}")]
    TooSmallToCompress(usize),
    #[error("target mean {target} is infeasible: {reason}")]
    InfeasibleTarget { target: f64, reason: &'static str },
    #[error("inconsistent constraints: {0}")]
    Constraints(String),
    #[error("synthesis did not converge after {attempts} attempts: {residuals}")]
    Calibration {
        attempts: u32,
        residuals: SynthesisResiduals,
    },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

/// An ordered set of 10-year total return multiples, one per fund.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPortfolio {
    pub label: String,
    funds: Vec<f64>,
}

impl ReturnPortfolio {
    pub fn new(label: impl Into<String>, funds: Vec<f64>) -> Result<Self, PortfolioError> {
        if funds.is_empty() {
            return Err(PortfolioError::Empty);
        }
        if let Some((index, &value)) = funds
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(PortfolioError::InvalidMultiple { index, value });
        }
        Ok(Self {
            label: label.into(),
            funds,
        })
    }

    pub fn funds(&self) -> &[f64] {
        &self.funds
    }

    pub fn len(&self) -> usize {
        self.funds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funds.is_empty()
    }

    pub fn stats(&self) -> PortfolioStats {
        portfolio_stats(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Mean after resetting every fund strictly above `threshold` to break-even.
    pub fn clamped_mean(&self, threshold: f64) -> f64 {
        let sum: f64 = self
            .funds
            .iter()
            .map(|&m| if m > threshold { BREAK_EVEN } else { m })
            .sum();
        sum / self.funds.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioStats {
    pub mean: f64,
    /// Population standard deviation (divisor n).
    pub stddev: f64,
}

pub fn portfolio_stats(p: &ReturnPortfolio) -> PortfolioStats {
    let n = p.funds.len() as f64;
    let mean = p.funds.iter().sum::<f64>() / n;
    let var = p.funds.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n;
    PortfolioStats {
        mean,
        stddev: var.sqrt(),
    }
}

/// Summary statistics a synthesized portfolio must reproduce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KauffmanConstraints {
    pub n: usize,
    pub mean: f64,
    pub stddev: f64,
    /// Loss (percent) after resetting funds above `1 + stddev` to break-even.
    pub sigma_clamp_loss: f64,
    /// Loss (percent) after resetting every fund above break-even.
    pub breakeven_clamp_loss: f64,
}

impl Default for KauffmanConstraints {
    fn default() -> Self {
        Self {
            n: 99,
            mean: 1.31,
            stddev: 1.116,
            sigma_clamp_loss: 2.72,
            breakeven_clamp_loss: 17.45,
        }
    }
}

impl KauffmanConstraints {
    pub fn validate(&self) -> Result<(), PortfolioError> {
        let bad = |m: &str| Err(PortfolioError::Constraints(m.to_string()));
        if self.n < 3 {
            return bad("n must be at least 3");
        }
        if !(self.stddev >= 0.0) {
            return bad("stddev must be non-negative");
        }
        if !(0.0 <= self.sigma_clamp_loss && self.sigma_clamp_loss <= self.breakeven_clamp_loss) {
            return bad("need 0 <= sigma_clamp_loss <= breakeven_clamp_loss");
        }
        if !(self.mean >= 0.0) {
            return bad("mean must be non-negative");
        }
        Ok(())
    }
}

/// Bucket layout used by the synthesizer. The summary constraints fix each
/// bucket's total mass but not how many funds share it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisShape {
    /// Share of funds below break-even.
    pub loser_share: f64,
    /// Share of funds above `1 + stddev`.
    pub big_winner_share: f64,
    /// Lowest multiple any losing fund may take.
    pub loser_floor: f64,
}

impl Default for SynthesisShape {
    fn default() -> Self {
        Self {
            loser_share: 28.0 / 99.0,
            big_winner_share: 12.0 / 99.0,
            loser_floor: 0.34,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SynthesisResiduals {
    pub mean: f64,
    pub stddev: f64,
    /// Residual of the σ-clamped mean (multiple units).
    pub sigma_clamp_mean: f64,
    /// Residual of the break-even-clamped mean (multiple units).
    pub breakeven_clamp_mean: f64,
}

impl SynthesisResiduals {
    pub fn within_tolerance(&self) -> bool {
        self.mean.abs() <= MOMENT_TOL
            && self.stddev.abs() <= MOMENT_TOL
            && self.sigma_clamp_mean.abs() <= CLAMP_TOL
            && self.breakeven_clamp_mean.abs() <= CLAMP_TOL
    }
}

impl std::fmt::Display for SynthesisResiduals {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "mean={:+.6} stddev={:+.6} sigma_clamp_mean={:+.6} breakeven_clamp_mean={:+.6}",
            self.mean, self.stddev, self.sigma_clamp_mean, self.breakeven_clamp_mean
        )
    }
}

const MOMENT_TOL: f64 = 0.005;
const CLAMP_TOL: f64 = 0.0005;
const MAX_ATTEMPTS: u32 = 64;
/// Gap kept between the moderate/big winner buckets and the σ threshold.
const THRESHOLD_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub portfolio: ReturnPortfolio,
    pub seed: u64,
    pub constraints: KauffmanConstraints,
    pub residuals: SynthesisResiduals,
    pub attempts: u32,
}

/// Residuals of `p` against the constraints, with the σ threshold taken from
/// the portfolio's own standard deviation.
pub fn residuals(p: &ReturnPortfolio, c: &KauffmanConstraints) -> SynthesisResiduals {
    let stats = p.stats();
    SynthesisResiduals {
        mean: stats.mean - c.mean,
        stddev: stats.stddev - c.stddev,
        sigma_clamp_mean: p.clamped_mean(BREAK_EVEN + stats.stddev)
            - (1.0 - c.sigma_clamp_loss / 100.0),
        breakeven_clamp_mean: p.clamped_mean(BREAK_EVEN) - (1.0 - c.breakeven_clamp_loss / 100.0),
    }
}

pub fn synthesize_kauffman(
    c: &KauffmanConstraints,
    seed: u64,
) -> Result<Synthesis, PortfolioError> {
    synthesize_with_shape(c, &SynthesisShape::default(), seed)
}

/// Three-bucket construction: losers in `[loser_floor, 1)`, moderate winners
/// in `[1, 1 + σ)`, big winners above `1 + σ`. Bucket masses follow directly
/// from the two clamp losses and the mean; within-bucket spread is then sized
/// so the population variance lands on target.
pub fn synthesize_with_shape(
    c: &KauffmanConstraints,
    shape: &SynthesisShape,
    seed: u64,
) -> Result<Synthesis, PortfolioError> {
    c.validate()?;
    let n = c.n;
    let nf = n as f64;
    let label = format!("kauffman-synth-{seed}");

    let finish = |funds: Vec<f64>, attempts: u32| -> Result<Synthesis, PortfolioError> {
        let portfolio = ReturnPortfolio::new(label.clone(), funds)?;
        let residuals = residuals(&portfolio, c);
        if !residuals.within_tolerance() {
            return Err(PortfolioError::Calibration {
                attempts,
                residuals,
            });
        }
        Ok(Synthesis {
            portfolio,
            seed,
            constraints: *c,
            residuals,
            attempts,
        })
    };

    if c.stddev == 0.0 {
        return finish(vec![c.mean; n], 1);
    }

    let threshold = BREAK_EVEN + c.stddev;
    let loser_deficit = c.breakeven_clamp_loss / 100.0 * nf;
    let big_excess = (c.mean - (1.0 - c.sigma_clamp_loss / 100.0)) * nf;
    let moderate_excess = (c.breakeven_clamp_loss - c.sigma_clamp_loss) / 100.0 * nf;
    if big_excess < 0.0 {
        return Err(PortfolioError::Constraints(
            "mean is below the σ-clamped mean".into(),
        ));
    }

    let n_losers = if loser_deficit > 0.0 {
        ((shape.loser_share * nf).round() as usize).max(1)
    } else {
        0
    };
    let n_big = if big_excess > 0.0 {
        ((shape.big_winner_share * nf).round() as usize).max(1)
    } else {
        0
    };
    if n_losers + n_big >= n {
        return Err(PortfolioError::Constraints(format!(
            "{n_losers} losers and {n_big} big winners leave no moderate winners"
        )));
    }
    let n_moderate = n - n_losers - n_big;

    let loser_mean = if n_losers > 0 {
        1.0 - loser_deficit / n_losers as f64
    } else {
        0.0
    };
    let moderate_mean = 1.0 + moderate_excess / n_moderate as f64;
    let big_mean = if n_big > 0 {
        1.0 + big_excess / n_big as f64
    } else {
        0.0
    };
    if n_losers > 0 && loser_mean <= shape.loser_floor {
        return Err(PortfolioError::Constraints(format!(
            "loser bucket mean {loser_mean:.4} is at or below the floor {}",
            shape.loser_floor
        )));
    }
    if moderate_mean > threshold - THRESHOLD_MARGIN {
        return Err(PortfolioError::Constraints(format!(
            "moderate winners need mean {moderate_mean:.4}, above the σ threshold"
        )));
    }
    if n_big > 0 && big_mean < threshold + THRESHOLD_MARGIN {
        return Err(PortfolioError::Constraints(format!(
            "big winners need mean {big_mean:.4}, below the σ threshold"
        )));
    }

    let target_sum_sq = nf * (c.stddev * c.stddev + c.mean * c.mean);
    let between = n_losers as f64 * loser_mean * loser_mean
        + n_moderate as f64 * moderate_mean * moderate_mean
        + n_big as f64 * big_mean * big_mean;
    let within = target_sum_sq - between;
    if within < 0.0 {
        return Err(PortfolioError::Constraints(format!(
            "bucket means alone exceed the target variance by {:.4}",
            -within / nf
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Uniform::new_inclusive(-1.0, 1.0);
    let mut last = SynthesisResiduals::default();
    for attempt in 1..=MAX_ATTEMPTS {
        let z_losers = standardized((0..n_losers).map(|_| unit.sample(&mut rng)).collect());
        let z_moderate = standardized((0..n_moderate).map(|_| unit.sample(&mut rng)).collect());
        let z_big = standardized(
            (0..n_big)
                .map(|_| Distribution::<f64>::sample(&Exp1, &mut rng))
                .collect(),
        );

        // Losers and moderate winners take a bounded share of the spread;
        // the unbounded big-winner tail absorbs the rest.
        let mut s_losers = 0.9 * max_scale(&z_losers, loser_mean, shape.loser_floor, 1.0 - 1e-6);
        let mut s_moderate = 0.5
            * max_scale(
                &z_moderate,
                moderate_mean,
                BREAK_EVEN,
                threshold - THRESHOLD_MARGIN,
            );
        let mut bounded =
            n_losers as f64 * s_losers.powi(2) + n_moderate as f64 * s_moderate.powi(2);
        if n_big == 0 || bounded > within {
            let shrink = if bounded > 0.0 {
                (within / bounded).sqrt()
            } else {
                0.0
            };
            s_losers *= shrink;
            s_moderate *= shrink;
            bounded = within;
        }
        let s_big = if n_big > 0 {
            ((within - bounded) / n_big as f64).sqrt()
        } else {
            0.0
        };

        let mut funds: Vec<f64> = Vec::with_capacity(n);
        funds.extend(z_losers.iter().map(|z| loser_mean + s_losers * z));
        funds.extend(z_moderate.iter().map(|z| moderate_mean + s_moderate * z));
        funds.extend(z_big.iter().map(|z| big_mean + s_big * z));

        let big_ok = funds[n_losers + n_moderate..]
            .iter()
            .all(|&m| m >= threshold + THRESHOLD_MARGIN);
        if !big_ok || funds.iter().any(|m| *m < 0.0) {
            if let Ok(p) = ReturnPortfolio::new(label.clone(), funds.clone()) {
                last = residuals(&p, c);
            }
            continue;
        }
        funds.sort_by(|a, b| b.total_cmp(a));
        return finish(funds, attempt);
    }
    Err(PortfolioError::Calibration {
        attempts: MAX_ATTEMPTS,
        residuals: last,
    })
}

/// Centers `xs` and rescales to unit population variance.
fn standardized(mut xs: Vec<f64>) -> Vec<f64> {
    if xs.is_empty() {
        return xs;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    for x in xs.iter_mut() {
        *x = if sd > 0.0 { (*x - mean) / sd } else { 0.0 };
    }
    xs
}

/// Largest scale keeping `mean + s * z` inside `[lo, hi]` for every z.
fn max_scale(z: &[f64], mean: f64, lo: f64, hi: f64) -> f64 {
    let zmin = z.iter().cloned().fold(0.0, f64::min);
    let zmax = z.iter().cloned().fold(0.0, f64::max);
    let down = if zmin < 0.0 {
        (mean - lo) / -zmin
    } else {
        f64::INFINITY
    };
    let up = if zmax > 0.0 {
        (hi - mean) / zmax
    } else {
        f64::INFINITY
    };
    let s = down.min(up).max(0.0);
    if s.is_finite() {
        s
    } else {
        0.0
    }
}

/// Sorts descending and averages adjacent disjoint pairs; an odd leftover
/// (the smallest fund) is carried over unchanged.
pub fn compress_pairs(p: &ReturnPortfolio) -> Result<ReturnPortfolio, PortfolioError> {
    if p.len() < 2 {
        return Err(PortfolioError::TooSmallToCompress(p.len()));
    }
    let mut sorted = p.funds.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let funds = sorted
        .chunks(2)
        .map(|pair| match pair {
            [a, b] => 0.5 * (a + b),
            [a] => *a,
            _ => unreachable!(),
        })
        .collect();
    ReturnPortfolio::new(format!("{}-compressed", p.label), funds)
}

/// Shifts every fund by the same amount so the mean equals `target`. Funds
/// pushed below zero are floored and the clipped amount is taken back from
/// the remaining positive funds until the mean settles.
pub fn shift_to_mean(p: &ReturnPortfolio, target: f64) -> Result<ReturnPortfolio, PortfolioError> {
    if !(target >= 0.0) || !target.is_finite() {
        return Err(PortfolioError::InfeasibleTarget {
            target,
            reason: "target must be a non-negative finite multiple",
        });
    }
    let n = p.len() as f64;
    let current = p.stats().mean;
    let delta = target - current;
    let mut funds: Vec<f64> = p.funds.iter().map(|m| m + delta).collect();

    for _ in 0..(p.len() + 8) {
        let deficit: f64 = funds.iter().filter(|m| **m < 0.0).map(|m| -m).sum();
        for m in funds.iter_mut() {
            if *m < 0.0 {
                *m = 0.0;
            }
        }
        let positive = funds.iter().filter(|m| **m > 0.0).count();
        if deficit == 0.0 {
            break;
        }
        if positive == 0 {
            return Err(PortfolioError::InfeasibleTarget {
                target,
                reason: "every fund would be floored at zero",
            });
        }
        let take = deficit / positive as f64;
        for m in funds.iter_mut() {
            if *m > 0.0 {
                *m -= take;
            }
        }
    }
    if funds.iter().any(|m| *m < 0.0) {
        return Err(PortfolioError::InfeasibleTarget {
            target,
            reason: "flooring did not settle",
        });
    }
    let mean = funds.iter().sum::<f64>() / n;
    if (mean - target).abs() > 1e-9 {
        // Floating drift from repeated redistribution; spread the remainder
        // over the positive funds.
        let positive = funds.iter().filter(|m| **m > 0.0).count();
        if positive == 0 {
            return Err(PortfolioError::InfeasibleTarget {
                target,
                reason: "every fund would be floored at zero",
            });
        }
        let fix = (target - mean) * n / positive as f64;
        for m in funds.iter_mut() {
            if *m > 0.0 {
                *m = (*m + fix).max(0.0);
            }
        }
    }
    ReturnPortfolio::new(format!("{}@{target}", p.label), funds)
}

/// Writes the one-column portfolio CSV (`multiple` header).
pub fn write_portfolio_csv(p: &ReturnPortfolio, path: &Path) -> Result<(), PortfolioError> {
    let mut out = String::from("multiple\n");
    for m in &p.funds {
        writeln!(out, "{m}").unwrap();
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_portfolio_csv(path: &Path) -> Result<ReturnPortfolio, PortfolioError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some("multiple") => {}
        _ => {
            return Err(PortfolioError::Io {
                path: path.to_path_buf(),
                message: "expected header `multiple`".into(),
            })
        }
    }
    let mut funds = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| PortfolioError::Io {
            path: path.to_path_buf(),
            message: format!("line {}: not a number: {line:?}", i + 2),
        })?;
        funds.push(v);
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    ReturnPortfolio::new(label, funds)
}

/// Sidecar `key=value` block describing how a synthesized portfolio was made.
pub fn metadata_block(s: &Synthesis) -> String {
    let stats = s.portfolio.stats();
    let c = &s.constraints;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
    kv("label", s.portfolio.label.clone());
    kv("seed", s.seed.to_string());
    kv("n", c.n.to_string());
    kv("stddev_convention", "population".into());
    kv("target_mean", c.mean.to_string());
    kv("target_stddev", c.stddev.to_string());
    kv(
        "target_sigma_clamp_loss_pct",
        c.sigma_clamp_loss.to_string(),
    );
    kv(
        "target_breakeven_clamp_loss_pct",
        c.breakeven_clamp_loss.to_string(),
    );
    kv("mean", format!("{:.9}", stats.mean));
    kv("stddev", format!("{:.9}", stats.stddev));
    kv("residual_mean", format!("{:+.3e}", s.residuals.mean));
    kv("residual_stddev", format!("{:+.3e}", s.residuals.stddev));
    kv(
        "residual_sigma_clamp_mean",
        format!("{:+.3e}", s.residuals.sigma_clamp_mean),
    );
    kv(
        "residual_breakeven_clamp_mean",
        format!("{:+.3e}", s.residuals.breakeven_clamp_mean),
    );
    kv("attempts", s.attempts.to_string());
    out
}

fn io_err(path: &Path, e: std::io::Error) -> PortfolioError {
    PortfolioError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(v: &[f64]) -> ReturnPortfolio {
        ReturnPortfolio::new("t", v.to_vec()).unwrap()
    }

    #[test]
    fn stats_constant_and_hand_example() {
        let s = pf(&[1.0, 1.0, 1.0]).stats();
        assert_eq!((s.mean, s.stddev), (1.0, 0.0));
        let s = pf(&[0.5, 1.5, 3.5]).stats();
        // mean 5.5/3; deviations -4/3, -1/3, 5/3 -> variance 42/27
        assert!((s.mean - 1.833_333_333).abs() < 1e-9);
        assert!((s.stddev - (42.0f64 / 27.0).sqrt()).abs() < 1e-12);
        assert!((s.stddev - 1.2472).abs() < 1e-4);
    }

    #[test]
    fn rejects_negative_and_empty() {
        assert!(ReturnPortfolio::new("x", vec![]).is_err());
        assert!(matches!(
            ReturnPortfolio::new("x", vec![1.0, -0.1]),
            Err(PortfolioError::InvalidMultiple { index: 1, .. })
        ));
    }

    #[test]
    fn compress_examples() {
        let c = compress_pairs(&pf(&[4.0, 2.0, 2.0, 0.0])).unwrap();
        assert_eq!(c.funds(), &[3.0, 1.0]);
        let c = compress_pairs(&pf(&[1.0, 5.0, 3.0])).unwrap();
        assert_eq!(c.funds(), &[4.0, 1.0]);
        assert!(matches!(
            compress_pairs(&pf(&[1.0])),
            Err(PortfolioError::TooSmallToCompress(1))
        ));
    }

    #[test]
    fn shift_examples() {
        let p = pf(&[0.5, 1.5, 2.0]);
        let same = shift_to_mean(&p, p.stats().mean).unwrap();
        assert_eq!(same.funds(), p.funds());
        let c = shift_to_mean(&pf(&[1.31; 4]), 1.5).unwrap();
        for m in c.funds() {
            assert!((m - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_floors_and_redistributes() {
        let p = pf(&[0.1, 1.0, 4.0]);
        let s = shift_to_mean(&p, 0.5).unwrap();
        assert!(s.funds().iter().all(|m| *m >= 0.0));
        assert_eq!(s.funds()[0], 0.0);
        assert!((s.stats().mean - 0.5).abs() < 1e-9);
        assert!(shift_to_mean(&p, -1.0).is_err());
        let zero = shift_to_mean(&p, 0.0).unwrap();
        assert!(zero.funds().iter().all(|m| *m == 0.0));
    }

    #[test]
    fn degenerate_constraints_give_constant_funds() {
        let c = KauffmanConstraints {
            n: 5,
            mean: 1.0,
            stddev: 0.0,
            sigma_clamp_loss: 0.0,
            breakeven_clamp_loss: 0.0,
        };
        let s = synthesize_kauffman(&c, 7).unwrap();
        assert_eq!(s.portfolio.funds(), &[1.0; 5]);
    }

    #[test]
    fn inconsistent_constraints_rejected() {
        let mut c = KauffmanConstraints::default();
        c.sigma_clamp_loss = 20.0;
        assert!(matches!(
            synthesize_kauffman(&c, 1),
            Err(PortfolioError::Constraints(_))
        ));
        c = KauffmanConstraints {
            n: 2,
            ..Default::default()
        };
        assert!(synthesize_kauffman(&c, 1).is_err());
        // Constant portfolio that cannot show any clamp loss.
        c = KauffmanConstraints {
            n: 5,
            mean: 1.0,
            stddev: 0.0,
            sigma_clamp_loss: 0.0,
            breakeven_clamp_loss: 5.0,
        };
        assert!(matches!(
            synthesize_kauffman(&c, 1),
            Err(PortfolioError::Calibration { .. })
        ));
    }

    #[test]
    fn default_synthesis_meets_constraints() {
        let c = KauffmanConstraints::default();
        let s = synthesize_kauffman(&c, 42).unwrap();
        let st = s.portfolio.stats();
        assert_eq!(s.portfolio.len(), 99);
        assert!((st.mean - 1.31).abs() <= 0.005);
        assert!((st.stddev - 1.116).abs() <= 0.005);
        assert!((s.portfolio.clamped_mean(1.0) - 0.8255).abs() <= 0.0005);
        assert!((s.portfolio.clamped_mean(1.0 + st.stddev) - 0.9728).abs() <= 0.0005);
        let again = synthesize_kauffman(&c, 42).unwrap();
        assert_eq!(s.portfolio.funds(), again.portfolio.funds());
        let other = synthesize_kauffman(&c, 43).unwrap();
        assert_ne!(s.portfolio.funds(), other.portfolio.funds());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let p = pf(&[0.1, 1.0 / 3.0, 2.5]);
        write_portfolio_csv(&p, &path).unwrap();
        let back = read_portfolio_csv(&path).unwrap();
        assert_eq!(back.funds(), p.funds());
    }
}
