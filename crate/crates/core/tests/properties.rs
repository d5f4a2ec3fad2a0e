use chrono::NaiveDate;
use proptest::prelude::*;

use vbank::bank_engine::{simulate_bank, ScenarioConfig};
use vbank::din::{
    coverage_breakeven_method, coverage_sigma_method, din_payout, underwriter_ledger, DinTerms,
    PremiumBase,
};
use vbank::market_data::{funds_rate, window_stats, LiborSeries, RateObservation};
use vbank::portfolio::{compress_pairs, shift_to_mean, ReturnPortfolio};
use vbank::sweep::{Provenance, SweepRow, SweepTable};

fn multiples(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..5.0, 1..max_len)
}

fn portfolio(max_len: usize) -> impl Strategy<Value = ReturnPortfolio> {
    multiples(max_len).prop_map(|v| ReturnPortfolio::new("p", v).unwrap())
}

fn base() -> impl Strategy<Value = PremiumBase> {
    prop::sample::select(PremiumBase::ALL.to_vec())
}

fn terms() -> impl Strategy<Value = DinTerms> {
    (0.0288f64..0.25, 0.0f64..0.10, base(), 1u32..=10, 0u32..=5).prop_map(
        |(coverage, premium, base, payoff, extra)| DinTerms {
            coverage_fraction: coverage,
            premium_rate: premium,
            premium_base: base,
            payoff_year: payoff,
            term_years: payoff + extra,
            ..DinTerms::default()
        },
    )
}

fn scenario() -> impl Strategy<Value = ScenarioConfig> {
    (portfolio(30), 1.0f64..60.0, 0.0f64..0.08, terms())
        .prop_map(|(p, moc, rate, t)| ScenarioConfig::new(p, moc, rate, t))
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn window_stats_are_ordered(rates in prop::collection::vec(0.0f64..20.0, 1..60)) {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        let obs = rates
            .iter()
            .enumerate()
            .map(|(i, &rate)| RateObservation { date: start + chrono::Days::new(i as u64), rate })
            .collect();
        let s = LiborSeries::from_observations("X", obs).unwrap();
        let w = window_stats(&s, NaiveDate::MIN, NaiveDate::MAX).unwrap();
        let whole = window_stats(&s, s.first_date(), s.last_date()).unwrap();
        prop_assert_eq!(w, whole);
        prop_assert_eq!(w.count, rates.len());
        prop_assert!(w.min <= w.median && w.median <= w.max);
        prop_assert!(w.min <= w.mean + 1e-12 && w.mean <= w.max + 1e-12);
    }

    #[test]
    fn funds_rate_is_affine(a in 0.0f64..20.0, d in 0.0f64..5.0) {
        let diff = funds_rate(a + d).unwrap() - funds_rate(a).unwrap();
        prop_assert!((diff - d).abs() < 1e-12);
    }

    #[test]
    fn shift_hits_target(p in portfolio(40), target in 0.0f64..4.0) {
        let s = shift_to_mean(&p, target).unwrap();
        prop_assert!((s.stats().mean - target).abs() < 1e-9);
        let delta = target - p.stats().mean;
        let floors = p.funds().iter().any(|&m| m + delta < 0.0);
        if !floors {
            prop_assert!((s.stats().stddev - p.stats().stddev).abs() < 1e-9);
        }
    }

    #[test]
    fn compress_preserves_even_sum(half in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..20)) {
        let v: Vec<f64> = half.iter().flat_map(|&(a, b)| [a, b]).collect();
        let p = ReturnPortfolio::new("p", v).unwrap();
        let c = compress_pairs(&p).unwrap();
        prop_assert_eq!(c.len(), p.len() / 2);
        let before: f64 = p.funds().iter().sum();
        let after: f64 = c.funds().iter().sum::<f64>() * 2.0;
        prop_assert!(rel_close(before, after, 1e-12));
    }

    #[test]
    fn clamping_never_raises_the_mean(p in portfolio(40)) {
        let st = p.stats();
        let be = p.clamped_mean(1.0);
        let sigma = p.clamped_mean(1.0 + st.stddev);
        prop_assert!(be <= sigma + 1e-12);
        prop_assert!(sigma <= st.mean + 1e-12);
    }

    #[test]
    fn recommendations_are_ordered(p in portfolio(40), floor in 0.0f64..10.0) {
        let s = coverage_sigma_method(&p, floor).recommended_coverage;
        let b = coverage_breakeven_method(&p, floor).recommended_coverage;
        prop_assert!(b >= s - 1e-9);
        prop_assert!(s >= floor - 1e-12);
    }

    #[test]
    fn payout_is_capped_and_monotone(
        principal in 0.0f64..1000.0,
        m1 in 0.0f64..3.0,
        m2 in 0.0f64..3.0,
        t in terms(),
    ) {
        let (lo, hi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
        let a = din_payout(principal, lo, &t);
        let b = din_payout(principal, hi, &t);
        prop_assert!(a >= b);
        prop_assert!(b >= 0.0);
        prop_assert!(a <= t.coverage_fraction * principal + 1e-12);
    }

    #[test]
    fn underwriter_return_falls_with_rate(p in portfolio(30), t in terms(), r1 in 0.0f64..0.1, r2 in 0.0f64..0.1) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let a = underwriter_ledger(&p, &t, lo, 1.0).unwrap().gross_return;
        let b = underwriter_ledger(&p, &t, hi, 1.0).unwrap().gross_return;
        prop_assert!(b <= a + 1e-12);
    }

    #[test]
    fn underwriter_without_failures_earns_full_premium(
        v in prop::collection::vec(1.0f64..5.0, 1..30),
        t in terms(),
        rate in 0.0f64..0.1,
    ) {
        let p = ReturnPortfolio::new("p", v).unwrap();
        let t = DinTerms { premium_base: PremiumBase::FaceAnnual, ..t };
        let r = underwriter_ledger(&p, &t, rate, 3.0).unwrap();
        prop_assert!(rel_close(r.gross_return, t.premium_rate * t.term_years as f64, 1e-12));
    }

    #[test]
    fn bank_multiple_is_affine_in_moc(cfg in scenario()) {
        let at = |moc: f64| simulate_bank(&ScenarioConfig { moc, ..cfg.clone() }).unwrap().final_multiple;
        let (m30, m43) = (at(30.0), at(43.0));
        prop_assert!(((m43 - 1.0) / 43.0 - (m30 - 1.0) / 30.0).abs() < 1e-9);
    }

    #[test]
    fn bank_multiple_falls_with_rate(cfg in scenario(), r1 in 0.0f64..0.1, r2 in 0.0f64..0.1) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let a = simulate_bank(&cfg.with_rate(lo)).unwrap().final_multiple;
        let b = simulate_bank(&cfg.with_rate(hi)).unwrap().final_multiple;
        prop_assert!(b <= a + 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn bank_multiple_falls_with_premium_rate(cfg in scenario(), extra in 0.0f64..0.05) {
        let mut dearer = cfg.clone();
        dearer.din_terms.premium_rate += extra;
        let a = simulate_bank(&cfg).unwrap().final_multiple;
        let b = simulate_bank(&dearer).unwrap().final_multiple;
        prop_assert!(b <= a + 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn bank_multiple_rises_with_portfolio_mean(cfg in scenario(), bump in 0.0f64..1.0) {
        let mean = cfg.portfolio.stats().mean;
        let lower = shift_to_mean(&cfg.portfolio, mean).unwrap();
        let higher = shift_to_mean(&cfg.portfolio, mean + bump).unwrap();
        let a = simulate_bank(&ScenarioConfig { portfolio: lower, ..cfg.clone() }).unwrap().final_multiple;
        let b = simulate_bank(&ScenarioConfig { portfolio: higher, ..cfg }).unwrap().final_multiple;
        prop_assert!(b >= a - 1e-9 * (1.0 + a.abs()));
    }

    // Coverage only helps the bank when premiums do not scale with it; under
    // the face-based premium a larger face also costs more.
    #[test]
    fn bank_multiple_rises_with_coverage_on_principal_premiums(
        cfg in scenario(),
        extra in 0.0f64..0.2,
        upfront in any::<bool>(),
    ) {
        let mut cfg = cfg;
        cfg.din_terms.premium_base = if upfront {
            PremiumBase::PrincipalUpfront
        } else {
            PremiumBase::PrincipalAnnual
        };
        let mut wider = cfg.clone();
        wider.din_terms.coverage_fraction += extra;
        let a = simulate_bank(&cfg).unwrap().final_multiple;
        let b = simulate_bank(&wider).unwrap().final_multiple;
        prop_assert!(b >= a - 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn capital_scales_the_ledger(cfg in scenario(), k in 0.1f64..100.0) {
        let a = simulate_bank(&cfg).unwrap();
        let b = simulate_bank(&ScenarioConfig { original_capital: cfg.original_capital * k, ..cfg }).unwrap();
        prop_assert!(rel_close(a.final_multiple, b.final_multiple, 1e-9));
        for (x, y) in a.ledger.rows.iter().zip(&b.ledger.rows) {
            prop_assert!(rel_close(x.debt_balance_end * k, y.debt_balance_end, 1e-9));
            prop_assert!(rel_close(x.equity_estimate * k, y.equity_estimate, 1e-9));
            prop_assert!(rel_close(x.interest_accrued * k, y.interest_accrued, 1e-9));
            prop_assert!(rel_close(x.premiums_paid * k, y.premiums_paid, 1e-9));
            prop_assert!(rel_close(x.din_receipts * k, y.din_receipts, 1e-9));
            prop_assert!(rel_close(x.exit_proceeds * k, y.exit_proceeds, 1e-9));
        }
    }

    #[test]
    fn ledger_conserves_cash(cfg in scenario(), surplus_rate in 0.0f64..0.05) {
        let cfg = ScenarioConfig { surplus_rate, ..cfg };
        let r = simulate_bank(&cfg).unwrap();
        let rows = &r.ledger.rows;
        prop_assert_eq!(rows.len() as u32, cfg.horizon_years + 1);
        prop_assert_eq!(r.survived, r.final_multiple >= 1.0);
        for w in rows.windows(2) {
            let (prev, row) = (&w[0], &w[1]);
            let change = row.equity_estimate - prev.equity_estimate;
            let flows = -row.interest_accrued - row.premiums_paid + row.din_receipts
                + row.exit_proceeds + row.surplus_interest;
            prop_assert!((change - flows).abs() <= 1e-9 * (1.0 + cfg.invested()));
            prop_assert!(row.debt_balance_end >= 0.0);
        }
    }

    #[test]
    fn bank_and_underwriter_streams_mirror(cfg in scenario()) {
        let bank = simulate_bank(&cfg).unwrap();
        let uw = underwriter_ledger(&cfg.portfolio, &cfg.din_terms, cfg.bank_rate, cfg.principal_per_fund()).unwrap();
        let income: Vec<f64> = uw.yearly.iter().map(|y| y.premium_income).collect();
        let payouts: Vec<f64> = uw.yearly.iter().map(|y| y.payouts).collect();
        prop_assert_eq!(bank.ledger.premiums(), income);
        prop_assert_eq!(bank.ledger.din_receipts(), payouts);
    }

    #[test]
    fn sweep_table_round_trips(rows in prop::collection::vec(
        ("[a-z0-9.]{1,6}", 1.0f64..60.0, 0.0f64..10.0, -20.0f64..20.0, -2.0f64..2.0),
        0..30,
    )) {
        let rows: Vec<SweepRow> = rows
            .into_iter()
            .map(|(label, moc, libor, m, u)| SweepRow {
                portfolio_label: label,
                moc,
                libor_pct: libor,
                bank_rate_pct: funds_rate(libor).unwrap(),
                bank_multiple: m,
                underwriter_return: u,
                survived: m >= 1.0,
            })
            .collect();
        let provenance = Provenance { config_digest: "d".into(), seed: Some(1), generated_at: "t".into() };
        let t = SweepTable { rows, provenance: provenance.clone() };
        let back = SweepTable::from_csv(&t.to_csv(), provenance).unwrap();
        prop_assert_eq!(back.rows, t.rows);
    }
}
