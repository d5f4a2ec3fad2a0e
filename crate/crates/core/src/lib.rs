//! Venture-bank double-coverage simulator.
//!
//! A bank lends against Default Insurance Notes (DINs) and is required to
//! fund every insured loan with interbank borrowing priced off 12-month
//! LIBOR. The crate sizes DIN coverage from a fund-return distribution,
//! runs the bank's ten-year ledger, the underwriter's P&L, and rate sweeps.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bank_engine;
pub mod calibration;
pub mod cli;
pub mod config;
pub mod din;
pub mod market_data;
pub mod portfolio;
pub mod report;
pub mod sweep;
