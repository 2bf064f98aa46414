//! Strategy P&L, headline statistics and their breakdowns.

pub mod breakdown;
pub mod drawdown;
pub mod pnl;
pub mod rolling;
pub mod stats;

pub use breakdown::{breakdown, BreakdownRow, GroupStats, Grouping};
pub use drawdown::{drawdowns, DrawdownRecord};
pub use pnl::{
    aggregate, instrument_pnl, longonly_pnl, run_instrument, run_pool, InstrumentRun, PnlPoint, PnlSeries, AGGREGATE_ID,
};
pub use rolling::rolling_pnl;
pub use stats::{
    debias, proxy_correlation, sharpe_and_tstat, sharpe_of, stats_report, Debiased, SharpeStats, StatsReport,
};
