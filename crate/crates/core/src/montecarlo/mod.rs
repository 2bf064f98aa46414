//! Synthetic markets and the statistical oracles built on them.

pub mod experiments;
pub mod rng;
pub mod synth;

pub use experiments::{
    drawdown_scaling, iid_pnl, null_tstat_distribution, planted_trend_power, quantile, run_experiment, run_trial,
    summarize, DrawdownRow, DrawdownScaling, Experiment, ExperimentOutput, McSummary, NullRun, PowerRow, PowerTable,
    Quantile, TrialOutcome, MIN_TRIALS,
};
pub use rng::stream_rng;
pub use synth::{generate, generate_stream, SynthModel, SynthSpec, Synthetic};
