//! Sweep configuration, figure data and the command-line front end.

pub mod cli;
mod config;
mod figures;
mod sweep;

pub use config::{load_config, parse_config, Spacing, SweepParam, SweepSpec};
pub use figures::{
    cycle_maxima, emit_figure_data, fig2_model, fit_decay, lorentzian_sweep, ohmic_sweep, FigureOptions,
    FigureTag,
};
pub use sweep::{certify_cpt, log_times, run_sweep, SweepRow, SweepTable, SWEEP_CSV_HEADER};
