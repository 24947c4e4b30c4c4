//! Command-line front-end: channel files, reports and CSV sweeps.

pub mod analysis;
pub mod channel_file;
pub mod commands;
pub mod exit;
