//! Study drivers, configuration and result output for the `capflow` binary.

pub mod config;
pub mod data;
pub mod mms;
pub mod output;
pub mod stats;
pub mod taylor;
pub mod studies;
