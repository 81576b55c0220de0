// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Config-driven experiments on top of `qsl-core`: bounds, sweeps,
//! minimal-time searches, trajectories and the invariant suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
