// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise-constant control: cost evaluation, schedule optimization,
//! uncontrolled relaxation times and the minimal-time search.

mod cost;
mod first_passage;
mod optimize;
mod schedule;
mod search;

pub use cost::{evaluate_cost, CostModel};
pub use first_passage::{is_covariant, uncontrolled_first_passage, FirstPassage, FirstPassageOptions};
pub use optimize::{derive_seed, optimize_schedule, OptimizeResult, OptimizerConfig};
pub use schedule::Schedule;
pub use search::{find_min_time, relaxed_lower_bound, BracketStep, TimeSearchResult};
