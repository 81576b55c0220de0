// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

pub mod bounds;
pub mod check;
pub mod control;
pub mod error;
pub mod lindblad;
pub mod models;
pub mod norms;
pub mod numerics;

pub use error::{Error, Result};
