//! Scenario runner for the anomaly flow: JSON scenarios in, CSV trajectories
//! and JSON reports out, plus the acceptance checks.

#![allow(clippy::needless_range_loop)]

pub mod commands;
pub mod dto;
pub mod output;
pub mod scenario;
pub mod sweep;
pub mod verify;
