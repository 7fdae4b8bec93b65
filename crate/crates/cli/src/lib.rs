//! Library side of the `cvd` command-line tool.

pub mod app;
pub mod commands;
pub mod config;
pub mod output;
pub mod reproduce;
