//! Command-line companion of `fracreg-core`: configuration files, expression
//! parsing, CSV and text output, and scripted acceptance scenarios.

pub mod checks;
pub mod commands;
pub mod config;
pub mod exprparse;
pub mod output;
