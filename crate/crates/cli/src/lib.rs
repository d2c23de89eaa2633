//! Configuration, evaluation and output for the `casimir` command.

pub mod compare;
pub mod config;
pub mod error;
pub mod material;
pub mod record;
pub mod run;
pub mod tables;
