//! Job files and exporters.

pub mod config;
pub mod export;
