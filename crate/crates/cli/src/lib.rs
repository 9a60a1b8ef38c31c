//! Sweep driver: preset expansion, config handling and CSV/manifest output
//! on top of `risnoma-core`.

pub mod config;
pub mod sweep;
