//! File formats and the command-line front end for `momentpick-core`.

pub mod cli;
pub mod formats;
pub mod sdpa;
