//! Command-line front end for `conjlen-core`.

pub mod app;
pub mod render;
