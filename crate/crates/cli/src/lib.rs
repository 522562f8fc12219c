//! Command-line front end: argument handling, file formats, SVG output,
//! and the rayon executor. All certification logic lives in the core crate;
//! this one only orchestrates and serializes.

pub mod commands;
pub mod formats;
pub mod par;
pub mod svg;
