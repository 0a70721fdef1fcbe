//! Birkhoff sections of geodesic flows built from Eulerian coorientations of
//! filling multi-curves.
//!
//! The pipeline runs from a four-valent map ([`map`]) and a coorientation
//! ([`coorient`]) to the ribbon model of the section ([`surface`]), the
//! first-return map as a word of negative Dehn twists ([`monodromy`]) and a
//! flat-torus flow simulation that checks the combinatorics ([`torus`]).

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod cohomology;
pub mod coorient;
pub mod error;
pub mod map;
pub mod matrix;
pub mod monodromy;
pub mod surface;
pub mod torus;

pub use error::{Error, Result};
pub use map::{Dart, MultiCurveMap};
