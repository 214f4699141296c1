#![allow(clippy::needless_range_loop)]

pub mod algebraic;
pub mod cli;
pub mod cutproject;
pub mod delone;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod geometry;
pub mod matrix;
pub mod onedim;
pub mod poly;
pub mod roots;
pub mod spectral;
pub mod substitution;
pub mod tiling;
