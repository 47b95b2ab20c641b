//! Graph stories: realizability on fixed point sets.

pub mod embedding;
pub mod generators;
pub mod solver;
pub mod special;
pub mod story;
pub mod weighted;
pub mod render;
