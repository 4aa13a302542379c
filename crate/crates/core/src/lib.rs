pub mod cli;
pub mod eval;
pub mod extraction;
pub mod format;
pub mod game;
pub mod narrative;
pub mod prob;
pub mod qre;
pub mod synth;
pub mod tolerance;
