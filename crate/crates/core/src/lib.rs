pub mod cli;
pub mod coeff;
pub mod conductor;
pub mod error;
pub mod localsym;
pub mod poly;
pub mod ring;
pub mod series;
pub mod tower;
pub mod wbar;
pub mod witt;
