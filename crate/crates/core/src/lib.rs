//! Deterministic two-way unary multiautomata with bounded broadcast, and an
//! effective construction of their (ultimately periodic) languages.

pub mod cli;
pub mod construction;
pub mod diagram;
pub mod dynamics;
pub mod fixtures;
pub mod fuzz;
pub mod model;
pub mod presburger;
pub mod sim;
pub mod spec_file;
