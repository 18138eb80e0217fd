pub mod chain;
pub mod cli;
pub mod components;
pub mod dataset;
pub mod plot;
pub mod regression;
pub mod synthetic;
pub mod units;
