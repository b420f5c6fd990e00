pub mod agent;
pub mod dataset;
pub mod evaluate;
pub mod parse;
pub mod predict;
pub mod report;
pub mod simulate;
