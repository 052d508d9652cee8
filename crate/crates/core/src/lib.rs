pub mod slopes;
pub mod cli;
pub mod decider;
pub mod em;
pub mod notation;
pub mod oracle;
pub mod tangles;
