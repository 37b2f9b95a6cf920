pub mod run;

pub use run::{execute, run, Command, RunConfig, RunReport};
