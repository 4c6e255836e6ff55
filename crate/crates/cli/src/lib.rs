//! Library surface of the CLI harness (exposed for integration tests).

pub mod run;
