//! Batch front end for the c2alg engine: JSON input, pretty or JSON output.

pub mod expr;
pub mod job;
pub mod render;
pub mod schema;

pub use job::{parse_job, run, Command, Format, JobError, JobSpec, Kind, Options};
pub use schema::{parse_input, InputError, Parsed};
