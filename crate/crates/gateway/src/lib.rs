//! Entry points to the engine: an HTTP JSON service and a command-line tool
//! that share one set of request/response types.

pub mod api;
pub mod cli;
pub mod error;
pub mod ops;
pub mod server;

pub use error::ApiError;
