//! Pieces of the `coprop` command line that are worth testing on their own:
//! the arity syntax and the JSON input formats.

pub mod arity;
pub mod inputs;
