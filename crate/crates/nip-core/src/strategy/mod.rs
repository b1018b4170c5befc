//! The three reconstruction strategies.

pub mod one;
pub mod three;
pub mod two;
