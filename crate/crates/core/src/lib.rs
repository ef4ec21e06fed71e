pub mod arith;
pub mod bh;
pub mod biquad;
pub mod bqf;
pub mod decimal;
pub mod elliptic;
pub mod error;
pub mod pipeline;
pub mod soleng;

pub use error::{Error, Result};
