#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![doc = include_str!("../README.md")]

extern crate alloc;

pub mod asymptotics;
pub mod background;
pub mod error;
pub mod fit;
pub mod gas;
pub mod math;
pub mod perturb;
pub mod ode;
pub mod roots;
pub mod stability;

pub use error::{Error, Result};
