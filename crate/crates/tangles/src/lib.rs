//! Perfect tangles in Temperley-Lieb and cubic trivalent categories, and
//! perfect / planar-perfect checks for dense tensors.

pub mod cli;
pub mod construct;
pub mod cubic;
pub mod error;
pub mod network;
pub mod pairing;
pub mod perfect;
pub mod solver;
pub mod tensor;
pub mod tl;

pub use error::{Error, Result};
pub use pairing::Pairing;
pub use tl::{TLBasis, TLContext, TLElement, C64};
