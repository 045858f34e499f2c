//! Euler elements, abstract wedge spaces and their finite-dimensional modular theory.

pub mod covering;
pub mod liealg;
pub mod modular;
pub(crate) mod numeric;
pub mod report;
pub mod rootsys;
pub mod wedgespace;
