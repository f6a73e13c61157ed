//! File formats and command-line front-end for the weighted partial copula
//! conditional independence test in [`wpc_core`].

pub mod ci_matrix;
pub mod cli;
pub mod input;
pub mod report;
