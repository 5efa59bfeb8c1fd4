pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod hardy;
pub mod integral_means;
pub mod interval;
pub mod quadrature;
pub mod roots;
pub mod step_functions;
pub mod weighted_means;
