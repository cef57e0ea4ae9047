pub mod domains;
pub mod error;
pub mod extended;
pub mod hyperbolic;
pub mod roots;
pub mod vector;
pub mod disc_functional;
pub mod optimize;
pub mod teich;
pub mod metrics;
pub mod extremality;
pub mod psh;
pub mod report;
pub mod config;
pub mod verify;
pub mod cli;
