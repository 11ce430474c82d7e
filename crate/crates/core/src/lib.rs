pub mod dualsets;
pub mod reform;
pub mod measures;
pub mod models;
pub mod oracle;
pub mod solver;
pub mod stability;
