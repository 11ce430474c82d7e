pub mod equiv;
pub mod eval;
pub mod gen;
pub mod solve;
pub mod stability;

/// Report JSON version.
pub const SCHEMA: u32 = 1;
