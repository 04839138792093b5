//! Placeholder benchmark wiring; filled in once the kernels exist.
fn main() {}
