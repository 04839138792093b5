//! Shared helpers for the benchmark targets (intentionally minimal).
