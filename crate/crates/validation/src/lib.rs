//! Acceptance runs for `coma-core` live in `tests/acceptance.rs`:
//!
//! ```text
//! cargo test -p coma-validation --test acceptance
//! ```
