//! Acceptance checks for `chiral-winding`. All content lives in
//! `tests/acceptance.rs`; run it with `cargo test -p winding-validation`.
