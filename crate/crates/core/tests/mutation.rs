//! The suite must notice a corrupted engine.

use twomode::validate::{run_check, Mutation, ValidateOptions};

const CORRUPT: ValidateOptions = ValidateOptions {
    mutation: Some(Mutation::FlipFirstMomentXi),
};

#[test]
fn flipped_xi_breaks_drive_independence() {
    let clean = run_check(5, ValidateOptions::default());
    let bad = run_check(5, CORRUPT);
    assert!(clean.passed, "{}", clean.summary());
    assert!(!bad.passed, "{}", bad.summary());
    assert!(bad.measured > 1e3 * bad.threshold, "{}", bad.summary());
}

#[test]
fn flipped_xi_breaks_closed_form_agreement() {
    let bad = run_check(3, CORRUPT);
    assert!(!bad.passed, "{}", bad.summary());
}
