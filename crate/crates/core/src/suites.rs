//! Packaged verification suites: each runs a battery of checks over one
//! algebra context and returns a serializable report with a pass flag.
//! Witnesses are captured in the report rather than thrown.

use serde::Serialize;

use crate::algebra::{
    check_associativity, check_augmentation_multiplicative, check_ideal_two_sided,
    check_quotient_multiply_exhaustive, check_quotient_structure_constants, AlgebraContext,
};
use crate::cover::{
    all_specs, all_specs_unbounded, cover_union_check, intersection_basis, is_zero_by_criterion,
    verify_retraction_mu, verify_retraction_nu, CoverFailure, SpecMode, MAX_EXHAUSTIVE_SPECS,
};
use crate::error::{Error, Result};
use crate::group::GroupElem;
use crate::ring::RingOps;

const DEFAULT_TRIALS: usize = 1000;
/// Pair-count threshold below which the two-sided-ideal check runs
/// exhaustively.
const IDEAL_EXHAUSTIVE_LIMIT: usize = 250_000;
const IDEAL_SAMPLED_PAIRS: usize = 10_000;

fn witness_of(result: Result<usize>) -> (usize, Option<String>) {
    match result {
        Ok(n) => (n, None),
        Err(Error::VerificationFailed(w)) => (0, Some(w)),
        Err(e) => (0, Some(e.to_string())),
    }
}

/// Report of the `algebra` suite: associativity, multiplicativity of the
/// augmentation, the two-sided ideal law, and the quotient isomorphism.
#[derive(Serialize, Debug, Clone)]
pub struct AlgebraSuiteReport {
    pub associativity_checked: usize,
    pub augmentation_checked: usize,
    pub ideal_checked: usize,
    pub ideal_exhaustive: bool,
    pub quotient_pairs_checked: usize,
    pub seed: u64,
    pub failures: Vec<String>,
    pub pass: bool,
}

pub fn run_algebra_suite<R: RingOps>(
    ctx: &AlgebraContext<R>,
    seed: u64,
) -> Result<AlgebraSuiteReport> {
    let mut failures = Vec::new();

    let (associativity_checked, w) = witness_of(check_associativity(ctx, DEFAULT_TRIALS, seed));
    failures.extend(w);
    let (augmentation_checked, w) =
        witness_of(check_augmentation_multiplicative(ctx, DEFAULT_TRIALS, seed));
    failures.extend(w);

    let ideal_pairs = ctx.ideal_basis().len() * ctx.dim();
    let ideal_exhaustive = ideal_pairs <= IDEAL_EXHAUSTIVE_LIMIT;
    let sample = if ideal_exhaustive {
        None
    } else {
        Some(IDEAL_SAMPLED_PAIRS)
    };
    let (ideal_checked, w) = witness_of(check_ideal_two_sided(ctx, sample, seed));
    failures.extend(w);

    let (quotient_pairs_checked, w) = witness_of(check_quotient_structure_constants(ctx));
    failures.extend(w);

    let pass = failures.is_empty();
    Ok(AlgebraSuiteReport {
        associativity_checked,
        augmentation_checked,
        ideal_checked,
        ideal_exhaustive,
        quotient_pairs_checked,
        seed,
        failures,
        pass,
    })
}

/// Report of the `lemmas` suite: the covering property, the zero-criterion
/// equivalence over the full spec space when it fits, the mu/nu retraction
/// laws on weight-bounded specs, and the quotient structure constants.
#[derive(Serialize, Debug, Clone)]
pub struct LemmasReport {
    pub union_ok: bool,
    pub zero_criterion_checked: usize,
    pub zero_criterion_exhaustive: bool,
    pub retraction_checked: usize,
    pub quotient_pairs_checked: usize,
    pub quotient_full_checked: usize,
    pub seed: u64,
    pub failures: Vec<CoverFailure>,
    pub plain_failures: Vec<String>,
    pub pass: bool,
}

pub fn run_lemmas_suite<R: RingOps>(
    ctx: &AlgebraContext<R>,
    seed: u64,
    mode: SpecMode,
) -> Result<LemmasReport> {
    let n = ctx.n();
    let group = ctx.group().clone();
    let mut failures: Vec<CoverFailure> = Vec::new();
    let mut plain_failures: Vec<String> = Vec::new();

    let union_ok = cover_union_check(ctx);

    // Zero criterion against actual intersections, over the complete
    // (unbounded-weight) spec space when it is small enough.
    let full = match mode {
        SpecMode::Sampled => None,
        _ => all_specs_unbounded(ctx, MAX_EXHAUSTIVE_SPECS),
    };
    let (zero_specs, zero_criterion_exhaustive) = match full {
        Some(specs) => (specs, true),
        None => {
            if mode == SpecMode::Exhaustive {
                return Err(Error::SizeLimit(
                    "full spec space exceeds the exhaustive cap".into(),
                ));
            }
            (all_specs(ctx, n.saturating_sub(1)), false)
        }
    };
    let mut zero_criterion_checked = 0;
    for spec in &zero_specs {
        zero_criterion_checked += 1;
        let predicted = is_zero_by_criterion(spec, &group);
        let actual = intersection_basis(ctx, spec).is_empty();
        if predicted != actual {
            failures.push(CoverFailure {
                spec: spec.to_json(&group),
                kind: "zero-criterion".into(),
                witness: format!("criterion {predicted}, basis empty: {actual}"),
            });
        }
    }

    // Retraction lemmas on the weight-bounded specs the cover uses.
    let mut retraction_checked = 0;
    for spec in all_specs(ctx, n.saturating_sub(1)) {
        if intersection_basis(ctx, &spec).is_empty() {
            continue;
        }
        let s_set: Vec<usize> = spec.s().collect();
        for a in 1..=n {
            for b in 1..=n {
                if a == b || s_set.contains(&a) || s_set.contains(&b) {
                    continue;
                }
                let report = verify_retraction_mu(ctx, &spec, a, b)?;
                retraction_checked += report.checked;
                for w in report.failures {
                    failures.push(CoverFailure {
                        spec: spec.to_json(&group),
                        kind: format!("mu-retraction({a},{b})"),
                        witness: w,
                    });
                }
            }
        }
        for a in 1..n {
            for b in a + 1..=n {
                for g in 0..group.order() as GroupElem {
                    if spec.t().any(|t| t == (a, b, g)) {
                        continue;
                    }
                    let report = verify_retraction_nu(ctx, &spec, a, b, g)?;
                    retraction_checked += report.checked;
                    for w in report.failures {
                        failures.push(CoverFailure {
                            spec: spec.to_json(&group),
                            kind: format!("nu-retraction({a},{b},{})", group.name(g)),
                            witness: w,
                        });
                    }
                }
            }
        }
    }

    let (quotient_pairs_checked, w) = witness_of(check_quotient_structure_constants(ctx));
    plain_failures.extend(w);
    let (quotient_full_checked, w) = witness_of(check_quotient_multiply_exhaustive(ctx));
    plain_failures.extend(w);

    let pass = union_ok && failures.is_empty() && plain_failures.is_empty();
    Ok(LemmasReport {
        union_ok,
        zero_criterion_checked,
        zero_criterion_exhaustive,
        retraction_checked,
        quotient_pairs_checked,
        quotient_full_checked,
        seed,
        failures,
        plain_failures,
        pass,
    })
}
