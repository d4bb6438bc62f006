//! Bounded language comparison.

use std::collections::BTreeSet;

use crate::derive::{enumerate_language, Fragment, SearchBudget};
use crate::error::RegulatedError;
use crate::grammar::Grammar;
use crate::regulated::{enumerate_regulated, RegulatedOptions};
use crate::text::GrammarFile;

/// How many differing words a verdict reports at most.
pub const MAX_REPORTED: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Both fragments were exhaustive and agree.
    Equal,
    /// Words (by terminal names) found on one side and certainly absent on
    /// the other.
    Differs(Vec<(Vec<String>, Side)>),
    /// Agreement so far, but at least one search was cut short.
    Inconclusive,
}

fn named(g: &Grammar, f: &Fragment) -> BTreeSet<Vec<String>> {
    f.words
        .iter()
        .map(|w| w.0.iter().map(|&s| g.name(s).to_owned()).collect())
        .collect()
}

/// Compares two fragments. A word missing from a non-exhaustive side is not
/// evidence of a difference.
pub fn compare_fragments(a: &Grammar, fa: &Fragment, b: &Grammar, fb: &Fragment) -> Verdict {
    let (wa, wb) = (named(a, fa), named(b, fb));
    let mut diff: Vec<(Vec<String>, Side)> = Vec::new();
    if fb.exhaustive {
        diff.extend(wa.difference(&wb).map(|w| (w.clone(), Side::Left)));
    }
    if fa.exhaustive {
        diff.extend(wb.difference(&wa).map(|w| (w.clone(), Side::Right)));
    }
    if !diff.is_empty() {
        diff.sort_by(|x, y| x.0.len().cmp(&y.0.len()).then_with(|| x.cmp(y)));
        diff.truncate(MAX_REPORTED);
        Verdict::Differs(diff)
    } else if fa.exhaustive && fb.exhaustive {
        Verdict::Equal
    } else {
        Verdict::Inconclusive
    }
}

/// The fragment a grammar file denotes: regulated semantics when it has
/// matrices, capacity-bounded derivations otherwise.
pub fn fragment_of(f: &GrammarFile, b: &SearchBudget, opts: RegulatedOptions) -> Result<Fragment, RegulatedError> {
    match &f.regulated {
        Some(rg) => Ok(enumerate_regulated(rg, b, opts)?.fragment()),
        None => Ok(enumerate_language(&f.grammar, &f.capacity, b)?.fragment()),
    }
}

pub fn check_equal(
    a: &GrammarFile,
    b: &GrammarFile,
    budget: &SearchBudget,
    opts: RegulatedOptions,
) -> Result<Verdict, RegulatedError> {
    let fa = fragment_of(a, budget, opts)?;
    let fb = fragment_of(b, budget, opts)?;
    Ok(compare_fragments(&a.grammar, &fa, &b.grammar, &fb))
}
