//! The grammars shipped in `fixtures/`, compiled in.

use crate::grammar::{Grammar, GrammarSpec};
use crate::text::parse_grammar;

pub const EX31: &str = include_str!("../../../fixtures/ex31.gr");
pub const EX32: &str = include_str!("../../../fixtures/ex32.gr");
pub const EX_SEC2: &str = include_str!("../../../fixtures/ex-sec2.gr");
pub const EX_SEC2_PART: &str = include_str!("../../../fixtures/ex-sec2.part");

fn load(text: &str) -> Grammar {
    parse_grammar(text).expect("bundled fixture parses").grammar
}

/// `{aⁿbⁿcⁿ}` under capacity 1; not context-free.
pub fn ex31() -> Grammar {
    load(EX31)
}

pub fn ex31_spec() -> GrammarSpec {
    ex31().to_spec()
}

/// Context-free; under capacity 1 its language is not context-free.
pub fn ex32() -> Grammar {
    load(EX32)
}

/// `S → AB`, `A, B → λ | aX | bX`.
pub fn ex_sec2() -> Grammar {
    load(EX_SEC2)
}
