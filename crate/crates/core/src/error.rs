use thiserror::Error;

use crate::grammar::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("invalid grammar: {0}")]
    Invalid(ValidationReport),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("lhs of rule {label} does not occur at position {pos}")]
    LhsMismatch { label: String, pos: usize },
    #[error("form {index} does not follow from its predecessor in one step")]
    NotAdjacent { index: usize },
    #[error("capacity function does not match the grammar's nonterminal alphabet")]
    CapacityMismatch,
    #[error("search budget: max_form_len ({form}) is below max_terminal_len ({terminal})")]
    Budget { form: usize, terminal: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegulatedError {
    #[error("regulated grammars need a context-free base grammar")]
    NotContextFree,
    #[error("matrix {0} is empty")]
    EmptyMatrix(String),
    #[error("matrix {matrix} references unknown rule {rule}")]
    UnknownRule { matrix: String, rule: String },
    #[error("matrix label {0} used twice")]
    DuplicateMatrix(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PetriError {
    #[error("unknown transition #{0}")]
    UnknownTransition(usize),
    #[error("unknown place #{0}")]
    UnknownPlace(usize),
    #[error("name `{0}` is used twice")]
    DuplicateName(String),
    #[error("arc weight must be positive")]
    ZeroWeight,
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
    #[error("marking or capacity does not cover exactly the net's places")]
    DomainMismatch,
}

/// Why an occurrence sequence stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepFailure {
    InsufficientInput { place: String },
    CapacityOverflow { place: String },
    UnknownTransition,
}

impl std::fmt::Display for StepFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepFailure::InsufficientInput { place } => {
                write!(f, "insufficient input tokens on {place}")
            }
            StepFailure::CapacityOverflow { place } => write!(f, "capacity overflow on {place}"),
            StepFailure::UnknownTransition => f.write_str("unknown transition"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {reason}")]
pub struct RunError {
    /// 1-based index into the sequence.
    pub step: usize,
    pub reason: StepFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetBuildError {
    #[error("cf Petri nets need a context-free grammar")]
    NotContextFree,
    #[error("capacity of {0} is unbounded")]
    UnboundedCapacity(String),
    #[error("capacity function does not match the grammar")]
    CapacityMismatch,
    #[error("part {0} is empty")]
    EmptyPart(String),
    #[error("rule {0} is not in any part")]
    Uncovered(String),
    #[error("rule {0} appears in more than one part")]
    Overlap(String),
    #[error("unknown rule label {0}")]
    UnknownRule(String),
    #[error("capacity mode: {0}")]
    CapacityMode(String),
    #[error(transparent)]
    Petri(#[from] PetriError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("capacity of {0} is unbounded")]
    UnboundedCapacity(String),
    #[error("construction requires capacity 1")]
    NotCapacityOne,
    #[error("construction requires a context-free grammar")]
    NotContextFree,
    #[error("construction requires a vector grammar")]
    NotVectorMode,
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("generated alphabet would exceed the symbol budget ({budget})")]
    SymbolBudget { budget: usize },
    #[error("homomorphism maps unknown terminal {0}")]
    UnknownTerminal(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Regulated(#[from] RegulatedError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            message: message.into(),
        }
    }
}
