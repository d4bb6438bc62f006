//! Capacity-bounded grammars, regulated rewriting and Petri-net-controlled
//! derivations, with bounded enumeration of language fragments.

pub mod derive;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod grammar;
pub mod petri;
pub mod regulated;
pub mod search;
pub mod text;
pub mod cfnet;
pub mod dot;
pub mod equiv;
pub mod transforms;
