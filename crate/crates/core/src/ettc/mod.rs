//! Extended calculus: the `∇`/`△` binders on top of the plain calculus.
//!
//! Symbols, rules and derivations are shared with [`crate::ttc`]; this
//! module adds the admissible rules, proof search with binders,
//! lexicalization of axioms and the lexicalized deduction theorem.

mod lexicalize;
mod linking;
mod prove;
mod rules;

pub use lexicalize::{
    ext_from_axioms, ext_from_axioms_with, lexicalize, LexicalizeError, Lexicalized,
};
pub use linking::may_be_derivable;
pub use prove::{ext_prove, ext_prove_with, FailureCache};
pub use rules::{nabla_inverse, slash_elim, ExtRuleError, SlashSide};

use crate::ttc::{self, CheckError, CutError, Derivation, Judgement, Mode, TensorType};

/// Dual of an extended type; swaps `∇` and `△` on the matching slots.
pub fn ext_dual(a: &TensorType) -> TensorType {
    a.dual()
}

pub fn ext_check(
    d: &Derivation,
    axioms: &ttc::AxiomPool,
    mode: Mode,
) -> Result<Judgement, CheckError> {
    ttc::check(d, axioms, mode)
}

pub fn ext_eliminate_cut(d: &Derivation, mode: Mode) -> Result<Derivation, CutError> {
    ttc::eliminate_cut(d, mode)
}
