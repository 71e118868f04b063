//! Tensor type calculus: types, judgements, the four rules, derivation
//! checking, cut elimination and cut-free proof search.

mod cut;
mod deduction;
mod derivation;
mod prove;
mod types;

pub use cut::{eliminate_cut, CutError};
pub(crate) use deduction::assemble;
pub use deduction::{
    from_axioms, tile_words, Budget, DeductionError, PackedAxiom, SearchOutcome, Tiling,
};
pub use derivation::{
    apply_rule, build_from_script, check, eta_identity, id_axiom, id_rule_for, par_inverse,
    AxiomPool, CheckError, Derivation, Mode, ParInverseError, Rule, RuleError,
};
pub use prove::prove;
pub(crate) use prove::{id_leaf, sub_judgement, tensor_partitions, tensor_step};
pub use types::{
    identity_term, literal_balance, Binding, CanonicalJudgement, Judgement, JudgementError,
    Literal, LiteralSlots, Split, Symbol, SymbolDisplay, TensorType, TypeError, Valency,
};

/// `B ℘ Ā`, failing when the two types share an index.
pub fn implication(a: &TensorType, b: &TensorType) -> Result<TensorType, TypeError> {
    TensorType::par(b, &a.dual())
}

/// Dual of a tensor type.
pub fn dual(a: &TensorType) -> TensorType {
    a.dual()
}
