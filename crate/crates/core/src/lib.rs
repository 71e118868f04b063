//! Tensor grammars: tensor terms, the tensor type calculus and its
//! extension with binders, and the embeddings of abstract categorial
//! grammars and Lambek grammars into them.

pub mod engine;
pub mod ettc;
pub mod lambda_acg;
pub mod lambek;
pub mod selftest;
pub mod syntax;
pub mod term;
pub mod ttc;
