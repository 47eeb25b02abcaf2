//! Causal models with non-causal constraints.
//!
//! A [`ConstrainedModel`](model::ConstrainedModel) pairs partial structural
//! equations with a constraint set over extended states. Formulas such as
//! `[disc(TC), TF <- 104](HS = 1)` are evaluated against every solution of the
//! intervened model that the constraints admit.
//!
//! ```
//! use ccm_core::{fixtures, semantics::evaluate, syntax::{parse_context, parse_formula, parse_model}};
//!
//! let model = parse_model(fixtures::TEMPERATURE).unwrap();
//! let u = parse_context("U=35").unwrap();
//! let f = parse_formula("<TC <- 40>(HS = 1)", &model.signature).unwrap();
//! assert!(evaluate(&model, &u, &f).unwrap());
//! ```

pub mod fixtures;
pub mod formula;
pub mod lab;
pub mod model;
pub mod rewrite;
pub mod semantics;
pub mod syntax;
pub mod value;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/semantics.md")]
    mod semantics {}
    #[doc = include_str!("../../../book/src/examples.md")]
    mod examples {}
    #[doc = include_str!("../../../book/src/rewrite.md")]
    mod rewrite {}
    #[doc = include_str!("../../../book/src/axioms.md")]
    mod axioms {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
