//! Algebraic theories, presented algebras over F_p, and the duality checks.

pub mod duality;
pub mod groebner;
pub mod poly;
pub mod presented;
pub mod theory;

#[cfg(test)]
mod tests;

pub use duality::{
    builtin_stage, check_duality_axiom, check_local_representability, check_nullity_axiom, check_spec_projectivity, spec_instance,
    DualityOutcome, SpecInstance, StageSite,
};
pub use groebner::{groebner_basis, is_member, normal_form};
pub use poly::{Poly, PolyRing};
pub use presented::{
    eval_term, hom_enum, hom_enum_fixing, parse_presentation, presented_algebra, presented_table_model, pushout_extend, spec_levelwise,
    AlgebraHom, Presentation, PresentationFile, PresentedAlgebra, Pushout,
};
pub use theory::{free_model, free_model_eval, parse_table_theory, Algebra, FiniteModel, TableTheory, Term, TheorySignature};
