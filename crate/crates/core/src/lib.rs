//! Exact computations with elementary matrix factorizations of a
//! critically-finite potential over a Bézout domain.
//!
//! Everything is done in factored form: ring elements up to units are prime
//! exponent maps, and divisors of the potential are exponent vectors.

pub mod classify;
pub mod divgroups;
pub mod divisors;
pub mod error;
pub mod factorizations;
pub mod homology;
pub mod invariants;
pub mod matrix;

pub use classify::{
    count_classes, count_classes_literal, count_essential, enumerate_classes, grading_split, normal_form,
    primary_decompose, ClassCensus, Grading, KrullSchmidtForm, LiteralDiagnostic, PrimaryPart, Summand,
};
pub use divisors::{
    factor_integer, gcd, lcm, parse_element, Backend, FactoredElement, NormalizedDivisor, Potential, Prime, Sign,
};
pub use error::{Error, Result};
pub use factorizations::{ElementaryFactorization, GradedMorphismMatrix, MatrixFactorization, Parity};
pub use homology::{alpha, alpha_alt, hom_module, iso_witness, GcdDecomposition, HomModuleDescription};
pub use invariants::{
    essence, essential_reduction, invariant, invariant_of, iso_even, iso_graded, iso_odd, DivisorialInvariant,
    EvenDivisorialInvariant, InvariantData,
};
pub use matrix::Matrix;
