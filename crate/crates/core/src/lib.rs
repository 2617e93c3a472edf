//! Symbolic machinery for braid closures: degree-0 abelianized knot contact
//! homology presentations, augmentation ideals via Groebner elimination, the
//! quantum torus acting on colored-invariant sequences, and HOMFLYPT
//! evaluation through the Hecke algebra.

pub mod braid;
pub mod homfly;
pub mod ideal;
pub mod ngalg;
pub mod poly;
pub mod qtorus;
