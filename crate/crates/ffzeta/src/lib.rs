//! Exact zeta and L-functions of elliptic curves over rational function
//! fields F_q(t), and of the elliptic surfaces they spread out to.
//!
//! The crate computes by point counting: local reduction data via Tate's
//! algorithm (tame case, p >= 5), the L-function as an Euler product with
//! exact rational reconstruction, the zeta function of the associated
//! elliptic surface, and then verifies the classical identities tying the
//! two together (the motivic factorization of the L-function, the
//! divisor-class correction between surface zeta and curve L-function, the
//! functional-equation exponent, and the analytic-rank inequality).
//!
//! All algebra away from complex root certification is exact; the counting
//! kernels are the only performance-sensitive code.

pub mod counting;
pub mod fields;
pub mod fpoly;
pub mod lseries;
pub mod motives;
pub mod places;
pub mod qpoly;
pub mod reduction;
pub mod report;
pub mod surface;
