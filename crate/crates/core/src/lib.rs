//! Iterated path integrals of logarithmic forms on the universal vectorial
//! extension `E†` of an elliptic curve, with the exact bar-complex algebra
//! that certifies homotopy invariance, and the genus-zero model on
//! `ℙ¹ ∖ {0, 1, ∞}` as a reference instance.

pub mod barcx;
pub mod chenint;
pub mod cli;
pub mod exact;
pub mod kzbword;
pub mod linalg;
pub mod logforms;
pub mod oracle;
pub mod p1model;
pub mod verify;
pub mod wlattice;

pub use num_complex::Complex64 as C64;
