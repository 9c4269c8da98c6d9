//! Exact computations with integral highest-weight modules of split simple Lie
//! algebras, their p-power truncations, and slope bounds for normalised Hecke
//! operators on the cohomology of congruence subgroups of SL₂(Z).

pub mod acceptance;
pub mod arithcoh;
pub mod cli;
pub mod hwmod;
pub mod linalg;
pub mod modular;
pub mod pbw;
pub mod rootsys;
pub mod slopes;
pub mod trunc;
