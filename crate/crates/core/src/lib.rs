pub mod code;
pub mod decoder;
pub mod group;
pub mod lattice;
pub mod logical;
pub mod pauli;
pub mod scattering;
