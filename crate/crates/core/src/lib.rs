pub mod catalog;
pub mod demo;
pub mod inputs;
pub mod intpoly;
pub mod isometry;
pub mod lattice;
pub mod matrix;
pub mod rational;
pub mod search;
