pub mod algebra;
pub mod covalg;
pub mod description;
pub mod error;
pub mod hom;
pub mod ktheory;
pub mod linalg;
pub mod report;
pub mod reprs;
pub mod structure;
pub mod suite;
pub mod toeplitz;
pub mod wedderburn;
