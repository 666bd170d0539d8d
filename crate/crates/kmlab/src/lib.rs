//! Numerical laboratory for pivot laws of compact and Gaussian matrix
//! ensembles, Grassmannian measures, Kostant–Toda flows and Toeplitz
//! weights of loops.

pub mod cfunc;
pub mod diagdist;
pub mod ensembles;
pub mod grassmann;
pub mod linalg;
pub mod looptoeplitz;
pub mod mc;
pub mod report;
pub mod special;
pub mod spherical;
pub mod suites;
pub mod toda;
