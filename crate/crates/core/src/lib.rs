pub mod dl_engine;
pub mod exec;
pub mod fgl;
pub mod field;
pub mod mu_homology;
pub mod powerop;
pub mod report;
pub mod scalar;
pub mod series;
pub mod suites;
