pub mod cesaro;
pub mod error;
pub mod formula;
pub mod generators;
pub mod ideal_quotient;
pub mod job;
pub mod lattice;
pub mod literal;
pub mod measurable_fn;
pub mod numeric;
pub mod oracle;
pub mod profile;
pub mod rearrangement;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod spaces;
pub mod suite;
