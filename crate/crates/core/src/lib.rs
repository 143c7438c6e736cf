//! Spiking threshold-gate circuits for exhaustive epistasis detection.
//!
//! * [`snn`]: exact discrete-time simulator, hardware profiles, validation.
//! * [`circuit`]: parity, counting, summing, memory and repeater circuits.
//! * [`oracle`]: brute-force references.
//! * [`epistasis`]: datasets, contingency tables and the detection pipeline.

pub mod circuit;
pub mod epistasis;
pub mod oracle;
pub mod snn;
