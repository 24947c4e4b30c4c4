pub mod channels;
pub mod conditions;
pub mod control_synth;
pub mod error;
pub mod numerics;
pub mod qfi;
pub mod scenarios;
pub mod spectral;
pub mod tolerances;
