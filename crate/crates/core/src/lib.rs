//! Perception stack for a physiologically informed lower-limb exoskeleton.
//!
//! The crate covers the full offline-to-online path for three decoding
//! tasks driven by a multimodal leg-sleeve sensor set (surface EMG, IMU,
//! textile strain, FSR insole):
//!
//! * [`signals`] — time-series data model, session recordings, bundle I/O
//! * [`dsp`] — causal Butterworth conditioning and windowed features
//! * [`synth`] — deterministic synthetic gait/physiology generator
//! * [`datasets`] — task windowing, labeling rules, LOSO folds
//! * [`nn`] — minimal tensor/autograd engine (conv1d, SE, residual, losses, Adam)
//! * [`decoders`] — the three task models (joint moment, metabolic trend, risk)
//! * [`runtime`] — streaming pipeline with 5 Hz UDP/JSON status packets
//! * [`eval`] — metrics, LOSO harness, reports and SVG plots
//!
//! Everything is deterministic given explicit seeds; the `parallel` feature
//! (on by default) enables rayon data-parallel paths that are bit-identical
//! to the sequential fallback.

pub mod datasets;
pub mod decoders;
pub mod dsp;
pub mod eval;
pub mod nn;
pub mod par;
pub mod rng;
pub mod runtime;
pub mod signals;
pub mod synth;
