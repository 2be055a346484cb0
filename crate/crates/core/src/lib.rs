//! Simulator for MMSE turbo equalization over ISI channels, comparing two
//! ways of generating the decoder's extrinsic information:
//!
//! * **COD-MAP**: BCJR a-posteriori LLRs of the coded bits minus the
//!   decoder input.
//! * **MAP-SBVP**: BCJR a-posteriori LLRs of the info bits, re-encoded by a
//!   soft convolutional encoder in which every XOR is a box-plus.
//!
//! The receiver chain is QPSK over a static FIR channel with AWGN, an exact
//! prior-aware linear MMSE equalizer, block deinterleaving and
//! depuncturing, and a log-domain BCJR decoder.

pub mod chan;
pub mod convcode;
pub mod error;
pub mod llr;
pub mod mapdec;
pub mod mmse;
pub mod permute;
pub mod sim;

pub use error::{Error, Result};
pub use llr::{hard_decide, sign, soft_xor_approx, soft_xor_exact, Bit, BoxPlus, ComplexSample, Llr, LLR_MAX};
