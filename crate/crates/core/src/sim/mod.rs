//! Turbo-equalization loop, Monte-Carlo BER sweeps and SNR calibration.

mod calibrate;
mod exec;
mod frame;
mod report;
mod sweep;

pub use calibrate::{calibrate_uncoded, calibrate_uncoded_sigma2, q_function, CalibrationPoint, MIN_CALIBRATION_BITS};
pub use frame::{run_frame, FrameRunner};
pub use report::{fmt_float, write_csv, CSV_HEADER};
pub use sweep::{run_sweep, run_sweep_with, BerRecord, Execution};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chan::channel_registry;
use crate::convcode::CodeSpec;
use crate::error::{Error, Result};
use crate::llr::BoxPlus;
use crate::mapdec::{Algorithm, DecoderAlgo};
use crate::permute::{InterleaverSpec, PunctureSpec};

/// Frame layout from info bits to QPSK symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrameConfig {
    pub info_bits: usize,
    /// Termination bits appended by the encoder (`K − 1`).
    pub tail: usize,
    pub puncture: PunctureSpec,
    pub interleaver: InterleaverSpec,
}

impl Default for FrameConfig {
    /// 252 + 4 bits → 512 coded → 1110 → 384 → 16×24 → 192 symbols.
    fn default() -> Self {
        FrameConfig {
            info_bits: 252,
            tail: 4,
            puncture: "1110".parse().expect("valid pattern"),
            interleaver: InterleaverSpec::new(16, 24).expect("valid interleaver"),
        }
    }
}

impl FrameConfig {
    pub fn coded_bits(&self, code: &CodeSpec) -> usize {
        code.n_outputs() * (self.info_bits + self.tail)
    }

    pub fn punctured_bits(&self, code: &CodeSpec) -> usize {
        self.puncture.kept(self.coded_bits(code))
    }

    /// QPSK symbols per frame (half the interleaver size).
    pub fn n_symbols(&self) -> usize {
        self.interleaver.len() / 2
    }

    /// Info bits per channel bit.
    pub fn effective_rate(&self) -> f64 {
        self.info_bits as f64 / (2 * self.n_symbols()) as f64
    }

    pub fn validate(&self, code: &CodeSpec) -> Result<()> {
        if self.info_bits == 0 {
            return Err(Error::Config("info_bits must be positive".into()));
        }
        if self.tail != code.memory() {
            return Err(Error::Config(format!(
                "tail = {} but a zero-terminated K = {} code needs {}",
                self.tail,
                code.constraint_length(),
                code.memory()
            )));
        }
        let coded = self.coded_bits(code);
        let punctured = self.punctured_bits(code);
        if punctured != self.interleaver.len() {
            return Err(Error::Config(format!(
                "frame arithmetic: {} info + {} tail → {coded} coded → pattern {} keeps {punctured}, \
                 but interleaver {} holds {}",
                self.info_bits,
                self.tail,
                self.puncture,
                self.interleaver,
                self.interleaver.len()
            )));
        }
        if !punctured.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "frame arithmetic: {punctured} punctured bits is odd, QPSK needs pairs"
            )));
        }
        Ok(())
    }
}

/// Converts Eb/N0 in dB to the complex noise variance for unit-energy symbols.
pub fn ebn0_to_sigma2(ebn0_db: f64, frame: &FrameConfig) -> f64 {
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let esn0 = ebn0 * 2.0 * frame.effective_rate();
    1.0 / esn0
}

/// Everything a sweep needs.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub code: CodeSpec,
    pub channel: String,
    pub algorithms: Vec<Algorithm>,
    pub iterations: usize,
    pub frame: FrameConfig,
    pub ebn0_db: Vec<f64>,
    pub min_bit_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub decoder: DecoderAlgo,
    pub boxplus: BoxPlus,
    pub sbvp_subtract_input: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            code: CodeSpec::default_k5(),
            channel: "none".into(),
            algorithms: vec![Algorithm::CodMap, Algorithm::MapSbvp],
            iterations: 4,
            frame: FrameConfig::default(),
            ebn0_db: vec![0.0, 2.0, 4.0, 6.0],
            min_bit_errors: 100,
            max_frames: 2000,
            seed: 1,
            decoder: DecoderAlgo::LogMap,
            boxplus: BoxPlus::Approx,
            sbvp_subtract_input: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.frame.validate(&self.code)?;
        channel_registry(&self.channel)?;
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithm selected".into()));
        }
        if self.max_frames == 0 {
            return Err(Error::Config("max_frames must be positive".into()));
        }
        if let Some(bad) = self.ebn0_db.iter().find(|x| !x.is_finite()) {
            return Err(Error::Config(format!("non-finite Eb/N0 value {bad}")));
        }
        Ok(())
    }
}

/// Per-frame random stream: ChaCha8 keyed from the master seed, with the
/// frame index as stream id.
pub fn frame_rng(master_seed: u64, frame_idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(frame_idx);
    rng
}
