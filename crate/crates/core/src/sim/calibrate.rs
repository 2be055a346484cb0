use rand::Rng;

use super::frame_rng;
use crate::chan::{add_awgn, qpsk_hard_demap, qpsk_modulate, NoiseSpec};
use crate::error::{Error, Result};
use crate::llr::Bit;

pub const MIN_CALIBRATION_BITS: u64 = 100_000;

const CHUNK_SYMBOLS: u64 = 1 << 16;

/// Measured versus theoretical uncoded QPSK BER.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationPoint {
    pub ebn0_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub measured: f64,
    pub theory: f64,
    /// Monte-Carlo standard deviation of the estimate under the theoretical BER.
    pub mc_sigma: f64,
}

impl CalibrationPoint {
    /// `|measured − theory|` in units of `mc_sigma`.
    pub fn deviation_sigmas(&self) -> f64 {
        if self.mc_sigma == 0.0 {
            return if self.measured == self.theory { 0.0 } else { f64::INFINITY };
        }
        (self.measured - self.theory).abs() / self.mc_sigma
    }
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Uncoded QPSK over AWGN with hard slicing, checked against `Q(√(2·Eb/N0))`.
pub fn calibrate_uncoded(ebn0_db: f64, bits: u64, seed: u64) -> Result<CalibrationPoint> {
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    // Es = 2·Eb for uncoded QPSK at unit symbol energy.
    let sigma2 = 1.0 / (2.0 * ebn0);
    let mut point = calibrate_uncoded_sigma2(sigma2, bits, seed)?;
    point.ebn0_db = ebn0_db;
    point.theory = q_function((2.0 * ebn0).sqrt());
    point.mc_sigma = (point.theory * (1.0 - point.theory) / bits as f64).sqrt();
    Ok(point)
}

/// Same chain at an explicit noise variance (zero allowed). Theory fields
/// are filled for `sigma2 = 0` only.
pub fn calibrate_uncoded_sigma2(sigma2: f64, bits: u64, seed: u64) -> Result<CalibrationPoint> {
    if bits < MIN_CALIBRATION_BITS {
        return Err(Error::Config(format!(
            "calibration needs at least {MIN_CALIBRATION_BITS} bits, got {bits}"
        )));
    }
    if !bits.is_multiple_of(2) {
        return Err(Error::OddBitCount(bits as usize));
    }
    let noise = NoiseSpec::new(sigma2)?;
    let symbols = bits / 2;
    let mut errors = 0u64;
    let mut done = 0u64;
    let mut chunk_idx = 0u64;
    while done < symbols {
        let n = CHUNK_SYMBOLS.min(symbols - done);
        let mut rng = frame_rng(seed, chunk_idx);
        let tx: Vec<Bit> = (0..2 * n).map(|_| Bit::from(rng.random::<bool>())).collect();
        let rx = add_awgn(&qpsk_modulate(&tx)?, noise, &mut rng);
        errors += qpsk_hard_demap(&rx)
            .iter()
            .zip(&tx)
            .filter(|(a, b)| a != b)
            .count() as u64;
        done += n;
        chunk_idx += 1;
    }
    Ok(CalibrationPoint {
        ebn0_db: f64::INFINITY,
        bits,
        errors,
        measured: errors as f64 / bits as f64,
        theory: 0.0,
        mc_sigma: 0.0,
    })
}
