use std::cmp::Ordering;

use super::exec::{map_ordered, with_threads};
use super::frame::FrameRunner;
use super::SimConfig;
use crate::error::Result;
use crate::mapdec::Algorithm;

/// Frames simulated per scheduling round. The stop rule is evaluated frame
/// by frame in index order afterwards, so this only affects wasted work.
const BATCH: u64 = 32;

/// BER at one (channel, algorithm, Eb/N0, iteration) point.
#[derive(Clone, Debug, PartialEq)]
pub struct BerRecord {
    pub channel: String,
    pub algorithm: Algorithm,
    pub ebn0_db: f64,
    /// 1-based.
    pub iteration: usize,
    pub frames: u64,
    pub info_bits_counted: u64,
    pub bit_errors: u64,
    pub ber: f64,
}

impl BerRecord {
    /// Binomial standard error of the BER estimate.
    pub fn std_error(&self) -> f64 {
        if self.info_bits_counted == 0 {
            return 0.0;
        }
        (self.ber * (1.0 - self.ber) / self.info_bits_counted as f64).sqrt()
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.channel
            .cmp(&other.channel)
            .then(self.algorithm.name().cmp(other.algorithm.name()))
            .then(self.ebn0_db.total_cmp(&other.ebn0_db))
            .then(self.iteration.cmp(&other.iteration))
    }
}

/// How frames are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Execution {
    /// Worker count; `None` uses every core. Ignored without the
    /// `parallel` feature.
    pub threads: Option<usize>,
}

impl Execution {
    pub fn sequential() -> Self {
        Execution { threads: Some(1) }
    }

    fn parallel(&self) -> bool {
        cfg!(feature = "parallel") && self.threads != Some(1)
    }
}

/// Runs every (Eb/N0, algorithm) point of the config on all cores.
pub fn run_sweep(config: &SimConfig) -> Result<Vec<BerRecord>> {
    run_sweep_with(config, Execution::default())
}

/// Runs the sweep; the result does not depend on `exec`.
///
/// Each point accumulates frames `0, 1, 2, ..` until every iteration has
/// seen `min_bit_errors` errors or `max_frames` frames were run.
pub fn run_sweep_with(config: &SimConfig, exec: Execution) -> Result<Vec<BerRecord>> {
    let runner = FrameRunner::new(config)?;
    let mut records = with_threads(exec.threads, || -> Result<Vec<BerRecord>> {
        let mut records = Vec::new();
        for &ebn0 in &config.ebn0_db {
            for &alg in &config.algorithms {
                records.extend(run_point(&runner, alg, ebn0, exec.parallel())?);
            }
        }
        Ok(records)
    })?;
    records.sort_by(BerRecord::sort_key_cmp);
    Ok(records)
}

fn run_point(runner: &FrameRunner, alg: Algorithm, ebn0: f64, parallel: bool) -> Result<Vec<BerRecord>> {
    let cfg = runner.config();
    let mut errors = vec![0u64; cfg.iterations];
    let mut frames = 0u64;
    let done = |errors: &[u64], frames: u64| {
        frames >= cfg.max_frames || errors.iter().all(|&e| e >= cfg.min_bit_errors)
    };
    'outer: while !done(&errors, frames) {
        let end = (frames + BATCH).min(cfg.max_frames);
        let batch = map_ordered(frames..end, parallel, |idx| runner.run(alg, ebn0, idx));
        for per_iter in batch {
            for (acc, e) in errors.iter_mut().zip(per_iter?) {
                *acc += e;
            }
            frames += 1;
            if done(&errors, frames) {
                break 'outer;
            }
        }
    }
    let bits = frames * cfg.frame.info_bits as u64;
    Ok(errors
        .iter()
        .enumerate()
        .map(|(i, &bit_errors)| BerRecord {
            channel: cfg.channel.clone(),
            algorithm: alg,
            ebn0_db: ebn0,
            iteration: i + 1,
            frames,
            info_bits_counted: bits,
            bit_errors,
            ber: if bits == 0 { 0.0 } else { bit_errors as f64 / bits as f64 },
        })
        .collect())
}
