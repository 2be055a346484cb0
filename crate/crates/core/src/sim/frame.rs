use rand::Rng;

use super::{ebn0_to_sigma2, frame_rng, SimConfig};
use crate::chan::{add_awgn, apply_channel, channel_registry, qpsk_modulate, ChannelModel, NoiseSpec};
use crate::convcode::{build_trellis, encode, Trellis};
use crate::error::{Error, Result};
use crate::llr::{Bit, Llr};
use crate::mapdec::{bcjr, extrinsic, Algorithm, DecoderInput, SbvpOptions};
use crate::mmse::{equalize, EqualizerInput, LlrPair};
use crate::permute::{deinterleave, depuncture, interleave, puncture};

/// Validated configuration with the trellis and channel resolved, ready to
/// simulate frames.
#[derive(Clone, Debug)]
pub struct FrameRunner {
    config: SimConfig,
    trellis: Trellis,
    channel: ChannelModel,
}

impl FrameRunner {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        Ok(FrameRunner {
            trellis: build_trellis(&config.code)?,
            channel: channel_registry(&config.channel)?,
            config: config.clone(),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Bit errors of the hard info decisions after each iteration.
    pub fn run(&self, algorithm: Algorithm, ebn0_db: f64, frame_idx: u64) -> Result<Vec<u64>> {
        let sigma2 = ebn0_to_sigma2(ebn0_db, &self.config.frame);
        self.run_traced(algorithm, sigma2, frame_idx, None)
    }

    /// As [`run`](Self::run), also recording the equalizer priors used at
    /// every iteration.
    pub fn run_with_priors(
        &self,
        algorithm: Algorithm,
        ebn0_db: f64,
        frame_idx: u64,
    ) -> Result<(Vec<u64>, Vec<Vec<LlrPair>>)> {
        let sigma2 = ebn0_to_sigma2(ebn0_db, &self.config.frame);
        let mut trace = Vec::new();
        let errors = self.run_traced(algorithm, sigma2, frame_idx, Some(&mut trace))?;
        Ok((errors, trace))
    }

    fn run_traced(
        &self,
        algorithm: Algorithm,
        sigma2: f64,
        frame_idx: u64,
        mut trace: Option<&mut Vec<Vec<LlrPair>>>,
    ) -> Result<Vec<u64>> {
        let cfg = &self.config;
        let frame = &cfg.frame;
        let code = &cfg.code;
        let coded_len = frame.coded_bits(code);

        // The stream is keyed by frame index only, so every algorithm sees
        // the same message and noise.
        let mut rng = frame_rng(cfg.seed, frame_idx);
        let info: Vec<Bit> = (0..frame.info_bits).map(|_| Bit::from(rng.random::<bool>())).collect();
        let coded = encode(&info, code, true)?;
        let tx_bits = interleave(&puncture(&coded, &frame.puncture), &frame.interleaver)?;
        let symbols = qpsk_modulate(&tx_bits)?;
        let received = add_awgn(
            &apply_channel(&symbols, &self.channel),
            NoiseSpec::new(sigma2)?,
            &mut rng,
        );

        let sbvp = SbvpOptions {
            boxplus: cfg.boxplus,
            subtract_input: cfg.sbvp_subtract_input,
        };
        let mut priors = vec![LlrPair::default(); symbols.len()];
        let mut errors = Vec::with_capacity(cfg.iterations);
        for it in 0..cfg.iterations {
            if let Some(t) = trace.as_deref_mut() {
                t.push(priors.clone());
            }
            let eq = equalize(&EqualizerInput {
                received: &received,
                channel: &self.channel,
                sigma2,
                priors: &priors,
            })?;
            let flat = deinterleave(&LlrPair::flatten(&eq.extrinsic), &frame.interleaver)?;
            let input = DecoderInput::new(depuncture(&flat, &frame.puncture, coded_len)?);
            let decoded = bcjr(&input, &self.trellis, cfg.decoder)?;
            errors.push(
                decoded
                    .info_hard
                    .iter()
                    .zip(&info)
                    .filter(|(a, b)| a != b)
                    .count() as u64,
            );
            if it + 1 < cfg.iterations {
                let ext = extrinsic(algorithm, &decoded, &input, code, sbvp)?;
                let fed: Vec<Llr> = interleave(&puncture(&ext, &frame.puncture), &frame.interleaver)?;
                priors = LlrPair::pairs(&fed).ok_or_else(|| {
                    Error::Config(format!("odd extrinsic length {}", fed.len()))
                })?;
            }
        }
        Ok(errors)
    }
}

/// Simulates one frame; see [`FrameRunner::run`].
pub fn run_frame(config: &SimConfig, algorithm: Algorithm, ebn0_db: f64, frame_idx: u64) -> Result<Vec<u64>> {
    FrameRunner::new(config)?.run(algorithm, ebn0_db, frame_idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(channel: &str) -> SimConfig {
        SimConfig {
            channel: channel.into(),
            ..SimConfig::default()
        }
    }

    #[test]
    fn noise_free_identity_channel_decodes() {
        let cfg = config("none");
        for alg in [Algorithm::CodMap, Algorithm::MapSbvp] {
            for idx in 0..5 {
                let e = run_frame(&cfg, alg, 40.0, idx).unwrap();
                assert_eq!(e, vec![0; 4]);
            }
        }
    }

    #[test]
    fn deterministic_per_frame() {
        let cfg = config("c");
        let runner = FrameRunner::new(&cfg).unwrap();
        let a = runner.run(Algorithm::MapSbvp, 3.0, 17).unwrap();
        let b = runner.run(Algorithm::MapSbvp, 3.0, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|&e| e <= 252));
    }

    #[test]
    fn first_iteration_priors_are_zero_and_algorithm_independent() {
        let cfg = config("b");
        let runner = FrameRunner::new(&cfg).unwrap();
        let (e_cod, p_cod) = runner.run_with_priors(Algorithm::CodMap, 2.0, 3).unwrap();
        let (e_sbvp, p_sbvp) = runner.run_with_priors(Algorithm::MapSbvp, 2.0, 3).unwrap();
        assert!(p_cod[0].iter().all(|p| *p == LlrPair::default()));
        assert_eq!(p_cod.len(), 4);
        // Same noise realization: identical first pass.
        assert_eq!(e_cod[0], e_sbvp[0]);
        assert_eq!(p_cod[0], p_sbvp[0]);
        assert_ne!(p_cod[1], p_sbvp[1]);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = config("none");
        cfg.frame.info_bits = 250;
        assert!(matches!(FrameRunner::new(&cfg), Err(Error::Config(_))));
    }
}
