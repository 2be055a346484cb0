//! QPSK mapping, ISI channel convolution, AWGN and the test channel registry.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::llr::{Bit, ComplexSample};

const BUILTIN_CHANNELS: &str = include_str!("../data/channels.txt");

/// Static FIR channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelModel {
    pub label: String,
    pub taps: Vec<ComplexSample>,
    pub provenance: String,
}

impl ChannelModel {
    pub fn new(label: impl Into<String>, taps: Vec<ComplexSample>) -> Result<Self> {
        let label = label.into();
        if taps.is_empty() {
            return Err(Error::Config(format!("channel '{label}' has no taps")));
        }
        if taps.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
            return Err(Error::Config(format!("channel '{label}' has non-finite taps")));
        }
        Ok(ChannelModel {
            label,
            taps,
            provenance: String::new(),
        })
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }

    /// Scales the taps to unit energy.
    pub fn normalized(mut self) -> Self {
        let scale = self.energy().sqrt().recip();
        self.taps.iter_mut().for_each(|t| *t *= scale);
        self
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn has_real_taps(&self) -> bool {
        self.taps.iter().all(|t| t.im == 0.0)
    }

    /// Magnitude response sampled at `points` equally spaced frequencies.
    pub fn magnitude_response(&self, points: usize) -> Vec<f64> {
        (0..points)
            .map(|k| {
                let w = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
                self.taps
                    .iter()
                    .enumerate()
                    .map(|(n, &h)| h * ComplexSample::from_polar(1.0, -w * n as f64))
                    .sum::<ComplexSample>()
                    .norm()
            })
            .collect()
    }
}

/// Complex noise variance per sample (half of it per real dimension).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    sigma2: f64,
}

impl NoiseSpec {
    /// `sigma2 = 0` is allowed for noise-free runs.
    pub fn new(sigma2: f64) -> Result<Self> {
        if sigma2.is_nan() || sigma2 < 0.0 || sigma2.is_infinite() {
            return Err(Error::NonPositiveNoise(sigma2));
        }
        Ok(NoiseSpec { sigma2 })
    }

    pub fn sigma2(self) -> f64 {
        self.sigma2
    }
}

/// Gray QPSK: `(b_I, b_Q) -> ((1 − 2b_I) + j(1 − 2b_Q)) / √2`.
pub fn qpsk_modulate(bits: &[Bit]) -> Result<Vec<ComplexSample>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    Ok(bits
        .chunks_exact(2)
        .map(|p| ComplexSample::new(p[0].bipolar(), p[1].bipolar()) * FRAC_1_SQRT_2)
        .collect())
}

/// Per-dimension sign slicer, inverse of [`qpsk_modulate`].
pub fn qpsk_hard_demap(symbols: &[ComplexSample]) -> Vec<Bit> {
    symbols
        .iter()
        .flat_map(|s| [Bit::from(s.re < 0.0), Bit::from(s.im < 0.0)])
        .collect()
}

/// Full linear convolution; output length `N + T − 1`.
pub fn apply_channel(symbols: &[ComplexSample], channel: &ChannelModel) -> Vec<ComplexSample> {
    if symbols.is_empty() {
        return Vec::new();
    }
    let taps = &channel.taps;
    let mut out = vec![ComplexSample::new(0.0, 0.0); symbols.len() + taps.len() - 1];
    for (i, &s) in symbols.iter().enumerate() {
        for (o, &h) in out[i..].iter_mut().zip(taps) {
            *o += h * s;
        }
    }
    out
}

/// Adds complex Gaussian noise with variance `sigma2 / 2` per real dimension.
///
/// Two standard normals are drawn per sample (real first) whatever the
/// variance, so streams stay aligned across noise levels.
pub fn add_awgn<R: Rng + ?Sized>(
    samples: &[ComplexSample],
    noise: NoiseSpec,
    rng: &mut R,
) -> Vec<ComplexSample> {
    let scale = (noise.sigma2 / 2.0).sqrt();
    samples
        .iter()
        .map(|&s| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            s + ComplexSample::new(re * scale, im * scale)
        })
        .collect()
}

/// Parses the channel data format documented in `data/channels.txt`.
///
/// Taps are returned as written; callers normalize.
pub fn parse_channels(text: &str) -> Result<Vec<ChannelModel>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| Error::ChannelData {
            line: line_no,
            reason,
        };
        let fields: Vec<&str> = line.splitn(3, '|').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(err("expected 'label | taps | provenance'".into()));
        }
        let (label, taps, provenance) = (fields[0], fields[1], fields[2]);
        if label.is_empty() || label.contains(char::is_whitespace) {
            return Err(err(format!("bad label '{label}'")));
        }
        if provenance.is_empty() {
            return Err(err("missing provenance".into()));
        }
        let taps = taps
            .split_whitespace()
            .map(|t| parse_tap(t).ok_or_else(|| err(format!("bad tap '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        if out.iter().any(|c: &ChannelModel| c.label == label) {
            return Err(err(format!("duplicate label '{label}'")));
        }
        let mut ch = ChannelModel::new(label, taps).map_err(|e| err(e.to_string()))?;
        if ch.energy() == 0.0 {
            return Err(err("all-zero taps".into()));
        }
        ch.provenance = provenance.to_string();
        out.push(ch);
    }
    Ok(out)
}

fn parse_tap(s: &str) -> Option<ComplexSample> {
    let v = match s.split_once(',') {
        Some((re, im)) => ComplexSample::new(re.parse().ok()?, im.parse().ok()?),
        None => ComplexSample::new(s.parse().ok()?, 0.0),
    };
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}

fn builtin() -> &'static [ChannelModel] {
    static CHANNELS: OnceLock<Vec<ChannelModel>> = OnceLock::new();
    CHANNELS.get_or_init(|| {
        parse_channels(BUILTIN_CHANNELS)
            .expect("built-in channel file parses")
            .into_iter()
            .map(ChannelModel::normalized)
            .collect()
    })
}

/// Labels of the built-in channels, in file order.
pub fn channel_labels() -> Vec<&'static str> {
    builtin().iter().map(|c| c.label.as_str()).collect()
}

/// Looks up a built-in channel (`none`, `a`, `b`, `c`), unit energy.
pub fn channel_registry(label: &str) -> Result<ChannelModel> {
    builtin()
        .iter()
        .find(|c| c.label == label)
        .cloned()
        .ok_or_else(|| Error::UnknownChannel(label.to_string()))
}
