//! Log-domain BCJR decoder and the two extrinsic generators fed back to the
//! equalizer.
//!
//! * COD-MAP: a-posteriori LLRs of the coded bits minus the decoder's input.
//! * MAP-SBVP: a-posteriori LLRs of the info bits, re-encoded with the soft
//!   convolutional encoder.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::convcode::{soft_encode_with, CodeSpec, Trellis};
use crate::error::{Error, Result};
use crate::llr::{hard_decide, Bit, BoxPlus, Llr};

/// State-combining rule of the forward/backward recursions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderAlgo {
    /// Exact log-sum-exp.
    #[default]
    LogMap,
    /// `max` in place of log-sum-exp.
    MaxLog,
}

impl DecoderAlgo {
    pub fn name(self) -> &'static str {
        match self {
            DecoderAlgo::LogMap => "log-map",
            DecoderAlgo::MaxLog => "max-log",
        }
    }

    #[inline]
    fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            DecoderAlgo::MaxLog => a.max(b),
            DecoderAlgo::LogMap => jacobian_log(a, b),
        }
    }
}

impl FromStr for DecoderAlgo {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "log-map" => Ok(DecoderAlgo::LogMap),
            "max-log" => Ok(DecoderAlgo::MaxLog),
            other => Err(format!("unknown decoder algo '{other}' (expected log-map|max-log)")),
        }
    }
}

/// `ln(e^a + e^b)`, tolerant of `-inf` operands.
#[inline]
fn jacobian_log(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Extrinsic generator handed back to the equalizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    CodMap,
    MapSbvp,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::CodMap => "cod-map",
            Algorithm::MapSbvp => "map-sbvp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cod-map" => Ok(Algorithm::CodMap),
            "map-sbvp" => Ok(Algorithm::MapSbvp),
            other => Err(format!("unknown algorithm '{other}' (expected cod-map|map-sbvp)")),
        }
    }
}

/// Soft input of the decoder: deinterleaved, depunctured coded-bit LLRs.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderInput {
    /// One LLR per coded bit over info + tail steps, generator-major.
    pub coded_llrs: Vec<Llr>,
    /// Priors on info bits; `None` means all zero. May cover the info bits
    /// only or info + tail.
    pub info_priors: Option<Vec<Llr>>,
}

impl DecoderInput {
    pub fn new(coded_llrs: Vec<Llr>) -> Self {
        DecoderInput {
            coded_llrs,
            info_priors: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoderOutput {
    /// APP over info + tail positions.
    pub info_app: Vec<Llr>,
    /// APP per coded bit, aligned with the input.
    pub coded_app: Vec<Llr>,
    /// Hard decisions on the info bits, tail stripped.
    pub info_hard: Vec<Bit>,
}

/// Forward/backward MAP decoding of a zero-terminated frame.
pub fn bcjr(input: &DecoderInput, trellis: &Trellis, algo: DecoderAlgo) -> Result<DecoderOutput> {
    let n_out = trellis.n_outputs();
    let s = trellis.num_states();
    let coded = &input.coded_llrs;
    if !coded.len().is_multiple_of(n_out) {
        return Err(Error::LengthMismatch {
            expected: coded.len().next_multiple_of(n_out),
            actual: coded.len(),
        });
    }
    let steps = coded.len() / n_out;
    if steps <= trellis.memory() {
        return Err(Error::LengthMismatch {
            expected: trellis.memory() + 1,
            actual: steps,
        });
    }
    let n_info = steps - trellis.memory();
    let priors = match &input.info_priors {
        None => None,
        Some(p) if p.len() == n_info || p.len() == steps => Some(p.as_slice()),
        Some(p) => {
            return Err(Error::LengthMismatch {
                expected: steps,
                actual: p.len(),
            })
        }
    };

    let edges = trellis.edges();
    let mut gamma = vec![0.0; steps * edges.len()];
    for k in 0..steps {
        let obs = &coded[k * n_out..(k + 1) * n_out];
        let prior = priors
            .and_then(|p| p.get(k))
            .map_or(0.0, |l| l.value());
        for (j, e) in edges.iter().enumerate() {
            let mut g = 0.5 * e.input.bipolar() * prior;
            for (i, l) in obs.iter().enumerate() {
                g += 0.5 * e.output(i).bipolar() * l.value();
            }
            gamma[k * edges.len() + j] = g;
        }
    }

    let ninf = f64::NEG_INFINITY;
    let mut alpha = vec![ninf; (steps + 1) * s];
    let mut beta = vec![ninf; (steps + 1) * s];
    alpha[0] = 0.0;
    beta[steps * s] = 0.0;

    for k in 0..steps {
        let (cur, next) = alpha.split_at_mut((k + 1) * s);
        let cur = &cur[k * s..];
        let next = &mut next[..s];
        for (j, e) in edges.iter().enumerate() {
            let m = cur[e.from] + gamma[k * edges.len() + j];
            next[e.to] = algo.combine(next[e.to], m);
        }
        renormalize(next);
    }
    for k in (0..steps).rev() {
        let (cur, next) = beta.split_at_mut((k + 1) * s);
        let cur = &mut cur[k * s..];
        let next = &next[..s];
        for (j, e) in edges.iter().enumerate() {
            let m = next[e.to] + gamma[k * edges.len() + j];
            cur[e.from] = algo.combine(cur[e.from], m);
        }
        renormalize(cur);
    }

    let mut info_app = Vec::with_capacity(steps);
    let mut coded_app = Vec::with_capacity(coded.len());
    let mut coded_acc = vec![[ninf; 2]; n_out];
    for k in 0..steps {
        let mut info_acc = [ninf; 2];
        coded_acc.iter_mut().for_each(|a| *a = [ninf; 2]);
        for (j, e) in edges.iter().enumerate() {
            let m = alpha[k * s + e.from] + gamma[k * edges.len() + j] + beta[(k + 1) * s + e.to];
            if m == ninf {
                continue;
            }
            let u = e.input.as_u8() as usize;
            info_acc[u] = algo.combine(info_acc[u], m);
            for (i, acc) in coded_acc.iter_mut().enumerate() {
                let c = e.output(i).as_u8() as usize;
                acc[c] = algo.combine(acc[c], m);
            }
        }
        info_app.push(llr_from_metrics(info_acc));
        coded_app.extend(coded_acc.iter().map(|&a| llr_from_metrics(a)));
    }
    let info_hard = info_app[..n_info].iter().map(|&l| hard_decide(l)).collect();
    Ok(DecoderOutput {
        info_app,
        coded_app,
        info_hard,
    })
}

#[inline]
fn renormalize(metrics: &mut [f64]) {
    let max = metrics.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(max.is_finite(), "trellis recursion lost every path");
    metrics.iter_mut().for_each(|m| *m -= max);
}

#[inline]
fn llr_from_metrics([zero, one]: [f64; 2]) -> Llr {
    debug_assert!(zero.is_finite() || one.is_finite());
    Llr::new(zero - one)
}

/// COD-MAP extrinsic: coded APP minus the coded-bit input.
pub fn extrinsic_cod_map(output: &DecoderOutput, input: &DecoderInput) -> Result<Vec<Llr>> {
    subtract(&output.coded_app, &input.coded_llrs)
}

/// MAP-SBVP extrinsic: info APP (info + tail) re-encoded with the min-sum
/// soft encoder.
pub fn extrinsic_map_sbvp(output: &DecoderOutput, code: &CodeSpec) -> Result<Vec<Llr>> {
    soft_encode_with(&output.info_app, code, BoxPlus::Approx)
}

/// Knobs that only matter for MAP-SBVP.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SbvpOptions {
    pub boxplus: BoxPlus,
    /// Subtract the decoder's coded-bit input after re-encoding.
    pub subtract_input: bool,
}

/// Extrinsic generation dispatched on the configured algorithm.
pub fn extrinsic(
    algorithm: Algorithm,
    output: &DecoderOutput,
    input: &DecoderInput,
    code: &CodeSpec,
    sbvp: SbvpOptions,
) -> Result<Vec<Llr>> {
    match algorithm {
        Algorithm::CodMap => extrinsic_cod_map(output, input),
        Algorithm::MapSbvp => {
            let reencoded = soft_encode_with(&output.info_app, code, sbvp.boxplus)?;
            if sbvp.subtract_input {
                subtract(&reencoded, &input.coded_llrs)
            } else {
                if reencoded.len() != input.coded_llrs.len() {
                    return Err(Error::LengthMismatch {
                        expected: input.coded_llrs.len(),
                        actual: reencoded.len(),
                    });
                }
                Ok(reencoded)
            }
        }
    }
}

fn subtract(a: &[Llr], b: &[Llr]) -> Result<Vec<Llr>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: b.len(),
            actual: a.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| Llr::new(x.value() - y.value()))
        .collect())
}
