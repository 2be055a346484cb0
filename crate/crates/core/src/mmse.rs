//! Exact time-varying linear MMSE equalizer with a-priori symbol statistics.
//!
//! For symbol `n` the filter is `f_n = (H V⁽ⁿ⁾ Hᴴ + σ²I)⁻¹ h_n`, where `H` is
//! the full convolution matrix, `V⁽ⁿ⁾` the diagonal of prior symbol
//! variances with entry `n` replaced by 1, and the estimate is
//! `ŝ_n = f_nᴴ (r − H x̄⁽ⁿ⁾)` with `x̄⁽ⁿ⁾` the prior means, entry `n` zeroed.
//!
//! `V⁽ⁿ⁾` differs from the shared `V` in one diagonal entry, so every
//! per-symbol system is a rank-one update of `Σ = H V Hᴴ + σ²I`. `Σ` is
//! banded (half-bandwidth `T − 1`) and is factored once per call:
//!
//! * `κ_n = h_nᴴ Σ⁻¹ h_n`
//! * `f_nᴴ y = h_nᴴ Σ⁻¹ y / (1 + (1 − v_n) κ_n)` (Sherman–Morrison)
//! * `μ_n = f_nᴴ h_n = κ_n / (1 + (1 − v_n) κ_n)`

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::chan::ChannelModel;
use crate::error::{Error, Result};
use crate::llr::{Llr, ComplexSample};

/// The two bit LLRs carried by one QPSK symbol.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LlrPair {
    pub i: Llr,
    pub q: Llr,
}

impl LlrPair {
    pub fn new(i: Llr, q: Llr) -> Self {
        LlrPair { i, q }
    }

    /// Groups a flat `[I0, Q0, I1, Q1, ..]` sequence; `None` on odd length.
    pub fn pairs(flat: &[Llr]) -> Option<Vec<LlrPair>> {
        flat.len().is_multiple_of(2).then(|| {
            flat.chunks_exact(2)
                .map(|c| LlrPair::new(c[0], c[1]))
                .collect()
        })
    }

    pub fn flatten(pairs: &[LlrPair]) -> Vec<Llr> {
        pairs.iter().flat_map(|p| [p.i, p.q]).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EqualizerInput<'a> {
    /// Full-convolution received block, `N + T − 1` samples.
    pub received: &'a [ComplexSample],
    pub channel: &'a ChannelModel,
    /// Complex noise variance per sample.
    pub sigma2: f64,
    /// Prior LLRs per symbol; zero on the first pass.
    pub priors: &'a [LlrPair],
}

#[derive(Clone, Debug, PartialEq)]
pub struct EqualizerOutput {
    pub extrinsic: Vec<LlrPair>,
    /// Equivalent gain `μ_n` per symbol, in `[0, 1]`.
    pub mu: Vec<f64>,
}

/// Prior mean and variance of a unit-energy Gray QPSK symbol.
pub fn symbol_stats(prior: LlrPair) -> (ComplexSample, f64) {
    let mean = ComplexSample::new(
        (prior.i.value() / 2.0).tanh(),
        (prior.q.value() / 2.0).tanh(),
    ) * FRAC_1_SQRT_2;
    let var = (1.0 - mean.norm_sqr()).clamp(0.0, 1.0);
    (mean, var)
}

/// Extrinsic bit LLRs under `ŝ ≈ μ s + CN(0, μ(1 − μ))`.
pub(crate) fn awgn_llrs(estimate: ComplexSample, mu: f64) -> LlrPair {
    let residual = 1.0 - mu;
    let conv = |x: f64| {
        if residual > 0.0 {
            Llr::new(2.0 * SQRT_2 * x / residual)
        } else {
            Llr::new(if x < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY })
        }
    };
    LlrPair::new(conv(estimate.re), conv(estimate.im))
}

fn validate(input: &EqualizerInput<'_>) -> Result<()> {
    if input.sigma2.is_nan() || input.sigma2 <= 0.0 || input.sigma2.is_infinite() {
        return Err(Error::NonPositiveNoise(input.sigma2));
    }
    if input.channel.taps.is_empty() {
        return Err(Error::Config("channel has no taps".into()));
    }
    if input.priors.is_empty() {
        return Err(Error::EmptyInput);
    }
    let expected = input.priors.len() + input.channel.taps.len() - 1;
    if input.received.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: input.received.len(),
        });
    }
    Ok(())
}

/// Runs the exact MMSE equalizer over one frame.
pub fn equalize(input: &EqualizerInput<'_>) -> Result<EqualizerOutput> {
    validate(input)?;
    let taps = &input.channel.taps;
    let n_sym = input.priors.len();
    let t = taps.len();
    let m = n_sym + t - 1;

    let (means, vars): (Vec<ComplexSample>, Vec<f64>) =
        input.priors.iter().map(|&p| symbol_stats(p)).unzip();

    let mut sigma = BandedHermitian::zeros(m, t - 1);
    for (k, &v) in vars.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        for a in 0..t {
            for b in 0..=a {
                *sigma.at_mut(k + a, a - b) += taps[a] * taps[b].conj() * v;
            }
        }
    }
    for i in 0..m {
        *sigma.at_mut(i, 0) += input.sigma2;
    }
    let chol = sigma.cholesky();

    // z = Σ⁻¹ (r − H x̄)
    let mut resid = input.received.to_vec();
    for (k, &x) in means.iter().enumerate() {
        if x.re == 0.0 && x.im == 0.0 {
            continue;
        }
        for (a, &h) in taps.iter().enumerate() {
            resid[k + a] -= h * x;
        }
    }
    let z = chol.solve(&resid);

    let mut extrinsic = Vec::with_capacity(n_sym);
    let mut mu = Vec::with_capacity(n_sym);
    let mut work = vec![ComplexSample::new(0.0, 0.0); m];
    for n in 0..n_sym {
        let kappa = chol.quad_form_column(n, taps, &mut work);
        let hz: ComplexSample = taps
            .iter()
            .enumerate()
            .map(|(a, h)| h.conj() * z[n + a])
            .sum();
        let denom = 1.0 + (1.0 - vars[n]) * kappa;
        let estimate = (hz + means[n] * kappa) / denom;
        let gain = (kappa / denom).clamp(0.0, 1.0);
        extrinsic.push(awgn_llrs(estimate, gain));
        mu.push(gain);
    }
    Ok(EqualizerOutput { extrinsic, mu })
}

/// Lower band of a Hermitian matrix: entry `(i, i − k)` for `k ≤ bw`.
#[derive(Clone, Debug)]
struct BandedHermitian {
    n: usize,
    bw: usize,
    data: Vec<ComplexSample>,
}

impl BandedHermitian {
    fn zeros(n: usize, bw: usize) -> Self {
        BandedHermitian {
            n,
            bw,
            data: vec![ComplexSample::new(0.0, 0.0); n * (bw + 1)],
        }
    }

    #[inline]
    fn at(&self, row: usize, k: usize) -> ComplexSample {
        self.data[row * (self.bw + 1) + k]
    }

    #[inline]
    fn at_mut(&mut self, row: usize, k: usize) -> &mut ComplexSample {
        &mut self.data[row * (self.bw + 1) + k]
    }

    /// Banded Cholesky `A = L Lᴴ`; `A` must be positive definite.
    fn cholesky(self) -> BandedCholesky {
        let (n, bw) = (self.n, self.bw);
        let mut l = BandedHermitian::zeros(n, bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = self.at(i, i - j);
                for k in lo.max(j.saturating_sub(bw))..j {
                    s -= l.at(i, i - k) * l.at(j, j - k).conj();
                }
                if i == j {
                    assert!(s.re > 0.0, "covariance not positive definite");
                    *l.at_mut(i, 0) = ComplexSample::new(s.re.sqrt(), 0.0);
                } else {
                    *l.at_mut(i, i - j) = s / l.at(j, 0).re;
                }
            }
        }
        BandedCholesky { l }
    }
}

#[derive(Clone, Debug)]
struct BandedCholesky {
    l: BandedHermitian,
}

impl BandedCholesky {
    /// Solves `L y = b` in place for rows `start..`; rows before `start` are
    /// taken as zero.
    fn forward(&self, y: &mut [ComplexSample], start: usize) {
        let bw = self.l.bw;
        for i in start..self.l.n {
            let mut s = y[i];
            for k in i.saturating_sub(bw).max(start)..i {
                s -= self.l.at(i, i - k) * y[k];
            }
            y[i] = s / self.l.at(i, 0).re;
        }
    }

    fn solve(&self, b: &[ComplexSample]) -> Vec<ComplexSample> {
        let (n, bw) = (self.l.n, self.l.bw);
        let mut y = b.to_vec();
        self.forward(&mut y, 0);
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= self.l.at(k, k - i).conj() * y[k];
            }
            y[i] = s / self.l.at(i, 0).re;
        }
        y
    }

    /// `h_nᴴ A⁻¹ h_n = ‖L⁻¹ h_n‖²` for the convolution column of symbol `n`.
    fn quad_form_column(&self, n: usize, taps: &[ComplexSample], work: &mut [ComplexSample]) -> f64 {
        let tail = &mut work[n..];
        tail.fill(ComplexSample::new(0.0, 0.0));
        tail[..taps.len()].copy_from_slice(taps);
        self.forward(work, n);
        work[n..].iter().map(|v| v.norm_sqr()).sum()
    }
}
