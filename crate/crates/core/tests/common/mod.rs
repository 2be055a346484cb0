//! Reference implementations used only by tests: exhaustive MAP decoding
//! and the dense per-symbol MMSE filter.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use teq_core::convcode::CodeSpec;
use teq_core::Llr;

pub type C64 = Complex<f64>;

/// Direct shift-register encoder, terminated with `memory` zeros.
/// Output `t * n_out + g` is generator `g` at time `t`.
pub fn reference_encode(info: &[u8], taps: &[Vec<usize>], memory: usize) -> Vec<u8> {
    let mut u = info.to_vec();
    u.extend(std::iter::repeat_n(0, memory));
    let mut out = Vec::with_capacity(u.len() * taps.len());
    for t in 0..u.len() {
        for g in taps {
            let bit = g
                .iter()
                .filter(|&&d| d <= t)
                .fold(0u8, |acc, &d| acc ^ u[t - d]);
            out.push(bit);
        }
    }
    out
}

pub fn code_taps(code: &CodeSpec) -> Vec<Vec<usize>> {
    code.generators().iter().map(|g| g.delays().collect()).collect()
}

fn lse(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Exhaustive MAP over all `2^N` terminated codewords.
///
/// Returns `(info_app, coded_app)` with `info_app` over info + tail. With
/// `max_log` the log-sum-exp is replaced by `max`.
pub fn brute_force_map(
    coded_llrs: &[f64],
    info_priors: Option<&[f64]>,
    n_info: usize,
    code: &CodeSpec,
    max_log: bool,
) -> (Vec<Llr>, Vec<Llr>) {
    let taps = code_taps(code);
    let memory = code.memory();
    let n_steps = n_info + memory;
    let combine = |a: f64, b: f64| if max_log { a.max(b) } else { lse(a, b) };

    let mut info_acc = vec![[f64::NEG_INFINITY; 2]; n_steps];
    let mut coded_acc = vec![[f64::NEG_INFINITY; 2]; coded_llrs.len()];
    for word in 0u32..(1 << n_info) {
        let info: Vec<u8> = (0..n_info).map(|k| ((word >> k) & 1) as u8).collect();
        let cw = reference_encode(&info, &taps, memory);
        assert_eq!(cw.len(), coded_llrs.len());
        // log P(b) = ±L/2 + const under L = ln(P0/P1).
        let half = |l: f64, b: u8| if b == 0 { l / 2.0 } else { -l / 2.0 };
        let mut metric: f64 = cw.iter().zip(coded_llrs).map(|(&b, &l)| half(l, b)).sum();
        if let Some(p) = info_priors {
            metric += info.iter().zip(p).map(|(&b, &l)| half(l, b)).sum::<f64>();
        }
        for k in 0..n_steps {
            let b = info.get(k).copied().unwrap_or(0) as usize;
            info_acc[k][b] = combine(info_acc[k][b], metric);
        }
        for (acc, &b) in coded_acc.iter_mut().zip(&cw) {
            acc[b as usize] = combine(acc[b as usize], metric);
        }
    }
    let to_llr = |[z, o]: [f64; 2]| Llr::new(z - o);
    (
        info_acc.into_iter().map(to_llr).collect(),
        coded_acc.into_iter().map(to_llr).collect(),
    )
}

pub fn max_abs_diff(a: &[Llr], b: &[Llr]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.value() - y.value()).abs())
        .fold(0.0, f64::max)
}

/// Dense MMSE filter, one matrix solve per symbol.
///
/// `priors` holds `(L_i, L_q)` per symbol; returns the extrinsic
/// `(L_i, L_q)` and `μ` per symbol.
pub fn dense_mmse(
    received: &[C64],
    taps: &[C64],
    sigma2: f64,
    priors: &[(f64, f64)],
) -> (Vec<(f64, f64)>, Vec<f64>) {
    let n = priors.len();
    let t = taps.len();
    let m = n + t - 1;
    assert_eq!(received.len(), m);
    let h = DMatrix::<C64>::from_fn(m, n, |row, col| {
        if row >= col && row - col < t {
            taps[row - col]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let r = DVector::from_column_slice(received);
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let mean: Vec<C64> = priors
        .iter()
        .map(|&(li, lq)| C64::new((li / 2.0).tanh() * r2, (lq / 2.0).tanh() * r2))
        .collect();
    let var: Vec<f64> = mean.iter().map(|x| 1.0 - x.norm_sqr()).collect();

    let mut ext = Vec::with_capacity(n);
    let mut mus = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = var.clone();
        v[k] = 1.0;
        let mut xbar = mean.clone();
        xbar[k] = C64::new(0.0, 0.0);
        let vd = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            v.iter().map(|&x| C64::new(x, 0.0)),
        ));
        let cov = &h * vd * h.adjoint() + DMatrix::<C64>::identity(m, m) * C64::new(sigma2, 0.0);
        let hk = h.column(k).into_owned();
        let f = cov.lu().solve(&hk).expect("covariance is invertible");
        let resid = &r - &h * DVector::from_vec(xbar);
        let s_hat = f.adjoint() * resid;
        let s_hat = s_hat[(0, 0)];
        let mu = (f.adjoint() * &hk)[(0, 0)].re;
        let k2 = 2.0 * std::f64::consts::SQRT_2 / (1.0 - mu);
        ext.push((k2 * s_hat.re, k2 * s_hat.im));
        mus.push(mu);
    }
    (ext, mus)
}

/// Random bipolar observation LLRs of `bits` at noise variance `sigma2`.
pub fn noisy_llrs<R: Rng>(bits: &[u8], sigma2: f64, rng: &mut R) -> Vec<f64> {
    bits.iter()
        .map(|&b| {
            let x = if b == 0 { 1.0 } else { -1.0 };
            let n: f64 = rng.sample(StandardNormal);
            2.0 * (x + sigma2.sqrt() * n) / sigma2
        })
        .collect()
}

/// Worst `|production − oracle|` over info and coded APPs of `frames`
/// random frames; half the frames carry info priors.
pub fn bcjr_oracle_gap(
    code: &CodeSpec,
    n_info: usize,
    frames: usize,
    algo: teq_core::mapdec::DecoderAlgo,
    seed: u64,
) -> f64 {
    use rand::SeedableRng;
    use teq_core::convcode::build_trellis;
    use teq_core::mapdec::{bcjr, DecoderAlgo, DecoderInput};

    let trellis = build_trellis(code).unwrap();
    let taps = code_taps(code);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for f in 0..frames {
        let info: Vec<u8> = (0..n_info).map(|_| rng.random_range(0..2)).collect();
        let cw = reference_encode(&info, &taps, code.memory());
        let sigma2 = rng.random_range(0.3..3.0);
        let coded = noisy_llrs(&cw, sigma2, &mut rng);
        let priors: Option<Vec<f64>> = (f % 2 == 1).then(|| {
            (0..n_info)
                .map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal))
                .collect()
        });
        let input = DecoderInput {
            coded_llrs: coded.iter().map(|&l| Llr::new(l)).collect(),
            info_priors: priors.as_ref().map(|p| p.iter().map(|&l| Llr::new(l)).collect()),
        };
        let out = bcjr(&input, &trellis, algo).unwrap();
        let (info_app, coded_app) = brute_force_map(
            &coded,
            priors.as_deref(),
            n_info,
            code,
            algo == DecoderAlgo::MaxLog,
        );
        worst = worst
            .max(max_abs_diff(&out.info_app, &info_app))
            .max(max_abs_diff(&out.coded_app, &coded_app));
    }
    worst
}

/// Worst `|production − dense|` over extrinsic LLRs and `μ` on random
/// frames of up to `max_symbols` symbols.
pub fn mmse_oracle_gap(labels: &[&str], frames: usize, max_symbols: usize, seed: u64) -> f64 {
    use rand::SeedableRng;
    use teq_core::chan::channel_registry;
    use teq_core::mmse::{equalize, EqualizerInput, LlrPair};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for f in 0..frames {
        let channel = channel_registry(labels[f % labels.len()]).unwrap();
        let n = rng.random_range(4..=max_symbols);
        let sigma2 = 10f64.powf(-rng.random_range(0.0..1.5));
        let scale = rng.random_range(0.5..6.0);
        let priors: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                (scale * a, scale * b)
            })
            .collect();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let symbols: Vec<C64> = (0..n)
            .map(|_| C64::new(if rng.random() { s } else { -s }, if rng.random() { s } else { -s }))
            .collect();
        let mut received = vec![C64::new(0.0, 0.0); n + channel.taps.len() - 1];
        for (k, x) in symbols.iter().enumerate() {
            for (a, h) in channel.taps.iter().enumerate() {
                received[k + a] += h * x;
            }
        }
        for r in received.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *r += C64::new(re, im) * (sigma2 / 2.0).sqrt();
        }

        let pairs: Vec<LlrPair> = priors
            .iter()
            .map(|&(i, q)| LlrPair::new(Llr::new(i), Llr::new(q)))
            .collect();
        let out = equalize(&EqualizerInput {
            received: &received,
            channel: &channel,
            sigma2,
            priors: &pairs,
        })
        .unwrap();
        let (ext, mu) = dense_mmse(&received, &channel.taps, sigma2, &priors);
        for k in 0..n {
            worst = worst
                .max((out.extrinsic[k].i.value() - ext[k].0).abs())
                .max((out.extrinsic[k].q.value() - ext[k].1).abs())
                .max((out.mu[k] - mu[k]).abs());
        }
    }
    worst
}
