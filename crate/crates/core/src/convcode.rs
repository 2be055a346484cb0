//! Feedforward convolutional codes: generator description, trellis, hard
//! encoder and the soft (box-plus) encoder over LLRs.
//!
//! Coded output is generator-major within each time step:
//! `(g0, g1, ..)` at `t = 0`, then `(g0, g1, ..)` at `t = 1`, and so on.

use std::fmt;

use crate::error::{Error, Result};
use crate::llr::{BoxPlus, Bit, Llr};

pub const MIN_CONSTRAINT_LENGTH: usize = 2;
pub const MAX_CONSTRAINT_LENGTH: usize = 10;

/// Generator taps of one output stream, as a bitmask over delays
/// (bit `d` set when `D^d` appears in the polynomial).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generator(u32);

impl Generator {
    pub fn from_delays(delays: &[usize]) -> Self {
        Generator(delays.iter().fold(0, |m, &d| m | (1 << d)))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn delays(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |d| self.0 >> d & 1 == 1)
    }

    /// Octal string for a code of constraint length `k`, leftmost bit = `D^0`.
    pub fn to_octal(self, k: usize) -> String {
        let mut v = 0u32;
        for d in 0..k {
            if self.0 >> d & 1 == 1 {
                v |= 1 << (k - 1 - d);
            }
        }
        format!("{v:o}")
    }
}

/// Rate `1/n` feedforward convolutional code.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    constraint_length: usize,
    generators: Vec<Generator>,
}

impl CodeSpec {
    /// Builds a code from delay sets, one per output stream.
    pub fn new(constraint_length: usize, generators: &[&[usize]]) -> Result<Self> {
        let gens = generators.iter().map(|g| Generator::from_delays(g)).collect();
        Self::from_generators(constraint_length, gens)
    }

    pub fn from_generators(constraint_length: usize, generators: Vec<Generator>) -> Result<Self> {
        let k = constraint_length;
        if !(MIN_CONSTRAINT_LENGTH..=MAX_CONSTRAINT_LENGTH).contains(&k) {
            return Err(Error::InvalidCode(format!(
                "constraint length {k} outside {MIN_CONSTRAINT_LENGTH}..={MAX_CONSTRAINT_LENGTH}"
            )));
        }
        if generators.is_empty() {
            return Err(Error::InvalidCode("no generators".into()));
        }
        for g in &generators {
            if g.0 == 0 {
                return Err(Error::InvalidCode("empty generator".into()));
            }
            if g.0 >> k != 0 {
                return Err(Error::InvalidCode(format!(
                    "generator tap beyond delay {} for K = {k}",
                    k - 1
                )));
            }
        }
        Ok(CodeSpec {
            constraint_length: k,
            generators,
        })
    }

    /// Parses octal generators such as `["23", "33"]`.
    ///
    /// The octal value is read as a `K`-bit binary word whose leftmost bit is
    /// the coefficient of `D^0`: octal 23 = 10011 = taps {0, 3, 4}.
    pub fn from_octal(constraint_length: usize, octal: &[&str]) -> Result<Self> {
        let k = constraint_length;
        if !(MIN_CONSTRAINT_LENGTH..=MAX_CONSTRAINT_LENGTH).contains(&k) {
            return Err(Error::InvalidCode(format!("constraint length {k} unsupported")));
        }
        let mut gens = Vec::with_capacity(octal.len());
        for s in octal {
            let v = u32::from_str_radix(s.trim(), 8)
                .map_err(|_| Error::InvalidCode(format!("'{s}' is not an octal number")))?;
            if v >> k != 0 {
                return Err(Error::InvalidCode(format!(
                    "octal generator '{s}' has more than K = {k} bits"
                )));
            }
            let mut mask = 0u32;
            for d in 0..k {
                if v >> (k - 1 - d) & 1 == 1 {
                    mask |= 1 << d;
                }
            }
            gens.push(Generator(mask));
        }
        Self::from_generators(k, gens)
    }

    /// K = 5, rate 1/2 code with generators 1+D³+D⁴ and 1+D+D³+D⁴.
    pub fn default_k5() -> Self {
        CodeSpec::new(5, &[&[0, 3, 4], &[0, 1, 3, 4]]).expect("valid built-in code")
    }

    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    pub fn memory(&self) -> usize {
        self.constraint_length - 1
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Number of coded bits per input bit (the inverse rate).
    pub fn n_outputs(&self) -> usize {
        self.generators.len()
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory()
    }

    pub fn octal(&self) -> Vec<String> {
        self.generators
            .iter()
            .map(|g| g.to_octal(self.constraint_length))
            .collect()
    }

    /// Output bit of generator `g` for input `u` entering register state `state`.
    ///
    /// Bit `j` of `state` holds the input from `j + 1` steps ago.
    #[inline]
    fn output(&self, g: Generator, state: usize, u: Bit) -> Bit {
        let reg = (state << 1 | u.as_u8() as usize) as u32;
        Bit::from_u8((reg & g.0).count_ones() as u8)
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K={} ({})", self.constraint_length, self.octal().join(","))
    }
}

/// Encodes `info`, appending `K − 1` zero tail bits when `terminate` is set.
pub fn encode(info: &[Bit], code: &CodeSpec, terminate: bool) -> Result<Vec<Bit>> {
    if info.is_empty() {
        return Err(Error::EmptyInput);
    }
    let tail = if terminate { code.memory() } else { 0 };
    let mask = code.num_states() - 1;
    let mut out = Vec::with_capacity((info.len() + tail) * code.n_outputs());
    let mut state = 0usize;
    for &u in info.iter().chain(std::iter::repeat_n(&Bit::Zero, tail)) {
        for &g in code.generators() {
            out.push(code.output(g, state, u));
        }
        state = (state << 1 | u.as_u8() as usize) & mask;
    }
    Ok(out)
}

/// Soft-convolution encoder: every XOR of the hard encoder becomes a
/// box-plus over LLRs, using the min-sum form.
///
/// Inputs before time 0 are certain zeros (`+LLR_MAX`), matching the zero
/// initial state.
pub fn soft_encode(info_llrs: &[Llr], code: &CodeSpec) -> Result<Vec<Llr>> {
    soft_encode_with(info_llrs, code, BoxPlus::Approx)
}

pub fn soft_encode_with(info_llrs: &[Llr], code: &CodeSpec, form: BoxPlus) -> Result<Vec<Llr>> {
    if info_llrs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = Vec::with_capacity(info_llrs.len() * code.n_outputs());
    for n in 0..info_llrs.len() {
        for &g in code.generators() {
            let terms = g.delays().map(|d| {
                n.checked_sub(d)
                    .map_or(Llr::MAX, |i| info_llrs[i])
            });
            out.push(form.fold(terms).expect("generator has at least one tap"));
        }
    }
    Ok(out)
}

/// One trellis branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub input: Bit,
    /// Output bits packed LSB-first: bit `i` belongs to generator `i`.
    pub outputs: u32,
}

impl Edge {
    #[inline]
    pub fn output(&self, i: usize) -> Bit {
        Bit::from_u8((self.outputs >> i) as u8)
    }
}

/// State machine of a feedforward code.
#[derive(Clone, Debug)]
pub struct Trellis {
    num_states: usize,
    n_outputs: usize,
    memory: usize,
    /// Indexed by `state * 2 + input`.
    edges: Vec<Edge>,
}

impl Trellis {
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, state: usize, input: Bit) -> &Edge {
        &self.edges[state * 2 + input.as_u8() as usize]
    }

    /// Walks the trellis from state 0, returning coded bits and the final state.
    pub fn walk(&self, bits: &[Bit]) -> (Vec<Bit>, usize) {
        let mut state = 0;
        let mut out = Vec::with_capacity(bits.len() * self.n_outputs);
        for &u in bits {
            let e = self.edge(state, u);
            out.extend((0..self.n_outputs).map(|i| e.output(i)));
            state = e.to;
        }
        (out, state)
    }
}

pub fn build_trellis(code: &CodeSpec) -> Result<Trellis> {
    let k = code.constraint_length();
    if !(MIN_CONSTRAINT_LENGTH..=MAX_CONSTRAINT_LENGTH).contains(&k) {
        return Err(Error::InvalidCode(format!("constraint length {k} unsupported")));
    }
    let num_states = code.num_states();
    let mask = num_states - 1;
    let mut edges = Vec::with_capacity(num_states * 2);
    for from in 0..num_states {
        for input in [Bit::Zero, Bit::One] {
            let outputs = code
                .generators()
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &g)| {
                    acc | (code.output(g, from, input).as_u8() as u32) << i
                });
            edges.push(Edge {
                from,
                to: (from << 1 | input.as_u8() as usize) & mask,
                input,
                outputs,
            });
        }
    }
    Ok(Trellis {
        num_states,
        n_outputs: code.n_outputs(),
        memory: code.memory(),
        edges,
    })
}
