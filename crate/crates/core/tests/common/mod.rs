#![allow(dead_code)]

use rand::Rng;
use srpolar_core::code::polar_transform;
use srpolar_core::{Bit, CodeSpec};

pub fn bits(s: &str) -> Vec<Bit> {
    s.bytes()
        .filter(|b| *b == b'0' || *b == b'1')
        .map(|b| b - b'0')
        .collect()
}

/// A code of depth `n` with each position information with probability 1/2
/// (at least one information bit).
pub fn random_spec<R: Rng>(rng: &mut R, n: usize) -> CodeSpec {
    loop {
        let flags: Vec<Bit> = (0..1 << n).map(|_| rng.gen_range(0..2)).collect();
        if flags.contains(&1) {
            return CodeSpec::from_flags(flags, None).unwrap();
        }
    }
}

/// BPSK LLRs of `x` without noise.
pub fn noiseless(x: &[Bit], magnitude: f64) -> Vec<f64> {
    x.iter()
        .map(|&b| if b == 0 { magnitude } else { -magnitude })
        .collect()
}

pub fn correlation(beta: &[Bit], llr: &[f64]) -> f64 {
    beta.iter()
        .zip(llr)
        .map(|(&b, &a)| if b == 0 { a } else { -a })
        .sum()
}

/// Best and second-best correlation over every codeword of a pattern.
pub fn exhaustive_ml(flags: &[Bit], llr: &[f64]) -> (f64, f64) {
    let info: Vec<usize> = (0..flags.len()).filter(|&k| flags[k] == 1).collect();
    let mut best = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    let mut u = vec![0; flags.len()];
    for w in 0..1u64 << info.len() {
        u.iter_mut().for_each(|b| *b = 0);
        for (t, &p) in info.iter().enumerate() {
            u[p] = ((w >> t) & 1) as Bit;
        }
        polar_transform(&mut u);
        let m = correlation(&u, llr);
        if m > best {
            second = best;
            best = m;
        } else if m > second {
            second = m;
        }
    }
    (best, second)
}

/// True if `beta` re-encodes to a message with zeros at frozen positions.
pub fn is_codeword(flags: &[Bit], beta: &[Bit]) -> bool {
    let mut u = beta.to_vec();
    polar_transform(&mut u);
    u.iter().zip(flags).all(|(&b, &f)| f == 1 || b == 0)
}

use srpolar_core::{NodeId, SourceType, SrDescriptor};

/// Which kind of source a random descriptor should carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Rate0,
    Rate1,
    EgPc,
    RateC,
}

/// Random SR descriptor with `j <= max_j` and at most `max_dim` information
/// bits in total, so that exhaustive search stays cheap.
pub fn random_descriptor<R: Rng>(
    rng: &mut R,
    kind: SourceKind,
    max_j: usize,
    max_dim: usize,
) -> SrDescriptor {
    loop {
        let j = rng.gen_range(0..=max_j);
        let r = rng.gen_range(0..=j);
        let v: Vec<Bit> = (0..j - r).map(|_| rng.gen_range(0..2)).collect();
        let src_len = 1usize << r;
        let (source, flags) = match kind {
            SourceKind::Rate0 => (SourceType::Rate0, vec![0; src_len]),
            SourceKind::Rate1 => (SourceType::Rate1, vec![1; src_len]),
            SourceKind::EgPc => {
                if r < 2 {
                    continue;
                }
                let rp = rng.gen_range(0..=r - 2);
                let rep = rp > 0 && rng.gen_bool(0.5);
                let mut f = vec![0; 1 << rp];
                if rep {
                    *f.last_mut().unwrap() = 1;
                }
                f.resize(src_len, 1);
                (
                    SourceType::EgPc {
                        leftmost_rep: rep,
                        leftmost_level: rp,
                    },
                    f,
                )
            }
            SourceKind::RateC => {
                if r < 1 || v.is_empty() {
                    continue;
                }
                let f: Vec<Bit> = (0..src_len).map(|_| rng.gen_range(0..2)).collect();
                (SourceType::RateC, f)
            }
        };
        let dim = v.iter().filter(|&&b| b == 1).count() + flags.iter().filter(|&&b| b == 1).count();
        if dim > max_dim {
            continue;
        }
        return SrDescriptor::new(NodeId::new(j, 1), v, source, r, flags).unwrap();
    }
}

pub fn gaussian_llrs<R: Rng>(rng: &mut R, len: usize, sigma: f64) -> Vec<f64> {
    use rand_distr::{Distribution, Normal};
    let noise = Normal::new(0.0, sigma).unwrap();
    (0..len)
        .map(|_| {
            let x = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            2.0 / (sigma * sigma) * (x + noise.sample(rng))
        })
        .collect()
}
