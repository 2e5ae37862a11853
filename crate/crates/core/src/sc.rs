//! Successive-cancellation decoding and the LLR kernels shared by every
//! decoder.
//!
//! Buffers are flat: level `j` of the tree occupies `[2^j, 2^(j+1))` of the
//! `alpha` and `beta` vectors, so a parent and its child never overlap.

use crate::code::{polar_transform, CodeSpec};
use crate::error::{Error, Result};
use crate::tree::{schedule_time_steps, LatencyModel, LatencyReport, ScheduleMode};
use crate::Bit;

/// Check-node arithmetic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithMode {
    /// `sign(x) sign(y) min(|x|, |y|)`.
    #[default]
    MinSum,
    /// `2 atanh(tanh(x/2) tanh(y/2))`.
    Exact,
}

impl std::str::FromStr for ArithMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "minsum" => Ok(ArithMode::MinSum),
            "exact" => Ok(ArithMode::Exact),
            other => Err(format!("unknown arithmetic mode `{other}`")),
        }
    }
}

#[inline]
fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Check-node update. `sign(0)` is `+1`.
#[inline]
pub fn f_op(x: f64, y: f64, mode: ArithMode) -> f64 {
    let (ax, ay) = (x.abs(), y.abs());
    let m = sign(x) * sign(y) * ax.min(ay);
    match mode {
        ArithMode::MinSum => m,
        // min(a, b) + ln(1 + e^-(a+b)) - ln(1 + e^-|a-b|) is the tanh rule
        // written without the atanh singularity.
        ArithMode::Exact => {
            let corr = (-(ax + ay)).exp().ln_1p() - (-(ax - ay).abs()).exp().ln_1p();
            sign(x) * sign(y) * (ax.min(ay) + corr)
        }
    }
}

/// Variable-node update `(-1)^u x + y`.
#[inline]
pub fn g_op(x: f64, y: f64, u: Bit) -> f64 {
    if u == 0 {
        y + x
    } else {
        y - x
    }
}

/// Hard decision: 0 for `alpha >= 0`, 1 otherwise.
#[inline]
pub fn h(alpha: f64) -> Bit {
    Bit::from(alpha < 0.0)
}

/// Per-frame buffers for a tree of depth `n`.
#[derive(Debug, Clone)]
pub struct DecodeWorkspace {
    n: usize,
    pub(crate) alpha: Vec<f64>,
    pub(crate) beta: Vec<Bit>,
    pub u_hat: Vec<Bit>,
}

impl DecodeWorkspace {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            alpha: vec![0.0; 2 << n],
            beta: vec![0; 2 << n],
            u_hat: vec![0; 1 << n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Loads channel LLRs into the root buffer.
    pub(crate) fn load(&mut self, llr: &[f64]) {
        let len = 1 << self.n;
        self.alpha[len..2 * len].copy_from_slice(llr);
    }

    /// Computes the left-child LLRs of the active level-`j` node.
    pub(crate) fn step_f(&mut self, j: usize, mode: ArithMode) {
        let half = 1 << (j - 1);
        let (lo, hi) = self.alpha.split_at_mut(2 * half);
        let parent = &hi[..2 * half];
        let child = &mut lo[half..];
        let (a, b) = parent.split_at(half);
        for ((c, &x), &y) in child.iter_mut().zip(a).zip(b) {
            *c = f_op(x, y, mode);
        }
    }

    /// Stores the left child's hard output in the parent's first half and
    /// computes the right-child LLRs.
    pub(crate) fn step_g(&mut self, j: usize) {
        let half = 1 << (j - 1);
        {
            let (lo, hi) = self.beta.split_at_mut(2 * half);
            hi[..half].copy_from_slice(&lo[half..]);
        }
        let (lo, hi) = self.alpha.split_at_mut(2 * half);
        let parent = &hi[..2 * half];
        let child = &mut lo[half..];
        let (a, b) = parent.split_at(half);
        let left = &self.beta[2 * half..3 * half];
        for (((c, &x), &y), &u) in child.iter_mut().zip(a).zip(b).zip(left) {
            *c = g_op(x, y, u);
        }
    }

    /// Combines the left (already in place) and right child outputs.
    pub(crate) fn combine(&mut self, j: usize) {
        let half = 1 << (j - 1);
        let (lo, hi) = self.beta.split_at_mut(2 * half);
        let right = &lo[half..];
        let (first, second) = hi[..2 * half].split_at_mut(half);
        for ((p, q), &r) in first.iter_mut().zip(second.iter_mut()).zip(right) {
            *p ^= r;
            *q = r;
        }
    }

    /// LLR buffer of level `j` and output buffer of the same level.
    pub(crate) fn level_mut(&mut self, j: usize) -> (&[f64], &mut [Bit]) {
        (&self.alpha[1 << j..2 << j], &mut self.beta[1 << j..2 << j])
    }

    pub(crate) fn beta_at(&self, j: usize) -> &[Bit] {
        &self.beta[1 << j..2 << j]
    }
}

fn sc_node(ws: &mut DecodeWorkspace, flags: &[Bit], j: usize, offset: usize, mode: ArithMode) {
    if j == 0 {
        let u = if flags[offset] == 0 {
            0
        } else {
            h(ws.alpha[1])
        };
        ws.beta[1] = u;
        ws.u_hat[offset] = u;
        return;
    }
    let half = 1 << (j - 1);
    ws.step_f(j, mode);
    sc_node(ws, flags, j - 1, offset, mode);
    ws.step_g(j);
    sc_node(ws, flags, j - 1, offset + half, mode);
    ws.combine(j);
}

/// SC decoding of an arbitrary frozen pattern.
///
/// Returns `(u_hat, beta)` where `beta` is the re-encoded estimate, so
/// `beta = u_hat * F^{(x)j}`.
pub fn decode_pattern(flags: &[Bit], llr: &[f64], mode: ArithMode) -> Result<(Vec<Bit>, Vec<Bit>)> {
    if !flags.len().is_power_of_two() {
        return Err(Error::InvalidFrozenSet(format!(
            "pattern length {} is not a power of two",
            flags.len()
        )));
    }
    if llr.len() != flags.len() {
        return Err(Error::LengthMismatch {
            expected: flags.len(),
            got: llr.len(),
        });
    }
    let j = flags.len().trailing_zeros() as usize;
    let mut ws = DecodeWorkspace::new(j);
    ws.load(llr);
    sc_node(&mut ws, flags, j, 0, mode);
    let beta = ws.beta_at(j).to_vec();
    Ok((ws.u_hat, beta))
}

/// Reference SC decoder.
pub fn decode_sc(
    spec: &CodeSpec,
    llr: &[f64],
    mode: ArithMode,
) -> Result<(Vec<Bit>, LatencyReport)> {
    let (u, beta) = decode_pattern(spec.flags(), llr, mode)?;
    debug_assert!({
        let mut x = u.clone();
        polar_transform(&mut x);
        x == beta
    });
    let report = schedule_time_steps(spec, &[], ScheduleMode::Sc, &LatencyModel::default());
    Ok((u, report))
}
