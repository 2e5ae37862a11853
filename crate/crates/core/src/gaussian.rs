//! Gaussian-approximation numerics.
//!
//! Under the all-zero-codeword assumption the LLR entering node `(j, i)` is
//! modelled as `N(m, 2m)`. The means follow the recursion
//!
//! ```text
//! m(root)        = 2 / sigma^2
//! m(left child)  = phi^-1(1 - (1 - phi(m))^2)
//! m(right child) = 2 m
//! ```
//!
//! where `phi(x) = 1 - E[tanh(u / 2)]`, `u ~ N(x, 2x)`, and `phi(0) = 0`.
//! `phi` decreases from 1 (as `x -> 0+`) towards 0; the value at zero is a
//! convention that maps a zero mean to a zero mean.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tree::NodeId;

/// Integration cutoff for the `sech(u/2)` tail: `sech(45) < 1e-19`.
const SECH_CUTOFF: f64 = 90.0;

/// Natural log of `phi(x)` for `x > 0`.
///
/// Completing the square turns the defining integral into
///
/// ```text
/// phi(x) = exp(-x/4) / sqrt(4 pi x) * Int sech(u/2) exp(-u^2 / (4x)) du
/// ```
///
/// whose integrand is positive, even and centred at zero, so the result has
/// full relative precision even where `phi` itself underflows. The window
/// covers ten standard deviations of the Gaussian kernel, truncated where
/// `sech` is negligible.
pub fn ln_phi(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let sd = (2.0 * x).sqrt();
    let upper = (10.0 * sd).min(SECH_CUTOFF);
    let scale = (4.0 * PI * x).sqrt().min(2.0 * PI);
    let integrand = |u: f64| {
        let g = (-u * u / (4.0 * x)).exp();
        if g == 0.0 {
            0.0
        } else {
            g / (0.5 * u).cosh()
        }
    };
    let half = quadrature::integrate(integrand, 0.0, upper, 1e-15 * scale).integral;
    -0.25 * x - 0.5 * (4.0 * PI * x).ln() + (2.0 * half).ln()
}

/// `phi(x)`; zero at zero, strictly decreasing on `(0, inf)`.
pub fn phi(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain("phi argument", x, ">= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(ln_phi(x).exp())
}

/// Inverse of `phi` on `(0, inf)`, with `phi_inv(0) = 0`.
pub fn phi_inv(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain("phi_inv argument", p, "in [0, 1)"));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok(phi_inv_ln(p.ln(), None))
}

/// Bisection for `ln phi(x) = ln_p`, optionally with a known upper bracket.
fn phi_inv_ln(ln_p: f64, upper: Option<f64>) -> f64 {
    if ln_p >= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0f64;
    let mut hi = match upper {
        Some(h) if h > 0.0 && ln_phi(h) <= ln_p => h,
        _ => {
            let mut h = 1.0f64;
            while ln_phi(h) > ln_p {
                lo = h;
                h *= 2.0;
            }
            h
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ln_phi(mid) > ln_p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean of the left child given the parent mean.
pub fn left_child_mean(parent: f64) -> f64 {
    if parent <= 0.0 {
        return 0.0;
    }
    // 1 - (1 - phi)^2 = phi (2 - phi), evaluated in the log domain.
    let lp = ln_phi(parent);
    let one_minus_phi = -lp.exp_m1();
    let ln_target = lp + one_minus_phi.ln_1p();
    phi_inv_ln(ln_target, Some(parent))
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q`] by bisection.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("q_inv argument", p, "in (0, 1)"));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever bracket end is closer in value.
    if (q(lo) - p).abs() <= (q(hi) - p).abs() {
        Ok(lo)
    } else {
        Ok(hi)
    }
}

/// Per-node LLR means for a tree of depth `n`, indexed in heap order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTable {
    n: usize,
    sigma: f64,
    /// Heap layout: root at 1, children of `h` at `2h` and `2h + 1`.
    means: Vec<f64>,
}

impl GaussianTable {
    pub fn compute(n: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain("sigma", sigma, "> 0"));
        }
        let len = 1usize << n;
        let mut means = vec![0.0; 2 * len];
        means[1] = 2.0 / (sigma * sigma);
        for h in 1..len {
            let m = means[h];
            means[2 * h] = left_child_mean(m);
            means[2 * h + 1] = 2.0 * m;
        }
        Ok(Self { n, sigma, means })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mean(&self, node: NodeId) -> f64 {
        self.means[node.heap_index(self.n)]
    }

    pub(crate) fn mean_at_heap(&self, h: usize) -> f64 {
        self.means[h]
    }

    /// Means of the `N` leaves, left to right.
    pub fn leaves(&self) -> &[f64] {
        &self.means[1 << self.n..]
    }
}

/// Computes the mean table for a code's tree.
pub fn compute_means(spec: &crate::CodeSpec, sigma: f64) -> Result<GaussianTable> {
    GaussianTable::compute(spec.n(), sigma)
}

pub(crate) fn leaf_means(n: usize, sigma: f64) -> Result<Vec<f64>> {
    Ok(GaussianTable::compute(n, sigma)?.leaves().to_vec())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.5 && epsilon < 1.0) {
        return Err(Error::domain("epsilon", epsilon, "in (0.5, 1)"));
    }
    Ok(())
}

/// `1 - epsilon^(1/2^n)`.
fn per_bit_budget(epsilon: f64, n: usize) -> f64 {
    -(epsilon.ln() / (1u64 << n) as f64).exp_m1()
}

/// Smallest `c` on a 0.1 grid with `Q(c) <= 1 - epsilon^(1/2^n)`.
pub fn min_c(epsilon: f64, n: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    let budget = per_bit_budget(epsilon, n);
    (1..=400)
        .map(|k| k as f64 / 10.0)
        .find(|&c| q(c) <= budget)
        .ok_or(Error::InfeasibleTa {
            epsilon,
            c: 40.0,
            n,
        })
}

/// Lower bound on a node mean for the threshold test to be allowed:
/// `1/2 [c - Q^-1(Q(c) / (epsilon^(-1/2^n) - 1))]^2`.
pub fn eligibility_bound(epsilon: f64, c: f64, n: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    let denom = (-epsilon.ln() / (1u64 << n) as f64).exp_m1();
    let inner = q(c) / denom;
    if !(inner > 0.0 && inner < 1.0) {
        return Err(Error::InfeasibleTa { epsilon, c, n });
    }
    let t = c - q_inv(inner)?;
    Ok(0.5 * t * t)
}

/// Hard-decision threshold `|-m + c sqrt(2m)|`.
pub fn threshold(m: f64, c: f64) -> f64 {
    (-m + c * (2.0 * m).sqrt()).abs()
}

/// Threshold-aided decoding parameters for one channel condition.
#[derive(Debug, Clone, PartialEq)]
pub struct TaConfig {
    pub epsilon: f64,
    pub c: f64,
    pub m_bound: f64,
    n: usize,
    thresholds: Vec<Option<f64>>,
}

impl TaConfig {
    /// A configuration that never hard-decides.
    pub fn disabled(n: usize) -> Self {
        Self {
            epsilon: 1.0,
            c: f64::INFINITY,
            m_bound: f64::INFINITY,
            n,
            thresholds: vec![None; 2 << n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Threshold of an eligible node.
    pub fn threshold(&self, node: NodeId) -> Option<f64> {
        self.thresholds[node.heap_index(self.n)]
    }

    pub(crate) fn threshold_at_heap(&self, h: usize) -> Option<f64> {
        self.thresholds[h]
    }

    pub fn eligible_count(&self) -> usize {
        self.thresholds.iter().flatten().count()
    }

    /// Number of eligible nodes at each level `0..=n`.
    pub fn eligible_per_level(&self) -> Vec<usize> {
        (0..=self.n)
            .map(|j| {
                let start = 1usize << (self.n - j);
                self.thresholds[start..2 * start].iter().flatten().count()
            })
            .collect()
    }
}

/// Marks every node whose mean reaches the eligibility bound and stores its
/// threshold.
pub fn build_ta_config(table: &GaussianTable, epsilon: f64, c: f64) -> Result<TaConfig> {
    check_epsilon(epsilon)?;
    let n = table.n();
    if c.is_nan() || c <= 0.0 || q(c) > per_bit_budget(epsilon, n) {
        return Err(Error::InfeasibleTa { epsilon, c, n });
    }
    let m_bound = eligibility_bound(epsilon, c, n)?;
    let mut thresholds = vec![None; 2 << n];
    for (h, slot) in thresholds.iter_mut().enumerate().skip(1) {
        let m = table.mean_at_heap(h);
        if m >= m_bound && m > 0.0 {
            *slot = Some(threshold(m, c));
        }
    }
    Ok(TaConfig {
        epsilon,
        c,
        m_bound,
        n,
        thresholds,
    })
}
