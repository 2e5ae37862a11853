//! Code definition, encoding, CRC and channel LLRs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian;
use crate::Bit;

/// Largest supported tree depth.
pub const MAX_DEPTH: usize = 24;

/// CRC generator polynomial over GF(2).
///
/// The register starts at zero, bits are processed most significant first,
/// and neither the input nor the output is reflected or XOR-ed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcSpec {
    length: usize,
    /// Bit `i` holds the coefficient of `D^i`; bit `length` is always set.
    mask: u64,
}

impl CrcSpec {
    /// Builds a CRC from coefficients listed from `D^length` down to `D^0`.
    pub fn from_coefficients(coefficients: &[Bit]) -> Result<Self> {
        if coefficients.len() < 2 || coefficients.len() > 64 {
            return Err(Error::InvalidCrc(format!(
                "degree must be between 1 and 63, got {}",
                coefficients.len().saturating_sub(1)
            )));
        }
        if coefficients.iter().any(|&c| c > 1) {
            return Err(Error::InvalidCrc("coefficients must be 0 or 1".into()));
        }
        let length = coefficients.len() - 1;
        if coefficients[0] != 1 || coefficients[length] != 1 {
            return Err(Error::InvalidCrc(
                "leading and trailing coefficients must be 1".into(),
            ));
        }
        let mask = coefficients
            .iter()
            .fold(0u64, |acc, &c| (acc << 1) | u64::from(c));
        Ok(Self { length, mask })
    }

    fn from_exponents(exponents: &[usize]) -> Self {
        let length = exponents[0];
        let mask = exponents.iter().fold(0u64, |acc, &e| acc | (1 << e));
        Self { length, mask }
    }

    /// `D^6 + D^5 + 1`
    pub fn crc6() -> Self {
        Self::from_exponents(&[6, 5, 0])
    }

    /// `D^11 + D^10 + D^9 + D^5 + 1`
    pub fn crc11() -> Self {
        Self::from_exponents(&[11, 10, 9, 5, 0])
    }

    /// `D^16 + D^12 + D^5 + 1`
    pub fn crc16() -> Self {
        Self::from_exponents(&[16, 12, 5, 0])
    }

    /// Looks up one of the built-in polynomials by length.
    pub fn by_length(length: usize) -> Option<Self> {
        match length {
            6 => Some(Self::crc6()),
            11 => Some(Self::crc11()),
            16 => Some(Self::crc16()),
            _ => None,
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Coefficients from `D^length` down to `D^0`.
    pub fn coefficients(&self) -> Vec<Bit> {
        (0..=self.length)
            .rev()
            .map(|i| ((self.mask >> i) & 1) as Bit)
            .collect()
    }
}

/// Remainder of `bits * D^L` modulo the generator, most significant first.
pub fn crc_compute(bits: &[Bit], crc: &CrcSpec) -> Vec<Bit> {
    let len = crc.length;
    let top = 1u64 << (len - 1);
    let low = crc.mask & ((1u64 << len) - 1);
    let mut reg = 0u64;
    for &b in bits {
        let feedback = ((reg & top) != 0) ^ (b != 0);
        reg = (reg << 1) & ((1u64 << len) - 1);
        if feedback {
            reg ^= low;
        }
    }
    (0..len).rev().map(|i| ((reg >> i) & 1) as Bit).collect()
}

/// True iff the full sequence (payload followed by its CRC) divides evenly.
pub fn crc_check(bits_with_crc: &[Bit], crc: &CrcSpec) -> bool {
    crc_compute(bits_with_crc, crc).iter().all(|&b| b == 0)
}

/// In-place `x = u * F^{(x)n}` over GF(2), natural order.
///
/// The transform is its own inverse, so the same call maps a codeword back
/// to the message domain.
pub fn polar_transform(bits: &mut [Bit]) {
    let len = bits.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in bits.chunks_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x ^= *y;
            }
        }
        half *= 2;
    }
}

/// Static definition of a polar code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    n: usize,
    k: usize,
    flags: Vec<Bit>,
    info_positions: Vec<usize>,
    crc: Option<CrcSpec>,
    design_sigma: Option<f64>,
}

impl CodeSpec {
    /// Builds a code from its flag vector (1 = information, 0 = frozen).
    pub fn from_flags(flags: Vec<Bit>, crc: Option<CrcSpec>) -> Result<Self> {
        let len = flags.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidFrozenSet(format!(
                "flag vector length {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_DEPTH {
            return Err(Error::DepthOutOfRange(n));
        }
        if flags.iter().any(|&f| f > 1) {
            return Err(Error::InvalidFrozenSet("flags must be 0 or 1".into()));
        }
        let info_positions: Vec<usize> = flags
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f == 1).then_some(i))
            .collect();
        let k = info_positions.len();
        if k == 0 {
            return Err(Error::InfoSizeOutOfRange { k, len });
        }
        if let Some(c) = &crc {
            if k < c.length() + 1 {
                return Err(Error::CrcTooLong { crc: c.length(), k });
            }
        }
        Ok(Self {
            n,
            k,
            flags,
            info_positions,
            crc,
            design_sigma: None,
        })
    }

    /// Same code with a different CRC configuration.
    pub fn with_crc(self, crc: Option<CrcSpec>) -> Result<Self> {
        let design_sigma = self.design_sigma;
        let mut spec = Self::from_flags(self.flags, crc)?;
        spec.design_sigma = design_sigma;
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    /// Non-frozen positions, CRC bits included.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Rate `K / N`, CRC bits counted in `K`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.len() as f64
    }

    pub fn flags(&self) -> &[Bit] {
        &self.flags
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn crc(&self) -> Option<&CrcSpec> {
        self.crc.as_ref()
    }

    pub fn crc_len(&self) -> usize {
        self.crc.as_ref().map_or(0, CrcSpec::length)
    }

    /// Payload bits carried per frame (`K` minus the CRC).
    pub fn payload_len(&self) -> usize {
        self.k - self.crc_len()
    }

    pub fn design_sigma(&self) -> Option<f64> {
        self.design_sigma
    }

    /// Collects the `K` bits at the information positions of `u`.
    pub fn extract_info(&self, u: &[Bit]) -> Vec<Bit> {
        self.info_positions.iter().map(|&p| u[p]).collect()
    }

    /// 1-based frozen indices, the on-disk representation.
    pub fn to_file(&self) -> FrozenSetFile {
        FrozenSetFile {
            len: self.len(),
            frozen: self
                .flags
                .iter()
                .enumerate()
                .filter_map(|(i, &f)| (f == 0).then_some(i + 1))
                .collect(),
        }
    }
}

/// Frozen-set file: `{"N": 1024, "frozen": [1, 2, ...]}` with 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrozenSetFile {
    #[serde(rename = "N")]
    pub len: usize,
    pub frozen: Vec<usize>,
}

impl FrozenSetFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Flag vector described by the file.
    pub fn flags(&self) -> Result<Vec<Bit>> {
        let mut flags = vec![1; self.len];
        for &idx in &self.frozen {
            if idx == 0 || idx > self.len {
                return Err(Error::InvalidFrozenSet(format!(
                    "index {idx} outside 1..={}",
                    self.len
                )));
            }
            if flags[idx - 1] == 0 {
                return Err(Error::InvalidFrozenSet(format!("index {idx} repeated")));
            }
            flags[idx - 1] = 0;
        }
        Ok(flags)
    }
}

/// Chooses the `K` information positions.
///
/// Without an override the `K` leaves with the largest Gaussian-approximation
/// mean at `design_sigma` are selected, ties going to the higher index. An
/// override is taken verbatim and `design_sigma` is ignored.
pub fn construct_frozen_set(
    n: usize,
    k: usize,
    design_sigma: f64,
    override_set: Option<&FrozenSetFile>,
) -> Result<CodeSpec> {
    if n == 0 || n > MAX_DEPTH {
        return Err(Error::DepthOutOfRange(n));
    }
    let len = 1usize << n;
    if k == 0 || k > len {
        return Err(Error::InfoSizeOutOfRange { k, len });
    }
    if let Some(file) = override_set {
        if file.len != len {
            return Err(Error::InvalidFrozenSet(format!(
                "override has N = {}, expected {len}",
                file.len
            )));
        }
        let flags = file.flags()?;
        let weight = flags.iter().filter(|&&f| f == 1).count();
        if weight != k {
            return Err(Error::InvalidFrozenSet(format!(
                "override has {weight} information positions, expected {k}"
            )));
        }
        return CodeSpec::from_flags(flags, None);
    }
    if !(design_sigma > 0.0 && design_sigma.is_finite()) {
        return Err(Error::domain("design_sigma", design_sigma, "> 0"));
    }
    let leaves = gaussian::leaf_means(n, design_sigma)?;
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| leaves[b].total_cmp(&leaves[a]).then(b.cmp(&a)));
    let mut flags = vec![0; len];
    for &p in &order[..k] {
        flags[p] = 1;
    }
    let mut spec = CodeSpec::from_flags(flags, None)?;
    spec.design_sigma = Some(design_sigma);
    Ok(spec)
}

/// One encoded frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    /// Payload bits as supplied by the caller.
    pub payload: Vec<Bit>,
    /// Message-domain vector (frozen positions zero).
    pub u: Vec<Bit>,
    /// Codeword.
    pub x: Vec<Bit>,
}

/// Appends the CRC (if any), fills the information positions in increasing
/// index order, and transforms.
pub fn encode(spec: &CodeSpec, payload: &[Bit]) -> Result<Frame> {
    if payload.len() != spec.payload_len() {
        return Err(Error::LengthMismatch {
            expected: spec.payload_len(),
            got: payload.len(),
        });
    }
    let mut info = payload.to_vec();
    if let Some(crc) = spec.crc() {
        info.extend(crc_compute(payload, crc));
    }
    let mut u = vec![0; spec.len()];
    for (&pos, &b) in spec.info_positions().iter().zip(&info) {
        u[pos] = b & 1;
    }
    let mut x = u.clone();
    polar_transform(&mut x);
    Ok(Frame {
        payload: payload.to_vec(),
        u,
        x,
    })
}

/// Element-wise `2 y / sigma^2`.
pub fn channel_llr(y: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::domain("sigma", sigma, "> 0"));
    }
    let scale = 2.0 / (sigma * sigma);
    Ok(y.iter().map(|&v| scale * v).collect())
}

/// Noise standard deviation for a given `Eb/N0` in dB and rate.
pub fn ebno_to_sigma(ebno_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0))).sqrt()
}
