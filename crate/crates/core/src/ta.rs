//! Threshold-aided SRFSC and the CRC-gated two-attempt decoder.

use crate::code::crc_check;
use crate::error::{Error, Result};
use crate::gaussian::TaConfig;
use crate::srfsc::{Decoder, Workspace};
use crate::tree::NodeId;
use crate::Bit;

/// Hard decisions if every `|llr|` exceeds `t`.
pub fn try_hard_decide(llr: &[f64], t: f64) -> Option<Vec<Bit>> {
    let mut out = vec![0; llr.len()];
    hard_decide_into(llr, t, &mut out).then_some(out)
}

pub(crate) fn hard_decide_into(llr: &[f64], t: f64, out: &mut [Bit]) -> bool {
    if !llr.iter().all(|a| a.abs() > t) {
        return false;
    }
    for (o, &a) in out.iter_mut().zip(llr) {
        *o = Bit::from(a < 0.0);
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaOutcome {
    pub u_hat: Vec<Bit>,
    pub hard_decided: Vec<NodeId>,
    pub comparisons: u64,
    pub steps: u64,
    pub cycles: u64,
    /// `None` when the code has no CRC.
    pub crc_pass: Option<bool>,
    pub frozen_violations: u64,
}

fn crc_status(decoder: &Decoder, u_hat: &[Bit]) -> Option<bool> {
    let spec = decoder.spec();
    spec.crc()
        .map(|crc| crc_check(&spec.extract_info(u_hat), crc))
}

/// TA-SRFSC into a caller-provided workspace.
pub fn decode_ta_with(
    decoder: &Decoder,
    ta: &TaConfig,
    llr: &[f64],
    ws: &mut Workspace,
) -> Result<TaOutcome> {
    let stats = decoder.decode_with(llr, Some(ta), ws)?;
    let u_hat = ws.u_hat().to_vec();
    Ok(TaOutcome {
        crc_pass: crc_status(decoder, &u_hat),
        u_hat,
        hard_decided: stats.hard_decided,
        comparisons: stats.comparisons,
        steps: stats.steps,
        cycles: stats.cycles,
        frozen_violations: stats.frozen_violations,
    })
}

/// SRFSC with threshold hard decisions at eligible general nodes.
pub fn decode_ta_srfsc(decoder: &Decoder, ta: &TaConfig, llr: &[f64]) -> Result<TaOutcome> {
    decode_ta_with(decoder, ta, llr, &mut decoder.workspace())
}

/// `1 - epsilon (1 - bler)`.
pub fn bler_upper_bound(epsilon: f64, bler_srfsc: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::domain("epsilon", epsilon, "in [0, 1]"));
    }
    if !(0.0..=1.0).contains(&bler_srfsc) {
        return Err(Error::domain("BLER", bler_srfsc, "in [0, 1]"));
    }
    Ok(1.0 - epsilon * (1.0 - bler_srfsc))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultistageOutcome {
    pub u_hat: Vec<Bit>,
    /// 1 or 2.
    pub attempts: u8,
    pub steps_total: u64,
    pub cycles_total: u64,
    pub first: TaOutcome,
}

/// TA-SRFSC, then plain SRFSC from the first bit if the CRC fails and at
/// least one node was hard-decided.
pub fn decode_multistage_with(
    decoder: &Decoder,
    ta: &TaConfig,
    llr: &[f64],
    ws: &mut Workspace,
) -> Result<MultistageOutcome> {
    if decoder.spec().crc().is_none() {
        return Err(Error::CrcRequired);
    }
    let first = decode_ta_with(decoder, ta, llr, ws)?;
    if first.crc_pass == Some(true) || first.hard_decided.is_empty() {
        return Ok(MultistageOutcome {
            u_hat: first.u_hat.clone(),
            attempts: 1,
            steps_total: first.steps,
            cycles_total: first.cycles,
            first,
        });
    }
    let second = decoder.decode_with(llr, None, ws)?;
    Ok(MultistageOutcome {
        u_hat: ws.u_hat().to_vec(),
        attempts: 2,
        steps_total: first.steps + second.steps,
        cycles_total: first.cycles + second.cycles,
        first,
    })
}

pub fn decode_multistage(
    decoder: &Decoder,
    ta: &TaConfig,
    llr: &[f64],
) -> Result<MultistageOutcome> {
    decode_multistage_with(decoder, ta, llr, &mut decoder.workspace())
}
