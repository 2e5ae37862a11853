//! SR-node decoding and the fast SC traversal.
//!
//! Inside an SR node the LLRs are handled in block layout: the bit-reversal
//! of the natural-order node vector. In that layout every source LLR is a
//! signed sum over a contiguous block of `2^(j-r)` node LLRs, EG-PC parity
//! groups are contiguous, and each source bit is repeated over a contiguous
//! block of the node output. Results are mapped back to natural order before
//! they leave [`decode_sr`].

use crate::code::{polar_transform, CodeSpec};
use crate::error::{Error, Result};
use crate::gaussian::TaConfig;
use crate::sc::{decode_pattern, f_op, h, ArithMode, DecodeWorkspace};
use crate::tree::{
    identify_sr_cover, schedule_time_steps, sr_time_steps, validate_cover, LatencyModel,
    LatencyReport, NodeId, ScheduleMode, SourceType, SrDescriptor,
};
use crate::Bit;

#[inline]
fn bitrev(k: usize, bits: usize) -> usize {
    if bits == 0 {
        0
    } else {
        k.reverse_bits() >> (usize::BITS as usize - bits)
    }
}

/// Permutes `src` into `dst` by bit-reversed index. The map is an involution.
pub fn bit_reverse_into<T: Copy>(src: &[T], dst: &mut [T]) {
    let bits = src.len().trailing_zeros() as usize;
    for (k, &x) in src.iter().enumerate() {
        dst[bitrev(k, bits)] = x;
    }
}

fn bit_reversed<T: Copy + Default>(src: &[T]) -> Vec<T> {
    let mut out = vec![T::default(); src.len()];
    bit_reverse_into(src, &mut out);
    out
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

fn path_llr_into(block_llr: &[f64], seq: &[Bit], out: &mut [f64]) {
    let w = seq.len();
    for (k, o) in out.iter_mut().enumerate() {
        let chunk = &block_llr[k * w..(k + 1) * w];
        *o = chunk
            .iter()
            .zip(seq)
            .map(|(&a, &s)| if s == 0 { a } else { -a })
            .sum();
    }
}

/// Source-node LLRs of every repetition sequence, from block-layout node
/// LLRs.
pub fn source_llrs(block_llr: &[f64], desc: &SrDescriptor) -> Result<Vec<Vec<f64>>> {
    check_len(1 << desc.j(), block_llr.len())?;
    Ok(desc
        .sequences
        .iter()
        .map(|s| {
            let mut out = vec![0.0; 1 << desc.r];
            path_llr_into(block_llr, s, &mut out);
            out
        })
        .collect())
}

/// Shared parity `z` of an EG-PC source.
pub fn egpc_parity(path_llr: &[f64], desc: &SrDescriptor, mode: ArithMode) -> Result<Bit> {
    let SourceType::EgPc { leftmost_rep, .. } = desc.source else {
        return Err(Error::Descriptor(format!(
            "{} has no EG-PC source",
            desc.label()
        )));
    };
    check_len(1 << desc.r, path_llr.len())?;
    if !leftmost_rep {
        return Ok(0);
    }
    let block = desc.egpc_block_len().unwrap_or(1);
    Ok(parity_from_blocks(path_llr, block, mode))
}

fn parity_from_blocks(llr: &[f64], block: usize, mode: ArithMode) -> Bit {
    let total: f64 = llr
        .chunks(block)
        .map(|c| c[1..].iter().fold(c[0], |acc, &x| f_op(acc, x, mode)))
        .sum();
    h(total)
}

/// Hard decisions, with the least reliable bit flipped if the parity of the
/// result differs from `z`.
pub fn wagner_decode(llr: &[f64], z: Bit) -> Vec<Bit> {
    let mut out = vec![0; llr.len()];
    wagner_into(llr, z, &mut out);
    out
}

fn wagner_into(llr: &[f64], z: Bit, out: &mut [Bit]) {
    let mut parity = 0;
    let mut weakest = 0;
    for (k, (&a, o)) in llr.iter().zip(out.iter_mut()).enumerate() {
        *o = h(a);
        parity ^= *o;
        if a.abs() < llr[weakest].abs() {
            weakest = k;
        }
    }
    if parity != z && !llr.is_empty() {
        out[weakest] ^= 1;
    }
}

fn source_steps(desc: &SrDescriptor) -> u64 {
    match desc.source {
        SourceType::Rate0 | SourceType::Rate1 => 0,
        SourceType::EgPc { leftmost_rep, .. } => 1 + u64::from(leftmost_rep),
        SourceType::RateC => (2u64 << desc.r) - 2,
    }
}

fn decode_source_into(
    path_llr: &[f64],
    desc: &SrDescriptor,
    mode: ArithMode,
    out: &mut [Bit],
) -> Result<()> {
    match desc.source {
        SourceType::Rate0 => out.fill(0),
        SourceType::Rate1 => {
            for (o, &a) in out.iter_mut().zip(path_llr) {
                *o = h(a);
            }
        }
        SourceType::EgPc { leftmost_rep, .. } => {
            let block = desc.egpc_block_len().unwrap_or(1);
            let z = if leftmost_rep {
                parity_from_blocks(path_llr, block, mode)
            } else {
                0
            };
            for (c, o) in path_llr.chunks(block).zip(out.chunks_mut(block)) {
                wagner_into(c, z, o);
            }
        }
        SourceType::RateC => {
            let natural = bit_reversed(path_llr);
            let (_, beta) = decode_pattern(&desc.source_flags, &natural, mode)?;
            bit_reverse_into(&beta, out);
        }
    }
    Ok(())
}

/// Decodes the source node of one path; the output is in block layout.
pub fn decode_source(
    path_llr: &[f64],
    desc: &SrDescriptor,
    mode: ArithMode,
) -> Result<(Vec<Bit>, u64)> {
    check_len(1 << desc.r, path_llr.len())?;
    let mut out = vec![0; path_llr.len()];
    decode_source_into(path_llr, desc, mode, &mut out)?;
    Ok((out, source_steps(desc)))
}

/// One candidate path through an SR node.
#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    pub path_llr: Vec<f64>,
    pub path_beta: Vec<Bit>,
    pub metric: f64,
}

/// `sum_k (-1)^beta[k] llr[k]`.
pub fn path_metric(llr: &[f64], beta: &[Bit]) -> f64 {
    llr.iter()
        .zip(beta)
        .map(|(&a, &b)| if b == 0 { a } else { -a })
        .sum()
}

/// Index of the best path; ties go to the lowest index.
pub fn select_path(paths: &[PathState]) -> Result<usize> {
    if paths.is_empty() {
        return Err(Error::Empty("path list"));
    }
    let mut best = 0;
    for (l, p) in paths.iter().enumerate().skip(1) {
        if p.metric > paths[best].metric {
            best = l;
        }
    }
    Ok(best)
}

/// Reusable buffers for SR-node decoding.
#[derive(Debug, Clone, Default)]
pub struct SrScratch {
    block: Vec<f64>,
    path: Vec<f64>,
    cand: Vec<Bit>,
    best: Vec<Bit>,
    out_block: Vec<Bit>,
}

/// Decodes an SR node from natural-order LLRs into natural-order `beta`.
pub(crate) fn decode_sr_into(
    node_llr: &[f64],
    desc: &SrDescriptor,
    mode: ArithMode,
    scratch: &mut SrScratch,
    beta: &mut [Bit],
) -> Result<()> {
    let width = 1usize << desc.j();
    let src_len = 1usize << desc.r;
    let rep = width / src_len;
    check_len(width, node_llr.len())?;
    check_len(width, beta.len())?;

    // Fast paths that need no permutation.
    if desc.sequences.len() == 1 {
        match desc.source {
            SourceType::Rate0 => {
                beta.fill(0);
                return Ok(());
            }
            SourceType::Rate1 if desc.r == desc.j() => {
                for (b, &a) in beta.iter_mut().zip(node_llr) {
                    *b = h(a);
                }
                return Ok(());
            }
            _ => {}
        }
    }

    scratch.block.resize(width, 0.0);
    bit_reverse_into(node_llr, &mut scratch.block);
    scratch.path.resize(src_len, 0.0);
    scratch.cand.resize(src_len, 0);
    scratch.best.resize(src_len, 0);
    let mut best_l = 0;
    let mut best_metric = f64::NEG_INFINITY;
    for (l, seq) in desc.sequences.iter().enumerate() {
        path_llr_into(&scratch.block, seq, &mut scratch.path);
        decode_source_into(&scratch.path, desc, mode, &mut scratch.cand)?;
        let metric = path_metric(&scratch.path, &scratch.cand);
        if l == 0 || metric > best_metric {
            best_metric = metric;
            best_l = l;
            std::mem::swap(&mut scratch.best, &mut scratch.cand);
        }
    }
    let seq = &desc.sequences[best_l];
    scratch.out_block.resize(width, 0);
    for (k, &b) in scratch.best.iter().enumerate() {
        for (m, &s) in seq.iter().enumerate() {
            scratch.out_block[k * rep + m] = b ^ s;
        }
    }
    bit_reverse_into(&scratch.out_block, beta);
    Ok(())
}

/// Decodes one SR node. Input LLRs and output bits are in natural order.
pub fn decode_sr(
    node_llr: &[f64],
    desc: &SrDescriptor,
    mode: ArithMode,
) -> Result<(Vec<Bit>, u64)> {
    let mut beta = vec![0; 1 << desc.j()];
    decode_sr_into(node_llr, desc, mode, &mut SrScratch::default(), &mut beta)?;
    Ok((beta, sr_time_steps(desc)))
}

/// All paths of an SR node with their source decisions and metrics.
pub fn enumerate_paths(
    node_llr: &[f64],
    desc: &SrDescriptor,
    mode: ArithMode,
) -> Result<Vec<PathState>> {
    let block = bit_reversed(node_llr);
    source_llrs(&block, desc)?
        .into_iter()
        .map(|path_llr| {
            let (path_beta, _) = decode_source(&path_llr, desc, mode)?;
            let metric = path_metric(&path_llr, &path_beta);
            Ok(PathState {
                path_llr,
                path_beta,
                metric,
            })
        })
        .collect()
}

/// Per-frame counters of a traversal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecodeStats {
    pub steps: u64,
    pub cycles: u64,
    /// Threshold tests performed.
    pub comparisons: u64,
    /// General nodes resolved by a hard decision.
    pub hard_decided: Vec<NodeId>,
    /// Frozen positions that came out as 1 after a subtree transform.
    pub frozen_violations: u64,
}

/// Buffers for one decoding thread.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub(crate) tree: DecodeWorkspace,
    sr: SrScratch,
}

impl Workspace {
    pub fn u_hat(&self) -> &[Bit] {
        &self.tree.u_hat
    }
}

/// Result of one traversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub u_hat: Vec<Bit>,
    pub stats: DecodeStats,
}

const NO_SR: u32 = u32::MAX;

/// Tree-traversal decoder driven by a cover of SR nodes.
///
/// With the cover of single leaves this is plain SC; with the cover from
/// [`identify_sr_cover`] it is SRFSC. Passing a [`TaConfig`] to
/// [`Decoder::decode_with`] enables threshold hard decisions at general
/// nodes.
#[derive(Debug, Clone)]
pub struct Decoder {
    spec: CodeSpec,
    cover: Vec<SrDescriptor>,
    owner_of: Vec<u32>,
    mode: ArithMode,
    model: LatencyModel,
    sr_steps: Vec<u64>,
    sr_cycles: Vec<u64>,
}

impl Decoder {
    /// SRFSC with the default cover.
    pub fn srfsc(spec: &CodeSpec) -> Self {
        Self::with_cover(spec, identify_sr_cover(spec)).expect("default cover is valid")
    }

    /// SC expressed as a cover of single leaves.
    pub fn sc(spec: &CodeSpec) -> Self {
        let cover = spec
            .flags()
            .iter()
            .enumerate()
            .map(|(k, &f)| {
                let source = if f == 0 {
                    SourceType::Rate0
                } else {
                    SourceType::Rate1
                };
                SrDescriptor::new(NodeId::new(0, k + 1), vec![], source, 0, vec![f])
                    .expect("leaf descriptor")
            })
            .collect();
        Self::with_cover(spec, cover).expect("leaf cover is valid")
    }

    pub fn with_cover(spec: &CodeSpec, cover: Vec<SrDescriptor>) -> Result<Self> {
        validate_cover(&cover, spec)?;
        let n = spec.n();
        let mut owner_of = vec![NO_SR; 2 << n];
        for (idx, d) in cover.iter().enumerate() {
            owner_of[d.owner.heap_index(n)] = idx as u32;
        }
        let model = LatencyModel::default();
        let mut dec = Self {
            spec: spec.clone(),
            sr_steps: cover.iter().map(sr_time_steps).collect(),
            sr_cycles: Vec::new(),
            cover,
            owner_of,
            mode: ArithMode::default(),
            model,
        };
        dec.set_model(model);
        Ok(dec)
    }

    pub fn with_mode(mut self, mode: ArithMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_model(mut self, model: LatencyModel) -> Self {
        self.set_model(model);
        self
    }

    fn set_model(&mut self, model: LatencyModel) {
        self.model = model;
        self.sr_cycles = self.cover.iter().map(|d| model.sr_cycles(d)).collect();
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn cover(&self) -> &[SrDescriptor] {
        &self.cover
    }

    pub fn mode(&self) -> ArithMode {
        self.mode
    }

    pub fn model(&self) -> &LatencyModel {
        &self.model
    }

    /// Latency of a traversal without hard decisions.
    pub fn latency(&self) -> LatencyReport {
        schedule_time_steps(&self.spec, &self.cover, ScheduleMode::Srfsc, &self.model)
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            tree: DecodeWorkspace::new(self.spec.n()),
            sr: SrScratch::default(),
        }
    }

    pub fn decode(&self, llr: &[f64]) -> Result<Decoded> {
        let mut ws = self.workspace();
        let stats = self.decode_with(llr, None, &mut ws)?;
        Ok(Decoded {
            u_hat: ws.tree.u_hat,
            stats,
        })
    }

    /// Decodes into `ws`; the estimate is left in [`Workspace::u_hat`].
    pub fn decode_with(
        &self,
        llr: &[f64],
        ta: Option<&TaConfig>,
        ws: &mut Workspace,
    ) -> Result<DecodeStats> {
        check_len(self.spec.len(), llr.len())?;
        if ws.tree.n() != self.spec.n() {
            *ws = self.workspace();
        }
        if let Some(ta) = ta {
            if ta.n() != self.spec.n() {
                return Err(Error::Descriptor(format!(
                    "threshold table for n = {} used with n = {}",
                    ta.n(),
                    self.spec.n()
                )));
            }
        }
        ws.tree.load(llr);
        let mut stats = DecodeStats::default();
        self.visit(1, self.spec.n(), 0, ta, ws, &mut stats)?;
        Ok(stats)
    }

    fn visit(
        &self,
        heap: usize,
        j: usize,
        offset: usize,
        ta: Option<&TaConfig>,
        ws: &mut Workspace,
        stats: &mut DecodeStats,
    ) -> Result<()> {
        let idx = self.owner_of[heap];
        if idx != NO_SR {
            let idx = idx as usize;
            let (alpha, beta) = ws.tree.level_mut(j);
            decode_sr_into(alpha, &self.cover[idx], self.mode, &mut ws.sr, beta)?;
            stats.steps += self.sr_steps[idx];
            stats.cycles += self.sr_cycles[idx];
            self.write_u(ws, j, offset, stats);
            return Ok(());
        }
        if j == 0 {
            return Err(Error::Descriptor(format!(
                "leaf {} is not covered",
                offset + 1
            )));
        }
        if let Some(t) = ta.and_then(|ta| ta.threshold_at_heap(heap)) {
            stats.comparisons += 1;
            let (alpha, beta) = ws.tree.level_mut(j);
            if crate::ta::hard_decide_into(alpha, t, beta) {
                stats
                    .hard_decided
                    .push(NodeId::from_heap(heap, self.spec.n()));
                self.write_u(ws, j, offset, stats);
                return Ok(());
            }
        }
        stats.steps += 2;
        stats.cycles += self.model.general_cycles(j);
        ws.tree.step_f(j, self.mode);
        self.visit(2 * heap, j - 1, offset, ta, ws, stats)?;
        ws.tree.step_g(j);
        self.visit(2 * heap + 1, j - 1, offset + (1 << (j - 1)), ta, ws, stats)?;
        ws.tree.combine(j);
        Ok(())
    }

    /// Recovers the message bits under a resolved node from its output.
    fn write_u(&self, ws: &mut Workspace, j: usize, offset: usize, stats: &mut DecodeStats) {
        let width = 1 << j;
        let beta = &ws.tree.beta[width..2 * width];
        let u = &mut ws.tree.u_hat[offset..offset + width];
        u.copy_from_slice(beta);
        polar_transform(u);
        let flags = &self.spec.flags()[offset..offset + width];
        stats.frozen_violations += u
            .iter()
            .zip(flags)
            .filter(|(&b, &f)| f == 0 && b == 1)
            .count() as u64;
    }
}

/// SRFSC decoding with an explicit cover.
pub fn decode_srfsc(
    spec: &CodeSpec,
    cover: &[SrDescriptor],
    llr: &[f64],
    mode: ArithMode,
) -> Result<(Vec<Bit>, LatencyReport)> {
    let dec = Decoder::with_cover(spec, cover.to_vec())?.with_mode(mode);
    let out = dec.decode(llr)?;
    Ok((out.u_hat, dec.latency()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::describe_pattern;

    fn desc(v: Vec<Bit>, source: SourceType, r: usize, flags: Vec<Bit>) -> SrDescriptor {
        let j = v.len() + r;
        SrDescriptor::new(NodeId::new(j, 1), v, source, r, flags).unwrap()
    }

    #[test]
    fn block_sum_example() {
        let d = desc(vec![1], SourceType::Rate1, 0, vec![1]);
        let p = source_llrs(&[2.0, -1.0], &d).unwrap();
        assert_eq!(p, vec![vec![1.0], vec![-3.0]]);
        let empty = desc(vec![], SourceType::Rate1, 2, vec![1; 4]);
        assert_eq!(
            source_llrs(&[1.0, 2.0, 3.0, 4.0], &empty).unwrap(),
            vec![vec![1.0, 2.0, 3.0, 4.0]]
        );
        let zero = source_llrs(&[0.0; 2], &d).unwrap();
        assert!(zero.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn parity_examples() {
        let rate0 = SourceType::EgPc {
            leftmost_rep: false,
            leftmost_level: 1,
        };
        let rep = SourceType::EgPc {
            leftmost_rep: true,
            leftmost_level: 1,
        };
        let d0 = desc(vec![], rate0, 2, vec![0, 0, 1, 1]);
        let d1 = desc(vec![], rep, 2, vec![0, 1, 1, 1]);
        assert_eq!(
            egpc_parity(&[-5.0, 1.0, 1.0, 1.0], &d0, ArithMode::MinSum).unwrap(),
            0
        );
        assert_eq!(
            egpc_parity(&[1.0, -2.0, 3.0, 4.0], &d1, ArithMode::MinSum).unwrap(),
            0
        );
        assert_eq!(
            egpc_parity(&[1.0, -2.0, -3.0, 4.0], &d1, ArithMode::MinSum).unwrap(),
            1
        );
        let not = desc(vec![], SourceType::Rate1, 1, vec![1, 1]);
        assert!(egpc_parity(&[1.0, 1.0], &not, ArithMode::MinSum).is_err());
    }

    #[test]
    fn wagner_examples() {
        let llr = [1.2, -0.4, 2.0, 0.9];
        assert_eq!(wagner_decode(&llr, 0), vec![0, 0, 0, 0]);
        assert_eq!(wagner_decode(&llr, 1), vec![0, 1, 0, 0]);
        assert_eq!(wagner_decode(&[1.0, 2.0, 3.0, 4.0], 1), vec![1, 0, 0, 0]);
        assert_eq!(wagner_decode(&[1.0, -1.0, 1.0], 0), vec![1, 1, 0]);
    }

    #[test]
    fn source_examples() {
        let r1 = desc(vec![], SourceType::Rate1, 1, vec![1, 1]);
        assert_eq!(
            decode_source(&[-3.0, 5.0], &r1, ArithMode::MinSum)
                .unwrap()
                .0,
            vec![1, 0]
        );
        let r0 = desc(vec![], SourceType::Rate0, 1, vec![0, 0]);
        assert_eq!(
            decode_source(&[-3.0, 5.0], &r0, ArithMode::MinSum)
                .unwrap()
                .0,
            vec![0, 0]
        );
        let eg = desc(
            vec![],
            SourceType::EgPc {
                leftmost_rep: false,
                leftmost_level: 1,
            },
            2,
            vec![0, 0, 1, 1],
        );
        let (b, steps) = decode_source(&[1.2, -0.4, 2.0, 0.9], &eg, ArithMode::MinSum).unwrap();
        assert_eq!(b, vec![0, 0, 0, 0]);
        assert_eq!(steps, 1);
    }

    #[test]
    fn select_path_rules() {
        let mk = |m: f64| PathState {
            path_llr: vec![],
            path_beta: vec![],
            metric: m,
        };
        assert_eq!(select_path(&[mk(1.0), mk(3.0)]).unwrap(), 1);
        assert_eq!(select_path(&[mk(1.0)]).unwrap(), 0);
        assert_eq!(select_path(&[mk(2.0), mk(2.0)]).unwrap(), 0);
        assert!(select_path(&[]).is_err());
    }

    #[test]
    fn decode_sr_example() {
        let d = desc(vec![1], SourceType::Rate1, 0, vec![1]);
        let paths = enumerate_paths(&[2.0, -1.0], &d, ArithMode::MinSum).unwrap();
        assert_eq!(paths[0].metric, 1.0);
        assert_eq!(paths[1].metric, 3.0);
        assert_eq!(
            decode_sr(&[2.0, -1.0], &d, ArithMode::MinSum).unwrap().0,
            vec![0, 1]
        );
        let z = desc(vec![], SourceType::Rate0, 3, vec![0; 8]);
        assert_eq!(
            decode_sr(&[-1.0; 8], &z, ArithMode::MinSum).unwrap().0,
            vec![0; 8]
        );
    }

    #[test]
    fn bit_reverse_is_involution() {
        let v: Vec<usize> = (0..16).collect();
        let once = bit_reversed(&v);
        assert_eq!(once[1], 8);
        assert_eq!(bit_reversed(&once), v);
    }

    #[test]
    fn rep_node_matches_sc() {
        let d = describe_pattern(&[0, 0, 0, 1]).remove(0);
        let llr = [0.3, -1.1, 0.7, -0.2];
        let (beta, steps) = decode_sr(&llr, &d, ArithMode::MinSum).unwrap();
        let (_, sc_beta) = decode_pattern(&[0, 0, 0, 1], &llr, ArithMode::MinSum).unwrap();
        assert_eq!(beta, sc_beta);
        assert_eq!(steps, 1);
    }
}
