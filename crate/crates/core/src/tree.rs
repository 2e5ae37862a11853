//! Decoding-tree analysis: node classification, the SR-node cover,
//! repetition sequences and the two latency models.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::Bit;

/// Node `i` (1-based) at level `j`; level-`j` nodes span `2^j` leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId {
    pub j: usize,
    pub i: usize,
}

impl NodeId {
    pub fn new(j: usize, i: usize) -> Self {
        debug_assert!(i >= 1);
        Self { j, i }
    }

    pub fn root(n: usize) -> Self {
        Self { j: n, i: 1 }
    }

    pub fn left(self) -> Self {
        Self::new(self.j - 1, 2 * self.i - 1)
    }

    pub fn right(self) -> Self {
        Self::new(self.j - 1, 2 * self.i)
    }

    /// Number of leaves under the node.
    pub fn width(self) -> usize {
        1 << self.j
    }

    /// First leaf (0-based) under the node.
    pub fn first_leaf(self) -> usize {
        (self.i - 1) << self.j
    }

    pub fn leaves(self) -> std::ops::Range<usize> {
        self.first_leaf()..self.first_leaf() + self.width()
    }

    /// Position in a heap layout with the root at 1.
    pub fn heap_index(self, n: usize) -> usize {
        (1 << (n - self.j)) + self.i - 1
    }

    pub fn from_heap(h: usize, n: usize) -> Self {
        let depth = usize::BITS as usize - 1 - h.leading_zeros() as usize;
        Self::new(n - depth, h - (1 << depth) + 1)
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "N({},{})", self.j, self.i)
    }
}

/// Coarse node taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeType {
    Rate0,
    Rate1,
    Rep,
    Spc,
    RateC,
}

/// Classifies a frozen-flag segment.
///
/// Length-1 segments are Rate-0 or Rate-1. Longer segments are REP for
/// `(0, ..., 0, 1)` and SPC for `(0, 1, ..., 1)`.
pub fn classify(d: &[Bit]) -> NodeType {
    debug_assert!(d.len().is_power_of_two());
    let ones = d.iter().filter(|&&b| b == 1).count();
    if ones == 0 {
        NodeType::Rate0
    } else if ones == d.len() {
        NodeType::Rate1
    } else if ones == 1 && d[d.len() - 1] == 1 {
        NodeType::Rep
    } else if ones == d.len() - 1 && d[0] == 0 {
        NodeType::Spc
    } else {
        NodeType::RateC
    }
}

fn is_rep(d: &[Bit]) -> bool {
    !d.is_empty() && d[..d.len() - 1].iter().all(|&b| b == 0) && d[d.len() - 1] == 1
}

fn is_zero(d: &[Bit]) -> bool {
    d.iter().all(|&b| b == 0)
}

/// Source-node type of an SR node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum SourceType {
    Rate0,
    Rate1,
    /// Extended generalised parity check. The leftmost descendant at level
    /// `leftmost_level` is REP (`leftmost_rep`) or Rate-0, everything to its
    /// right is information.
    EgPc {
        leftmost_rep: bool,
        leftmost_level: usize,
    },
    RateC,
}

impl SourceType {
    pub fn name(&self) -> &'static str {
        match self {
            SourceType::Rate0 => "Rate-0",
            SourceType::Rate1 => "Rate-1",
            SourceType::EgPc { .. } => "EG-PC",
            SourceType::RateC => "Rate-C",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            SourceType::Rate0 => 0,
            SourceType::Rate1 => 1,
            SourceType::EgPc { .. } => 2,
            SourceType::RateC => 3,
        }
    }
}

/// One SR node `SR(v, source, r)` rooted at `owner`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrDescriptor {
    pub owner: NodeId,
    /// `(v[j], v[j-1], ..., v[r+1])`.
    pub v: Vec<Bit>,
    pub source: SourceType,
    pub r: usize,
    /// Index of the source node at level `r`.
    pub e: usize,
    /// Repetition sequences, each of length `2^(j-r)`.
    pub sequences: Vec<Vec<Bit>>,
    /// Frozen flags under the source node, natural order.
    pub source_flags: Vec<Bit>,
}

impl SrDescriptor {
    /// Builds a descriptor, checking that `v`, `r` and `source_flags` agree.
    pub fn new(
        owner: NodeId,
        v: Vec<Bit>,
        source: SourceType,
        r: usize,
        source_flags: Vec<Bit>,
    ) -> Result<Self> {
        if r > owner.j || v.len() != owner.j - r {
            return Err(Error::Descriptor(format!(
                "v has length {} but j - r = {} - {}",
                v.len(),
                owner.j,
                r
            )));
        }
        if source_flags.len() != 1 << r {
            return Err(Error::Descriptor(format!(
                "source has {} flags, expected {}",
                source_flags.len(),
                1 << r
            )));
        }
        if let SourceType::EgPc { leftmost_level, .. } = source {
            if leftmost_level > r {
                return Err(Error::Descriptor(format!(
                    "EG-PC leftmost level {leftmost_level} above source level {r}"
                )));
            }
        }
        let sequences = repetition_sequences(&v);
        Ok(Self {
            owner,
            e: owner.i << (owner.j - r),
            v,
            source,
            r,
            sequences,
            source_flags,
        })
    }

    pub fn j(&self) -> usize {
        self.owner.j
    }

    /// Number of 1s in `v`.
    pub fn rep_count(&self) -> usize {
        self.v.iter().filter(|&&b| b == 1).count()
    }

    /// Length of an EG-PC parity block, `2^(r - r')`.
    pub fn egpc_block_len(&self) -> Option<usize> {
        match self.source {
            SourceType::EgPc { leftmost_level, .. } => Some(1 << (self.r - leftmost_level)),
            _ => None,
        }
    }

    /// Frozen flags of the whole SR node, natural order.
    pub fn flags(&self) -> Vec<Bit> {
        let j = self.j();
        let mut d = Vec::with_capacity(1 << j);
        for (t, &vk) in self.v.iter().enumerate() {
            let len = 1 << (j - t - 1);
            d.extend(std::iter::repeat_n(0, len - 1));
            d.push(vk);
        }
        d.extend_from_slice(&self.source_flags);
        d
    }

    /// `SR((0,1), EG-PC, 2)` style label.
    pub fn label(&self) -> String {
        let v = if self.v.is_empty() {
            "()".to_string()
        } else {
            let parts: Vec<String> = self.v.iter().map(|b| b.to_string()).collect();
            format!("({})", parts.join(","))
        };
        format!("SR({v},{},{})", self.source.name(), self.r)
    }
}

/// Enumerates `s_l = (eta_r, 0) [+] ... [+] (eta_{j-1}, 0)`.
///
/// `eta_k` may be 1 only if `v[k+1] = 1`. Free `eta`s count in binary with
/// `eta_r` toggling fastest. The first factor is the most significant digit
/// of the position index.
pub fn repetition_sequences(v: &[Bit]) -> Vec<Vec<Bit>> {
    let depth = v.len();
    let len = 1usize << depth;
    // Digit position (from the most significant) of each free eta, in
    // counting order: eta_r is the last entry of v and the top digit.
    let free: Vec<usize> = (0..depth).filter(|&d| v[depth - 1 - d] == 1).collect();
    let count = 1usize << free.len();
    let mut out = Vec::with_capacity(count);
    for code in 0..count {
        let mut s = vec![0; len];
        for (bit, &d) in free.iter().enumerate() {
            if (code >> bit) & 1 == 1 {
                let shift = depth - 1 - d;
                for (m, sm) in s.iter_mut().enumerate() {
                    if (m >> shift) & 1 == 0 {
                        *sm ^= 1;
                    }
                }
            }
        }
        out.push(s);
    }
    out
}

/// Recognises a source pattern; Rate-C is never returned here.
fn source_type(d: &[Bit]) -> Option<SourceType> {
    let len = d.len();
    if is_zero(d) {
        return Some(SourceType::Rate0);
    }
    if d.iter().all(|&b| b == 1) {
        return Some(SourceType::Rate1);
    }
    let r = len.trailing_zeros() as usize;
    if r < 2 {
        return None;
    }
    for rp in 0..=r - 2 {
        let split = 1 << rp;
        let (head, tail) = d.split_at(split);
        if !tail.iter().all(|&b| b == 1) {
            continue;
        }
        if is_zero(head) {
            return Some(SourceType::EgPc {
                leftmost_rep: false,
                leftmost_level: rp,
            });
        }
        if is_rep(head) {
            return Some(SourceType::EgPc {
                leftmost_rep: true,
                leftmost_level: rp,
            });
        }
    }
    None
}

/// `T_SR = T1 + max(T2, T3 - 1)`.
pub fn sr_time_steps(desc: &SrDescriptor) -> u64 {
    sr_steps_raw(desc.v.len(), desc.rep_count(), &desc.source, desc.r)
}

fn sr_steps_raw(v_len: usize, reps: usize, source: &SourceType, r: usize) -> u64 {
    let t1 = i64::from(v_len > 0);
    let t2: i64 = match source {
        SourceType::Rate0 | SourceType::Rate1 => 0,
        SourceType::EgPc { leftmost_rep, .. } => {
            if *leftmost_rep {
                2
            } else {
                1
            }
        }
        SourceType::RateC => (1i64 << (r + 1)) - 2,
    };
    let t3: i64 = if reps > 0 { 2 } else { 0 };
    (t1 + t2.max(t3 - 1)) as u64
}

struct Candidate {
    r: usize,
    source: SourceType,
    v: Vec<Bit>,
    steps: u64,
}

/// All SR parameterisations of the node with flags `d`, from `r = j` down.
fn candidates(d: &[Bit]) -> Vec<Candidate> {
    let j = d.len().trailing_zeros() as usize;
    let mut out = Vec::new();
    let mut v = Vec::new();
    let mut r = j;
    loop {
        let src = &d[d.len() - (1 << r)..];
        let source = match source_type(src) {
            Some(t) => Some(t),
            None if !v.is_empty() => Some(SourceType::RateC),
            None => None,
        };
        if let Some(source) = source {
            let reps = v.iter().filter(|&&b| b == 1).count();
            out.push(Candidate {
                r,
                source,
                v: v.clone(),
                steps: sr_steps_raw(v.len(), reps, &source, r),
            });
        }
        if r == 0 {
            break;
        }
        let left = &src[..1 << (r - 1)];
        if is_zero(left) {
            v.push(0);
        } else if is_rep(left) {
            v.push(1);
        } else {
            break;
        }
        r -= 1;
    }
    out
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    let ka = (
        a.steps,
        a.v.iter().filter(|&&x| x == 1).count(),
        a.source.rank(),
    );
    let kb = (
        b.steps,
        b.v.iter().filter(|&&x| x == 1).count(),
        b.source.rank(),
    );
    ka < kb || (ka == kb && a.r > b.r)
}

fn best<'a>(it: impl Iterator<Item = &'a Candidate>) -> Option<&'a Candidate> {
    it.fold(None, |acc: Option<&Candidate>, c| match acc {
        Some(a) if !better(c, a) => Some(a),
        _ => Some(c),
    })
}

/// Covers the leaves with SR nodes.
///
/// From the root down, a node whose SR decomposition has a Rate-0, Rate-1
/// or EG-PC source is emitted whole, using the cheapest such
/// parameterisation. Otherwise a Rate-C source is used only when it beats
/// descending into both children; failing that the node is a general node
/// and both children are covered recursively.
pub fn identify_sr_cover(spec: &CodeSpec) -> Vec<SrDescriptor> {
    cover_pattern(spec.flags(), NodeId::root(spec.n()))
}

/// Cover of a single node pattern, as if it were a whole code.
pub fn describe_pattern(d: &[Bit]) -> Vec<SrDescriptor> {
    cover_pattern(d, NodeId::root(d.len().trailing_zeros() as usize))
}

fn cover_pattern(d: &[Bit], root: NodeId) -> Vec<SrDescriptor> {
    let j = root.j;
    // Bottom-up: the choice and time steps of every node, heap-indexed.
    let mut choice: Vec<Option<Candidate>> = (0..2 << j).map(|_| None).collect();
    let mut cost = vec![0u64; 2 << j];
    for h in (1..2usize << j).rev() {
        let depth = (usize::BITS - 1 - h.leading_zeros()) as usize;
        let level = j - depth;
        let first = (h - (1 << depth)) << level;
        let cands = candidates(&d[first..first + (1 << level)]);
        let split = if level > 0 {
            2 + cost[2 * h] + cost[2 * h + 1]
        } else {
            u64::MAX
        };
        let recognised = best(cands.iter().filter(|c| c.source != SourceType::RateC));
        let pick = match recognised {
            Some(c) => Some(c),
            None => best(cands.iter()).filter(|c| c.steps < split),
        };
        match pick {
            Some(c) => {
                cost[h] = c.steps;
                choice[h] = Some(Candidate {
                    r: c.r,
                    source: c.source,
                    v: c.v.clone(),
                    steps: c.steps,
                });
            }
            None => cost[h] = split,
        }
    }
    let mut out = Vec::new();
    emit(d, root, 1, j, &choice, &mut out);
    out
}

fn emit(
    d: &[Bit],
    owner: NodeId,
    h: usize,
    level: usize,
    choice: &[Option<Candidate>],
    out: &mut Vec<SrDescriptor>,
) {
    let depth = (usize::BITS - 1 - h.leading_zeros()) as usize;
    let first = (h - (1 << depth)) << level;
    match &choice[h] {
        Some(c) => {
            let end = first + (1 << level);
            let src = d[end - (1 << c.r)..end].to_vec();
            let desc = SrDescriptor::new(owner, c.v.clone(), c.source, c.r, src)
                .expect("candidate dimensions are consistent");
            out.push(desc);
        }
        None => {
            emit(d, owner.left(), 2 * h, level - 1, choice, out);
            emit(d, owner.right(), 2 * h + 1, level - 1, choice, out);
        }
    }
}

/// Checks that a cover partitions `0..len` and is ordered left to right.
pub fn validate_cover(cover: &[SrDescriptor], spec: &CodeSpec) -> Result<()> {
    let mut next = 0;
    for desc in cover {
        if desc.owner.j > spec.n() || desc.owner.first_leaf() != next {
            return Err(Error::Descriptor(format!(
                "{} does not start at leaf {next}",
                desc.owner
            )));
        }
        if desc.flags() != spec.flags()[desc.owner.leaves()] {
            return Err(Error::Descriptor(format!(
                "{} does not match the frozen flags",
                desc.label()
            )));
        }
        next += desc.owner.width();
    }
    if next != spec.len() {
        return Err(Error::Descriptor(format!(
            "cover ends at leaf {next}, expected {}",
            spec.len()
        )));
    }
    Ok(())
}

/// Which decoder the schedule describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    Sc,
    Srfsc,
}

/// Clock-cycle model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatencyModel {
    /// Number of processing elements.
    pub p: u64,
    /// Extra cycles charged per SR node.
    pub pipeline_per_sr: u64,
}

impl Default for LatencyModel {
    fn default() -> Self {
        Self {
            p: 64,
            pipeline_per_sr: 0,
        }
    }
}

impl LatencyModel {
    pub fn new(p: u64) -> Result<Self> {
        if p == 0 || !p.is_power_of_two() {
            return Err(Error::domain("P", p as f64, "a power of two >= 1"));
        }
        Ok(Self {
            p,
            pipeline_per_sr: 0,
        })
    }

    /// Cycles for one batch of `width` parallel operations.
    pub fn batch(&self, width: usize) -> u64 {
        (width.max(1) as u64).div_ceil(self.p)
    }

    /// Cycles of a general node at level `j`: an f batch and a g batch.
    pub fn general_cycles(&self, j: usize) -> u64 {
        2 * self.batch(1 << (j - 1))
    }

    pub fn sr_cycles(&self, desc: &SrDescriptor) -> u64 {
        let width = if desc.j() == 0 {
            1
        } else {
            1 << (desc.j() - 1)
        };
        sr_time_steps(desc) * self.batch(width) + self.pipeline_per_sr
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    General,
    Sr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakdownEntry {
    pub node: NodeId,
    pub kind: StepKind,
    pub steps: u64,
    pub cycles: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatencyReport {
    pub time_steps: u64,
    pub cycles: u64,
    pub breakdown: Vec<BreakdownEntry>,
}

impl LatencyReport {
    fn from_breakdown(breakdown: Vec<BreakdownEntry>) -> Self {
        Self {
            time_steps: breakdown.iter().map(|e| e.steps).sum(),
            cycles: breakdown.iter().map(|e| e.cycles).sum(),
            breakdown,
        }
    }
}

/// Static latency of a full traversal in time steps and clock cycles.
///
/// SC charges two steps for every internal node. SRFSC charges two steps
/// for every general node and `T_SR` for every SR node of `cover`.
pub fn schedule_time_steps(
    spec: &CodeSpec,
    cover: &[SrDescriptor],
    mode: ScheduleMode,
    model: &LatencyModel,
) -> LatencyReport {
    let n = spec.n();
    let mut entries = Vec::new();
    match mode {
        ScheduleMode::Sc => {
            for h in 1..spec.len() {
                let node = NodeId::from_heap(h, n);
                entries.push(BreakdownEntry {
                    node,
                    kind: StepKind::General,
                    steps: 2,
                    cycles: model.general_cycles(node.j),
                });
            }
        }
        ScheduleMode::Srfsc => {
            let owners: BTreeMap<usize, &SrDescriptor> =
                cover.iter().map(|d| (d.owner.heap_index(n), d)).collect();
            let mut stack = vec![1usize];
            while let Some(h) = stack.pop() {
                let node = NodeId::from_heap(h, n);
                if let Some(desc) = owners.get(&h) {
                    entries.push(BreakdownEntry {
                        node,
                        kind: StepKind::Sr,
                        steps: sr_time_steps(desc),
                        cycles: model.sr_cycles(desc),
                    });
                } else if node.j > 0 {
                    entries.push(BreakdownEntry {
                        node,
                        kind: StepKind::General,
                        steps: 2,
                        cycles: model.general_cycles(node.j),
                    });
                    stack.push(2 * h + 1);
                    stack.push(2 * h);
                }
            }
        }
    }
    LatencyReport::from_breakdown(entries)
}

/// Clock cycles of the SRFSC schedule under `model`.
pub fn semi_parallel_cycles(spec: &CodeSpec, cover: &[SrDescriptor], model: &LatencyModel) -> u64 {
    schedule_time_steps(spec, cover, ScheduleMode::Srfsc, model).cycles
}

/// SR-node statistics of a code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub sr_count: usize,
    pub general_count: usize,
    /// `|S|` to number of SR nodes.
    pub by_sequences: BTreeMap<usize, usize>,
    /// `|S|` to (level to number of SR nodes).
    pub levels_by_sequences: BTreeMap<usize, BTreeMap<usize, usize>>,
    /// Source type name to number of SR nodes.
    pub by_source: BTreeMap<String, usize>,
}

pub fn node_census(spec: &CodeSpec) -> Census {
    census_of(&identify_sr_cover(spec))
}

pub fn census_of(cover: &[SrDescriptor]) -> Census {
    let mut by_sequences = BTreeMap::new();
    let mut levels_by_sequences: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    let mut by_source = BTreeMap::new();
    for d in cover {
        let s = d.sequences.len();
        *by_sequences.entry(s).or_insert(0) += 1;
        *levels_by_sequences
            .entry(s)
            .or_default()
            .entry(d.j())
            .or_insert(0) += 1;
        *by_source.entry(d.source.name().to_string()).or_insert(0) += 1;
    }
    let general_count = count_general(cover);
    Census {
        sr_count: cover.len(),
        general_count,
        by_sequences,
        levels_by_sequences,
        by_source,
    }
}

/// Proper ancestors of SR owners; these are exactly the general nodes.
fn count_general(cover: &[SrDescriptor]) -> usize {
    let total: usize = cover.iter().map(|d| d.owner.width()).sum();
    let n = total.trailing_zeros() as usize;
    let mut seen = std::collections::HashSet::new();
    for d in cover {
        let mut h = d.owner.heap_index(n) / 2;
        while h >= 1 && seen.insert(h) {
            h /= 2;
        }
    }
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<Bit> {
        s.bytes()
            .filter(|b| *b == b'0' || *b == b'1')
            .map(|b| b - b'0')
            .collect()
    }

    fn single(d: &str) -> SrDescriptor {
        let cover = describe_pattern(&bits(d));
        assert_eq!(
            cover.len(),
            1,
            "{d}: {:?}",
            cover.iter().map(|c| c.label()).collect::<Vec<_>>()
        );
        cover.into_iter().next().unwrap()
    }

    #[test]
    fn heap_round_trip() {
        for n in 1..6 {
            for h in 1..(2 << n) {
                let id = NodeId::from_heap(h, n);
                assert_eq!(id.heap_index(n), h);
            }
            assert_eq!(NodeId::root(n).left().heap_index(n), 2);
            assert_eq!(NodeId::root(n).right().heap_index(n), 3);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&bits("0001")), NodeType::Rep);
        assert_eq!(classify(&bits("0111")), NodeType::Spc);
        assert_eq!(classify(&bits("0101")), NodeType::RateC);
        assert_eq!(classify(&bits("0000")), NodeType::Rate0);
        assert_eq!(classify(&bits("1111")), NodeType::Rate1);
    }

    #[test]
    fn two_free_etas_give_four_sequences() {
        let s = repetition_sequences(&[1, 1]);
        assert_eq!(
            s,
            vec![bits("0000"), bits("1100"), bits("1010"), bits("0110")]
        );
        assert_eq!(repetition_sequences(&[0, 0, 0]), vec![vec![0; 8]]);
        assert_eq!(repetition_sequences(&[1]), vec![bits("00"), bits("10")]);
        assert_eq!(repetition_sequences(&[]), vec![vec![0]]);
    }

    #[test]
    fn sequences_end_in_zero() {
        for code in 0..32u32 {
            for len in 0..5 {
                let v: Vec<Bit> = (0..len).map(|t| ((code >> t) & 1) as Bit).collect();
                let s = repetition_sequences(&v);
                let w = v.iter().filter(|&&b| b == 1).count();
                assert_eq!(s.len(), 1 << w);
                assert!(s.iter().all(|x| *x.last().unwrap() == 0));
            }
        }
    }

    #[test]
    fn basic_mappings() {
        assert_eq!(single("0001").label(), "SR((0,0),Rate-1,0)");
        assert_eq!(single("0111").label(), "SR((),EG-PC,2)");
        assert_eq!(single("00010111").label(), "SR((1),EG-PC,2)");
        assert_eq!(single("00000000").label(), "SR((),Rate-0,3)");
    }

    #[test]
    fn step_examples() {
        assert_eq!(sr_time_steps(&single("1111")), 0);
        let d = SrDescriptor::new(
            NodeId::new(4, 1),
            vec![0, 0],
            SourceType::RateC,
            2,
            bits("0101"),
        )
        .unwrap();
        assert_eq!(sr_time_steps(&d), 1 + 8 - 2);
        let egpc = SourceType::EgPc {
            leftmost_rep: true,
            leftmost_level: 1,
        };
        let d =
            SrDescriptor::new(NodeId::new(5, 1), vec![1, 1], egpc, 3, bits("00011111")).unwrap();
        assert_eq!(sr_time_steps(&d), 3);
        assert_eq!(sr_time_steps(&single("0001")), 1);
    }

    #[test]
    fn sc_schedule_is_two_n_minus_two() {
        for n in 1..=12 {
            let spec = CodeSpec::from_flags(vec![1; 1 << n], None).unwrap();
            let r = schedule_time_steps(&spec, &[], ScheduleMode::Sc, &LatencyModel::default());
            assert_eq!(r.time_steps, (2 << n) - 2);
        }
    }

    #[test]
    fn cycle_model() {
        let m = LatencyModel::new(64).unwrap();
        assert_eq!(m.batch(256), 4);
        assert_eq!(m.batch(64), 1);
        assert!(LatencyModel::new(48).is_err());
    }

    #[test]
    fn census_on_small_code() {
        let spec = CodeSpec::from_flags(bits("00010111"), None).unwrap();
        let c = node_census(&spec);
        assert_eq!((c.sr_count, c.general_count), (1, 0));
        let spec = CodeSpec::from_flags(bits("0110 1001 0110 0111"), None).unwrap();
        let cover = identify_sr_cover(&spec);
        validate_cover(&cover, &spec).unwrap();
        let c = census_of(&cover);
        assert_eq!(c.general_count, c.sr_count - 1);
    }
}
