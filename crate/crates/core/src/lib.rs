//! Polar codes with sequence-repetition (SR) node fast successive-cancellation
//! decoding.
//!
//! The crate is organised bottom-up:
//!
//! * [`code`] builds codes (Gaussian-approximation construction or an imported
//!   frozen set), encodes, and handles CRCs and BPSK channel LLRs.
//! * [`gaussian`] holds the Gaussian-approximation numerics: `phi`, `Q`, the
//!   per-node LLR mean recursion and the hard-decision thresholds.
//! * [`tree`] analyses the decoding tree: node classification, the SR-node
//!   cover, repetition sequences, and the time-step / clock-cycle models.
//! * [`sc`] is the reference successive-cancellation decoder.
//! * [`srfsc`] decodes SR nodes in one shot and walks the tree with them.
//! * [`ta`] adds threshold-based hard decisions on general nodes and the
//!   CRC-gated two-attempt decoder.
//! * [`sim`] is the AWGN/BPSK Monte Carlo harness and report writer.
//!
//! Bit ordering: the encoder computes `x = u * F^{(x)n}` in natural order
//! without the bit-reversal permutation. Every decoder uses the same order,
//! so the permutation would only relabel channel positions; error rates and
//! latency figures are unaffected.

pub mod code;
pub mod error;
pub mod gaussian;
pub mod sc;
pub mod sim;
pub mod srfsc;
pub mod ta;
pub mod tree;

pub use code::{CodeSpec, CrcSpec, Frame, FrozenSetFile};
pub use error::{Error, Result};
pub use gaussian::{GaussianTable, TaConfig};
pub use sc::ArithMode;
pub use srfsc::Decoder;
pub use tree::{LatencyModel, LatencyReport, NodeId, NodeType, SourceType, SrDescriptor};

/// A hard bit, always 0 or 1.
pub type Bit = u8;
