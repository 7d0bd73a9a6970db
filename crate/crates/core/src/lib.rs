//! Interactive synchronization of a binary file against a copy that went
//! through an i.i.d. deletion channel.
//!
//! A session runs three modules: pivot matching cuts Bob's copy into
//! sections, divide-and-conquer recovery repairs each section with
//! delimiters and deletion codes, and a capacity-charged correction step
//! removes the leftover substitutions.

pub mod analysis;
pub mod channel;
pub mod codes;
pub mod error;
pub mod harness;
pub mod matching;
pub mod params;
pub mod protocol;
pub mod recovery;
pub mod rng;
pub mod seq;
pub mod transcript;

pub use channel::{apply_deletion_channel, ChannelOutcome};
pub use codes::{CodeSpec, DecodeError, Syndrome};
pub use error::{Error, Result};
pub use params::{EcPolicy, ProtocolParams};
pub use protocol::{synchronize, synchronize_with_truth, Metrics, SyncOutput};
pub use seq::BitSeq;
pub use transcript::{Direction, Kind, Message, Module, Transcript};
