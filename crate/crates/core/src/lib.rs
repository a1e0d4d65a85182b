//! Polar-code list decoding with soft output.
//!
//! The crate decodes polar codes (with optional dynamic frozen bits) by
//! successive cancellation list decoding, either bit by bit or node by node
//! over frozen-information cascade segments, and can attach a posteriori bit
//! LLRs and a block reliability estimate to the list. Around the decoders
//! sit a BPSK channel model, a Monte Carlo harness, a product-code
//! application, and latency and operation-count analysis.
//!
//! ```
//! use polar_sofscl::code_model::{build_nr5g, DynFrozenCfg};
//! use polar_sofscl::soft_output::{so_fscl_decode, ArithMode};
//!
//! let spec = build_nr5g(64, 32, DynFrozenCfg::default()).unwrap();
//! let info = vec![1u8; 32];
//! let c = spec.encode_info(&info).unwrap();
//! let llrs: Vec<f64> = c.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
//! let out = so_fscl_decode(&llrs, &spec, 4, ArithMode::Exact).unwrap();
//! assert_eq!(out.best().codeword, c);
//! ```

pub mod analysis;
pub mod channel;
pub mod code_model;
pub mod fscl;
pub mod harness;
pub mod scl_core;
pub mod soft_output;

pub use analysis::{DecoderKind, OpCounts};
pub use code_model::{build_nr5g, DynFrozenCfg, PolarCodeSpec};
pub use fscl::{fscl_decode, FastDecoder};
pub use scl_core::{scl_decode, DecodeError};
pub use soft_output::{so_fscl_decode, so_scl_decode, ArithMode, SoftDecodeResult};
