//! Operation counters and the instrumented decoding entry point.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::code_model::PolarCodeSpec;
use crate::scl_core::DecodeError;
use crate::soft_output::ArithMode;

/// Arithmetic primitive counts accumulated by one or more decodes.
///
/// Sorts are recorded only by input size; the comparisons they need are
/// not added to `compare`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub add_sub: u64,
    pub mul_div: u64,
    pub bit_ops: u64,
    pub hd_sign: u64,
    pub compare: u64,
    pub softplus: u64,
    pub lnexm1: u64,
    pub pm_sorts: BTreeMap<usize, u64>,
    pub llr_sorts: BTreeMap<usize, u64>,
}

impl OpCounts {
    pub fn merge(&mut self, other: &OpCounts) {
        self.add_sub += other.add_sub;
        self.mul_div += other.mul_div;
        self.bit_ops += other.bit_ops;
        self.hd_sign += other.hd_sign;
        self.compare += other.compare;
        self.softplus += other.softplus;
        self.lnexm1 += other.lnexm1;
        for (k, v) in &other.pm_sorts {
            *self.pm_sorts.entry(*k).or_insert(0) += v;
        }
        for (k, v) in &other.llr_sorts {
            *self.llr_sorts.entry(*k).or_insert(0) += v;
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == OpCounts::default()
    }

    /// Counts divided by `blocks`, as floating averages.
    pub fn per_block(&self, blocks: u64) -> Vec<(&'static str, f64)> {
        let b = blocks.max(1) as f64;
        vec![
            ("add_sub", self.add_sub as f64 / b),
            ("mul_div", self.mul_div as f64 / b),
            ("bit_ops", self.bit_ops as f64 / b),
            ("hd_sign", self.hd_sign as f64 / b),
            ("compare", self.compare as f64 / b),
            ("softplus", self.softplus as f64 / b),
            ("lnexm1", self.lnexm1 as f64 / b),
        ]
    }
}

/// Decoder selection for profiling and simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    SoFscl,
    SoScl,
    Fscl,
    Scl,
    Pyndiah,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::SoFscl => "so_fscl",
            DecoderKind::SoScl => "so_scl",
            DecoderKind::Fscl => "fscl",
            DecoderKind::Scl => "scl",
            DecoderKind::Pyndiah => "pyndiah",
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "so_fscl" => Ok(DecoderKind::SoFscl),
            "so_scl" => Ok(DecoderKind::SoScl),
            "fscl" => Ok(DecoderKind::Fscl),
            "scl" => Ok(DecoderKind::Scl),
            "pyndiah" => Ok(DecoderKind::Pyndiah),
            _ => Err(format!("unknown decoder `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpCountReport {
    pub decoder: DecoderKind,
    pub mode: ArithMode,
    pub blocks: u64,
    pub counts: OpCounts,
}

impl OpCountReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "decoder = {}", self.decoder.name());
        let _ = writeln!(s, "mode = {}", if self.mode == ArithMode::Exact { "exact" } else { "hwf" });
        let _ = writeln!(s, "blocks = {}", self.blocks);
        for (name, v) in self.counts.per_block(self.blocks) {
            let _ = writeln!(s, "{name} = {v:.1}");
        }
        for (k, v) in &self.counts.pm_sorts {
            let _ = writeln!(s, "pm_sort_{k} = {:.2}", *v as f64 / self.blocks.max(1) as f64);
        }
        for (k, v) in &self.counts.llr_sorts {
            let _ = writeln!(s, "llr_sort_{k} = {:.2}", *v as f64 / self.blocks.max(1) as f64);
        }
        s
    }
}

/// Run one decode with counting and return the counters.
pub fn op_count_run(
    llrs: &[f64],
    spec: &PolarCodeSpec,
    list_size: usize,
    decoder: DecoderKind,
    mode: ArithMode,
) -> Result<OpCountReport, DecodeError> {
    let counts = match decoder {
        DecoderKind::SoFscl => crate::soft_output::so_fscl_decode(llrs, spec, list_size, mode)?.ops,
        DecoderKind::Fscl => {
            crate::fscl::FastDecoder::new(spec, list_size, mode, false)?.decode(llrs)?.ops
        }
        DecoderKind::SoScl => crate::soft_output::so_scl_decode(llrs, spec, list_size, mode)?.ops,
        DecoderKind::Scl => crate::scl_core::scl_decode(llrs, spec, list_size, mode, false)?.ops,
        DecoderKind::Pyndiah => {
            let mut run = crate::fscl::FastDecoder::new(spec, list_size, mode, false)?.decode(llrs)?;
            let list: Vec<(&[u8], f64)> =
                run.paths.iter().map(|p| (p.codeword.as_slice(), p.pm)).collect();
            crate::harness::pyndiah_counted(&list, llrs, None, &mut run.ops);
            run.ops
        }
    };
    Ok(OpCountReport { decoder, mode, blocks: 1, counts })
}
