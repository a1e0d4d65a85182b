//! Polar code construction, dynamic frozen bits, encoding and FIC segmentation.
//!
//! Indices in the public API are 0-based; the text formats (reliability
//! files, spec export) use 1-based indices as is customary for polar codes.

use std::fmt;
use std::path::Path;

use thiserror::Error;

/// 3GPP NR reliability sequence for N = 1024, least to most reliable, 1-based.
pub const NR5G_RELIABILITY: &str = include_str!("../assets/nr5g_reliability.txt");

/// Generator polynomial used for the convolutional dynamic frozen bits.
pub const G7: [u8; 7] = [1, 0, 1, 1, 0, 1, 1];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("code length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("dimension {k} out of range for length {n}")]
    DimensionOutOfRange { n: usize, k: usize },
    #[error("reliability order is not a permutation of 1..={0}")]
    BadReliabilityOrder(usize),
    #[error("index {0} is not a frozen position")]
    NotFrozen(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

/// How frozen bits take their values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynMode {
    StaticZero,
    /// Frozen bit = XOR of earlier info bits selected by the generator taps.
    Convolutional { g: Vec<u8> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynFrozenCfg {
    pub mode: DynMode,
    /// Only the first `fd` frozen bits of every FIC node are dynamic;
    /// `None` means no limit.
    pub fd: Option<usize>,
}

impl DynFrozenCfg {
    pub fn static_zero() -> Self {
        Self { mode: DynMode::StaticZero, fd: None }
    }

    pub fn convolutional(fd: Option<usize>) -> Self {
        Self { mode: DynMode::Convolutional { g: G7.to_vec() }, fd }
    }
}

impl Default for DynFrozenCfg {
    fn default() -> Self {
        Self::convolutional(Some(3))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Rate0,
    Rep,
    TypeI,
    TypeII,
    TypeIV,
    TypeIII,
    Spc,
    Rate1,
}

impl NodeKind {
    /// Classify an FIC node of length `ns` with `ks` information bits.
    ///
    /// Low-rate labels win on overlaps, except that (4,3) is treated as a
    /// single parity check: it is decoded by flipping like any other SPC.
    pub fn classify(ns: usize, ks: usize) -> NodeKind {
        if ks == 0 {
            NodeKind::Rate0
        } else if ks == ns {
            NodeKind::Rate1
        } else if ns >= 4 && ks + 1 == ns {
            NodeKind::Spc
        } else if ks == 1 {
            NodeKind::Rep
        } else if ks == 2 {
            NodeKind::TypeI
        } else if ks == 3 {
            NodeKind::TypeII
        } else if ks + 2 == ns {
            NodeKind::TypeIII
        } else if ks + 3 == ns {
            NodeKind::TypeIV
        } else {
            unreachable!("segmentation never yields ({ns},{ks})")
        }
    }

    /// Decoded by enumerating all information patterns.
    pub fn is_low_rate(self) -> bool {
        matches!(self, NodeKind::Rep | NodeKind::TypeI | NodeKind::TypeII)
    }

    /// Decoded by hard decision plus bit flipping.
    pub fn is_high_rate(self) -> bool {
        matches!(self, NodeKind::TypeIV | NodeKind::TypeIII | NodeKind::Spc | NodeKind::Rate1)
    }

    /// Number of interleaved parity classes.
    pub fn parity_classes(self) -> usize {
        match self {
            NodeKind::Spc => 1,
            NodeKind::TypeIII => 2,
            NodeKind::TypeIV => 4,
            _ => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Rate0 => "rate0",
            NodeKind::Rep => "rep",
            NodeKind::TypeI => "type1",
            NodeKind::TypeII => "type2",
            NodeKind::TypeIV => "type4",
            NodeKind::TypeIII => "type3",
            NodeKind::Spc => "spc",
            NodeKind::Rate1 => "rate1",
        }
    }
}

/// One frozen-prefix segment of the code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FicNode {
    /// Stage ψ: the node has 2^ψ leaves.
    pub stage: usize,
    /// First leaf index (0-based).
    pub start: usize,
    pub ks: usize,
    pub kind: NodeKind,
}

impl FicNode {
    pub fn new(stage: usize, start: usize, ks: usize) -> Self {
        let ns = 1 << stage;
        Self { stage, start, ks, kind: NodeKind::classify(ns, ks) }
    }

    pub fn len(&self) -> usize {
        1 << self.stage
    }

    /// One past the last leaf index.
    pub fn end(&self) -> usize {
        self.start + self.len()
    }

    pub fn n_frozen(&self) -> usize {
        self.len() - self.ks
    }

    /// 1-based position φ within its stage.
    pub fn position(&self) -> usize {
        (self.start >> self.stage) + 1
    }
}

/// Precomputed frozen-bit dependency of one input position.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Taps {
    dynamic: bool,
    sources: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarCodeSpec {
    n: usize,
    k: usize,
    frozen: Vec<bool>,
    info: Vec<usize>,
    dyn_cfg: DynFrozenCfg,
    nodes: Vec<FicNode>,
    taps: Vec<Taps>,
    /// frozen_after[i] = number of frozen indices ≥ i.
    frozen_after: Vec<usize>,
}

impl PolarCodeSpec {
    /// Build a code from an explicit frozen mask.
    pub fn from_frozen(frozen: Vec<bool>, dyn_cfg: DynFrozenCfg) -> Result<Self, CodeError> {
        let n = frozen.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(CodeError::NotPowerOfTwo(n));
        }
        let info: Vec<usize> = (0..n).filter(|&i| !frozen[i]).collect();
        let k = info.len();
        let nodes = segment_fic(&frozen);
        let mut frozen_after = vec![0; n + 1];
        for i in (0..n).rev() {
            frozen_after[i] = frozen_after[i + 1] + frozen[i] as usize;
        }
        let mut spec = Self { n, k, frozen, info, dyn_cfg, nodes, taps: Vec::new(), frozen_after };
        spec.taps = spec.compute_taps();
        Ok(spec)
    }

    fn compute_taps(&self) -> Vec<Taps> {
        let mut taps = vec![Taps::default(); self.n];
        let g = match &self.dyn_cfg.mode {
            DynMode::StaticZero => return taps,
            DynMode::Convolutional { g } => g,
        };
        let limit = self.dyn_cfg.fd.unwrap_or(usize::MAX);
        for node in &self.nodes {
            for i in node.start..node.start + node.n_frozen().min(limit) {
                let t = &mut taps[i];
                t.dynamic = true;
                // g[d] (0-based) weighs the input d positions back; g[0] would
                // be the bit itself and is never used.
                for d in 1..g.len() {
                    if d > i {
                        break;
                    }
                    let j = i - d;
                    if g[d] == 1 && !self.frozen[j] {
                        t.sources.push(j);
                    }
                }
            }
        }
        taps
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn log2n(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.frozen[i]).collect()
    }

    pub fn dyn_cfg(&self) -> &DynFrozenCfg {
        &self.dyn_cfg
    }

    pub fn fic_nodes(&self) -> &[FicNode] {
        &self.nodes
    }

    /// Number of frozen indices ≥ `i` (0-based), i.e. |F^(>i)| in 1-based terms.
    pub fn frozen_from(&self, i: usize) -> usize {
        self.frozen_after[i]
    }

    pub fn is_dynamic(&self, i: usize) -> bool {
        self.taps[i].dynamic
    }

    /// Value of frozen bit `i` given the input prefix `u[..i]`.
    pub fn dynamic_frozen_value(&self, u_prefix: &[u8], i: usize) -> Result<u8, CodeError> {
        if !self.frozen[i] {
            return Err(CodeError::NotFrozen(i));
        }
        if u_prefix.len() < i {
            return Err(CodeError::LengthMismatch { expected: i, got: u_prefix.len() });
        }
        Ok(self.frozen_value(u_prefix, i))
    }

    /// Unchecked variant used on the decoding hot path.
    #[inline]
    pub(crate) fn frozen_value(&self, u: &[u8], i: usize) -> u8 {
        self.taps[i].sources.iter().fold(0, |acc, &j| acc ^ u[j])
    }

    /// Place info bits, fill frozen bits (dynamic where configured).
    pub fn place_info(&self, info_bits: &[u8]) -> Result<Vec<u8>, CodeError> {
        if info_bits.len() != self.k {
            return Err(CodeError::LengthMismatch { expected: self.k, got: info_bits.len() });
        }
        let mut u = vec![0u8; self.n];
        let mut it = info_bits.iter();
        for i in 0..self.n {
            u[i] = if self.frozen[i] { self.frozen_value(&u, i) } else { *it.next().unwrap() & 1 };
        }
        Ok(u)
    }

    /// Encode `K` information bits into a codeword.
    pub fn encode_info(&self, info_bits: &[u8]) -> Result<Vec<u8>, CodeError> {
        let mut u = self.place_info(info_bits)?;
        encode_in_place(&mut u);
        Ok(u)
    }

    pub fn extract_info(&self, u: &[u8]) -> Vec<u8> {
        self.info.iter().map(|&i| u[i]).collect()
    }

    /// True if `c` belongs to the code (frozen constraints hold on `u = c·G`).
    pub fn is_codeword(&self, c: &[u8]) -> bool {
        if c.len() != self.n {
            return false;
        }
        let mut u = c.to_vec();
        encode_in_place(&mut u);
        (0..self.n).all(|i| !self.frozen[i] || u[i] == self.frozen_value(&u, i))
    }

    /// Key/value text export.
    pub fn to_text(&self) -> String {
        let frozen: Vec<String> = self.frozen_set().iter().map(|i| (i + 1).to_string()).collect();
        let (mode, g) = match &self.dyn_cfg.mode {
            DynMode::StaticZero => ("static", String::new()),
            DynMode::Convolutional { g } => {
                ("convolutional", g.iter().map(|b| char::from(b'0' + b)).collect())
            }
        };
        let fd = self.dyn_cfg.fd.map_or("inf".to_string(), |v| v.to_string());
        format!(
            "n = {}\nk = {}\nfrozen = {}\ndyn_mode = {}\ng = {}\nfd = {}\n",
            self.n,
            self.k,
            frozen.join(","),
            mode,
            g,
            fd
        )
    }

    pub fn from_text(text: &str) -> Result<Self, CodeError> {
        let mut n = None;
        let mut k = None;
        let mut frozen_idx: Vec<usize> = Vec::new();
        let mut mode = "static".to_string();
        let mut g = String::new();
        let mut fd: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: &str| CodeError::Parse { line: lineno + 1, msg: msg.to_string() };
            let (key, val) = line.split_once('=').ok_or_else(|| perr("expected key = value"))?;
            let val = val.trim();
            match key.trim() {
                "n" => n = Some(val.parse().map_err(|_| perr("bad n"))?),
                "k" => k = Some(val.parse::<usize>().map_err(|_| perr("bad k"))?),
                "frozen" => {
                    frozen_idx = val
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| s.trim().parse::<usize>().map_err(|_| perr("bad frozen index")))
                        .collect::<Result<_, _>>()?;
                }
                "dyn_mode" => mode = val.to_string(),
                "g" => g = val.to_string(),
                "fd" => {
                    fd = if val == "inf" { None } else { Some(val.parse().map_err(|_| perr("bad fd"))?) }
                }
                _ => return Err(perr("unknown key")),
            }
        }
        let n: usize = n.ok_or(CodeError::Parse { line: 0, msg: "missing n".into() })?;
        if n == 0 || !n.is_power_of_two() {
            return Err(CodeError::NotPowerOfTwo(n));
        }
        let mut frozen = vec![false; n];
        for &i in &frozen_idx {
            if i == 0 || i > n {
                return Err(CodeError::Parse { line: 0, msg: format!("frozen index {i} out of range") });
            }
            frozen[i - 1] = true;
        }
        let dyn_mode = match mode.as_str() {
            "static" => DynMode::StaticZero,
            "convolutional" => DynMode::Convolutional {
                g: g.chars().map(|c| if c == '1' { 1 } else { 0 }).collect(),
            },
            other => return Err(CodeError::Parse { line: 0, msg: format!("unknown dyn_mode {other}") }),
        };
        let spec = Self::from_frozen(frozen, DynFrozenCfg { mode: dyn_mode, fd })?;
        if let Some(k) = k {
            if k != spec.k {
                return Err(CodeError::Parse { line: 0, msg: format!("k = {k} but {} info bits", spec.k) });
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for PolarCodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}) polar code, {} FIC nodes", self.n, self.k, self.nodes.len())
    }
}

/// Build a code from a 1-based reliability order (least to most reliable).
pub fn build_code(
    n: usize,
    k: usize,
    reliability_order: &[usize],
    dyn_cfg: DynFrozenCfg,
) -> Result<PolarCodeSpec, CodeError> {
    if n == 0 || !n.is_power_of_two() {
        return Err(CodeError::NotPowerOfTwo(n));
    }
    if k > n {
        return Err(CodeError::DimensionOutOfRange { n, k });
    }
    let mut seen = vec![false; n];
    if reliability_order.len() != n {
        return Err(CodeError::BadReliabilityOrder(n));
    }
    for &i in reliability_order {
        if i == 0 || i > n || seen[i - 1] {
            return Err(CodeError::BadReliabilityOrder(n));
        }
        seen[i - 1] = true;
    }
    let mut frozen = vec![true; n];
    for &i in &reliability_order[n - k..] {
        frozen[i - 1] = false;
    }
    PolarCodeSpec::from_frozen(frozen, dyn_cfg)
}

/// Build a code of length `n ≤ 1024` from the bundled NR sequence.
pub fn build_nr5g(n: usize, k: usize, dyn_cfg: DynFrozenCfg) -> Result<PolarCodeSpec, CodeError> {
    if n == 0 || !n.is_power_of_two() {
        return Err(CodeError::NotPowerOfTwo(n));
    }
    build_code(n, k, &nr5g_order(n)?, dyn_cfg)
}

/// The NR reliability order restricted to indices `1..=n`.
pub fn nr5g_order(n: usize) -> Result<Vec<usize>, CodeError> {
    if n > 1024 {
        return Err(CodeError::DimensionOutOfRange { n, k: 0 });
    }
    let full = parse_reliability(NR5G_RELIABILITY)?;
    Ok(full.into_iter().filter(|&i| i <= n).collect())
}

/// Parse a reliability file: one 1-based index per line.
pub fn parse_reliability(text: &str) -> Result<Vec<usize>, CodeError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| CodeError::Parse { line: i + 1, msg: "expected an index".into() })
        })
        .collect()
}

pub fn read_reliability(path: &Path) -> Result<Vec<usize>, CodeError> {
    let text = std::fs::read_to_string(path).map_err(|e| CodeError::Io(e.to_string()))?;
    parse_reliability(&text)
}

/// `u · G_M` over GF(2), in place.
pub fn encode_in_place(u: &mut [u8]) {
    let m = u.len();
    let mut half = 1;
    while half < m {
        for block in (0..m).step_by(2 * half) {
            for j in block..block + half {
                u[j] ^= u[j + half];
            }
        }
        half *= 2;
    }
}

pub fn encode(u: &[u8]) -> Result<Vec<u8>, CodeError> {
    if u.is_empty() || !u.len().is_power_of_two() {
        return Err(CodeError::NotPowerOfTwo(u.len()));
    }
    let mut c = u.to_vec();
    encode_in_place(&mut c);
    Ok(c)
}

/// Cover `0..N` by maximal frozen-prefix nodes with min(K_s, N_s − K_s) ≤ 3.
pub fn segment_fic(frozen: &[bool]) -> Vec<FicNode> {
    let mut out = Vec::new();
    let n = frozen.len();
    segment_span(frozen, 0, n.trailing_zeros() as usize, &mut out);
    out
}

fn segment_span(frozen: &[bool], start: usize, stage: usize, out: &mut Vec<FicNode>) {
    let len = 1usize << stage;
    let span = &frozen[start..start + len];
    let nf = span.iter().filter(|&&f| f).count();
    let ks = len - nf;
    let prefix = span[..nf].iter().all(|&f| f);
    if stage == 0 || (prefix && ks.min(nf) <= 3) {
        out.push(FicNode::new(stage, start, ks));
    } else {
        segment_span(frozen, start, stage - 1, out);
        segment_span(frozen, start + len / 2, stage - 1, out);
    }
}

/// Histogram of (N_s, K_s) pairs.
pub fn node_composition(nodes: &[FicNode]) -> std::collections::BTreeMap<(usize, usize), usize> {
    let mut map = std::collections::BTreeMap::new();
    for nd in nodes {
        *map.entry((nd.len(), nd.ks)).or_insert(0) += 1;
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_small_examples() {
        assert_eq!(encode(&[0, 1]).unwrap(), vec![1, 1]);
        assert_eq!(encode(&[0, 0, 0, 1]).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(encode(&[1, 0, 0, 0]).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(encode(&[0; 8]).unwrap(), vec![0; 8]);
        assert!(encode(&[0, 1, 0]).is_err());
    }

    #[test]
    fn encode_matches_generator_rows() {
        // Row i of G_M has a one at column j iff j ⊆ i bitwise.
        for m in [2usize, 4, 8, 16] {
            for i in 0..m {
                let mut u = vec![0u8; m];
                u[i] = 1;
                let c = encode(&u).unwrap();
                for j in 0..m {
                    assert_eq!(c[j], ((j & i) == j) as u8, "m={m} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn encode_is_involution_exhaustive() {
        for m in [2usize, 4, 8] {
            for w in 0..(1u32 << m) {
                let u: Vec<u8> = (0..m).map(|b| ((w >> b) & 1) as u8).collect();
                assert_eq!(encode(&encode(&u).unwrap()).unwrap(), u);
            }
        }
    }

    #[test]
    fn trivial_segmentations() {
        let s = PolarCodeSpec::from_frozen(vec![false; 4], DynFrozenCfg::static_zero()).unwrap();
        assert_eq!(s.fic_nodes(), &[FicNode::new(2, 0, 4)]);
        assert_eq!(s.fic_nodes()[0].kind, NodeKind::Rate1);

        let nodes = segment_fic(&[true, false]);
        assert_eq!(nodes.len(), 1);
        assert_eq!((nodes[0].len(), nodes[0].ks, nodes[0].kind), (2, 1, NodeKind::Rep));

        let nodes = segment_fic(&[true; 8]);
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].kind, NodeKind::Rate0);

        let f = [true, true, true, true, true, false, false, false];
        let nodes = segment_fic(&f);
        assert_eq!(nodes.len(), 1);
        assert_eq!((nodes[0].ks, nodes[0].kind), (3, NodeKind::TypeII));
    }

    #[test]
    fn info_then_frozen_pair_splits_to_leaves() {
        let nodes = segment_fic(&[false, true]);
        assert_eq!(nodes.len(), 2);
        assert_eq!(nodes[0].kind, NodeKind::Rate1);
        assert_eq!(nodes[1].kind, NodeKind::Rate0);
    }

    #[test]
    fn node_kind_labels() {
        assert_eq!(NodeKind::classify(4, 2), NodeKind::TypeI);
        assert_eq!(NodeKind::classify(4, 3), NodeKind::Spc);
        assert_eq!(NodeKind::classify(4, 1), NodeKind::Rep);
        assert_eq!(NodeKind::classify(8, 5), NodeKind::TypeIV);
        assert_eq!(NodeKind::classify(8, 6), NodeKind::TypeIII);
        assert_eq!(NodeKind::classify(8, 3), NodeKind::TypeII);
        assert_eq!(NodeKind::classify(2, 1), NodeKind::Rep);
        assert_eq!(NodeKind::classify(2, 2), NodeKind::Rate1);
        assert_eq!(NodeKind::classify(1, 1), NodeKind::Rate1);
    }

    #[test]
    fn build_code_errors() {
        assert_eq!(build_code(6, 3, &[1, 2, 3, 4, 5, 6], DynFrozenCfg::static_zero()), Err(CodeError::NotPowerOfTwo(6)));
        assert!(matches!(build_code(4, 5, &[1, 2, 3, 4], DynFrozenCfg::static_zero()), Err(CodeError::DimensionOutOfRange { .. })));
        assert_eq!(build_code(4, 2, &[1, 2, 2, 4], DynFrozenCfg::static_zero()), Err(CodeError::BadReliabilityOrder(4)));
        let s = build_code(4, 2, &[1, 2, 3, 4], DynFrozenCfg::static_zero()).unwrap();
        assert_eq!(s.info_set(), &[2, 3]);
    }

    #[test]
    fn nr_sequence_is_a_permutation() {
        let seq = parse_reliability(NR5G_RELIABILITY).unwrap();
        let mut sorted = seq.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..=1024).collect::<Vec<_>>());
        // The first bit is the least reliable, the last the most reliable.
        assert_eq!(seq[0], 1);
        assert_eq!(*seq.last().unwrap(), 1024);
    }

    fn window_scan(spec: &PolarCodeSpec, g: &[u8], u: &[u8], i: usize) -> u8 {
        // Literal 1-based reading: j ∈ [i−m+1, i−1] ∩ I with g[i−j+1] = 1.
        let (i1, m) = (i as i64 + 1, g.len() as i64);
        let mut acc = 0;
        for j1 in (i1 - m + 1)..i1 {
            if j1 < 1 {
                continue;
            }
            let j = (j1 - 1) as usize;
            if !spec.is_frozen(j) && g[(i1 - j1) as usize] == 1 {
                acc ^= u[j];
            }
        }
        acc
    }

    #[test]
    fn dynamic_value_matches_window_scan() {
        let spec = build_nr5g(128, 64, DynFrozenCfg::convolutional(None)).unwrap();
        let mut state = 0x1234_5678u64;
        for _ in 0..50 {
            let u: Vec<u8> = (0..128)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 63) as u8
                })
                .collect();
            for i in spec.frozen_set() {
                assert_eq!(spec.dynamic_frozen_value(&u, i).unwrap(), window_scan(&spec, &G7, &u, i));
            }
        }
    }

    #[test]
    fn dynamic_value_hand_examples() {
        // Frozen bit at 0-based index 10, all earlier positions information.
        let mut frozen = vec![false; 16];
        frozen[10] = true;
        let spec = PolarCodeSpec::from_frozen(frozen, DynFrozenCfg::convolutional(None)).unwrap();
        let zeros = vec![0u8; 16];
        assert_eq!(spec.dynamic_frozen_value(&zeros, 10).unwrap(), 0);
        // Window offsets i−j+1 = 3 and 4 both carry taps: two ones cancel.
        let mut u = vec![0u8; 16];
        u[10 + 1 - 3] = 1;
        u[10 + 1 - 4] = 1;
        assert_eq!(spec.dynamic_frozen_value(&u, 10).unwrap(), 0);
        u[10 + 1 - 4] = 0;
        assert_eq!(spec.dynamic_frozen_value(&u, 10).unwrap(), 1);
        // Offset 2 has no tap.
        let mut u = vec![0u8; 16];
        u[9] = 1;
        assert_eq!(spec.dynamic_frozen_value(&u, 10).unwrap(), 0);
        assert_eq!(spec.dynamic_frozen_value(&u, 3), Err(CodeError::NotFrozen(3)));
    }

    #[test]
    fn empty_window_gives_zero() {
        // The first frozen bits have no earlier information bits.
        let spec = build_nr5g(64, 32, DynFrozenCfg::convolutional(None)).unwrap();
        let ones = vec![1u8; 64];
        assert_eq!(spec.dynamic_frozen_value(&ones, 0).unwrap(), 0);
    }

    #[test]
    fn fd_limits_dynamic_positions() {
        let spec = build_nr5g(512, 256, DynFrozenCfg::convolutional(Some(3))).unwrap();
        for nd in spec.fic_nodes() {
            let dynamic = (nd.start..nd.end()).filter(|&i| spec.is_dynamic(i)).count();
            assert_eq!(dynamic, nd.n_frozen().min(3));
        }
        let spec0 = build_nr5g(512, 256, DynFrozenCfg::convolutional(Some(0))).unwrap();
        assert!((0..512).all(|i| !spec0.is_dynamic(i)));
    }

    #[test]
    fn encoded_words_are_codewords() {
        let spec = build_nr5g(64, 30, DynFrozenCfg::convolutional(None)).unwrap();
        let info: Vec<u8> = (0..30).map(|i| (i % 3 == 0) as u8).collect();
        let c = spec.encode_info(&info).unwrap();
        assert!(spec.is_codeword(&c));
        let mut u = c.clone();
        encode_in_place(&mut u);
        assert_eq!(spec.extract_info(&u), info);
        let mut bad = c.clone();
        bad[5] ^= 1;
        assert!(!spec.is_codeword(&bad));
    }

    #[test]
    fn text_round_trip() {
        let spec = build_nr5g(32, 12, DynFrozenCfg::convolutional(Some(3))).unwrap();
        let back = PolarCodeSpec::from_text(&spec.to_text()).unwrap();
        assert_eq!(back, spec);
        let st = build_nr5g(16, 11, DynFrozenCfg::static_zero()).unwrap();
        assert_eq!(PolarCodeSpec::from_text(&st.to_text()).unwrap(), st);
    }
}
