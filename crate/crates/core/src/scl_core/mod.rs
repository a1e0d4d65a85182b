//! LLR/bit recursions on the decoding tree, path state, and bit-by-bit SCL
//! with optional tracking of the unvisited-path mass λ_T.

mod kernel;

use std::f64::consts::LN_2;

use thiserror::Error;

pub use kernel::{f_func, g_func, pm_update_bit, pm_update_codeword, Kernel};

use crate::analysis::OpCounts;
use crate::code_model::PolarCodeSpec;
use crate::soft_output::logdomain::{LogDomainError, NEG_INF};
use crate::soft_output::ArithMode;

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("list size must be at least 1")]
    ListSize,
    #[error("expected {expected} channel LLRs, got {got}")]
    LlrLength { expected: usize, got: usize },
    #[error("numerical integrity: {0}")]
    Numeric(#[from] LogDomainError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// (left ⊕ right, right).
pub fn combine_beta(left: &[u8], right: &[u8]) -> Result<Vec<u8>, DecodeError> {
    if left.len() != right.len() {
        return Err(DecodeError::Dimension(format!("{} vs {}", left.len(), right.len())));
    }
    let mut out: Vec<u8> = left.iter().zip(right).map(|(a, b)| a ^ b).collect();
    out.extend_from_slice(right);
    Ok(out)
}

/// One decoding path: decided inputs, internal LLR/bit memories and metric.
///
/// Stage `s < n` of the LLR and bit memories lives at `[2^s, 2^{s+1})`;
/// stage `n` is the channel and is not copied into the path.
#[derive(Clone, Debug)]
pub struct DecPath {
    pub u: Vec<u8>,
    pub pm: f64,
    /// Full codeword, filled once the last leaf has been decided.
    pub codeword: Vec<u8>,
    alpha: Vec<f64>,
    left: Vec<u8>,
}

impl DecPath {
    pub fn new(n: usize) -> Self {
        Self { u: vec![0; n], pm: 0.0, codeword: Vec::new(), alpha: vec![0.0; n], left: vec![0; n] }
    }

    /// LLRs entering the node at (`stage`, `start`), once `descend` has run.
    pub fn node_llrs<'a>(&'a self, ch: &'a [f64], stage: usize, n_stages: usize) -> &'a [f64] {
        if stage == n_stages {
            ch
        } else {
            let m = 1 << stage;
            &self.alpha[m..2 * m]
        }
    }

    /// Compute internal LLRs down to the node at (`stage`, `start`), starting
    /// from the junction with the previously decoded node.
    pub fn descend(&mut self, ch: &[f64], n_stages: usize, start: usize, stage: usize, k: &mut Kernel) {
        let top = if start == 0 { n_stages } else { (start.trailing_zeros() as usize + 1).min(n_stages) };
        for s in (stage..top).rev() {
            let m = 1usize << s;
            let right = (start >> s) & 1 == 1;
            let (lo, hi) = self.alpha.split_at_mut(2 * m);
            let parent: &[f64] = if s + 1 == n_stages { ch } else { &hi[..2 * m] };
            let child = &mut lo[m..2 * m];
            if right {
                let bits = &self.left[m..2 * m];
                for j in 0..m {
                    child[j] = k.g(parent[j], parent[j + m], bits[j]);
                }
            } else {
                for j in 0..m {
                    child[j] = k.f(parent[j], parent[j + m]);
                }
            }
        }
    }

    /// Record the node codeword `cw` at (`stage`, `start`) and propagate partial
    /// sums upward as far as the tree allows.
    pub fn commit(&mut self, n_stages: usize, start: usize, stage: usize, cw: &[u8], k: &mut Kernel) {
        let mut s = stage;
        let mut cur = cw.to_vec();
        loop {
            if s == n_stages {
                self.codeword = cur;
                return;
            }
            let m = 1usize << s;
            if (start >> s) & 1 == 0 {
                self.left[m..2 * m].copy_from_slice(&cur);
                return;
            }
            let mut parent = Vec::with_capacity(2 * m);
            parent.extend(self.left[m..2 * m].iter().zip(&cur).map(|(a, b)| a ^ b));
            parent.extend_from_slice(&cur);
            k.ops.bit_ops += m as u64;
            cur = parent;
            s += 1;
        }
    }
}

/// Decisions made at one selection step, for replay-based verification.
#[derive(Clone, Debug, Default)]
pub struct StepTrace {
    /// Leaf range `[start, end)` decided by this step.
    pub start: usize,
    pub end: usize,
    /// Parent input prefixes `u[..start]`.
    pub parents: Vec<Vec<u8>>,
    pub parent_pms: Vec<f64>,
    /// Parent metrics at the last frozen leaf of the node (when computed).
    pub parent_pm_fs: Vec<f64>,
    /// Node-input LLRs after the dynamic-frozen sign correction.
    pub parent_llrs: Vec<Vec<f64>>,
    /// Surviving input prefixes `u[..end]` and their metrics.
    pub survivors: Vec<Vec<u8>>,
    pub survivor_pms: Vec<f64>,
    pub discarded_pms: Vec<f64>,
    /// Low-rate node (all candidates enumerated).
    pub exhaustive: bool,
}

#[derive(Clone, Debug)]
pub struct SclOutput {
    /// Surviving paths, ascending PM.
    pub paths: Vec<DecPath>,
    pub lambda_t: f64,
    pub ops: OpCounts,
    pub trace: Vec<StepTrace>,
}

/// Candidate produced by a path split.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Split {
    pub parent: usize,
    pub bit: u8,
    pub pm: f64,
}

/// Stable ascending sort of candidate metrics; ties keep generation order.
pub(crate) fn stable_select<T, F: Fn(&T) -> f64>(cands: &mut [T], key: F) {
    cands.sort_by(|a, b| key(a).total_cmp(&key(b)));
}

/// Bit-by-bit SCL. With `track_soft`, every discarded child `a^i` is folded
/// into λ_T as `−|F^(>i)|·ln2 − PM`.
pub fn scl_decode(
    llrs: &[f64],
    spec: &PolarCodeSpec,
    list_size: usize,
    mode: ArithMode,
    track_soft: bool,
) -> Result<SclOutput, DecodeError> {
    scl_decode_traced(llrs, spec, list_size, mode, track_soft, false)
}

pub fn scl_decode_traced(
    llrs: &[f64],
    spec: &PolarCodeSpec,
    list_size: usize,
    mode: ArithMode,
    track_soft: bool,
    trace: bool,
) -> Result<SclOutput, DecodeError> {
    let n = spec.n();
    if list_size == 0 {
        return Err(DecodeError::ListSize);
    }
    if llrs.len() != n {
        return Err(DecodeError::LlrLength { expected: n, got: llrs.len() });
    }
    let ns = spec.log2n();
    let mut k = Kernel::new(mode);
    let mut paths = vec![DecPath::new(n)];
    let mut lambda = NEG_INF;
    let mut steps = Vec::new();
    let mut cands: Vec<Split> = Vec::with_capacity(2 * list_size);

    for i in 0..n {
        let mut leaf = Vec::with_capacity(paths.len());
        for p in paths.iter_mut() {
            p.descend(llrs, ns, i, 0, &mut k);
            leaf.push(p.node_llrs(llrs, 0, ns)[0]);
        }
        if spec.is_frozen(i) {
            for (p, &a) in paths.iter_mut().zip(&leaf) {
                let v = spec.frozen_value(&p.u, i);
                let inc = k.pm_inc(a, v);
                p.pm = k.add(p.pm, inc);
                p.u[i] = v;
                p.commit(ns, i, 0, &[v], &mut k);
            }
            continue;
        }
        cands.clear();
        for (pi, (p, &a)) in paths.iter().zip(&leaf).enumerate() {
            for bit in 0..2u8 {
                let inc = k.pm_inc(a, bit);
                cands.push(Split { parent: pi, bit, pm: k.add(p.pm, inc) });
            }
        }
        if cands.len() > list_size {
            k.record_pm_sort(cands.len());
        }
        stable_select(&mut cands, |c| c.pm);
        let keep = cands.len().min(list_size);
        if track_soft && keep < cands.len() {
            let discount = spec.frozen_from(i + 1) as f64 * LN_2;
            for c in &cands[keep..] {
                let term = -discount - c.pm;
                k.ops.add_sub += 1;
                lambda = k.bplus(lambda, term);
            }
        }
        let mut step = StepTrace::default();
        if trace {
            step.start = i;
            step.end = i + 1;
            step.parents = paths.iter().map(|p| p.u[..i].to_vec()).collect();
            step.parent_pms = paths.iter().map(|p| p.pm).collect();
            step.parent_pm_fs = step.parent_pms.clone();
            step.parent_llrs = leaf.iter().map(|&a| vec![a]).collect();
            step.discarded_pms = cands[keep..].iter().map(|c| c.pm).collect();
            step.exhaustive = true;
        }
        paths = spawn_children(paths, &cands[..keep], |child, c| {
            child.pm = c.pm;
            child.u[i] = c.bit;
        });
        for (p, c) in paths.iter_mut().zip(&cands[..keep]) {
            p.commit(ns, i, 0, &[c.bit], &mut k);
        }
        if trace {
            step.survivors = paths.iter().map(|p| p.u[..=i].to_vec()).collect();
            step.survivor_pms = paths.iter().map(|p| p.pm).collect();
            steps.push(step);
        }
    }
    sort_paths(&mut paths);
    Ok(SclOutput { paths, lambda_t: lambda, ops: k.ops, trace: steps })
}

/// Build the next path list from selected candidates, cloning a parent only
/// while it still has further surviving children.
pub(crate) fn spawn_children<C, F: FnMut(&mut DecPath, &C)>(
    parents: Vec<DecPath>,
    selected: &[C],
    mut apply: F,
) -> Vec<DecPath>
where
    C: HasParent,
{
    let mut remaining = vec![0usize; parents.len()];
    for c in selected {
        remaining[c.parent()] += 1;
    }
    let mut slots: Vec<Option<DecPath>> = parents.into_iter().map(Some).collect();
    let mut out = Vec::with_capacity(selected.len());
    for c in selected {
        let p = c.parent();
        remaining[p] -= 1;
        let mut child = if remaining[p] == 0 {
            slots[p].take().expect("parent consumed twice")
        } else {
            slots[p].as_ref().expect("parent consumed").clone()
        };
        apply(&mut child, c);
        out.push(child);
    }
    out
}

pub(crate) trait HasParent {
    fn parent(&self) -> usize;
}

impl HasParent for Split {
    fn parent(&self) -> usize {
        self.parent
    }
}

/// Stable ascending PM order.
pub(crate) fn sort_paths(paths: &mut [DecPath]) {
    paths.sort_by(|a, b| a.pm.total_cmp(&b.pm));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_model::{build_nr5g, encode, DynFrozenCfg};

    #[test]
    fn combine_examples() {
        assert_eq!(combine_beta(&[0, 0], &[0, 0]).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(combine_beta(&[1, 0], &[0, 1]).unwrap(), vec![1, 1, 0, 1]);
        assert!(combine_beta(&[1], &[0, 1]).is_err());
    }

    #[test]
    fn combine_matches_encoding() {
        for w in 0..256u32 {
            let u: Vec<u8> = (0..8).map(|b| ((w >> b) & 1) as u8).collect();
            let l = encode(&u[..4]).unwrap();
            let r = encode(&u[4..]).unwrap();
            assert_eq!(combine_beta(&l, &r).unwrap(), encode(&u).unwrap());
        }
    }

    #[test]
    fn noiseless_decodes_transmitted() {
        let spec = build_nr5g(64, 32, DynFrozenCfg::convolutional(None)).unwrap();
        let info: Vec<u8> = (0..32).map(|i| ((i * 7) % 3 == 0) as u8).collect();
        let c = spec.encode_info(&info).unwrap();
        let llrs: Vec<f64> = c.iter().map(|&b| if b == 0 { 60.0 } else { -60.0 }).collect();
        for l in [1, 2, 8] {
            let out = scl_decode(&llrs, &spec, l, ArithMode::Exact, true).unwrap();
            assert_eq!(out.paths[0].codeword, c);
            assert!(out.paths[0].pm < 1e-20);
            assert_eq!(spec.extract_info(&out.paths[0].u), info);
        }
    }

    #[test]
    fn full_list_has_no_discards() {
        let spec = build_nr5g(16, 4, DynFrozenCfg::static_zero()).unwrap();
        let llrs: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin() * 2.0).collect();
        let out = scl_decode(&llrs, &spec, 16, ArithMode::Exact, true).unwrap();
        assert_eq!(out.lambda_t, NEG_INF);
        assert_eq!(out.paths.len(), 16);
    }

    #[test]
    fn deterministic() {
        let spec = build_nr5g(32, 16, DynFrozenCfg::default()).unwrap();
        let llrs: Vec<f64> = (0..32).map(|i| ((i * 13 % 7) as f64 - 3.0) * 0.8).collect();
        let a = scl_decode(&llrs, &spec, 4, ArithMode::Hwf, true).unwrap();
        let b = scl_decode(&llrs, &spec, 4, ArithMode::Hwf, true).unwrap();
        assert_eq!(a.lambda_t.to_bits(), b.lambda_t.to_bits());
        for (x, y) in a.paths.iter().zip(&b.paths) {
            assert_eq!(x.u, y.u);
            assert_eq!(x.pm.to_bits(), y.pm.to_bits());
        }
    }
}
