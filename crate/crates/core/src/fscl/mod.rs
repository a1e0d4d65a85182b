//! Node-based fast list decoding over the FIC segmentation.
//!
//! Each node is decoded at its codeword side with metric updates of the form
//! `PM += Σ sp(−(1−2ŝ_k)·α̃_k)`, where α̃ are the node LLRs with dynamic frozen
//! values folded into their signs. The same engine optionally runs the
//! soft-output bookkeeping (see [`crate::soft_output`]); hard decisions are
//! unaffected by it.

use std::f64::consts::LN_2;

use crate::analysis::OpCounts;
use crate::code_model::{encode_in_place, FicNode, NodeKind, PolarCodeSpec};
use crate::scl_core::{sort_paths, spawn_children, stable_select, DecPath, DecodeError, HasParent, Kernel, StepTrace};
use crate::soft_output::logdomain::NEG_INF;
use crate::soft_output::{frz_dec, lambda_update_highrate, lambda_update_lowrate, ArithMode};

/// One node-level candidate: parent path, sub-codeword in the α̃ domain, metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub parent: usize,
    pub s_i: Vec<u8>,
    pub pm: f64,
}

impl HasParent for Candidate {
    fn parent(&self) -> usize {
        self.parent
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeDecodeOutcome {
    /// Ascending PM.
    pub survivors: Vec<Candidate>,
    /// Losers of the most recent selection.
    pub discarded: Vec<Candidate>,
    /// Number of valid sub-codewords below the parents, 2^{K_s}·|parents|.
    pub total_valid: f64,
}

/// Frozen-part sub-codeword ŝ_F and the sign-corrected LLRs α̃.
#[derive(Clone, Debug, PartialEq)]
pub struct FrozenMask {
    pub s_f: Vec<u8>,
    pub alpha: Vec<f64>,
}

/// Fold the node's dynamic frozen values into the LLR signs.
pub fn apply_dynamic_frozen(u_prefix: &[u8], node: &FicNode, spec: &PolarCodeSpec, llrs: &[f64]) -> FrozenMask {
    let plan = NodePlan::new(spec, node);
    plan.mask(spec, u_prefix, llrs, &mut Kernel::new(ArithMode::Exact))
}

/// Per-node constants: dynamic positions with their ŝ_F lookup table, and
/// the codebook of low-rate nodes.
#[derive(Clone, Debug)]
struct NodePlan {
    start: usize,
    dyn_pos: Vec<usize>,
    lut: Vec<Vec<u8>>,
    codebook: Vec<Vec<u8>>,
}

const LUT_MAX_BITS: usize = 10;

impl NodePlan {
    fn new(spec: &PolarCodeSpec, node: &FicNode) -> Self {
        let ns = node.len();
        let dyn_pos: Vec<usize> = (node.start..node.start + node.n_frozen()).filter(|&i| spec.is_dynamic(i)).collect();
        let mut lut = Vec::new();
        if !dyn_pos.is_empty() && dyn_pos.len() <= LUT_MAX_BITS {
            for pat in 0..(1usize << dyn_pos.len()) {
                let mut w = vec![0u8; ns];
                for (b, &i) in dyn_pos.iter().enumerate() {
                    w[i - node.start] = ((pat >> b) & 1) as u8;
                }
                encode_in_place(&mut w);
                lut.push(w);
            }
        }
        let codebook = if node.kind.is_low_rate() { low_rate_codebook(node) } else { Vec::new() };
        Self { start: node.start, dyn_pos, lut, codebook }
    }

    fn mask(&self, spec: &PolarCodeSpec, u: &[u8], alpha: &[f64], k: &mut Kernel) -> FrozenMask {
        let ns = alpha.len();
        let mut pattern = 0usize;
        let mut values = Vec::with_capacity(self.dyn_pos.len());
        for (b, &i) in self.dyn_pos.iter().enumerate() {
            let v = spec.frozen_value(u, i);
            k.ops.bit_ops += 1;
            pattern |= (v as usize) << b;
            values.push(v);
        }
        if pattern == 0 {
            return FrozenMask { s_f: vec![0; ns], alpha: alpha.to_vec() };
        }
        let s_f = if !self.lut.is_empty() {
            self.lut[pattern].clone()
        } else {
            let mut w = vec![0u8; ns];
            for (&i, &v) in self.dyn_pos.iter().zip(&values) {
                w[i - self.start] = v;
            }
            encode_in_place(&mut w);
            k.ops.bit_ops += (ns * ns.trailing_zeros() as usize / 2) as u64;
            w
        };
        let alpha = alpha
            .iter()
            .zip(&s_f)
            .map(|(&a, &s)| {
                if s == 1 {
                    k.ops.hd_sign += 1;
                    -a
                } else {
                    a
                }
            })
            .collect();
        FrozenMask { s_f, alpha }
    }
}

/// Rate-0 node: every path takes the all-zero sub-codeword.
pub fn decode_rate0(parents: &[(f64, &[f64])], k: &mut Kernel) -> NodeDecodeOutcome {
    let survivors = parents
        .iter()
        .enumerate()
        .map(|(pi, &(pm, a))| {
            let mut acc = pm;
            for &x in a {
                let inc = k.pm_inc(x, 0);
                acc = k.add(acc, inc);
            }
            Candidate { parent: pi, s_i: vec![0; a.len()], pm: acc }
        })
        .collect();
    NodeDecodeOutcome { survivors, discarded: Vec::new(), total_valid: parents.len() as f64 }
}

/// Low-rate node (1 ≤ K_s ≤ 3): enumerate all information patterns.
pub fn decode_exhaustive(
    parents: &[(f64, &[f64])],
    node: &FicNode,
    list_size: usize,
    k: &mut Kernel,
) -> NodeDecodeOutcome {
    decode_exhaustive_with(parents, &low_rate_codebook(node), list_size, k)
}

/// All sub-codewords of a frozen-prefix node, first information bit as the
/// most significant pattern bit (the order bit-by-bit SCL visits them).
fn low_rate_codebook(node: &FicNode) -> Vec<Vec<u8>> {
    let (ns, ks) = (node.len(), node.ks);
    (0..(1usize << ks))
        .map(|pat| {
            let mut w = vec![0u8; ns];
            for t in 0..ks {
                w[ns - ks + t] = ((pat >> (ks - 1 - t)) & 1) as u8;
            }
            encode_in_place(&mut w);
            w
        })
        .collect()
}

fn decode_exhaustive_with(
    parents: &[(f64, &[f64])],
    codebook: &[Vec<u8>],
    list_size: usize,
    k: &mut Kernel,
) -> NodeDecodeOutcome {
    let mut cands: Vec<(usize, usize, f64)> = Vec::with_capacity(parents.len() * codebook.len());
    for (pi, &(pm, a)) in parents.iter().enumerate() {
        // sp(α) = sp(−α) + α.
        let sp0: Vec<f64> = a.iter().map(|&x| k.pm_inc(x, 0)).collect();
        let sp1: Vec<f64> = a.iter().zip(&sp0).map(|(&x, &s)| k.add(s, x)).collect();
        for (ci, cw) in codebook.iter().enumerate() {
            let mut acc = pm;
            for j in 0..cw.len() {
                acc += if cw[j] == 0 { sp0[j] } else { sp1[j] };
            }
            k.ops.add_sub += cw.len() as u64;
            cands.push((pi, ci, acc));
        }
    }
    let total = cands.len();
    if total > list_size {
        k.record_pm_sort(total);
    }
    stable_select(&mut cands, |c| c.2);
    let keep = total.min(list_size);
    let to_cand = |&(pi, ci, pm): &(usize, usize, f64)| Candidate { parent: pi, s_i: codebook[ci].clone(), pm };
    NodeDecodeOutcome {
        survivors: cands[..keep].iter().map(to_cand).collect(),
        discarded: cands[keep..].iter().map(to_cand).collect(),
        total_valid: total as f64,
    }
}

/// Per-parent flip plan of a high-rate node.
struct FlipPlan {
    hard: Vec<u8>,
    mag: Vec<f64>,
    /// Least reliable position of each parity class.
    fixers: Vec<usize>,
    /// Non-fixer positions, ascending reliability.
    order: Vec<usize>,
    ml_pm: f64,
}

/// High-rate node (Rate1, SPC, TypeIII, TypeIV): hard decision, parity
/// repair per interleaved class, then least-reliable-first flip rounds.
pub fn decode_highrate(parents: &[(f64, &[f64])], kind: NodeKind, list_size: usize, k: &mut Kernel) -> NodeDecodeOutcome {
    assert!(kind.is_high_rate(), "decode_highrate called on {kind:?}");
    let nq = kind.parity_classes();
    let ns = parents.first().map_or(0, |p| p.1.len());
    let ks = ns - match kind {
        NodeKind::Spc => 1,
        NodeKind::TypeIII => 2,
        NodeKind::TypeIV => 3,
        _ => 0,
    };

    let plans: Vec<FlipPlan> = parents
        .iter()
        .map(|&(pm, a)| {
            let hard: Vec<u8> = a.iter().map(|&x| (x < 0.0) as u8).collect();
            k.ops.hd_sign += a.len() as u64;
            let mag: Vec<f64> = a.iter().map(|x| x.abs()).collect();
            let mut ml = pm;
            for &x in a {
                let inc = k.pm_inc(x, (x < 0.0) as u8);
                ml = k.add(ml, inc);
            }
            let mut sorted: Vec<usize> = (0..a.len()).collect();
            sorted.sort_by(|&x, &y| mag[x].total_cmp(&mag[y]).then(x.cmp(&y)));
            k.record_llr_sort(a.len());
            let mut fixers = vec![usize::MAX; nq];
            let mut order = Vec::with_capacity(a.len());
            for &j in &sorted {
                if nq > 0 && fixers[j % nq] == usize::MAX {
                    fixers[j % nq] = j;
                } else {
                    order.push(j);
                }
            }
            FlipPlan { hard, mag, fixers, order, ml_pm: ml }
        })
        .collect();

    // Starting candidates.
    let mut cur: Vec<Candidate> = Vec::new();
    let mut discarded = Vec::new();
    let repair = |plan: &FlipPlan, target: u8, pm: f64, k: &mut Kernel| -> Candidate {
        let mut cw = plan.hard.clone();
        let mut acc = pm;
        for (q, &f) in plan.fixers.iter().enumerate() {
            let parity = cw.iter().skip(q).step_by(nq).fold(0u8, |p, &b| p ^ b);
            k.ops.bit_ops += (cw.len() / nq) as u64;
            if parity != target {
                cw[f] ^= 1;
                acc = k.add(acc, plan.mag[f]);
            }
        }
        Candidate { parent: 0, s_i: cw, pm: acc }
    };
    match kind {
        NodeKind::TypeIV => {
            let mut hyps = Vec::with_capacity(2 * plans.len());
            for (pi, plan) in plans.iter().enumerate() {
                for target in 0..2u8 {
                    let mut c = repair(plan, target, plan.ml_pm, k);
                    c.parent = pi;
                    hyps.push(c);
                }
            }
            if hyps.len() > list_size {
                k.record_pm_sort(hyps.len());
            }
            stable_select(&mut hyps, |c| c.pm);
            let keep = hyps.len().min(list_size);
            discarded = hyps.split_off(keep);
            cur = hyps;
        }
        _ => {
            for (pi, plan) in plans.iter().enumerate() {
                let mut c = repair(plan, 0, plan.ml_pm, k);
                c.parent = pi;
                cur.push(c);
            }
            stable_select(&mut cur, |c| c.pm);
            if cur.len() > list_size {
                k.record_pm_sort(cur.len());
                discarded = cur.split_off(list_size);
            }
        }
    }

    let rounds = (list_size - 1).min(ns - nq);
    for r in 0..rounds {
        // (index into cur, flip?, pm)
        let mut opts: Vec<(usize, bool, f64)> = Vec::with_capacity(2 * cur.len());
        for (ci, c) in cur.iter().enumerate() {
            let plan = &plans[c.parent];
            let pos = plan.order[r];
            let mut delta = plan.mag[pos];
            if nq > 0 {
                let f = plan.fixers[pos % nq];
                if c.s_i[f] == plan.hard[f] {
                    delta += plan.mag[f];
                } else {
                    delta -= plan.mag[f];
                }
                k.ops.add_sub += 1;
            }
            opts.push((ci, false, c.pm));
            opts.push((ci, true, k.add(c.pm, delta)));
        }
        if opts.len() > list_size {
            k.record_pm_sort(opts.len());
        }
        stable_select(&mut opts, |o| o.2);
        let keep = opts.len().min(list_size);
        let build = |&(ci, flip, pm): &(usize, bool, f64)| {
            let c: &Candidate = &cur[ci];
            let mut s_i = c.s_i.clone();
            if flip {
                let plan = &plans[c.parent];
                let pos = plan.order[r];
                s_i[pos] ^= 1;
                if nq > 0 {
                    s_i[plan.fixers[pos % nq]] ^= 1;
                }
            }
            Candidate { parent: c.parent, s_i, pm }
        };
        let next: Vec<Candidate> = opts[..keep].iter().map(build).collect();
        discarded = opts[keep..].iter().map(build).collect();
        cur = next;
    }
    stable_select(&mut cur, |c| c.pm);
    NodeDecodeOutcome { survivors: cur, discarded, total_valid: parents.len() as f64 * 2f64.powi(ks as i32) }
}

/// Result of one fast decode.
#[derive(Clone, Debug)]
pub struct FastOutput {
    /// Surviving paths, ascending PM.
    pub paths: Vec<DecPath>,
    /// ln P*_T; −∞ when soft output is off.
    pub lambda_t: f64,
    pub ops: OpCounts,
    pub trace: Vec<StepTrace>,
}

/// Reusable FSCL / SO-FSCL decoder for one code.
#[derive(Clone, Debug)]
pub struct FastDecoder<'a> {
    spec: &'a PolarCodeSpec,
    list_size: usize,
    mode: ArithMode,
    soft: bool,
    trace: bool,
    plans: Vec<NodePlan>,
}

impl<'a> FastDecoder<'a> {
    pub fn new(spec: &'a PolarCodeSpec, list_size: usize, mode: ArithMode, soft: bool) -> Result<Self, DecodeError> {
        if list_size == 0 {
            return Err(DecodeError::ListSize);
        }
        let plans = spec.fic_nodes().iter().map(|nd| NodePlan::new(spec, nd)).collect();
        Ok(Self { spec, list_size, mode, soft, trace: false, plans })
    }

    /// Record per-node decisions in the output.
    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn spec(&self) -> &PolarCodeSpec {
        self.spec
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn mode(&self) -> ArithMode {
        self.mode
    }

    pub fn decode(&self, llrs: &[f64]) -> Result<FastOutput, DecodeError> {
        let spec = self.spec;
        let n = spec.n();
        if llrs.len() != n {
            return Err(DecodeError::LlrLength { expected: n, got: llrs.len() });
        }
        let ns = spec.log2n();
        let mut k = Kernel::new(self.mode);
        let mut paths = vec![DecPath::new(n)];
        let mut lambda = NEG_INF;
        let mut steps = Vec::new();

        for (node, plan) in spec.fic_nodes().iter().zip(&self.plans) {
            let masks: Vec<FrozenMask> = paths
                .iter_mut()
                .map(|p| {
                    p.descend(llrs, ns, node.start, node.stage, &mut k);
                    let a = p.node_llrs(llrs, node.stage, ns);
                    plan.mask(spec, &p.u, a, &mut k)
                })
                .collect();
            let parents: Vec<(f64, &[f64])> = paths.iter().zip(&masks).map(|(p, m)| (p.pm, m.alpha.as_slice())).collect();
            let outcome = match node.kind {
                NodeKind::Rate0 => decode_rate0(&parents, &mut k),
                kd if kd.is_low_rate() => decode_exhaustive_with(&parents, &plan.codebook, self.list_size, &mut k),
                kd => decode_highrate(&parents, kd, self.list_size, &mut k),
            };

            let pm_fs: Vec<f64> = if (self.soft || self.trace) && node.kind.is_high_rate() {
                parents.iter().map(|&(pm, a)| frz_dec(node.kind, a, pm, &mut k)).collect()
            } else {
                Vec::new()
            };
            if self.soft {
                let discount = node.n_frozen() as f64 * LN_2;
                lambda = if node.kind.is_high_rate() {
                    lambda_update_highrate(lambda, discount, &pm_fs, &outcome, self.list_size, &mut k)?
                } else {
                    lambda_update_lowrate(lambda, discount, &outcome, &mut k)
                };
            }

            let mut step = StepTrace::default();
            if self.trace {
                step.start = node.start;
                step.end = node.end();
                step.parents = paths.iter().map(|p| p.u[..node.start].to_vec()).collect();
                step.parent_pms = paths.iter().map(|p| p.pm).collect();
                step.parent_pm_fs = pm_fs.clone();
                step.parent_llrs = masks.iter().map(|m| m.alpha.clone()).collect();
                step.discarded_pms = outcome.discarded.iter().map(|c| c.pm).collect();
                step.exhaustive = !node.kind.is_high_rate();
            }

            let (start, end, stage) = (node.start, node.end(), node.stage);
            paths = spawn_children(paths, &outcome.survivors, |child, c| {
                let s_f = &masks[c.parent].s_f;
                let mut w: Vec<u8> = c.s_i.iter().zip(s_f).map(|(a, b)| a ^ b).collect();
                child.pm = c.pm;
                child.commit(ns, start, stage, &w, &mut k);
                encode_in_place(&mut w);
                child.u[start..end].copy_from_slice(&w);
            });
            if self.trace {
                step.survivors = paths.iter().map(|p| p.u[..end].to_vec()).collect();
                step.survivor_pms = paths.iter().map(|p| p.pm).collect();
                steps.push(step);
            }
        }
        sort_paths(&mut paths);
        Ok(FastOutput { paths, lambda_t: lambda, ops: k.ops, trace: steps })
    }
}

/// Hard-output FSCL decoding.
pub fn fscl_decode(
    llrs: &[f64],
    spec: &PolarCodeSpec,
    list_size: usize,
    mode: ArithMode,
) -> Result<Vec<DecPath>, DecodeError> {
    Ok(FastDecoder::new(spec, list_size, mode, false)?.decode(llrs)?.paths)
}
