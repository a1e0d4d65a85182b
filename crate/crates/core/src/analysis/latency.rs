//! Decoding latency in clock cycles.
//!
//! Two models are provided. The unlimited model assumes enough processing
//! elements that every tree stage or selection step takes one cycle. The
//! constrained model has `npar` elements per cycle and schedules the work of
//! each node as a sequence of batches: an LLR batch needs ⌈size/npar⌉ cycles.
//! When soft-output work (λ tree of the previous node, frozen-prefix metric
//! of the current node) runs alongside hard-decision work, the elements are
//! split evenly between the two.

use std::collections::VecDeque;

use thiserror::Error;

use crate::analysis::DecoderKind;
use crate::code_model::{FicNode, NodeKind, PolarCodeSpec};

#[derive(Debug, Error, PartialEq)]
pub enum LatencyError {
    #[error("list size must be a power of two, got {0}")]
    ListSize(usize),
    #[error("parallelism must be at least 2, got {0}")]
    Parallelism(usize),
    #[error("no latency model for the {0} decoder")]
    Unsupported(&'static str),
}

/// Per-node timing of the unlimited model.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTiming {
    pub start: usize,
    pub len: usize,
    pub kind: NodeKind,
    /// Tree traversal from the junction with the previous node.
    pub t_l: usize,
    /// Hard decision and list pruning.
    pub t_h: usize,
    /// Frozen-prefix metric.
    pub t_p: usize,
    /// λ accumulation tree, overlapped with the next node.
    pub t_o: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatencyReport {
    pub decoder: DecoderKind,
    pub n: usize,
    pub k: usize,
    pub list_size: usize,
    /// `None` for the unlimited model.
    pub npar: Option<usize>,
    pub cycles: usize,
    pub nodes: Vec<NodeTiming>,
}

impl LatencyReport {
    pub fn to_text(&self) -> String {
        let npar = self.npar.map_or_else(|| "unlimited".to_string(), |p| p.to_string());
        format!(
            "decoder = {}\nn = {}\nk = {}\nlist_size = {}\nnpar = {}\ncycles = {}\n",
            self.decoder.name(),
            self.n,
            self.k,
            self.list_size,
            npar,
            self.cycles
        )
    }
}

fn log2_ceil(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

fn check_list(list_size: usize) -> Result<(), LatencyError> {
    if list_size == 0 || !list_size.is_power_of_two() {
        return Err(LatencyError::ListSize(list_size));
    }
    Ok(())
}

/// Lowest stage whose subtree contains both leaves.
fn junction_stage(a: usize, b: usize) -> usize {
    let mut s = 0;
    while (a >> s) != (b >> s) {
        s += 1;
    }
    s
}

fn hard_cycles(kind: NodeKind, ns: usize, l: usize) -> usize {
    match kind {
        NodeKind::Rate0 => 1,
        NodeKind::Rep => 2,
        NodeKind::TypeI => 3,
        NodeKind::TypeII => 4,
        NodeKind::TypeIV => l.min(ns - 3),
        NodeKind::TypeIII => l.min(ns - 1),
        NodeKind::Spc => l.min(ns),
        NodeKind::Rate1 => l.min(ns + 1),
    }
}

fn prefix_cycles(kind: NodeKind, ns: usize) -> usize {
    let lg = ns.trailing_zeros() as usize;
    match kind {
        NodeKind::TypeIV => lg - 1,
        NodeKind::TypeIII | NodeKind::Spc => lg,
        _ => 0,
    }
}

fn lambda_cycles(kind: NodeKind, ks: usize, l: usize) -> usize {
    if ks == 0 {
        0
    } else if kind.is_low_rate() {
        log2_ceil((1usize << ks) * l - l + 1)
    } else {
        log2_ceil(2 * l)
    }
}

fn node_timings(spec: &PolarCodeSpec, l: usize) -> Vec<NodeTiming> {
    let n = spec.log2n();
    let mut prev: Option<usize> = None;
    spec.fic_nodes()
        .iter()
        .map(|nd: &FicNode| {
            let top = prev.map_or(n, |p| junction_stage(p, nd.start));
            prev = Some(nd.start);
            NodeTiming {
                start: nd.start,
                len: nd.len(),
                kind: nd.kind,
                t_l: top - nd.stage,
                t_h: hard_cycles(nd.kind, nd.len(), l),
                t_p: prefix_cycles(nd.kind, nd.len()),
                t_o: lambda_cycles(nd.kind, nd.ks, l),
            }
        })
        .collect()
}

/// Leaf-level timings of bit-by-bit decoding, in the same layout.
fn leaf_timings(spec: &PolarCodeSpec, l: usize) -> Vec<NodeTiming> {
    let n = spec.log2n();
    (0..spec.n())
        .map(|i| {
            let info = !spec.is_frozen(i);
            NodeTiming {
                start: i,
                len: 1,
                kind: if info { NodeKind::Rate1 } else { NodeKind::Rate0 },
                t_l: if i == 0 { n } else { (i.trailing_zeros() as usize + 1).min(n) },
                t_h: info as usize,
                t_p: 0,
                t_o: if info { log2_ceil(l) } else { 0 },
            }
        })
        .collect()
}

/// Cycle count with unlimited parallelism.
pub fn latency_unlimited(spec: &PolarCodeSpec, list_size: usize, decoder: DecoderKind) -> Result<LatencyReport, LatencyError> {
    check_list(list_size)?;
    let (nodes, soft) = match decoder {
        DecoderKind::Fscl => (node_timings(spec, list_size), false),
        DecoderKind::SoFscl => (node_timings(spec, list_size), true),
        DecoderKind::Scl => (leaf_timings(spec, list_size), false),
        DecoderKind::SoScl => (leaf_timings(spec, list_size), true),
        DecoderKind::Pyndiah => return Err(LatencyError::Unsupported(decoder.name())),
    };
    let cycles = if soft {
        let mut tot = 0;
        let mut o_prev: usize = 0;
        for t in &nodes {
            tot += t.t_l + t.t_h.max(t.t_p).max(o_prev.saturating_sub(t.t_l));
            o_prev = t.t_o;
        }
        tot + o_prev + 1 + log2_ceil(list_size)
    } else {
        nodes.iter().map(|t| t.t_l + t.t_h).sum()
    };
    Ok(report(spec, list_size, decoder, None, cycles, nodes))
}

fn report(
    spec: &PolarCodeSpec,
    list_size: usize,
    decoder: DecoderKind,
    npar: Option<usize>,
    cycles: usize,
    nodes: Vec<NodeTiming>,
) -> LatencyReport {
    LatencyReport { decoder, n: spec.n(), k: spec.k(), list_size, npar, cycles, nodes }
}

/// Work of one node in the constrained model, as batch sizes.
struct NodeWork {
    llr: Vec<usize>,
    hard: Vec<usize>,
    prefix: Vec<usize>,
    /// λ tree of this node, executed during the next node.
    lambda: Vec<usize>,
}

/// A queue of batches; the head batch may be partially done.
#[derive(Default)]
struct Stream {
    queue: VecDeque<usize>,
    head: Option<usize>,
}

impl Stream {
    fn load(&mut self, batches: &[usize]) {
        self.queue.extend(batches.iter().copied());
    }

    fn active(&self) -> bool {
        self.head.is_some() || !self.queue.is_empty()
    }

    fn work(&mut self, cap: usize) {
        if cap == 0 || !self.active() {
            return;
        }
        let rem = self.head.take().unwrap_or_else(|| self.queue.pop_front().expect("active stream"));
        if rem > cap {
            self.head = Some(rem - cap);
        }
    }
}

fn node_work(nd: &FicNode, top: usize, p: usize, l: usize, soft: bool) -> NodeWork {
    let (ns, ks) = (nd.len(), nd.ks);
    let llr = (nd.stage..top).rev().map(|s| (1usize << s) * p).collect();
    let th = hard_cycles(nd.kind, ns, l);
    let hard = match nd.kind {
        NodeKind::Rate0 => vec![p],
        kd if kd.is_low_rate() => std::iter::once((1usize << ks) * p).chain(std::iter::repeat_n(2 * l, th - 1)).collect(),
        _ => std::iter::once(2 * p).chain(std::iter::repeat_n(2 * l, th - 1)).collect(),
    };
    if !soft {
        return NodeWork { llr, hard, prefix: Vec::new(), lambda: Vec::new() };
    }
    let prefix = match nd.kind {
        NodeKind::TypeIV | NodeKind::TypeIII | NodeKind::Spc => {
            let nm = if nd.kind == NodeKind::TypeIV { 4 } else { 2 };
            let steps = (ns / nm).trailing_zeros() as usize;
            (1..=steps).map(|j| (ns >> j) * p).chain(std::iter::once(p)).collect()
        }
        _ => Vec::new(),
    };
    let to = lambda_cycles(nd.kind, ks, l);
    let lambda = if nd.kind.is_low_rate() {
        let terms = (1usize << ks) * p;
        let mut m = if terms > l { terms - l + 1 } else { 0 };
        (0..to)
            .map(|_| {
                m = m.div_ceil(2);
                m.max(1)
            })
            .collect()
    } else {
        vec![l; to]
    };
    NodeWork { llr, hard, prefix, lambda }
}

fn leaf_work(spec: &PolarCodeSpec, i: usize, top: usize, p: usize, l: usize, soft: bool) -> NodeWork {
    let llr = (0..top).rev().map(|s| (1usize << s) * p).collect();
    let info = !spec.is_frozen(i);
    let hard = if info { vec![2 * p] } else { Vec::new() };
    let lambda = if soft && info {
        let mut m = if 2 * p > l { 2 * p - l + 1 } else { 0 };
        (0..log2_ceil(l))
            .map(|_| {
                m = m.div_ceil(2);
                m.max(1)
            })
            .collect()
    } else {
        Vec::new()
    };
    NodeWork { llr, hard, prefix: Vec::new(), lambda }
}

/// Cycles for one node: LLR batches, then hard batches in parallel with
/// the frozen-prefix batches; the previous λ tree runs from the start.
fn schedule(work: &NodeWork, pending: &[usize], npar: usize) -> usize {
    let mut hard = Stream::default();
    hard.load(&work.llr);
    let mut lam = Stream::default();
    lam.load(pending);
    let mut pre = Stream::default();
    let mut second_phase = false;
    let mut cycles = 0;
    loop {
        if !hard.active() && !second_phase {
            second_phase = true;
            hard.load(&work.hard);
            pre.load(&work.prefix);
        }
        let (ha, la, pa) = (hard.active(), lam.active(), pre.active());
        if !(ha || la || pa) {
            return cycles;
        }
        let (ch, cs) = if ha && (la || pa) { (npar / 2, npar / 2) } else { (npar, npar) };
        let (cl, cp) = if la && pa { (cs / 2, cs - cs / 2) } else { (cs, cs) };
        if ha {
            hard.work(ch);
        }
        if la {
            lam.work(cl);
        }
        if pa {
            pre.work(cp);
        }
        cycles += 1;
    }
}

/// Cycle count with `npar` processing elements.
pub fn latency_constrained(
    spec: &PolarCodeSpec,
    list_size: usize,
    decoder: DecoderKind,
    npar: usize,
) -> Result<LatencyReport, LatencyError> {
    check_list(list_size)?;
    if npar < 2 {
        return Err(LatencyError::Parallelism(npar));
    }
    let l = list_size;
    let n = spec.log2n();
    let soft = matches!(decoder, DecoderKind::SoFscl | DecoderKind::SoScl);
    let mut cycles = 0;
    let mut pending: Vec<usize> = Vec::new();
    let mut p = 1usize;
    match decoder {
        DecoderKind::Fscl | DecoderKind::SoFscl => {
            let mut prev: Option<usize> = None;
            for nd in spec.fic_nodes() {
                let top = prev.map_or(n, |q| junction_stage(q, nd.start));
                let w = node_work(nd, top, p, l, soft);
                cycles += schedule(&w, &pending, npar);
                pending = w.lambda;
                p = l.min(p.saturating_mul(1usize.checked_shl(nd.ks as u32).unwrap_or(usize::MAX)));
                prev = Some(nd.start);
            }
        }
        DecoderKind::Scl | DecoderKind::SoScl => {
            for i in 0..spec.n() {
                let top = if i == 0 { n } else { (i.trailing_zeros() as usize + 1).min(n) };
                let w = leaf_work(spec, i, top, p, l, soft);
                cycles += schedule(&w, &pending, npar);
                pending = w.lambda;
                if !spec.is_frozen(i) {
                    p = l.min(2 * p);
                }
            }
        }
        DecoderKind::Pyndiah => return Err(LatencyError::Unsupported(decoder.name())),
    }
    if soft {
        cycles += pending.iter().map(|b| b.div_ceil(npar)).sum::<usize>() + 1 + log2_ceil(l);
    }
    Ok(report(spec, l, decoder, Some(npar), cycles, Vec::new()))
}
