//! Best-first branch-and-bound over item assignments.
//!
//! Items are fixed one at a time (to one economy member or to nobody) in a
//! static order of decreasing objective influence. Each popped node is
//! followed by a depth-first plunge along its best child; remaining children
//! go to a max-heap on their bound.
//!
//! Bound: linear and quadratic members share a coupled relaxation in which
//! every undecided item and every undecided item pair contributes the best
//! (non-negative) unary or pair gain over those members. Kernel members add
//! their term-wise bound. For quadratic-kernel SVRs the term-wise bound is
//! also computed and the smaller total is used.

use alloc::boxed::Box;
use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::clock::Deadline;
use super::encoding::Encoding;
use super::{SolveStatus, WdpProblem, WdpSolution};
use crate::bundle::{bit_iter, mask};
use crate::{Allocation, Bundle, Error, Result, WELFARE_TOL};

const MAX_OPEN_NODES: usize = 4_000_000;

struct Node {
    bound: f64,
    depth: u32,
    seq: u64,
    assigned: Box<[u64]>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        self.bound
            .total_cmp(&o.bound)
            .then(self.depth.cmp(&o.depth))
            .then(o.seq.cmp(&self.seq))
    }
}

struct Engine<'a> {
    members: Vec<usize>,
    enc: Vec<&'a Encoding>,
    excluded: Vec<Vec<u64>>,
    order: Vec<usize>,
    /// `prefix[d]`: mask of the first `d` items in branching order.
    prefix: Vec<u64>,
    available: u64,
    m: usize,
    /// Members whose encodings decompose into unary and pair gains.
    decomposable: Vec<usize>,
    kernel_members: Vec<usize>,
    /// Max over quadratic members of the positive part of each pair weight.
    pair_cap: Vec<f64>,
    /// All decomposable members are quadratic-kernel SVRs carrying term data.
    termwise_alternative: bool,
}

impl<'a> Engine<'a> {
    fn new(p: &'a WdpProblem) -> Result<Self> {
        let m = p.models.m();
        let members: Vec<usize> = p.economy.members().collect();
        let enc: Vec<&Encoding> = members.iter().map(|&i| &p.models.encodings()[i]).collect();
        if enc.iter().any(|e| !e.supports_branch_and_bound()) {
            return Err(Error::ModelKind("value tables require the enumeration solver".into()));
        }
        let available = mask(m) & !p.blocked;
        let mut order: Vec<usize> = bit_iter(available).collect();
        let influence: Vec<f64> = (0..m).map(|j| enc.iter().map(|e| e.influence(j)).sum()).collect();
        order.sort_by(|&a, &b| influence[b].total_cmp(&influence[a]).then(a.cmp(&b)));
        let mut prefix = alloc::vec![0u64; order.len() + 1];
        for (d, &j) in order.iter().enumerate() {
            prefix[d + 1] = prefix[d] | 1 << j;
        }
        let mut decomposable = Vec::new();
        let mut kernel_members = Vec::new();
        for (t, e) in enc.iter().enumerate() {
            match e {
                Encoding::Linear(_) | Encoding::Quadratic { .. } => decomposable.push(t),
                Encoding::Kernel(_) => kernel_members.push(t),
                Encoding::Table(_) => unreachable!(),
            }
        }
        let mut pair_cap = alloc::vec![0.0; m * m];
        for &t in &decomposable {
            if let Encoding::Quadratic { form, .. } = enc[t] {
                for (cap, q) in pair_cap.iter_mut().zip(&form.pairs) {
                    *cap = f64::max(*cap, *q);
                }
            }
        }
        let termwise_alternative = !decomposable.is_empty()
            && decomposable.iter().all(|&t| matches!(enc[t], Encoding::Quadratic { terms: Some(_), .. }));
        Ok(Engine {
            excluded: members.iter().map(|&i| p.excluded_masks(i)).collect(),
            members,
            enc,
            order,
            prefix,
            available,
            m,
            decomposable,
            kernel_members,
            pair_cap,
            termwise_alternative,
        })
    }

    fn bound(&self, depth: usize, assigned: &[u64], unary: &mut [f64]) -> f64 {
        let decided = self.prefix[depth];
        let free = self.available & !decided;
        for j in bit_iter(free) {
            unary[j] = 0.0;
        }
        let mut coupled = 0.0;
        let mut termwise = 0.0;
        for &t in &self.decomposable {
            let a = assigned[t];
            match self.enc[t] {
                Encoding::Linear(w) => {
                    coupled += bit_iter(a).map(|j| w[j]).sum::<f64>();
                    for j in bit_iter(free) {
                        unary[j] = unary[j].max(w[j]);
                    }
                }
                Encoding::Quadratic { form, terms } => {
                    let fixed = form.raw(a);
                    coupled += if form.clamp_at_zero { fixed.max(0.0) } else { fixed };
                    for j in bit_iter(free) {
                        let row = &form.pairs[j * self.m..(j + 1) * self.m];
                        let u = form.linear[j] + bit_iter(a).map(|k| row[k]).sum::<f64>();
                        unary[j] = unary[j].max(u);
                    }
                    if let (true, Some(terms)) = (self.termwise_alternative, terms) {
                        termwise += terms.bound(a, decided & !a, free);
                    }
                }
                _ => unreachable!(),
            }
        }
        if !self.decomposable.is_empty() {
            let mut rest = free;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                coupled += unary[j];
                let row = &self.pair_cap[j * self.m..(j + 1) * self.m];
                for k in bit_iter(rest) {
                    coupled += row[k];
                }
            }
        }
        let mut separate = 0.0;
        for &t in &self.kernel_members {
            if let Encoding::Kernel(terms) = self.enc[t] {
                let a = assigned[t];
                separate += terms.bound(a, decided & !a, free);
            }
        }
        if self.termwise_alternative {
            coupled = coupled.min(termwise);
        }
        coupled + separate
    }

    fn objective(&self, assigned: &[u64]) -> f64 {
        assigned.iter().zip(&self.enc).map(|(a, e)| e.value(*a)).sum()
    }

    fn admissible(&self, assigned: &[u64]) -> bool {
        assigned.iter().zip(&self.excluded).all(|(a, ex)| ex.binary_search(a).is_err())
    }

    /// Greedy completion followed by single-item moves until no move helps.
    fn complete(&self, depth: usize, assigned: &[u64]) -> Option<(f64, Box<[u64]>)> {
        let mut a: Box<[u64]> = assigned.into();
        let mut val: Vec<f64> = a.iter().zip(&self.enc).map(|(x, e)| e.value(*x)).collect();
        let free = &self.order[depth..];
        for &j in free {
            let mut best = (0.0, usize::MAX, 0.0);
            for (t, e) in self.enc.iter().enumerate() {
                let v = e.value(a[t] | 1 << j);
                let gain = v - val[t];
                if gain > best.0 + 1e-12 {
                    best = (gain, t, v);
                }
            }
            if best.1 != usize::MAX {
                a[best.1] |= 1 << j;
                val[best.1] = best.2;
            }
        }
        for _ in 0..4 {
            let mut improved = false;
            for &j in free {
                let owner = (0..a.len()).find(|&t| a[t] >> j & 1 == 1);
                let (base_owner, loss) = match owner {
                    Some(t) => {
                        let v = self.enc[t].value(a[t] & !(1 << j));
                        (Some((t, v)), val[t] - v)
                    }
                    None => (None, 0.0),
                };
                let mut best = (0.0, None);
                if owner.is_some() && -loss > 1e-12 {
                    best = (-loss, None);
                }
                for (t, e) in self.enc.iter().enumerate() {
                    if Some(t) == owner {
                        continue;
                    }
                    let v = e.value(a[t] | 1 << j);
                    let delta = v - val[t] - loss;
                    if delta > best.0 + 1e-12 {
                        best = (delta, Some((t, v)));
                    }
                }
                if best.0 > 1e-12 {
                    if let Some((t, v)) = base_owner {
                        a[t] &= !(1 << j);
                        val[t] = v;
                    }
                    if let Some((t, v)) = best.1 {
                        a[t] |= 1 << j;
                        val[t] = v;
                    }
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        if self.admissible(&a) {
            Some((self.objective(&a), a))
        } else {
            None
        }
    }
}

pub(super) fn solve(p: &WdpProblem) -> Result<WdpSolution> {
    let e = Engine::new(p)?;
    let n = p.models.n();
    let leaf_depth = e.order.len();
    let deadline = Deadline::after(p.limits.time_limit);
    let node_limit = p.limits.node_limit.unwrap_or(u64::MAX);
    let mut unary = alloc::vec![0.0; e.m];

    let mut incumbent: Option<(f64, Box<[u64]>)> = None;
    let offer = |inc: &mut Option<(f64, Box<[u64]>)>, cand: (f64, Box<[u64]>)| {
        if inc.as_ref().is_none_or(|(v, _)| cand.0 > v + WELFARE_TOL) {
            *inc = Some(cand);
        }
    };
    let threshold = |inc: &Option<(f64, Box<[u64]>)>| inc.as_ref().map_or(f64::NEG_INFINITY, |(v, _)| v + WELFARE_TOL);

    let root_assigned: Box<[u64]> = alloc::vec![0u64; e.members.len()].into();
    if let Some(c) = e.complete(0, &root_assigned) {
        offer(&mut incumbent, c);
    }
    let mut seq = 0u64;
    let mut heap = BinaryHeap::new();
    let mut nodes = 0u64;
    let mut limited = false;
    let mut open_bound = f64::NEG_INFINITY;

    if leaf_depth == 0 {
        if e.admissible(&root_assigned) {
            offer(&mut incumbent, (e.objective(&root_assigned), root_assigned));
        }
    } else {
        let b = e.bound(0, &root_assigned, &mut unary);
        heap.push(Node { bound: b, depth: 0, seq, assigned: root_assigned });
    }

    'outer: while let Some(node) = heap.pop() {
        if node.bound <= threshold(&incumbent) {
            break;
        }
        if nodes >= node_limit || deadline.expired() || heap.len() > MAX_OPEN_NODES {
            open_bound = node.bound;
            limited = true;
            break;
        }
        if let Some(c) = e.complete(node.depth as usize, &node.assigned) {
            offer(&mut incumbent, c);
        }
        let mut cur = node;
        loop {
            nodes += 1;
            let d = cur.depth as usize;
            let j = e.order[d];
            let mut children: Vec<Node> = Vec::with_capacity(e.members.len() + 1);
            for owner in 0..=e.members.len() {
                let mut a = cur.assigned.clone();
                if owner < e.members.len() {
                    a[owner] |= 1 << j;
                }
                if d + 1 == leaf_depth {
                    if e.admissible(&a) {
                        let obj = e.objective(&a);
                        offer(&mut incumbent, (obj, a));
                    }
                    continue;
                }
                let b = e.bound(d + 1, &a, &mut unary);
                if b > threshold(&incumbent) {
                    seq += 1;
                    children.push(Node { bound: b, depth: cur.depth + 1, seq, assigned: a });
                }
            }
            let t = threshold(&incumbent);
            children.retain(|c| c.bound > t);
            if children.is_empty() {
                break;
            }
            children.sort_by(|a, b| b.cmp(a));
            let mut it = children.into_iter();
            let best = it.next().unwrap();
            heap.extend(it);
            if nodes >= node_limit || deadline.expired() {
                open_bound = best.bound;
                heap.push(best);
                limited = true;
                break 'outer;
            }
            cur = best;
        }
    }

    let m = e.m;
    let mut allocation = Allocation::empty(n, m);
    let to_alloc = |a: &[u64], alloc: &mut Allocation| {
        for (t, &i) in e.members.iter().enumerate() {
            alloc.set(i, Bundle::from_bits(m, a[t]));
        }
    };
    if limited {
        let heap_max = heap.peek().map_or(f64::NEG_INFINITY, |n| n.bound);
        let open = open_bound.max(heap_max);
        return Ok(match incumbent {
            Some((obj, a)) => {
                to_alloc(&a, &mut allocation);
                WdpSolution {
                    allocation,
                    objective: obj,
                    bound: open.max(obj),
                    status: SolveStatus::TimeoutFeasible,
                    nodes,
                    empty_fallback: false,
                }
            }
            None => {
                let empty = alloc::vec![0u64; e.members.len()];
                let obj = e.objective(&empty);
                WdpSolution {
                    allocation,
                    objective: obj,
                    bound: open.max(obj),
                    status: SolveStatus::TimeoutFeasible,
                    nodes,
                    empty_fallback: true,
                }
            }
        });
    }
    Ok(match incumbent {
        Some((obj, a)) => {
            to_alloc(&a, &mut allocation);
            WdpSolution { allocation, objective: obj, bound: obj, status: SolveStatus::Optimal, nodes, empty_fallback: false }
        }
        None => WdpSolution {
            allocation,
            objective: 0.0,
            bound: 0.0,
            status: SolveStatus::Infeasible,
            nodes,
            empty_fallback: true,
        },
    })
}
