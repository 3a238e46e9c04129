use alloc::vec::Vec;

use super::{SolveStatus, WdpProblem, WdpSolution};
use crate::{Allocation, Bundle, Error, Result, WELFARE_TOL};

/// Largest number of assignments the enumeration solver will visit.
pub const MAX_ENUMERATION_STATES: f64 = 1e8;

struct Enum<'p, 'a> {
    p: &'p WdpProblem<'a>,
    m: usize,
    items: Vec<usize>,
    members: Vec<usize>,
    tables: Option<Vec<Vec<f64>>>,
    excluded: Vec<Vec<u64>>,
    assigned: Vec<u64>,
    best: Option<(f64, Vec<u64>)>,
}

impl Enum<'_, '_> {
    fn value(&self, t: usize, bits: u64) -> f64 {
        match &self.tables {
            Some(tab) => tab[t][bits as usize],
            None => self.p.models.models()[self.members[t]].predict(&Bundle::from_bits(self.m, bits)),
        }
    }

    fn leaf(&mut self) {
        for (t, ex) in self.excluded.iter().enumerate() {
            if ex.binary_search(&self.assigned[t]).is_ok() {
                return;
            }
        }
        let obj: f64 = (0..self.members.len()).map(|t| self.value(t, self.assigned[t])).sum();
        let better = match &self.best {
            None => true,
            Some((b, bits)) => {
                obj > b + WELFARE_TOL || (obj >= b - WELFARE_TOL && self.lex_less(&self.assigned, bits))
            }
        };
        if better {
            self.best = Some((obj, self.assigned.clone()));
        }
    }

    fn lex_less(&self, a: &[u64], b: &[u64]) -> bool {
        for (x, y) in a.iter().zip(b) {
            let (kx, ky) = (crate::bundle::lex_key(*x, self.m), crate::bundle::lex_key(*y, self.m));
            if kx != ky {
                return kx < ky;
            }
        }
        false
    }

    fn dfs(&mut self, d: usize) {
        if d == self.items.len() {
            self.leaf();
            return;
        }
        let j = self.items[d];
        self.dfs(d + 1);
        for t in 0..self.members.len() {
            self.assigned[t] |= 1 << j;
            self.dfs(d + 1);
            self.assigned[t] &= !(1 << j);
        }
    }
}

pub(super) fn solve(p: &WdpProblem) -> Result<WdpSolution> {
    let m = p.models.m();
    let n = p.models.n();
    let members: Vec<usize> = p.economy.members().collect();
    let available = crate::bundle::mask(m) & !p.blocked;
    let items: Vec<usize> = crate::bundle::bit_iter(available).collect();
    let states = libm::pow(members.len() as f64 + 1.0, items.len() as f64);
    if states > MAX_ENUMERATION_STATES {
        return Err(Error::Capability(alloc::format!(
            "enumeration over {states:.0} assignments exceeds {MAX_ENUMERATION_STATES:.0}"
        )));
    }
    let tables = (m <= 16).then(|| {
        members
            .iter()
            .map(|&i| {
                let model = &p.models.models()[i];
                (0..1u64 << m).map(|b| model.predict(&Bundle::from_bits(m, b))).collect()
            })
            .collect()
    });
    let mut e = Enum {
        p,
        m,
        items,
        excluded: members.iter().map(|&i| p.excluded_masks(i)).collect(),
        assigned: alloc::vec![0; members.len()],
        members,
        tables,
        best: None,
    };
    e.dfs(0);
    let mut allocation = Allocation::empty(n, m);
    Ok(match e.best {
        Some((obj, bits)) => {
            for (t, &i) in e.members.iter().enumerate() {
                allocation.set(i, Bundle::from_bits(m, bits[t]));
            }
            WdpSolution {
                allocation,
                objective: obj,
                bound: obj,
                status: SolveStatus::Optimal,
                nodes: states as u64,
                empty_fallback: false,
            }
        }
        None => WdpSolution {
            allocation,
            objective: 0.0,
            bound: 0.0,
            status: SolveStatus::Infeasible,
            nodes: states as u64,
            empty_fallback: true,
        },
    })
}
