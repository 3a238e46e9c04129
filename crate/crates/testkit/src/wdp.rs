use mlca_core::{Allocation, Bundle, EconomyIndex, ReportSet};

/// Every assignment of each item to one member or to nobody.
fn for_each_assignment(m: usize, members: &[usize], n: usize, mut f: impl FnMut(&Allocation)) {
    let base = members.len() + 1;
    let total = base.pow(m as u32);
    for code in 0..total {
        let mut bits = vec![0u64; n];
        let mut c = code;
        for j in 0..m {
            let d = c % base;
            c /= base;
            if d > 0 {
                bits[members[d - 1]] |= 1 << j;
            }
        }
        f(&Allocation::new(bits.into_iter().map(|b| Bundle::from_bits(m, b)).collect()));
    }
}

/// Best reported welfare over allocations that only use reported bundles.
pub fn brute_force_report_wdp(reports: &[ReportSet], economy: &EconomyIndex, m: usize) -> f64 {
    let members: Vec<usize> = economy.members().collect();
    let mut best = 0.0f64;
    for_each_assignment(m, &members, reports.len(), |a| {
        let mut w = 0.0;
        for &i in &members {
            match reports[i].get(&a.bundle(i)) {
                Some(v) => w += v,
                None => return,
            }
        }
        best = best.max(w);
    });
    best
}

/// Best `Σ value(i, a_i)` over feasible allocations of the economy that
/// avoid each member's excluded bundles and the blocked items.
pub fn brute_force_learned_wdp(
    value: impl Fn(usize, &Bundle) -> f64,
    economy: &EconomyIndex,
    m: usize,
    exclusions: &[Vec<Bundle>],
    blocked: u64,
) -> Option<(Allocation, f64)> {
    let n = economy.n();
    let members: Vec<usize> = economy.members().collect();
    let mut best: Option<(Allocation, f64)> = None;
    for_each_assignment(m, &members, n, |a| {
        if a.bundles().iter().any(|b| b.bits() & blocked != 0) {
            return;
        }
        if members.iter().any(|&i| exclusions.get(i).is_some_and(|ex| ex.contains(&a.bundle(i)))) {
            return;
        }
        let w: f64 = members.iter().map(|&i| value(i, &a.bundle(i))).sum();
        if best.as_ref().is_none_or(|(_, b)| w > *b) {
            best = Some((a.clone(), w));
        }
    });
    best
}

/// VCG payments on reports by brute force (clamped at zero).
pub fn brute_force_vcg(reports: &[ReportSet], m: usize) -> Vec<f64> {
    let n = reports.len();
    let members: Vec<usize> = (0..n).collect();
    let mut best: Option<(Allocation, f64)> = None;
    for_each_assignment(m, &members, n, |a| {
        let mut w = 0.0;
        for i in 0..n {
            match reports[i].get(&a.bundle(i)) {
                Some(v) => w += v,
                None => return,
            }
        }
        if best.as_ref().is_none_or(|(_, b)| w > *b) {
            best = Some((a.clone(), w));
        }
    });
    let (a, w) = best.unwrap();
    (0..n)
        .map(|i| {
            if n == 1 {
                return 0.0;
            }
            let without = brute_force_report_wdp(reports, &EconomyIndex::marginal(n, i), m);
            let others = w - reports[i].get(&a.bundle(i)).unwrap();
            (without - others).max(0.0)
        })
        .collect()
}
