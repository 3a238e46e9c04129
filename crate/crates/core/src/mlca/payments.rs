use alloc::vec::Vec;

use crate::bundle::bit_iter;
use crate::{vcg_payments_on_reports, wdp_over_reports, EconomyIndex, Error, Payments, ReportSet, Result};

/// Coalitions are enumerated explicitly, so the rule is limited to this many bidders.
pub const MAX_CORE_BIDDERS: usize = 8;

/// VCG-nearest payments: the Euclidean projection of the VCG payments onto
/// the core polytope revealed by the reports,
///
/// `Σ_{i∉C} p_i ≥ W(C) - Σ_{i∈C} v̂_i(a_i)` for every coalition `C`, and
/// `0 ≤ p_i ≤ v̂_i(a_i)`,
///
/// computed with Hildreth's dual coordinate-ascent projection.
pub fn vcg_nearest_payments(reports: &[ReportSet], m: usize) -> Result<Payments> {
    let n = reports.len();
    if n > MAX_CORE_BIDDERS {
        return Err(Error::Capability(alloc::format!(
            "core payments enumerate coalitions and support at most {MAX_CORE_BIDDERS} bidders"
        )));
    }
    let vcg = vcg_payments_on_reports(reports, m);
    if n <= 1 {
        return Ok(vcg.payments);
    }
    let bids: Vec<f64> = (0..n).map(|i| reports[i].get(&vcg.allocation.bundle(i)).unwrap_or(0.0)).collect();
    let members = |c: u64| EconomyIndex::from_members(n, bit_iter(c)).expect("coalition within range");
    let p = nearest_core_point(&vcg.payments.0, &bids, |c| wdp_over_reports(reports, &members(c), m).welfare)?;
    Ok(Payments(p))
}

/// Projects `vcg` onto `Σ_{i∉C} p_i ≥ W(C) - Σ_{i∈C} bids_i` for every
/// proper coalition `C` (given as a bitmask to `welfare`) and
/// `0 ≤ p_i ≤ bids_i`, with Hildreth's dual coordinate ascent.
pub fn nearest_core_point(vcg: &[f64], bids: &[f64], mut welfare: impl FnMut(u64) -> f64) -> Result<Vec<f64>> {
    let n = bids.len();
    if n > MAX_CORE_BIDDERS {
        return Err(Error::Capability(alloc::format!(
            "core payments enumerate coalitions and support at most {MAX_CORE_BIDDERS} bidders"
        )));
    }
    if vcg.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: vcg.len() });
    }
    // rows g·p ≥ h, with g = sign · indicator(mask)
    let mut rows: Vec<(u64, f64, f64)> = Vec::new();
    let full = if n == 0 { 0 } else { (1u64 << n) - 1 };
    for c in 1..full {
        let inside: f64 = bit_iter(c).map(|i| bids[i]).sum();
        let h = welfare(c) - inside;
        if h > 0.0 {
            rows.push((full & !c, 1.0, h));
        }
    }
    for i in 0..n {
        rows.push((1 << i, 1.0, 0.0));
        rows.push((1 << i, -1.0, -bids[i]));
    }

    let mut p = vcg.to_vec();
    let mut lambda = alloc::vec![0.0; rows.len()];
    for _sweep in 0..1_000_000 {
        let mut change = 0.0f64;
        for (r, &(mask, sign, h)) in rows.iter().enumerate() {
            let gp: f64 = sign * bit_iter(mask).map(|i| p[i]).sum::<f64>();
            let new = (lambda[r] + (h - gp) / mask.count_ones() as f64).max(0.0);
            let d = new - lambda[r];
            if d != 0.0 {
                lambda[r] = new;
                for i in bit_iter(mask) {
                    p[i] += sign * d;
                }
                change = change.max(d.abs());
            }
        }
        if change < 1e-14 {
            break;
        }
    }
    for i in 0..n {
        p[i] = p[i].clamp(0.0, bids[i]);
    }
    Ok(p)
}
