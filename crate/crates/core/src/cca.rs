//! Combinatorial clock auction baseline: linear item prices raised by 5% on
//! over-demanded items, truthful clock demand, one of three supplementary
//! bidding heuristics, then winner determination and payments on all bids.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bundle::{bit_iter, mask};
use crate::outcome::settle;
use crate::rng::Stream;
use crate::valuemodels::{bundle_profit, true_demand, DomainInstance, MAX_DEMAND_ITEMS};
use crate::{AuctionOutcome, Bundle, Error, PaymentRule, ReportSet, Result, Trace};

pub const RESERVE_SAMPLES: usize = 10_000;
pub const RESERVE_FRACTION: f64 = 0.01;
pub const PRICE_INCREMENT: f64 = 1.05;
pub const MAX_CLOCK_ROUNDS: usize = 1000;
/// Price given to an over-demanded item whose price is still zero.
pub const MIN_PRICE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SupplementaryHeuristic {
    /// No supplementary round; clock bundles bid at their highest quoted price.
    Clock,
    /// True values for every distinct clock bundle.
    ClockRaised,
    /// Clock-raised bids plus the `q` most profitable bundles at final prices.
    ProfitMax { q: usize },
}

impl SupplementaryHeuristic {
    pub fn name(&self) -> &'static str {
        match self {
            SupplementaryHeuristic::Clock => "clock",
            SupplementaryHeuristic::ClockRaised => "clock-raised",
            SupplementaryHeuristic::ProfitMax { .. } => "profit-max",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockState {
    /// Prices quoted in the last round.
    pub prices: Vec<f64>,
    pub round: usize,
    /// Prices quoted in each round.
    pub price_history: Vec<Vec<f64>>,
    /// Demanded bundle per round and bidder.
    pub demand_history: Vec<Vec<Bundle>>,
    /// Per item, demanders beyond the single unit of supply in the last round.
    pub over_demand: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcaTrace {
    pub reserves: Vec<f64>,
    pub clock: ClockState,
    pub heuristic: SupplementaryHeuristic,
}

/// Reserve price per item: 1% of the mean imputed per-item value over
/// seeded samples of (bidder, nonempty bundle). A bundle's value is split
/// equally among its items; each item averages over the samples containing it.
pub fn init_reserve_prices(domain: &DomainInstance) -> Vec<f64> {
    let m = domain.m;
    let mut rng = Stream::new(domain.seed, "cca/reserve", 0);
    let mut sum = alloc::vec![0.0; m];
    let mut count = alloc::vec![0usize; m];
    for _ in 0..RESERVE_SAMPLES {
        let i = rng.below(domain.n as u64) as usize;
        let bits = loop {
            let b = rng.next_u64() & mask(m);
            if b != 0 {
                break b;
            }
        };
        let share = domain.bidders[i].value_bits(bits) / bits.count_ones() as f64;
        for j in bit_iter(bits) {
            sum[j] += share;
            count[j] += 1;
        }
    }
    (0..m).map(|j| if count[j] == 0 { 0.0 } else { RESERVE_FRACTION * sum[j] / count[j] as f64 }).collect()
}

/// Runs the clock until no item is demanded by two or more bidders.
pub fn clock_phase(domain: &DomainInstance, reserves: &[f64]) -> Result<ClockState> {
    let m = domain.m;
    if reserves.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: reserves.len() });
    }
    let mut prices = reserves.to_vec();
    let mut price_history = Vec::new();
    let mut demand_history = Vec::new();
    let mut over_demand = alloc::vec![0; m];
    for _ in 0..MAX_CLOCK_ROUNDS {
        let demands = domain.bidders.iter().map(|v| true_demand(v, &prices)).collect::<Result<Vec<_>>>()?;
        let mut demanders = alloc::vec![0usize; m];
        for d in &demands {
            for j in d.items() {
                demanders[j] += 1;
            }
        }
        over_demand = demanders.iter().map(|&c| c.saturating_sub(1)).collect();
        price_history.push(prices.clone());
        demand_history.push(demands);
        if over_demand.iter().all(|&o| o == 0) {
            break;
        }
        for j in 0..m {
            if over_demand[j] > 0 {
                prices[j] = if prices[j] > 0.0 { prices[j] * PRICE_INCREMENT } else { MIN_PRICE };
            }
        }
    }
    Ok(ClockState {
        prices: price_history.last().cloned().unwrap_or(prices),
        round: price_history.len(),
        price_history,
        demand_history,
        over_demand,
    })
}

/// Distinct nonempty bundles bidder `i` demanded during the clock, in first-demand order.
fn clock_bundles(state: &ClockState, i: usize) -> Vec<Bundle> {
    let mut out: Vec<Bundle> = Vec::new();
    for d in &state.demand_history {
        if !d[i].is_empty() && !out.contains(&d[i]) {
            out.push(d[i]);
        }
    }
    out
}

/// Bid sets after the supplementary round.
pub fn supplementary_bids(
    heuristic: SupplementaryHeuristic,
    state: &ClockState,
    domain: &DomainInstance,
) -> Result<Vec<ReportSet>> {
    let m = domain.m;
    if let SupplementaryHeuristic::ProfitMax { .. } = heuristic {
        if m > MAX_DEMAND_ITEMS {
            return Err(Error::Capability(alloc::format!(
                "profit-max bids enumerate bundles and support at most {MAX_DEMAND_ITEMS} items"
            )));
        }
    }
    let mut out = Vec::with_capacity(domain.n);
    for i in 0..domain.n {
        let v = &domain.bidders[i];
        let mut bids = ReportSet::new();
        for x in clock_bundles(state, i) {
            let value = match heuristic {
                SupplementaryHeuristic::Clock => state
                    .demand_history
                    .iter()
                    .zip(&state.price_history)
                    .filter(|(d, _)| d[i] == x)
                    .map(|(_, p)| x.items().map(|j| p[j]).sum::<f64>())
                    .fold(0.0, f64::max),
                _ => v.value(&x),
            };
            bids.insert(x, value)?;
        }
        if let SupplementaryHeuristic::ProfitMax { q } = heuristic {
            let mut ranked: Vec<(f64, u64)> =
                (1..1u64 << m).map(|b| (bundle_profit(v, b, &state.prices), b)).collect();
            ranked.sort_by(|a, b| {
                b.0.total_cmp(&a.0).then(crate::bundle::lex_key(a.1, m).cmp(&crate::bundle::lex_key(b.1, m)))
            });
            for &(_, b) in ranked.iter().take(q) {
                let x = Bundle::from_bits(m, b);
                if !bids.contains(&x) {
                    bids.insert(x, v.value(&x))?;
                }
            }
        }
        out.push(bids);
    }
    Ok(out)
}

pub fn run_cca(
    domain: &DomainInstance,
    heuristic: SupplementaryHeuristic,
    payment_rule: PaymentRule,
) -> Result<AuctionOutcome> {
    let reserves = init_reserve_prices(domain);
    let clock = clock_phase(domain, &reserves)?;
    let reports = supplementary_bids(heuristic, &clock, domain)?;
    let (allocation, payments) = settle(&reports, domain.m, payment_rule)?;
    let supplementary = usize::from(heuristic != SupplementaryHeuristic::Clock);
    Ok(AuctionOutcome {
        allocation,
        payments,
        payment_rule,
        rounds: clock.round + supplementary,
        reports,
        trace: Trace::Cca(CcaTrace { reserves, clock, heuristic }),
    })
}
