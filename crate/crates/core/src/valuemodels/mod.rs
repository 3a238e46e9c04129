//! True bidder value models, domain generators, demand and bidding strategies.

mod demand;
mod domain;
mod strategy;
mod valuation;

pub use demand::{bundle_profit, true_demand, MAX_DEMAND_ITEMS};
pub use domain::{generate_gsvm, generate_twowise, DomainInstance, GeneratorKind};
pub use strategy::{answer_query, BidderStrategy};
pub use valuation::{
    gsvm_value, BidderValuation, GsvmBidder, GsvmRole, QuadraticForm, TableValuation, TwoWiseBidder,
};
