use mlca_core::{Bundle, BundleValueReport, ReportSet};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `l` distinct nonempty bundles with uniform values in `[0, max_value)`.
pub fn random_reports(rng: &mut ChaCha8Rng, m: usize, l: usize, max_value: f64) -> ReportSet {
    let total = (1usize << m) - 1;
    let picks = sample(rng, total, l.min(total));
    let mut r = ReportSet::new();
    for k in picks.iter() {
        let b = Bundle::from_bits(m, k as u64 + 1);
        r.push(BundleValueReport::new(b, rng.random_range(0.0..max_value))).unwrap();
    }
    r
}
