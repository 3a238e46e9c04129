//! Summary statistics and the one-way ANOVA F-test.

use statrs::distribution::{ContinuousCDF, FisherSnedecor};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation divided by `√k`; zero for fewer than two samples.
pub fn std_err(xs: &[f64]) -> f64 {
    let k = xs.len();
    if k < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (k - 1) as f64;
    (var / k as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Anova {
    pub f: f64,
    pub p: f64,
    pub df_between: usize,
    pub df_within: usize,
}

/// Classic one-way ANOVA across groups. Identical groups with no spread give
/// `p = 1`; groups that differ with no spread inside give `p = 0`.
pub fn one_way_anova(groups: &[Vec<f64>]) -> Anova {
    let k = groups.len();
    let total: usize = groups.iter().map(Vec::len).sum();
    let df_between = k.saturating_sub(1);
    let df_within = total.saturating_sub(k);
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let grand = mean(&all);
    let ss_between: f64 = groups.iter().map(|g| g.len() as f64 * (mean(g) - grand).powi(2)).sum();
    let ss_within: f64 = groups.iter().map(|g| {
        let mu = mean(g);
        g.iter().map(|x| (x - mu).powi(2)).sum::<f64>()
    }).sum();
    let scale = all.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let tiny = 1e-24 * scale * scale * total.max(1) as f64;
    if df_between == 0 || df_within == 0 || ss_within <= tiny {
        let p = if ss_between <= tiny { 1.0 } else { 0.0 };
        return Anova { f: if p == 1.0 { 0.0 } else { f64::INFINITY }, p, df_between, df_within };
    }
    let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
    let dist = FisherSnedecor::new(df_between as f64, df_within as f64).expect("positive degrees of freedom");
    Anova { f, p: dist.sf(f), df_between, df_within }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anova_matches_reference_values() {
        // reference F and p from an independent statistics package
        let g = vec![
            vec![6.0, 8.0, 4.0, 5.0, 3.0],
            vec![8.0, 12.0, 9.0, 11.0, 6.0],
            vec![13.0, 9.0, 11.0, 8.0, 7.0],
        ];
        let a = one_way_anova(&g);
        assert!((a.f - 5.842105263157896).abs() < 1e-9);
        assert!((a.p - 0.01691741485440876).abs() < 1e-9, "{}", a.p);
        assert_eq!((a.df_between, a.df_within), (2, 12));
    }

    #[test]
    fn degenerate_groups() {
        assert_eq!(one_way_anova(&[vec![1.0, 1.0], vec![1.0, 1.0]]).p, 1.0);
        assert_eq!(one_way_anova(&[vec![1.0, 1.0], vec![2.0, 2.0]]).p, 0.0);
    }

    #[test]
    fn standard_error() {
        assert!((std_err(&[1.0, 2.0, 3.0, 4.0]) - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(std_err(&[2.0]), 0.0);
    }
}
