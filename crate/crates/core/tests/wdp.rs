use mlca_core::learning::{train_linear, train_svr, KernelSpec, LearnedValuation};
use mlca_core::valuemodels::{generate_gsvm, generate_twowise};
use mlca_core::wdp::{oracle_optimum, solve, solve_enumeration, to_lp_format, SolveLimits, SolveStatus, WdpModels, WdpProblem};
use mlca_core::{Bundle, EconomyIndex};
use mlca_testkit::rand::Rng;
use mlca_testkit::{brute_force_learned_wdp, random_reports, rng};
use proptest::prelude::*;

fn random_models(seed: u64, m: usize, n: usize, kernel: Option<KernelSpec>) -> WdpModels {
    let mut r = rng(seed);
    let models = (0..n)
        .map(|_| {
            let l = r.random_range(1..=5usize.min((1 << m) - 1));
            let reports = random_reports(&mut r, m, l, 10.0);
            match kernel {
                None => LearnedValuation::Linear(train_linear(&reports, m, 2.0).unwrap()),
                Some(k) => LearnedValuation::Svr(train_svr(&reports, m, k, 0.5, 20.0).unwrap()),
            }
        })
        .collect();
    WdpModels::new(models, m)
}

fn check(models: &WdpModels, economy: EconomyIndex, exclusions: Vec<Vec<Bundle>>, blocked: Option<Bundle>) {
    let m = models.m();
    let mut p = WdpProblem::new(models, economy).with_limits(SolveLimits::unlimited()).with_exclusions(exclusions.clone());
    if let Some(b) = blocked {
        p = p.with_blocked(b);
    }
    let sol = solve(&p).unwrap();
    let oracle = brute_force_learned_wdp(
        |i, x| models.models()[i].predict(x),
        &economy,
        m,
        &exclusions,
        blocked.map_or(0, |b| b.bits()),
    );
    match oracle {
        None => assert_eq!(sol.status, SolveStatus::Infeasible),
        Some((_, best)) => {
            assert_eq!(sol.status, SolveStatus::Optimal);
            assert!((sol.objective - best).abs() < 1e-6, "{} vs {best}", sol.objective);
            assert!(!p.violates_exclusions(&sol.allocation));
            assert!(sol.allocation.is_feasible());
            assert!((p.learned_welfare(&sol.allocation) - sol.objective).abs() < 1e-9);
            assert!(sol.bound >= sol.objective - 1e-9);
        }
    }
}

#[test]
fn solvers_match_enumeration_for_every_encoding() {
    for seed in 0..40u64 {
        let m = 2 + (seed % 5) as usize;
        let n = 1 + (seed % 3) as usize;
        for kernel in [
            None,
            Some(KernelSpec::Linear),
            Some(KernelSpec::Quadratic { lambda: 0.2 }),
            Some(KernelSpec::Exponential { lambda: m as f64 }),
            Some(KernelSpec::Gaussian { lambda: m as f64 }),
        ] {
            let models = random_models(seed, m, n, kernel);
            check(&models, EconomyIndex::main(n), vec![], None);
            let mut r = rng(seed + 1000);
            let exclusions: Vec<Vec<Bundle>> = (0..n)
                .map(|_| (0..3).map(|_| Bundle::from_bits(m, r.random_range(0..1u64 << m))).collect())
                .collect();
            check(&models, EconomyIndex::main(n), exclusions, None);
            if n > 1 {
                check(&models, EconomyIndex::marginal(n, 0), vec![], Some(Bundle::from_bits(m, 1)));
            }
        }
    }
}

#[test]
fn excluding_everything_is_infeasible() {
    let models = random_models(3, 2, 1, Some(KernelSpec::Quadratic { lambda: 0.1 }));
    let all: Vec<Bundle> = Bundle::all(2).collect();
    let p = WdpProblem::new(&models, EconomyIndex::main(1)).with_exclusions(vec![all]);
    assert_eq!(solve(&p).unwrap().status, SolveStatus::Infeasible);
    assert_eq!(solve_enumeration(&p).unwrap().status, SolveStatus::Infeasible);
}

#[test]
fn oracle_models_on_generated_domains() {
    for seed in 0..5 {
        for d in [generate_gsvm(seed, 6, 3).unwrap(), generate_twowise(seed, 6, 3).unwrap()] {
            let models = WdpModels::oracle(&d);
            check(&models, EconomyIndex::main(3), vec![], None);
            let opt = oracle_optimum(&d, &EconomyIndex::main(3), None).unwrap();
            let brute = brute_force_learned_wdp(|i, x| d.value(i, x), &EconomyIndex::main(3), 6, &[], 0).unwrap();
            assert!((opt.objective - brute.1).abs() < 1e-9);
        }
    }
}

#[test]
fn lp_export_declares_every_assignment_variable() {
    let models = random_models(9, 3, 2, Some(KernelSpec::Quadratic { lambda: 0.1 }));
    let p = WdpProblem::new(&models, EconomyIndex::main(2)).with_exclusions(vec![vec![Bundle::parse("110").unwrap()], vec![]]);
    let lp = to_lp_format(&p).unwrap();
    assert!(lp.starts_with("\\") || lp.contains("Maximize"));
    for i in 0..2 {
        for j in 0..3 {
            assert!(lp.contains(&format!("a_{i}_{j}")));
        }
    }
    assert!(lp.contains("Binar"));
    assert!(lp.trim_end().ends_with("End"));
}

#[test]
fn node_limit_reports_a_valid_incumbent() {
    let d = generate_gsvm(4, 10, 4).unwrap();
    let models = WdpModels::oracle(&d);
    let p = WdpProblem::new(&models, EconomyIndex::main(4)).with_limits(SolveLimits { time_limit: None, node_limit: Some(3) });
    let sol = solve(&p).unwrap();
    assert!(sol.allocation.is_feasible());
    assert!(sol.bound >= sol.objective - 1e-9);
    let (gap, _) = sol.gap();
    assert!(gap >= 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn quadratic_svr_wdp_matches_brute_force(seed in 0u64..10_000, m in 2usize..6, n in 1usize..4) {
        let models = random_models(seed, m, n, Some(KernelSpec::Quadratic { lambda: 0.3 }));
        check(&models, EconomyIndex::main(n), vec![], None);
    }

    #[test]
    fn gaussian_svr_wdp_matches_brute_force(seed in 0u64..10_000, m in 2usize..6, n in 1usize..4) {
        let models = random_models(seed, m, n, Some(KernelSpec::Gaussian { lambda: 2.0 }));
        check(&models, EconomyIndex::main(n), vec![], None);
    }
}
