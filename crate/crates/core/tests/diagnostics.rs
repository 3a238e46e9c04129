use mlca_core::diagnostics::{bound_report, certify_clearing, uniform_error, PriceProfile};
use mlca_core::learning::{train_svr, KernelSpec, LearnedValuation, LearnerSpec};
use mlca_core::mlca::{run_mlca, MlcaConfig};
use mlca_core::valuemodels::{generate_gsvm, BidderStrategy};
use mlca_core::wdp::{oracle_optimum, solve, SolveLimits, WdpModels, WdpProblem};
use mlca_core::{EconomyIndex, ReportSet, Trace};
use mlca_testkit::{random_reports, rng};

#[test]
fn true_values_clear_exactly() {
    for seed in 0..5 {
        let d = generate_gsvm(seed, 6, 3).unwrap();
        let pi = PriceProfile::new(d.bidders.iter().cloned().map(LearnedValuation::Oracle).collect());
        let star = oracle_optimum(&d, &EconomyIndex::main(3), None).unwrap();
        let cert = certify_clearing(&pi, &star.allocation, &d).unwrap();
        assert!(cert.delta.abs() < 1e-9, "{cert:?}");
    }
}

#[test]
fn learned_prices_satisfy_the_subsidy_bound() {
    for seed in 0..10u64 {
        let d = generate_gsvm(seed, 6, 3).unwrap();
        let mut r = rng(seed);
        let models: Vec<LearnedValuation> = (0..3)
            .map(|i| {
                let mut reports = ReportSet::new();
                for rep in random_reports(&mut r, 6, 10, 1.0).iter() {
                    reports.insert(rep.bundle, d.value(i, &rep.bundle)).unwrap();
                }
                LearnedValuation::Svr(train_svr(&reports, 6, KernelSpec::Gaussian { lambda: 6.0 }, 0.5, 100.0).unwrap())
            })
            .collect();
        let wm = WdpModels::new(models.clone(), 6);
        let learned = solve(&WdpProblem::new(&wm, EconomyIndex::main(3)).with_limits(SolveLimits::unlimited())).unwrap();
        let cert = certify_clearing(&PriceProfile::new(models.clone()), &learned.allocation, &d).unwrap();
        let all = uniform_error(&models, &d).unwrap();
        let at_learned = (0..3)
            .map(|i| (models[i].predict(&learned.allocation.bundle(i)) - d.value(i, &learned.allocation.bundle(i))).abs())
            .fold(0.0, f64::max);
        assert!(cert.gamma < 1e-9);
        assert!(cert.delta <= 3.0 * (all + at_learned) + 1e-9);
    }
}

#[test]
fn oracle_runs_have_zero_slack_and_quadratic_runs_positive_slack() {
    let d = generate_gsvm(1, 6, 3).unwrap();
    let cfg = MlcaConfig::new(LearnerSpec::Oracle, 8, 2, 3, 1);
    let out = run_mlca(&d, &vec![BidderStrategy::Truthful; 3], &cfg, &[]).unwrap();
    let Trace::Mlca(t) = &out.trace else { panic!() };
    for rec in bound_report(t, &d).unwrap() {
        assert!(rec.delta1.abs() < 1e-12 && rec.delta2.abs() < 1e-12);
        assert!(rec.eff_loss.abs() < 1e-9);
        assert!(rec.clearing_delta.is_none_or(|x| x.abs() < 1e-9));
    }

    let quad = LearnerSpec::Svr { kernel: KernelSpec::Quadratic { lambda: 0.1 }, epsilon: 0.1, c: 100.0 };
    let cfg = MlcaConfig::new(quad, 12, 3, 3, 1);
    let out = run_mlca(&d, &vec![BidderStrategy::Truthful; 3], &cfg, &[]).unwrap();
    let Trace::Mlca(t) = &out.trace else { panic!() };
    let recs = bound_report(t, &d).unwrap();
    assert!(!recs.is_empty());
    for rec in recs {
        assert!(rec.slack >= -1e-9, "{rec:?}");
        if let (Some(delta), Some(b)) = (rec.clearing_delta, rec.clearing_bound) {
            assert!(delta <= b + 1e-9);
        }
    }
}
