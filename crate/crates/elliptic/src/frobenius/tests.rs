use super::*;
use crate::rootsys::MarkedEllipticRootSystem;
use twofloat::TwoFloat;

fn good_set(t: &str, q: i64) -> (InvariantContext, BasicInvariantSet<TwoFloat>) {
    let sys = MarkedEllipticRootSystem::build(t.parse().unwrap());
    let d = crate::coxeter::hyperbolic_coxeter(&sys).unwrap().d_n;
    let ctx = InvariantContext::new(sys, 1, q, 3 * d).unwrap();
    let xs = BasicInvariantSet::<TwoFloat>::select(&ctx).unwrap();
    let (good, rep) = xs.make_good().unwrap();
    assert!(good.good, "{rep:?}");
    (ctx, good)
}

#[test]
fn g2_frobenius_pipeline() {
    let (ctx, xs) = good_set("G2", 12);
    let main = main_identity(&xs).unwrap();
    eprintln!("{main:?}");
    assert!(main.worst < 1e-7);
    let table = metric_and_constants(&xs).unwrap();
    let pts = sample_x_points(xs.n(), 5, 7, 0.3, 1.0);
    let rep = verify_frobenius(&table, &pts);
    eprintln!("{rep:?}");
    assert!(rep.worst() < 1e-7);
    let (cov, rep2) = scaling_covariance(&table, &crate::exactcore::int(2), &pts).unwrap();
    eprintln!("cov {cov:e} {rep2:?}");
    assert!(cov < 1e-12 && rep2.worst() < 1e-7);
    let exps = intersection_expansions(&xs).unwrap();
    let ypts = ctx.sample_points(5, 3, 0.01, 0.2);
    let fit = expansion_fit_at_points(&ctx, &xs, &exps, &ypts);
    assert!(fit < 1e-8, "pointwise fit {fit:e}");
    let fl = flatness_equivalences(&xs, &xs, 1e-8).unwrap();
    eprintln!("{fl:?}");
    assert!(fl.agree && fl.holds[0] && fl.isometry.unwrap() < 1e-8);
    let bad = flatness_equivalences(&perturb_scaled(&xs), &xs, 1e-8).unwrap();
    eprintln!("{bad:?}");
    assert!(bad.agree && !bad.holds[0]);
    let prod = flatness_equivalences(&perturb_product(&xs), &xs, 1e-8).unwrap();
    eprintln!("{prod:?}");
    assert!(prod.agree);
}

