//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//! Runs without the libtest harness so the lines always reach stdout.

use elliptic::coxeter::{hyperbolic_coxeter, CoxeterData};
use elliptic::exactcore::int;
use elliptic::frobenius::{
    expansion_fit_at_points, flatness_equivalences, intersection_expansions, main_identity_with, metric_and_constants_from, perturb_product,
    perturb_scaled, sample_x_points, scaling_covariance, verify_frobenius, FrobeniusTable, InvariantExpansion,
};
use elliptic::invariants::{span_dimension, BasicInvariantSet, GoodnessReport, InvariantContext, ThetaInvariant};
use elliptic::rootsys::MarkedEllipticRootSystem;
use elliptic::triplet::standard_triplet;
use elliptic::DoubleDouble;
use std::time::{Duration, Instant};

const Q: i64 = 20;
const Q_HI: i64 = 25;
const SEED: u64 = 1;

fn sys(t: &str) -> MarkedEllipticRootSystem {
    MarkedEllipticRootSystem::build(t.parse().unwrap())
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

struct Line {
    ok: bool,
    text: String,
}

fn line(ok: bool, text: impl Into<String>) -> Line {
    Line { ok, text: text.into() }
}

struct Pipeline {
    ctx: InvariantContext,
    xs: BasicInvariantSet<DoubleDouble>,
    report: GoodnessReport,
    exps: Vec<Vec<InvariantExpansion<DoubleDouble>>>,
    table: FrobeniusTable<DoubleDouble>,
    elapsed: Duration,
}

fn pipeline(t: &str, q: i64) -> Pipeline {
    let t0 = Instant::now();
    let s = sys(t);
    let d_n = hyperbolic_coxeter(&s).unwrap().d_n;
    let ctx = InvariantContext::new(s, SEED, q, 3 * d_n).unwrap();
    let (xs, report) = BasicInvariantSet::<DoubleDouble>::select(&ctx).unwrap().make_good().unwrap();
    let exps = intersection_expansions(&xs).unwrap();
    let table = metric_and_constants_from(&xs, &exps, &int(1)).unwrap();
    Pipeline { ctx, xs, report, exps, table, elapsed: t0.elapsed() }
}

fn c1() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in ["A1", "G2", "D4", "F4"] {
        let t0 = Instant::now();
        let s = sys(t);
        let ax = s.axioms_check();
        let dt = t0.elapsed();
        let pass = ax.all_pass(s.n()) && dt < Duration::from_secs(1);
        ok &= pass;
        parts.push(format!("{t} {} {}", if pass { "ok" } else { "bad" }, secs(dt)));
    }
    line(ok, format!("exact root system axioms, under 1 s each: {}", parts.join(", ")))
}

fn coxeter(t: &str) -> (CoxeterData, Duration) {
    let t0 = Instant::now();
    let d = hyperbolic_coxeter(&sys(t)).unwrap();
    (d, t0.elapsed())
}

fn c2() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in ["A1", "G2", "D4", "F4"] {
        let (d, dt) = coxeter(t);
        let pass = d.checks.all() && (t != "D4" || dt < Duration::from_secs(10));
        ok &= pass;
        parts.push(format!("{t} d_n={} codim={} {}", d.d_n, d.codim, secs(dt)));
    }
    line(ok, format!("hyperbolic Coxeter element checks (D4 under 10 s): {}", parts.join(", ")))
}

fn c3() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in ["A1", "G2", "D4", "F4"] {
        let (d, _) = coxeter(t);
        let shift = &d.unip_shift * int(d.d_n.into());
        let pass = d.jordan_commutes() && d.ss_spectrum_matches() && (shift == int(1) || shift == int(-1));
        ok &= pass;
        parts.push(format!("{t} {}", if pass { "ok" } else { "bad" }));
    }
    line(ok, format!("Jordan decomposition, zeta eigenvalues and unipotent shift: {}", parts.join(", ")))
}

fn c4() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in ["A1", "G2", "D4"] {
        let s = sys(t);
        let d = hyperbolic_coxeter(&s).unwrap();
        let n = s.n();
        for (r, want) in [(-1, (n - 1, 0, 1)), (0, (n - 1, 1, 0)), (1, (n, 0, 0))] {
            let pass = match standard_triplet(&s, &d, &int(r), SEED) {
                Ok(tr) => tr.report.all() && tr.eigen_relations_hold() && tr.signature == want,
                Err(_) => false,
            };
            ok &= pass;
            if !pass {
                parts.push(format!("{t} r={r} bad"));
            }
        }
    }
    line(ok, format!("admissible triplets for r = -1, 0, 1 with signatures (n-1,0,1), (n-1,1,0), (n,0,0) on A1 G2 D4 {}", parts.join(" ")))
}

fn c5() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in ["A1", "G2", "D4", "F4"] {
        let ctx = InvariantContext::new(sys(t), SEED, 8, 2).unwrap();
        let top = ctx.d_n().max(3);
        let counts: Vec<String> = (1..=top)
            .map(|m| match span_dimension(&ctx, m) {
                Ok(k) => k.to_string(),
                Err(e) => {
                    ok = false;
                    e.to_string()
                }
            })
            .collect();
        parts.push(format!("{t} [{}]", counts.join(" ")));
    }
    line(ok, format!("alcove weight counts equal monomial counts for m <= max(3, d_n): {}", parts.join(", ")))
}

fn c6(q: i64) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in ["G2", "D4"] {
        let s = sys(t);
        let d_n = hyperbolic_coxeter(&s).unwrap().d_n;
        let ctx = InvariantContext::new(s, SEED, q, 2).unwrap();
        let pts = ctx.sample_points(5, SEED, 0.3, 0.2);
        let (mut inv, mut unip) = (0.0f64, 0.0f64);
        for m in 1..=d_n {
            for k in ctx.alcove_weights(m) {
                let f = ThetaInvariant::orbit(&ctx, &k, m).unwrap();
                inv = inv.max(f.invariance_residual(&ctx, &pts).unwrap());
                unip = unip.max(f.unipotent_residual(&ctx, &pts));
            }
        }
        ok &= inv < 1e-8 && unip < 1e-8;
        parts.push(format!("{t} W {inv:.1e} unip {unip:.1e}"));
    }
    line(ok, format!("theta W-invariance and unipotent residual < 1e-8 (q{q}, f64, 5 points): {}", parts.join(", ")))
}

fn c7(ps: &[(&str, &Pipeline)]) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, p) in ps {
        let top = 2 * p.ctx.d_n();
        let inv = (1..=top).all(|m| p.xs.psi_invertible(m));
        let r = &p.report;
        let worst = [r.goodness, r.compatibility, r.delta_property, r.z0_property].into_iter().fold(0.0, f64::max);
        ok &= inv && p.xs.good && p.xs.compatible && worst < 1e-8;
        parts.push(format!("{t} psi<= {top} {}, worst {worst:.1e}", if inv { "invertible" } else { "singular" }));
    }
    line(ok, format!("psi invertible, goodness, compatibility, delta and z^0 properties < 1e-8: {}", parts.join(", ")))
}

fn c8(ps: &[(&str, &Pipeline)]) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, p) in ps {
        let top = p.report.top_restriction.unwrap_or(f64::INFINITY);
        let good = flatness_equivalences(&p.xs, &p.xs, 1e-8).unwrap();
        let scaled = flatness_equivalences(&perturb_scaled(&p.xs), &p.xs, 1e-8).unwrap();
        let prod = flatness_equivalences(&perturb_product(&p.xs), &p.xs, 1e-8).unwrap();
        let pass = top < 1e-8
            && good.agree
            && good.holds.iter().all(|&h| h)
            && scaled.agree
            && scaled.holds.iter().all(|&h| !h)
            && prod.agree
            && prod.holds.iter().all(|&h| h);
        ok &= pass;
        parts.push(format!("{t} x^n {top:.1e} flat {:?}", good.holds));
    }
    line(ok, format!("x^n on L-perp = -2 pi i/d_n; flatness conditions hold and agree, controls agree: {}", parts.join(", ")))
}

fn c9(ps: &[(&str, &Pipeline)]) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, p) in ps {
        let main = main_identity_with(&p.xs, &p.exps);
        let pts = p.ctx.sample_points(5, SEED, 0.01, 0.2);
        let fit = expansion_fit_at_points(&p.ctx, &p.xs, &p.exps, &pts);
        let fast = *t != "D4" || p.ctx.q_order != Q || p.elapsed < Duration::from_secs(600);
        ok &= main.worst < 1e-7 && main.fit_residual < 1e-7 && fit < 1e-7 && fast;
        parts.push(format!("{t} main {:.1e} pointwise {fit:.1e} ({})", main.worst, secs(p.elapsed)));
    }
    line(ok, format!("main identity < 1e-7 at q{} (D4 under 10 min): {}", ps[0].1.ctx.q_order, parts.join(", ")))
}

fn c10(ps: &[(&str, &Pipeline)]) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, p) in ps {
        let pts = sample_x_points(p.xs.n(), 5, SEED, 0.3, 0.2);
        let rep = verify_frobenius(&p.table, &pts);
        let (cov, rep2) = scaling_covariance(&p.table, &int(2), &pts).unwrap();
        ok &= rep.metric < 1e-8 && rep.worst() < 1e-7 && cov < 1e-7 && rep2.worst() < 1e-7;
        parts.push(format!("{t} axioms {:.1e} scaling {cov:.1e}", rep.worst()));
    }
    line(ok, format!("Frobenius axioms < 1e-7 at 5 points and scaling covariance: {}", parts.join(", ")))
}

fn c11(ps: &[(&str, &Pipeline)]) -> Line {
    let his: Vec<Pipeline> = ps.iter().map(|(t, _)| pipeline(t, Q_HI)).collect();
    let hs: Vec<(&str, &Pipeline)> = ps.iter().map(|p| p.0).zip(&his).collect();
    // Criteria 6-10 again at the higher order.
    let rerun = [c6(Q_HI), c7(&hs), c8(&hs), c9(&hs), c10(&hs)];
    let mut ok = rerun.iter().all(|l| l.ok);
    let mut parts: Vec<String> = rerun.iter().zip(6..).filter(|(l, _)| !l.ok).map(|(l, n)| format!("criterion {n} fails at q{Q_HI}: {}", l.text)).collect();
    for ((t, p), hi) in ps.iter().zip(&his) {
        let jets = p.xs.jets.iter().zip(&hi.xs.jets).map(|(a, b)| a.drift(b)).fold(0.0, f64::max);
        let exps = p.exps.iter().flatten().zip(hi.exps.iter().flatten()).map(|(a, b)| a.coeffs.drift(&b.coeffs)).fold(0.0, f64::max);
        let consts = p
            .table
            .constants
            .iter()
            .flatten()
            .flatten()
            .zip(hi.table.constants.iter().flatten().flatten())
            .map(|(a, b)| a.drift(b))
            .fold(0.0, f64::max);
        let worst = jets.max(exps).max(consts);
        ok &= worst < 1e-8 && p.table.metric == hi.table.metric;
        parts.push(format!("{t} drift {worst:.1e} ({})", secs(hi.elapsed)));
    }
    line(ok, format!("criteria 6-10 re-run at q{Q_HI} pass and coefficients move by < 1e-8: {}", parts.join(", ")))
}

fn main() {
    // `cargo test -- --list` and filters from libtest are not supported; a filter that
    // does not name this suite skips it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let mut lines = Vec::new();
    let mut report = |n: usize, l: Line| {
        println!("criterion {n:>2}: {} {}", if l.ok { "PASS" } else { "FAIL" }, l.text);
        lines.push(l.ok);
    };
    report(1, c1());
    report(2, c2());
    report(3, c3());
    report(4, c4());
    report(5, c5());
    report(6, c6(Q));
    let g2 = pipeline("G2", Q);
    let d4 = pipeline("D4", Q);
    let ps = [("G2", &g2), ("D4", &d4)];
    report(7, c7(&ps));
    report(8, c8(&ps));
    report(9, c9(&ps));
    report(10, c10(&ps));
    report(11, c11(&ps));
    let failed = lines.iter().filter(|&&ok| !ok).count();
    println!("acceptance: {} criteria, {failed} failed", lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
