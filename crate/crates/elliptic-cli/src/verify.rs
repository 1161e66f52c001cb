//! The `verify` suite: every checkable property of the configured system, each reported
//! as PASS/FAIL with its residual.

use crate::cache::{context, good_set};
use crate::config::RunConfig;
use crate::json::residual;
use crate::CliError;
use elliptic::coxeter::hyperbolic_coxeter;
use elliptic::exactcore::int;
use elliptic::frobenius::{
    expansion_fit_at_points, flatness_equivalences, intersection_expansions, main_identity_with, metric_and_constants_from, perturb_product,
    perturb_scaled, sample_x_points, scaling_covariance, verify_frobenius, FrobeniusTable, InvariantExpansion,
};
use elliptic::invariants::{span_dimension, BasicInvariantSet, InvariantContext, ThetaInvariant};
use elliptic::rootsys::MarkedEllipticRootSystem;
use elliptic::series::Scalar;
use elliptic::triplet::standard_triplet;
use serde_json::{json, Value};
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub enum Outcome {
    Flag(bool),
    /// Residual against a bound: passes when value < bound.
    Residual { value: f64, bound: f64 },
    Error(String),
    Skipped(String),
}

impl Outcome {
    pub fn passed(&self) -> bool {
        match self {
            Outcome::Flag(b) => *b,
            Outcome::Residual { value, bound } => *value < *bound,
            Outcome::Error(_) => false,
            Outcome::Skipped(_) => true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct Suite {
    pub label: String,
    pub checks: Vec<Check>,
}

impl Suite {
    fn flag(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), outcome: Outcome::Flag(ok), detail: detail.into() });
    }

    fn residual(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.checks.push(Check { name: name.into(), outcome: Outcome::Residual { value, bound }, detail: String::new() });
    }

    fn error(&mut self, name: impl Into<String>, e: impl std::fmt::Display) {
        self.checks.push(Check { name: name.into(), outcome: Outcome::Error(e.to_string()), detail: String::new() });
    }

    fn skip(&mut self, name: impl Into<String>, why: impl Into<String>) {
        self.checks.push(Check { name: name.into(), outcome: Outcome::Skipped(why.into()), detail: String::new() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome.passed())
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.outcome.passed()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = match &c.outcome {
                Outcome::Skipped(_) => "SKIP",
                o if o.passed() => "PASS",
                _ => "FAIL",
            };
            let val = match &c.outcome {
                Outcome::Flag(_) => String::new(),
                Outcome::Residual { value, bound } => format!("{value:.3e} (< {bound:.0e})"),
                Outcome::Error(e) => format!("error: {e}"),
                Outcome::Skipped(w) => w.clone(),
            };
            let extra = if c.detail.is_empty() { String::new() } else { format!(" [{}]", c.detail) };
            let _ = writeln!(s, "{tag} {:<42} {val}{extra}", c.name);
        }
        let failed = self.failures().len();
        let _ = writeln!(s, "{}: {} checks, {} failed", self.label, self.checks.len(), failed);
        s
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut v = json!({ "name": c.name, "pass": c.outcome.passed() });
                match &c.outcome {
                    Outcome::Flag(b) => v["value"] = json!(b),
                    Outcome::Residual { value, bound } => {
                        v["residual"] = residual(*value);
                        v["bound"] = json!(bound);
                    }
                    Outcome::Error(e) => v["error"] = json!(e),
                    Outcome::Skipped(w) => v["skipped"] = json!(w),
                }
                if !c.detail.is_empty() {
                    v["detail"] = json!(c.detail);
                }
                v
            })
            .collect();
        json!({ "label": self.label, "passed": self.passed(), "checks": checks })
    }
}

/// Data of one full pipeline run at a given q-order, kept for the drift comparison.
struct Pipeline<T: Scalar> {
    xs: BasicInvariantSet<T>,
    exps: Vec<Vec<InvariantExpansion<T>>>,
    table: FrobeniusTable<T>,
}

fn pipeline<T: Scalar>(cfg: &RunConfig, q_order: i64) -> Result<Pipeline<T>, CliError> {
    let ctx = context(cfg, q_order)?;
    let (xs, _, _) = good_set::<T>(cfg, &ctx)?;
    let exps = intersection_expansions(&xs).map_err(|e| CliError::failed("frobenius", e))?;
    let table = metric_and_constants_from(&xs, &exps, &int(1)).map_err(|e| CliError::failed("frobenius", e))?;
    Ok(Pipeline { xs, exps, table })
}

fn exact_checks(cfg: &RunConfig, s: &mut Suite) {
    let sys = MarkedEllipticRootSystem::build(cfg.cartan);
    let ax = sys.axioms_check();
    s.flag("root system axioms", ax.all_pass(sys.n()), ax.violations().join(", "));
    let d = match hyperbolic_coxeter(&sys) {
        Ok(d) => d,
        Err(e) => return s.error("hyperbolic Coxeter element", e),
    };
    let ch = &d.checks;
    s.flag("Coxeter: finite order", ch.finite_order, format!("d_n = {}", d.d_n));
    s.flag("Coxeter: roots off Im(c - id)", ch.roots_off_image, "");
    s.flag("Coxeter: image membership", ch.image_membership, "");
    s.flag("Coxeter: generates K_Z", ch.generates_k, "");
    s.flag("Jordan decomposition commutes", d.jordan_commutes(), "");
    s.flag("semisimple spectrum = zeta^{-d}", d.ss_spectrum_matches(), format!("degrees {:?}", d.degrees));
    let shift = &d.unip_shift * int(d.d_n.into());
    s.flag("unipotent shift d_n*s = +-1", shift == int(1) || shift == int(-1), elliptic::exactcore::format_rational(&d.unip_shift));

    for (r, want) in [(-1, "negative"), (0, "zero"), (1, "positive")] {
        let name = format!("triplet r = {r}");
        match standard_triplet(&sys, &d, &int(r), cfg.seed) {
            Ok(t) => {
                s.flag(format!("{name}: admissible"), t.report.all(), t.report.failures().join(", "));
                s.flag(format!("{name}: eigen relations"), t.eigen_relations_hold(), "");
                s.flag(format!("{name}: signature {want}"), t.signature_type() == want, format!("{:?}", t.signature));
            }
            Err(e) => s.error(name, e),
        }
    }
}

fn count_checks(ctx: &InvariantContext, s: &mut Suite) {
    let top = ctx.d_n().max(3);
    let mut ok = true;
    let mut detail = Vec::new();
    for m in 1..=top {
        match span_dimension(ctx, m) {
            Ok(k) => detail.push(k.to_string()),
            Err(e) => {
                ok = false;
                detail.push(e.to_string());
            }
        }
    }
    s.flag(format!("alcove counts = monomial counts (m <= {top})"), ok, detail.join(" "));
}

fn theta_checks(cfg: &RunConfig, ctx: &InvariantContext, s: &mut Suite) {
    let pts = ctx.sample_points(5, cfg.seed, 0.3, 0.2);
    let mut inv = 0.0f64;
    let mut unip = 0.0f64;
    for m in 1..=ctx.d_n() {
        for k in ctx.alcove_weights(m) {
            match ThetaInvariant::orbit(ctx, &k, m).and_then(|f| Ok((f.invariance_residual(ctx, &pts)?, f.unipotent_residual(ctx, &pts)))) {
                Ok((a, b)) => {
                    inv = inv.max(a);
                    unip = unip.max(b);
                }
                Err(e) => return s.error(format!("theta orbit {k:?} level {m}"), e),
            }
        }
    }
    s.residual("theta W-invariance", inv, cfg.tol);
    s.residual("theta unipotent invariance", unip, cfg.tol);
}

fn good_checks<T: Scalar>(cfg: &RunConfig, ctx: &InvariantContext, s: &mut Suite) -> Option<BasicInvariantSet<T>> {
    let (xs, rep, cached) = match good_set::<T>(cfg, ctx) {
        Ok(x) => x,
        Err(e) => {
            s.error("good basic invariants", e);
            return None;
        }
    };
    let top = 2 * ctx.d_n();
    let bad: Vec<u32> = (1..=top).filter(|&m| !xs.psi_invertible(m)).collect();
    s.flag(format!("psi invertible for m <= {top}"), bad.is_empty(), if bad.is_empty() { String::new() } else { format!("fails at {bad:?}") });
    s.flag("good and compatible", xs.good && xs.compatible, if cached { "from cache" } else { "" });
    s.flag("Jacobian is a unit", rep.jacobian_unit, "");
    s.residual("goodness", rep.goodness, cfg.tol);
    s.residual("compatibility", rep.compatibility, cfg.tol);
    s.residual(format!("delta property (m <= {})", rep.delta_degree), rep.delta_property, cfg.tol);
    s.residual("z^0 property", rep.z0_property, cfg.tol);
    if let Some(t) = rep.top_restriction {
        s.residual("x^n on L-perp = -2 pi i/d_n", t, cfg.tol);
    }
    Some(xs)
}

fn frobenius_checks<T: Scalar>(cfg: &RunConfig, ctx: &InvariantContext, xs: &BasicInvariantSet<T>, s: &mut Suite) -> Option<Pipeline<T>> {
    match flatness_equivalences(xs, xs, cfg.tol) {
        Ok(f) => {
            s.flag("flatness conditions hold and agree", f.agree && f.holds.iter().all(|&h| h), [f.unit_in_v, f.second_derivative, f.form_on_lperp, f.restriction_constant].map(|v| format!("{v:.1e}")).join(" "));
            if let Some(iso) = f.isometry {
                s.residual("psi isometry", iso, cfg.tol);
            }
        }
        Err(e) => s.error("flatness conditions", e),
    }
    match flatness_equivalences(&perturb_scaled(xs), xs, cfg.tol) {
        Ok(f) => s.flag("control x'^n = (1+q)x^n: all fail", f.agree && f.holds.iter().all(|&h| !h), ""),
        Err(e) => s.error("control x'^n = (1+q)x^n", e),
    }
    match flatness_equivalences(&perturb_product(xs), xs, cfg.tol) {
        Ok(f) => s.flag("control x'^n = x^n + q x^b: all hold", f.agree && f.holds.iter().all(|&h| h), ""),
        Err(e) => s.error("control x'^n = x^n + q x^b", e),
    }

    let exps = match intersection_expansions(xs) {
        Ok(e) => e,
        Err(e) => {
            s.error("intersection form expansions", e);
            return None;
        }
    };
    let main = main_identity_with(xs, &exps);
    s.residual("main identity (worst pair)", main.worst, cfg.tol);
    s.residual("expansion lower-weight remainder", main.fit_residual, cfg.tol);
    let ypts = ctx.sample_points(5, cfg.seed, 0.01, 0.2);
    s.residual("expansions at points (|q| <= 0.01)", expansion_fit_at_points(ctx, xs, &exps, &ypts), cfg.tol);

    let table = match metric_and_constants_from(xs, &exps, &int(1)) {
        Ok(t) => t,
        Err(e) => {
            s.error("metric and structure constants", e);
            return None;
        }
    };
    let pts = sample_x_points(xs.n(), 5, cfg.seed, 0.3, 0.2);
    let rep = verify_frobenius(&table, &pts);
    for (k, v) in rep.entries() {
        s.residual(format!("Frobenius: {k}"), v, cfg.tol);
    }
    match scaling_covariance(&table, &int(2), &pts) {
        Ok((cov, rep2)) => {
            s.residual("scaling covariance e -> 2e", cov, cfg.tol);
            s.residual("Frobenius axioms after scaling", rep2.worst(), cfg.tol);
        }
        Err(e) => s.error("scaling covariance", e),
    }
    Some(Pipeline { xs: xs.clone(), exps, table })
}

fn drift_checks<T: Scalar>(cfg: &RunConfig, base: &Pipeline<T>, s: &mut Suite) {
    let q = cfg.q_order + 5;
    let hi = match pipeline::<T>(cfg, q) {
        Ok(p) => p,
        Err(e) => return s.error(format!("re-run at q-order {q}"), e),
    };
    let jets = base.xs.jets.iter().zip(&hi.xs.jets).map(|(a, b)| a.drift(b)).fold(0.0, f64::max);
    let exps = base
        .exps
        .iter()
        .flatten()
        .zip(hi.exps.iter().flatten())
        .map(|(a, b)| a.coeffs.drift(&b.coeffs))
        .fold(0.0, f64::max);
    let consts = base
        .table
        .constants
        .iter()
        .flatten()
        .flatten()
        .zip(hi.table.constants.iter().flatten().flatten())
        .map(|(a, b)| a.drift(b))
        .fold(0.0, f64::max);
    let metric = base.table.metric == hi.table.metric;
    s.residual(format!("drift q{} -> q{q}: invariants", cfg.q_order), jets, cfg.tol);
    s.residual(format!("drift q{} -> q{q}: expansions", cfg.q_order), exps, cfg.tol);
    s.residual(format!("drift q{} -> q{q}: structure constants", cfg.q_order), consts, cfg.tol);
    s.flag(format!("drift q{} -> q{q}: metric unchanged", cfg.q_order), metric, "");
}

/// Runs every check for `cfg`. Stages whose prerequisites failed are reported as errors;
/// the Frobenius stages are skipped outside codimension one.
pub fn run_suite<T: Scalar>(cfg: &RunConfig, drift: bool) -> Suite {
    let mut s = Suite { label: format!("{}^(1,1) at q-order {}", cfg.cartan, cfg.q_order), checks: Vec::new() };
    exact_checks(cfg, &mut s);
    let ctx = match context(cfg, cfg.q_order) {
        Ok(c) => c,
        Err(e) => {
            s.error("invariant context", e);
            return s;
        }
    };
    count_checks(&ctx, &mut s);
    theta_checks(cfg, &ctx, &mut s);
    let Some(xs) = good_checks::<T>(cfg, &ctx, &mut s) else { return s };
    if ctx.data.codim != 1 {
        s.skip("Frobenius structure", format!("codimension {}", ctx.data.codim));
        return s;
    }
    let Some(base) = frobenius_checks(cfg, &ctx, &xs, &mut s) else { return s };
    if drift {
        drift_checks(cfg, &base, &mut s);
    } else {
        s.skip("drift at q-order + 5", "--skip-drift");
    }
    s
}

