use crate::cache::{context, good_set};
use crate::config::{ConfigError, RunConfig};
use crate::json::{cplx, cyc, jet, matrix, rat, rat_rows, rats, residual, series};
use crate::{CliError, Output};
use elliptic::coxeter::{hyperbolic_coxeter, CoxeterData};
use elliptic::exactcore::{format_rational, Rational};
use elliptic::frobenius::{intersection_expansions, metric_and_constants_from, sample_x_points, verify_frobenius, FrobeniusReport};
use elliptic::invariants::{expand_in, parse_invariant_file, write_invariant_file, BasicInvariantSet, GoodnessReport};
use elliptic::rootsys::MarkedEllipticRootSystem;
use elliptic::series::Scalar;
use elliptic::triplet::{standard_triplet, AdmissibleTriplet};
use serde_json::{json, Value};
use std::fmt::Write as _;

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

pub fn describe(cfg: &RunConfig) -> Result<Output, CliError> {
    let sys = MarkedEllipticRootSystem::build(cfg.cartan);
    let ax = sys.axioms_check();
    let n = sys.n();
    let ok = ax.all_pass(n);
    let json = json!({
        "label": sys.label,
        "l": sys.l,
        "dim": sys.dim(),
        "n": n,
        "gram": matrix(&sys.gram),
        "finite_roots": sys.finite_roots.len(),
        "highest_root": sys.highest_root,
        "marks": sys.marks,
        "comarks": sys.comarks,
        "c0": rat(&sys.c0),
        "axioms": {
            "full_lattice": ax.full_lattice,
            "integrality": ax.integrality,
            "reflection_closed": ax.reflection_closed,
            "irreducible": ax.irreducible,
            "radical_is_a": ax.radical_is_a,
            "signature": [ax.signature.0, ax.signature.1, ax.signature.2],
            "violations": ax.violations(),
        },
    });
    let mut text = String::new();
    let _ = writeln!(text, "{}^(1,1): l = {}, dim F~ = {}, {} finite roots", sys.label, sys.l, sys.dim(), sys.finite_roots.len());
    let _ = writeln!(text, "marks {:?}, comarks {:?}, c0 = {}", sys.marks, sys.comarks, format_rational(&sys.c0));
    let _ = writeln!(text, "signature of I~ (+, 0, -) = {:?} (want ({n}, 1, 1))", ax.signature);
    let _ = writeln!(text, "axioms: {}", if ok { "all pass".to_string() } else { ax.violations().join("; ") });
    Ok(Output { json, text, artifact: None, ok })
}

fn coxeter_json(d: &CoxeterData) -> Value {
    json!({
        "d_n": d.d_n,
        "degrees": d.degrees,
        "codim": d.codim,
        "zeta_exponent": d.zeta_exponent,
        "zeta": cyc(&d.zeta()),
        "orderings_tried": d.orderings_tried,
        "vertices": rat_rows(&d.vertices),
        "c_tilde": matrix(&d.c_tilde.matrix),
        "ss": matrix(&d.ss.matrix),
        "unip": matrix(&d.unip.matrix),
        "unip_shift": rat(&d.unip_shift),
        "lambda": rats(&d.lambda),
        "fixed_locus_dim": d.fixed_locus_dim(),
        "checks": {
            "finite_order": d.checks.finite_order,
            "roots_off_image": d.checks.roots_off_image,
            "image_membership": d.checks.image_membership,
            "generates_k": d.checks.generates_k,
        },
        "jordan_commutes": d.jordan_commutes(),
        "ss_spectrum_matches": d.ss_spectrum_matches(),
        "degrees_dual": d.degrees_dual(),
    })
}

/// d_n·s = ±1 for the shift s of c̃^unip.
fn unip_shift_ok(d: &CoxeterData) -> bool {
    let v = &d.unip_shift * Rational::from_integer(d.d_n.into());
    v == Rational::from_integer(1.into()) || v == Rational::from_integer((-1).into())
}

pub fn coxeter(cfg: &RunConfig) -> Result<Output, CliError> {
    let sys = MarkedEllipticRootSystem::build(cfg.cartan);
    let d = hyperbolic_coxeter(&sys).map_err(|e| CliError::failed("coxeter", e))?;
    let ok = d.checks.all() && d.jordan_commutes() && d.ss_spectrum_matches() && unip_shift_ok(&d);
    let mut text = String::new();
    let _ = writeln!(text, "{}: d_n = {}, degrees {:?}, codim {}", sys.label, d.d_n, d.degrees, d.codim);
    let _ = writeln!(text, "zeta = exp(2 pi i {}/{}), ordering found after {} tries", d.zeta_exponent, d.d_n, d.orderings_tried);
    let _ = writeln!(
        text,
        "finite order {}, roots off Im(c - id) {}, image membership {}, generates K_Z {}",
        yes(d.checks.finite_order),
        yes(d.checks.roots_off_image),
        yes(d.checks.image_membership),
        yes(d.checks.generates_k)
    );
    let _ = writeln!(
        text,
        "Jordan: ss unip = unip ss = c~ {}, ss spectrum {}, unip shift {}",
        yes(d.jordan_commutes()),
        yes(d.ss_spectrum_matches()),
        format_rational(&d.unip_shift)
    );
    Ok(Output { json: coxeter_json(&d), text, artifact: None, ok })
}

pub fn triplet_json(t: &AdmissibleTriplet) -> Value {
    let r = &t.report;
    json!({
        "r": rat(&t.r),
        "zeta_exponent": t.zeta_exponent,
        "signature": [t.signature.0, t.signature.1, t.signature.2],
        "signature_type": t.signature_type(),
        "dual_normalized": t.dual_normalized,
        "l_basis": rat_rows(&t.l_basis),
        "l0": rat_rows(&t.l0),
        "lambda_r": rats(&t.lambda_r),
        "z_basis": t.z_basis.iter().map(|v| Value::Array(v.iter().map(cyc).collect())).collect::<Vec<_>>(),
        "z_pow": t.z_pow,
        "point": { "a": rats(&t.point.a_fun), "d": rats(&t.point.d_fun), "seed": t.point.seed },
        "admissibility": {
            "splitting": r.splitting,
            "root_free": r.root_free,
            "zeta_primitive": r.zeta_primitive,
            "invariant_eigen": r.invariant_eigen,
            "preserves_l": r.preserves_l,
            "spectrum_on_l": r.spectrum_on_l,
            "clause_i": r.clause_i(),
            "clause_ii": r.clause_ii(),
            "clause_iii": r.clause_iii(),
            "failures": r.failures(),
        },
        "eigen_relations_hold": t.eigen_relations_hold(),
    })
}

pub fn triplet(cfg: &RunConfig) -> Result<Output, CliError> {
    let sys = MarkedEllipticRootSystem::build(cfg.cartan);
    let d = hyperbolic_coxeter(&sys).map_err(|e| CliError::failed("coxeter", e))?;
    let t = standard_triplet(&sys, &d, &cfg.r, cfg.seed).map_err(|e| CliError::failed("triplet", e))?;
    let ok = t.report.all() && t.eigen_relations_hold();
    let mut text = String::new();
    let _ = writeln!(text, "{}: triplet L(r) with r = {}, signature {:?} ({})", sys.label, format_rational(&t.r), t.signature, t.signature_type());
    let _ = writeln!(
        text,
        "admissible: (i) {}, (ii) {}, (iii) {}; dual-normalized {}",
        yes(t.report.clause_i()),
        yes(t.report.clause_ii()),
        yes(t.report.clause_iii()),
        yes(t.dual_normalized)
    );
    for (i, v) in t.l_basis.iter().enumerate() {
        let _ = writeln!(text, "L[{i}] = ({})", v.iter().map(format_rational).collect::<Vec<_>>().join(", "));
    }
    Ok(Output { json: triplet_json(&t), text, artifact: None, ok })
}

pub fn goodness_json(rep: &GoodnessReport) -> Value {
    json!({
        "goodness": residual(rep.goodness),
        "compatibility": residual(rep.compatibility),
        "delta_property": residual(rep.delta_property),
        "delta_degree": rep.delta_degree,
        "z0_property": residual(rep.z0_property),
        "top_restriction": rep.top_restriction.map(residual),
        "jacobian_unit": rep.jacobian_unit,
        "worst": residual(rep.worst()),
    })
}

fn set_json<T: Scalar>(xs: &BasicInvariantSet<T>) -> Value {
    json!({
        "degrees": xs.degrees,
        "good": xs.good,
        "compatible": xs.compatible,
        "thetas": xs.thetas.iter().map(|t| json!({ "level": t.level, "weight": t.weight, "terms": t.len() })).collect::<Vec<_>>(),
        "restrictions": xs.restrictions().iter().map(series).collect::<Vec<_>>(),
    })
}

pub fn invariants<T: Scalar>(cfg: &RunConfig, good: bool) -> Result<Output, CliError> {
    let ctx = context(cfg, cfg.q_order)?;
    let (xs, rep, cached) = if good {
        let (x, r, c) = good_set::<T>(cfg, &ctx)?;
        (x, Some(r), c)
    } else {
        (BasicInvariantSet::<T>::select(&ctx).map_err(|e| CliError::failed("invariants", e))?, None, false)
    };
    let ok = rep.as_ref().map_or(true, |r| xs.good && r.worst() < cfg.tol);
    let mut json = set_json(&xs);
    json["q_order"] = json!(ctx.q_order);
    json["jet_bound"] = json!(ctx.jet_bound);
    json["den"] = json!(ctx.den);
    json["cached"] = json!(cached);
    json["goodness_report"] = rep.as_ref().map_or(Value::Null, goodness_json);
    let mut text = String::new();
    let _ = writeln!(text, "{}: {} basic invariants of degrees {:?} (q-order {}, jet bound {})", ctx.sys.label, xs.n(), xs.degrees, ctx.q_order, ctx.jet_bound);
    if let Some(r) = &rep {
        let _ = writeln!(text, "good {} compatible {}; worst residual {:e}", yes(xs.good), yes(xs.compatible), r.worst());
    }
    Ok(Output { json, text, artifact: Some(write_invariant_file(&ctx, &xs)), ok })
}

fn codim_one(cfg: &RunConfig, ctx: &elliptic::invariants::InvariantContext) -> Result<(), CliError> {
    if ctx.data.codim != 1 {
        return Err(CliError::failed("frobenius", format!("{} has codimension {}; the Frobenius structure is built in codimension one", cfg.cartan, ctx.data.codim)));
    }
    Ok(())
}

pub fn frobenius_report_json(rep: &FrobeniusReport) -> Value {
    let mut m = serde_json::Map::new();
    for (k, v) in rep.entries() {
        m.insert(k.to_string(), residual(v));
    }
    m.insert("points".into(), json!(rep.points));
    m.insert("worst".into(), residual(rep.worst()));
    Value::Object(m)
}

pub fn frobenius<T: Scalar>(cfg: &RunConfig) -> Result<Output, CliError> {
    let ctx = context(cfg, cfg.q_order)?;
    codim_one(cfg, &ctx)?;
    let (xs, _, _) = good_set::<T>(cfg, &ctx)?;
    let exps = intersection_expansions(&xs).map_err(|e| CliError::failed("frobenius", e))?;
    let table = metric_and_constants_from(&xs, &exps, &Rational::from_integer(1.into())).map_err(|e| CliError::failed("frobenius", e))?;
    let pts = sample_x_points(xs.n(), 5, cfg.seed, 0.3, 0.2);
    let rep = verify_frobenius(&table, &pts);
    let n = table.n();
    let mut constants = Vec::new();
    for a in 0..=n {
        for b in 0..=n {
            for g in 0..=n {
                let c = &table.constants[a][b][g];
                if c.terms().next().is_some() {
                    constants.push(json!({ "alpha": a, "beta": b, "gamma": g, "value": jet(c) }));
                }
            }
        }
    }
    let ok = rep.worst() < cfg.tol;
    let json = json!({
        "degrees": table.degrees,
        "d_n": table.d_n,
        "c": cplx(table.c),
        "metric_upper": matrix(&table.metric_upper),
        "metric": matrix(&table.metric),
        "intersection": table.intersection.iter().map(|r| r.iter().map(jet).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "structure_constants": constants,
        "report": frobenius_report_json(&rep),
    });
    let mut text = String::new();
    let _ = writeln!(text, "{}: Frobenius structure in flat coordinates x^0..x^{n}, degrees {:?}", ctx.sys.label, table.degrees);
    for i in 0..=n {
        let row: Vec<String> = table.metric.row(i).iter().map(format_rational).collect();
        let _ = writeln!(text, "g[{i}] = [{}]", row.join(", "));
    }
    for (k, v) in rep.entries() {
        let _ = writeln!(text, "{k:<17} {v:.3e}");
    }
    let _ = writeln!(text, "{} nonzero structure constants; worst axiom residual {:.3e}", constants.len(), rep.worst());
    Ok(Output { json, text, artifact: None, ok })
}

pub fn verify<T: Scalar>(cfg: &RunConfig, drift: bool) -> Result<Output, CliError> {
    let suite = crate::verify::run_suite::<T>(cfg, drift);
    let ok = suite.passed();
    Ok(Output { json: suite.to_json(), text: suite.to_text(), artifact: None, ok })
}

pub fn expand<T: Scalar>(cfg: &RunConfig, input: &str) -> Result<Output, CliError> {
    let f = parse_invariant_file::<T>(input).map_err(|e| ConfigError::Input(e.to_string()))?;
    let mut cfg = cfg.clone();
    cfg.r = f.r.clone();
    cfg.q_order = f.q_order;
    cfg.jet_bound = Some(f.jet_bound);
    let ctx = context(&cfg, f.q_order)?;
    if f.degrees != ctx.degrees() || f.den != ctx.den {
        return Err(ConfigError::Input(format!("file degrees {:?} / den {} do not match {} ({:?} / {})", f.degrees, f.den, cfg.cartan, ctx.degrees(), ctx.den)).into());
    }
    if !f.l_basis.is_empty() && f.l_basis != ctx.triplet.l_basis {
        return Err(ConfigError::Input("the file's L differs from the configured triplet (check --seed)".into()).into());
    }
    let (xs, _, _) = good_set::<T>(&cfg, &ctx)?;
    let mut items = Vec::new();
    let mut text = String::new();
    let mut ok = true;
    for lj in &f.jets {
        let e = expand_in(&xs, &lj.jet, lj.degree).map_err(|e| CliError::failed("invariants", format!("{}: {e}", lj.label)))?;
        ok &= e.lower_residual < cfg.tol;
        let rows = e.coeffs.exchange_rows();
        let _ = writeln!(text, "expansion {} {} {} ; lower residual {:e}", lj.label, lj.degree, rows.len(), e.lower_residual);
        for r in &rows {
            let _ = writeln!(text, "{r}");
        }
        items.push(json!({ "label": lj.label, "degree": lj.degree, "lower_residual": residual(e.lower_residual), "coefficients": jet(&e.coeffs) }));
    }
    Ok(Output { json: json!({ "expansions": items, "q_order": f.q_order, "jet_bound": f.jet_bound }), text, artifact: None, ok })
}
