//! Context construction and the optional on-disk cache of good invariant sets, keyed by
//! a hash of the configuration.

use crate::config::{RunConfig, CACHE_ENV};
use crate::CliError;
use elliptic::coxeter::hyperbolic_coxeter;
use elliptic::invariants::{parse_invariant_file, write_invariant_file, BasicInvariantSet, GoodnessReport, InvariantContext};
use elliptic::rootsys::MarkedEllipticRootSystem;
use elliptic::series::Scalar;
use elliptic::triplet::standard_triplet;
use sha2::{Digest, Sha256};
use std::path::PathBuf;

pub fn context(cfg: &RunConfig, q_order: i64) -> Result<InvariantContext, CliError> {
    let sys = MarkedEllipticRootSystem::build(cfg.cartan);
    let data = hyperbolic_coxeter(&sys).map_err(|e| CliError::failed("coxeter", e))?;
    let triplet = standard_triplet(&sys, &data, &cfg.r, cfg.seed).map_err(|e| CliError::failed("triplet", e))?;
    let jet_bound = cfg.jet_bound.unwrap_or(3 * data.d_n);
    InvariantContext::with_triplet(sys, data, triplet, q_order, jet_bound).map_err(|e| CliError::failed("invariants", e))
}

fn cache_path(cfg: &RunConfig, ctx: &InvariantContext) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty())?;
    let key = cfg.cache_key(ctx.q_order, ctx.jet_bound);
    let hash = Sha256::digest(key.as_bytes());
    Some(PathBuf::from(dir).join(format!("{hash:x}.inv")))
}

/// The good, compatible basic invariant set of the context, from the cache when present.
/// Returns the set, its goodness report and whether it came from the cache.
pub fn good_set<T: Scalar>(cfg: &RunConfig, ctx: &InvariantContext) -> Result<(BasicInvariantSet<T>, GoodnessReport, bool), CliError> {
    let path = cache_path(cfg, ctx);
    if let Some(p) = &path {
        if let Ok(text) = std::fs::read_to_string(p) {
            match parse_invariant_file::<T>(&text).and_then(|f| BasicInvariantSet::from_file(ctx, &f)) {
                Ok(xs) if xs.good => {
                    let rep = xs.goodness_report(2 * xs.d_n());
                    return Ok((xs, rep, true));
                }
                Ok(_) => eprintln!("warning: cached set {} is not good; recomputing", p.display()),
                Err(e) => eprintln!("warning: ignoring cache entry {}: {e}", p.display()),
            }
        }
    }
    let xs = BasicInvariantSet::<T>::select(ctx).map_err(|e| CliError::failed("invariants", e))?;
    let (good, rep) = xs.make_good().map_err(|e| CliError::failed("invariants", e))?;
    if let (Some(p), true) = (&path, good.good) {
        let tmp = p.with_extension("tmp");
        let res = p
            .parent()
            .map_or(Ok(()), std::fs::create_dir_all)
            .and_then(|_| std::fs::write(&tmp, write_invariant_file(ctx, &good)))
            .and_then(|_| std::fs::rename(&tmp, p));
        if let Err(e) = res {
            eprintln!("warning: cannot write cache entry {}: {e}", p.display());
        }
    }
    Ok((good, rep, false))
}
