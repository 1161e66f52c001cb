//! Text exchange format for basic invariant sets.
//!
//! ```text
//! ellfrob-invariants 1
//! type G2
//! l 2
//! degrees 1 1 2
//! r 0
//! zeta_exponent 1
//! signature 2 1 0
//! lbasis 1 0 0 0 0          (one line per basis vector of L, entries p/q)
//! q_order 20
//! jet_bound 6
//! den 1
//! good true
//! theta 1 : 1 0            (level : weight coefficients k_i)
//! combo x1 1 4 1          (label, degree, row count, precision count; rows follow)
//! jet x1 1 57 20
//! end
//! ```
//!
//! Rows are "b_1 … b_n ; exponent ; re ; im", then precision rows "b_1 … b_n ; p" with
//! O(q^p) of each coefficient (default: q_order). `combo` rows are polynomials in the selected
//! orbit sums, `jet` rows are Taylor jets along L^⊥. A file given to `expand` needs only
//! the header and `jet` sections.

use super::{substitute, BasicInvariantSet, InvariantContext, InvariantError, ThetaInvariant};
use crate::exactcore::{format_rational, parse_rational, Rational};
use crate::series::{QJet, Scalar};

pub const EXCHANGE_MAGIC: &str = "ellfrob-invariants";
pub const EXCHANGE_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct LabelledJet<T: Scalar> {
    pub label: String,
    pub degree: u32,
    pub jet: QJet<T>,
}

#[derive(Debug, Clone)]
pub struct InvariantFile<T: Scalar> {
    pub type_label: String,
    pub l: usize,
    pub degrees: Vec<u32>,
    pub r: Rational,
    pub zeta_exponent: i64,
    pub signature: (usize, usize, usize),
    pub l_basis: Vec<Vec<Rational>>,
    pub q_order: i64,
    pub jet_bound: u32,
    pub den: u32,
    pub good: bool,
    /// (level, weight) of each selected orbit sum.
    pub thetas: Vec<(u32, Vec<i64>)>,
    pub combos: Vec<LabelledJet<T>>,
    pub jets: Vec<LabelledJet<T>>,
}

fn join<D: ToString>(xs: impl IntoIterator<Item = D>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_invariant_file<T: Scalar>(ctx: &InvariantContext, xs: &BasicInvariantSet<T>) -> String {
    let t = &ctx.triplet;
    let mut out = vec![
        format!("{EXCHANGE_MAGIC} {EXCHANGE_VERSION}"),
        format!("type {}", ctx.sys.label),
        format!("l {}", ctx.sys.l),
        format!("degrees {}", join(&xs.degrees)),
        format!("r {}", format_rational(&t.r)),
        format!("zeta_exponent {}", t.zeta_exponent),
        format!("signature {} {} {}", t.signature.0, t.signature.1, t.signature.2),
    ];
    out.extend(t.l_basis.iter().map(|v| format!("lbasis {}", join(v.iter().map(format_rational)))));
    out.push(format!("q_order {}", ctx.q_order));
    out.push(format!("jet_bound {}", ctx.jet_bound));
    out.push(format!("den {}", xs.jets[0].den()));
    out.push(format!("good {}", xs.good && xs.compatible));
    out.extend(xs.thetas.iter().map(|th| format!("theta {} : {}", th.level, join(&th.weight))));
    for (kind, jets) in [("combo", &xs.combos), ("jet", &xs.jets)] {
        for (a, j) in jets.iter().enumerate() {
            let rows = j.exchange_rows();
            let precs = j.precision_rows();
            out.push(format!("{kind} x{} {} {} {}", a + 1, xs.degrees[a], rows.len(), precs.len()));
            out.extend(rows);
            out.extend(precs);
        }
    }
    out.push("end".into());
    out.join("\n") + "\n"
}

fn bad(line: usize, msg: impl Into<String>) -> InvariantError {
    InvariantError::Exchange { line, message: msg.into() }
}

fn parse_num<F: std::str::FromStr>(s: &str, line: usize) -> Result<F, InvariantError> {
    s.parse().map_err(|_| bad(line, format!("expected a number, found {s:?}")))
}

pub fn parse_invariant_file<T: Scalar>(text: &str) -> Result<InvariantFile<T>, InvariantError> {
    let lines: Vec<&str> = text.lines().collect();
    let first = lines.first().map(|s| s.trim()).unwrap_or("");
    match first.split_once(' ') {
        Some((m, v)) if m == EXCHANGE_MAGIC => {
            if parse_num::<u32>(v.trim(), 1)? != EXCHANGE_VERSION {
                return Err(bad(1, format!("unsupported version {v}")));
            }
        }
        _ => return Err(bad(1, format!("missing \"{EXCHANGE_MAGIC} {EXCHANGE_VERSION}\" header"))),
    }
    let mut f = InvariantFile {
        type_label: String::new(),
        l: 0,
        degrees: Vec::new(),
        r: Rational::from_integer(0.into()),
        zeta_exponent: 1,
        signature: (0, 0, 0),
        l_basis: Vec::new(),
        q_order: 0,
        jet_bound: 0,
        den: 1,
        good: false,
        thetas: Vec::new(),
        combos: Vec::new(),
        jets: Vec::new(),
    };
    let mut i = 1;
    let mut ended = false;
    while i < lines.len() {
        let no = i + 1;
        let line = lines[i].trim();
        i += 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let words: Vec<&str> = rest.split_whitespace().collect();
        match key {
            "type" => f.type_label = rest.to_string(),
            "l" => f.l = parse_num(rest, no)?,
            "degrees" => f.degrees = words.iter().map(|w| parse_num(w, no)).collect::<Result<_, _>>()?,
            "r" => f.r = parse_rational(rest).map_err(|e| bad(no, e.to_string()))?,
            "zeta_exponent" => f.zeta_exponent = parse_num(rest, no)?,
            "signature" => {
                let s: Vec<usize> = words.iter().map(|w| parse_num(w, no)).collect::<Result<_, _>>()?;
                if s.len() != 3 {
                    return Err(bad(no, "signature needs three numbers"));
                }
                f.signature = (s[0], s[1], s[2]);
            }
            "lbasis" => f.l_basis.push(words.iter().map(|w| parse_rational(w).map_err(|e| bad(no, e.to_string()))).collect::<Result<_, _>>()?),
            "q_order" => f.q_order = parse_num(rest, no)?,
            "jet_bound" => f.jet_bound = parse_num(rest, no)?,
            "den" => f.den = parse_num(rest, no)?,
            "good" => f.good = parse_num(rest, no)?,
            "theta" => {
                let (lv, w) = rest.split_once(':').ok_or_else(|| bad(no, "theta needs \"level : weight\""))?;
                let w = w.split_whitespace().map(|x| parse_num(x, no)).collect::<Result<_, _>>()?;
                f.thetas.push((parse_num(lv.trim(), no)?, w));
            }
            "combo" | "jet" => {
                if words.len() != 3 && words.len() != 4 {
                    return Err(bad(no, format!("{key} needs label, degree, row count and optional precision count")));
                }
                if f.degrees.is_empty() || f.q_order <= 0 {
                    return Err(bad(no, "degrees and q_order must precede jet sections"));
                }
                let degree: u32 = parse_num(words[1], no)?;
                let count: usize = parse_num(words[2], no)?;
                let nprec: usize = if words.len() == 4 { parse_num(words[3], no)? } else { 0 };
                if i + count + nprec > lines.len() {
                    return Err(bad(no, "file ends inside a jet section"));
                }
                let rows = lines[i..i + count].iter().map(|s| s.trim());
                let d_n = *f.degrees.iter().max().unwrap();
                let max_weight = if key == "combo" { d_n } else { f.jet_bound };
                let prec = f.q_order * f.den as i64;
                let mut jet = QJet::from_exchange_rows(f.degrees.clone(), max_weight, f.den, prec, rows).map_err(|e| bad(no, e.to_string()))?;
                jet.set_precisions(lines[i + count..i + count + nprec].iter().map(|s| s.trim())).map_err(|e| bad(no, e.to_string()))?;
                i += count + nprec;
                let lj = LabelledJet { label: words[0].to_string(), degree, jet };
                if key == "combo" {
                    f.combos.push(lj);
                } else {
                    f.jets.push(lj);
                }
            }
            "end" => {
                ended = true;
                break;
            }
            other => return Err(bad(no, format!("unknown key {other:?}"))),
        }
    }
    if !ended {
        return Err(bad(lines.len(), "missing \"end\""));
    }
    if f.type_label.is_empty() || f.degrees.is_empty() {
        return Err(bad(1, "type and degrees are required"));
    }
    Ok(f)
}

impl<T: Scalar> BasicInvariantSet<T> {
    /// Rebuilds a set from a file written by [`write_invariant_file`] for the same
    /// context: orbit sums are re-enumerated, the combinations are taken from the file.
    pub fn from_file(ctx: &InvariantContext, f: &InvariantFile<T>) -> Result<Self, InvariantError> {
        let mismatch = |what: &str| bad(1, format!("{what} does not match the configured system"));
        if f.type_label != ctx.sys.label {
            return Err(mismatch("type"));
        }
        if f.degrees != ctx.degrees() {
            return Err(mismatch("degrees"));
        }
        if f.q_order != ctx.q_order || f.jet_bound != ctx.jet_bound {
            return Err(mismatch("q_order/jet_bound"));
        }
        if f.r != ctx.triplet.r || f.l_basis != ctx.triplet.l_basis {
            return Err(mismatch("triplet"));
        }
        let n = ctx.n();
        if f.thetas.len() != n || f.combos.len() != n {
            return Err(bad(1, format!("expected {n} theta and combo entries")));
        }
        let thetas: Vec<ThetaInvariant> = f.thetas.iter().map(|(m, k)| ThetaInvariant::orbit(ctx, k, *m)).collect::<Result<_, _>>()?;
        let theta_jets: Vec<QJet<T>> = thetas.iter().map(|th| th.taylor_jet(ctx)).collect();
        let combos: Vec<QJet<T>> = f.combos.iter().map(|c| c.jet.clone()).collect();
        let jets = combos.iter().map(|c| substitute(c, &theta_jets)).collect();
        Ok(BasicInvariantSet { degrees: f.degrees.clone(), thetas, theta_jets, combos, jets, good: f.good, compatible: f.good })
    }
}
