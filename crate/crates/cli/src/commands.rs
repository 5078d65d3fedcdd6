//! Subcommand drivers. Each returns the rendered text, a JSON report and
//! whether every requested check passed.

use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};

use qcluster::decorated_rep::h1_lambda;
use qcluster::dt_series::{
    conjugate, conjugate_auto, dt_g_vector, dt_product, factorization_check, pochhammer,
    sign_sequence, two_part_partitions, ConeSeries, DEFAULT_WINDOW,
};
use qcluster::grassmannian::{coefficient_crosscheck, render_t, GammaCheck, DEFAULT_BUDGET, DEFAULT_PRIMES};
use qcluster::qtorus::{lefschetz_decompose, unit, SkewForm, TorusElement};
use qcluster::quiver_qp::{mutate_qp, QPData};
use qcluster::seed::Matrix;

use crate::session::Session;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Route {
    Mutation,
    Dt,
    Both,
}

#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub route: Option<Route>,
    pub cone_bound: Option<Vec<i64>>,
    pub primes: Option<Vec<u32>>,
    pub budget: Option<u64>,
}

pub struct Report {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn tuple(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn matrix_lines(out: &mut String, name: &str, m: &[Vec<i64>]) {
    let _ = writeln!(out, "{name}");
    for row in m {
        let _ = writeln!(out, "  {row:?}");
    }
}

fn potential_text(qp: &QPData) -> Vec<String> {
    qp.potential
        .terms()
        .iter()
        .map(|(w, c)| format!("{c} {:?}", one_based(w)))
        .collect()
}

pub fn mutate(s: &Session) -> Result<Report, String> {
    let fin = s.seed.mutate_sequence(&s.ks).map_err(|e| e.to_string())?;
    let mut text = String::new();
    let _ = writeln!(text, "ks {:?}", one_based(&s.ks));
    matrix_lines(&mut text, "lambda", fin.lambda.entries());
    matrix_lines(&mut text, "btilde", &fin.btilde);
    let vars: Vec<String> = fin.vars.iter().map(TorusElement::render).collect();
    for (i, v) in vars.iter().enumerate() {
        let _ = writeln!(text, "x{} = {v}", i + 1);
    }
    let mut json = json!({
        "ks": one_based(&s.ks),
        "lambda": fin.lambda.entries(),
        "btilde": fin.btilde,
        "vars": vars,
    });
    if s.has_potential {
        let mut qp = s.qp.clone();
        let mut well = true;
        for &k in &s.ks {
            let out = mutate_qp(&qp, k).map_err(|e| e.to_string())?;
            well &= out.well_mutable;
            qp = out.qp;
        }
        let arrows: Vec<String> =
            qp.quiver.arrows().map(|(id, a)| format!("{}: {}->{}", id + 1, a.src + 1, a.tgt + 1)).collect();
        let pot = potential_text(&qp);
        let _ = writeln!(text, "qp arrows {}", arrows.join(", "));
        let _ = writeln!(text, "qp potential {}", if pot.is_empty() { "0".into() } else { pot.join(" + ") });
        let _ = writeln!(text, "qp well-mutable {}", yes_no(well));
        json["qp"] = json!({ "arrows": arrows, "potential": pot, "well_mutable": well });
    }
    Ok(Report { text, json, ok: true })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Positivity and per-coefficient Lefschetz decomposition.
fn shape_checks(text: &mut String, el: &TorusElement) -> (bool, Value) {
    let positive = el.is_positive();
    let _ = writeln!(text, "positive {}", yes_no(positive));
    let mut lef_ok = true;
    let mut rows = Vec::new();
    for (e, c) in el.terms() {
        let line = match lefschetz_decompose(c) {
            Ok(l) => l.render(),
            Err(f) => {
                lef_ok = false;
                format!("FAIL {}", f.code())
            }
        };
        let _ = writeln!(text, "lefschetz X{e:?}: {line}");
        rows.push(json!({ "exponent": e, "decomposition": line }));
    }
    (positive && lef_ok, json!({ "positive": positive, "lefschetz_ok": lef_ok, "lefschetz": rows }))
}

fn dt_route(s: &Session, flags: &Flags) -> Result<(TorusElement, Vec<i64>), String> {
    let bt = &s.seed.btilde;
    let sig = sign_sequence(bt, &s.ks).map_err(|e| e.to_string())?;
    let a = dt_product(bt, &s.seed.initial_form, &s.ks).map_err(|e| e.to_string())?;
    let g = dt_g_vector(bt, &s.ks, &sig.signs, &s.lam);
    let fixed = flags.cone_bound.clone().or_else(|| s.options.cone_bound.clone());
    match fixed {
        Some(b) => {
            let b = broadcast(&b, s.seed.n)?;
            conjugate(&a, &g, &b).map(|t| (t, b)).map_err(|e| e.to_string())
        }
        None => conjugate_auto(&a, &g, &vec![2; s.seed.n], 6).map_err(|e| e.to_string()),
    }
}

/// A single entry stands for the constant vector.
fn broadcast(b: &[i64], n: usize) -> Result<Vec<i64>, String> {
    match b.len() {
        1 => Ok(vec![b[0]; n]),
        l if l == n => Ok(b.to_vec()),
        l => Err(format!("cone bound has {l} entries, expected 1 or {n}")),
    }
}

pub fn expand(s: &Session, flags: &Flags) -> Result<Report, String> {
    let route = flags
        .route
        .or_else(|| match s.options.route.as_deref() {
            Some("dt") => Some(Route::Dt),
            Some("both") => Some(Route::Both),
            _ => None,
        })
        .unwrap_or(Route::Mutation);
    let mut text = String::new();
    let mut json = json!({ "ks": one_based(&s.ks), "lam": s.lam });
    let mut ok = true;
    let mut mutation_el = None;
    if route != Route::Dt {
        let r = s.seed.cluster_monomial(&s.ks, &s.lam).map_err(|e| e.to_string())?;
        let _ = writeln!(text, "element = {}", r.element.render());
        let _ = writeln!(text, "g-vector {}", tuple(&r.g_vector));
        let _ = writeln!(text, "F-coefficients");
        let mut fj = Vec::new();
        for (gamma, c) in &r.f_coefficients {
            let _ = writeln!(text, "  {}: {}", tuple(gamma), c.render());
            fj.push(json!([gamma, c.render()]));
        }
        let (passed, checks) = shape_checks(&mut text, &r.element);
        ok &= passed;
        json["mutation"] = json!({
            "element": r.element.render(),
            "g_vector": r.g_vector,
            "f_coefficients": fj,
            "checks": checks,
        });
        mutation_el = Some(r.element);
    }
    if route != Route::Mutation {
        let (el, bound) = dt_route(s, flags)?;
        let _ = writeln!(text, "dt-element = {}", el.render());
        let _ = writeln!(text, "dt-bound {}", tuple(&bound));
        let mut dj = json!({ "element": el.render(), "bound": bound });
        if route == Route::Dt {
            let (passed, checks) = shape_checks(&mut text, &el);
            ok &= passed;
            dj["checks"] = checks;
        }
        if let Some(m) = &mutation_el {
            let agree = *m == el;
            let _ = writeln!(text, "{}", if agree { "AGREE" } else { "DISAGREE" });
            ok &= agree;
            json["agree"] = json!(agree);
        }
        json["dt"] = dj;
    }
    json["ok"] = json!(ok);
    Ok(Report { text, json, ok })
}

fn verdict(row: &GammaCheck) -> String {
    if let Some(reason) = &row.skipped {
        return format!("SKIPPED {reason}");
    }
    match (row.serre_match, row.euler_match) {
        (Some(true), _) => "MATCH".into(),
        (Some(false), Some(true)) => "EULER-ONLY".into(),
        (Some(false), _) | (None, Some(false)) => "MISMATCH".into(),
        (None, _) => "INCONCLUSIVE not polynomial-count within the prime list".into(),
    }
}

pub fn count(s: &Session, flags: &Flags) -> Result<Report, String> {
    let primes = flags.primes.clone().or_else(|| s.options.primes.clone()).unwrap_or(DEFAULT_PRIMES.to_vec());
    let budget = flags.budget.or(s.options.budget).unwrap_or(DEFAULT_BUDGET);
    let r = s.seed.cluster_monomial(&s.ks, &s.lam).map_err(|e| e.to_string())?;
    let h1 = h1_lambda(&s.qp, &s.ks, &s.lam).map_err(|e| e.to_string())?;
    let mut qp_r = s.qp.clone();
    for &k in &s.ks {
        qp_r = mutate_qp(&qp_r, k).map_err(|e| e.to_string())?.qp;
    }
    let report = coefficient_crosscheck(&r, &h1, &qp_r, &primes, budget).map_err(|e| e.to_string())?;
    let dims: Vec<i64> = h1.dims.iter().map(|&d| d as i64).collect();
    let mut text = String::new();
    let _ = writeln!(text, "h1 dims {} mode {}", tuple(&dims), if report.hard { "hard" } else { "report" });
    let mut rows = Vec::new();
    for row in &report.rows {
        if row.skipped.as_deref() == Some("gamma exceeds dims") {
            eprintln!("warning: nonzero F-coefficient at {} outside h1 dims", tuple(&row.gamma));
            continue;
        }
        let counts = row.table.as_ref().map_or(String::new(), |t| {
            t.counts.iter().map(|(q, c)| format!("q={q}:{c}")).collect::<Vec<_>>().join(" ")
        });
        let serre = row.table.as_ref().and_then(|t| t.interpolated.as_ref()).map_or("-".into(), render_t);
        let v = verdict(row);
        let _ = writeln!(
            text,
            "gamma {} F {} normalized {} | {} | serre {} | pure {} | {}",
            tuple(&row.gamma),
            row.coefficient.render(),
            row.normalized.render(),
            counts,
            serre,
            yes_no(row.pure),
            v
        );
        rows.push(json!({
            "gamma": row.gamma,
            "coefficient": row.coefficient.render(),
            "normalized": row.normalized.render(),
            "counts": row.table.as_ref().map(|t| t.counts.clone()),
            "serre": serre,
            "shift": row.shift,
            "pure": row.pure,
            "verdict": v,
        }));
    }
    let ok = !report.hard || report.passed();
    let json = json!({ "dims": dims, "hard": report.hard, "rows": rows, "ok": ok });
    Ok(Report { text, json, ok })
}

fn a2_form() -> (Arc<SkewForm>, Matrix) {
    let b = vec![vec![0, 1], vec![-1, 0]];
    (Arc::new(SkewForm::new(b.clone()).expect("skew")), b)
}

/// Dilogarithm identities on A2, plus (given a session) agreement of the
/// conjugation formula with mutation for every variable of the final seed.
pub fn identity_check(s: Option<&Session>, flags: &Flags) -> Result<Report, String> {
    let mut text = String::new();
    let mut checks = Vec::new();
    let mut record = |name: String, pass: bool, text: &mut String| {
        let _ = writeln!(text, "{} {name}", if pass { "PASS" } else { "FAIL" });
        checks.push(json!({ "name": name, "pass": pass }));
        pass
    };
    let mut ok = true;
    let bound = broadcast(flags.cone_bound.as_deref().unwrap_or(&[12]), 2)?;
    let (form, b) = a2_form();
    let one = ConeSeries::one(&form, &b, &bound);
    let e = |c: &[i64], sign: i8| pochhammer(&one, c, sign, DEFAULT_WINDOW).map_err(|e| e.to_string());
    let lhs = e(&[0, 1], 1)?.mul(&e(&[1, 0], 1)?);
    let pent = factorization_check(&lhs, &[e(&[1, 0], 1)?, e(&[1, 1], 1)?, e(&[0, 1], 1)?]);
    ok &= record(format!("pentagon E(x2)E(x1) = E(x1)E(x12)E(x2) to bound {}", tuple(&bound)), pent, &mut text);
    let swapped = e(&[1, 0], 1)?.mul(&e(&[0, 1], 1)?);
    let reversed = factorization_check(&swapped, &[e(&[0, 1], 1)?, e(&[1, 1], 1)?, e(&[1, 0], 1)?]);
    let _ = writeln!(text, "INFO reversed pentagon holds: {}", yes_no(reversed));
    let inv = factorization_check(&one, &[e(&[1, 0], 1)?, e(&[1, 0], -1)?]);
    ok &= record("E(x1) E(x1)^-1 = 1".into(), inv, &mut text);

    let line = ConeSeries::one(&form, &b, &[0, 12]);
    let plus = pochhammer(&line, &[0, 1], 1, 12).map_err(|e| e.to_string())?;
    let c2 = plus.coeff(&[0, 2]).cloned();
    let poch = c2.is_some_and(|c| (0..12).all(|k| c.coeff(4 + 2 * k as i64) == two_part_partitions(k)));
    ok &= record("pochhammer n=2 coefficient = T^2/((1-T)(1-T^2)), 12 terms".into(), poch, &mut text);

    if let Some(s) = s {
        let fin = s.seed.mutate_sequence(&s.ks).map_err(|e| e.to_string())?;
        for j in 0..s.seed.m {
            let sub = Session { lam: unit(s.seed.m, j), ..s.clone() };
            let (el, _) = dt_route(&sub, flags)?;
            let agree = el == fin.vars[j];
            ok &= record(format!("conjugation = mutation for x{} after ks {:?}", j + 1, one_based(&s.ks)), agree, &mut text);
        }
    }
    Ok(Report { text, json: json!({ "checks": checks, "ok": ok }), ok })
}
