use std::collections::BTreeSet;

use fqgeom::calibrate::{
    calibrate, corpus_instance, distance_instance, family_audits, CorpusSpec, Ceilings, Family,
    Instance, Universe, PLANE,
};
use fqgeom::constructions::{RecipeKind, SharpnessRecipe};
use fqgeom::incidence::triple_correlation;
use fqgeom::lineworld::{line_from_pair, plane_audit};
use fqgeom::motions::{enumerate_orthogonal, motion_universe, orthogonal_order, so2_generator};
use fqgeom::report::Verdict;
use fqgeom::rng::Lcg;
use fqgeom::simplex::{apex_profile, audit_distance, count_classes, extension_discriminant, mu_formula};
use fqgeom::{AuditReport, Field, Guardrails, MotionClass, Point};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{emit, Output};
use crate::{AuditCmd, Cli, Cmd, CorpusArgs, SharpCmd};

type Res<T> = Result<T, String>;

fn field(q: u32, guard: &Guardrails) -> Res<Field> {
    Field::from_order(q, guard).map_err(|e| format!("--q {q}: {e}"))
}

fn lib<T>(what: &str, r: fqgeom::Result<T>) -> Res<T> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn ceilings(cli: &Cli) -> Res<Ceilings> {
    match &cli.ceilings {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("--ceilings {}: {e}", p.display()))?;
            Ceilings::parse(&text).map_err(|e| format!("--ceilings: {e}"))
        }
        None => Ceilings::committed().map_err(|e| format!("committed ceilings: {e}")),
    }
}

fn bad_verdict(r: &AuditReport) -> bool {
    matches!(r.verdict, Verdict::Fail | Verdict::Regression)
}

fn parse_indices(flag: &str, s: &str) -> Res<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("{flag}: {t:?} is not an element index")))
        .collect()
}

/// Runs the command; `Ok(false)` means a regression or a failed exact check.
pub fn dispatch(cli: &Cli) -> Res<bool> {
    let guard = if cli.force {
        log::warn!("--force: size guardrails are disabled");
        Guardrails::forced()
    } else {
        Guardrails::default()
    };
    let cmd = cli
        .cmd
        .as_ref()
        .ok_or_else(|| "a subcommand or --manifest is required".to_string())?;
    let (out, ok) = match cmd {
        Cmd::Field(a) => (field_cmd(a.q, a.list, &guard)?, true),
        Cmd::Group(a) => (group_cmd(a.q, a.d, &a.class, a.list, &guard)?, true),
        Cmd::Audit { which } => audit_cmd(cli, which, &guard)?,
        Cmd::Census(a) => census_cmd(a.q, a.d, a.k, &a.set, a.seed, &guard)?,
        Cmd::MuTable(a) => mu_table(a.q, &guard)?,
        Cmd::Lines(a) => (lines_cmd(a.q, &a.points, a.seed, &guard)?, true),
        Cmd::Sharpness { which } => sharpness_cmd(cli, which, &guard)?,
        Cmd::Calibrate(a) => {
            let qs = parse_indices("--qs", &a.qs)?;
            let spec = CorpusSpec {
                seed: a.seed,
                qs,
                d: a.d,
                trials: a.trials,
            };
            let text = lib("calibrate", calibrate(&spec, &guard))?.to_text();
            if a.check {
                let expected = ceilings(cli)?.to_text();
                let same = expected == text;
                if !same {
                    eprintln!("calibration differs from the ceiling file");
                }
                return Ok(same);
            }
            (Output::Text(text), true)
        }
    };
    emit(&out, cli.format, cli.out.as_deref())?;
    Ok(ok)
}

fn field_cmd(q: u32, list: bool, guard: &Guardrails) -> Res<Output> {
    let f = field(q, guard)?;
    if list {
        let rows = f
            .elements()
            .map(|x| {
                json!({
                    "element": x.index(),
                    "coeffs": f.coeffs(x),
                    "character": f.quad_char(x),
                    "sqrt": f.sqrt_all(x).iter().map(|s| s.index()).collect::<Vec<_>>(),
                })
            })
            .collect();
        return Ok(Output::Rows(rows));
    }
    let squares = f.nonzero().filter(|&x| f.quad_char(x) == 1).count();
    Ok(Output::Rows(vec![json!({
        "p": f.p(),
        "r": f.r(),
        "q": f.q(),
        "q_mod_4": f.q_mod_4(),
        "modulus": f.modulus(),
        "nonzero_squares": squares,
    })]))
}

fn group_cmd(q: u32, d: usize, class: &str, list: bool, guard: &Guardrails) -> Res<Output> {
    let f = field(q, guard)?;
    let class: MotionClass = class.parse().map_err(|e| format!("--class: {e}"))?;
    let universe = lib("--class", motion_universe(&f, d, class, guard))?;
    if list {
        return Ok(Output::Rows(
            universe
                .iter()
                .enumerate()
                .map(|(i, m)| json!({"index": i, "motion": m.to_string()}))
                .collect(),
        ));
    }
    let order = lib("--d", orthogonal_order(&f, d))?;
    let enumerated = lib("--d", enumerate_orthogonal(&f, d, guard))?.len();
    let generator = (d == 2)
        .then(|| so2_generator(&f).ok())
        .flatten()
        .map(|g| json!({"matrix": g.to_string(), "order": g.order(&f)}));
    Ok(Output::Rows(vec![json!({
        "q": q,
        "d": d,
        "orthogonal_order": order,
        "enumerated": enumerated,
        "class": class,
        "class_size": universe.len(),
        "so2_generator": generator,
    })]))
}

fn corpus(a: &CorpusArgs, guard: &Guardrails) -> Res<(CorpusSpec, Universe)> {
    let spec = CorpusSpec {
        seed: a.seed,
        qs: vec![a.q],
        d: a.d,
        trials: a.trials,
    };
    field(a.q, guard)?;
    let uni = Universe::new(a.q, a.d, guard).map_err(|e| format!("--d {}: {e}", a.d))?;
    Ok((spec, uni))
}

fn per_trial<T: Send>(
    a: &CorpusArgs,
    guard: &Guardrails,
    job: impl Fn(&Universe, &Instance) -> fqgeom::Result<T> + Sync,
) -> Res<Vec<T>> {
    let (spec, uni) = corpus(a, guard)?;
    (0..spec.trials)
        .into_par_iter()
        .map(|t| job(&uni, &corpus_instance(&spec, &uni, t)))
        .collect::<fqgeom::Result<Vec<T>>>()
        .map_err(|e| format!("audit: {e}"))
}

fn family(cli: &Cli, a: &CorpusArgs, fam: Family, only: &Option<String>, flag: &str, known: &[&str], guard: &Guardrails) -> Res<(Output, bool)> {
    if let Some(t) = only {
        if !known.contains(&t.as_str()) {
            return Err(format!("{flag}: unknown id {t:?} (expected one of {})", known.join(", ")));
        }
    }
    let ceil = ceilings(cli)?;
    let reports: Vec<AuditReport> = per_trial(a, guard, |uni, inst| family_audits(uni, inst, fam))?
        .into_iter()
        .flatten()
        .filter(|r| only.as_ref().is_none_or(|t| &r.theorem == t))
        .map(|r| ceil.judge(r))
        .collect();
    let ok = !reports.iter().any(bad_verdict);
    Ok((Output::Reports(reports), ok))
}

fn audit_cmd(cli: &Cli, which: &AuditCmd, guard: &Guardrails) -> Res<(Output, bool)> {
    match which {
        AuditCmd::Incidence { corpus, theorem } => family(
            cli,
            corpus,
            Family::Incidence,
            theorem,
            "--theorem",
            &["T2.1", "T2.3(1)", "T2.3(2)", "T2.4", "T2.6", "T8.2", "CS3.1", "CS3.3"],
            guard,
        ),
        AuditCmd::Moment { corpus, bound } => family(
            cli,
            corpus,
            Family::Spectrum,
            bound,
            "--bound",
            &["C2.2", "C2.5", "P5.1", "P5.2", "C8.3"],
            guard,
        ),
        AuditCmd::Fur { corpus, theorem } => family(
            cli,
            corpus,
            Family::Furstenberg,
            theorem,
            "--theorem",
            &["T1.8", "T1.9(1)", "T1.9(2)", "T1.10", "T1.11"],
            guard,
        ),
        AuditCmd::Kollar { corpus } => family(cli, corpus, Family::Kollar, &None, "", &[], guard),
        AuditCmd::Distance { corpus: a } => {
            if a.d != 2 {
                return Err(format!("--d {}: the distance audit is planar", a.d));
            }
            let f = field(a.q, guard)?;
            let reports: Vec<AuditReport> = (0..a.trials)
                .into_par_iter()
                .map(|t| {
                    let (x, y, lambda) = distance_instance(&f, a.seed, t);
                    audit_distance(&f, &x, &y, lambda)
                })
                .collect();
            let ok = !reports.iter().any(bad_verdict);
            Ok((Output::Reports(reports), ok))
        }
        AuditCmd::Triple { corpus: a } => {
            let rows = per_trial(a, guard, |uni, inst| {
                let t = triple_correlation(&uni.field, &inst.u, &inst.v, &inst.small_u, &inst.motions)?;
                let mut v = serde_json::to_value(&t).expect("serializes");
                v["trial"] = json!(inst.trial);
                v["q"] = json!(inst.q);
                Ok(v)
            })?;
            let ok = rows
                .iter()
                .all(|r| r["within_333"] == json!(true) && r["within_442"] == json!(true));
            Ok((Output::Rows(rows), ok))
        }
        AuditCmd::Plane { corpus: a } => {
            let ceiling = ceilings(cli)?.ceiling(PLANE);
            let rows = per_trial(a, guard, |uni, inst| {
                let pa = plane_audit(&uni.field, &inst.small_u, guard)?;
                let n = inst.small_u.len() as u64;
                let ratio = pa.max_lines as f64 / n as f64;
                let within = ceiling.is_none_or(|c| ratio <= c) && pa.max_lines <= 4 * n;
                Ok(json!({
                    "q": inst.q,
                    "trial": inst.trial,
                    "u_size": n,
                    "line_count": pa.line_count,
                    "max_lines": pa.max_lines,
                    "plane": pa.plane.map(|p| p.to_string()),
                    "ratio": ratio,
                    "ceiling": ceiling,
                    "within_4u": pa.max_lines <= 4 * n,
                    "verdict": if within { "within_ceiling" } else { "regression" },
                }))
            })?;
            let ok = rows.iter().all(|r| r["verdict"] == json!("within_ceiling"));
            Ok((Output::Rows(rows), ok))
        }
    }
}

fn point_set(f: &Field, d: usize, spec: &str, seed: u64, flag: &str) -> Res<Vec<Point>> {
    if spec == "full-plane" {
        return Ok(f.points(d).collect());
    }
    if let Some(n) = spec.strip_prefix("random:") {
        let n: usize = n.parse().map_err(|_| format!("{flag}: {spec:?} needs random:N"))?;
        if n as u64 > f.space_size(d) {
            return Err(format!("{flag}: {n} distinct points do not fit in F_{}^{d}", f.q()));
        }
        return Ok(Lcg::new(seed).points(f, d, n));
    }
    let text = if spec.trim_start().starts_with('[') {
        spec.replace(';', "\n")
    } else {
        std::fs::read_to_string(spec).map_err(|e| format!("{flag} {spec}: {e}"))?
    };
    let mut pts = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let p = f.parse_point(line).map_err(|e| format!("{flag}: {e}"))?;
        if p.dim() != d {
            return Err(format!("{flag}: point {p} is not in dimension {d}"));
        }
        pts.push(p);
    }
    let set: BTreeSet<Point> = pts.into_iter().collect();
    Ok(set.into_iter().collect())
}

fn census_cmd(q: u32, d: usize, k: usize, set: &str, seed: u64, guard: &Guardrails) -> Res<(Output, bool)> {
    let f = field(q, guard)?;
    if k == 0 {
        return Err("--k: must be at least 1".into());
    }
    let a = point_set(&f, d, set, seed, "--set")?;
    let sets = vec![a.clone(); k + 1];
    let census = lib("census", count_classes(&f, d, &sets, guard))?;
    let expected = (a.len() as u128).pow(k as u32 + 1);
    let ok = census.total as u128 == expected && census.cauchy_schwarz_holds();
    eprintln!(
        "census q={q} d={d} k={k} |A|={} tuples={} classes={} nondegenerate={} degenerate_tuples={} cauchy_schwarz={}",
        a.len(),
        census.total,
        census.class_count(),
        census.nondegenerate_class_count(),
        census.degenerate_count,
        census.cauchy_schwarz_holds()
    );
    Ok((Output::Census(census), ok))
}

fn mu_table(q: u32, guard: &Guardrails) -> Res<(Output, bool)> {
    let f = field(q, guard)?;
    let origin = Point::zero(2);
    let mut rows = Vec::new();
    let mut ok = true;
    for l1 in f.nonzero() {
        let y = f
            .points(2)
            .find(|y| f.norm(y) == l1)
            .ok_or_else(|| format!("no point of norm {l1}"))?;
        let profile = apex_profile(&f, &origin, &y);
        for l2 in f.elements() {
            for l3 in f.elements() {
                let mu = mu_formula(&f, l1, l2, l3);
                let w = profile[(l2.index() * q + l3.index()) as usize];
                ok &= w == mu as u32;
                rows.push(json!({
                    "l1": l1.index(),
                    "l2": l2.index(),
                    "l3": l3.index(),
                    "discriminant": extension_discriminant(&f, l1, l2, l3).index(),
                    "mu": mu,
                    "witnesses": w,
                }));
            }
        }
    }
    Ok((Output::Rows(rows), ok))
}

fn lines_cmd(q: u32, points: &str, seed: u64, guard: &Guardrails) -> Res<Output> {
    let f = field(q, guard)?;
    let u = point_set(&f, 2, points, seed, "--points")?;
    let mut rows = Vec::new();
    for a in &u {
        for b in &u {
            let l = line_from_pair(&f, a, b).map_err(|e| format!("--points: {e}"))?;
            rows.push(json!({"p": a.to_string(), "p2": b.to_string(), "line": l.to_string()}));
        }
    }
    Ok(Output::Rows(rows))
}

fn sharpness_cmd(cli: &Cli, which: &SharpCmd, guard: &Guardrails) -> Res<(Output, bool)> {
    let recipe = match which {
        SharpCmd::Sec3 { p, k, x } => SharpnessRecipe {
            kind: RecipeKind::Sec3Cyclic,
            p: *p,
            r: 3,
            d: 2,
            k: Some(*k),
            x: parse_indices("--x", x)?,
            seed: 0,
        },
        SharpCmd::Fur1 { q, d, x } => {
            let f = field(*q, guard)?;
            SharpnessRecipe {
                kind: RecipeKind::Fur1Strip,
                p: f.p(),
                r: f.r(),
                d: *d,
                k: None,
                x: parse_indices("--x", x)?,
                seed: 0,
            }
        }
        SharpCmd::Subfield { p, u, seed } => SharpnessRecipe {
            kind: RecipeKind::InciSubfield,
            p: *p,
            r: 3,
            d: 2,
            k: u.map(|u| u as u64),
            x: Vec::new(),
            seed: *seed,
        },
    };
    let result = lib("sharpness", recipe.run(guard))?;
    let mut checks = serde_json::Map::new();
    match recipe.kind {
        RecipeKind::Sec3Cyclic => {
            let k = recipe.k.unwrap_or(0);
            checks.insert("size_identity".into(), result["size_identity"].clone());
            let max = result["max_distance_set"].as_u64().unwrap_or(u64::MAX);
            checks.insert("distance_set_within_2k".into(), json!(max <= 2 * k));
        }
        RecipeKind::Fur1Strip => {
            checks.insert("within_strip".into(), result["within_strip"].clone());
            let prog = result["progression"] == json!(true);
            let dbl = result["doubling_bound"] == json!(true);
            checks.insert("doubling_if_progression".into(), json!(!prog || dbl));
        }
        RecipeKind::InciSubfield => {
            let ratio = result["ratio"].as_f64().unwrap_or(f64::NAN);
            let c = ceilings(cli)?;
            checks.insert("band".into(), json!([c.subfield_band.0, c.subfield_band.1]));
            checks.insert("within_band".into(), json!(c.subfield_within_band(ratio)));
        }
    }
    let ok = checks.values().all(|v| !matches!(v, Value::Bool(false)));
    let row = json!({"recipe": recipe, "checks": checks, "result": result});
    Ok((Output::Rows(vec![row]), ok))
}
