//! The calibration corpus and the frozen ceiling file.
//!
//! Every bound with an unspecified constant is audited on a fixed seeded
//! corpus. The ceiling for a theorem is `ceil(1.25 * max C*)` to two decimals,
//! taken over instances whose side conditions hold; later audits compare
//! against it. The file is plain text and byte-stable:
//!
//! ```text
//! # fqgeom ceilings v1
//! # manifest: {"command":"calibrate","d":2,"seed":0,"params":{"qs":"3,7,11","trials":"200"}}
//! # theorem ceiling max_observed qualifying total
//! T2.1 0.450000 0.357000 600 600
//! T1.11 none none 0 600
//! band SUBFIELD 1.538462 2.403846
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{build_inci_subfield, furstenberg_image};
use crate::ffield::{Elem, Field, Point};
use crate::incidence::{
    audit_bound, audit_cs_bounds, audit_moment, audit_rich, spectrum_of, MomentBound, PairSet,
    RichBound, Theorem,
};
use crate::manifest::ExperimentManifest;
use crate::lineworld::{kollar_check, lines_of, motion_to_point, plane_audit};
use crate::motions::{motion_universe, MotionClass, RigidMotion};
use crate::report::{AuditReport, Verdict};
use crate::rng::Lcg;
use crate::{Error, Guardrails, Result};

/// The ceiling file shipped with the crate.
pub const COMMITTED_CEILINGS: &str = include_str!("../data/ceilings.txt");

const HEADER: &str = "# fqgeom ceilings v1";
const MANIFEST_PREFIX: &str = "# manifest: ";

/// Pseudo-theorem id for the plane-richness ratio `max lines / |U|`.
pub const PLANE: &str = "PLANE";
/// Band id for the subfield incidence ratio `I / (|P||R|^(1/3))`.
pub const SUBFIELD: &str = "SUBFIELD";

/// Largest `|U|` in the plane-richness part of the corpus.
pub const PLANE_MAX_U: u64 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub qs: Vec<u32>,
    pub d: usize,
    pub trials: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 0,
            qs: vec![3, 7, 11],
            d: 2,
            trials: 200,
        }
    }
}

impl CorpusSpec {
    pub fn manifest(&self) -> ExperimentManifest {
        let qs: Vec<String> = self.qs.iter().map(u32::to_string).collect();
        ExperimentManifest {
            command: "calibrate".into(),
            d: Some(self.d),
            seed: Some(self.seed),
            params: [
                ("qs".to_string(), qs.join(",")),
                ("trials".to_string(), self.trials.to_string()),
            ]
            .into(),
            ..Default::default()
        }
    }

    pub fn from_manifest(m: &ExperimentManifest) -> Result<CorpusSpec> {
        if m.command != "calibrate" {
            return Err(Error::Parse(format!("manifest command {:?}", m.command)));
        }
        let def = CorpusSpec::default();
        let bad = |k: &str| Error::Parse(format!("manifest parameter {k}"));
        let qs = match m.params.get("qs") {
            Some(s) => s
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| bad("qs")))
                .collect::<Result<_>>()?,
            None => def.qs,
        };
        let trials = match m.params.get("trials") {
            Some(t) => t.parse().map_err(|_| bad("trials"))?,
            None => def.trials,
        };
        Ok(CorpusSpec {
            seed: m.seed.unwrap_or(def.seed),
            qs,
            d: m.d.unwrap_or(def.d),
            trials,
        })
    }
}

/// Motion universes of one order, enumerated once per corpus.
pub struct Universe {
    pub field: Field,
    pub general: Vec<RigidMotion>,
    pub oriented: Vec<RigidMotion>,
}

impl Universe {
    pub fn new(q: u32, d: usize, guard: &Guardrails) -> Result<Universe> {
        if d != 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        let field = Field::from_order(q, guard)?;
        let general = motion_universe(&field, d, MotionClass::General, guard)?;
        let oriented = motion_universe(&field, d, MotionClass::SfPrime, guard)?;
        Ok(Universe {
            field,
            general,
            oriented,
        })
    }
}

/// One seeded trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub q: u32,
    pub trial: u64,
    pub u: Vec<Point>,
    pub v: Vec<Point>,
    /// Random subset of `O(2) x F_q^2`.
    pub motions: Vec<RigidMotion>,
    /// Random subset of `SF'(2,q)`.
    pub oriented: Vec<RigidMotion>,
    /// At most [`PLANE_MAX_U`] points, for the line-world audits.
    pub small_u: Vec<Point>,
}

/// Draws trial `trial` at order `q`. Draw order: `|U|`, `U`, `|V|`, `V`,
/// `|R|`, `R`, `|R'|`, `R'`, `|U_small|`, `U_small`; sizes are uniform in
/// `[1, min(3q, q^2)]`, `[1, |universe|]` and `[1, 8]`.
pub fn corpus_instance(spec: &CorpusSpec, uni: &Universe, trial: u64) -> Instance {
    let f = &uni.field;
    let q = f.q();
    let mut g = Lcg::for_instance(spec.seed, q, trial);
    let cap = (3 * q as u64).min(f.space_size(spec.d));
    let nu = g.range(1, cap) as usize;
    let u = g.points(f, spec.d, nu);
    let nv = g.range(1, cap) as usize;
    let v = g.points(f, spec.d, nv);
    let nr = g.range(1, uni.general.len() as u64) as usize;
    let motions = g.subset(&uni.general, nr);
    let no = g.range(1, uni.oriented.len() as u64) as usize;
    let oriented = g.subset(&uni.oriented, no);
    let ns = g.range(1, PLANE_MAX_U) as usize;
    let small_u = g.points(f, spec.d, ns);
    Instance {
        q,
        trial,
        u,
        v,
        motions,
        oriented,
        small_u,
    }
}

/// Audit families of the corpus, each runnable on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Incidence bounds on `U x V` with `R`; on `U x U` with `R'` and `R`.
    Incidence,
    /// Rich-motion and moment bounds on the full spectrum of `U x U`.
    Spectrum,
    /// Furstenberg image bounds.
    Furstenberg,
    /// Point-line incidences in the line world.
    Kollar,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Incidence,
        Family::Spectrum,
        Family::Furstenberg,
        Family::Kollar,
    ];
}

pub fn family_audits(
    uni: &Universe,
    inst: &Instance,
    family: Family,
) -> Result<Vec<AuditReport>> {
    let f = &uni.field;
    let d = 2;
    let mut out = Vec::new();
    match family {
        Family::Incidence => {
            let uv = PairSet::new(d, &inst.u, &inst.v)?;
            let uu = PairSet::square(d, &inst.u)?;
            for t in [Theorem::T2_1, Theorem::T2_3a, Theorem::T2_3b, Theorem::T2_4] {
                out.push(audit_bound(f, &uv, &inst.motions, t)?);
            }
            out.push(audit_bound(f, &uu, &inst.oriented, Theorem::T2_6)?);
            out.push(audit_bound(f, &uu, &inst.motions, Theorem::T8_2)?);
            let cs = audit_cs_bounds(f, &uu, &inst.motions)?;
            out.push(cs.bound_31);
            out.push(cs.bound_33);
        }
        Family::Spectrum => {
            let uu = PairSet::square(d, &inst.u)?;
            let spectrum = spectrum_of(f, &uu, &uni.general)?;
            out.push(audit_rich(f, &uu, &spectrum, RichBound::C2_2)?);
            out.push(audit_rich(f, &uu, &spectrum, RichBound::C2_5)?);
            for m in [MomentBound::P5_1, MomentBound::P5_2, MomentBound::C8_3] {
                out.push(audit_moment(f, &uu, 3, &spectrum, m)?);
            }
        }
        Family::Furstenberg => {
            let fur = furstenberg_image(f, d, &inst.u, &inst.motions)?;
            out.extend(fur.audits.into_iter().filter(|r| r.theorem != "T1.11"));
            let fur_or = furstenberg_image(f, d, &inst.u, &inst.oriented)?;
            out.extend(fur_or.audits.into_iter().filter(|r| r.theorem == "T1.11"));
        }
        Family::Kollar => {
            let points: Vec<Point> = inst
                .oriented
                .iter()
                .map(|m| motion_to_point(f, m))
                .collect::<Result<_>>()?;
            let lines = lines_of(f, &inst.small_u)?;
            out.push(kollar_check(f, &points, &lines)?);
        }
    }
    Ok(out)
}

/// `max lines in a plane / |U_small|`.
pub fn plane_ratio(uni: &Universe, inst: &Instance, guard: &Guardrails) -> Result<f64> {
    let plane = plane_audit(&uni.field, &inst.small_u, guard)?;
    Ok(plane.max_lines as f64 / inst.small_u.len() as f64)
}

/// Every audit run on one instance, in a fixed order, plus the plane ratio.
pub fn instance_audits(uni: &Universe, inst: &Instance, guard: &Guardrails) -> Result<(Vec<AuditReport>, f64)> {
    let mut out = Vec::new();
    for fam in Family::ALL {
        out.extend(family_audits(uni, inst, fam)?);
    }
    Ok((out, plane_ratio(uni, inst, guard)?))
}

/// A seeded distance instance: `|A|`, `A`, `|B|`, `B`, then a nonzero
/// `lambda`; sizes uniform in `[1, q^2]`.
pub fn distance_instance(f: &Field, seed: u64, trial: u64) -> (Vec<Point>, Vec<Point>, Elem) {
    let mut g = Lcg::for_instance(seed, f.q(), trial);
    let n = f.space_size(2);
    let na = g.range(1, n) as usize;
    let a = g.points(f, 2, na);
    let nb = g.range(1, n) as usize;
    let b = g.points(f, 2, nb);
    let lambda = Elem::from(g.range(1, f.q() as u64 - 1) as u32);
    (a, b, lambda)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CeilingEntry {
    pub ceiling: Option<f64>,
    pub max_observed: Option<f64>,
    pub qualifying: u64,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ceilings {
    pub manifest: CorpusSpec,
    pub entries: BTreeMap<String, CeilingEntry>,
    pub subfield_band: (f64, f64),
}

/// `ceil(1.25 x)` to two decimals.
pub fn ceiling_of(max: f64) -> f64 {
    (max * 1.25 * 100.0).ceil() / 100.0
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "none".into())
}

impl Ceilings {
    pub fn ceiling(&self, theorem: &str) -> Option<f64> {
        self.entries.get(theorem).and_then(|e| e.ceiling)
    }

    /// Marks the report as within its ceiling or a regression.
    pub fn judge(&self, report: AuditReport) -> AuditReport {
        let c = self.ceiling(&report.theorem);
        report.against_ceiling(c)
    }

    pub fn subfield_within_band(&self, ratio: f64) -> bool {
        self.subfield_band.0 <= ratio && ratio <= self.subfield_band.1
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{HEADER}").unwrap();
        writeln!(s, "{MANIFEST_PREFIX}{}", self.manifest.manifest().to_json()).unwrap();
        writeln!(s, "# theorem ceiling max_observed qualifying total").unwrap();
        for (k, e) in &self.entries {
            writeln!(
                s,
                "{k} {} {} {} {}",
                fmt_opt(e.ceiling),
                fmt_opt(e.max_observed),
                e.qualifying,
                e.total
            )
            .unwrap();
        }
        writeln!(
            s,
            "band {SUBFIELD} {:.6} {:.6}",
            self.subfield_band.0, self.subfield_band.1
        )
        .unwrap();
        s
    }

    pub fn parse(text: &str) -> Result<Ceilings> {
        let bad = |line: &str| Error::Parse(format!("bad ceiling line {line:?}"));
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(HEADER) {
            return Err(Error::Parse("missing ceiling file header".into()));
        }
        let mut manifest = None;
        let mut entries = BTreeMap::new();
        let mut band = None;
        for line in lines {
            let line = line.trim();
            if let Some(m) = line.strip_prefix(MANIFEST_PREFIX) {
                manifest = Some(parse_manifest(m)?);
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |t: &str| -> Result<Option<f64>> {
                if t == "none" {
                    Ok(None)
                } else {
                    t.parse().map(Some).map_err(|_| bad(line))
                }
            };
            match parts.as_slice() {
                ["band", SUBFIELD, lo, hi] => {
                    band = Some((
                        num(lo)?.ok_or_else(|| bad(line))?,
                        num(hi)?.ok_or_else(|| bad(line))?,
                    ))
                }
                [k, c, m, n, t] => {
                    entries.insert(
                        k.to_string(),
                        CeilingEntry {
                            ceiling: num(c)?,
                            max_observed: num(m)?,
                            qualifying: n.parse().map_err(|_| bad(line))?,
                            total: t.parse().map_err(|_| bad(line))?,
                        },
                    );
                }
                _ => return Err(bad(line)),
            }
        }
        Ok(Ceilings {
            manifest: manifest.ok_or_else(|| Error::Parse("missing manifest line".into()))?,
            entries,
            subfield_band: band.ok_or_else(|| Error::Parse("missing subfield band".into()))?,
        })
    }

    /// The file shipped with the crate.
    pub fn committed() -> Result<Ceilings> {
        Ceilings::parse(COMMITTED_CEILINGS)
    }
}

fn parse_manifest(json: &str) -> Result<CorpusSpec> {
    CorpusSpec::from_manifest(&ExperimentManifest::from_json(json)?)
}

/// Runs the whole corpus. The result does not depend on the rayon pool size.
pub fn calibrate(spec: &CorpusSpec, guard: &Guardrails) -> Result<Ceilings> {
    let mut per_theorem: BTreeMap<String, CeilingEntry> = BTreeMap::new();
    let mut fold = |name: &str, c: f64, qualifies: bool| {
        let e = per_theorem.entry(name.to_string()).or_insert(CeilingEntry {
            ceiling: None,
            max_observed: None,
            qualifying: 0,
            total: 0,
        });
        e.total += 1;
        if qualifies {
            e.qualifying += 1;
            e.max_observed = Some(e.max_observed.map_or(c, |m: f64| m.max(c)));
        }
    };
    for &q in &spec.qs {
        let uni = Universe::new(q, spec.d, guard)?;
        let results: Vec<(Vec<AuditReport>, f64)> = (0..spec.trials)
            .into_par_iter()
            .map(|t| instance_audits(&uni, &corpus_instance(spec, &uni, t), guard))
            .collect::<Result<_>>()?;
        for (reports, plane_ratio) in results {
            for r in reports.iter().filter(|r| !matches!(r.verdict, Verdict::Pass | Verdict::Fail)) {
                fold(&r.theorem, r.c_star, r.side_conditions_hold());
            }
            fold(PLANE, plane_ratio, true);
        }
    }
    for e in per_theorem.values_mut() {
        e.ceiling = e.max_observed.map(ceiling_of);
    }
    let ratio = build_inci_subfield(3, None, spec.seed, guard)?.ratio;
    let subfield_band = (
        (ratio / 1.25 * 100.0).floor() / 100.0,
        (ratio * 1.25 * 100.0).ceil() / 100.0,
    );
    Ok(Ceilings {
        manifest: spec.clone(),
        entries: per_theorem,
        subfield_band,
    })
}
