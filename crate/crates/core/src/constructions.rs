//! Unions of motion images and the extremal examples.
//!
//! [`furstenberg_image`] computes `B = U_{r in R} phi_r(A)` exactly and audits
//! the lower bounds on `|B|`. The builders produce the three extremal
//! families: the strip `A = F_q^(d-1) x X` moved by `O(d-1) x A`, the cyclic
//! orbit sets around a unit vector over `F_(p^3)`, and subfield point sets with
//! subfield motions.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ffield::{Elem, Field, Point};
use crate::incidence::{incidence_count, residue_hypothesis, PairSet};
use crate::motions::{enumerate_orthogonal, orthogonal_order, so2_generator, MotionClass, OrthoMatrix, RigidMotion};
use crate::report::AuditReport;
use crate::rng::Lcg;
use crate::simplex::count_classes;
use crate::{Error, Guardrails, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FurstenbergInstance {
    pub a: Vec<Point>,
    pub motions: Vec<RigidMotion>,
    pub image: Vec<Point>,
    /// Lower-bound audits, `C* = min(main, unit) / |image|`.
    pub audits: Vec<AuditReport>,
}

impl FurstenbergInstance {
    pub fn audit(&self, theorem: &str) -> Option<&AuditReport> {
        self.audits.iter().find(|r| r.theorem == theorem)
    }
}

fn dedup_sorted<T: Ord + Clone>(xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.sort();
    v.dedup();
    v
}

/// Exact image `U_r phi_r(A)` and the audits of its lower bounds.
pub fn furstenberg_image(
    f: &Field,
    d: usize,
    a: &[Point],
    motions: &[RigidMotion],
) -> Result<FurstenbergInstance> {
    if let Some(x) = a.iter().find(|x| x.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.dim(),
        });
    }
    if let Some(r) = motions.iter().find(|r| r.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: r.dim(),
        });
    }
    let a = dedup_sorted(a);
    let motions = dedup_sorted(motions);
    let image: BTreeSet<Point> = motions
        .par_iter()
        .fold(BTreeSet::new, |mut s, r| {
            s.extend(a.iter().map(|x| r.apply(f, x)));
            s
        })
        .reduce(BTreeSet::new, |mut s, t| {
            s.extend(t);
            s
        });
    let image: Vec<Point> = image.into_iter().collect();
    let audits = furstenberg_audits(f, d, a.len() as u64, &motions, image.len() as u128)?;
    Ok(FurstenbergInstance {
        a,
        motions,
        image,
        audits,
    })
}

fn furstenberg_audits(
    f: &Field,
    d: usize,
    na: u64,
    motions: &[RigidMotion],
    lhs: u128,
) -> Result<Vec<AuditReport>> {
    let q = f.q() as u64;
    let nr = motions.len() as u64;
    let qd = (q as f64).powi(d as i32);
    let od1 = orthogonal_order(f, d.saturating_sub(1))? as f64;
    let (a, r) = (na as f64, nr as f64);
    let a2 = na as u128 * na as u128;
    let qpow = |e: usize| (q as u128).pow(e as u32);
    let residue = residue_hypothesis(f, d);
    let sized = |rep: AuditReport| rep.size("A", na).size("R", nr);
    let mut out = vec![
        sized(AuditReport::lower("T1.8", f.q(), d, lhs, qd, a * r / (qd * od1))),
        sized(
            AuditReport::lower(
                "T1.9(1)",
                f.q(),
                d,
                lhs,
                qd,
                a * r / ((q as f64).powi(d as i32 - 1) * od1),
            )
            .condition("(d >= 3 odd) or (d = 2 mod 4 and q = 3 mod 4)", residue)
            .condition("|A| < q^((d-1)/2)", a2 < qpow(d - 1)),
        ),
        sized(
            AuditReport::lower(
                "T1.9(2)",
                f.q(),
                d,
                lhs,
                qd,
                r / ((q as f64).powf((d as f64 - 1.0) / 2.0) * od1),
            )
            .condition("(d >= 3 odd) or (d = 2 mod 4 and q = 3 mod 4)", residue)
            .condition(
                "q^((d-1)/2) <= |A| <= q^((d+1)/2)",
                qpow(d - 1) <= a2 && a2 <= qpow(d + 1),
            ),
        ),
        sized(
            AuditReport::lower("T1.10", f.q(), d, lhs, qd, a.sqrt() * r / q as f64)
                .condition("d = 2", d == 2)
                .condition("q = 3 mod 4", f.q_mod_4() == 3),
        ),
    ];
    let r35 = r.powf(0.6);
    let (a5, r128) = ((na as u128).pow(5), nr as u128);
    out.push(sized(
        AuditReport::lower("T1.11", f.q(), d, lhs, r35, r35)
            .condition("d = 2", d == 2)
            .condition("q = 3 mod 4", f.q_mod_4() == 3)
            .condition(
                "R in SF'(2,q)",
                motions.iter().all(|m| MotionClass::SfPrime.contains(m)),
            )
            // 2|R|^(1/5) < |A| < |R|^(3/5)  <=>  32|R| < |A|^5 < |R|^3
            .condition(
                "2|R|^(1/5) < |A| < |R|^(3/5)",
                32 * r128 < a5 && a5 < r128.pow(3),
            ),
    ));
    Ok(out)
}

/// Whether `x` is an arithmetic progression `{a, a+s, ..., a+(n-1)s}`.
pub fn is_progression(f: &Field, x: &[Elem]) -> bool {
    let set: BTreeSet<Elem> = x.iter().copied().collect();
    let n = set.len();
    if n <= 2 {
        return true;
    }
    set.iter().any(|&start| {
        f.nonzero().any(|step| {
            let mut cur = start;
            (0..n).all(|_| {
                let ok = set.contains(&cur);
                cur = f.add(cur, step);
                ok
            })
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fur1Strip {
    pub x: Vec<Elem>,
    pub instance: FurstenbergInstance,
    /// `X + X`.
    pub sumset: Vec<Elem>,
    /// Image inside `F_q^(d-1) x (X + X)`.
    pub within_strip: bool,
    pub progression: bool,
    /// `|image| <= 2|A|`.
    pub doubling_bound: bool,
}

/// `A = (F_q^(d-1) x {0}) + {(0,...,0,x) : x in X}` and `R = O(d-1) x A`.
pub fn build_fur1_strip(f: &Field, d: usize, x: &[Elem], guard: &Guardrails) -> Result<Fur1Strip> {
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let x = dedup_sorted(x);
    for t in &x {
        f.elem(t.index())?;
    }
    let base: Vec<Point> = f.points(d - 1).collect();
    let mut a = Vec::with_capacity(base.len() * x.len());
    for y in &base {
        for t in &x {
            let mut p = Point::zero(d);
            for j in 0..d - 1 {
                p.set(j, y.get(j));
            }
            p.set(d - 1, *t);
            a.push(p);
        }
    }
    a.sort();
    let group: Vec<OrthoMatrix> = enumerate_orthogonal(f, d - 1, guard)?
        .iter()
        .map(OrthoMatrix::embed_up)
        .collect();
    guard.check_work("strip motions", group.len() as u128 * a.len() as u128 * a.len() as u128)?;
    let motions: Vec<RigidMotion> = group
        .iter()
        .flat_map(|g| a.iter().map(move |z| RigidMotion { g: *g, z: *z }))
        .collect();
    let instance = furstenberg_image(f, d, &a, &motions)?;
    let sumset: BTreeSet<Elem> = x
        .iter()
        .flat_map(|s| x.iter().map(move |t| f.add(*s, *t)))
        .collect();
    let within_strip = instance
        .image
        .iter()
        .all(|p| sumset.contains(&p.get(d - 1)));
    let progression = is_progression(f, &x);
    let doubling_bound = instance.image.len() <= 2 * instance.a.len();
    Ok(Fur1Strip {
        x,
        instance,
        sumset: sumset.into_iter().collect(),
        within_strip,
        progression,
        doubling_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceSet {
    pub lambda: Elem,
    pub beta: Elem,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sec3Cyclic {
    pub p: u32,
    pub q: u32,
    pub k: u64,
    pub x: Vec<Elem>,
    pub v: Point,
    pub theta: OrthoMatrix,
    pub a: Vec<Point>,
    /// `|A| = (|X| + 1) k`.
    pub size_identity: bool,
    /// `{||a - b|| : a in A_lambda, b in A_beta}` sizes, `lambda, beta in X + {1}`.
    pub distance_sets: Vec<DistanceSet>,
    pub max_distance_set: usize,
    /// Triangle classes with one vertex at the origin and two in `A`.
    pub class_count: u64,
    /// `2 * sum |D(lambda, beta)|`: at most two ranks per norm triple.
    pub class_bound: u64,
    pub report: AuditReport,
}

/// Orbit sets `A = U_{t in X + {1}} {t theta^j v}` over `F_(p^3)` with
/// `theta` of order `k`, and `C = {0}`.
pub fn build_sec3_cyclic(p: u32, k: u64, x: &[u32], guard: &Guardrails) -> Result<Sec3Cyclic> {
    if p % 4 != 3 {
        return Err(Error::BadParameters(format!("p = {p} is not 3 mod 4")));
    }
    let f = Field::with_guardrails(p, 3, guard)?;
    let q = f.q() as u64;
    if k == 0 || (q + 1) % k != 0 {
        return Err(Error::BadParameters(format!("k = {k} does not divide q + 1 = {}", q + 1)));
    }
    let x: Vec<Elem> = dedup_sorted(&x.iter().map(|&i| f.elem(i)).collect::<Result<Vec<_>>>()?);
    if let Some(t) = x.iter().find(|t| t.index() <= 1) {
        return Err(Error::BadParameters(format!("X contains {t}, but 0 and 1 are excluded")));
    }
    if let Some(t) = x.iter().find(|t| x.contains(&f.neg(**t))) {
        return Err(Error::BadParameters(format!("X contains both {t} and its negative")));
    }
    let minus_one = f.neg(Elem::ONE);
    if k % 2 == 0 && x.contains(&minus_one) {
        // -I lies in the cyclic subgroup, so the orbit of -v is the orbit of v
        return Err(Error::BadParameters(
            "X contains -1 while k is even, so A_{-1} = A_1".into(),
        ));
    }
    let v = f
        .points(2)
        .find(|u| f.norm(u) == Elem::ONE)
        .expect("the unit circle is nonempty");
    let theta = so2_generator(&f)?.pow(&f, (q + 1) / k);
    let mut orbit = Vec::with_capacity(k as usize);
    let mut cur = v;
    for _ in 0..k {
        orbit.push(cur);
        cur = theta.apply(&f, &cur);
    }
    let scales: Vec<Elem> = std::iter::once(Elem::ONE).chain(x.iter().copied()).collect();
    let parts: Vec<Vec<Point>> = scales
        .iter()
        .map(|t| orbit.iter().map(|u| f.scale_pt(*t, u)).collect())
        .collect();
    let a = dedup_sorted(&parts.concat());
    let size_identity = a.len() as u64 == (x.len() as u64 + 1) * k;
    let mut distance_sets = Vec::new();
    for (i, pi) in parts.iter().enumerate() {
        for (j, pj) in parts.iter().enumerate() {
            let ds: BTreeSet<Elem> = pi
                .iter()
                .flat_map(|s| pj.iter().map(|t| f.dist(s, t)))
                .collect();
            distance_sets.push(DistanceSet {
                lambda: scales[i],
                beta: scales[j],
                size: ds.len(),
            });
        }
    }
    let max_distance_set = distance_sets.iter().map(|s| s.size).max().unwrap_or(0);
    let census = count_classes(&f, 2, &[vec![Point::zero(2)], a.clone(), a.clone()], guard)?;
    let class_count = census.class_count() as u64;
    let class_bound = 2 * distance_sets.iter().map(|s| s.size as u64).sum::<u64>();
    let report = AuditReport::upper("SH3", f.q(), 2, class_count as u128, 0.0, (q as f64).powi(3))
        .size("A", a.len() as u64)
        .size("k", k)
        .size("X", x.len() as u64)
        .size("max_distance_set", max_distance_set as u64)
        .condition("|A| = (|X|+1)k", size_identity)
        .condition("distance sets <= 2k", max_distance_set as u64 <= 2 * k)
        .condition("classes <= 2 * sum |D|", class_count <= class_bound);
    Ok(Sec3Cyclic {
        p,
        q: f.q(),
        k,
        x,
        v,
        theta,
        a,
        size_identity,
        distance_sets,
        max_distance_set,
        class_count,
        class_bound,
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InciSubfield {
    pub p: u32,
    pub q: u32,
    pub u: Vec<Point>,
    pub pairs: u64,
    pub motion_count: u64,
    pub incidences: u64,
    /// `I / (|P| |R|^(1/3))`.
    pub ratio: f64,
}

/// Default `|U|`: `round(p^(3/2))`, so that `|P| = |U|^2` is close to `p^3`.
pub fn subfield_u_size(p: u32) -> usize {
    (p as f64).powf(1.5).round() as usize
}

/// Subfield motions `O(2,p) x F_p^2` acting on `U x U`, `U` a seeded subset
/// of the subfield plane inside `F_(p^3)^2`.
pub fn build_inci_subfield(
    p: u32,
    u_size: Option<usize>,
    seed: u64,
    guard: &Guardrails,
) -> Result<InciSubfield> {
    if p % 4 != 3 {
        return Err(Error::BadParameters(format!("p = {p} is not 3 mod 4")));
    }
    if p >= 7 {
        guard.check("subfield instance order p^3", (p as u128).pow(3), 27)?;
    }
    let base = Field::new(p, 1)?;
    let f = Field::with_guardrails(p, 3, guard)?;
    let lift = |x: &Point| -> Result<Point> {
        let idx: Vec<u32> = x.coords().iter().map(|e| e.index()).collect();
        f.point(&idx)
    };
    let plane: Vec<Point> = base.points(2).collect();
    let n = u_size.unwrap_or_else(|| subfield_u_size(p));
    if n > plane.len() {
        return Err(Error::BadParameters(format!(
            "|U| = {n} exceeds the {} subfield points",
            plane.len()
        )));
    }
    let u: Vec<Point> = Lcg::new(seed)
        .subset(&plane, n)
        .iter()
        .map(lift)
        .collect::<Result<_>>()?;
    let group = enumerate_orthogonal(&base, 2, guard)?;
    let mut motions = Vec::with_capacity(group.len() * plane.len());
    for g in &group {
        let g = g.reindex(&f)?;
        for z in &plane {
            motions.push(RigidMotion { g, z: lift(z)? });
        }
    }
    let pairs = PairSet::square(2, &u)?;
    let incidences = incidence_count(&f, &pairs, &motions)?;
    let (np, nr) = (pairs.len(), motions.len() as u64);
    let ratio = if np == 0 {
        0.0
    } else {
        incidences as f64 / (np as f64 * (nr as f64).cbrt())
    };
    Ok(InciSubfield {
        p,
        q: f.q(),
        u,
        pairs: np,
        motion_count: nr,
        incidences,
        ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipeKind {
    Sec3Cyclic,
    Fur1Strip,
    InciSubfield,
}

/// A replayable description of one extremal instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharpnessRecipe {
    pub kind: RecipeKind,
    pub p: u32,
    #[serde(default = "one")]
    pub r: u32,
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default)]
    pub k: Option<u64>,
    /// Element indices.
    #[serde(default, rename = "X")]
    pub x: Vec<u32>,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> u32 {
    1
}

fn two() -> usize {
    2
}

impl SharpnessRecipe {
    /// Builds the instance and returns its JSON report.
    pub fn run(&self, guard: &Guardrails) -> Result<serde_json::Value> {
        let value = match self.kind {
            RecipeKind::Sec3Cyclic => {
                if self.r != 3 {
                    return Err(Error::BadParameters("the cyclic recipe needs r = 3".into()));
                }
                let k = self
                    .k
                    .ok_or_else(|| Error::BadParameters("the cyclic recipe needs k".into()))?;
                serde_json::to_value(build_sec3_cyclic(self.p, k, &self.x, guard)?)
            }
            RecipeKind::Fur1Strip => {
                let f = Field::with_guardrails(self.p, self.r, guard)?;
                let x = self
                    .x
                    .iter()
                    .map(|&i| f.elem(i))
                    .collect::<Result<Vec<_>>>()?;
                serde_json::to_value(build_fur1_strip(&f, self.d, &x, guard)?)
            }
            RecipeKind::InciSubfield => {
                if self.r != 3 {
                    return Err(Error::BadParameters("the subfield recipe needs r = 3".into()));
                }
                let u = self.k.map(|k| k as usize);
                serde_json::to_value(build_inci_subfield(self.p, u, self.seed, guard)?)
            }
        };
        Ok(value.expect("reports serialize"))
    }
}
