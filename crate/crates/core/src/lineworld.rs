//! Oriented planar motions as points of `F_q^3`, point pairs as lines.
//!
//! For `q = 3 mod 4`, `phi(r) = [[c, -s], [s, c]]` with `c = (r^2-1)/(r^2+1)`,
//! `s = 2r/(r^2+1)` is a bijection `F_q -> SO(2,q) \ {I}`. A motion `(g, z)`
//! with `g = phi(r)` becomes the point `((I-g)^-1 z, r)`, and the motions
//! sending `p` to `p'` fill the line
//! `((p+p')/2, 0) + r((p-p')^perp/2, 1)`, `(a, b)^perp = (b, -a)`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::ffield::{Elem, Field, Point};
use crate::incidence::{incidence_count, PairSet};
use crate::motions::{MotionClass, OrthoMatrix, RigidMotion};
use crate::report::AuditReport;
use crate::{Error, Guardrails, Result};

fn require_3_mod_4(f: &Field) -> Result<()> {
    if f.q_mod_4() == 3 {
        Ok(())
    } else {
        Err(Error::WrongResidue { q: f.q() })
    }
}

pub fn phi_of(f: &Field, r: Elem) -> Result<OrthoMatrix> {
    require_3_mod_4(f)?;
    let r2 = f.square(r);
    let den = f.inv(f.add(r2, Elem::ONE)).expect("r^2 + 1 != 0 when q = 3 mod 4");
    let c = f.mul(f.sub(r2, Elem::ONE), den);
    let s = f.mul(f.add(r, r), den);
    OrthoMatrix::from_rows(f, &[vec![c, f.neg(s)], vec![s, c]])
}

/// The `r` with `phi(r) = g`, namely `s / (1 - c)`.
pub fn phi_inverse(f: &Field, g: &OrthoMatrix) -> Result<Elem> {
    require_3_mod_4(f)?;
    if g.dim() != 2 || g.det() != Elem::ONE || g.is_identity() {
        return Err(Error::NotInDomain);
    }
    let (c, s) = (g.entry(0, 0), g.entry(1, 0));
    f.div(s, f.sub(Elem::ONE, c)).ok_or(Error::NotInDomain)
}

/// `(I - g)^-1 x` for a planar rotation `g != I`.
fn fixed_point_solve(f: &Field, g: &OrthoMatrix, x: &Point) -> Point {
    // I - g = [[a, b], [-b, a]] with a = 1 - c, b = s
    let a = f.sub(Elem::ONE, g.entry(0, 0));
    let b = g.entry(1, 0);
    let inv_det = f
        .inv(f.add(f.square(a), f.square(b)))
        .expect("I - g invertible for a rotation g != I");
    let (x1, x2) = (x.get(0), x.get(1));
    let y1 = f.mul(inv_det, f.sub(f.mul(a, x1), f.mul(b, x2)));
    let y2 = f.mul(inv_det, f.add(f.mul(b, x1), f.mul(a, x2)));
    Point::new(&[y1, y2]).expect("planar")
}

fn lift(xy: &Point, t: Elem) -> Point {
    Point::new(&[xy.get(0), xy.get(1), t]).expect("three coordinates")
}

/// `((I - g)^-1 z, phi^-1(g))`; only oriented non-translations qualify.
pub fn motion_to_point(f: &Field, m: &RigidMotion) -> Result<Point> {
    if !MotionClass::SfPrime.contains(m) {
        return Err(Error::NotOriented(m.to_string()));
    }
    let r = phi_inverse(f, &m.g)?;
    Ok(lift(&fixed_point_solve(f, &m.g, &m.z), r))
}

/// A line of `F_q^3`, stored canonically: the last nonzero coordinate of
/// `dir` is 1 and `base` is zero in that coordinate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Line3 {
    base: Point,
    dir: Point,
}

impl Line3 {
    pub fn new(f: &Field, base: Point, dir: Point) -> Result<Line3> {
        for p in [&base, &dir] {
            if p.dim() != 3 {
                return Err(Error::DimensionMismatch {
                    expected: 3,
                    found: p.dim(),
                });
            }
        }
        let j = (0..3)
            .rev()
            .find(|&j| !dir.get(j).is_zero())
            .ok_or_else(|| Error::BadParameters("line direction must be nonzero".into()))?;
        let dir = f.scale_pt(f.inv(dir.get(j)).expect("nonzero"), &dir);
        let base = f.sub_pt(&base, &f.scale_pt(base.get(j), &dir));
        Ok(Line3 { base, dir })
    }

    pub fn base(&self) -> Point {
        self.base
    }

    pub fn dir(&self) -> Point {
        self.dir
    }

    fn pivot(&self) -> usize {
        (0..3).rev().find(|&j| !self.dir.get(j).is_zero()).unwrap()
    }

    pub fn contains(&self, f: &Field, x: &Point) -> bool {
        let t = x.get(self.pivot());
        f.add_pt(&self.base, &f.scale_pt(t, &self.dir)) == *x
    }

    /// The `q` points in order of the pivot coordinate.
    pub fn points<'a>(&'a self, f: &'a Field) -> impl Iterator<Item = Point> + 'a {
        f.elements()
            .map(move |t| f.add_pt(&self.base, &f.scale_pt(t, &self.dir)))
    }
}

impl fmt::Display for Line3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "base={};dir={}", self.base, self.dir)
    }
}

/// Parses `base=[a,b,c];dir=[d,e,f]` and canonicalizes.
pub fn parse_line(f: &Field, s: &str) -> Result<Line3> {
    let bad = || Error::Parse(format!("bad line {s:?}"));
    let (b, d) = s.trim().split_once(';').ok_or_else(bad)?;
    let base = f.parse_point(b.trim().strip_prefix("base=").ok_or_else(bad)?)?;
    let dir = f.parse_point(d.trim().strip_prefix("dir=").ok_or_else(bad)?)?;
    Line3::new(f, base, dir)
}

/// The plane `normal . x = offset`, with the first nonzero normal
/// coordinate equal to 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Plane3 {
    normal: Point,
    offset: Elem,
}

impl Plane3 {
    pub fn new(f: &Field, normal: Point, offset: Elem) -> Result<Plane3> {
        if normal.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: normal.dim(),
            });
        }
        let lead = (0..3)
            .map(|j| normal.get(j))
            .find(|x| !x.is_zero())
            .ok_or_else(|| Error::BadParameters("plane normal must be nonzero".into()))?;
        let s = f.inv(lead).expect("nonzero");
        Ok(Plane3 {
            normal: f.scale_pt(s, &normal),
            offset: f.mul(s, offset),
        })
    }

    pub fn normal(&self) -> Point {
        self.normal
    }

    pub fn offset(&self) -> Elem {
        self.offset
    }

    pub fn contains_point(&self, f: &Field, x: &Point) -> bool {
        f.dot(&self.normal, x) == self.offset
    }

    /// Base on the plane and direction parallel to it.
    pub fn contains_line(&self, f: &Field, l: &Line3) -> bool {
        self.contains_point(f, &l.base) && f.dot(&self.normal, &l.dir).is_zero()
    }
}

impl fmt::Display for Plane3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};off={}", self.normal, self.offset)
    }
}

impl FromStr for Plane3 {
    type Err = Error;

    /// Parses the stored form without renormalizing.
    fn from_str(s: &str) -> Result<Plane3> {
        let bad = || Error::Parse(format!("bad plane {s:?}"));
        let (n, o) = s.trim().split_once(';').ok_or_else(bad)?;
        let normal: Point = n.trim().strip_prefix("n=").ok_or_else(bad)?.parse()?;
        let offset: u32 = o
            .trim()
            .strip_prefix("off=")
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        Ok(Plane3 {
            normal,
            offset: Elem::from(offset),
        })
    }
}

/// Every affine plane of `F_q^3` in canonical order: normals by point index,
/// then offsets. `q^3 + q^2 + q` planes.
pub fn all_planes(f: &Field) -> Vec<Plane3> {
    let mut out = Vec::new();
    for n in f.points(3) {
        let lead = (0..3).map(|j| n.get(j)).find(|x| !x.is_zero());
        if lead == Some(Elem::ONE) {
            out.extend(f.elements().map(|e| Plane3 {
                normal: n,
                offset: e,
            }));
        }
    }
    out
}

fn check_planar(f: &Field, pts: &[&Point]) -> Result<()> {
    require_3_mod_4(f)?;
    match pts.iter().find(|p| p.dim() != 2) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: 2,
            found: p.dim(),
        }),
        None => Ok(()),
    }
}

/// The `q` points `((I - phi(r))^-1 (p' - phi(r) p), r)`, one per `r`.
pub fn line_points_definitional(f: &Field, p: &Point, p2: &Point) -> Result<Vec<Point>> {
    check_planar(f, &[p, p2])?;
    f.elements()
        .map(|r| {
            let g = phi_of(f, r)?;
            let z = f.sub_pt(p2, &g.apply(f, p));
            Ok(lift(&fixed_point_solve(f, &g, &z), r))
        })
        .collect()
}

/// `((p+p')/2, 0) + r((p-p')^perp/2, 1)`.
pub fn line_closed_form(f: &Field, p: &Point, p2: &Point) -> Result<Line3> {
    check_planar(f, &[p, p2])?;
    let h = f.half();
    let mid = f.scale_pt(h, &f.add_pt(p, p2));
    let diff = f.sub_pt(p, p2);
    let base = lift(&mid, Elem::ZERO);
    let dir = Point::new(&[f.mul(h, diff.get(1)), f.mul(h, f.neg(diff.get(0))), Elem::ONE])?;
    Line3::new(f, base, dir)
}

/// The line of motions sending `p` to `p2`, cross-checked point by point
/// against the definition.
pub fn line_from_pair(f: &Field, p: &Point, p2: &Point) -> Result<Line3> {
    let line = line_closed_form(f, p, p2)?;
    let pts = line_points_definitional(f, p, p2)?;
    // q distinct points (distinct third coordinates) on a q-point line
    if let Some(x) = pts.iter().find(|x| !line.contains(f, x)) {
        return Err(Error::FormMismatch {
            definitional: x.to_string(),
            closed: line.to_string(),
        });
    }
    Ok(line)
}

/// `I(P, R)` computed on both sides of the correspondence: directly, and as
/// incidences between the points of `R` and the lines of `P` (one line per
/// pair).
pub fn incidence_equivalence(f: &Field, p: &PairSet, motions: &[RigidMotion]) -> Result<(u64, u64)> {
    require_3_mod_4(f)?;
    let points: HashSet<Point> = motions
        .iter()
        .map(|m| motion_to_point(f, m))
        .collect::<Result<_>>()?;
    let motion_side = incidence_count(f, p, motions)?;
    let pairs: Vec<(Point, Point)> = p
        .u()
        .iter()
        .flat_map(|u| p.v().iter().map(move |v| (*u, *v)))
        .collect();
    let line_side = pairs
        .par_iter()
        .map(|(u, v)| {
            let l = line_from_pair(f, u, v)?;
            Ok(l.points(f).filter(|x| points.contains(x)).count() as u64)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    Ok((motion_side, line_side))
}

/// Lines of `U x U`, deduplicated.
pub fn lines_of(f: &Field, u: &[Point]) -> Result<Vec<Line3>> {
    let mut lines = BTreeSet::new();
    for a in u {
        for b in u {
            lines.insert(line_from_pair(f, a, b)?);
        }
    }
    Ok(lines.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneAudit {
    /// Most lines of `L(U x U)` inside one plane.
    pub max_lines: u64,
    /// First plane in canonical order attaining `max_lines`.
    pub plane: Option<Plane3>,
    /// Distinct lines; `|U|^2` when no two pairs share a line.
    pub line_count: u64,
    pub pair_count: u64,
    pub planes_scanned: u64,
}

/// Largest number of lines of `L(U x U)` contained in a single plane.
pub fn plane_audit(f: &Field, u: &[Point], guard: &Guardrails) -> Result<PlaneAudit> {
    require_3_mod_4(f)?;
    let mut u = u.to_vec();
    u.sort();
    u.dedup();
    let pairs = (u.len() as u128).pow(2);
    let planes = all_planes(f);
    guard.check_work("plane audit", pairs * planes.len() as u128)?;
    let lines = lines_of(f, &u)?;
    let counts: Vec<u64> = planes
        .par_iter()
        .map(|pl| lines.iter().filter(|l| pl.contains_line(f, l)).count() as u64)
        .collect();
    let best = counts
        .iter()
        .enumerate()
        .fold(None::<(usize, u64)>, |acc, (i, &c)| match acc {
            Some((_, m)) if m >= c => acc,
            _ => Some((i, c)),
        });
    Ok(PlaneAudit {
        max_lines: best.map(|b| b.1).unwrap_or(0),
        plane: best.filter(|b| b.1 > 0).map(|b| planes[b.0]),
        line_count: lines.len() as u64,
        pair_count: pairs as u64,
        planes_scanned: planes.len() as u64,
    })
}

/// Point-line audit `I(P, L) << |L||P|^(2/5) + |P|^(6/5)`, with the larger
/// term as the unit. The plane-richness hypothesis is checked with `c = 1`;
/// the observed maximum is recorded as a size.
pub fn kollar_check(f: &Field, points: &[Point], lines: &[Line3]) -> Result<AuditReport> {
    if let Some(p) = points.iter().find(|p| p.dim() != 3) {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: p.dim(),
        });
    }
    let pset: HashSet<Point> = points.iter().copied().collect();
    let lset: BTreeSet<Line3> = lines.iter().copied().collect();
    let lines: Vec<Line3> = lset.into_iter().collect();
    let incidences: u64 = lines
        .par_iter()
        .map(|l| l.points(f).filter(|x| pset.contains(x)).count() as u64)
        .sum();
    let max_plane = if lines.is_empty() {
        0
    } else {
        all_planes(f)
            .par_iter()
            .map(|pl| lines.iter().filter(|l| pl.contains_line(f, l)).count() as u64)
            .max()
            .unwrap_or(0)
    };
    let (np, nl) = (pset.len() as u64, lines.len() as u64);
    let unit = (nl as f64 * (np as f64).powf(0.4)).max((np as f64).powf(1.2));
    Ok(AuditReport::upper("T7.2", f.q(), 3, incidences as u128, 0.0, unit)
        .size("P", np)
        .size("L", nl)
        .size("max_plane_lines", max_plane)
        // max_plane <= sqrt(m)  <=>  max_plane^2 <= m
        .condition("no plane holds more than sqrt(|L|) lines", max_plane * max_plane <= nl))
}
