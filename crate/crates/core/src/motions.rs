//! Orthogonal groups `O(d,q)`, `d <= 3`, and rigid motions `x -> gx + z`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ffield::{Elem, Field, Point};
use crate::{Error, Guardrails, Result};

const MAT: usize = 3;

/// A `d x d` orthogonal matrix over `F_q`, `d <= 3`, with cached determinant.
/// The derived order is lexicographic on the row-major entries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrthoMatrix {
    dim: u8,
    entries: [[Elem; MAT]; MAT],
    det: Elem,
}

impl OrthoMatrix {
    pub fn identity(dim: usize) -> OrthoMatrix {
        assert!(dim <= MAT);
        let mut entries = [[Elem::ZERO; MAT]; MAT];
        for (i, row) in entries.iter_mut().enumerate().take(dim) {
            row[i] = Elem::ONE;
        }
        OrthoMatrix {
            dim: dim as u8,
            entries,
            det: Elem::ONE,
        }
    }

    /// Builds a matrix from rows, checking `M^T M = I`.
    pub fn from_rows(f: &Field, rows: &[Vec<Elem>]) -> Result<OrthoMatrix> {
        let d = rows.len();
        if d == 0 || d > MAT {
            return Err(Error::UnsupportedDimension(d));
        }
        let mut entries = [[Elem::ZERO; MAT]; MAT];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            entries[i][..d].copy_from_slice(row);
        }
        let m = OrthoMatrix::raw(f, d, entries);
        if !m.is_orthogonal(f) {
            return Err(Error::BadParameters(format!("matrix {m} is not orthogonal")));
        }
        Ok(m)
    }

    fn raw(f: &Field, dim: usize, entries: [[Elem; MAT]; MAT]) -> OrthoMatrix {
        let mut m = OrthoMatrix {
            dim: dim as u8,
            entries,
            det: Elem::ZERO,
        };
        m.det = m.compute_det(f);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn entry(&self, i: usize, j: usize) -> Elem {
        assert!(i < self.dim() && j < self.dim());
        self.entries[i][j]
    }

    pub fn det(&self) -> Elem {
        self.det
    }

    pub fn is_identity(&self) -> bool {
        *self == OrthoMatrix::identity(self.dim())
    }

    fn compute_det(&self, f: &Field) -> Elem {
        let e = &self.entries;
        match self.dim {
            0 => Elem::ONE,
            1 => e[0][0],
            2 => f.sub(f.mul(e[0][0], e[1][1]), f.mul(e[0][1], e[1][0])),
            _ => {
                let minor = |a: usize, b: usize, c: usize, d: usize| {
                    f.sub(f.mul(e[1][a], e[2][b]), f.mul(e[1][c], e[2][d]))
                };
                let t0 = f.mul(e[0][0], minor(1, 2, 2, 1));
                let t1 = f.mul(e[0][1], minor(0, 2, 2, 0));
                let t2 = f.mul(e[0][2], minor(0, 1, 1, 0));
                f.add(f.sub(t0, t1), t2)
            }
        }
    }

    pub fn is_orthogonal(&self, f: &Field) -> bool {
        self.transpose().mul(f, self).is_identity()
    }

    pub fn transpose(&self) -> OrthoMatrix {
        let mut t = *self;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                t.entries[i][j] = self.entries[j][i];
            }
        }
        t
    }

    pub fn mul(&self, f: &Field, other: &OrthoMatrix) -> OrthoMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim();
        let mut entries = [[Elem::ZERO; MAT]; MAT];
        for (i, row) in entries.iter_mut().enumerate().take(d) {
            for (j, cell) in row.iter_mut().enumerate().take(d) {
                *cell = (0..d).fold(Elem::ZERO, |acc, k| {
                    f.add(acc, f.mul(self.entries[i][k], other.entries[k][j]))
                });
            }
        }
        OrthoMatrix {
            dim: self.dim,
            entries,
            det: f.mul(self.det, other.det),
        }
    }

    pub fn apply(&self, f: &Field, x: &Point) -> Point {
        assert_eq!(self.dim(), x.dim(), "matrix and point dimensions differ");
        let mut out = *x;
        for i in 0..self.dim() {
            let v = (0..self.dim()).fold(Elem::ZERO, |acc, k| {
                f.add(acc, f.mul(self.entries[i][k], x.get(k)))
            });
            out.set(i, v);
        }
        out
    }

    pub fn pow(&self, f: &Field, mut e: u64) -> OrthoMatrix {
        let mut acc = OrthoMatrix::identity(self.dim());
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            base = base.mul(f, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order in the group.
    pub fn order(&self, f: &Field) -> u64 {
        let id = OrthoMatrix::identity(self.dim());
        let mut acc = *self;
        let mut n = 1;
        while acc != id {
            acc = acc.mul(f, self);
            n += 1;
        }
        n
    }

    /// Embeds `O(m)` into `O(m+1)` as the top-left block, with 1 in the last diagonal entry.
    pub fn embed_up(&self) -> OrthoMatrix {
        let d = self.dim();
        assert!(d < MAT);
        let mut m = *self;
        m.dim += 1;
        m.entries[d][d] = Elem::ONE;
        m
    }

    /// Reinterprets the entries in another field with the same element indices,
    /// as for the inclusion of the prime field into an extension.
    pub fn reindex(&self, target: &Field) -> Result<OrthoMatrix> {
        let rows: Vec<Vec<Elem>> = (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| target.elem(self.entries[i][j].index()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        OrthoMatrix::from_rows(target, &rows)
    }
}

impl fmt::Display for OrthoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.dim() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.entries[i][j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for OrthoMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for OrthoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `|O(d,q)|` by enumeration; `|O(0)| = 1`.
pub fn orthogonal_order(f: &Field, d: usize) -> Result<u64> {
    if d == 0 {
        return Ok(1);
    }
    Ok(enumerate_orthogonal(f, d, &Guardrails::default())?.len() as u64)
}

/// All of `O(d,q)`, `1 <= d <= 3`, in lexicographic order of entries.
///
/// Built column by column: a unit vector, then unit vectors orthogonal to all
/// previous columns.
pub fn enumerate_orthogonal(f: &Field, d: usize, guard: &Guardrails) -> Result<Vec<OrthoMatrix>> {
    if d == 0 || d > MAT {
        return Err(Error::UnsupportedDimension(d));
    }
    let qd = f.space_size(d) as u128;
    // Frames are bounded by 2 q^(d(d-1)/2); each extension step scans the unit sphere.
    let frames = 2 * (f.q() as u128).pow((d * (d - 1) / 2) as u32);
    guard.check_work("O(d,q) enumeration", frames * qd)?;

    let units: Vec<Point> = f.points(d).filter(|x| f.norm(x) == Elem::ONE).collect();
    let mut out = Vec::new();
    let mut cols: Vec<Point> = Vec::with_capacity(d);
    extend_frame(f, d, &units, &mut cols, &mut out);
    out.sort();
    out.dedup();
    Ok(out)
}

fn extend_frame(
    f: &Field,
    d: usize,
    units: &[Point],
    cols: &mut Vec<Point>,
    out: &mut Vec<OrthoMatrix>,
) {
    if cols.len() == d {
        let mut entries = [[Elem::ZERO; MAT]; MAT];
        for (j, c) in cols.iter().enumerate() {
            for (i, row) in entries.iter_mut().enumerate().take(d) {
                row[j] = c.get(i);
            }
        }
        out.push(OrthoMatrix::raw(f, d, entries));
        return;
    }
    for u in units {
        if cols.iter().all(|c| f.dot(c, u).is_zero()) {
            cols.push(*u);
            extend_frame(f, d, units, cols, out);
            cols.pop();
        }
    }
}

/// The rotation subgroup `SO(d,q)`.
pub fn special_orthogonal(f: &Field, d: usize, guard: &Guardrails) -> Result<Vec<OrthoMatrix>> {
    Ok(enumerate_orthogonal(f, d, guard)?
        .into_iter()
        .filter(|g| g.det() == Elem::ONE)
        .collect())
}

/// A generator of the cyclic group `SO(2,q)`, `q = 3 mod 4`: the first rotation
/// in canonical order whose order is `q + 1`.
pub fn so2_generator(f: &Field) -> Result<OrthoMatrix> {
    if f.q_mod_4() != 3 {
        return Err(Error::WrongResidue { q: f.q() });
    }
    let rotations = special_orthogonal(f, 2, &Guardrails::default())?;
    let n = rotations.len() as u64;
    debug_assert_eq!(n, f.q() as u64 + 1);
    rotations
        .into_iter()
        .find(|g| g.order(f) == n)
        .ok_or_else(|| Error::BadParameters("SO(2,q) has no generator".into()))
}

/// A rigid motion `phi(x) = g x + z`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RigidMotion {
    pub g: OrthoMatrix,
    pub z: Point,
}

impl RigidMotion {
    pub fn new(g: OrthoMatrix, z: Point) -> Result<RigidMotion> {
        if g.dim() != z.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                found: z.dim(),
            });
        }
        Ok(RigidMotion { g, z })
    }

    pub fn identity(d: usize) -> RigidMotion {
        RigidMotion {
            g: OrthoMatrix::identity(d),
            z: Point::zero(d),
        }
    }

    pub fn translation(z: Point) -> RigidMotion {
        RigidMotion {
            g: OrthoMatrix::identity(z.dim()),
            z,
        }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn apply(&self, f: &Field, x: &Point) -> Point {
        f.add_pt(&self.g.apply(f, x), &self.z)
    }

    /// `self` after `first`: `x -> self(first(x))`.
    pub fn compose(&self, f: &Field, first: &RigidMotion) -> RigidMotion {
        RigidMotion {
            g: self.g.mul(f, &first.g),
            z: self.apply(f, &first.z),
        }
    }

    /// `(g, z)^{-1} = (g^T, -g^T z)`.
    pub fn invert(&self, f: &Field) -> RigidMotion {
        let gt = self.g.transpose();
        RigidMotion {
            g: gt,
            z: f.neg_pt(&gt.apply(f, &self.z)),
        }
    }

    /// The most specific tag: translation, `SF'` (planar, det 1, not a
    /// translation), or general.
    pub fn classify(&self) -> MotionClass {
        if self.g.is_identity() {
            MotionClass::Translation
        } else if self.dim() == 2 && self.g.det() == Elem::ONE {
            MotionClass::SfPrime
        } else {
            MotionClass::General
        }
    }
}

impl fmt::Display for RigidMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={};z={}", self.g, self.z)
    }
}

impl fmt::Debug for RigidMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RigidMotion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `"g=[[a,b],[c,d]];z=[e,f]"` over `f`.
pub fn parse_motion(f: &Field, s: &str) -> Result<RigidMotion> {
    let bad = || Error::Parse(format!("bad motion {s:?}"));
    let (gpart, zpart) = s.trim().split_once(';').ok_or_else(bad)?;
    let gtxt = gpart.trim().strip_prefix("g=").ok_or_else(bad)?;
    let ztxt = zpart.trim().strip_prefix("z=").ok_or_else(bad)?;
    let inner = gtxt
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(bad)?;
    let mut rows = Vec::new();
    for chunk in inner.split(']') {
        let chunk = chunk.trim_start_matches(',').trim();
        if chunk.is_empty() {
            continue;
        }
        let pt = f.parse_point(&format!("{chunk}]"))?;
        rows.push(pt.coords().to_vec());
    }
    let g = OrthoMatrix::from_rows(f, &rows)?;
    let z = f.parse_point(ztxt)?;
    RigidMotion::new(g, z)
}

impl FromStr for MotionClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<MotionClass> {
        match s.to_ascii_lowercase().replace(['_', '-', '\''], "").as_str() {
            "general" | "all" => Ok(MotionClass::General),
            "so2" | "rotation" | "rotations" => Ok(MotionClass::So2),
            "translation" | "translations" => Ok(MotionClass::Translation),
            "sf" => Ok(MotionClass::Sf),
            "sfprime" => Ok(MotionClass::SfPrime),
            _ => Err(Error::Parse(format!("unknown motion class {s:?}"))),
        }
    }
}

/// Motion universes and classification tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionClass {
    /// `O(d) x F_q^d`.
    General,
    /// Rotations about the origin, `SO(2,q)` with `z = 0`.
    So2,
    /// `T(d,q)`: `g = I`.
    Translation,
    /// `SF(2,q)`: `det g = 1`.
    Sf,
    /// `SF'(2,q) = SF(2,q) \ T(2,q)`.
    SfPrime,
}

impl MotionClass {
    pub fn contains(&self, r: &RigidMotion) -> bool {
        let planar_rot = r.dim() == 2 && r.g.det() == Elem::ONE;
        match self {
            MotionClass::General => true,
            MotionClass::So2 => planar_rot && r.z.is_zero(),
            MotionClass::Translation => r.g.is_identity(),
            MotionClass::Sf => planar_rot,
            MotionClass::SfPrime => planar_rot && !r.g.is_identity(),
        }
    }
}

/// Every motion of the given class in `d` dimensions, ordered by `(g, z)`.
pub fn motion_universe(
    f: &Field,
    d: usize,
    class: MotionClass,
    guard: &Guardrails,
) -> Result<Vec<RigidMotion>> {
    if class != MotionClass::General && class != MotionClass::Translation && d != 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let group = enumerate_orthogonal(f, d, guard)?;
    let translations: Vec<Point> = if class == MotionClass::So2 {
        vec![Point::zero(d)]
    } else {
        f.points(d).collect()
    };
    guard.check_work(
        "motion universe",
        group.len() as u128 * translations.len() as u128,
    )?;
    let mut out = Vec::new();
    for g in &group {
        for z in &translations {
            let r = RigidMotion { g: *g, z: *z };
            if class.contains(&r) {
                out.push(r);
            }
        }
    }
    Ok(out)
}
