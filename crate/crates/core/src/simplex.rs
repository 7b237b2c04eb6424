//! Labeled simplices, congruence keys and class censuses.
//!
//! A labeled k-simplex is an ordered `(k+1)`-tuple of points. Its key is the
//! upper triangle of the matrix `||x^i - x^j||` together with the rank of the
//! difference vectors `x^i - x^1`. Rigid motions preserve keys; for
//! nondegenerate simplices with nonzero sides the converse is checked against
//! an exhaustive orbit search.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::ffield::{Elem, Field, Point};
use crate::motions::{enumerate_orthogonal, OrthoMatrix, RigidMotion};
use crate::report::AuditReport;
use crate::{Error, Guardrails, Result};

/// Tuples a census may enumerate without `--force`.
pub const CENSUS_LIMIT: u128 = 100_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LabeledSimplex {
    vertices: Vec<Point>,
}

impl LabeledSimplex {
    pub fn new(vertices: &[Point]) -> Result<LabeledSimplex> {
        if vertices.len() < 2 {
            return Err(Error::BadParameters(
                "a simplex needs at least two vertices".into(),
            ));
        }
        let d = vertices[0].dim();
        if let Some(v) = vertices.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        Ok(LabeledSimplex {
            vertices: vertices.to_vec(),
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// `k` for a `(k+1)`-tuple.
    pub fn k(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn apply(&self, f: &Field, r: &RigidMotion) -> LabeledSimplex {
        LabeledSimplex {
            vertices: self.vertices.iter().map(|v| r.apply(f, v)).collect(),
        }
    }
}

/// Congruence invariant: pairwise norms (upper triangle, row-major) and rank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SimplexKey {
    rank: u8,
    vertices: u8,
    norms: Vec<Elem>,
}

fn pair_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * (2 * m - i - 1) / 2 + (j - i - 1)
}

impl SimplexKey {
    /// Builds a key from the upper triangle `n12, n13, ..., n1m, n23, ...`.
    pub fn from_parts(vertices: usize, rank: usize, norms: &[Elem]) -> Result<SimplexKey> {
        if vertices < 2 || norms.len() != vertices * (vertices - 1) / 2 {
            return Err(Error::BadParameters(format!(
                "{} norms do not fit {vertices} vertices",
                norms.len()
            )));
        }
        Ok(SimplexKey {
            rank: rank as u8,
            vertices: vertices as u8,
            norms: norms.to_vec(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices as usize
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn norms(&self) -> &[Elem] {
        &self.norms
    }

    /// `||x^i - x^j||`, symmetric, zero on the diagonal.
    pub fn norm(&self, i: usize, j: usize) -> Elem {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Elem::ZERO,
            std::cmp::Ordering::Less => self.norms[pair_index(self.vertex_count(), i, j)],
            std::cmp::Ordering::Greater => self.norms[pair_index(self.vertex_count(), j, i)],
        }
    }

    /// Full symmetric matrix.
    pub fn norm_matrix(&self) -> Vec<Vec<Elem>> {
        let m = self.vertex_count();
        (0..m)
            .map(|i| (0..m).map(|j| self.norm(i, j)).collect())
            .collect()
    }

    /// `rank = min(k, d)`.
    pub fn is_nondegenerate(&self, d: usize) -> bool {
        self.rank() == (self.vertex_count() - 1).min(d)
    }

    pub fn has_zero_side(&self) -> bool {
        self.norms.iter().any(|n| n.is_zero())
    }

    /// Key of the same simplex with vertices reordered: new vertex `i` is old
    /// vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SimplexKey {
        let m = self.vertex_count();
        let mut norms = Vec::with_capacity(self.norms.len());
        for i in 0..m {
            for j in i + 1..m {
                norms.push(self.norm(perm[i], perm[j]));
            }
        }
        SimplexKey {
            rank: self.rank,
            vertices: self.vertices,
            norms,
        }
    }

    /// Smallest key over all vertex orderings.
    pub fn unordered(&self) -> SimplexKey {
        let mut perm: Vec<usize> = (0..self.vertex_count()).collect();
        let mut best = self.clone();
        while next_permutation(&mut perm) {
            let k = self.permuted(&perm);
            if k < best {
                best = k;
            }
        }
        best
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

impl fmt::Display for SimplexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|", self.rank)?;
        for (i, n) in self.norms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl FromStr for SimplexKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<SimplexKey> {
        let bad = || Error::Parse(format!("bad simplex key {s:?}"));
        let (rank, rest) = s.trim().split_once('|').ok_or_else(bad)?;
        let rank: usize = rank.trim().parse().map_err(|_| bad())?;
        let norms = rest
            .split(',')
            .map(|t| t.trim().parse::<u32>().map(Elem::from).map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        // len = m(m-1)/2
        let m = (1..=255usize)
            .find(|m| m * (m - 1) / 2 == norms.len() && *m >= 2)
            .ok_or_else(bad)?;
        SimplexKey::from_parts(m, rank, &norms)
    }
}

impl Serialize for SimplexKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn key_of(f: &Field, vertices: &[Point]) -> SimplexKey {
    let m = vertices.len();
    let mut norms = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            norms.push(f.dist(&vertices[i], &vertices[j]));
        }
    }
    let diffs: Vec<Point> = vertices[1..]
        .iter()
        .map(|v| f.sub_pt(v, &vertices[0]))
        .collect();
    SimplexKey {
        rank: f.rank(&diffs) as u8,
        vertices: m as u8,
        norms,
    }
}

pub fn classify(f: &Field, s: &LabeledSimplex) -> SimplexKey {
    key_of(f, s.vertices())
}

fn motions_matching<'a>(
    f: &'a Field,
    group: &'a [OrthoMatrix],
    s1: &'a LabeledSimplex,
    s2: &'a LabeledSimplex,
) -> impl Iterator<Item = RigidMotion> + 'a {
    let (a, b) = (s1.vertices(), s2.vertices());
    group.iter().filter_map(move |g| {
        let z = f.sub_pt(&b[0], &g.apply(f, &a[0]));
        let r = RigidMotion { g: *g, z };
        a.iter()
            .zip(b)
            .all(|(x, y)| r.apply(f, x) == *y)
            .then_some(r)
    })
}

fn check_pair(s1: &LabeledSimplex, s2: &LabeledSimplex) -> Result<()> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            found: s2.dim(),
        });
    }
    if s1.k() != s2.k() {
        return Err(Error::BadParameters(
            "simplices have different vertex counts".into(),
        ));
    }
    Ok(())
}

/// First motion (in `(g, z)` order) carrying `s1` onto `s2` vertex-wise.
pub fn orbit_oracle(
    f: &Field,
    s1: &LabeledSimplex,
    s2: &LabeledSimplex,
    guard: &Guardrails,
) -> Result<Option<RigidMotion>> {
    check_pair(s1, s2)?;
    let group = enumerate_orthogonal(f, s1.dim(), guard)?;
    Ok(orbit_oracle_in(f, &group, s1, s2))
}

/// [`orbit_oracle`] against a pre-enumerated orthogonal group.
pub fn orbit_oracle_in(
    f: &Field,
    group: &[OrthoMatrix],
    s1: &LabeledSimplex,
    s2: &LabeledSimplex,
) -> Option<RigidMotion> {
    motions_matching(f, group, s1, s2).next()
}

/// Number of motions fixing every vertex.
pub fn stabilizer_size(f: &Field, s: &LabeledSimplex, guard: &Guardrails) -> Result<u64> {
    let group = enumerate_orthogonal(f, s.dim(), guard)?;
    Ok(motions_matching(f, &group, s, s).count() as u64)
}

/// Multiplicities of congruence keys over `A_1 x ... x A_{k+1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCensus {
    pub dim: usize,
    pub classes: BTreeMap<SimplexKey, u64>,
    pub total: u64,
    /// Labeled simplices whose rank is below `min(k, d)`.
    pub degenerate_count: u64,
}

impl ClassCensus {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn nondegenerate_class_count(&self) -> usize {
        self.classes
            .keys()
            .filter(|k| k.is_nondegenerate(self.dim))
            .count()
    }

    pub fn degenerate_class_count(&self) -> usize {
        self.class_count() - self.nondegenerate_class_count()
    }

    /// `#{(x, y) : x ~ y} = sum_C |C|^2`.
    pub fn collision_count(&self) -> u128 {
        self.classes.values().map(|&n| n as u128 * n as u128).sum()
    }

    /// `(sum_C |C|)^2 <= #classes * sum_C |C|^2`.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        let t = self.total as u128;
        t * t <= self.class_count() as u128 * self.collision_count()
    }

    /// Classes after forgetting the vertex labels.
    pub fn unordered_class_count(&self) -> usize {
        self.classes
            .keys()
            .map(SimplexKey::unordered)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// CSV rows `key,multiplicity`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["key", "multiplicity"])?;
        for (k, n) in &self.classes {
            out.write_record([k.to_string(), n.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn census_rec(
    f: &Field,
    sets: &[Vec<Point>],
    prefix: &mut Vec<Point>,
    d: usize,
    acc: &mut HashMap<SimplexKey, u64>,
    degenerate: &mut u64,
) {
    if prefix.len() == sets.len() {
        let key = key_of(f, prefix);
        if !key.is_nondegenerate(d) {
            *degenerate += 1;
        }
        *acc.entry(key).or_insert(0) += 1;
        return;
    }
    for x in &sets[prefix.len()] {
        prefix.push(*x);
        census_rec(f, sets, prefix, d, acc, degenerate);
        prefix.pop();
    }
}

/// Census of `A_1 x ... x A_{k+1}`, streamed; the outer set is split across
/// workers.
pub fn count_classes(
    f: &Field,
    d: usize,
    sets: &[Vec<Point>],
    guard: &Guardrails,
) -> Result<ClassCensus> {
    if sets.len() < 2 {
        return Err(Error::BadParameters(
            "a census needs at least two vertex sets".into(),
        ));
    }
    for x in sets.iter().flatten() {
        if x.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.dim(),
            });
        }
    }
    let tuples: u128 = sets.iter().map(|s| s.len() as u128).product();
    guard.check("census tuples", tuples, CENSUS_LIMIT)?;
    let (acc, degenerate_count) = sets[0]
        .par_iter()
        .map(|x| {
            let mut acc = HashMap::new();
            let mut deg = 0;
            let mut prefix = vec![*x];
            census_rec(f, sets, &mut prefix, d, &mut acc, &mut deg);
            (acc.into_iter().collect::<BTreeMap<_, _>>(), deg)
        })
        .reduce(
            || (BTreeMap::new(), 0),
            |(mut a, da), (b, db)| {
                for (k, n) in b {
                    *a.entry(k).or_insert(0) += n;
                }
                (a, da + db)
            },
        );
    Ok(ClassCensus {
        dim: d,
        classes: acc,
        total: tuples as u64,
        degenerate_count,
    })
}

/// Triangle keys over `A x B x C` whose `(A, B)` edge has norm `lambda`.
pub fn classes_containing(
    f: &Field,
    a: &[Point],
    b: &[Point],
    c: &[Point],
    lambda: Elem,
) -> Result<BTreeSet<SimplexKey>> {
    if lambda.is_zero() {
        return Err(Error::BadParameters("edge norm must be nonzero".into()));
    }
    let keys = a
        .par_iter()
        .map(|x| {
            let mut keys = BTreeSet::new();
            for y in b.iter().filter(|y| f.dist(x, y) == lambda) {
                for z in c {
                    keys.insert(key_of(f, &[*x, *y, *z]));
                }
            }
            keys
        })
        .reduce(BTreeSet::new, |mut s, t| {
            s.extend(t);
            s
        });
    Ok(keys)
}

/// Number of congruence classes of triangles in `A x B x C` with
/// `||x - y|| = lambda` on the `(A, B)` edge.
pub fn count_classes_containing(
    f: &Field,
    a: &[Point],
    b: &[Point],
    c: &[Point],
    lambda: Elem,
) -> Result<u64> {
    Ok(classes_containing(f, a, b, c, lambda)?.len() as u64)
}

/// Lower-bound audit `#classes >> q^2` for triangles with one fixed side.
pub fn audit_fixed_side(
    f: &Field,
    a: &[Point],
    b: &[Point],
    c: &[Point],
    lambda: Elem,
) -> Result<AuditReport> {
    let n = count_classes_containing(f, a, b, c, lambda)?;
    let q = f.q() as u128;
    let (na, nb, nc) = (a.len() as u128, b.len() as u128, c.len() as u128);
    let q2 = (q * q) as f64;
    Ok(AuditReport::lower("T1.2", f.q(), 2, n as u128, q2, q2)
        .size("A", na as u64)
        .size("B", nb as u64)
        .size("C", nc as u64)
        .condition("q = 3 mod 4", f.q_mod_4() == 3)
        // |A||B||C|^(1/2) >= q^4  <=>  (|A||B|)^2 |C| >= q^8
        .condition("|A||B||C|^(1/2) >= q^4", (na * nb).pow(2) * nc >= q.pow(8)))
}

/// `N(lambda)`: pairs of `A x B` at norm `lambda`.
pub fn distance_count(f: &Field, a: &[Point], b: &[Point], lambda: Elem) -> u64 {
    a.par_iter()
        .map(|x| b.iter().filter(|y| f.dist(x, y) == lambda).count() as u64)
        .sum()
}

/// Two-sided audit `|N - |A||B|/q| <= 4 q^(1/2) (|A||B|)^(1/2)`, judged
/// exactly in integers.
pub fn audit_distance(f: &Field, a: &[Point], b: &[Point], lambda: Elem) -> AuditReport {
    let n = distance_count(f, a, b, lambda) as i128;
    let q = f.q() as i128;
    let ab = a.len() as i128 * b.len() as i128;
    let dev = n * q - ab;
    // |N q - ab| <= 4 q^(3/2) sqrt(ab)  <=>  (N q - ab)^2 <= 16 q^3 ab
    let pass = dev * dev <= 16 * q.pow(3) * ab;
    let d = a.first().or(b.first()).map(|p| p.dim()).unwrap_or(2);
    AuditReport::two_sided(
        "T3.1",
        f.q(),
        d,
        n as u128,
        ab as f64 / q as f64,
        4.0 * (q as f64).sqrt() * (ab as f64).sqrt(),
    )
    .size("A", a.len() as u64)
    .size("B", b.len() as u64)
    .condition("d = 2", d == 2)
    .condition("lambda != 0", !lambda.is_zero())
    .judged(pass)
}

/// `mu` from the character of `4 sigma2 - sigma1^2`.
pub fn mu_formula(f: &Field, l1: Elem, l2: Elem, l3: Elem) -> u8 {
    match f.quad_char(extension_discriminant(f, l1, l2, l3)) {
        1 => 2,
        0 => 1,
        _ => 0,
    }
}

/// `4 sigma2 - sigma1^2` with `sigma1 = l1+l2+l3`, `sigma2 = l1 l2 + l2 l3 + l3 l1`.
pub fn extension_discriminant(f: &Field, l1: Elem, l2: Elem, l3: Elem) -> Elem {
    let s1 = f.add(f.add(l1, l2), l3);
    let s2 = f.add(f.add(f.mul(l1, l2), f.mul(l2, l3)), f.mul(l3, l1));
    f.sub(f.mul(f.from_int(4), s2), f.square(s1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extension {
    /// All `z` with `||x - z|| = l2` and `||y - z|| = l3`.
    pub witnesses: Vec<Point>,
    pub mu: u8,
    pub discriminant: Elem,
}

/// Apexes completing the planar segment `(x, y)` to a triangle with side
/// norms `l2 = ||x - z||`, `l3 = ||y - z||`.
pub fn extend_segment(f: &Field, x: &Point, y: &Point, l2: Elem, l3: Elem) -> Result<Extension> {
    for p in [x, y] {
        if p.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: p.dim(),
            });
        }
    }
    let l1 = f.dist(x, y);
    if l1.is_zero() {
        return Err(Error::DegenerateSegment);
    }
    let witnesses = f
        .points(2)
        .filter(|z| f.dist(x, z) == l2 && f.dist(y, z) == l3)
        .collect();
    Ok(Extension {
        witnesses,
        mu: mu_formula(f, l1, l2, l3),
        discriminant: extension_discriminant(f, l1, l2, l3),
    })
}

/// Histogram over all apexes `z`: entry `l2 * q + l3` counts `z` with
/// `||x - z|| = l2`, `||y - z|| = l3`. One pass gives every witness count
/// for the segment.
pub fn apex_profile(f: &Field, x: &Point, y: &Point) -> Vec<u32> {
    let q = f.q() as usize;
    let mut h = vec![0u32; q * q];
    for z in f.points(x.dim()) {
        h[f.dist(x, &z).index() as usize * q + f.dist(y, &z).index() as usize] += 1;
    }
    h
}

/// Labeled copies of the simplex with norms `key` in `A_1 x ... x A_k`.
/// Only the norms are matched.
pub fn copy_count(f: &Field, sets: &[Vec<Point>], key: &SimplexKey) -> Result<u64> {
    if key.vertex_count() != sets.len() {
        return Err(Error::BadParameters(format!(
            "key has {} vertices but {} sets were given",
            key.vertex_count(),
            sets.len()
        )));
    }
    if key.has_zero_side() {
        return Err(Error::BadParameters("side norms must be nonzero".into()));
    }
    fn rec(f: &Field, sets: &[Vec<Point>], key: &SimplexKey, chosen: &mut Vec<Point>) -> u64 {
        let i = chosen.len();
        if i == sets.len() {
            return 1;
        }
        let mut n = 0;
        for x in &sets[i] {
            if chosen
                .iter()
                .enumerate()
                .all(|(j, y)| f.dist(x, y) == key.norm(j, i))
            {
                chosen.push(*x);
                n += rec(f, sets, key, chosen);
                chosen.pop();
            }
        }
        n
    }
    if sets.iter().any(|s| s.is_empty()) {
        return Ok(0);
    }
    Ok(sets[0]
        .par_iter()
        .map(|x| rec(f, sets, key, &mut vec![*x]))
        .sum())
}

/// Copies against the main term `q^(-binom(k,2)) prod |A_i|`.
pub fn audit_copies(f: &Field, sets: &[Vec<Point>], key: &SimplexKey) -> Result<AuditReport> {
    let n = copy_count(f, sets, key)?;
    let k = sets.len();
    let d = sets.iter().flatten().next().map(|p| p.dim()).unwrap_or(2);
    let prod: f64 = sets.iter().map(|s| s.len() as f64).product();
    let main = prod / (f.q() as f64).powi((k * (k - 1) / 2) as i32);
    let q = f.q() as u128;
    // |A_i| >= q^((d-1)/2 + k-1)  <=>  |A_i|^2 >= q^(d-1+2k-2)
    let big = sets
        .iter()
        .all(|s| (s.len() as u128).pow(2) >= q.pow((d + 2 * k - 3) as u32));
    let mut r = AuditReport::two_sided("T4.1", f.q(), d, n as u128, main, main)
        .condition("|A_i| >= q^((d-1)/2 + k-1)", big);
    for (i, s) in sets.iter().enumerate() {
        r = r.size(&format!("A{}", i + 1), s.len() as u64);
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphereIntersection {
    pub points: Vec<Point>,
    /// Whether `a^2 - a^1, ..., a^k - a^1` are linearly independent.
    pub independent: bool,
    /// `2 q^(d-k)` when the centers are independent.
    pub cap: Option<u64>,
}

impl SphereIntersection {
    pub fn within_cap(&self) -> bool {
        self.cap.is_none_or(|c| self.points.len() as u64 <= c)
    }
}

/// Exact `S_1 ∩ ... ∩ S_k`, `S_i = {x : ||x - a^i|| = r_i}`.
pub fn sphere_intersection(f: &Field, centers: &[Point], radii: &[Elem]) -> Result<SphereIntersection> {
    if centers.is_empty() || centers.len() != radii.len() {
        return Err(Error::BadParameters(
            "need one radius per center and at least one sphere".into(),
        ));
    }
    let d = centers[0].dim();
    if let Some(c) = centers.iter().find(|c| c.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: c.dim(),
        });
    }
    if radii.iter().any(|r| r.is_zero()) {
        return Err(Error::BadParameters("radii must be nonzero".into()));
    }
    let k = centers.len();
    let diffs: Vec<Point> = centers[1..].iter().map(|c| f.sub_pt(c, &centers[0])).collect();
    let independent = f.rank(&diffs) == k - 1;
    let cap = (independent && k <= d).then(|| 2 * f.space_size(d - k));
    let points = f
        .points(d)
        .filter(|x| centers.iter().zip(radii).all(|(c, r)| f.dist(x, c) == *r))
        .collect();
    Ok(SphereIntersection {
        points,
        independent,
        cap,
    })
}
