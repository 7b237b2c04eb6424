//! Arithmetic in `F_q`, `q = p^r` with `p` odd and `r <= 3`.
//!
//! Elements are stored by their canonical index `i = sum_j c_j p^j`, where
//! `c_0 + c_1 x + ...` is the fully reduced polynomial representative. All
//! operations go through tables built once in [`Field::new`]; a `Field` is
//! immutable afterwards and can be shared freely between threads.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Guardrails, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 4;

/// A field element, identified by its canonical integer encoding.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Field-agnostic; use [`Field::elem`] for a range-checked element.
impl From<u32> for Elem {
    fn from(i: u32) -> Elem {
        Elem(i)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point of `F_q^d`, `d <= 4`. Unused trailing coordinates are zero, so the
/// derived order is lexicographic on `(dim, coords)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    dim: u8,
    coords: [Elem; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[Elem]) -> Result<Point> {
        if coords.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        let mut c = [Elem::ZERO; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point {
            dim: coords.len() as u8,
            coords: c,
        })
    }

    /// Builds a point from raw element indices without checking them against a field.
    pub fn from_indices(idx: &[u32]) -> Result<Point> {
        let v: Vec<Elem> = idx.iter().map(|&i| Elem(i)).collect();
        Point::new(&v)
    }

    pub fn zero(dim: usize) -> Point {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Point {
            dim: dim as u8,
            coords: [Elem::ZERO; MAX_DIM],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords[..self.dim as usize]
    }

    pub fn get(&self, i: usize) -> Elem {
        assert!(i < self.dim());
        self.coords[i]
    }

    pub fn set(&mut self, i: usize, x: Elem) {
        assert!(i < self.dim());
        self.coords[i] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Parses `"[3,0]"`. Indices are not range-checked; use [`Field::parse_point`].
    fn from_str(s: &str) -> Result<Point> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("point must be bracketed: {s:?}")))?;
        if inner.trim().is_empty() {
            return Point::new(&[]);
        }
        let idx = inner
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad coordinate {x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Point::from_indices(&idx)
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, r)` with `q = p^r`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut r = 0;
    let mut m = q;
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

/// The finite field `F_{p^r}` with its operation tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    r: u32,
    q: u32,
    /// Low coefficients `c_0..c_{r-1}` of the monic modulus `x^r + ...`.
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    chi: Vec<i8>,
    roots: Vec<Vec<Elem>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Field {}

fn check_characteristic(p: u32, r: u32) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if r == 0 || r > 3 {
        return Err(Error::UnsupportedDegree(r));
    }
    Ok(())
}

/// Degree <= 3 polynomials are irreducible iff they have no root in `F_p`.
fn has_root(p: u32, low: &[u32]) -> bool {
    let r = low.len();
    (0..p as u64).any(|x| {
        let mut acc = 1u64; // leading coefficient
        for j in (0..r).rev() {
            acc = (acc * x + low[j] as u64) % p as u64;
        }
        acc == 0
    })
}

/// Lexicographically smallest monic irreducible modulus of degree `r`,
/// comparing coefficients from the constant term upwards.
pub fn smallest_irreducible(p: u32, r: u32) -> Vec<u32> {
    if r == 1 {
        return vec![0];
    }
    let total = (p as u64).pow(r);
    for n in 0..total {
        // c_0 is the most significant digit of the scan.
        let mut low = vec![0u32; r as usize];
        let mut m = n;
        for j in (0..r as usize).rev() {
            low[j] = (m % p as u64) as u32;
            m /= p as u64;
        }
        if !has_root(p, &low) {
            return low;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// `F_{p^r}` under the default guardrails.
    pub fn new(p: u32, r: u32) -> Result<Field> {
        Field::with_guardrails(p, r, &Guardrails::default())
    }

    pub fn with_guardrails(p: u32, r: u32, guard: &Guardrails) -> Result<Field> {
        check_characteristic(p, r)?;
        Field::build(p, r, smallest_irreducible(p, r), guard)
    }

    /// `F_q` from a prime power `q`.
    pub fn from_order(q: u32, guard: &Guardrails) -> Result<Field> {
        let (p, r) = prime_power(q).ok_or(Error::NonPrime(q))?;
        Field::with_guardrails(p, r, guard)
    }

    /// `F_{p^r}` with an explicit modulus, given by its low coefficients
    /// `c_0..c_{r-1}` (the leading coefficient is 1).
    pub fn with_modulus(p: u32, low: &[u32]) -> Result<Field> {
        let r = low.len() as u32;
        check_characteristic(p, r)?;
        if low.iter().any(|&c| c >= p) || (r > 1 && has_root(p, low)) {
            return Err(Error::ReducibleModulus(low.to_vec()));
        }
        Field::build(p, r, low.to_vec(), &Guardrails::default())
    }

    fn build(p: u32, r: u32, modulus: Vec<u32>, guard: &Guardrails) -> Result<Field> {
        let q = p.pow(r);
        guard.check("field order q", q as u128, guard.max_q as u128)?;
        let n = q as usize;
        let digits = |i: u32| -> Vec<u32> {
            let mut v = vec![0u32; r as usize];
            let mut m = i;
            for d in v.iter_mut() {
                *d = m % p;
                m /= p;
            }
            v
        };
        let encode = |c: &[u32]| -> u32 { c.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let all: Vec<Vec<u32>> = (0..q).map(digits).collect();

        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let s: Vec<u32> = all[a]
                    .iter()
                    .zip(&all[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * n + b] = encode(&s);
                mul[a * n + b] = encode(&poly_mul_mod(&all[a], &all[b], &modulus, p));
            }
        }
        let neg: Vec<u32> = (0..n)
            .map(|a| encode(&all[a].iter().map(|&x| (p - x) % p).collect::<Vec<_>>()))
            .collect();
        let mut inv = vec![0u32; n];
        for a in 1..n {
            inv[a] = (1..n)
                .find(|&b| mul[a * n + b] == 1)
                .expect("nonzero elements of a field are invertible") as u32;
        }
        let mut roots: Vec<Vec<Elem>> = vec![Vec::new(); n];
        for y in 0..n {
            roots[mul[y * n + y] as usize].push(Elem(y as u32));
        }
        let half = ((q - 1) / 2) as u64;
        let mut field = Field {
            p,
            r,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            chi: Vec::new(),
            roots,
        };
        field.chi = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else if field.pow(Elem(a), half) == Elem::ONE {
                    1
                } else {
                    -1
                }
            })
            .collect();
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn q_mod_4(&self) -> u32 {
        self.q % 4
    }

    pub fn is_prime_field(&self) -> bool {
        self.r == 1
    }

    /// Low coefficients of the monic modulus.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elem(&self, index: u32) -> Result<Elem> {
        if index < self.q {
            Ok(Elem(index))
        } else {
            Err(Error::Parse(format!(
                "element index {index} out of range for q = {}",
                self.q
            )))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Polynomial coefficients `c_0..c_{r-1}` of `x`.
    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        let mut m = x.0;
        (0..self.r)
            .map(|_| {
                let d = m % self.p;
                m /= self.p;
                d
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.q).map(Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[(a.0 * self.q + b.0) as usize])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[(a.0 * self.q + b.0) as usize])
    }

    #[inline]
    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (!a.is_zero()).then(|| Elem(self.inv[a.0 as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `1/2`, defined because `p` is odd.
    pub fn half(&self) -> Elem {
        self.inv(self.from_int(2)).expect("p is odd")
    }

    /// Quadratic character: `+1` on nonzero squares, `0` at zero, `-1` otherwise.
    pub fn quad_char(&self, x: Elem) -> i8 {
        self.chi[x.0 as usize]
    }

    /// All `y` with `y^2 = x`, in canonical order.
    pub fn sqrt_all(&self, x: Elem) -> &[Elem] {
        &self.roots[x.0 as usize]
    }

    /// Frobenius-fixed elements, i.e. the prime subfield.
    pub fn in_prime_subfield(&self, x: Elem) -> bool {
        self.pow(x, self.p as u64) == x
    }

    // Vector operations.

    pub fn check_point(&self, x: &Point) -> Result<()> {
        match x.coords().iter().find(|c| c.0 >= self.q) {
            Some(c) => Err(Error::Parse(format!(
                "coordinate {c} out of range for q = {}",
                self.q
            ))),
            None => Ok(()),
        }
    }

    pub fn parse_point(&self, s: &str) -> Result<Point> {
        let pt: Point = s.parse()?;
        self.check_point(&pt)?;
        Ok(pt)
    }

    pub fn point(&self, idx: &[u32]) -> Result<Point> {
        let pt = Point::from_indices(idx)?;
        self.check_point(&pt)?;
        Ok(pt)
    }

    pub fn add_pt(&self, a: &Point, b: &Point) -> Point {
        debug_assert_eq!(a.dim(), b.dim());
        let mut out = *a;
        for i in 0..a.dim() {
            out.coords[i] = self.add(a.coords[i], b.coords[i]);
        }
        out
    }

    pub fn sub_pt(&self, a: &Point, b: &Point) -> Point {
        debug_assert_eq!(a.dim(), b.dim());
        let mut out = *a;
        for i in 0..a.dim() {
            out.coords[i] = self.sub(a.coords[i], b.coords[i]);
        }
        out
    }

    pub fn neg_pt(&self, a: &Point) -> Point {
        let mut out = *a;
        for i in 0..a.dim() {
            out.coords[i] = self.neg(a.coords[i]);
        }
        out
    }

    pub fn scale_pt(&self, t: Elem, a: &Point) -> Point {
        let mut out = *a;
        for i in 0..a.dim() {
            out.coords[i] = self.mul(t, a.coords[i]);
        }
        out
    }

    pub fn dot(&self, a: &Point, b: &Point) -> Elem {
        debug_assert_eq!(a.dim(), b.dim());
        (0..a.dim()).fold(Elem::ZERO, |acc, i| {
            self.add(acc, self.mul(a.coords[i], b.coords[i]))
        })
    }

    /// The quadratic form `||x|| = sum x_i^2`.
    pub fn norm(&self, x: &Point) -> Elem {
        self.dot(x, x)
    }

    /// `||a - b||`.
    pub fn dist(&self, a: &Point, b: &Point) -> Elem {
        self.norm(&self.sub_pt(a, b))
    }

    /// Number of points of `F_q^d`.
    pub fn space_size(&self, d: usize) -> u64 {
        (self.q as u64).pow(d as u32)
    }

    /// The `n`-th point of `F_q^d` in canonical order (first coordinate most significant).
    pub fn point_at(&self, d: usize, mut n: u64) -> Point {
        let mut pt = Point::zero(d);
        for i in (0..d).rev() {
            pt.coords[i] = Elem((n % self.q as u64) as u32);
            n /= self.q as u64;
        }
        pt
    }

    /// All of `F_q^d` in canonical order.
    pub fn points(&self, d: usize) -> impl Iterator<Item = Point> + '_ {
        (0..self.space_size(d)).map(move |n| self.point_at(d, n))
    }

    /// Rank over `F_q` of a list of vectors (Gaussian elimination).
    pub fn rank(&self, vectors: &[Point]) -> usize {
        let Some(first) = vectors.first() else {
            return 0;
        };
        let d = first.dim();
        let mut rows: Vec<Point> = vectors.to_vec();
        let mut rank = 0;
        for col in 0..d {
            let Some(piv) = (rank..rows.len()).find(|&i| !rows[i].coords[col].is_zero()) else {
                continue;
            };
            rows.swap(rank, piv);
            let pinv = self.inv(rows[rank].coords[col]).unwrap();
            let pivot = self.scale_pt(pinv, &rows[rank]);
            rows[rank] = pivot;
            for i in 0..rows.len() {
                if i != rank && !rows[i].coords[col].is_zero() {
                    let f = rows[i].coords[col];
                    rows[i] = self.sub_pt(&rows[i], &self.scale_pt(f, &pivot));
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }
}

fn poly_mul_mod(a: &[u32], b: &[u32], low: &[u32], p: u32) -> Vec<u32> {
    let r = a.len();
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * r];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    // x^r = -(c_0 + ... + c_{r-1} x^{r-1})
    for deg in (r..2 * r).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for (j, &m) in low.iter().enumerate() {
            let t = deg - r + j;
            prod[t] = (prod[t] + (p64 - m as u64) * c) % p64;
        }
    }
    prod.truncate(r);
    prod.into_iter().map(|x| x as u32).collect()
}
