//! Incidences between point pairs `(u, v)` and rigid motions: `(u, v)` is
//! incident to `r = (g, z)` when `gu + z = v`.
//!
//! `i(r)` is computed by mapping every `u` and testing membership of the image
//! in a hashed copy of `V`, so one motion costs `O(|U|)`. Work over a motion
//! set is split across the rayon pool; partial results merge associatively and
//! the outcome does not depend on the number of workers.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ffield::{Field, Point};
use crate::motions::{motion_universe, orthogonal_order, MotionClass, RigidMotion};
use crate::report::AuditReport;
use crate::{Error, Guardrails, Result};

/// `P = U x V`, never materialized.
#[derive(Clone, Debug)]
pub struct PairSet {
    dim: usize,
    u: Vec<Point>,
    v: Vec<Point>,
    v_index: HashSet<Point>,
}

impl PairSet {
    /// Deduplicates and sorts both factors.
    pub fn new(dim: usize, u: &[Point], v: &[Point]) -> Result<PairSet> {
        for x in u.iter().chain(v) {
            if x.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: x.dim(),
                });
            }
        }
        let mut u = u.to_vec();
        u.sort();
        u.dedup();
        let mut v = v.to_vec();
        v.sort();
        v.dedup();
        let v_index = v.iter().copied().collect();
        Ok(PairSet { dim, u, v, v_index })
    }

    /// `U x U`.
    pub fn square(dim: usize, u: &[Point]) -> Result<PairSet> {
        PairSet::new(dim, u, u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn u(&self) -> &[Point] {
        &self.u
    }

    pub fn v(&self) -> &[Point] {
        &self.v
    }

    pub fn len(&self) -> u64 {
        self.u.len() as u64 * self.v.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_square(&self) -> bool {
        self.u == self.v
    }

    pub fn contains(&self, u: &Point, v: &Point) -> bool {
        self.v_index.contains(v) && self.u.binary_search(u).is_ok()
    }

    /// `V x U`, the pair set seen by inverse motions.
    pub fn swapped(&self) -> PairSet {
        PairSet::new(self.dim, &self.v, &self.u).expect("same dimension")
    }
}

fn check_dims(p: &PairSet, motions: &[RigidMotion]) -> Result<()> {
    match motions.iter().find(|r| r.dim() != p.dim()) {
        Some(r) => Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: r.dim(),
        }),
        None => Ok(()),
    }
}

/// `i(r)`: pairs of `P` matched by `r`.
pub fn incidences_of(f: &Field, p: &PairSet, r: &RigidMotion) -> u64 {
    p.u.iter()
        .filter(|u| p.v_index.contains(&r.apply(f, u)))
        .count() as u64
}

/// `i(r)` for every motion, in input order.
pub fn incidence_profile(f: &Field, p: &PairSet, motions: &[RigidMotion]) -> Result<Vec<u64>> {
    check_dims(p, motions)?;
    Ok(motions
        .par_iter()
        .map(|r| incidences_of(f, p, r))
        .collect())
}

/// `I(P, R)`.
pub fn incidence_count(f: &Field, p: &PairSet, motions: &[RigidMotion]) -> Result<u64> {
    check_dims(p, motions)?;
    Ok(motions.par_iter().map(|r| incidences_of(f, p, r)).sum())
}

/// Histogram of `i(r)` over a motion universe.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotionSpectrum {
    pub histogram: BTreeMap<u64, u64>,
    pub universe_size: u64,
}

impl MotionSpectrum {
    pub fn from_profile(profile: &[u64]) -> MotionSpectrum {
        let histogram = profile
            .par_iter()
            .fold(BTreeMap::new, |mut h, &k| {
                *h.entry(k).or_insert(0u64) += 1;
                h
            })
            .reduce(BTreeMap::new, merge_histograms);
        MotionSpectrum {
            histogram,
            universe_size: profile.len() as u64,
        }
    }

    /// `sum_r i(r)`.
    pub fn total_incidences(&self) -> u128 {
        self.moment(1)
    }

    /// `sum_r i(r)^t`.
    pub fn moment(&self, t: u32) -> u128 {
        self.histogram
            .iter()
            .map(|(&k, &n)| (k as u128).pow(t) * n as u128)
            .sum()
    }

    /// `|R_k|`, the number of motions with `i(r) >= k`.
    pub fn rich_count(&self, k: u64) -> u64 {
        self.histogram.range(k..).map(|(_, &n)| n).sum()
    }

    pub fn max_incidence(&self) -> u64 {
        self.histogram.keys().next_back().copied().unwrap_or(0)
    }
}

fn merge_histograms(mut a: BTreeMap<u64, u64>, b: BTreeMap<u64, u64>) -> BTreeMap<u64, u64> {
    for (k, n) in b {
        *a.entry(k).or_insert(0) += n;
    }
    a
}

pub fn spectrum_of(f: &Field, p: &PairSet, motions: &[RigidMotion]) -> Result<MotionSpectrum> {
    Ok(MotionSpectrum::from_profile(&incidence_profile(f, p, motions)?))
}

/// Spectrum of `i(r)` over a whole motion class.
pub fn motion_spectrum(
    f: &Field,
    p: &PairSet,
    class: MotionClass,
    guard: &Guardrails,
) -> Result<MotionSpectrum> {
    let universe = motion_universe(f, p.dim(), class, guard)?;
    guard.check_work(
        "motion spectrum",
        universe.len() as u128 * p.u().len() as u128,
    )?;
    spectrum_of(f, p, &universe)
}

/// `R_k`: motions of `motions` incident to at least `k` pairs.
pub fn rich_motions(
    f: &Field,
    p: &PairSet,
    k: u64,
    motions: &[RigidMotion],
) -> Result<Vec<RigidMotion>> {
    if k == 0 {
        return Err(Error::BadParameters("richness threshold must be >= 1".into()));
    }
    let profile = incidence_profile(f, p, motions)?;
    Ok(motions
        .iter()
        .zip(profile)
        .filter(|(_, i)| *i >= k)
        .map(|(r, _)| *r)
        .collect())
}

/// `sum_r i(r)^t` over `motions`.
pub fn moment_sum(f: &Field, p: &PairSet, t: u32, motions: &[RigidMotion]) -> Result<u128> {
    if t == 0 {
        return Err(Error::BadParameters("moment exponent must be >= 1".into()));
    }
    Ok(spectrum_of(f, p, motions)?.moment(t))
}

/// `sum_r i_A(r) i_B(r) i_C(r)` with the two Hölder splits used for triangles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripleCorrelation {
    pub exact: u128,
    /// `(sum i_A^3 * sum i_B^3 * sum i_C^3)^(1/3)`.
    pub holder_333: f64,
    /// `(sum i_A^4)^(1/4) (sum i_B^4)^(1/4) (sum i_C^2)^(1/2)`.
    pub holder_442: f64,
    /// Exact integer check `exact^3 <= prod sum i^3`.
    pub within_333: bool,
    /// Exact integer check `exact^4 <= sum i_A^4 * sum i_B^4 * (sum i_C^2)^2`.
    pub within_442: bool,
}

pub fn triple_correlation(
    f: &Field,
    a: &[Point],
    b: &[Point],
    c: &[Point],
    motions: &[RigidMotion],
) -> Result<TripleCorrelation> {
    let d = motions.first().map(|r| r.dim()).unwrap_or(2);
    let pa = PairSet::square(d, a)?;
    let pb = PairSet::square(d, b)?;
    let pc = PairSet::square(d, c)?;
    let ia = incidence_profile(f, &pa, motions)?;
    let ib = incidence_profile(f, &pb, motions)?;
    let ic = incidence_profile(f, &pc, motions)?;
    let exact: u128 = (0..motions.len())
        .map(|i| ia[i] as u128 * ib[i] as u128 * ic[i] as u128)
        .sum();
    let pow_sum = |v: &[u64], t: u32| -> u128 { v.iter().map(|&x| (x as u128).pow(t)).sum() };
    let (a3, b3, c3) = (pow_sum(&ia, 3), pow_sum(&ib, 3), pow_sum(&ic, 3));
    let (a4, b4, c2) = (pow_sum(&ia, 4), pow_sum(&ib, 4), pow_sum(&ic, 2));
    let big = BigUint::from;
    let within_333 = big(exact).pow(3) <= big(a3) * big(b3) * big(c3);
    let within_442 = big(exact).pow(4) <= big(a4) * big(b4) * big(c2).pow(2);
    Ok(TripleCorrelation {
        exact,
        holder_333: (a3 as f64).cbrt() * (b3 as f64).cbrt() * (c3 as f64).cbrt(),
        holder_442: (a4 as f64).powf(0.25) * (b4 as f64).powf(0.25) * (c2 as f64).sqrt(),
        within_333,
        within_442,
    })
}

/// The incidence bounds that can be audited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// `I <= |P||R|/q^d + C q^(d/2) |O(d-1)|^(1/2) (|P||R|)^(1/2)`.
    T2_1,
    /// Small `|U|` branch under the residue hypotheses.
    T2_3a,
    /// Middle `|U|` branch under the residue hypotheses.
    T2_3b,
    /// Planar, `q = 3 mod 4`: `I <= |P||R|/q^2 + C q^(1/2) |U|^(3/4) |V|^(1/2) |R|^(1/2)`.
    T2_4,
    /// Oriented small-set bound `I << |P||R|^(2/5) + |R|^(6/5)`.
    T2_6,
    /// Prime-field planar bound for `p^(5/4) <= |U| <= p^(4/3)`.
    T8_2,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::T2_1,
        Theorem::T2_3a,
        Theorem::T2_3b,
        Theorem::T2_4,
        Theorem::T2_6,
        Theorem::T8_2,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Theorem::T2_1 => "T2.1",
            Theorem::T2_3a => "T2.3(1)",
            Theorem::T2_3b => "T2.3(2)",
            Theorem::T2_4 => "T2.4",
            Theorem::T2_6 => "T2.6",
            Theorem::T8_2 => "T8.2",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Theorem> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown theorem {s:?}")))
    }
}

/// `(d >= 3 odd) or (d = 2 mod 4 and q = 3 mod 4)`.
pub fn residue_hypothesis(f: &Field, d: usize) -> bool {
    (d >= 3 && d % 2 == 1) || (d % 4 == 2 && f.q_mod_4() == 3)
}

fn powf(x: u64, e: f64) -> f64 {
    (x as f64).powf(e)
}

/// Audits one of the incidence theorems on `(P, R)`. Side conditions are
/// recorded on the report; the audit runs regardless.
pub fn audit_bound(
    f: &Field,
    p: &PairSet,
    motions: &[RigidMotion],
    which: Theorem,
) -> Result<AuditReport> {
    let mut motions_set = motions.to_vec();
    motions_set.sort();
    motions_set.dedup();
    let motions = &motions_set[..];
    let lhs = incidence_count(f, p, motions)? as u128;
    let d = p.dim();
    let q = f.q() as u64;
    let (nu, nv, np, nr) = (
        p.u().len() as u64,
        p.v().len() as u64,
        p.len(),
        motions.len() as u64,
    );
    let pr = np as f64 * nr as f64;
    let qd = powf(q, d as f64);
    let od1 = orthogonal_order(f, d.saturating_sub(1))? as f64;
    let id = which.id();
    let u2 = nu as u128 * nu as u128;
    let qpow = |e: usize| (q as u128).pow(e as u32);

    let report = match which {
        Theorem::T2_1 => AuditReport::upper(
            id,
            f.q(),
            d,
            lhs,
            pr / qd,
            powf(q, d as f64 / 2.0) * od1.sqrt() * pr.sqrt(),
        ),
        Theorem::T2_3a => AuditReport::upper(
            id,
            f.q(),
            d,
            lhs,
            pr / qd,
            powf(q, (d as f64 - 1.0) / 2.0) * od1.sqrt() * pr.sqrt(),
        )
        .condition(
            "(d >= 3 odd) or (d = 2 mod 4 and q = 3 mod 4)",
            residue_hypothesis(f, d),
        )
        .condition("|U| < q^((d-1)/2)", u2 < qpow(d - 1)),
        Theorem::T2_3b => AuditReport::upper(
            id,
            f.q(),
            d,
            lhs,
            pr / qd,
            powf(q, (d as f64 - 1.0) / 4.0) * od1.sqrt() * pr.sqrt() * (nu as f64).sqrt(),
        )
        .condition(
            "(d >= 3 odd) or (d = 2 mod 4 and q = 3 mod 4)",
            residue_hypothesis(f, d),
        )
        .condition(
            "q^((d-1)/2) <= |U| <= q^((d+1)/2)",
            qpow(d - 1) <= u2 && u2 <= qpow(d + 1),
        ),
        Theorem::T2_4 => {
            // I(U x V, R) = I(V x U, R^-1), so the smaller factor plays U.
            let (small, large) = (nu.min(nv), nu.max(nv));
            AuditReport::upper(
                id,
                f.q(),
                d,
                lhs,
                pr / qd,
                powf(q, 0.5) * powf(small, 0.75) * powf(large, 0.5) * (nr as f64).sqrt(),
            )
            .condition("d = 2", d == 2)
            .condition("q = 3 mod 4", f.q_mod_4() == 3)
            .condition(
                if nu <= nv {
                    "|U| <= |V|"
                } else {
                    "|U| <= |V| after swapping U, V via R^-1"
                },
                true,
            )
        }
        Theorem::T2_6 => AuditReport::upper(
            id,
            f.q(),
            d,
            lhs,
            0.0,
            (np as f64 * powf(nr, 0.4)).max(powf(nr, 1.2)),
        )
        .condition("d = 2", d == 2)
        .condition("q = 3 mod 4", f.q_mod_4() == 3)
        .condition("P = U x U", p.is_square())
        .condition(
            "R in SF'(2,q)",
            motions.iter().all(|r| MotionClass::SfPrime.contains(r)),
        ),
        Theorem::T8_2 => {
            let pp = f.p() as u128;
            AuditReport::upper(
                id,
                f.q(),
                d,
                lhs,
                pr / qd,
                powf(q, 0.125) * powf(nu, 1.5) * (nr as f64).sqrt(),
            )
            .condition("d = 2", d == 2)
            .condition("q prime", f.is_prime_field())
            .condition("p = 3 mod 4", f.p() % 4 == 3)
            .condition("P = U x U", p.is_square())
            .condition(
                "p^(5/4) <= |U| <= p^(4/3)",
                u2 * u2 >= pp.pow(5) && u2 * nu as u128 <= pp.pow(4),
            )
        }
    };
    Ok(report.size("U", nu).size("V", nv).size("R", nr))
}

/// The Cauchy–Schwarz incidence bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsAudit {
    /// `I <= |P||R|^(1/2) + |R|`, constant exactly 1.
    pub bound_31: AuditReport,
    /// `I << |P|^(5/6)|R|^(1/2) + |R|` for prime `q`, `P = U x U`, `|U| <= q`.
    pub bound_33: AuditReport,
}

pub fn audit_cs_bounds(f: &Field, p: &PairSet, motions: &[RigidMotion]) -> Result<CsAudit> {
    let lhs = incidence_count(f, p, motions)? as u128;
    let np = p.len();
    let nr = motions.len() as u64;
    let d = p.dim();
    // lhs <= |P| sqrt|R| + |R|  <=>  lhs <= |R| or (lhs - |R|)^2 <= |P|^2 |R|
    let holds = lhs <= nr as u128 || {
        let e = BigUint::from(lhs - nr as u128);
        &e * &e <= BigUint::from(np) * BigUint::from(np) * BigUint::from(nr)
    };
    let bound_31 = AuditReport::upper(
        "CS3.1",
        f.q(),
        d,
        lhs,
        0.0,
        np as f64 * (nr as f64).sqrt() + nr as f64,
    )
    .size("P", np)
    .size("R", nr)
    .judged(holds);
    let bound_33 = AuditReport::upper(
        "CS3.3",
        f.q(),
        d,
        lhs,
        0.0,
        powf(np, 5.0 / 6.0) * (nr as f64).sqrt() + nr as f64,
    )
    .size("P", np)
    .size("R", nr)
    .condition("q prime", f.is_prime_field())
    .condition("P = U x U", p.is_square())
    .condition("|U| <= q", p.u().len() as u64 <= f.q() as u64);
    Ok(CsAudit { bound_31, bound_33 })
}

/// Rich-motion bounds read off a spectrum over the full motion group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RichBound {
    /// `|R_k| << |O(d-1)||P| q^d / k^2` for `k > 2|P|/q^d`.
    C2_2,
    /// `|R_k| << q |P|^(5/4) / k^2`, planar, `q = 3 mod 4`.
    C2_5,
}

/// Largest implied constant over all admissible thresholds `k`.
pub fn audit_rich(f: &Field, p: &PairSet, spectrum: &MotionSpectrum, which: RichBound) -> Result<AuditReport> {
    let d = p.dim();
    let np = p.len();
    let q = f.q() as u64;
    let qd = powf(q, d as f64);
    let od1 = orthogonal_order(f, d.saturating_sub(1))? as f64;
    let numerator = match which {
        RichBound::C2_2 => od1 * np as f64 * qd,
        RichBound::C2_5 => q as f64 * powf(np, 1.25),
    };
    // k > 2|P|/q^d  <=>  k q^d > 2|P|
    let qd_int = (q as u128).pow(d as u32);
    let mut best: Option<(u64, u64, f64)> = None;
    for k in 1..=spectrum.max_incidence() {
        if (k as u128) * qd_int <= 2 * np as u128 {
            continue;
        }
        let rk = spectrum.rich_count(k);
        let c = rk as f64 * (k as f64).powi(2) / numerator;
        if best.is_none_or(|(_, _, b)| c > b) {
            best = Some((k, rk, c));
        }
    }
    let (id, conds): (&str, Vec<(&str, bool)>) = match which {
        RichBound::C2_2 => ("C2.2", vec![]),
        RichBound::C2_5 => ("C2.5", vec![("d = 2", d == 2), ("q = 3 mod 4", f.q_mod_4() == 3)]),
    };
    let (k, rk) = best.map(|(k, rk, _)| (k, rk)).unwrap_or((0, 0));
    let unit = if k > 0 { numerator / (k as f64).powi(2) } else { 0.0 };
    let mut report = AuditReport::upper(id, f.q(), d, rk as u128, 0.0, unit)
        .size("P", np)
        .size("k", k)
        .condition("P = U x U", p.is_square())
        .condition(
            "spectrum over all of O(d) x F_q^d",
            spectrum.universe_size == orthogonal_order(f, d)? * f.space_size(d),
        )
        .condition("some k > 2|P|/q^d", best.is_some());
    for (name, holds) in conds {
        report = report.condition(name, holds);
    }
    Ok(report)
}

/// Moment bounds `sum_r i(r)^t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentBound {
    /// `<< |P|^t |O(d)| / q^((t-1)d) + q^d |O(d-1)| |P|^(t/2)`, `t >= 3`.
    P5_1,
    /// `<< |P|^t / q^(2t-3) + q |P|^((2t+1)/4)`, planar, `q = 3 mod 4`, `t >= 2`.
    P5_2,
    /// `<< |P|^t / p^(2t-3) + p^(1/4) |U|^(t+1)`, prime field, `t >= 2`.
    C8_3,
}

pub fn audit_moment(
    f: &Field,
    p: &PairSet,
    t: u32,
    spectrum: &MotionSpectrum,
    which: MomentBound,
) -> Result<AuditReport> {
    let d = p.dim();
    let q = f.q() as u64;
    let np = p.len() as f64;
    let nu = p.u().len() as u64;
    let tf = t as f64;
    let lhs = spectrum.moment(t);
    let od = orthogonal_order(f, d)?;
    let od1 = orthogonal_order(f, d.saturating_sub(1))? as f64;
    let full = spectrum.universe_size == od * f.space_size(d);
    let report = match which {
        MomentBound::P5_1 => AuditReport::upper(
            "P5.1",
            f.q(),
            d,
            lhs,
            np.powf(tf) * od as f64 / powf(q, (tf - 1.0) * d as f64),
            powf(q, d as f64) * od1 * np.powf(tf / 2.0),
        )
        .condition("t >= 3", t >= 3),
        MomentBound::P5_2 => AuditReport::upper(
            "P5.2",
            f.q(),
            d,
            lhs,
            np.powf(tf) / powf(q, 2.0 * tf - 3.0),
            q as f64 * np.powf((2.0 * tf + 1.0) / 4.0),
        )
        .condition("t >= 2", t >= 2)
        .condition("d = 2", d == 2)
        .condition("q = 3 mod 4", f.q_mod_4() == 3),
        MomentBound::C8_3 => {
            let pp = f.p() as u128;
            let u2 = nu as u128 * nu as u128;
            AuditReport::upper(
                "C8.3",
                f.q(),
                d,
                lhs,
                np.powf(tf) / powf(q, 2.0 * tf - 3.0),
                powf(q, 0.25) * powf(nu, tf + 1.0),
            )
            .condition("t >= 2", t >= 2)
            .condition("d = 2", d == 2)
            .condition("q prime", f.is_prime_field())
            .condition("p = 3 mod 4", f.p() % 4 == 3)
            .condition(
                "p^(5/4) <= |U| <= p^(4/3)",
                u2 * u2 >= pp.pow(5) && u2 * nu as u128 <= pp.pow(4),
            )
        }
    };
    Ok(report
        .condition("P = U x U", p.is_square())
        .condition("sum over all of O(d) x F_q^d", full)
        .size("U", nu)
        .size("t", t as u64))
}
