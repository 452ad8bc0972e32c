//! Exact membership oracles for density-profile regions, the map `G` and its inversion.
//!
//! Everything here is rational arithmetic; no floating point.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::constructors::SigmaParams;
use crate::error::{Error, Result};
use crate::rational::{self, rat, Rational};

/// `(d̲A, d̄A, d̲2A, d̄2A)` as `(a, b, c, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Profile {
    #[serde(with = "rational::as_string")]
    pub a: Rational,
    #[serde(with = "rational::as_string")]
    pub b: Rational,
    #[serde(with = "rational::as_string")]
    pub c: Rational,
    #[serde(with = "rational::as_string")]
    pub d: Rational,
}

impl Profile {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        for r in [&a, &b, &c, &d] {
            if !rational::in_unit_closed(r) {
                return Err(Error::InvalidParameter(format!("profile coordinate {} outside [0, 1]", rational::format(r))));
            }
        }
        Ok(Profile { a, b, c, d })
    }

    pub fn from_array(v: [Rational; 4]) -> Result<Self> {
        let [a, b, c, d] = v;
        Profile::new(a, b, c, d)
    }

    pub fn as_array(&self) -> [Rational; 4] {
        [self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]
    }

    pub fn to_f64(&self) -> [f64; 4] {
        self.as_array().map(|r| rational::to_f64(&r))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.as_array().map(|r| rational::format(&r));
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// The defining inequalities hold as written.
    Inequalities,
    /// `(kx, ky)` lies in the Freiman region.
    Multiplier { k: u64 },
    /// `β ≥ min(1, 2α)`.
    DominantSumset,
    /// `β/2 < α ≤ β/2 + 1/(2g₀)` with `g₀` the reduced denominator of `β`.
    Denominator {
        g0: u64,
        #[serde(with = "rational::as_string")]
        lower_exclusive: Rational,
        #[serde(with = "rational::as_string")]
        upper: Rational,
    },
    Sigma(SigmaParams),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub member: bool,
    pub certificate: Option<Certificate>,
}

impl RegionVerdict {
    fn yes(c: Certificate) -> Self {
        RegionVerdict { member: true, certificate: Some(c) }
    }

    fn no() -> Self {
        RegionVerdict { member: false, certificate: None }
    }

    fn from_bool(member: bool) -> Self {
        if member {
            RegionVerdict::yes(Certificate::Inequalities)
        } else {
            RegionVerdict::no()
        }
    }
}

fn unit(name: &str, r: &Rational) -> Result<()> {
    if rational::in_unit_closed(r) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {} outside [0, 1]", rational::format(r))))
    }
}

/// `f(α) = min(3α/2, (1+α)/2)`.
pub fn f_freiman(alpha: &Rational) -> Result<Rational> {
    unit("alpha", alpha)?;
    let steep = alpha * rat(3, 2);
    let flat = (Rational::one() + alpha) / rat(2, 1);
    Ok(steep.min(flat))
}

/// Inverse of [`f_freiman`]; the branches meet at `(1/2, 3/4)`.
pub fn f_inverse(y: &Rational) -> Result<Rational> {
    unit("y", y)?;
    Ok(if *y <= rat(3, 4) { y * rat(2, 3) } else { y * rat(2, 1) - Rational::one() })
}

/// `y ≥ x`; this describes both the `(d̲A, d̄A)` and the `(d̲2A, d̄2A)` projections.
pub fn in_d12(x: &Rational, y: &Rational) -> Result<RegionVerdict> {
    unit("x", x)?;
    unit("y", y)?;
    Ok(RegionVerdict::from_bool(y >= x))
}

/// Reduced denominator of `β ∈ (0, 1)`.
pub fn g0(beta: &Rational) -> Result<u64> {
    if !beta.is_positive() || *beta >= Rational::one() {
        return Err(Error::InvalidParameter(format!("g0 needs beta in (0, 1), got {}", rational::format(beta))));
    }
    beta.denom()
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("denominator exceeds u64".into()))
}

pub fn dyadic_valuation(beta: &Rational) -> Result<i64> {
    rational::dyadic_valuation(beta)
}

/// `(d̲A, d̲2A)` projection; the same region describes `(d̲A, d̄2A)`.
///
/// Only rational `β` is representable, so the second clause is always decidable.
pub fn in_d13(alpha: &Rational, beta: &Rational) -> Result<RegionVerdict> {
    unit("alpha", alpha)?;
    unit("beta", beta)?;
    let two_alpha = alpha * rat(2, 1);
    if *beta >= two_alpha.min(Rational::one()) {
        return Ok(RegionVerdict::yes(Certificate::DominantSumset));
    }
    if beta.is_zero() || beta.is_one() || dyadic_valuation(beta)? > 0 {
        return Ok(RegionVerdict::no());
    }
    let g = g0(beta)?;
    let lower = beta / rat(2, 1);
    let upper = &lower + Rational::new(1.into(), (2 * g).into());
    if *alpha > lower && *alpha <= upper {
        Ok(RegionVerdict::yes(Certificate::Denominator { g0: g, lower_exclusive: lower, upper }))
    } else {
        Ok(RegionVerdict::no())
    }
}

/// Freiman region `α₂ ≥ f(α₁)`.
pub fn in_u(alpha1: &Rational, alpha2: &Rational) -> Result<RegionVerdict> {
    unit("alpha2", alpha2)?;
    Ok(RegionVerdict::from_bool(*alpha2 >= f_freiman(alpha1)?))
}

/// `(d̄A, d̄2A)` projection: `(0, 0)` or `(x, y) = α/k` with `α` in the Freiman region.
pub fn in_d24(x: &Rational, y: &Rational) -> Result<RegionVerdict> {
    unit("x", x)?;
    unit("y", y)?;
    if x.is_zero() && y.is_zero() {
        return Ok(RegionVerdict::yes(Certificate::Multiplier { k: 1 }));
    }
    let top = x.max(y);
    let k_max = (Rational::one() / top)
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("multiplier sweep exceeds u64".into()))?;
    for k in 1..=k_max {
        let kr = rational::from_u64(k);
        if in_u(&(x * &kr), &(y * &kr))?.member {
            return Ok(RegionVerdict::yes(Certificate::Multiplier { k }));
        }
    }
    Ok(RegionVerdict::no())
}

/// The five inequalities on `(0, 1]⁴`, evaluated exactly (the last one strict).
pub fn polyhedron_contains(p: &Profile) -> bool {
    let one = Rational::one();
    let Profile { a, b, c, d } = p;
    p.as_array().iter().all(rational::in_unit_open_closed)
        && a <= b
        && c <= d
        && (b * rat(2, 1)).min(one.clone()) <= *d
        && (a + b).min(one) <= *c
        && *d < c * rat(2, 1)
}

pub fn polyhedron_member(p: &Profile) -> RegionVerdict {
    RegionVerdict::from_bool(polyhedron_contains(p))
}

/// `G` on raw coordinates, without checking that they form valid parameters.
pub fn map_g_raw(s: &[Rational; 4]) -> [Rational; 4] {
    let one = Rational::one();
    [
        &s[2] * &s[0],
        &s[3] * &s[1],
        (&s[0] + &s[1]).min(one.clone()),
        (&s[1] * rat(2, 1)).min(one),
    ]
}

pub fn map_g(sigma: &SigmaParams) -> Result<Profile> {
    sigma.validate()?;
    Profile::from_array(map_g_raw(&sigma.as_array()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaCase {
    /// `c = d = 1`.
    Saturated,
    /// `c < d = 1`.
    UpperSaturated,
    /// `d < 1`.
    Unsaturated,
}

impl SigmaCase {
    pub fn of(p: &Profile) -> Self {
        if !p.d.is_one() {
            SigmaCase::Unsaturated
        } else if p.c.is_one() {
            SigmaCase::Saturated
        } else {
            SigmaCase::UpperSaturated
        }
    }
}

impl fmt::Display for SigmaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaCase::Saturated => "c=d=1",
            SigmaCase::UpperSaturated => "c<d=1",
            SigmaCase::Unsaturated => "d<1",
        })
    }
}

/// The literal case-analysis σ and what `G` does with it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSigma {
    pub case: SigmaCase,
    #[serde(with = "rational::vec_as_string")]
    pub sigma: Vec<Rational>,
    /// The coordinates satisfy the parameter invariants.
    pub sigma_valid: bool,
    #[serde(with = "rational::vec_as_string")]
    pub image: Vec<Rational>,
    /// `G(σ) = p` exactly (evaluated on the raw coordinates).
    pub inverts: bool,
}

/// Case formulas: `(a, b, 1, 1)`, `(c-b, b, a/(c-b), 1)` and
/// `(c-d/2, d/2, a/(c-d/2), 2b/d)`.
pub fn case_sigma(p: &Profile) -> Result<CaseSigma> {
    if !polyhedron_contains(p) {
        return Err(Error::Precondition(format!("{p} is not in the polyhedron")));
    }
    let Profile { a, b, c, d } = p;
    let case = SigmaCase::of(p);
    let sigma = match case {
        SigmaCase::Saturated => [a.clone(), b.clone(), Rational::one(), Rational::one()],
        SigmaCase::UpperSaturated => {
            let a1 = c - b;
            if a1.is_zero() {
                return Err(Error::Precondition(format!("c = b in {p}: middle case divides by zero")));
            }
            [a1.clone(), b.clone(), a / a1, Rational::one()]
        }
        SigmaCase::Unsaturated => {
            let half = d / rat(2, 1);
            let a1 = c - &half;
            [a1.clone(), half, a / a1, b * rat(2, 1) / d]
        }
    };
    let [s0, s1, s2, s3] = sigma.clone();
    let sigma_valid = SigmaParams::new(s0, s1, s2, s3).is_ok();
    let image = map_g_raw(&sigma);
    let inverts = image == p.as_array();
    Ok(CaseSigma { case, sigma: sigma.to_vec(), sigma_valid, image: image.to_vec(), inverts })
}

/// Parameters `σ` with `G(σ) = p`, or `None` when `p` is not in the image of `G`.
pub fn solve_sigma(p: &Profile) -> Option<SigmaParams> {
    let Profile { a, b, c, d } = p;
    if !p.as_array().iter().all(rational::in_unit_open_closed) || a > b {
        return None;
    }
    let half = rat(1, 2);
    let sigma = match SigmaCase::of(p) {
        SigmaCase::Unsaturated => {
            let a2 = d / rat(2, 1);
            let a1 = c - &a2;
            if !a1.is_positive() {
                return None;
            }
            let b1 = a / &a1;
            SigmaParams::new(a1, a2, b1, b * rat(2, 1) / d).ok()?
        }
        SigmaCase::UpperSaturated => {
            let a2 = half.max(b.clone());
            if c - a < a2 {
                return None;
            }
            let a1 = c - &a2;
            SigmaParams::new(a1.clone(), a2.clone(), a / a1, b / a2).ok()?
        }
        SigmaCase::Saturated => {
            let a2 = half.max(b.clone());
            let a1 = a.clone().max(Rational::one() - &a2);
            SigmaParams::new(a1.clone(), a2.clone(), a / a1, b / a2).ok()?
        }
    };
    if map_g_raw(&sigma.as_array()) != p.as_array() {
        return None;
    }
    Some(sigma)
}

/// Polyhedron membership plus a parameter certificate when `p` is in the image of `G`.
pub fn polyhedron_verdict(p: &Profile) -> (RegionVerdict, Option<SigmaParams>) {
    (polyhedron_member(p), solve_sigma(p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripletKind {
    /// `(a, c, d)`: `A` has density `a`, `2A` has lower `c` and upper `d`.
    DensAVs2a,
    /// `(a, b, c)`: `A` has lower `a` and upper `b`, `2A` has density `c`.
    ProfileAVsDens2a,
}

impl std::str::FromStr for TripletKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dens_A_vs_2A" | "dens-a-vs-2a" => Ok(TripletKind::DensAVs2a),
            "profile_A_vs_dens2A" | "profile-a-vs-dens2a" => Ok(TripletKind::ProfileAVsDens2a),
            other => Err(Error::Parse(format!("unknown triplet kind {other:?}"))),
        }
    }
}

pub fn triplet_query(kind: TripletKind, point: &[Rational; 3]) -> Result<RegionVerdict> {
    for (i, r) in point.iter().enumerate() {
        unit(&format!("coordinate {i}"), r)?;
    }
    let [x, y, z] = point;
    let member = match kind {
        TripletKind::DensAVs2a => y <= z && (x * rat(2, 1)).min(Rational::one()) <= *y && *z < y * rat(2, 1),
        TripletKind::ProfileAVsDens2a => x <= y && y * rat(2, 1) <= *z,
    };
    Ok(RegionVerdict::from_bool(member))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slab {
    All,
    /// `d < 1` only.
    Unsaturated,
}

impl std::str::FromStr for Slab {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Slab::All),
            "d<1" | "unsaturated" => Ok(Slab::Unsaturated),
            other => Err(Error::Parse(format!("unknown slab {other:?}"))),
        }
    }
}

/// A polyhedron point where the literal σ does not invert `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub profile: Profile,
    pub formula_case: SigmaCase,
    pub inverts: bool,
    pub sigma_valid: bool,
    pub solver_feasible: bool,
    /// False for the extra landmark point off the grid.
    pub on_grid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub resolution: u32,
    pub slab: Slab,
    /// Polyhedron points examined, landmark included.
    pub examined: u64,
    pub disagreements: Vec<ScanRow>,
}

pub const MIN_SCAN_RESOLUTION: u32 = 4;

/// `(3/7, 3/7, 6/7, 1)`: in the polyhedron but outside the image of `G`.
pub fn scan_landmark() -> Profile {
    Profile::new(rat(3, 7), rat(3, 7), rat(6, 7), Rational::one()).expect("in range")
}

fn scan_point(p: Profile, on_grid: bool) -> Result<Option<ScanRow>> {
    let lit = case_sigma(&p)?;
    if lit.inverts {
        return Ok(None);
    }
    let solver_feasible = solve_sigma(&p).is_some();
    Ok(Some(ScanRow { formula_case: lit.case, inverts: lit.inverts, sigma_valid: lit.sigma_valid, solver_feasible, on_grid, profile: p }))
}

/// Audits the literal σ over the polyhedron points of the grid `{1/n, …, 1}⁴`.
pub fn scan_discrepancy(resolution: u32, slab: Slab) -> Result<ScanReport> {
    if resolution < MIN_SCAN_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "scan resolution {resolution} is below {MIN_SCAN_RESOLUTION}"
        )));
    }
    let n = resolution as i64;
    let mut examined = 0;
    let mut disagreements = Vec::new();
    // Integer pre-filter: the polyhedron scaled by n.
    for a in 1..=n {
        for b in a..=n {
            for c in (a + b).min(n)..=n {
                let d_top = if slab == Slab::Unsaturated { n - 1 } else { n };
                for d in c.max((2 * b).min(n))..=d_top {
                    if d >= 2 * c {
                        break;
                    }
                    let p = Profile::new(rat(a, n), rat(b, n), rat(c, n), rat(d, n))?;
                    debug_assert!(polyhedron_contains(&p));
                    examined += 1;
                    disagreements.extend(scan_point(p, true)?);
                }
            }
        }
    }
    let landmark = scan_landmark();
    let on_grid = (rat(6, 7) * rational::from_u64(resolution as u64)).is_integer();
    if !on_grid && (slab == Slab::All || !landmark.d.is_one()) {
        examined += 1;
        disagreements.extend(scan_point(landmark, false)?);
    }
    Ok(ScanReport { resolution, slab, examined, disagreements })
}
