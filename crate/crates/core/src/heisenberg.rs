//! The group `G = R^N × R` with `(x, s) ◇ (y, t) = (x + y, s + t + B(x, y))`.
//!
//! Two chains of subgroups are available:
//!
//! * `H_j = 𝓘_j^N × 𝓘_j`, normal in `G`;
//! * `G_j = 𝓘_j^N × 𝓘_{2j}`, compatible with the dilations
//!   `δ_r(x, s) = (r x, r² s)` but in general only weakly normal.
//!
//! They are sandwiched as `H_{2j} ⊆ G_j ⊆ H_j`. Since `H_L` is normal, the
//! finite quotient `G / H_L` is again a Heisenberg group, realized as the
//! same law at precision `L`; the normality checks enumerate it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::hmodule::{BilinearForm, HModuleError, ModuleVec};
use crate::madic::{AdicRing, MadicError, MadicInt, ValuationResult};
use crate::tower::RadiusProfile;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeisenbergError {
    #[error("point does not belong to this group (modulus, rank or precision differ)")]
    ContextMismatch,
    #[error("level {got} is too shallow, need at least {needed}")]
    LevelTooShallow { needed: u32, got: u32 },
    #[error("level {requested} exceeds the precision {available}")]
    PrecisionExceeded { requested: u32, available: u32 },
    #[error("enumeration of {0} elements is too large")]
    EnumerationTooLarge(String),
    #[error("conjugation by the group law disagrees with the closed form")]
    ConjugationMismatch,
    #[error(transparent)]
    Module(#[from] HModuleError),
    #[error(transparent)]
    Madic(#[from] MadicError),
}

/// Largest enumeration the exhaustive checks accept.
pub const MAX_ENUMERATION: u64 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChainFamily {
    /// `H_j = 𝓘_j^N × 𝓘_j`.
    H,
    /// `G_j = 𝓘_j^N × 𝓘_{2j}`.
    G,
}

impl ChainFamily {
    /// Level of the central ideal at step `j`.
    pub fn central_level(self, j: u32) -> u32 {
        match self {
            ChainFamily::H => j,
            ChainFamily::G => 2 * j,
        }
    }
}

impl std::str::FromStr for ChainFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H" | "h" => Ok(ChainFamily::H),
            "G" | "g" | "E" | "e" => Ok(ChainFamily::G),
            _ => Err(format!("unknown chain family {s:?} (expected H or G)")),
        }
    }
}

/// Three-valued membership: levels below the precision are decided exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NotMember,
    Inconclusive,
}

impl Membership {
    fn from_option(b: Option<bool>) -> Self {
        match b {
            Some(true) => Membership::Member,
            Some(false) => Membership::NotMember,
            None => Membership::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HPoint {
    x: ModuleVec,
    s: MadicInt,
}

impl HPoint {
    pub fn new(x: ModuleVec, s: MadicInt) -> Result<HPoint, HeisenbergError> {
        if x.precision() != s.precision() || x.modulus() != s.modulus() {
            return Err(HeisenbergError::ContextMismatch);
        }
        Ok(HPoint { x, s })
    }

    pub fn x(&self) -> &ModuleVec {
        &self.x
    }

    pub fn s(&self) -> &MadicInt {
        &self.s
    }

    pub fn rank(&self) -> usize {
        self.x.rank()
    }

    pub fn precision(&self) -> u32 {
        self.s.precision()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.s.is_zero()
    }

    /// Coordinates reduced to precision `j`.
    pub fn truncate(&self, j: u32) -> Result<HPoint, HeisenbergError> {
        Ok(HPoint { x: self.x.truncate(j)?, s: self.s.truncate(j)? })
    }

    /// Residues in the order `x_1, …, x_N, s`.
    pub fn residues(&self) -> impl Iterator<Item = &BigInt> {
        self.x.coords().iter().map(MadicInt::value).chain(std::iter::once(self.s.value()))
    }
}

impl<'de> Deserialize<'de> for HPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            x: ModuleVec,
            s: MadicInt,
        }
        let r = Repr::deserialize(d)?;
        HPoint::new(r.x, r.s).map_err(serde::de::Error::custom)
    }
}

/// A finite box of points `(c_1 d_1, …, c_{N+1} d_{N+1})` with digits
/// `0 <= d_i < radix_i`, enumerated lexicographically (`x_1` most
/// significant, `s` least).
#[derive(Debug, Clone)]
pub(crate) struct DigitBox {
    radices: Vec<u64>,
    scales: Vec<BigInt>,
    count: usize,
}

impl DigitBox {
    pub(crate) fn count(&self) -> usize {
        self.count
    }

    pub(crate) fn digits(&self, mut idx: usize) -> Vec<u64> {
        let mut d = vec![0; self.radices.len()];
        for (slot, &r) in d.iter_mut().zip(&self.radices).rev() {
            *slot = idx as u64 % r;
            idx /= r as usize;
        }
        d
    }

    /// Index of an in-range digit vector.
    pub(crate) fn index(&self, digits: &[u64]) -> usize {
        digits
            .iter()
            .zip(&self.radices)
            .fold(0usize, |acc, (&d, &r)| acc * r as usize + d as usize)
    }

    pub(crate) fn point(&self, ring: &AdicRing, idx: usize) -> HPoint {
        let vals: Vec<MadicInt> = self
            .digits(idx)
            .into_iter()
            .zip(&self.scales)
            .map(|(d, c)| ring.element(&(c * d)))
            .collect();
        let (x, s) = vals.split_at(vals.len() - 1);
        HPoint { x: ModuleVec::new(x.to_vec()).expect("uniform"), s: s[0].clone() }
    }
}

/// One Heisenberg group: modulus, precision, bilinear form and radius
/// profile. Immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct HeisenbergContext {
    ring: AdicRing,
    form: BilinearForm,
    profile: RadiusProfile,
    exec: Exec,
}

impl HeisenbergContext {
    pub fn new(m: impl Into<BigInt>, form: BilinearForm, precision: u32) -> Result<Self, HeisenbergError> {
        Ok(HeisenbergContext {
            ring: AdicRing::new(m, precision)?,
            form,
            profile: RadiusProfile::default(),
            exec: Exec::default(),
        })
    }

    pub fn with_profile(mut self, profile: RadiusProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn ring(&self) -> &AdicRing {
        &self.ring
    }

    pub fn modulus(&self) -> &BigInt {
        self.ring.modulus()
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision()
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    pub fn form(&self) -> &BilinearForm {
        &self.form
    }

    pub fn profile(&self) -> &RadiusProfile {
        &self.profile
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    /// `G / H_j` as a group of its own (same law at precision `j`).
    pub fn quotient(&self, j: u32) -> Result<HeisenbergContext, HeisenbergError> {
        if j > self.precision() {
            return Err(HeisenbergError::PrecisionExceeded { requested: j, available: self.precision() });
        }
        Ok(HeisenbergContext { ring: self.ring.at_precision(j)?, ..self.clone() })
    }

    pub fn identity(&self) -> HPoint {
        HPoint { x: ModuleVec::zero(&self.ring, self.rank()), s: self.ring.zero() }
    }

    pub fn point(&self, x: &[i64], s: i64) -> Result<HPoint, HeisenbergError> {
        self.point_big(&x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>(), &BigInt::from(s))
    }

    /// Image of an integer point.
    pub fn point_big(&self, x: &[BigInt], s: &BigInt) -> Result<HPoint, HeisenbergError> {
        if x.len() != self.rank() {
            return Err(HModuleError::RankMismatch { expected: self.rank(), got: x.len() }.into());
        }
        Ok(HPoint { x: ModuleVec::from_bigints(&self.ring, x)?, s: self.ring.element(s) })
    }

    pub fn check(&self, g: &HPoint) -> Result<(), HeisenbergError> {
        if g.rank() != self.rank() || g.precision() != self.precision() || g.s.modulus() != self.modulus() {
            return Err(HeisenbergError::ContextMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, g: &HPoint, h: &HPoint) -> Result<HPoint, HeisenbergError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul_unchecked(g, h))
    }

    fn mul_unchecked(&self, g: &HPoint, h: &HPoint) -> HPoint {
        let b = self.form.eval(&g.x, &h.x).expect("checked");
        HPoint {
            x: g.x.try_add(&h.x).expect("checked"),
            s: &(&g.s + &h.s) + &b,
        }
    }

    /// `(x, s)^{-1} = (-x, -s + B(x, x))`.
    pub fn inv(&self, g: &HPoint) -> Result<HPoint, HeisenbergError> {
        self.check(g)?;
        Ok(self.inv_unchecked(g))
    }

    fn inv_unchecked(&self, g: &HPoint) -> HPoint {
        let b = self.form.eval(&g.x, &g.x).expect("checked");
        HPoint { x: g.x.neg(), s: &(-&g.s) + &b }
    }

    /// `(g ◇ h) ◇ g^{-1}`, cross-checked against `(y, t + B(x, y) - B(y, x))`.
    pub fn conjugate(&self, g: &HPoint, h: &HPoint) -> Result<HPoint, HeisenbergError> {
        self.check(g)?;
        self.check(h)?;
        let by_law = self.mul_unchecked(&self.mul_unchecked(g, h), &self.inv_unchecked(g));
        let twist = &self.form.eval(&g.x, &h.x)? - &self.form.eval(&h.x, &g.x)?;
        let closed = HPoint { x: h.x.clone(), s: &h.s + &twist };
        if by_law != closed {
            return Err(HeisenbergError::ConjugationMismatch);
        }
        Ok(by_law)
    }

    /// `δ_r(x, s) = (r x, r² s)`.
    pub fn dilate(&self, r: &BigInt, g: &HPoint) -> Result<HPoint, HeisenbergError> {
        self.check(g)?;
        Ok(HPoint { x: g.x.scale(r), s: g.s.scale(&(r * r)) })
    }

    /// Largest `j` with `g ∈ family_j`, as far as the precision can tell.
    pub fn group_valuation(&self, g: &HPoint, family: ChainFamily) -> ValuationResult {
        let central = match (family, g.s.valuation()) {
            (ChainFamily::H, v) => v,
            (ChainFamily::G, ValuationResult::Exact(k)) => ValuationResult::Exact(k / 2),
            (ChainFamily::G, ValuationResult::AtLeast(k)) => ValuationResult::AtLeast(k / 2),
        };
        g.x.valuation().min(central)
    }

    pub fn chain_member(&self, g: &HPoint, family: ChainFamily, j: u32) -> Result<Membership, HeisenbergError> {
        self.check(g)?;
        let x_in = g.x.in_level(j);
        let s_in = g.s.valuation().at_least(family.central_level(j));
        Ok(Membership::from_option(match (x_in, s_in) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        }))
    }

    /// `ρ(g) = r_{j(g)}`; zero when `g` is trivial to full precision.
    pub fn rho(&self, g: &HPoint, family: ChainFamily) -> BigRational {
        match self.group_valuation(g, family) {
            ValuationResult::Exact(j) => self.profile.radius(j),
            ValuationResult::AtLeast(_) => BigRational::zero(),
        }
    }

    /// The left-invariant ultrametric `d(g, h) = ρ(h^{-1} ◇ g)`.
    pub fn group_distance(&self, g: &HPoint, h: &HPoint, family: ChainFamily) -> Result<GroupDistance, HeisenbergError> {
        let diff = self.mul(&self.inv(h)?, g)?;
        let valuation = self.group_valuation(&diff, family);
        Ok(GroupDistance { valuation, radius: self.rho(&diff, family) })
    }

    /// `Φ_j : G → G / H_j`, landing in [`HeisenbergContext::quotient`]`(j)`.
    pub fn project(&self, g: &HPoint, j: u32) -> Result<HPoint, HeisenbergError> {
        self.check(g)?;
        if j > self.precision() {
            return Err(HeisenbergError::PrecisionExceeded { requested: j, available: self.precision() });
        }
        g.truncate(j)
    }

    /// Canonical representative of the left coset `g ◇ family_l`: `x`
    /// reduced to `[0, m^l)` and the central coordinate adjusted by
    /// `B(x, x' - x)` then reduced modulo the central ideal.
    pub fn coset_rep(&self, g: &HPoint, family: ChainFamily, l: u32) -> Result<HPoint, HeisenbergError> {
        self.check(g)?;
        let c = family.central_level(l);
        if c > self.precision() {
            return Err(HeisenbergError::PrecisionExceeded { requested: c, available: self.precision() });
        }
        let px = self.ring.power(l);
        let xr: Vec<MadicInt> = g.x.coords().iter().map(|v| self.ring.element(&(v.value() % px))).collect();
        let xr = ModuleVec::new(xr)?;
        let s = match family {
            ChainFamily::H => g.s.clone(),
            ChainFamily::G => &g.s + &self.form.eval(&g.x, &xr.try_sub(&g.x)?)?,
        };
        let s = self.ring.element(&(s.value() % self.ring.power(c)));
        Ok(HPoint { x: xr, s })
    }

    pub(crate) fn to_u64(&self, v: &BigInt) -> Result<u64, HeisenbergError> {
        v.to_u64().ok_or_else(|| HeisenbergError::EnumerationTooLarge(v.to_string()))
    }

    fn digit_box(&self, radix_exps: &[u32], scale_exps: &[u32]) -> Result<DigitBox, HeisenbergError> {
        let m = self.to_u64(self.modulus())?;
        let too_large = || HeisenbergError::EnumerationTooLarge(format!("{m}^{radix_exps:?}"));
        let mut radices = Vec::with_capacity(radix_exps.len());
        let mut count: u64 = 1;
        for &e in radix_exps {
            let r = m.checked_pow(e).ok_or_else(too_large)?;
            count = count.checked_mul(r).ok_or_else(too_large)?;
            radices.push(r);
        }
        if count > MAX_ENUMERATION {
            return Err(too_large());
        }
        let scales = scale_exps.iter().map(|&e| BigInt::from(m).pow(e)).collect();
        Ok(DigitBox { radices, scales, count: count as usize })
    }

    /// Canonical coset representatives of `G / family_l`.
    pub(crate) fn coset_box(&self, family: ChainFamily, l: u32) -> Result<DigitBox, HeisenbergError> {
        let c = family.central_level(l);
        if c > self.precision() {
            return Err(HeisenbergError::PrecisionExceeded { requested: c, available: self.precision() });
        }
        let mut exps = vec![l; self.rank()];
        exps.push(c);
        self.digit_box(&exps, &vec![0; self.rank() + 1])
    }

    /// The elements of `family_j` inside this (finite) group, i.e. with the
    /// context precision playing the role of the quotient level.
    fn member_box(&self, family: ChainFamily, j: u32) -> Result<DigitBox, HeisenbergError> {
        let n = self.precision();
        let c = family.central_level(j);
        let mut radix = vec![n - j; self.rank()];
        radix.push(n - c);
        let mut scale = vec![j; self.rank()];
        scale.push(c);
        self.digit_box(&radix, &scale)
    }

    /// Index of the coset of `g` in the enumeration of [`Self::coset_box`].
    pub(crate) fn coset_index(&self, g: &HPoint, family: ChainFamily, l: u32, bx: &DigitBox) -> Result<usize, HeisenbergError> {
        let rep = self.coset_rep(g, family, l)?;
        let digits = rep
            .residues()
            .map(|v| self.to_u64(v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(bx.index(&digits))
    }

    fn require_level(&self, needed: u32, level: u32) -> Result<HeisenbergContext, HeisenbergError> {
        if level < needed || level == 0 {
            return Err(HeisenbergError::LevelTooShallow { needed: needed.max(1), got: level });
        }
        self.quotient(level)
    }

    /// Exhaustive normality test of `family_j` in the finite quotient
    /// `G / H_L`: every member is conjugated by every element, members in
    /// the outer loop, both in canonical order, and the first escape is
    /// reported.
    pub fn check_normality(&self, family: ChainFamily, j: u32, level: u32) -> Result<NormalityReport, HeisenbergError> {
        let q = self.require_level(family.central_level(j), level)?;
        let scope = format!("finite quotient G/H_{level}");
        if j == 0 {
            return Ok(NormalityReport { family, j, level, verdict: Verdict::Normal, witness: None, certificate_scope: scope });
        }
        let members = q.member_box(family, j)?;
        let all = q.digit_box(&vec![level; q.rank() + 1], &vec![0; q.rank() + 1])?;
        let ring = q.ring.clone();
        let c = family.central_level(j);
        let witness = self.exec.find_first(0..members.count(), |hi| {
            let h = members.point(&ring, hi);
            (0..all.count()).find_map(|ai| {
                let a = all.point(&ring, ai);
                let conj = q.mul_unchecked(&q.mul_unchecked(&a, &h), &q.inv_unchecked(&a));
                let inside = conj.x.in_level(j) == Some(true) && conj.s.valuation().at_least(c) == Some(true);
                (!inside).then(|| Witness { conjugator: a, element: h.clone(), conjugate: conj })
            })
        });
        let verdict = if witness.is_some() { Verdict::NotNormal } else { Verdict::Normal };
        Ok(NormalityReport { family, j, level, verdict, witness, certificate_scope: scope })
    }

    /// Least `l <= depth` with `family_l ⊆ a ◇ family_j ◇ a^{-1}`, checked
    /// on all members of `family_l` in `G / H_L`.
    pub fn check_weak_normality(
        &self,
        family: ChainFamily,
        a: &HPoint,
        j: u32,
        depth: u32,
        level: u32,
    ) -> Result<WeakNormalityReport, HeisenbergError> {
        self.check(a)?;
        let q = self.require_level(family.central_level(j.max(depth)), level)?;
        let a = a.truncate(level)?;
        let a_inv = q.inv_unchecked(&a);
        let ring = q.ring.clone();
        let c = family.central_level(j);
        let found = (0..=depth).find_map(|l| {
            let members = q.member_box(family, l).ok()?;
            let inside = self.exec.all(0..members.count(), |hi| {
                let h = members.point(&ring, hi);
                // h ∈ a F_j a^{-1}  iff  a^{-1} h a ∈ F_j
                let back = q.mul_unchecked(&q.mul_unchecked(&a_inv, &h), &a);
                back.x.in_level(j) == Some(true) && back.s.valuation().at_least(c) == Some(true)
            });
            inside.then_some(l)
        });
        Ok(WeakNormalityReport {
            family,
            j,
            level,
            verdict: match found {
                Some(l) => WeakVerdict::FoundLevel(l),
                None => WeakVerdict::NotFoundUpToDepth(depth),
            },
            certificate_scope: format!("finite quotient G/H_{level}"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupDistance {
    pub valuation: ValuationResult,
    #[serde(with = "crate::ratio::serde_rational")]
    pub radius: BigRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Normal,
    NotNormal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub conjugator: HPoint,
    pub element: HPoint,
    pub conjugate: HPoint,
}

/// A `Normal` verdict certifies the image in `G / H_L` only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalityReport {
    pub family: ChainFamily,
    pub j: u32,
    pub level: u32,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub certificate_scope: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum WeakVerdict {
    FoundLevel(u32),
    NotFoundUpToDepth(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakNormalityReport {
    pub family: ChainFamily,
    pub j: u32,
    pub level: u32,
    pub verdict: WeakVerdict,
    pub certificate_scope: String,
}
