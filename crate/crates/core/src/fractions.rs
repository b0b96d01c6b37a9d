//! Rings, modules and Heisenberg groups of fractions `S^{-1} R` over
//! `R = Z` and `R = Z/kZ`.
//!
//! Fractions are never reduced. Two fractions `a/s` and `b/t` are equal
//! when `(a t - b s) v = 0` for some `v ∈ S`; over `Z` this collapses to
//! cross multiplication unless `0 ∈ S`, and over `Z/kZ` the closure of `S`
//! is finite and searched directly.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hmodule::BilinearForm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FracError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(BigInt),
    #[error("denominator {0} is not in the multiplicative set")]
    DenominatorNotInS(BigInt),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("cannot parse ring {0:?} (expected \"Z\" or \"Z/k\")")]
    BadRing(String),
    #[error("Heisenberg groups of fractions need R = Z and 0 ∉ S")]
    NeedsIntegralDomain,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseRing {
    Integers,
    IntegersMod(BigInt),
}

impl BaseRing {
    pub fn reduce(&self, a: &BigInt) -> BigInt {
        match self {
            BaseRing::Integers => a.clone(),
            BaseRing::IntegersMod(k) => a.mod_floor(k),
        }
    }

    fn validate(&self) -> Result<(), FracError> {
        match self {
            BaseRing::IntegersMod(k) if *k < BigInt::from(2) => Err(FracError::BadModulus(k.clone())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Integers => f.write_str("Z"),
            BaseRing::IntegersMod(k) => write!(f, "Z/{k}"),
        }
    }
}

impl std::str::FromStr for BaseRing {
    type Err = FracError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "Z" {
            return Ok(BaseRing::Integers);
        }
        let k = t
            .strip_prefix("Z/")
            .and_then(|k| k.trim().parse::<BigInt>().ok())
            .ok_or_else(|| FracError::BadRing(s.to_string()))?;
        let ring = BaseRing::IntegersMod(k);
        ring.validate()?;
        Ok(ring)
    }
}

impl Serialize for BaseRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BaseRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultSet {
    /// All finite products of the generators, `1` included.
    Generated {
        #[serde(with = "gens_serde")]
        gens: Vec<BigInt>,
    },
    /// `1 + mR`.
    OnePlusIdeal {
        #[serde(with = "crate::ratio::serde_bigint_compact")]
        m: BigInt,
    },
}

mod gens_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::ratio::serde_bigint_compact")] BigInt);

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|b| Wrap(b.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

impl MultSet {
    pub fn generated<I: IntoIterator<Item = i64>>(gens: I) -> Self {
        MultSet::Generated { gens: gens.into_iter().map(BigInt::from).collect() }
    }

    pub fn one_plus_ideal(m: i64) -> Self {
        MultSet::OnePlusIdeal { m: BigInt::from(m) }
    }
}

/// Membership of `v ≠ 0` in the monoid generated by `gens` inside `Z`,
/// by peeling generator factors off `v`.
fn generated_contains_z(v: &BigInt, gens: &[BigInt]) -> bool {
    if v.is_one() {
        return true;
    }
    if v.is_zero() {
        return gens.iter().any(Zero::is_zero);
    }
    let minus_one = gens.iter().any(|g| *g == -BigInt::one());
    let factors: Vec<&BigInt> = gens.iter().filter(|g| g.abs() > BigInt::one()).collect();
    let mut dead = HashSet::new();
    let mut stack = vec![v.clone()];
    while let Some(w) = stack.pop() {
        if w.is_one() || (minus_one && w == -BigInt::one()) {
            return true;
        }
        if !dead.insert(w.clone()) {
            continue;
        }
        for g in &factors {
            let (q, r) = w.div_rem(g);
            if r.is_zero() {
                stack.push(q);
            }
        }
    }
    false
}

/// `S^{-1} R` for a fixed ring and multiplicative set. The finite closure
/// of `S` over `Z/kZ` is computed once and shared by all readers.
#[derive(Debug)]
pub struct FractionRing {
    ring: BaseRing,
    set: MultSet,
    closure: OnceLock<Vec<BigInt>>,
}

impl Clone for FractionRing {
    fn clone(&self) -> Self {
        FractionRing { ring: self.ring.clone(), set: self.set.clone(), closure: self.closure.clone() }
    }
}

impl PartialEq for FractionRing {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.set == other.set
    }
}

impl Eq for FractionRing {}

/// An unreduced fraction `num / den`; compare with [`FractionRing::equal`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: BigInt,
    pub den: BigInt,
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `x / s` with `x ∈ R^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FracVec {
    pub num: Vec<BigInt>,
    pub den: BigInt,
}

/// A point of `G = R^N × R` with integer entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntHPoint {
    #[serde(with = "gens_serde")]
    pub x: Vec<BigInt>,
    #[serde(with = "crate::ratio::serde_bigint_compact")]
    pub s: BigInt,
}

impl IntHPoint {
    pub fn new(x: &[i64], s: i64) -> Self {
        IntHPoint { x: x.iter().map(|&v| BigInt::from(v)).collect(), s: BigInt::from(s) }
    }

    pub fn identity(rank: usize) -> Self {
        IntHPoint { x: vec![BigInt::zero(); rank], s: BigInt::zero() }
    }
}

/// A point of the Heisenberg group of fractions `S^{-1}M × S^{-1}R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FracHPoint {
    pub x: FracVec,
    pub s: Fraction,
}

/// `B` evaluated on integer vectors.
pub fn int_bilinear(form: &BilinearForm, x: &[BigInt], y: &[BigInt]) -> BigInt {
    let b = form.coefficients();
    let mut acc = BigInt::zero();
    for (p, xp) in x.iter().enumerate() {
        for (q, yq) in y.iter().enumerate() {
            if b[p][q] != 0 {
                acc += xp * yq * b[p][q];
            }
        }
    }
    acc
}

/// The group law on integer points.
pub fn int_mul(form: &BilinearForm, g: &IntHPoint, h: &IntHPoint) -> IntHPoint {
    IntHPoint {
        x: g.x.iter().zip(&h.x).map(|(a, b)| a + b).collect(),
        s: &g.s + &h.s + int_bilinear(form, &g.x, &h.x),
    }
}

pub fn int_dilate(r: &BigInt, g: &IntHPoint) -> IntHPoint {
    IntHPoint { x: g.x.iter().map(|v| v * r).collect(), s: &g.s * r * r }
}

impl FractionRing {
    pub fn new(ring: BaseRing, set: MultSet) -> Result<Self, FracError> {
        ring.validate()?;
        if let MultSet::OnePlusIdeal { m } = &set {
            if *m < BigInt::from(2) {
                return Err(FracError::BadModulus(m.clone()));
            }
        }
        let set = match (&ring, set) {
            (BaseRing::IntegersMod(k), MultSet::Generated { gens }) => MultSet::Generated {
                gens: gens.iter().map(|g| g.mod_floor(k)).collect(),
            },
            (_, s) => s,
        };
        Ok(FractionRing { ring, set, closure: OnceLock::new() })
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn set(&self) -> &MultSet {
        &self.set
    }

    /// The elements of `S` in increasing order; `None` over `Z`.
    pub fn closure(&self) -> Option<&[BigInt]> {
        let k = match &self.ring {
            BaseRing::Integers => return None,
            BaseRing::IntegersMod(k) => k,
        };
        Some(self.closure.get_or_init(|| match &self.set {
            MultSet::Generated { gens } => {
                let mut seen = BTreeSet::from([BigInt::one().mod_floor(k)]);
                let mut frontier: Vec<BigInt> = seen.iter().cloned().collect();
                while let Some(v) = frontier.pop() {
                    for g in gens {
                        let w = (&v * g).mod_floor(k);
                        if seen.insert(w.clone()) {
                            frontier.push(w);
                        }
                    }
                }
                seen.into_iter().collect()
            }
            MultSet::OnePlusIdeal { m } => {
                let d = m.gcd(k);
                let mut out = Vec::new();
                let mut v = BigInt::one().mod_floor(&d);
                while v < *k {
                    out.push(v.clone());
                    v += &d;
                }
                out
            }
        }))
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        match (&self.ring, &self.set) {
            (BaseRing::Integers, MultSet::Generated { gens }) => generated_contains_z(v, gens),
            (BaseRing::Integers, MultSet::OnePlusIdeal { m }) => (v - 1u32).is_multiple_of(m),
            (BaseRing::IntegersMod(k), _) => {
                let v = v.mod_floor(k);
                self.closure().expect("finite").binary_search(&v).is_ok()
            }
        }
    }

    pub fn zero_in_set(&self) -> bool {
        self.contains(&BigInt::zero())
    }

    pub fn frac(&self, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Fraction, FracError> {
        let den = self.ring.reduce(&den.into());
        if !self.contains(&den) {
            return Err(FracError::DenominatorNotInS(den));
        }
        Ok(Fraction { num: self.ring.reduce(&num.into()), den })
    }

    /// The canonical homomorphism `a ↦ a / 1`.
    pub fn canonical(&self, a: impl Into<BigInt>) -> Fraction {
        Fraction { num: self.ring.reduce(&a.into()), den: self.ring.reduce(&BigInt::one()) }
    }

    /// Some `v ∈ S` with `d v = 0`.
    fn annihilated(&self, d: &BigInt) -> bool {
        match &self.ring {
            BaseRing::Integers => d.is_zero() || self.zero_in_set(),
            BaseRing::IntegersMod(k) => {
                self.closure().expect("finite").iter().any(|v| (d * v).is_multiple_of(k))
            }
        }
    }

    pub fn equal(&self, a: &Fraction, b: &Fraction) -> bool {
        self.annihilated(&(&a.num * &b.den - &b.num * &a.den))
    }

    pub fn add(&self, a: &Fraction, b: &Fraction) -> Fraction {
        Fraction {
            num: self.ring.reduce(&(&a.num * &b.den + &b.num * &a.den)),
            den: self.ring.reduce(&(&a.den * &b.den)),
        }
    }

    pub fn neg(&self, a: &Fraction) -> Fraction {
        Fraction { num: self.ring.reduce(&-&a.num), den: a.den.clone() }
    }

    pub fn mul(&self, a: &Fraction, b: &Fraction) -> Fraction {
        Fraction {
            num: self.ring.reduce(&(&a.num * &b.num)),
            den: self.ring.reduce(&(&a.den * &b.den)),
        }
    }

    /// Some `s ∈ S` with `a s = 0`, i.e. a certificate that `a / 1 = 0`.
    /// Tries `1` first, then the closure in increasing order.
    pub fn kernel_witness(&self, a: impl Into<BigInt>) -> Option<BigInt> {
        let a = self.ring.reduce(&a.into());
        if a.is_zero() {
            return Some(self.ring.reduce(&BigInt::one()));
        }
        match &self.ring {
            BaseRing::Integers => self.zero_in_set().then(BigInt::zero),
            BaseRing::IntegersMod(k) => self
                .closure()
                .expect("finite")
                .iter()
                .find(|v| (&a * *v).is_multiple_of(k))
                .cloned(),
        }
    }

    pub fn vec_frac(&self, num: Vec<BigInt>, den: impl Into<BigInt>) -> Result<FracVec, FracError> {
        let den = self.ring.reduce(&den.into());
        if !self.contains(&den) {
            return Err(FracError::DenominatorNotInS(den));
        }
        Ok(FracVec { num: num.iter().map(|v| self.ring.reduce(v)).collect(), den })
    }

    /// `x/s = y/t` iff `v (t x - s y) = 0` for one `v ∈ S`.
    pub fn vec_equal(&self, a: &FracVec, b: &FracVec) -> Result<bool, FracError> {
        if a.num.len() != b.num.len() {
            return Err(FracError::RankMismatch(a.num.len(), b.num.len()));
        }
        let diffs: Vec<BigInt> = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * &b.den - y * &a.den)
            .collect();
        Ok(match &self.ring {
            BaseRing::Integers => self.zero_in_set() || diffs.iter().all(Zero::is_zero),
            BaseRing::IntegersMod(k) => self
                .closure()
                .expect("finite")
                .iter()
                .any(|v| diffs.iter().all(|d| (d * v).is_multiple_of(k))),
        })
    }

    pub fn vec_add(&self, a: &FracVec, b: &FracVec) -> FracVec {
        FracVec {
            num: a
                .num
                .iter()
                .zip(&b.num)
                .map(|(x, y)| self.ring.reduce(&(x * &b.den + y * &a.den)))
                .collect(),
            den: self.ring.reduce(&(&a.den * &b.den)),
        }
    }

    fn require_domain(&self) -> Result<(), FracError> {
        if self.ring != BaseRing::Integers || self.zero_in_set() {
            return Err(FracError::NeedsIntegralDomain);
        }
        Ok(())
    }

    /// `(x, s) ↦ (x / 1, s / 1)`.
    pub fn heis_hom(&self, g: &IntHPoint) -> Result<FracHPoint, FracError> {
        self.require_domain()?;
        Ok(FracHPoint {
            x: FracVec { num: g.x.clone(), den: BigInt::one() },
            s: self.canonical(g.s.clone()),
        })
    }

    /// The group law on fractions, with `(S^{-1}B)(x/s, y/t) = B(x, y) / (s t)`.
    pub fn heis_mul(&self, form: &BilinearForm, g: &FracHPoint, h: &FracHPoint) -> Result<FracHPoint, FracError> {
        self.require_domain()?;
        let twist = Fraction {
            num: int_bilinear(form, &g.x.num, &h.x.num),
            den: &g.x.den * &h.x.den,
        };
        Ok(FracHPoint {
            x: self.vec_add(&g.x, &h.x),
            s: self.add(&self.add(&g.s, &h.s), &twist),
        })
    }

    /// `δ_r` for a fraction `r`: `(r x, r² s)`.
    pub fn heis_dilate(&self, r: &Fraction, g: &FracHPoint) -> FracHPoint {
        FracHPoint {
            x: FracVec {
                num: g.x.num.iter().map(|v| v * &r.num).collect(),
                den: &g.x.den * &r.den,
            },
            s: Fraction {
                num: &g.s.num * &r.num * &r.num,
                den: &g.s.den * &r.den * &r.den,
            },
        }
    }

    pub fn heis_equal(&self, g: &FracHPoint, h: &FracHPoint) -> Result<bool, FracError> {
        Ok(self.vec_equal(&g.x, &h.x)? && self.equal(&g.s, &h.s))
    }

    pub fn to_doc(&self, f: &Fraction) -> FractionDoc {
        FractionDoc { ring: self.ring.clone(), set: self.set.clone(), num: f.num.clone(), den: f.den.clone() }
    }
}

/// JSON form `{"ring": "Z", "S": {...}, "num": "1", "den": "6"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionDoc {
    pub ring: BaseRing,
    #[serde(rename = "S")]
    pub set: MultSet,
    #[serde(with = "crate::ratio::serde_bigint")]
    pub num: BigInt,
    #[serde(with = "crate::ratio::serde_bigint")]
    pub den: BigInt,
}

impl FractionDoc {
    pub fn into_parts(self) -> Result<(FractionRing, Fraction), FracError> {
        let fr = FractionRing::new(self.ring, self.set)?;
        let f = fr.frac(self.num, self.den)?;
        Ok((fr, f))
    }
}
