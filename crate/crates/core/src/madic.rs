//! The m-adic completion of `Z` at a fixed absolute precision.
//!
//! An element at precision `n` is the residue of a coherent sequence
//! `(a_1, a_2, …)` at level `n`; it is stored as a single integer in
//! `[0, m^n)`. Lower levels are recovered by [`MadicInt::truncate`]. `m` may
//! be composite.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MadicError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(BigInt),
    #[error("precision must be positive")]
    ZeroPrecision,
    #[error("precision {requested} exceeds available precision {available}")]
    PrecisionExceeded { requested: u32, available: u32 },
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(BigInt, BigInt),
    #[error("{0} is not a unit")]
    NotAUnit(MadicInt),
    #[error("{0} is not topologically nilpotent (valuation 0)")]
    NotTopologicallyNilpotent(MadicInt),
    #[error("incoherent residues at levels ({0}, {1})")]
    IncoherentSequence(u32, u32),
    #[error("residue levels must be positive and strictly increasing")]
    LevelsNotIncreasing,
    #[error("empty residue sequence")]
    EmptySequence,
    #[error("value {value} is not a reduced residue modulo m^{n}")]
    OutOfRange { value: BigInt, n: u32 },
}

/// `m` together with its powers `m^0..=m^n`.
#[derive(Debug)]
struct PowerTable {
    m: BigInt,
    powers: Vec<BigInt>,
}

/// The quotient `Z / m^n Z` viewed as the level-`n` shadow of the
/// completion; hands out elements sharing one power table.
#[derive(Debug, Clone)]
pub struct AdicRing {
    table: Arc<PowerTable>,
    n: u32,
}

impl AdicRing {
    pub fn new(m: impl Into<BigInt>, n: u32) -> Result<Self, MadicError> {
        let m = m.into();
        if m < BigInt::from(2) {
            return Err(MadicError::BadModulus(m));
        }
        if n == 0 {
            return Err(MadicError::ZeroPrecision);
        }
        let mut powers = Vec::with_capacity(n as usize + 1);
        let mut p = BigInt::one();
        for _ in 0..=n {
            powers.push(p.clone());
            p *= &m;
        }
        Ok(AdicRing {
            table: Arc::new(PowerTable { m, powers }),
            n,
        })
    }

    pub fn modulus(&self) -> &BigInt {
        &self.table.m
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    /// `m^j` for `j <= precision`.
    pub fn power(&self, j: u32) -> &BigInt {
        &self.table.powers[j as usize]
    }

    /// The same ring at a lower precision.
    pub fn at_precision(&self, j: u32) -> Result<AdicRing, MadicError> {
        if j == 0 {
            return Err(MadicError::ZeroPrecision);
        }
        if j > self.n {
            return Err(MadicError::PrecisionExceeded { requested: j, available: self.n });
        }
        Ok(AdicRing { table: Arc::clone(&self.table), n: j })
    }

    pub fn element(&self, x: &BigInt) -> MadicInt {
        MadicInt {
            table: Arc::clone(&self.table),
            n: self.n,
            value: x.mod_floor(self.power(self.n)),
        }
    }

    pub fn int(&self, x: i64) -> MadicInt {
        self.element(&BigInt::from(x))
    }

    pub fn zero(&self) -> MadicInt {
        self.int(0)
    }

    pub fn one(&self) -> MadicInt {
        self.int(1)
    }

    /// Accepts only an already reduced residue.
    pub fn residue(&self, value: BigInt) -> Result<MadicInt, MadicError> {
        if value.is_negative() || value >= *self.power(self.n) {
            return Err(MadicError::OutOfRange { value, n: self.n });
        }
        Ok(MadicInt { table: Arc::clone(&self.table), n: self.n, value })
    }

    /// Rebuilds an element from residues `(j, a_j)` at strictly increasing
    /// levels, checking `a_l ≡ a_j (mod m^j)` for every pair `j < l`.
    pub fn from_residues(m: impl Into<BigInt>, rs: &[(u32, BigInt)]) -> Result<MadicInt, MadicError> {
        let &(top, _) = rs.last().ok_or(MadicError::EmptySequence)?;
        if rs[0].0 == 0 || rs.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(MadicError::LevelsNotIncreasing);
        }
        let ring = AdicRing::new(m, top)?;
        for (j, a) in rs {
            if a.is_negative() || *a >= *ring.power(*j) {
                return Err(MadicError::OutOfRange { value: a.clone(), n: *j });
            }
        }
        for (i, (j, aj)) in rs.iter().enumerate() {
            for (l, al) in &rs[i + 1..] {
                if al.mod_floor(ring.power(*j)) != *aj {
                    return Err(MadicError::IncoherentSequence(*j, *l));
                }
            }
        }
        ring.residue(rs[rs.len() - 1].1.clone())
    }
}

/// Precision-aware valuation: a zero residue only bounds the valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum ValuationResult {
    Exact(u32),
    AtLeast(u32),
}

impl ValuationResult {
    /// The certified lower bound.
    pub fn bound(self) -> u32 {
        match self {
            ValuationResult::Exact(j) | ValuationResult::AtLeast(j) => j,
        }
    }

    /// Whether the valuation is certainly `>= j`; `None` when undecided.
    pub fn at_least(self, j: u32) -> Option<bool> {
        match self {
            ValuationResult::Exact(v) => Some(v >= j),
            ValuationResult::AtLeast(v) if v >= j => Some(true),
            ValuationResult::AtLeast(_) => None,
        }
    }

    /// Valuation of a tuple (or of a sum of pieces): the minimum, where an
    /// exact value wins when it does not exceed the other bound.
    pub fn min(self, other: ValuationResult) -> ValuationResult {
        use ValuationResult::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Exact(a.min(b)),
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
            (Exact(a), AtLeast(b)) | (AtLeast(b), Exact(a)) => {
                if a <= b {
                    Exact(a)
                } else {
                    AtLeast(b)
                }
            }
        }
    }
}

impl fmt::Display for ValuationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationResult::Exact(j) => write!(f, "{j}"),
            ValuationResult::AtLeast(j) => write!(f, ">={j}"),
        }
    }
}

#[derive(Clone)]
pub struct MadicInt {
    table: Arc<PowerTable>,
    n: u32,
    value: BigInt,
}

impl MadicInt {
    pub fn from_integer(x: &BigInt, m: impl Into<BigInt>, n: u32) -> Result<MadicInt, MadicError> {
        Ok(AdicRing::new(m, n)?.element(x))
    }

    pub fn modulus(&self) -> &BigInt {
        &self.table.m
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn ring(&self) -> AdicRing {
        AdicRing { table: Arc::clone(&self.table), n: self.n }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn modulus_pow(&self) -> &BigInt {
        &self.table.powers[self.n as usize]
    }

    fn with_value(&self, n: u32, value: BigInt) -> MadicInt {
        MadicInt { table: Arc::clone(&self.table), n, value }
    }

    /// `θ_{j,n}`: reduction to level `j`.
    pub fn truncate(&self, j: u32) -> Result<MadicInt, MadicError> {
        if j == 0 {
            return Err(MadicError::ZeroPrecision);
        }
        if j > self.n {
            return Err(MadicError::PrecisionExceeded { requested: j, available: self.n });
        }
        let v = &self.value % &self.table.powers[j as usize];
        Ok(self.with_value(j, v))
    }

    pub fn same_modulus(&self, other: &MadicInt) -> Result<(), MadicError> {
        if Arc::ptr_eq(&self.table, &other.table) || self.table.m == other.table.m {
            Ok(())
        } else {
            Err(MadicError::ModulusMismatch(self.table.m.clone(), other.table.m.clone()))
        }
    }

    // Operand with the smaller precision carries the result.
    fn binary(&self, other: &MadicInt, f: impl FnOnce(&BigInt, &BigInt) -> BigInt) -> Result<MadicInt, MadicError> {
        self.same_modulus(other)?;
        let low = if self.n <= other.n { self } else { other };
        let v = f(&self.value, &other.value).mod_floor(low.modulus_pow());
        Ok(low.with_value(low.n, v))
    }

    pub fn try_add(&self, other: &MadicInt) -> Result<MadicInt, MadicError> {
        self.binary(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &MadicInt) -> Result<MadicInt, MadicError> {
        self.binary(other, |a, b| a - b)
    }

    pub fn try_mul(&self, other: &MadicInt) -> Result<MadicInt, MadicError> {
        self.binary(other, |a, b| a * b)
    }

    /// Multiplication by an integer, i.e. by its image in the completion.
    pub fn scale(&self, r: &BigInt) -> MadicInt {
        self.with_value(self.n, (&self.value * r).mod_floor(self.modulus_pow()))
    }

    pub fn pow(&self, k: u32) -> MadicInt {
        self.with_value(self.n, self.value.modpow(&BigInt::from(k), self.modulus_pow()))
    }

    pub fn valuation(&self) -> ValuationResult {
        if self.value.is_zero() {
            return ValuationResult::AtLeast(self.n);
        }
        let mut j = 0;
        let mut v = self.value.clone();
        loop {
            let (q, r) = v.div_rem(&self.table.m);
            if !r.is_zero() {
                return ValuationResult::Exact(j);
            }
            v = q;
            j += 1;
        }
    }

    pub fn is_unit(&self) -> bool {
        self.value.gcd(&self.table.m).is_one()
    }

    /// Inverse modulo `m^n` by the extended Euclidean algorithm.
    pub fn invert_unit(&self) -> Result<MadicInt, MadicError> {
        let modulus = self.modulus_pow();
        let e = self.value.extended_gcd(modulus);
        if !e.gcd.is_one() {
            return Err(MadicError::NotAUnit(self.clone()));
        }
        Ok(self.with_value(self.n, e.x.mod_floor(modulus)))
    }

    /// `(1 - x)^{-1}` as the partial sum `1 + x + … + x^K`, where `K + 1`
    /// is the least exponent with `x^{K+1} ≡ 0 (mod m^n)` forced by the
    /// valuation of `x`.
    pub fn geom_inverse_one_minus(&self) -> Result<MadicInt, MadicError> {
        let v = match self.valuation() {
            ValuationResult::Exact(0) => return Err(MadicError::NotTopologicallyNilpotent(self.clone())),
            ValuationResult::Exact(v) => v,
            ValuationResult::AtLeast(_) => return Ok(self.ring().one()),
        };
        let terms = self.n.div_ceil(v);
        let modulus = self.modulus_pow();
        let mut s = BigInt::one();
        for _ in 1..terms {
            s = (BigInt::one() + &self.value * &s).mod_floor(modulus);
        }
        Ok(self.with_value(self.n, s))
    }
}

fn expect_ok(r: Result<MadicInt, MadicError>) -> MadicInt {
    match r {
        Ok(v) => v,
        Err(e) => panic!("{e}"),
    }
}

/// Panics on mismatched moduli; use the `try_*` methods to get an error.
impl Add for &MadicInt {
    type Output = MadicInt;
    fn add(self, rhs: &MadicInt) -> MadicInt {
        expect_ok(self.try_add(rhs))
    }
}

impl Sub for &MadicInt {
    type Output = MadicInt;
    fn sub(self, rhs: &MadicInt) -> MadicInt {
        expect_ok(self.try_sub(rhs))
    }
}

impl Mul for &MadicInt {
    type Output = MadicInt;
    fn mul(self, rhs: &MadicInt) -> MadicInt {
        expect_ok(self.try_mul(rhs))
    }
}

impl Neg for &MadicInt {
    type Output = MadicInt;
    fn neg(self) -> MadicInt {
        self.with_value(self.n, (-&self.value).mod_floor(self.modulus_pow()))
    }
}

impl PartialEq for MadicInt {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.value == other.value && self.table.m == other.table.m
    }
}

impl Eq for MadicInt {}

impl Hash for MadicInt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.table.m.hash(state);
        self.n.hash(state);
        self.value.hash(state);
    }
}

impl fmt::Display for MadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.table.m, self.n)
    }
}

impl fmt::Debug for MadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct MadicRepr {
    #[serde(with = "crate::ratio::serde_bigint_compact")]
    m: BigInt,
    n: u32,
    #[serde(with = "crate::ratio::serde_bigint")]
    value: BigInt,
}

impl Serialize for MadicInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MadicRepr { m: self.table.m.clone(), n: self.n, value: self.value.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MadicInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MadicRepr::deserialize(d)?;
        AdicRing::new(r.m, r.n)
            .and_then(|ring| ring.residue(r.value))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(m: i64, n: u32) -> AdicRing {
        AdicRing::new(m, n).unwrap()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn from_integer_examples() {
        assert_eq!(ring(2, 4).int(-1).value(), &big(15));
        assert_eq!(ring(7, 3).int(0).value(), &big(0));
        assert_eq!(MadicInt::from_integer(&big(7), 10, 4).unwrap().value(), &big(7));
        assert_eq!(AdicRing::new(1, 3).unwrap_err(), MadicError::BadModulus(big(1)));
        assert_eq!(AdicRing::new(2, 0).unwrap_err(), MadicError::ZeroPrecision);
    }

    #[test]
    fn truncate_examples() {
        let x = ring(2, 4).int(13);
        assert_eq!(x.truncate(2).unwrap().value(), &big(1));
        assert_eq!(x.truncate(2).unwrap().precision(), 2);
        assert_eq!(x.truncate(4).unwrap(), x);
        assert_eq!(
            x.truncate(5).unwrap_err(),
            MadicError::PrecisionExceeded { requested: 5, available: 4 }
        );
    }

    #[test]
    fn arithmetic_examples() {
        let r = ring(10, 4);
        assert_eq!((&r.int(7) + &r.int(8)).value(), &big(15));
        let x = r.int(1234);
        assert!((&x + &(-&x)).is_zero());
        let r = ring(2, 5);
        assert_eq!((&r.int(3) * &r.int(11)).value(), &big(33 % 32));
        assert_eq!(
            r.int(1).try_add(&ring(3, 5).int(1)).unwrap_err(),
            MadicError::ModulusMismatch(big(2), big(3))
        );
        let mixed = &ring(2, 5).int(31) + &ring(2, 3).int(1);
        assert_eq!((mixed.precision(), mixed.value()), (3, &big(0)));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(ring(2, 5).int(12).valuation(), ValuationResult::Exact(2));
        assert_eq!(ring(3, 4).int(0).valuation(), ValuationResult::AtLeast(4));
        assert_eq!(ring(2, 3).int(7).valuation(), ValuationResult::Exact(0));
        // composite modulus: 12 = 6 * 2
        assert_eq!(ring(6, 3).int(12).valuation(), ValuationResult::Exact(1));
    }

    // Exhaustive search for the inverse, independent of extended Euclid.
    fn brute_inverse(v: i64, modulus: i64) -> Option<i64> {
        (0..modulus).find(|w| (v * w).rem_euclid(modulus) == 1)
    }

    #[test]
    fn invert_unit_examples() {
        let w = ring(5, 3).int(2).invert_unit().unwrap();
        assert_eq!(w.value(), &big(brute_inverse(2, 125).unwrap()));
        assert_eq!(w.value(), &big(63));
        assert_eq!(ring(5, 3).int(1).invert_unit().unwrap().value(), &big(1));
        assert!(matches!(ring(2, 4).int(6).invert_unit(), Err(MadicError::NotAUnit(_))));
        assert!(matches!(ring(10, 2).int(15).invert_unit(), Err(MadicError::NotAUnit(_))));
        for v in 0..100 {
            let got = ring(10, 2).int(v).invert_unit().ok().map(|w| w.value().clone());
            assert_eq!(got, brute_inverse(v, 100).map(big));
        }
    }

    #[test]
    fn geometric_series_examples() {
        // partial sums written out by hand
        assert_eq!(ring(2, 5).int(2).geom_inverse_one_minus().unwrap().value(), &big(1 + 2 + 4 + 8 + 16));
        let s = ring(3, 3).int(3).geom_inverse_one_minus().unwrap();
        assert_eq!(s.value(), &big(13));
        assert_eq!(((1 - 3) * 13i64).rem_euclid(27), 1);
        assert_eq!(ring(3, 3).int(0).geom_inverse_one_minus().unwrap().value(), &big(1));
        assert!(matches!(
            ring(3, 3).int(4).geom_inverse_one_minus(),
            Err(MadicError::NotTopologicallyNilpotent(_))
        ));
    }

    #[test]
    fn from_residues_examples() {
        let x = AdicRing::from_residues(2, &[(1, big(1)), (2, big(3)), (3, big(3))]).unwrap();
        assert_eq!((x.precision(), x.value()), (3, &big(3)));
        assert_eq!(
            AdicRing::from_residues(2, &[(1, big(0)), (2, big(1))]).unwrap_err(),
            MadicError::IncoherentSequence(1, 2)
        );
        let x = AdicRing::from_residues(5, &[(4, big(77))]).unwrap();
        assert_eq!(x, ring(5, 4).int(77));
        assert_eq!(AdicRing::from_residues(2, &[]).unwrap_err(), MadicError::EmptySequence);
        assert_eq!(
            AdicRing::from_residues(2, &[(2, big(1)), (2, big(1))]).unwrap_err(),
            MadicError::LevelsNotIncreasing
        );
        assert!(matches!(
            AdicRing::from_residues(2, &[(1, big(2))]),
            Err(MadicError::OutOfRange { .. })
        ));
    }

    #[test]
    fn display_and_json() {
        let x = ring(2, 5).int(31);
        assert_eq!(x.to_string(), "31 mod 2^5");
        let js = serde_json::to_string(&x).unwrap();
        assert_eq!(js, r#"{"m":2,"n":5,"value":"31"}"#);
        assert_eq!(serde_json::from_str::<MadicInt>(&js).unwrap(), x);
        assert!(serde_json::from_str::<MadicInt>(r#"{"m":2,"n":5,"value":"32"}"#).is_err());
    }

    // Multiplicity of p in v by repeated division.
    fn brute_val(mut v: u64, p: u64) -> u32 {
        let mut j = 0;
        while v.is_multiple_of(p) {
            v /= p;
            j += 1;
        }
        j
    }

    #[test]
    fn prime_valuation_is_additive_exhaustively() {
        for p in [2u64, 3] {
            for n in 1..=6u32 {
                let r = ring(p as i64, n);
                let modulus = p.pow(n);
                for a in 1..modulus {
                    for b in 1..modulus {
                        let (va, vb) = (brute_val(a, p), brute_val(b, p));
                        if va + vb < n {
                            let prod = &r.int(a as i64) * &r.int(b as i64);
                            assert_eq!(prod.valuation(), ValuationResult::Exact(va + vb));
                        }
                    }
                }
            }
        }
    }

    fn params() -> impl Strategy<Value = (i64, u32)> {
        prop_oneof![Just((2i64, 6u32)), Just((3, 4)), Just((10, 3)), Just((6, 4))]
    }

    proptest! {
        #[test]
        fn ring_axioms((m, n) in params(), a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
            let r = ring(m, n);
            let (x, y, z) = (r.int(a), r.int(b), r.int(c));
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x * &r.one(), x.clone());
            prop_assert!((&x + &(-&x)).is_zero());
        }

        #[test]
        fn truncation_is_a_homomorphism((m, n) in params(), a in any::<i64>(), b in any::<i64>(), j in 1u32..7, l in 1u32..7) {
            let r = ring(m, n);
            let (j, l) = (j.min(n).min(l.min(n)), j.max(l).min(n));
            let (x, y) = (r.int(a), r.int(b));
            let t = |v: &MadicInt, k| v.truncate(k).unwrap();
            prop_assert_eq!(t(&(&x * &y), j), &t(&x, j) * &t(&y, j));
            prop_assert_eq!(t(&(&x + &y), j), &t(&x, j) + &t(&y, j));
            prop_assert_eq!(t(&t(&x, l), j), t(&x, j));
        }

        #[test]
        fn product_valuation_bound((m, n) in params(), a in any::<i64>(), b in any::<i64>()) {
            let r = ring(m, n);
            let (x, y) = (r.int(a), r.int(b));
            let bound = x.valuation().bound().max(y.valuation().bound()).min(n);
            prop_assert!((&x * &y).valuation().bound() >= bound);
        }

        #[test]
        fn geometric_series_matches_unit_inverse((m, n) in params(), a in any::<i64>()) {
            let r = ring(m, n);
            let x = r.int(a).scale(&big(m));
            let s = x.geom_inverse_one_minus().unwrap();
            let one_minus = &r.one() - &x;
            prop_assert_eq!(&one_minus * &s, r.one());
            prop_assert_eq!(one_minus.invert_unit().unwrap(), s);
        }

        #[test]
        fn embedding_is_coherent((m, n) in params(), a in any::<i64>()) {
            let r = ring(m, n);
            let rs: Vec<(u32, BigInt)> = (1..=n).map(|j| (j, big(a).mod_floor(r.power(j)))).collect();
            prop_assert_eq!(AdicRing::from_residues(m, &rs).unwrap(), r.int(a));
        }
    }
}
