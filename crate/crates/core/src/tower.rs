//! Chains of subgroups of `Z`, valuations along them and the ultrametrics
//! obtained from a radius profile.
//!
//! A chain `A_0 = Z ⊇ A_1 ⊇ A_2 ⊇ …` is described by its generators
//! `A_j = g_j Z` with `g_0 = 1` and `g_j | g_{j+1}`. The valuation of `x` is
//! the largest `j` with `x ∈ A_j` and the distance between `x` and `y` is
//! `r_{j(x - y)}`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratio::serde_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("ideal_power chain needs m >= 2, got {0}")]
    BadModulus(BigInt),
    #[error("explicit chain must start at 1 and each generator must divide the next (failed at index {0})")]
    NotDecreasing(usize),
    #[error("explicit chain must end with a strict step so the generators are unbounded")]
    Bounded,
    #[error("geometric radius base must lie strictly between 0 and 1")]
    BadBase,
    #[error("explicit radius profile must be positive and non-increasing (failed at index {0})")]
    NotMonotone(usize),
    #[error("explicit radius profile must end with a strict decrease so that it tends to 0")]
    NoDecay,
    #[error("residue lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("residue at position {0} is not reduced modulo its generator")]
    NotReduced(usize),
}

/// Valuation along a chain of subgroups of `Z`; `Infinite` only for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(j) => Some(j),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Equal,
            (Valuation::Infinite, _) => Greater,
            (_, Valuation::Infinite) => Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(j) => write!(f, "{j}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(j) => s.serialize_u32(*j),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Decreasing chain of subgroups of `Z`, given by generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainSpec {
    /// `A_j = m^j Z`.
    IdealPower {
        #[serde(with = "crate::ratio::serde_bigint_compact")]
        m: BigInt,
    },
    /// `A_j = g_j Z` for the listed `g_0 = 1 | g_1 | …`; past the end the
    /// chain keeps multiplying by the last ratio `g_L / g_{L-1}`.
    Explicit {
        #[serde(with = "serde_bigint_vec")]
        generators: Vec<BigInt>,
    },
}

mod serde_bigint_vec {
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

impl ChainSpec {
    pub fn ideal_power(m: i64) -> Self {
        ChainSpec::IdealPower { m: BigInt::from(m) }
    }

    pub fn explicit<I: IntoIterator<Item = i64>>(gens: I) -> Self {
        ChainSpec::Explicit {
            generators: gens.into_iter().map(BigInt::from).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), TowerError> {
        match self {
            ChainSpec::IdealPower { m } => {
                if *m < BigInt::from(2) {
                    return Err(TowerError::BadModulus(m.clone()));
                }
            }
            ChainSpec::Explicit { generators } => {
                if generators.first().is_none_or(|g| !g.is_one()) {
                    return Err(TowerError::NotDecreasing(0));
                }
                for (i, w) in generators.windows(2).enumerate() {
                    if !w[1].is_positive() || !w[1].is_multiple_of(&w[0]) {
                        return Err(TowerError::NotDecreasing(i + 1));
                    }
                }
                let n = generators.len();
                if n < 2 || generators[n - 1] == generators[n - 2] {
                    return Err(TowerError::Bounded);
                }
            }
        }
        Ok(())
    }

    /// The generator `g_j` of `A_j`.
    pub fn generator(&self, j: u32) -> BigInt {
        match self {
            ChainSpec::IdealPower { m } => m.pow(j),
            ChainSpec::Explicit { generators } => {
                let j = j as usize;
                if j < generators.len() {
                    return generators[j].clone();
                }
                let n = generators.len();
                let last = &generators[n - 1];
                let step = last / &generators[n - 2];
                last * step.pow((j - n + 1) as u32)
            }
        }
    }

    /// Whether `A_j ⊇ other_l`, i.e. `g_j | g'_l`.
    pub fn contains(&self, j: u32, other: &ChainSpec, l: u32) -> bool {
        other.generator(l).is_multiple_of(&self.generator(j))
    }
}

/// Non-increasing radii `r_0 ≥ r_1 ≥ … → 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusProfile {
    /// `r_j = base^j`.
    Geometric {
        #[serde(with = "serde_rational")]
        base: BigRational,
    },
    /// The listed radii, then continued geometrically with the ratio of the
    /// last two entries.
    Explicit {
        #[serde(with = "serde_rational_vec")]
        radii: Vec<BigRational>,
    },
}

mod serde_rational_vec {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::ratio::{format_rational, parse_rational};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl Default for RadiusProfile {
    fn default() -> Self {
        RadiusProfile::geometric(1, 2)
    }
}

impl RadiusProfile {
    pub fn geometric(p: i64, q: i64) -> Self {
        RadiusProfile::Geometric {
            base: BigRational::new(p.into(), q.into()),
        }
    }

    pub fn validate(&self) -> Result<(), TowerError> {
        match self {
            RadiusProfile::Geometric { base } => {
                if !base.is_positive() || *base >= BigRational::one() {
                    return Err(TowerError::BadBase);
                }
            }
            RadiusProfile::Explicit { radii } => {
                for (i, r) in radii.iter().enumerate() {
                    if !r.is_positive() || (i > 0 && *r > radii[i - 1]) {
                        return Err(TowerError::NotMonotone(i));
                    }
                }
                let n = radii.len();
                if n < 2 || radii[n - 1] == radii[n - 2] {
                    return Err(TowerError::NoDecay);
                }
            }
        }
        Ok(())
    }

    pub fn radius(&self, j: u32) -> BigRational {
        match self {
            RadiusProfile::Geometric { base } => base.pow(j as i32),
            RadiusProfile::Explicit { radii } => {
                let j = j as usize;
                if j < radii.len() {
                    return radii[j].clone();
                }
                let n = radii.len();
                let ratio = &radii[n - 1] / &radii[n - 2];
                &radii[n - 1] * ratio.pow((j - n + 1) as i32)
            }
        }
    }

    /// `ρ` at a valuation, with `ρ(0) = 0`.
    pub fn radius_at(&self, v: Valuation) -> BigRational {
        match v {
            Valuation::Finite(j) => self.radius(j),
            Valuation::Infinite => BigRational::zero(),
        }
    }
}

/// Chain and profile together, in the JSON shape used by the CLI and config
/// files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerConfig {
    pub chain: ChainSpec,
    #[serde(default)]
    pub profile: RadiusProfile,
}

impl TowerConfig {
    pub fn validate(&self) -> Result<(), TowerError> {
        self.chain.validate()?;
        self.profile.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UltraDistance {
    pub valuation: Valuation,
    #[serde(with = "serde_rational")]
    pub radius: BigRational,
}

/// Largest `j` with `x ∈ A_j`.
pub fn valuation(x: &BigInt, chain: &ChainSpec) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    if let ChainSpec::IdealPower { m } = chain {
        let mut j = 0;
        let mut rest = x.clone();
        loop {
            let (q, r) = rest.div_rem(m);
            if !r.is_zero() {
                return Valuation::Finite(j);
            }
            rest = q;
            j += 1;
        }
    }
    let mut j = 0;
    while x.is_multiple_of(&chain.generator(j + 1)) {
        j += 1;
    }
    Valuation::Finite(j)
}

pub fn distance(x: &BigInt, y: &BigInt, chain: &ChainSpec, profile: &RadiusProfile) -> UltraDistance {
    let v = valuation(&(x - y), chain);
    UltraDistance {
        valuation: v,
        radius: profile.radius_at(v),
    }
}

/// Outcome of comparing two finite sequences position by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Disagreement {
    /// Agreement at positions `1..=j`, disagreement at `j + 1`.
    At(u32),
    /// The sequences agree at every one of their `L` positions.
    AgreeThrough(u32),
}

impl Disagreement {
    pub fn index(self) -> u32 {
        match self {
            Disagreement::At(j) | Disagreement::AgreeThrough(j) => j,
        }
    }
}

/// The index `j(x, y)` on a product of quotients, for any comparable
/// coordinates (position `k` of the slices is the `(k+1)`-th quotient).
pub fn first_disagreement<T: PartialEq>(a: &[T], b: &[T]) -> Result<Disagreement, TowerError> {
    if a.len() != b.len() {
        return Err(TowerError::LengthMismatch(a.len(), b.len()));
    }
    Ok(match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(k) => Disagreement::At(k as u32),
        None => Disagreement::AgreeThrough(a.len() as u32),
    })
}

/// [`first_disagreement`] for residue lists `a_j ∈ Z / A_j`, `j = 1..=L`,
/// checking that each residue is reduced.
pub fn product_disagreement(
    a: &[BigInt],
    b: &[BigInt],
    chain: &ChainSpec,
) -> Result<Disagreement, TowerError> {
    if a.len() != b.len() {
        return Err(TowerError::LengthMismatch(a.len(), b.len()));
    }
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        let g = chain.generator(k as u32 + 1);
        if x.is_negative() || y.is_negative() || *x >= g || *y >= g {
            return Err(TowerError::NotReduced(k + 1));
        }
    }
    first_disagreement(a, b)
}

/// Which containment failed in a bounded equivalence search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceSide {
    /// No `l ≤ depth` with `B_l ⊆ A_j`.
    SecondInFirst,
    /// No `n ≤ depth` with `A_n ⊆ B_k`.
    FirstInSecond,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EquivalenceReport {
    /// `l_of_j[j-1]` is the least `l` with `B_l ⊆ A_j`, `n_of_k[k-1]` the
    /// least `n` with `A_n ⊆ B_k`.
    Equivalent { depth: u32, l_of_j: Vec<u32>, n_of_k: Vec<u32> },
    NotEquivalentUpToDepth { depth: u32, side: EquivalenceSide, index: u32 },
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceReport::Equivalent { .. })
    }
}

/// Bounded search for the witnesses of topological equivalence: every index
/// `j <= depth` on either side needs a witness `l <= depth` on the other. A
/// negative answer only means that no witness exists within the bound.
pub fn check_chain_equivalence(a: &ChainSpec, b: &ChainSpec, depth: u32) -> EquivalenceReport {
    check_chain_equivalence_bounded(a, b, depth, depth)
}

/// As [`check_chain_equivalence`], with witnesses searched up to `search`
/// instead of `depth`.
pub fn check_chain_equivalence_bounded(
    a: &ChainSpec,
    b: &ChainSpec,
    depth: u32,
    search: u32,
) -> EquivalenceReport {
    let witness = |outer: &ChainSpec, inner: &ChainSpec, j: u32| {
        (0..=search).find(|&l| outer.contains(j, inner, l))
    };
    let mut l_of_j = Vec::with_capacity(depth as usize);
    for j in 1..=depth {
        match witness(a, b, j) {
            Some(l) => l_of_j.push(l),
            None => {
                return EquivalenceReport::NotEquivalentUpToDepth {
                    depth,
                    side: EquivalenceSide::SecondInFirst,
                    index: j,
                }
            }
        }
    }
    let mut n_of_k = Vec::with_capacity(depth as usize);
    for k in 1..=depth {
        match witness(b, a, k) {
            Some(n) => n_of_k.push(n),
            None => {
                return EquivalenceReport::NotEquivalentUpToDepth {
                    depth,
                    side: EquivalenceSide::FirstInSecond,
                    index: k,
                }
            }
        }
    }
    EquivalenceReport::Equivalent { depth, l_of_j, n_of_k }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    // Trial division, independent of the chain machinery.
    fn trial_valuation(mut x: i64, m: i64) -> Option<u32> {
        if x == 0 {
            return None;
        }
        let mut j = 0;
        while x % m == 0 {
            x /= m;
            j += 1;
        }
        Some(j)
    }

    #[test]
    fn valuation_examples() {
        let two = ChainSpec::ideal_power(2);
        assert_eq!(valuation(&big(12), &two), Valuation::Finite(trial_valuation(12, 2).unwrap()));
        assert_eq!(valuation(&big(12), &two), Valuation::Finite(2));
        assert_eq!(valuation(&big(0), &two), Valuation::Infinite);
        assert_eq!(valuation(&big(0), &ChainSpec::explicit([1, 3, 9])), Valuation::Infinite);
        assert_eq!(valuation(&big(5), &ChainSpec::ideal_power(3)), Valuation::Finite(0));
    }

    #[test]
    fn distance_examples() {
        let two = ChainSpec::ideal_power(2);
        let half = RadiusProfile::default();
        let d = distance(&big(5), &big(13), &two, &half);
        assert_eq!(d.valuation, Valuation::Finite(3));
        assert_eq!(d.radius, rat(1, 8));
        let d = distance(&big(7), &big(7), &two, &half);
        assert_eq!(d, UltraDistance { valuation: Valuation::Infinite, radius: rat(0, 1) });
        let d = distance(&big(0), &big(1), &two, &half);
        assert_eq!((d.valuation, d.radius), (Valuation::Finite(0), rat(1, 1)));
    }

    #[test]
    fn explicit_chain_and_profile() {
        let c = ChainSpec::explicit([1, 2, 2, 12]);
        c.validate().unwrap();
        assert_eq!(c.generator(4), big(72));
        assert_eq!(valuation(&big(24), &c), Valuation::Finite(3));
        assert_eq!(valuation(&big(2), &c), Valuation::Finite(2));
        assert_eq!(valuation(&big(144), &c), Valuation::Finite(4));
        assert_eq!(ChainSpec::explicit([1, 3, 4]).validate(), Err(TowerError::NotDecreasing(2)));
        assert_eq!(ChainSpec::explicit([2, 4]).validate(), Err(TowerError::NotDecreasing(0)));
        assert_eq!(ChainSpec::explicit([1, 2, 2]).validate(), Err(TowerError::Bounded));
        assert_eq!(ChainSpec::ideal_power(1).validate(), Err(TowerError::BadModulus(big(1))));

        let p = RadiusProfile::Explicit { radii: vec![rat(1, 1), rat(1, 1), rat(1, 3)] };
        p.validate().unwrap();
        assert_eq!(p.radius(4), rat(1, 27));
        let bad = RadiusProfile::Explicit { radii: vec![rat(1, 2), rat(1, 1)] };
        assert_eq!(bad.validate(), Err(TowerError::NotMonotone(1)));
        let flat = RadiusProfile::Explicit { radii: vec![rat(1, 2), rat(1, 2)] };
        assert_eq!(flat.validate(), Err(TowerError::NoDecay));
        assert_eq!(RadiusProfile::geometric(1, 1).validate(), Err(TowerError::BadBase));
    }

    #[test]
    fn product_disagreement_examples() {
        let two = ChainSpec::ideal_power(2);
        let v = |xs: &[i64]| xs.iter().map(|&x| big(x)).collect::<Vec<_>>();
        assert_eq!(
            product_disagreement(&v(&[1, 3, 5]), &v(&[1, 3, 7]), &two),
            Ok(Disagreement::At(2))
        );
        assert_eq!(
            product_disagreement(&v(&[1, 3, 5]), &v(&[1, 3, 5]), &two),
            Ok(Disagreement::AgreeThrough(3))
        );
        assert_eq!(product_disagreement(&v(&[0, 2]), &v(&[1, 1]), &two), Ok(Disagreement::At(0)));
        assert_eq!(
            product_disagreement(&v(&[0]), &v(&[0, 0]), &two),
            Err(TowerError::LengthMismatch(1, 2))
        );
        assert_eq!(
            product_disagreement(&v(&[0, 4]), &v(&[0, 0]), &two),
            Err(TowerError::NotReduced(2))
        );
    }

    // Containment of m^l Z in k^j Z decided by brute-force divisibility.
    fn brute_contains(k: i64, j: u32, m: i64, l: u32) -> bool {
        (m as i128).pow(l) % (k as i128).pow(j) == 0
    }

    #[test]
    fn equivalence_examples() {
        let two = ChainSpec::ideal_power(2);
        let four = ChainSpec::ideal_power(4);
        // 2^n Z ⊆ 4^k Z needs n = 2k, so k = 4 has no witness n <= 6
        assert_eq!(
            check_chain_equivalence(&two, &four, 6),
            EquivalenceReport::NotEquivalentUpToDepth {
                depth: 6,
                side: EquivalenceSide::FirstInSecond,
                index: 4
            }
        );
        match check_chain_equivalence_bounded(&two, &four, 6, 12) {
            EquivalenceReport::Equivalent { l_of_j, n_of_k, .. } => {
                for j in 1..=6u32 {
                    let expect = (0..=12).find(|&l| brute_contains(2, j, 4, l)).unwrap();
                    assert_eq!(l_of_j[j as usize - 1], expect);
                    assert_eq!(expect, j.div_ceil(2));
                    let expect = (0..=12).find(|&n| brute_contains(4, j, 2, n)).unwrap();
                    assert_eq!(n_of_k[j as usize - 1], expect);
                    assert_eq!(expect, 2 * j);
                }
            }
            other => panic!("expected equivalence, got {other:?}"),
        }

        let r = check_chain_equivalence(&two, &two, 3);
        assert_eq!(
            r,
            EquivalenceReport::Equivalent { depth: 3, l_of_j: vec![1, 2, 3], n_of_k: vec![1, 2, 3] }
        );

        let six = ChainSpec::ideal_power(6);
        assert_eq!(
            check_chain_equivalence(&two, &six, 8),
            EquivalenceReport::NotEquivalentUpToDepth {
                depth: 8,
                side: EquivalenceSide::FirstInSecond,
                index: 1
            }
        );
    }

    #[test]
    fn json_shape() {
        let cfg: TowerConfig = serde_json::from_str(
            r#"{"chain": {"kind": "ideal_power", "m": 2}, "profile": {"kind": "geometric", "base": "1/2"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.chain, ChainSpec::ideal_power(2));
        assert_eq!(cfg.profile, RadiusProfile::geometric(1, 2));
        let out = serde_json::to_string(&cfg).unwrap();
        assert_eq!(
            out,
            r#"{"chain":{"kind":"ideal_power","m":2},"profile":{"kind":"geometric","base":"1/2"}}"#
        );
        let back: TowerConfig = serde_json::from_str(&out).unwrap();
        assert_eq!(back, cfg);
    }

    proptest! {
        #[test]
        fn valuation_matches_trial_division(x in -100_000i64..100_000, m in 2i64..12) {
            let v = valuation(&big(x), &ChainSpec::ideal_power(m));
            prop_assert_eq!(v.finite(), trial_valuation(x, m));
        }

        #[test]
        fn valuation_is_non_archimedean(x in -10_000i64..10_000, y in -10_000i64..10_000, m in 2i64..7) {
            let c = ChainSpec::ideal_power(m);
            let (vx, vy) = (valuation(&big(x), &c), valuation(&big(y), &c));
            prop_assert!(valuation(&big(x + y), &c) >= vx.min(vy));
            prop_assert_eq!(valuation(&big(-x), &c), vx);
        }

        #[test]
        fn ultrametric_and_translation(x in any::<i32>(), y in any::<i32>(), z in any::<i32>(), m in 2i64..11) {
            let c = ChainSpec::ideal_power(m);
            let p = RadiusProfile::default();
            let (x, y, z) = (big(x.into()), big(y.into()), big(z.into()));
            let dxz = distance(&x, &z, &c, &p).radius;
            let dxy = distance(&x, &y, &c, &p).radius;
            let dyz = distance(&y, &z, &c, &p).radius;
            prop_assert!(dxz <= dxy.clone().max(dyz));
            prop_assert_eq!(distance(&(&x - &z), &(&y - &z), &c, &p), distance(&x, &y, &c, &p));
            prop_assert_eq!(distance(&y, &x, &c, &p).radius, dxy);
        }

        #[test]
        fn disagreement_is_ultrametric(
            a in proptest::collection::vec(0u8..2, 6),
            b in proptest::collection::vec(0u8..2, 6),
            c in proptest::collection::vec(0u8..2, 6),
        ) {
            let j = |p: &[u8], q: &[u8]| first_disagreement(p, q).unwrap().index();
            prop_assert!(j(&a, &c) >= j(&a, &b).min(j(&b, &c)));
        }

        #[test]
        fn chain_equivalent_to_itself(m in 2i64..20, depth in 0u32..8) {
            let c = ChainSpec::ideal_power(m);
            let ident: Vec<u32> = (1..=depth).collect();
            prop_assert_eq!(
                check_chain_equivalence(&c, &c, depth),
                EquivalenceReport::Equivalent { depth, l_of_j: ident.clone(), n_of_k: ident }
            );
        }
    }
}
