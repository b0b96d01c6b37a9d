//! The invariant integral on `G` for cylinder functions.
//!
//! A cylinder function of level `l` is a table over the left cosets of
//! `family_l`. Its integral is the exact average `I(f, A_n)` over any set
//! `A_n` of representatives of `G / family_n` with `n >= l`; this average
//! does not depend on `n` or on the representatives, so no limit is taken.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heisenberg::{ChainFamily, DigitBox, HPoint, HeisenbergContext, HeisenbergError};
use crate::ratio::serde_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HaarError {
    #[error("table has {got} entries, the quotient has {expected} cosets")]
    TableSize { expected: usize, got: usize },
    #[error("level {n} is below the function level {level}")]
    LevelBelowFunction { level: u32, n: u32 },
    #[error("representative {0} is not canonical")]
    NonCanonicalRep(usize),
    #[error("representatives do not hit every coset exactly once")]
    InvalidRepresentatives,
    #[error("averages at levels {0} and {1} differ")]
    LevelDependence(u32, u32),
    #[error(transparent)]
    Heisenberg(#[from] HeisenbergError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Canonical representatives of `G / family_n` in lexicographic digit order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetReps {
    pub family: ChainFamily,
    pub level: u32,
    pub reps: Vec<HPoint>,
}

impl CosetReps {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

fn coset_box(ctx: &HeisenbergContext, family: ChainFamily, n: u32) -> Result<DigitBox, HaarError> {
    Ok(ctx.coset_box(family, n)?)
}

pub fn enumerate_cosets(ctx: &HeisenbergContext, family: ChainFamily, n: u32) -> Result<CosetReps, HaarError> {
    let bx = coset_box(ctx, family, n)?;
    let reps = ctx.exec().map(0..bx.count(), |i| bx.point(ctx.ring(), i));
    Ok(CosetReps { family, level: n, reps })
}

/// `|G / family_n|`.
pub fn index(ctx: &HeisenbergContext, family: ChainFamily, n: u32) -> Result<usize, HaarError> {
    Ok(coset_box(ctx, family, n)?.count())
}

/// A function on `G / family_l`, stored in canonical coset order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderFunction {
    level: u32,
    family: ChainFamily,
    table: Vec<BigRational>,
}

impl CylinderFunction {
    pub fn new(
        ctx: &HeisenbergContext,
        family: ChainFamily,
        level: u32,
        table: Vec<BigRational>,
    ) -> Result<Self, HaarError> {
        let expected = index(ctx, family, level)?;
        if table.len() != expected {
            return Err(HaarError::TableSize { expected, got: table.len() });
        }
        Ok(CylinderFunction { level, family, table })
    }

    pub fn from_fn(
        ctx: &HeisenbergContext,
        family: ChainFamily,
        level: u32,
        f: impl Fn(&HPoint) -> BigRational + Sync + Send,
    ) -> Result<Self, HaarError> {
        let bx = coset_box(ctx, family, level)?;
        let table = ctx.exec().map(0..bx.count(), |i| f(&bx.point(ctx.ring(), i)));
        Ok(CylinderFunction { level, family, table })
    }

    pub fn constant(ctx: &HeisenbergContext, family: ChainFamily, level: u32, value: BigRational) -> Result<Self, HaarError> {
        let n = index(ctx, family, level)?;
        Ok(CylinderFunction { level, family, table: vec![value; n] })
    }

    /// Indicator of the coset of `g`.
    pub fn indicator(ctx: &HeisenbergContext, family: ChainFamily, level: u32, g: &HPoint) -> Result<Self, HaarError> {
        let bx = coset_box(ctx, family, level)?;
        let at = ctx.coset_index(g, family, level, &bx)?;
        let mut table = vec![BigRational::zero(); bx.count()];
        table[at] = BigRational::one();
        Ok(CylinderFunction { level, family, table })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn family(&self) -> ChainFamily {
        self.family
    }

    pub fn table(&self) -> &[BigRational] {
        &self.table
    }

    /// `f(g)`, looked up through the coset of `g`.
    pub fn eval(&self, ctx: &HeisenbergContext, g: &HPoint) -> Result<BigRational, HaarError> {
        let bx = coset_box(ctx, self.family, self.level)?;
        self.eval_in(ctx, g, &bx)
    }

    fn eval_in(&self, ctx: &HeisenbergContext, g: &HPoint, bx: &DigitBox) -> Result<BigRational, HaarError> {
        Ok(self.table[ctx.coset_index(g, self.family, self.level, bx)?].clone())
    }

    /// Pointwise sum; both functions are lifted to the deeper level first.
    pub fn add(&self, ctx: &HeisenbergContext, other: &CylinderFunction) -> Result<Self, HaarError> {
        if self.family != other.family {
            return Err(HaarError::InvalidRepresentatives);
        }
        let level = self.level.max(other.level);
        let a = pushforward_table(ctx, self, level)?;
        let b = pushforward_table(ctx, other, level)?;
        let table = a.table.iter().zip(&b.table).map(|(x, y)| x + y).collect();
        Ok(CylinderFunction { level, family: self.family, table })
    }

    pub fn to_doc(&self, ctx: &HeisenbergContext) -> Result<CylinderDoc, HaarError> {
        let bx = coset_box(ctx, self.family, self.level)?;
        let entries = self
            .table
            .iter()
            .enumerate()
            .map(|(i, v)| CylinderEntry { rep: bx.point(ctx.ring(), i), value: v.clone() })
            .collect();
        Ok(CylinderDoc { level: self.level, family: self.family, entries })
    }

    /// Entries may come in any order but must list every canonical
    /// representative exactly once.
    pub fn from_doc(ctx: &HeisenbergContext, doc: &CylinderDoc) -> Result<Self, HaarError> {
        let bx = coset_box(ctx, doc.family, doc.level)?;
        if doc.entries.len() != bx.count() {
            return Err(HaarError::TableSize { expected: bx.count(), got: doc.entries.len() });
        }
        let mut table: Vec<Option<BigRational>> = vec![None; bx.count()];
        for (k, e) in doc.entries.iter().enumerate() {
            if ctx.coset_rep(&e.rep, doc.family, doc.level)? != e.rep {
                return Err(HaarError::NonCanonicalRep(k));
            }
            let i = ctx.coset_index(&e.rep, doc.family, doc.level, &bx)?;
            if table[i].replace(e.value.clone()).is_some() {
                return Err(HaarError::InvalidRepresentatives);
            }
        }
        let table = table.into_iter().collect::<Option<Vec<_>>>().ok_or(HaarError::InvalidRepresentatives)?;
        Ok(CylinderFunction { level: doc.level, family: doc.family, table })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderEntry {
    pub rep: HPoint,
    #[serde(with = "serde_rational")]
    pub value: BigRational,
}

/// JSON form of a [`CylinderFunction`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderDoc {
    pub level: u32,
    pub family: ChainFamily,
    pub entries: Vec<CylinderEntry>,
}

fn average(ctx: &HeisenbergContext, values: impl Fn(usize) -> Result<BigRational, HaarError> + Sync + Send, count: usize) -> Result<BigRational, HaarError> {
    let sum = ctx.exec().reduce(
        0..count,
        Ok(BigRational::zero()),
        values,
        |a, b| Ok(a? + b?),
    )?;
    Ok(sum / BigRational::from_integer(BigInt::from(count)))
}

/// `I(f, A_n)` over the canonical representatives of level `n >= f.level`.
pub fn integrate(ctx: &HeisenbergContext, f: &CylinderFunction, n: u32) -> Result<BigRational, HaarError> {
    if n < f.level {
        return Err(HaarError::LevelBelowFunction { level: f.level, n });
    }
    let reps = coset_box(ctx, f.family, n)?;
    let own = coset_box(ctx, f.family, f.level)?;
    average(ctx, |i| f.eval_in(ctx, &reps.point(ctx.ring(), i), &own), reps.count())
}

/// `I(f, A)` for a caller-supplied representative set of level `n`.
pub fn integrate_over(ctx: &HeisenbergContext, f: &CylinderFunction, n: u32, reps: &[HPoint]) -> Result<BigRational, HaarError> {
    if n < f.level {
        return Err(HaarError::LevelBelowFunction { level: f.level, n });
    }
    let bx = coset_box(ctx, f.family, n)?;
    if reps.len() != bx.count() {
        return Err(HaarError::InvalidRepresentatives);
    }
    let mut seen = vec![false; bx.count()];
    for r in reps {
        let i = ctx.coset_index(r, f.family, n, &bx)?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(HaarError::InvalidRepresentatives);
        }
    }
    let own = coset_box(ctx, f.family, f.level)?;
    average(ctx, |i| f.eval_in(ctx, &reps[i], &own), reps.len())
}

/// `I(f)`: the average at the function's own level, cross-checked against
/// the next level whenever the precision allows it.
pub fn integral(ctx: &HeisenbergContext, f: &CylinderFunction) -> Result<BigRational, HaarError> {
    let at_level = integrate(ctx, f, f.level)?;
    let next = f.level + 1;
    if f.family.central_level(next) <= ctx.precision()
        && index(ctx, f.family, next).is_ok()
        && integrate(ctx, f, next)? != at_level
    {
        return Err(HaarError::LevelDependence(f.level, next));
    }
    Ok(at_level)
}

/// `g ↦ f(a ◇ g)` or `g ↦ f(g ◇ a)`. Right translates of a `G`-family
/// function of level `l` are tabulated at level `2l`, where they are
/// well defined because `G_{2l} ⊆ H_{2l} = a^{-1} H_{2l} a ⊆ G_l`.
pub fn translate(ctx: &HeisenbergContext, f: &CylinderFunction, a: &HPoint, side: Side) -> Result<CylinderFunction, HaarError> {
    ctx.check(a)?;
    let level = match (side, f.family) {
        (Side::Right, ChainFamily::G) => 2 * f.level,
        _ => f.level,
    };
    let out = coset_box(ctx, f.family, level)?;
    let own = coset_box(ctx, f.family, f.level)?;
    let table = ctx
        .exec()
        .map(0..out.count(), |i| {
            let g = out.point(ctx.ring(), i);
            let moved = match side {
                Side::Left => ctx.mul(a, &g)?,
                Side::Right => ctx.mul(&g, a)?,
            };
            f.eval_in(ctx, &moved, &own)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CylinderFunction { level, family: f.family, table })
}

/// The same function tabulated on the finer quotient `G / family_n`.
pub fn pushforward_table(ctx: &HeisenbergContext, f: &CylinderFunction, n: u32) -> Result<CylinderFunction, HaarError> {
    if n < f.level {
        return Err(HaarError::LevelBelowFunction { level: f.level, n });
    }
    if n == f.level {
        return Ok(f.clone());
    }
    let out = coset_box(ctx, f.family, n)?;
    let own = coset_box(ctx, f.family, f.level)?;
    let table = ctx
        .exec()
        .map(0..out.count(), |i| f.eval_in(ctx, &out.point(ctx.ring(), i), &own))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CylinderFunction { level: n, family: f.family, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hmodule::BilinearForm;
    use crate::Exec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(m: i64, b: Vec<Vec<i64>>, n: u32) -> HeisenbergContext {
        HeisenbergContext::new(m, BilinearForm::new(b).unwrap(), n).unwrap()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn random_table(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigRational> {
        (0..len).map(|_| rat(rng.gen_range(-20..20), rng.gen_range(1..7))).collect()
    }

    #[test]
    fn enumeration_counts() {
        let c = ctx(2, vec![vec![1]], 6);
        let reps = enumerate_cosets(&c, ChainFamily::G, 1).unwrap();
        assert_eq!(reps.len(), 2 * 4);
        assert_eq!(enumerate_cosets(&c, ChainFamily::G, 0).unwrap().reps, vec![c.identity()]);
        let c3 = ctx(3, vec![vec![0, 1], vec![0, 0]], 4);
        assert_eq!(enumerate_cosets(&c3, ChainFamily::H, 1).unwrap().len(), 9 * 3);
        assert!(matches!(
            enumerate_cosets(&c3, ChainFamily::G, 3),
            Err(HaarError::Heisenberg(HeisenbergError::PrecisionExceeded { .. }))
        ));
        // lexicographic order with s least significant
        assert_eq!(reps.reps[1], c.point(&[0], 1).unwrap());
        assert_eq!(reps.reps[4], c.point(&[1], 0).unwrap());
    }

    #[test]
    fn integral_examples() {
        let c = ctx(2, vec![vec![1]], 6);
        let one = CylinderFunction::constant(&c, ChainFamily::G, 1, rat(1, 1)).unwrap();
        assert_eq!(integral(&c, &one).unwrap(), rat(1, 1));
        let ind = CylinderFunction::indicator(&c, ChainFamily::G, 1, &c.identity()).unwrap();
        assert_eq!(integral(&c, &ind).unwrap(), rat(1, 8));
        assert_eq!(integrate(&c, &ind, 2).unwrap(), rat(1, 8));
        assert_eq!(integrate(&c, &ind, 0).unwrap_err(), HaarError::LevelBelowFunction { level: 1, n: 0 });

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = CylinderFunction::new(&c, ChainFamily::G, 1, random_table(&mut rng, 8)).unwrap();
        let g = CylinderFunction::new(&c, ChainFamily::G, 1, random_table(&mut rng, 8)).unwrap();
        let fg = f.add(&c, &g).unwrap();
        assert_eq!(integral(&c, &fg).unwrap(), integral(&c, &f).unwrap() + integral(&c, &g).unwrap());
        assert_eq!(
            CylinderFunction::new(&c, ChainFamily::G, 1, vec![rat(1, 1); 4]).unwrap_err(),
            HaarError::TableSize { expected: 8, got: 4 }
        );
    }

    #[test]
    fn translation_invariance_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = ctx(2, vec![vec![1]], 6);
        for fam in [ChainFamily::G, ChainFamily::H] {
            let len = index(&c, fam, 1).unwrap();
            let f = CylinderFunction::new(&c, fam, 1, random_table(&mut rng, len)).unwrap();
            let base = integral(&c, &f).unwrap();
            assert_eq!(translate(&c, &f, &c.identity(), Side::Left).unwrap(), f);
            for a in enumerate_cosets(&c, ChainFamily::G, 2).unwrap().reps {
                assert_eq!(integral(&c, &translate(&c, &f, &a, Side::Left).unwrap()).unwrap(), base);
                let right = translate(&c, &f, &a, Side::Right).unwrap();
                assert_eq!(integral(&c, &right).unwrap(), base);
            }
        }
    }

    #[test]
    fn right_translate_is_well_defined_at_double_level() {
        let c = ctx(2, vec![vec![0, 1], vec![0, 0]], 6);
        let f = CylinderFunction::from_fn(&c, ChainFamily::G, 1, |p| BigRational::from_integer(p.s().value().clone())).unwrap();
        let a = c.point(&[1, 1], 3).unwrap();
        let r = translate(&c, &f, &a, Side::Right).unwrap();
        assert_eq!(r.level(), 2);
        // any point of a level-2 coset gives the same value of f(g ◇ a)
        for g in enumerate_cosets(&c, ChainFamily::G, 2).unwrap().reps.iter().step_by(37) {
            for k in [c.point(&[4, 0], 0).unwrap(), c.point(&[0, 4], 16).unwrap(), c.point(&[4, 4], 32).unwrap()] {
                let gk = c.mul(g, &k).unwrap();
                assert_eq!(
                    f.eval(&c, &c.mul(&gk, &a).unwrap()).unwrap(),
                    r.eval(&c, g).unwrap()
                );
            }
        }
    }

    #[test]
    fn pushforward_preserves_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = ctx(2, vec![vec![1]], 6);
        let f = CylinderFunction::new(&c, ChainFamily::G, 1, random_table(&mut rng, 8)).unwrap();
        let lifted = pushforward_table(&c, &f, 2).unwrap();
        assert_eq!(lifted.table().len(), 8 * 2usize.pow(3));
        assert_eq!(integral(&c, &lifted).unwrap(), integral(&c, &f).unwrap());
        let one = CylinderFunction::constant(&c, ChainFamily::G, 1, rat(1, 1)).unwrap();
        assert!(pushforward_table(&c, &one, 2).unwrap().table().iter().all(|v| *v == rat(1, 1)));
    }

    #[test]
    fn representative_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = ctx(3, vec![vec![0, 1], vec![-1, 0]], 4);
        let f = CylinderFunction::new(&c, ChainFamily::H, 1, random_table(&mut rng, 27)).unwrap();
        let reps = enumerate_cosets(&c, ChainFamily::H, 2).unwrap().reps;
        let k = c.point(&[9, 18], 9).unwrap();
        let moved: Vec<HPoint> = reps.iter().map(|r| c.mul(r, &k).unwrap()).collect();
        assert_eq!(integrate_over(&c, &f, 2, &moved).unwrap(), integrate(&c, &f, 2).unwrap());
        let mut dup = moved.clone();
        dup[1] = dup[0].clone();
        assert_eq!(integrate_over(&c, &f, 2, &dup).unwrap_err(), HaarError::InvalidRepresentatives);
    }

    #[test]
    fn doc_roundtrip_and_validation() {
        let c = ctx(2, vec![vec![1]], 4);
        let f = CylinderFunction::from_fn(&c, ChainFamily::G, 1, |p| BigRational::from_integer(p.s().value() + 1)).unwrap();
        let mut doc = f.to_doc(&c).unwrap();
        doc.entries.reverse();
        let js = serde_json::to_string(&doc).unwrap();
        let back: CylinderDoc = serde_json::from_str(&js).unwrap();
        assert_eq!(CylinderFunction::from_doc(&c, &back).unwrap(), f);
        doc.entries[0].rep = c.point(&[3], 0).unwrap();
        assert!(matches!(CylinderFunction::from_doc(&c, &doc), Err(HaarError::NonCanonicalRep(0))));
    }

    #[test]
    fn strategies_agree() {
        let c = ctx(3, vec![vec![0, 1], vec![0, 0]], 4);
        let f = CylinderFunction::from_fn(&c, ChainFamily::H, 1, |p| BigRational::from_integer(p.x().coords()[0].value().clone())).unwrap();
        let seq = integrate(&c.clone().with_exec(Exec::Sequential), &f, 2).unwrap();
        let par = integrate(&c.with_exec(Exec::Parallel), &f, 2).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq, rat(1, 1));
    }
}
