//! Free modules `R^N` over the m-adic completion, with the chain
//! `M_j = 𝓘_j^N`, integer bilinear forms and integer-matrix maps.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::madic::{AdicRing, MadicError, MadicInt, ValuationResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HModuleError {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("a module vector needs at least one coordinate")]
    Empty,
    #[error("coordinates must share modulus and precision")]
    NonUniform,
    #[error("coefficient matrix must be square and non-empty")]
    NotSquare,
    #[error(transparent)]
    Madic(#[from] MadicError),
}

/// A vector of `N >= 1` coordinates with a common modulus and precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ModuleVec {
    coords: Vec<MadicInt>,
}

impl ModuleVec {
    pub fn new(coords: Vec<MadicInt>) -> Result<Self, HModuleError> {
        let first = coords.first().ok_or(HModuleError::Empty)?;
        for c in &coords[1..] {
            if c.precision() != first.precision() || c.modulus() != first.modulus() {
                return Err(HModuleError::NonUniform);
            }
        }
        Ok(ModuleVec { coords })
    }

    pub fn zero(ring: &AdicRing, rank: usize) -> Self {
        ModuleVec { coords: vec![ring.zero(); rank.max(1)] }
    }

    pub fn from_ints(ring: &AdicRing, xs: &[i64]) -> Result<Self, HModuleError> {
        ModuleVec::new(xs.iter().map(|&x| ring.int(x)).collect())
    }

    pub fn from_bigints(ring: &AdicRing, xs: &[BigInt]) -> Result<Self, HModuleError> {
        ModuleVec::new(xs.iter().map(|x| ring.element(x)).collect())
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[MadicInt] {
        &self.coords
    }

    pub fn precision(&self) -> u32 {
        self.coords[0].precision()
    }

    pub fn modulus(&self) -> &BigInt {
        self.coords[0].modulus()
    }

    pub fn ring(&self) -> AdicRing {
        self.coords[0].ring()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(MadicInt::is_zero)
    }

    fn zip(&self, other: &ModuleVec, f: impl Fn(&MadicInt, &MadicInt) -> Result<MadicInt, MadicError>) -> Result<ModuleVec, HModuleError> {
        if self.rank() != other.rank() {
            return Err(HModuleError::RankMismatch { expected: self.rank(), got: other.rank() });
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ModuleVec { coords })
    }

    pub fn try_add(&self, other: &ModuleVec) -> Result<ModuleVec, HModuleError> {
        self.zip(other, MadicInt::try_add)
    }

    pub fn try_sub(&self, other: &ModuleVec) -> Result<ModuleVec, HModuleError> {
        self.zip(other, MadicInt::try_sub)
    }

    pub fn neg(&self) -> ModuleVec {
        ModuleVec { coords: self.coords.iter().map(|c| -c).collect() }
    }

    /// `r x` for an integer scalar.
    pub fn scale(&self, r: &BigInt) -> ModuleVec {
        ModuleVec { coords: self.coords.iter().map(|c| c.scale(r)).collect() }
    }

    /// `r x` for a scalar in the completion.
    pub fn scale_by(&self, r: &MadicInt) -> Result<ModuleVec, HModuleError> {
        let coords = self
            .coords
            .iter()
            .map(|c| r.try_mul(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ModuleVec { coords })
    }

    /// Coordinatewise `θ_{j,n}`; the quotient map `M → M / M_j`.
    pub fn truncate(&self, j: u32) -> Result<ModuleVec, HModuleError> {
        let coords = self
            .coords
            .iter()
            .map(|c| c.truncate(j))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ModuleVec { coords })
    }

    /// Largest `j` with `x ∈ M_j = 𝓘_j^N`: the minimum coordinate valuation.
    pub fn valuation(&self) -> ValuationResult {
        self.coords
            .iter()
            .map(MadicInt::valuation)
            .reduce(ValuationResult::min)
            .expect("non-empty")
    }

    /// `Some(x ∈ M_j)`, or `None` when `j` exceeds the precision.
    pub fn in_level(&self, j: u32) -> Option<bool> {
        self.valuation().at_least(j)
    }
}

impl<'de> Deserialize<'de> for ModuleVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coords = Vec::<MadicInt>::deserialize(d)?;
        ModuleVec::new(coords).map_err(serde::de::Error::custom)
    }
}

/// `B(x, y) = Σ_p Σ_q b_{pq} x_p y_q` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct BilinearForm {
    b: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    #[serde(rename = "N")]
    rank: usize,
    b: Vec<Vec<i64>>,
}

impl TryFrom<FormRepr> for BilinearForm {
    type Error = HModuleError;
    fn try_from(r: FormRepr) -> Result<Self, Self::Error> {
        let form = BilinearForm::new(r.b)?;
        if form.rank() != r.rank {
            return Err(HModuleError::RankMismatch { expected: r.rank, got: form.rank() });
        }
        Ok(form)
    }
}

impl From<BilinearForm> for FormRepr {
    fn from(f: BilinearForm) -> Self {
        FormRepr { rank: f.rank(), b: f.b }
    }
}

impl BilinearForm {
    pub fn new(b: Vec<Vec<i64>>) -> Result<Self, HModuleError> {
        if b.is_empty() || b.iter().any(|row| row.len() != b.len()) {
            return Err(HModuleError::NotSquare);
        }
        Ok(BilinearForm { b })
    }

    pub fn rank(&self) -> usize {
        self.b.len()
    }

    pub fn coefficients(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn is_alternating(&self) -> bool {
        let n = self.rank();
        (0..n).all(|p| self.b[p][p] == 0 && (0..n).all(|q| self.b[p][q] == -self.b[q][p]))
    }

    /// The double sum over raw residues, reduced once at the end.
    pub fn eval(&self, x: &ModuleVec, y: &ModuleVec) -> Result<MadicInt, HModuleError> {
        let n = self.rank();
        for v in [x, y] {
            if v.rank() != n {
                return Err(HModuleError::RankMismatch { expected: n, got: v.rank() });
            }
        }
        x.coords[0].same_modulus(&y.coords[0])?;
        let mut acc = BigInt::default();
        for (p, xp) in x.coords.iter().enumerate() {
            let mut row = BigInt::default();
            for (q, yq) in y.coords.iter().enumerate() {
                let c = self.b[p][q];
                if c != 0 {
                    row += yq.value() * c;
                }
            }
            acc += xp.value() * row;
        }
        let low = if x.precision() <= y.precision() { x } else { y };
        Ok(low.coords[0].ring().element(&acc))
    }
}

/// `f(x) = F x` for an integer `K × N` matrix; such maps send `M_j` into
/// the level-`j` submodule of the target and commute with truncation.
pub fn apply_linear(f: &[Vec<i64>], x: &ModuleVec) -> Result<ModuleVec, HModuleError> {
    if f.is_empty() {
        return Err(HModuleError::RankMismatch { expected: 1, got: 0 });
    }
    let ring = x.ring();
    let modulus = ring.power(ring.precision()).clone();
    let coords = f
        .iter()
        .map(|row| {
            if row.len() != x.rank() {
                return Err(HModuleError::RankMismatch { expected: x.rank(), got: row.len() });
            }
            let acc: BigInt = row.iter().zip(&x.coords).map(|(&c, xq)| xq.value() * c).sum();
            Ok(ring.residue(acc.mod_floor(&modulus))?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    ModuleVec::new(coords)
}
