//! Subsets of GF(2^n) used as switching sets, and builders for the set
//! families that yield differentially 4-uniform permutations.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, FieldCtx, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("sets live over different fields")]
    ContextMismatch,
    #[error("{0} is not an element of the field")]
    OutOfRange(u32),
    #[error("Tr_{k}^n(t1) != 0 for t1 = {t1}: x^q = x + t1 has no solution")]
    UnsolvableSubspace { k: u32, t1: Elem },
    #[error("t1 must be nonzero")]
    ZeroShift,
    #[error("exponent encoding requires a primitive modulus")]
    NotPrimitive,
}

/// A subset of GF(2^n) as a membership bit vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSet {
    ctx: Arc<FieldCtx>,
    words: Vec<u64>,
    len: usize,
}

impl ElementSet {
    pub fn empty(ctx: Arc<FieldCtx>) -> Self {
        let words = vec![0u64; ctx.size().div_ceil(64)];
        ElementSet { ctx, words, len: 0 }
    }

    pub fn from_predicate(ctx: Arc<FieldCtx>, pred: impl Fn(Elem) -> bool) -> Self {
        let mut set = Self::empty(ctx);
        for x in 0..set.ctx.size() as u32 {
            if pred(Elem(x)) {
                set.insert(Elem(x));
            }
        }
        set
    }

    pub fn from_elements(
        ctx: Arc<FieldCtx>,
        elements: impl IntoIterator<Item = u32>,
    ) -> Result<Self, SetError> {
        let mut set = Self::empty(ctx);
        for x in elements {
            if x as usize >= set.ctx.size() {
                return Err(SetError::OutOfRange(x));
            }
            set.insert(Elem(x));
        }
        Ok(set)
    }

    /// {x^i : i in exponents} for x the polynomial-basis variable (requires x primitive).
    pub fn from_exponents(
        ctx: Arc<FieldCtx>,
        exponents: impl IntoIterator<Item = u64>,
    ) -> Result<Self, SetError> {
        if !ctx.is_primitive() {
            return Err(SetError::NotPrimitive);
        }
        let mut set = Self::empty(ctx);
        for i in exponents {
            let x = set
                .ctx
                .generator_pow((i % (set.ctx.size() as u64 - 1)) as i64);
            set.insert(x);
        }
        Ok(set)
    }

    fn insert(&mut self, x: Elem) {
        let (w, b) = (x.index() / 64, x.index() % 64);
        if self.words[w] >> b & 1 == 0 {
            self.words[w] |= 1 << b;
            self.len += 1;
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        self.words[x.index() / 64] >> (x.index() % 64) & 1 == 1
    }

    /// Indicator function: 1 on the set, 0 elsewhere.
    #[inline]
    pub fn indicator(&self, x: Elem) -> u8 {
        self.contains(x) as u8
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Members in ascending encoding order.
    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.ctx.elements().filter(|&x| self.contains(x))
    }

    fn combine(&self, other: &ElementSet, op: impl Fn(u64, u64) -> u64) -> Result<Self, SetError> {
        if self.ctx != other.ctx {
            return Err(SetError::ContextMismatch);
        }
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        Ok(ElementSet {
            ctx: self.ctx.clone(),
            words,
            len,
        })
    }

    pub fn union(&self, other: &ElementSet) -> Result<Self, SetError> {
        self.combine(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &ElementSet) -> Result<Self, SetError> {
        self.combine(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Returns an element violating admissibility, if any.
    ///
    /// Admissible: 0 and 1 are both in or both out, and x/(1+x) is in the set
    /// for every member x other than 0 and 1.
    pub fn admissibility_witness(&self) -> Option<Elem> {
        if self.contains(Elem::ZERO) != self.contains(Elem::ONE) {
            return Some(if self.contains(Elem::ZERO) {
                Elem::ZERO
            } else {
                Elem::ONE
            });
        }
        self.iter()
            .filter(|&x| x.0 > 1)
            .find(|&x| !self.contains(closure_partner(&self.ctx, x)))
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility_witness().is_none()
    }

    /// S' = { x^{-1} + 1 : x in S }.
    pub fn s_prime(&self) -> ElementSet {
        let mut out = ElementSet::empty(self.ctx.clone());
        for x in self.iter() {
            out.insert(self.ctx.inv(x) + Elem::ONE);
        }
        out
    }

    /// Exponents i with g^i in the set, for the table generator g (0 excluded).
    pub fn exponents(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.iter().filter_map(|x| self.ctx.log(x)).collect();
        out.sort_unstable();
        out
    }
}

/// x / (1 + x).
#[inline]
pub fn closure_partner(ctx: &FieldCtx, x: Elem) -> Elem {
    ctx.div(x, x + Elem::ONE)
}

/// The subfield GF(2^k) as a set.
pub fn subfield_set(ctx: &Arc<FieldCtx>, k: u32) -> Result<ElementSet, SetError> {
    let elements = ctx.subfield_elements(k)?;
    Ok(ElementSet::from_elements(
        ctx.clone(),
        elements.into_iter().map(|e| e.0),
    )?)
}

/// All unordered pairs {x, x/(1+x)} with Tr(x) = Tr(x/(1+x)) = 1, x not in {0, 1}.
/// Pairs are listed by their smaller element, ascending.
pub fn trace_one_closure_pairs(ctx: &FieldCtx) -> Vec<(Elem, Elem)> {
    ctx.elements()
        .filter(|&x| x.0 > 1)
        .filter_map(|x| {
            let y = closure_partner(ctx, x);
            (x < y && ctx.trace(x) == 1 && ctx.trace(y) == 1).then_some((x, y))
        })
        .collect()
}

/// Set of inverses of the solutions of x^{2^k} = x + t1.
pub fn affine_inverse_set(ctx: &Arc<FieldCtx>, k: u32, t1: Elem) -> Result<ElementSet, SetError> {
    if t1.is_zero() {
        return Err(SetError::ZeroShift);
    }
    if !ctx.subtrace(k, t1)?.is_zero() {
        return Err(SetError::UnsolvableSubspace { k, t1 });
    }
    Ok(ElementSet::from_predicate(ctx.clone(), |y| {
        // y = x^{-1} with x^q = x + t1; x = 0 is never a solution since t1 != 0
        let x = ctx.inv(y);
        !y.is_zero() && ctx.frobenius(x, k) == x + t1
    }))
}

/// Parameter carrier for the switching-set families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetFamilySpec {
    Subfield { k: u32 },
    UnionSubfields { k1: u32, k2: u32 },
    SubfieldDifference { k: u32, l: u32 },
    TraceOneClosed { elements: Vec<u32> },
    UnionTraceOneAndDifference { s1: Vec<u32>, k: u32, l: u32 },
    AffineInverseSet { k: u32, t1: u32 },
    Explicit { elements: Vec<u32> },
}

impl SetFamilySpec {
    pub fn build(&self, ctx: &Arc<FieldCtx>) -> Result<ElementSet, SetError> {
        match self {
            SetFamilySpec::Subfield { k } => subfield_set(ctx, *k),
            SetFamilySpec::UnionSubfields { k1, k2 } => {
                subfield_set(ctx, *k1)?.union(&subfield_set(ctx, *k2)?)
            }
            SetFamilySpec::SubfieldDifference { k, l } => {
                subfield_set(ctx, *k)?.difference(&subfield_set(ctx, *l)?)
            }
            SetFamilySpec::TraceOneClosed { elements } | SetFamilySpec::Explicit { elements } => {
                ElementSet::from_elements(ctx.clone(), elements.iter().copied())
            }
            SetFamilySpec::UnionTraceOneAndDifference { s1, k, l } => {
                let s1 = ElementSet::from_elements(ctx.clone(), s1.iter().copied())?;
                let diff = subfield_set(ctx, *k)?.difference(&subfield_set(ctx, *l)?)?;
                s1.union(&diff)
            }
            SetFamilySpec::AffineInverseSet { k, t1 } => affine_inverse_set(ctx, *k, Elem(*t1)),
        }
    }
}

/// An element value in a set file: a JSON integer or a hex string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementLiteral {
    Int(u32),
    Hex(String),
}

impl ElementLiteral {
    pub fn value(&self) -> Option<u32> {
        match self {
            ElementLiteral::Int(v) => Some(*v),
            ElementLiteral::Hex(s) => parse_hex(s),
        }
    }
}

/// On-disk set description: either primitive-element exponents or raw element encodings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFile {
    pub n: u32,
    /// Hex coefficient mask, e.g. "0x1099".
    pub modulus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ElementLiteral>>,
}

#[derive(Debug, Error)]
pub enum SetFileError {
    #[error("invalid set file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad modulus or element literal {0:?}")]
    BadLiteral(String),
    #[error("set file is for n = {file_n}, modulus {file_modulus:#x}; field is n = {n}, modulus {modulus:#x}")]
    FieldMismatch {
        file_n: u32,
        file_modulus: u32,
        n: u32,
        modulus: u32,
    },
    #[error("set file must give exactly one of `exponents` or `elements`")]
    Ambiguous,
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Parses a hex literal with or without the `0x` prefix.
pub fn parse_hex(s: &str) -> Option<u32> {
    let t = s.trim();
    let t = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .unwrap_or(t);
    u32::from_str_radix(t, 16).ok()
}

impl SetFile {
    pub fn modulus_value(&self) -> Result<u32, SetFileError> {
        parse_hex(&self.modulus).ok_or_else(|| SetFileError::BadLiteral(self.modulus.clone()))
    }

    pub fn from_set(set: &ElementSet) -> Self {
        SetFile {
            n: set.ctx().n(),
            modulus: format!("{:#x}", set.ctx().modulus()),
            exponents: None,
            elements: Some(
                set.iter()
                    .map(|e| ElementLiteral::Hex(format!("{:#x}", e.0)))
                    .collect(),
            ),
        }
    }

    pub fn to_set(&self, ctx: &Arc<FieldCtx>) -> Result<ElementSet, SetFileError> {
        let m = self.modulus_value()?;
        if m != ctx.modulus() || self.n != ctx.n() {
            return Err(SetFileError::FieldMismatch {
                file_n: self.n,
                file_modulus: m,
                n: ctx.n(),
                modulus: ctx.modulus(),
            });
        }
        match (&self.exponents, &self.elements) {
            (Some(exps), None) => Ok(ElementSet::from_exponents(
                ctx.clone(),
                exps.iter().copied(),
            )?),
            (None, Some(els)) => {
                let values = els
                    .iter()
                    .map(|l| {
                        l.value()
                            .ok_or_else(|| SetFileError::BadLiteral(format!("{l:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ElementSet::from_elements(ctx.clone(), values)?)
            }
            _ => Err(SetFileError::Ambiguous),
        }
    }

    pub fn parse(json: &str) -> Result<Self, SetFileError> {
        Ok(serde_json::from_str(json)?)
    }
}
