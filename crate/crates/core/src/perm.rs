//! Permutations of GF(2^n) as full lookup tables, plus univariate
//! interpolation and algebraic degree.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::field::{Elem, FieldCtx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("table has {got} entries, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("value {0} is not a field element")]
    OutOfRange(Elem),
    #[error("not a permutation: image {0} occurs twice")]
    NotAPermutation(Elem),
    #[error("permutations live over different fields")]
    ContextMismatch,
}

/// A bijection of GF(2^n) stored as `table[x] = p(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    ctx: Arc<FieldCtx>,
    table: Vec<u32>,
}

fn check_values(ctx: &FieldCtx, values: &[u32]) -> Result<(), PermError> {
    let size = ctx.size();
    if values.len() != size {
        return Err(PermError::WrongLength {
            got: values.len(),
            expected: size,
        });
    }
    if let Some(&v) = values.iter().find(|&&v| v as usize >= size) {
        return Err(PermError::OutOfRange(Elem(v)));
    }
    Ok(())
}

impl Permutation {
    /// Validates that `values` is a bijection; reports the first repeated image.
    pub fn from_table(ctx: Arc<FieldCtx>, values: Vec<u32>) -> Result<Self, PermError> {
        check_values(&ctx, &values)?;
        let mut seen = vec![false; ctx.size()];
        for &v in &values {
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(PermError::NotAPermutation(Elem(v)));
            }
        }
        Ok(Permutation { ctx, table: values })
    }

    pub fn from_fn(ctx: Arc<FieldCtx>, f: impl Fn(Elem) -> Elem) -> Result<Self, PermError> {
        let values = ctx.elements().map(|x| f(x).0).collect();
        Self::from_table(ctx, values)
    }

    pub fn identity(ctx: Arc<FieldCtx>) -> Self {
        let table = (0..ctx.size() as u32).collect();
        Permutation { ctx, table }
    }

    /// x -> x^{2^n - 2}, with 0 -> 0.
    pub fn inverse_function(ctx: Arc<FieldCtx>) -> Self {
        let table = ctx.elements().map(|x| ctx.inv(x).0).collect();
        Permutation { ctx, table }
    }

    /// A uniformly random bijection.
    pub fn random(ctx: Arc<FieldCtx>, rng: &mut impl Rng) -> Self {
        use rand::seq::SliceRandom;
        let mut table: Vec<u32> = (0..ctx.size() as u32).collect();
        table.shuffle(rng);
        Permutation { ctx, table }
    }

    /// A random bijection that is affine over GF(2): x -> Mx + c with M invertible.
    pub fn random_affine(ctx: Arc<FieldCtx>, rng: &mut impl Rng) -> Self {
        let n = ctx.n();
        let full = (1u32 << n) - 1;
        let columns = loop {
            let cols: Vec<u32> = (0..n).map(|_| rng.gen::<u32>() & full).collect();
            if gf2_rank(&cols) == n {
                break cols;
            }
        };
        let c = rng.gen::<u32>() & full;
        let table = (0..ctx.size() as u32)
            .map(|x| {
                (0..n)
                    .filter(|i| x >> i & 1 == 1)
                    .fold(c, |acc, i| acc ^ columns[i as usize])
            })
            .collect();
        Permutation { ctx, table }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        Elem(self.table[x.index()])
    }

    /// `self ∘ inner`, i.e. x -> self(inner(x)).
    pub fn compose(&self, inner: &Permutation) -> Result<Permutation, PermError> {
        if self.ctx != inner.ctx {
            return Err(PermError::ContextMismatch);
        }
        let table = inner
            .table
            .iter()
            .map(|&y| self.table[y as usize])
            .collect();
        Ok(Permutation {
            ctx: self.ctx.clone(),
            table,
        })
    }

    pub fn invert(&self) -> Permutation {
        let mut table = vec![0u32; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y as usize] = x as u32;
        }
        Permutation {
            ctx: self.ctx.clone(),
            table,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    pub fn interpolate(&self) -> AnfTable {
        interpolate_values(&self.ctx, &self.table).expect("table length checked at construction")
    }

    pub fn algebraic_degree(&self) -> u32 {
        self.interpolate().degree()
    }
}

fn gf2_rank(columns: &[u32]) -> u32 {
    let mut basis: Vec<u32> = Vec::new();
    for &c in columns {
        let mut v = c;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len() as u32
}

/// Coefficients of the univariate polynomial f(x) = sum_i a_i x^i over GF(2^n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnfTable {
    coeffs: Vec<Elem>,
}

impl AnfTable {
    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Maximum binary weight of an exponent with nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| (i as u32).count_ones())
            .max()
            .unwrap_or(0)
    }

    /// Evaluates at one point, with 0^0 = 1.
    pub fn evaluate(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        // Horner from the top coefficient.
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| ctx.mul(acc, x) + c)
    }

    pub fn evaluate_all(&self, ctx: &FieldCtx) -> Vec<u32> {
        ctx.elements().map(|x| self.evaluate(ctx, x).0).collect()
    }
}

/// Interpolates an arbitrary (not necessarily bijective) value table.
///
/// With g the table generator and q = 2^n:
/// a_0 = f(0), a_{q-1} = sum_x f(x), and a_i = sum_{j} f(g^j) g^{-ij} for 0 < i < q-1.
pub fn interpolate_values(ctx: &FieldCtx, values: &[u32]) -> Result<AnfTable, PermError> {
    check_values(ctx, values)?;
    let q = ctx.size();
    let q1 = (q - 1) as u64;
    // log of f(g^j), or None when f(g^j) = 0
    let logs: Vec<Option<u64>> = (0..q1)
        .map(|j| {
            let x = ctx.generator_pow(j as i64);
            ctx.log(Elem(values[x.index()])).map(u64::from)
        })
        .collect();
    let mut coeffs = vec![Elem::ZERO; q];
    coeffs[0] = Elem(values[0]);
    coeffs[q - 1] = values.iter().fold(Elem::ZERO, |acc, &v| acc + Elem(v));
    for (i, slot) in coeffs.iter_mut().enumerate().take(q - 1).skip(1) {
        let mut acc = 0u32;
        let step = q1 - (i as u64 % q1);
        let mut shift = 0u64; // -i*j mod q-1
        for l in &logs {
            if let Some(l) = l {
                acc ^= ctx.generator_pow(((l + shift) % q1) as i64).0;
            }
            shift = (shift + step) % q1;
        }
        *slot = Elem(acc);
    }
    Ok(AnfTable { coeffs })
}
