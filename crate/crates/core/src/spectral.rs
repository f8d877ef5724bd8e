//! Differential and Walsh spectra, nonlinearity lower bounds, and
//! CCZ-invariant fingerprints.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, FieldCtx, FieldError};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("lower bounds need an even degree n >= 6, got {0}")]
    UnsupportedN(u32),
    #[error("subfield sum needs Tr(b) = 1, got b = {0}")]
    TraceZeroB(Elem),
    #[error("fingerprints come from different fields ({0} vs {1})")]
    ContextMismatch(u32, u32),
}

/// Histogram of N(a, b) = #{x : p(x + a) + p(x) = b} over a != 0 and all b.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiffSpectrum {
    pub counts: BTreeMap<u32, u64>,
}

impl DiffSpectrum {
    /// Largest N(a, b) that occurs.
    pub fn uniformity(&self) -> u32 {
        self.counts
            .iter()
            .rev()
            .find(|(_, &c)| c > 0)
            .map(|(&v, _)| v)
            .unwrap_or(0)
    }

    pub fn total_pairs(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn total_solutions(&self) -> u64 {
        self.counts.iter().map(|(&v, &c)| v as u64 * c).sum()
    }

    /// Formats as `{0^2079, 2^1890, 4^63}`.
    pub fn display(&self) -> String {
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(v, c)| format!("{v}^{c}"))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn from_pairs(pairs: &[(u32, u64)]) -> Self {
        DiffSpectrum {
            counts: pairs.iter().copied().collect(),
        }
    }
}

pub fn diff_spectrum(p: &Permutation) -> DiffSpectrum {
    let size = p.ctx().size();
    let table = p.table();
    let hist = (1..size)
        .into_par_iter()
        .fold(
            || (vec![0u32; size], vec![0u64; size + 1]),
            |(mut row, mut hist), a| {
                row.fill(0);
                for x in 0..size {
                    row[(table[x] ^ table[x ^ a]) as usize] += 1;
                }
                for &v in &row {
                    hist[v as usize] += 1;
                }
                (row, hist)
            },
        )
        .map(|(_, h)| h)
        .reduce(
            || vec![0u64; size + 1],
            |mut acc, h| {
                acc.iter_mut().zip(h).for_each(|(a, b)| *a += b);
                acc
            },
        );
    DiffSpectrum {
        counts: hist
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(v, c)| (v as u32, c))
            .collect(),
    }
}

/// Maximum N(a, b) by direct counting, without histograms or parallelism.
pub fn differential_uniformity_brute(p: &Permutation) -> u32 {
    let size = p.ctx().size();
    let table = p.table();
    let mut row = vec![0u32; size];
    let mut best = 0;
    for a in 1..size {
        row.fill(0);
        for x in 0..size {
            row[(table[x] ^ table[x ^ a]) as usize] += 1;
        }
        best = best.max(*row.iter().max().unwrap());
    }
    best
}

/// Walsh spectrum over (a, b) with b != 0 and a unrestricted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalshStats {
    pub spectrum: BTreeMap<i32, u64>,
    pub max_abs: u32,
    pub nonlinearity: u32,
}

impl WalshStats {
    /// Multiset of |W(a, b)|.
    pub fn extended(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for (&w, &c) in &self.spectrum {
            *out.entry(w.unsigned_abs()).or_insert(0) += c;
        }
        out
    }
}

/// `masks[b]` is the mask m with Tr(b * y) = parity(m & y).
pub fn trace_forms(ctx: &FieldCtx) -> Vec<u32> {
    let basis: Vec<u32> = (0..ctx.n()).map(|i| ctx.trace_form(Elem(1 << i))).collect();
    let mut masks = vec![0u32; ctx.size()];
    for b in 1..ctx.size() {
        let low = b.trailing_zeros() as usize;
        masks[b] = masks[b & (b - 1)] ^ basis[low];
    }
    masks
}

/// In-place unnormalized Walsh-Hadamard transform: out[u] = sum_x in[x] (-1)^{u.x}.
pub fn fwht(data: &mut [i32]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

/// Component b as a bit-dot-product sign sequence, transformed: entry u
/// equals W(a, b) for the a whose trace form is u.
fn component_transform(table: &[u32], mask: u32, buf: &mut [i32]) {
    for (s, &y) in buf.iter_mut().zip(table) {
        *s = 1 - 2 * ((y & mask).count_ones() & 1) as i32;
    }
    fwht(buf);
}

/// W(a, b) for every a, indexed by the field element a.
pub fn walsh_row(p: &Permutation, b: Elem) -> Vec<i32> {
    let ctx = p.ctx();
    let masks = trace_forms(ctx);
    let mut buf = vec![0i32; ctx.size()];
    component_transform(p.table(), masks[b.index()], &mut buf);
    masks.iter().map(|&m| buf[m as usize]).collect()
}

/// W(a, b) straight from the definition.
pub fn walsh_naive(p: &Permutation, a: Elem, b: Elem) -> i32 {
    let ctx = p.ctx();
    ctx.elements()
        .map(|x| {
            let t = ctx.trace(ctx.mul(a, x) + ctx.mul(b, p.apply(x)));
            1 - 2 * t as i32
        })
        .sum()
}

pub fn walsh_stats(p: &Permutation) -> WalshStats {
    let ctx = p.ctx();
    let size = ctx.size();
    let masks = trace_forms(ctx);
    let table = p.table();
    // offset histogram: index w + size
    let hist = (1..size)
        .into_par_iter()
        .fold(
            || (vec![0i32; size], vec![0u64; 2 * size + 1]),
            |(mut buf, mut hist), b| {
                component_transform(table, masks[b], &mut buf);
                for &w in &buf {
                    hist[(w + size as i32) as usize] += 1;
                }
                (buf, hist)
            },
        )
        .map(|(_, h)| h)
        .reduce(
            || vec![0u64; 2 * size + 1],
            |mut acc, h| {
                acc.iter_mut().zip(h).for_each(|(a, b)| *a += b);
                acc
            },
        );
    let spectrum: BTreeMap<i32, u64> = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(i, c)| (i as i32 - size as i32, c))
        .collect();
    let max_abs = spectrum.keys().map(|w| w.unsigned_abs()).max().unwrap_or(0);
    WalshStats {
        spectrum,
        max_abs,
        nonlinearity: nonlinearity_from_max(ctx.n(), max_abs),
    }
}

fn nonlinearity_from_max(n: u32, max_abs: u32) -> u32 {
    (1u32 << (n - 1)).saturating_sub(max_abs / 2)
}

/// Nonlinearity only; same transform as [`walsh_stats`] without the histogram.
pub fn nonlinearity(p: &Permutation) -> u32 {
    let ctx = p.ctx();
    let size = ctx.size();
    let masks = trace_forms(ctx);
    let table = p.table();
    let max_abs = (1..size)
        .into_par_iter()
        .fold(
            || (vec![0i32; size], 0u32),
            |(mut buf, best), b| {
                component_transform(table, masks[b], &mut buf);
                let m = buf.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0);
                (buf, best.max(m))
            },
        )
        .map(|(_, m)| m)
        .max()
        .unwrap_or(0);
    nonlinearity_from_max(ctx.n(), max_abs)
}

/// The rounded value of 2^{k/2 + 1} used by the subfield character-sum bound:
/// 2 for k = 1, exact for even k, and for odd k > 1 the multiple of 4 in
/// (2^{k/2+1} - 4, 2^{k/2+1}].
pub fn subfield_sum_floor(k: u32) -> i64 {
    assert!(k >= 1, "k must be positive");
    if k == 1 {
        return 2;
    }
    if k % 2 == 0 {
        return 1i64 << (k / 2 + 1);
    }
    // 2^{k/2+1} = 2^{(k+1)/2} * sqrt(2); largest multiple of 4 not above it.
    let base = 1u128 << ((k + 1) / 2);
    let mut t: u128 = 0;
    // t <= base * sqrt2  <=>  t^2 <= 2 base^2
    while (t + 4) * (t + 4) <= 2 * base * base {
        t += 4;
    }
    t as i64
}

/// sum_{x in GF(2^k)} (-1)^{Tr(a x + b x^{-1})}, absolute trace of GF(2^n).
pub fn subfield_sum(ctx: &FieldCtx, k: u32, a: Elem, b: Elem) -> Result<i64, SpectralError> {
    let elements = ctx.subfield_elements(k)?;
    if ctx.trace(b) != 1 {
        return Err(SpectralError::TraceZeroB(b));
    }
    Ok(elements
        .into_iter()
        .map(|x| {
            let t = ctx.trace(ctx.mul(a, x) + ctx.mul(b, ctx.inv(x)));
            1 - 2 * t as i64
        })
        .sum())
}

/// Shape information about S that the bounds can exploit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetShape {
    Subfield { k: u32 },
    SubfieldUnion { k1: u32, k2: u32 },
    General { cardinality: usize },
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl SetShape {
    pub fn cardinality(&self) -> usize {
        match *self {
            SetShape::Subfield { k } => 1 << k,
            SetShape::SubfieldUnion { k1, k2 } => (1 << k1) + (1 << k2) - (1 << gcd(k1, k2)),
            SetShape::General { cardinality } => cardinality,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    /// 2^{n-1} - 2^{n/2} - |S|.
    pub size_bound: i64,
    /// Union-of-subfields bound, when S has that shape.
    pub subfield_bound: Option<i64>,
    pub best: i64,
    /// (k, rounded 2^{k/2+1}) pairs used by the union bound.
    pub floor_terms: Vec<(u32, i64)>,
}

pub fn nl_bounds(n: u32, shape: SetShape) -> Result<BoundCertificate, SpectralError> {
    if n < 6 || n % 2 == 1 {
        return Err(SpectralError::UnsupportedN(n));
    }
    let base = (1i64 << (n - 1)) - (1i64 << (n / 2));
    let size_bound = base - shape.cardinality() as i64;
    let (k1, k2) = match shape {
        SetShape::Subfield { k } => (k, k),
        SetShape::SubfieldUnion { k1, k2 } => (k1, k2),
        SetShape::General { .. } => {
            return Ok(BoundCertificate {
                size_bound,
                subfield_bound: None,
                best: size_bound,
                floor_terms: vec![],
            })
        }
    };
    let g = gcd(k1, k2);
    let mut floor_terms: Vec<(u32, i64)> = Vec::new();
    let mut term = |k: u32| {
        let t = subfield_sum_floor(k);
        if !floor_terms.contains(&(k, t)) {
            floor_terms.push((k, t));
        }
        t
    };
    let mut candidates = vec![base - term(k1) - term(k2) - term(g)];
    if k2 % k1 == 0 || k1 % k2 == 0 {
        candidates.push(base - term(k1.max(k2)));
    }
    for (three, other) in [(k1, k2), (k2, k1)] {
        if three == 3 && gcd(other, 3) == 1 {
            candidates.push(base - term(other) - 6);
        }
    }
    let subfield_bound = candidates
        .into_iter()
        .max()
        .expect("at least the general bound");
    floor_terms.sort_unstable();
    Ok(BoundCertificate {
        size_bound,
        subfield_bound: Some(subfield_bound),
        best: size_bound.max(subfield_bound),
        floor_terms,
    })
}

/// Differential spectrum plus the multiset of |W(a, b)|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CczFingerprint {
    pub n: u32,
    pub diff_spectrum: DiffSpectrum,
    pub extended_walsh: BTreeMap<u32, u64>,
}

pub fn ccz_fingerprint(p: &Permutation) -> CczFingerprint {
    CczFingerprint {
        n: p.ctx().n(),
        diff_spectrum: diff_spectrum(p),
        extended_walsh: walsh_stats(p).extended(),
    }
}

/// `true` certifies CCZ-inequivalence; `false` only means these invariants
/// cannot tell the two apart.
pub fn fingerprints_differ(
    f1: &CczFingerprint,
    f2: &CczFingerprint,
) -> Result<bool, SpectralError> {
    if f1.n != f2.n {
        return Err(SpectralError::ContextMismatch(f1.n, f2.n));
    }
    Ok(f1 != f2)
}
