//! Arithmetic in binary extension fields GF(2^n), 2 <= n <= 16.
//!
//! Elements are stored in the polynomial basis: bit `i` of an [`Elem`] is the
//! coefficient of `x^i`. A [`FieldCtx`] owns the defining polynomial together
//! with exp/log tables built relative to a fixed generator, an inverse table,
//! the trace form, and a precomputed solver for `y^2 + y = c`.

use std::fmt;

use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

/// n = 12 modulus x^12 + x^7 + x^4 + x^3 + 1.
pub const MODULUS_N12: u32 = 0x1099;

/// One primitive defining polynomial per even degree.
const DEFAULT_MODULI: &[(u32, u32)] = &[
    (2, 0x7),
    (4, 0x13),
    (6, 0x43),
    (8, 0x11d),
    (10, 0x409),
    (12, MODULUS_N12),
    (14, 0x4443),
    (16, 0x1002d),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree {0} outside supported range 2..=16")]
    UnsupportedDegree(u32),
    #[error("modulus {modulus:#x} does not have degree {n}")]
    DegreeMismatch { n: u32, modulus: u32 },
    #[error("modulus {modulus:#x} is reducible over GF(2)")]
    ReducibleModulus { modulus: u32 },
    #[error("no built-in modulus for degree {0}")]
    NoDefaultModulus(u32),
    #[error("{k} does not divide {n}")]
    NonDivisor { k: u32, n: u32 },
    #[error("GF(2^{0}) has no primitive third root of unity (odd degree)")]
    NoThirdRoot(u32),
}

/// A field element in the polynomial basis of some [`FieldCtx`].
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, serde::Serialize, serde::Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Elem({:#x})", self.0)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Add for Elem {
    type Output = Elem;
    #[inline]
    fn add(self, rhs: Elem) -> Elem {
        Elem(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl std::ops::AddAssign for Elem {
    #[inline]
    fn add_assign(&mut self, rhs: Elem) {
        self.0 ^= rhs.0;
    }
}

/// Roots of a quadratic equation over the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraticRoots {
    None,
    One(Elem),
    /// Two distinct roots, smaller encoding first.
    Two(Elem, Elem),
}

impl QuadraticRoots {
    pub fn count(&self) -> usize {
        match self {
            QuadraticRoots::None => 0,
            QuadraticRoots::One(_) => 1,
            QuadraticRoots::Two(..) => 2,
        }
    }

    pub fn roots(&self) -> Vec<Elem> {
        match *self {
            QuadraticRoots::None => vec![],
            QuadraticRoots::One(r) => vec![r],
            QuadraticRoots::Two(r, s) => vec![r, s],
        }
    }

    fn pair(r: Elem, s: Elem) -> Self {
        if r < s {
            QuadraticRoots::Two(r, s)
        } else {
            QuadraticRoots::Two(s, r)
        }
    }
}

/// Row of the echelon form of `y -> y^2 + y`: `image` is the image of `preimage`.
#[derive(Debug, Clone, Copy)]
struct EchelonRow {
    pivot: u32,
    image: u32,
    preimage: u32,
}

/// Immutable description of GF(2^n).
#[derive(Clone)]
pub struct FieldCtx {
    n: u32,
    modulus: u32,
    primitive_modulus: bool,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    inverse: Vec<u32>,
    trace_mask: u32,
    omega: Option<Elem>,
    artin_schreier: Vec<EchelonRow>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("n", &self.n)
            .field("modulus", &format_args!("{:#x}", self.modulus))
            .field("primitive_modulus", &self.primitive_modulus)
            .finish_non_exhaustive()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

/// Built-in primitive modulus for `n`, if one is shipped.
pub fn default_modulus(n: u32) -> Option<u32> {
    DEFAULT_MODULI
        .iter()
        .find(|(d, _)| *d == n)
        .map(|(_, m)| *m)
}

impl FieldCtx {
    /// Builds GF(2^n) with the given defining polynomial (bit i = coefficient of x^i).
    pub fn new(n: u32, modulus: u32) -> Result<Self, FieldError> {
        if !(2..=MAX_DEGREE).contains(&n) {
            return Err(FieldError::UnsupportedDegree(n));
        }
        if poly::degree(modulus as u64) != Some(n) {
            return Err(FieldError::DegreeMismatch { n, modulus });
        }
        if !poly::is_irreducible(modulus as u64, n) {
            return Err(FieldError::ReducibleModulus { modulus });
        }

        let size = 1usize << n;
        let group_order = (size - 1) as u64;
        let primes = prime_factors(group_order);
        let has_full_order = |g: u32| {
            primes.iter().all(|&p| {
                let e = group_order / p;
                clmul_pow(g, e, modulus, n) != 1
            })
        };
        let primitive_modulus = n > 1 && has_full_order(2);
        let generator = if primitive_modulus {
            2
        } else {
            (2..size as u32)
                .find(|&g| has_full_order(g))
                .expect("multiplicative group of a finite field is cyclic")
        };

        let mut exp = vec![0u32; 2 * (size - 1)];
        let mut log = vec![0u32; size];
        let mut acc = 1u32;
        for i in 0..size - 1 {
            exp[i] = acc;
            exp[i + size - 1] = acc;
            log[acc as usize] = i as u32;
            acc = clmul_mod(acc, generator, modulus, n);
        }
        debug_assert_eq!(acc, 1);

        let mut inverse = vec![0u32; size];
        for x in 1..size {
            let l = log[x] as usize;
            inverse[x] = exp[(size - 1 - l) % (size - 1)];
        }

        let mut ctx = FieldCtx {
            n,
            modulus,
            primitive_modulus,
            generator: Elem(generator),
            exp,
            log,
            inverse,
            trace_mask: 0,
            omega: None,
            artin_schreier: Vec::new(),
        };

        let mut mask = 0u32;
        for i in 0..n {
            if ctx.trace_slow(Elem(1 << i)) {
                mask |= 1 << i;
            }
        }
        ctx.trace_mask = mask;
        ctx.artin_schreier = ctx.artin_schreier_echelon();
        if n % 2 == 0 {
            // Roots of y^2 + y + 1: y^2 + y = 1 always solvable when n is even.
            if let QuadraticRoots::Two(w, _) = ctx.solve_artin_schreier(Elem::ONE) {
                ctx.omega = Some(w);
            }
        }
        Ok(ctx)
    }

    /// Builds GF(2^n) with the built-in modulus.
    pub fn with_default(n: u32) -> Result<Self, FieldError> {
        let m = default_modulus(n).ok_or(FieldError::NoDefaultModulus(n))?;
        Self::new(n, m)
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of field elements, 2^n.
    #[inline]
    pub fn size(&self) -> usize {
        1usize << self.n
    }

    /// True when x is a generator of the multiplicative group.
    pub fn is_primitive(&self) -> bool {
        self.primitive_modulus
    }

    /// Generator used for the exp/log tables (x itself when the modulus is primitive).
    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.size() as u32).map(Elem)
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        x + y
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if x.0 == 0 || y.0 == 0 {
            return Elem::ZERO;
        }
        let l = self.log[x.index()] + self.log[y.index()];
        Elem(self.exp[l as usize])
    }

    #[inline]
    pub fn square(&self, x: Elem) -> Elem {
        self.mul(x, x)
    }

    /// x^{2^k}.
    pub fn frobenius(&self, x: Elem, k: u32) -> Elem {
        if x.0 == 0 {
            return x;
        }
        let q1 = (self.size() - 1) as u64;
        let l = self.log[x.index()] as u64;
        let shift = (k % self.n) as u64;
        Elem(self.exp[((l << shift) % q1) as usize])
    }

    /// Inverse with the convention 0^{-1} = 0.
    #[inline]
    pub fn inv(&self, x: Elem) -> Elem {
        Elem(self.inverse[x.index()])
    }

    /// x / y with y^{-1} taken under the 0^{-1} = 0 convention.
    #[inline]
    pub fn div(&self, x: Elem, y: Elem) -> Elem {
        self.mul(x, self.inv(y))
    }

    /// x^e for any integer e. For x != 0 the exponent is reduced mod 2^n - 1;
    /// for x = 0, 0^0 = 1 and every other power is 0.
    pub fn pow(&self, x: Elem, e: i64) -> Elem {
        if x.0 == 0 {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        let q1 = (self.size() - 1) as i64;
        let l = self.log[x.index()] as i64;
        let r = (l * e.rem_euclid(q1)).rem_euclid(q1);
        Elem(self.exp[r as usize])
    }

    /// g^i for the table generator g.
    pub fn generator_pow(&self, i: i64) -> Elem {
        let q1 = (self.size() - 1) as i64;
        Elem(self.exp[i.rem_euclid(q1) as usize])
    }

    /// Discrete log base the table generator; `None` for 0.
    pub fn log(&self, x: Elem) -> Option<u32> {
        (x.0 != 0).then(|| self.log[x.index()])
    }

    /// Reference multiplication by shift-and-reduce, independent of the tables.
    pub fn mul_reference(&self, x: Elem, y: Elem) -> Elem {
        Elem(clmul_mod(x.0, y.0, self.modulus, self.n))
    }

    /// Absolute trace Tr(x) in {0, 1}.
    #[inline]
    pub fn trace(&self, x: Elem) -> u8 {
        ((x.0 & self.trace_mask).count_ones() & 1) as u8
    }

    /// Mask `m` such that Tr(x) = parity(m & x).
    pub fn trace_mask(&self) -> u32 {
        self.trace_mask
    }

    /// Mask `m` such that Tr(b * y) = parity(m & y) for every y.
    pub fn trace_form(&self, b: Elem) -> u32 {
        (0..self.n)
            .filter(|&i| self.trace(self.mul(b, Elem(1 << i))) == 1)
            .fold(0, |m, i| m | (1 << i))
    }

    fn trace_slow(&self, x: Elem) -> bool {
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..self.n {
            acc += y;
            y = Elem(clmul_mod(y.0, y.0, self.modulus, self.n));
        }
        debug_assert!(acc.0 <= 1);
        acc.0 == 1
    }

    fn check_divisor(&self, k: u32) -> Result<(), FieldError> {
        if k == 0 || self.n % k != 0 {
            Err(FieldError::NonDivisor { k, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Relative trace Tr_k^n(x) = x + x^{2^k} + ... + x^{2^{n-k}}.
    pub fn subtrace(&self, k: u32, x: Elem) -> Result<Elem, FieldError> {
        self.check_divisor(k)?;
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..self.n / k {
            acc += y;
            y = self.frobenius(y, k);
        }
        Ok(acc)
    }

    /// Whether x lies in the subfield GF(2^k).
    pub fn in_subfield(&self, k: u32, x: Elem) -> Result<bool, FieldError> {
        self.check_divisor(k)?;
        Ok(self.frobenius(x, k) == x)
    }

    /// Elements of the subfield GF(2^k), ascending.
    pub fn subfield_elements(&self, k: u32) -> Result<Vec<Elem>, FieldError> {
        self.check_divisor(k)?;
        Ok(self
            .elements()
            .filter(|&x| self.frobenius(x, k) == x)
            .collect())
    }

    /// The root of x^2 + x + 1 with the smaller encoding.
    pub fn omega(&self) -> Result<Elem, FieldError> {
        self.omega.ok_or(FieldError::NoThirdRoot(self.n))
    }

    fn artin_schreier_echelon(&self) -> Vec<EchelonRow> {
        let mut rows: Vec<EchelonRow> = Vec::with_capacity(self.n as usize);
        for i in 0..self.n {
            let e = Elem(1 << i);
            let mut image = (self.square(e) + e).0;
            let mut preimage = e.0;
            for row in &rows {
                if image & (1 << row.pivot) != 0 {
                    image ^= row.image;
                    preimage ^= row.preimage;
                }
            }
            if image != 0 {
                rows.push(EchelonRow {
                    pivot: 31 - image.leading_zeros(),
                    image,
                    preimage,
                });
            }
        }
        rows
    }

    /// Solves y^2 + y = c.
    pub fn solve_artin_schreier(&self, c: Elem) -> QuadraticRoots {
        let mut rest = c.0;
        let mut y = 0u32;
        for row in &self.artin_schreier {
            if rest & (1 << row.pivot) != 0 {
                rest ^= row.image;
                y ^= row.preimage;
            }
        }
        if rest != 0 {
            return QuadraticRoots::None;
        }
        let y = Elem(y);
        debug_assert_eq!(self.square(y) + y, c);
        QuadraticRoots::pair(y, y + Elem::ONE)
    }

    /// Roots of x^2 + a x + b.
    pub fn solve_quadratic(&self, a: Elem, b: Elem) -> QuadraticRoots {
        if a.is_zero() {
            return QuadraticRoots::One(self.frobenius(b, self.n - 1));
        }
        let a2 = self.square(a);
        match self.solve_artin_schreier(self.div(b, a2)) {
            QuadraticRoots::Two(z0, z1) => QuadraticRoots::pair(self.mul(a, z0), self.mul(a, z1)),
            _ => QuadraticRoots::None,
        }
    }

    /// Kloosterman sum sum_x (-1)^{Tr(lambda x + x^{-1})}, with 0^{-1} = 0.
    pub fn kloosterman(&self, lambda: Elem) -> i64 {
        self.elements()
            .map(|x| {
                if self.trace(self.mul(lambda, x) + self.inv(x)) == 0 {
                    1
                } else {
                    -1
                }
            })
            .sum()
    }
}

/// Shift-and-add multiplication modulo `modulus` of degree `n`.
pub(crate) fn clmul_mod(mut a: u32, mut b: u32, modulus: u32, n: u32) -> u32 {
    let top = 1u32 << n;
    let mut r = 0u32;
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    r
}

fn clmul_pow(base: u32, mut e: u64, modulus: u32, n: u32) -> u32 {
    let mut acc = 1u32;
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = clmul_mod(acc, b, modulus, n);
        }
        b = clmul_mod(b, b, modulus, n);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Polynomials over GF(2) packed into u64 (bit i = coefficient of x^i).
mod poly {
    pub fn degree(p: u64) -> Option<u32> {
        (p != 0).then(|| 63 - p.leading_zeros())
    }

    pub fn rem(mut a: u64, m: u64) -> u64 {
        let dm = degree(m).expect("nonzero modulus");
        while let Some(da) = degree(a) {
            if da < dm {
                break;
            }
            a ^= m << (da - dm);
        }
        a
    }

    pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
        let mut r = 0u64;
        let mut a = rem(a, m);
        let mut b = b;
        let dm = degree(m).expect("nonzero modulus");
        while b != 0 {
            if b & 1 != 0 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> dm & 1 != 0 {
                a ^= m;
            }
        }
        r
    }

    pub fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let r = rem(a, b);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin-style test: m of degree n is irreducible iff gcd(x^{2^i} - x, m) = 1
    /// for every 1 <= i <= n/2.
    pub fn is_irreducible(m: u64, n: u32) -> bool {
        if m & 1 == 0 {
            return n == 1 && m == 2;
        }
        let mut h = 2u64; // x
        for _ in 1..=n / 2 {
            h = mulmod(h, h, m);
            if gcd(m, h ^ 2) != 1 {
                return false;
            }
        }
        true
    }
}
