//! Switching the inverse function on a set S: f(x) = x^{-1} + 1_S(x).
//!
//! Besides the raw builder this module has the uniformity criterion checker
//! and one constructor per known-good family of switching sets. Every
//! constructor validates the family's parameter conditions, then certifies
//! the result with the criterion checker and (unless asked not to) by
//! brute-force differential uniformity.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, FieldCtx, FieldError};
use crate::perm::{PermError, Permutation};
use crate::spectral::{differential_uniformity_brute, SetShape};
use crate::subset::{affine_inverse_set, closure_partner, subfield_set, ElementSet, SetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("set is not admissible: {0} violates the closure conditions")]
    InadmissibleSet(Elem),
    #[error("uniformity criterion needs even n, got {0}")]
    OddDegree(u32),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("construction failed certification: {0}")]
    CertificationFailed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

fn precondition(ok: bool, msg: impl FnOnce() -> String) -> Result<(), ConstructionError> {
    if ok {
        Ok(())
    } else {
        Err(ConstructionError::PreconditionViolated(msg()))
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn require_admissible(set: &ElementSet) -> Result<(), ConstructionError> {
    match set.admissibility_witness() {
        Some(w) => Err(ConstructionError::InadmissibleSet(w)),
        None => Ok(()),
    }
}

/// f(x) = x^{-1} + 1_S(x).
pub fn build_f(set: &ElementSet) -> Result<Permutation, ConstructionError> {
    require_admissible(set)?;
    let ctx = set.ctx().clone();
    let table = ctx
        .elements()
        .map(|x| (ctx.inv(x).0) ^ set.indicator(x) as u32)
        .collect();
    Ok(Permutation::from_table(ctx, table)?)
}

/// g(x) = (x + 1_{S'}(x))^{-1} with S' = { x^{-1} + 1 : x in S }.
pub fn compositional_inverse(set: &ElementSet) -> Result<Permutation, ConstructionError> {
    require_admissible(set)?;
    let s_prime = set.s_prime();
    let ctx = set.ctx().clone();
    let table = ctx
        .elements()
        .map(|x| ctx.inv(Elem(x.0 ^ s_prime.indicator(x) as u32)).0)
        .collect();
    Ok(Permutation::from_table(ctx, table)?)
}

/// Which of the two criterion statements failed for a given a.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriterionCase {
    /// 1_S(a) = 1_S(0), 1_S(wa) = 1_S(w^2 a), and a root x of mu has 1_S(x+a) != 1_S(x).
    SameAsZero,
    /// 1_S(a) != 1_S(0), 1_S(wa) != 1_S(w^2 a), and a root x of mu has 1_S(x+a) = 1_S(x).
    DifferentFromZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub a: Elem,
    pub case: CriterionCase,
    /// The offending root of x^2 + a x + a^2/(1+a).
    pub witness: Elem,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CriterionReport {
    pub violations: Vec<Violation>,
}

impl CriterionReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// mu(x) = x^2 + a x + a^2/(1+a), for a not in {0, 1}.
pub fn mu_roots(ctx: &FieldCtx, a: Elem) -> crate::field::QuadraticRoots {
    let c = ctx.div(ctx.square(a), a + Elem::ONE);
    ctx.solve_quadratic(a, c)
}

/// Necessary and sufficient criterion for x^{-1} + 1_S(x) to be
/// differentially 4-uniform, checked for every a not in {0, 1}. All
/// violating a are reported.
pub fn uniformity_criterion(set: &ElementSet) -> Result<CriterionReport, ConstructionError> {
    require_admissible(set)?;
    let ctx = set.ctx();
    if ctx.n() % 2 == 1 {
        return Err(ConstructionError::OddDegree(ctx.n()));
    }
    let w = ctx.omega()?;
    let w2 = ctx.square(w);
    let zero_in = set.contains(Elem::ZERO);
    let mut violations = Vec::new();
    for a in ctx.elements().skip(2) {
        let same_as_zero = set.contains(a) == zero_in;
        let omega_pair_equal = set.contains(ctx.mul(w, a)) == set.contains(ctx.mul(w2, a));
        // Statement 1 needs the omega pair to agree, statement 2 needs it to differ.
        if omega_pair_equal != same_as_zero {
            continue;
        }
        let bad = mu_roots(ctx, a).roots().into_iter().find(|&x| {
            let switched = set.contains(x + a) != set.contains(x);
            switched == same_as_zero
        });
        if let Some(witness) = bad {
            violations.push(Violation {
                a,
                case: if same_as_zero {
                    CriterionCase::SameAsZero
                } else {
                    CriterionCase::DifferentFromZero
                },
                witness,
            });
        }
    }
    Ok(CriterionReport { violations })
}

/// Left side minus right side of the no-solution condition for S built from
/// x^q = x + t1, evaluated at every a outside GF(q); returns all roots found.
/// An empty result certifies the condition for this field.
pub fn affine_condition_roots(ctx: &FieldCtx, k: u32, t1: Elem) -> Result<Vec<Elem>, FieldError> {
    let q = 1i64 << k;
    let t2 = ctx.square(t1);
    let t4 = ctx.square(t2);
    let t2t = t2 + t1;
    let one_t = Elem::ONE + t1;
    let terms: [(Elem, i64); 13] = [
        (t4 + t2, 4 * q),
        (t2t, 4 * q - 1),
        (t2t, 4 * q - 2),
        (Elem::ONE, 4 * q - 3),
        (Elem::ONE, 4 * q - 4),
        (t2t, 3 * q),
        (t2, 3 * q - 1),
        (one_t, 3 * q - 2),
        (Elem::ONE, 3 * q - 3),
        (t2t, 2 * q),
        (one_t, 2 * q - 1),
        (Elem::ONE, q),
        (Elem::ONE, q - 1),
    ];
    let mut roots = Vec::new();
    for a in ctx.elements() {
        if ctx.in_subfield(k, a)? {
            continue;
        }
        let value = terms
            .iter()
            .fold(Elem::ONE, |acc, &(c, e)| acc + ctx.mul(c, ctx.pow(a, e)));
        if value.is_zero() {
            roots.push(a);
        }
    }
    Ok(roots)
}

/// How much verification a constructor runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckMode {
    /// Criterion checker and brute-force differential uniformity.
    #[default]
    Full,
    /// Criterion checker only.
    Fast,
}

/// The seven switching-set families, numbered as accepted by `--theorem`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Provenance {
    /// S = GF(2^k).
    Subfield { k: u32 },
    /// S closed under x -> x/(1+x) with Tr = 1 on S.
    TraceOneClosed { size: usize },
    /// S = GF(2^k1) ∪ GF(2^k2), both even.
    SubfieldUnion { k1: u32, k2: u32 },
    /// S = GF(8) ∪ GF(2^k1).
    CubicSubfieldUnion { k1: u32 },
    /// S = S1 ∪ (GF(2^k) \ GF(2^l)).
    TraceOneWithDifference { k: u32, l: u32, s1_size: usize },
    /// S = {w, w^2}, from x^2 = x + 1.
    OmegaPair,
    /// S = { x : x^{-4} = x^{-1} + 1 }.
    QuarticAffineInverse,
    /// Any admissible set supplied by the caller.
    Custom,
}

impl Provenance {
    /// Construction index 1..=7 (0 for custom sets).
    pub fn index(&self) -> u8 {
        match self {
            Provenance::Subfield { .. } => 1,
            Provenance::TraceOneClosed { .. } => 2,
            Provenance::SubfieldUnion { .. } => 3,
            Provenance::CubicSubfieldUnion { .. } => 4,
            Provenance::TraceOneWithDifference { .. } => 5,
            Provenance::OmegaPair => 6,
            Provenance::QuarticAffineInverse => 7,
            Provenance::Custom => 0,
        }
    }

    /// Set shape for the nonlinearity bounds.
    pub fn shape(&self, cardinality: usize) -> SetShape {
        match *self {
            Provenance::Subfield { k } => SetShape::Subfield { k },
            Provenance::SubfieldUnion { k1, k2 } => SetShape::SubfieldUnion { k1, k2 },
            Provenance::CubicSubfieldUnion { k1 } => SetShape::SubfieldUnion { k1: 3, k2: k1 },
            _ => SetShape::General { cardinality },
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Subfield { k } => write!(f, "F_2^{k}"),
            Provenance::TraceOneClosed { size } => write!(f, "S1 (|S1| = {size})"),
            Provenance::SubfieldUnion { k1, k2 } => write!(f, "F_2^{k1} u F_2^{k2}"),
            Provenance::CubicSubfieldUnion { k1 } => write!(f, "F_2^{k1} u F_2^3"),
            Provenance::TraceOneWithDifference { k, l, s1_size } => {
                if *s1_size == 0 {
                    write!(f, "F_2^{k} \\ F_2^{l}")
                } else {
                    write!(f, "S1 u (F_2^{k} \\ F_2^{l}) (|S1| = {s1_size})")
                }
            }
            Provenance::OmegaPair => write!(f, "{{w, w^2}}"),
            Provenance::QuarticAffineInverse => write!(f, "x^-4 + x^-1 = 1"),
            Provenance::Custom => write!(f, "custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub perm: Permutation,
    pub inverse: Permutation,
    pub set: ElementSet,
    pub provenance: Provenance,
    pub criterion: CriterionReport,
    /// Brute-force differential uniformity, when computed.
    pub uniformity: Option<u32>,
}

impl ConstructionResult {
    /// Both the criterion and brute-force uniformity 4 verified.
    pub fn checked(&self) -> bool {
        self.criterion.holds() && self.uniformity == Some(4)
    }

    pub fn shape(&self) -> SetShape {
        self.provenance.shape(self.set.len())
    }
}

/// Builds and certifies f for an admissible set.
pub fn certify(
    set: ElementSet,
    provenance: Provenance,
    mode: CheckMode,
) -> Result<ConstructionResult, ConstructionError> {
    let perm = build_f(&set)?;
    let inverse = compositional_inverse(&set)?;
    if !inverse.compose(&perm)?.is_identity() {
        return Err(ConstructionError::CertificationFailed(
            "compositional inverse does not invert f".into(),
        ));
    }
    let criterion = uniformity_criterion(&set)?;
    if !criterion.holds() {
        return Err(ConstructionError::CertificationFailed(format!(
            "{} criterion violations, first at a = {}",
            criterion.violations.len(),
            criterion.violations[0].a
        )));
    }
    let uniformity = match mode {
        CheckMode::Full => {
            let d = differential_uniformity_brute(&perm);
            if d != 4 {
                return Err(ConstructionError::CertificationFailed(format!(
                    "differential uniformity {d}, expected 4"
                )));
            }
            Some(d)
        }
        CheckMode::Fast => None,
    };
    Ok(ConstructionResult {
        perm,
        inverse,
        set,
        provenance,
        criterion,
        uniformity,
    })
}

fn require_even(ctx: &FieldCtx) -> Result<(), ConstructionError> {
    precondition(ctx.n() % 2 == 0, || format!("n = {} must be even", ctx.n()))
}

fn divides(k: u32, n: u32) -> bool {
    k != 0 && n % k == 0
}

/// Checks that S1 is a union of pairs {x, x/(1+x)} with Tr(x) = 1 throughout.
pub fn check_trace_one_closed(s1: &ElementSet) -> Result<(), ConstructionError> {
    let ctx = s1.ctx();
    for x in s1.iter() {
        precondition(ctx.trace(x) == 1, || {
            format!("Tr({x}) = 0 for an element of S1")
        })?;
        let y = closure_partner(ctx, x);
        precondition(s1.contains(y), || {
            format!("S1 contains {x} but not its partner {y}")
        })?;
    }
    Ok(())
}

/// S = GF(2^k); needs k even, or k in {1, 3} with n/2 odd.
pub fn subfield(
    ctx: &Arc<FieldCtx>,
    k: u32,
    mode: CheckMode,
) -> Result<ConstructionResult, ConstructionError> {
    require_even(ctx)?;
    let n = ctx.n();
    precondition(divides(k, n), || format!("k = {k} must divide n = {n}"))?;
    precondition(
        k % 2 == 0 || ((k == 1 || k == 3) && (n / 2) % 2 == 1),
        || format!("k = {k} must be even, or 1 or 3 with n/2 odd (n = {n})"),
    )?;
    certify(subfield_set(ctx, k)?, Provenance::Subfield { k }, mode)
}

/// S = S1 for a trace-one closed S1.
pub fn trace_one_closed(
    ctx: &Arc<FieldCtx>,
    s1: &ElementSet,
    mode: CheckMode,
) -> Result<ConstructionResult, ConstructionError> {
    require_even(ctx)?;
    precondition(s1.ctx() == ctx, || "S1 belongs to a different field".into())?;
    check_trace_one_closed(s1)?;
    certify(
        s1.clone(),
        Provenance::TraceOneClosed { size: s1.len() },
        mode,
    )
}

/// S = GF(2^k1) ∪ GF(2^k2) for even divisors k1, k2.
pub fn subfield_union(
    ctx: &Arc<FieldCtx>,
    k1: u32,
    k2: u32,
    mode: CheckMode,
) -> Result<ConstructionResult, ConstructionError> {
    require_even(ctx)?;
    let n = ctx.n();
    for k in [k1, k2] {
        precondition(divides(k, n) && k % 2 == 0, || {
            format!("{k} must be an even divisor of n = {n}")
        })?;
    }
    let set = subfield_set(ctx, k1)?.union(&subfield_set(ctx, k2)?)?;
    certify(set, Provenance::SubfieldUnion { k1, k2 }, mode)
}

/// S = GF(8) ∪ GF(2^k1); needs k1 an even divisor with gcd(3, k1) = 1, 6 | n, n/6 odd.
pub fn cubic_subfield_union(
    ctx: &Arc<FieldCtx>,
    k1: u32,
    mode: CheckMode,
) -> Result<ConstructionResult, ConstructionError> {
    require_even(ctx)?;
    let n = ctx.n();
    precondition(divides(k1, n) && k1 % 2 == 0 && gcd(3, k1) == 1, || {
        format!("k1 = {k1} must be an even divisor of n = {n} coprime to 3")
    })?;
    precondition(n % 6 == 0 && (n / 6) % 2 == 1, || {
        format!("need 6 | n and n/6 odd, got n = {n}")
    })?;
    let set = subfield_set(ctx, 3)?.union(&subfield_set(ctx, k1)?)?;
    certify(set, Provenance::CubicSubfieldUnion { k1 }, mode)
}

/// S = S1 ∪ (GF(2^k) \ GF(2^l)), S1 possibly empty.
///
/// Needs k even with n/k odd, l | k, and one of: l even; l = 1 with
/// k = 2 mod 4; l = 3 with k = 6.
pub fn trace_one_with_difference(
    ctx: &Arc<FieldCtx>,
    k: u32,
    l: u32,
    s1: &ElementSet,
    mode: CheckMode,
) -> Result<ConstructionResult, ConstructionError> {
    require_even(ctx)?;
    let n = ctx.n();
    precondition(divides(k, n) && k % 2 == 0 && (n / k) % 2 == 1, || {
        format!("k = {k} must be an even divisor of n = {n} with n/k odd")
    })?;
    precondition(divides(l, k), || format!("l = {l} must divide k = {k}"))?;
    precondition(
        l % 2 == 0 || (l == 1 && k % 4 == 2) || (l == 3 && k == 6),
        || format!("(k, l) = ({k}, {l}) needs l even, l = 1 with k = 2 mod 4, or (6, 3)"),
    )?;
    precondition(s1.ctx() == ctx, || "S1 belongs to a different field".into())?;
    check_trace_one_closed(s1)?;
    let diff = subfield_set(ctx, k)?.difference(&subfield_set(ctx, l)?)?;
    let set = s1.union(&diff)?;
    certify(
        set,
        Provenance::TraceOneWithDifference {
            k,
            l,
            s1_size: s1.len(),
        },
        mode,
    )
}

fn require_affine_condition(ctx: &FieldCtx, k: u32) -> Result<(), ConstructionError> {
    let roots = affine_condition_roots(ctx, k, Elem::ONE)?;
    if roots.is_empty() {
        Ok(())
    } else {
        Err(ConstructionError::CertificationFailed(format!(
            "{} roots of the no-solution condition outside GF(2^{k}), e.g. {}",
            roots.len(),
            roots[0]
        )))
    }
}

/// S = inverses of the solutions of x^2 = x + 1, i.e. {w, w^2}; needs n/2 odd.
pub fn omega_pair(
    ctx: &Arc<FieldCtx>,
    mode: CheckMode,
) -> Result<ConstructionResult, ConstructionError> {
    require_even(ctx)?;
    let n = ctx.n();
    precondition((n / 2) % 2 == 1, || format!("n/2 must be odd, got n = {n}"))?;
    require_affine_condition(ctx, 1)?;
    let set = affine_inverse_set(ctx, 1, Elem::ONE)?;
    certify(set, Provenance::OmegaPair, mode)
}

/// S = { x : x^{-4} = x^{-1} + 1 }; needs gcd(n, 5) = 1 and n/4 odd.
pub fn quartic_affine_inverse(
    ctx: &Arc<FieldCtx>,
    mode: CheckMode,
) -> Result<ConstructionResult, ConstructionError> {
    let n = ctx.n();
    precondition(gcd(n, 5) == 1, || {
        format!("gcd(n, 5) must be 1, got n = {n}")
    })?;
    precondition(n % 4 == 0 && (n / 4) % 2 == 1, || {
        format!("n/4 must be an odd integer, got n = {n}")
    })?;
    require_affine_condition(ctx, 2)?;
    let set = affine_inverse_set(ctx, 2, Elem::ONE)?;
    certify(set, Provenance::QuarticAffineInverse, mode)
}

/// Parameters for dispatching by construction index.
#[derive(Debug, Clone, Default)]
pub struct BuildParams {
    pub k: Option<u32>,
    pub k1: Option<u32>,
    pub k2: Option<u32>,
    pub l: Option<u32>,
    pub s1: Option<ElementSet>,
}

/// Runs construction `index` (1..=7) with the given parameters.
pub fn build_by_index(
    ctx: &Arc<FieldCtx>,
    index: u8,
    params: &BuildParams,
    mode: CheckMode,
) -> Result<ConstructionResult, ConstructionError> {
    let need = |v: Option<u32>, name: &str| {
        v.ok_or_else(|| ConstructionError::PreconditionViolated(format!("missing --{name}")))
    };
    let empty = ElementSet::empty(ctx.clone());
    let s1 = params.s1.as_ref().unwrap_or(&empty);
    match index {
        1 => subfield(ctx, need(params.k, "k")?, mode),
        2 => trace_one_closed(ctx, s1, mode),
        3 => subfield_union(ctx, need(params.k1, "k1")?, need(params.k2, "k2")?, mode),
        4 => cubic_subfield_union(ctx, need(params.k1.or(params.k), "k1")?, mode),
        5 => trace_one_with_difference(ctx, need(params.k, "k")?, need(params.l, "l")?, s1, mode),
        6 => omega_pair(ctx, mode),
        7 => quartic_affine_inverse(ctx, mode),
        other => Err(ConstructionError::PreconditionViolated(format!(
            "construction index {other} outside 1..=7"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;
    use crate::spectral::diff_spectrum;
    use crate::subset::trace_one_closure_pairs;

    fn ctx(n: u32) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::with_default(n).unwrap())
    }

    fn omega_set(c: &Arc<FieldCtx>) -> ElementSet {
        let w = c.omega().unwrap();
        ElementSet::from_elements(c.clone(), [w.0, c.square(w).0]).unwrap()
    }

    #[test]
    fn build_f_direct_values() {
        let c = ctx(6);
        let f = build_f(&subfield_set(&c, 1).unwrap()).unwrap();
        assert_eq!(f.apply(Elem::ZERO), Elem::ONE);
        assert_eq!(f.apply(Elem::ONE), Elem::ZERO);
        let f = build_f(&ElementSet::empty(c.clone())).unwrap();
        assert_eq!(f, Permutation::inverse_function(c.clone()));
        let w = c.omega().unwrap();
        let f = build_f(&omega_set(&c)).unwrap();
        assert_eq!(f.apply(w), w);
        let bad = ElementSet::from_elements(c.clone(), [w.0]).unwrap();
        assert_eq!(build_f(&bad), Err(ConstructionError::InadmissibleSet(w)));
    }

    #[test]
    fn compositional_inverse_cases() {
        let c = ctx(6);
        let empty = ElementSet::empty(c.clone());
        assert_eq!(
            compositional_inverse(&empty).unwrap(),
            Permutation::inverse_function(c.clone())
        );
        let f2 = subfield_set(&c, 1).unwrap();
        let g = compositional_inverse(&f2).unwrap();
        let f = build_f(&f2).unwrap();
        assert_eq!(g, f.invert());
        assert!(f.compose(&g).unwrap().is_identity());
        assert!(g.compose(&f).unwrap().is_identity());
    }

    #[test]
    fn criterion_on_known_sets() {
        let c = ctx(6);
        assert!(uniformity_criterion(&subfield_set(&c, 2).unwrap())
            .unwrap()
            .holds());
        assert!(uniformity_criterion(&omega_set(&c)).unwrap().holds());
        let odd = Arc::new(FieldCtx::new(5, 0b100101).unwrap());
        assert_eq!(
            uniformity_criterion(&ElementSet::empty(odd)),
            Err(ConstructionError::OddDegree(5))
        );
    }

    #[test]
    fn criterion_agrees_with_brute_force_on_failing_set() {
        let c = ctx(6);
        // GF(8) alone certifies; adding a further closure pair often breaks it.
        let base = subfield_set(&c, 3).unwrap();
        let mut found_failure = false;
        for x in c.elements().skip(2) {
            let y = closure_partner(&c, x);
            let s = base
                .union(&ElementSet::from_elements(c.clone(), [x.0, y.0]).unwrap())
                .unwrap();
            let report = uniformity_criterion(&s).unwrap();
            let d = differential_uniformity_brute(&build_f(&s).unwrap());
            assert_eq!(report.holds(), d <= 4, "x = {x}");
            if !report.holds() {
                found_failure = true;
                assert!(d > 4);
            }
        }
        assert!(found_failure);
    }

    #[test]
    fn family_preconditions() {
        let c12 = ctx(12);
        assert!(matches!(
            cubic_subfield_union(&c12, 2, CheckMode::Fast),
            Err(ConstructionError::PreconditionViolated(_))
        ));
        assert!(matches!(
            omega_pair(&c12, CheckMode::Fast),
            Err(ConstructionError::PreconditionViolated(_))
        ));
        let c10 = ctx(10);
        assert!(matches!(
            quartic_affine_inverse(&c10, CheckMode::Fast),
            Err(ConstructionError::PreconditionViolated(_))
        ));
        assert!(matches!(
            subfield(&c12, 3, CheckMode::Fast),
            Err(ConstructionError::PreconditionViolated(_))
        ));
        assert!(matches!(
            subfield(&c12, 5, CheckMode::Fast),
            Err(ConstructionError::PreconditionViolated(_))
        ));
        assert!(matches!(
            trace_one_with_difference(&c12, 6, 3, &ElementSet::empty(c12.clone()), CheckMode::Fast),
            Err(ConstructionError::PreconditionViolated(_))
        ));
        let c6 = ctx(6);
        let w = c6.omega().unwrap();
        let s1 = ElementSet::from_elements(c6.clone(), [w.0, c6.square(w).0]).unwrap();
        // Tr(w) = 1 in F_2^6 and {w, w^2} is closed, so this is a valid S1
        assert!(trace_one_closed(&c6, &s1, CheckMode::Full).is_ok());
        let wrong = subfield_set(&c6, 1).unwrap();
        assert!(matches!(
            trace_one_closed(&c6, &wrong, CheckMode::Fast),
            Err(ConstructionError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn small_families_certify_n6() {
        let c = ctx(6);
        for r in [
            subfield(&c, 1, CheckMode::Full),
            subfield(&c, 2, CheckMode::Full),
            subfield(&c, 3, CheckMode::Full),
            cubic_subfield_union(&c, 2, CheckMode::Full),
            trace_one_with_difference(&c, 2, 1, &ElementSet::empty(c.clone()), CheckMode::Full),
            omega_pair(&c, CheckMode::Full),
            trace_one_closed(&c, &ElementSet::empty(c.clone()), CheckMode::Full),
        ] {
            let r = r.unwrap();
            assert!(r.checked(), "{}", r.provenance);
            assert_eq!(r.perm.algebraic_degree(), 5);
        }
        let omega = omega_pair(&c, CheckMode::Fast).unwrap();
        assert_eq!(omega.set, omega_set(&c));
    }

    #[test]
    fn union_collapses_when_dividing() {
        let c = ctx(12);
        let u = subfield_union(&c, 2, 4, CheckMode::Fast).unwrap();
        let s = subfield(&c, 4, CheckMode::Fast).unwrap();
        assert_eq!(u.perm, s.perm);
    }

    #[test]
    fn affine_condition_scans() {
        assert!(affine_condition_roots(&ctx(6), 1, Elem::ONE)
            .unwrap()
            .is_empty());
        assert!(affine_condition_roots(&ctx(12), 2, Elem::ONE)
            .unwrap()
            .is_empty());
        let c4 = ctx(4);
        let roots = affine_condition_roots(&c4, 1, Elem::ONE).unwrap();
        assert_eq!(roots.len(), 4);
        for a in roots {
            assert_eq!(c4.pow(a, 5), Elem::ONE);
        }
    }

    #[test]
    fn quartic_set_size() {
        let c = ctx(12);
        let s = affine_inverse_set(&c, 2, Elem::ONE).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.is_admissible());
    }

    #[test]
    fn mu_roots_have_trace_zero_reciprocal_shift() {
        for n in [4, 6, 8] {
            let c = ctx(n);
            for a in c.elements().skip(2) {
                for x in mu_roots(&c, a).roots() {
                    assert_eq!(c.trace(c.inv(x + Elem::ONE)), 0, "n = {n}, a = {a}");
                }
            }
        }
    }

    #[test]
    fn subfield_union_closure_property() {
        let c = ctx(12);
        let s = subfield_set(&c, 4)
            .unwrap()
            .union(&subfield_set(&c, 6).unwrap())
            .unwrap();
        let members: Vec<Elem> = s.iter().collect();
        for &x in &members {
            for &y in &members {
                if s.contains(x + y) {
                    continue;
                }
                let lhs = c.div(c.square(y), Elem::ONE + y);
                let rhs = c.square(x) + c.mul(x, y);
                assert_ne!(s.contains(lhs), s.contains(rhs), "x = {x}, y = {y}");
            }
        }
    }

    #[test]
    fn omega_swap_invariance() {
        // Every shipped set contains w iff it contains w^2, so swapping the
        // labels leaves f unchanged.
        let c = ctx(6);
        let w = c.omega().unwrap();
        for r in [
            subfield(&c, 2, CheckMode::Fast).unwrap(),
            cubic_subfield_union(&c, 2, CheckMode::Fast).unwrap(),
            omega_pair(&c, CheckMode::Fast).unwrap(),
        ] {
            assert_eq!(r.set.contains(w), r.set.contains(c.square(w)));
            let swapped = ElementSet::from_predicate(c.clone(), |x| {
                let y = if x == w {
                    c.square(w)
                } else if x == c.square(w) {
                    w
                } else {
                    x
                };
                r.set.contains(y)
            });
            assert_eq!(build_f(&swapped).unwrap(), r.perm);
        }
    }

    #[test]
    fn trace_one_pairs_give_valid_sets() {
        let c = ctx(8);
        let pairs = trace_one_closure_pairs(&c);
        let s1 = ElementSet::from_elements(
            c.clone(),
            pairs.iter().step_by(3).flat_map(|(x, y)| [x.0, y.0]),
        )
        .unwrap();
        let r = trace_one_closed(&c, &s1, CheckMode::Full).unwrap();
        assert!(r.checked());
        assert_eq!(diff_spectrum(&r.perm).uniformity(), 4);
    }
}
