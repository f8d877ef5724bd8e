//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use switchbox::construct::{self, build_f, uniformity_criterion, CheckMode, ConstructionResult};
use switchbox::repro::{self, spectrum_mass_ok, RowStatus, TableRow};
use switchbox::spectral::{
    ccz_fingerprint, differential_uniformity_brute, fingerprints_differ, nl_bounds, subfield_sum,
    subfield_sum_floor, walsh_stats,
};
use switchbox::subset::{closure_partner, trace_one_closure_pairs};
use switchbox::{Elem, ElementSet, FieldCtx};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(
        elapsed <= limit,
        format!("{what} took {:.1?}, limit {:.0?}", elapsed, limit),
    )
}

fn table_exact(n: u32, rows: usize, limit: Duration) -> Check {
    let t = Instant::now();
    let table = repro::reproduce_table(n).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure(
        table.len() == rows,
        format!("{} rows, expected {rows}", table.len()),
    )?;
    for r in &table {
        ensure(
            r.status == RowStatus::Match,
            format!(
                "{}: NL {} spectrum {} is {}",
                r.set_label,
                r.nonlinearity,
                r.diff_spectrum.display(),
                r.status
            ),
        )?;
    }
    within(elapsed, limit, "table")?;
    let nls: Vec<u32> = table.iter().map(|r| r.nonlinearity).collect();
    Ok(format!("NL {nls:?}, {elapsed:.1?}"))
}

fn criterion_3() -> Check {
    let table = repro::reproduce_table(10).map_err(|e| e.to_string())?;
    ensure(table.len() == 3, "expected 3 rows")?;
    for i in [0, 2] {
        ensure(
            table[i].status == RowStatus::Match,
            format!("row {} is {}", i + 1, table[i].status),
        )?;
    }
    let r = &table[1];
    ensure(
        r.status == RowStatus::ErratumSuspect,
        format!("row 2 is {}", r.status),
    )?;
    ensure(
        r.published_spectrum.total_pairs() == 65280,
        "published row 2 mass is not 65280",
    )?;
    ensure(
        spectrum_mass_ok(10, &r.diff_spectrum),
        "computed row 2 violates the mass identities",
    )?;
    Ok(format!(
        "rows 1,3 MATCH; row 2 computed {} NL {}",
        r.diff_spectrum.display(),
        r.nonlinearity
    ))
}

fn criterion_4() -> Check {
    let t = Instant::now();
    let reports = repro::run_examples().map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let expected = [((1958, 1956), 42), ((1962, 1962), 34), ((1978, 1980), 4)];
    for (r, (nl, size)) in reports.iter().zip(expected) {
        ensure(
            (r.nl_with_difference, r.nl_s1_only) == nl,
            format!(
                "example {}: NL ({}, {})",
                r.example, r.nl_with_difference, r.nl_s1_only
            ),
        )?;
        ensure(
            r.s1_size == size,
            format!("example {}: |S1| = {}", r.example, r.s1_size),
        )?;
    }
    ensure(
        reports[2].union_is_difference,
        "example 3: S is not GF(16) \\ GF(4)",
    )?;
    within(elapsed, Duration::from_secs(30), "examples")?;
    Ok(format!(
        "(1958,1956) (1962,1962) (1978,1980), {elapsed:.1?}"
    ))
}

fn criterion_5() -> Check {
    let t = Instant::now();
    let ctx = FieldCtx::new(12, 0x1099).map_err(|e| e.to_string())?;
    let c = repro::count_trace_closure(&ctx);
    let elapsed = t.elapsed();
    ensure(c == 1036, format!("count {c}"))?;
    within(elapsed, Duration::from_secs(1), "count")?;
    Ok(format!("1036, {elapsed:.1?}"))
}

/// Admissible set from a choice of (0,1) membership and a subset of closure pairs.
fn admissible(
    ctx: &Arc<FieldCtx>,
    zero_one: bool,
    pairs: &[(Elem, Elem)],
    mask: impl Fn(usize) -> bool,
) -> ElementSet {
    let mut v: Vec<u32> = Vec::new();
    if zero_one {
        v.extend([0, 1]);
    }
    for (i, (x, y)) in pairs.iter().enumerate() {
        if mask(i) {
            v.extend([x.0, y.0]);
        }
    }
    ElementSet::from_elements(ctx.clone(), v).unwrap()
}

fn sigma_pairs(ctx: &FieldCtx) -> Vec<(Elem, Elem)> {
    ctx.elements()
        .filter(|x| x.0 > 1)
        .map(|x| (x, closure_partner(ctx, x)))
        .filter(|(x, y)| x < y)
        .collect()
}

fn criterion_6() -> Check {
    let mut tally = [0usize; 2];
    let mut check = |set: &ElementSet| -> Result<(), String> {
        let predicted = uniformity_criterion(set)
            .map_err(|e| e.to_string())?
            .holds();
        let actual = differential_uniformity_brute(&build_f(set).map_err(|e| e.to_string())?) <= 4;
        ensure(
            predicted == actual,
            format!("disagreement on S = {:?}", set.iter().collect::<Vec<_>>()),
        )?;
        tally[actual as usize] += 1;
        Ok(())
    };
    let c4 = Arc::new(FieldCtx::with_default(4).unwrap());
    let p4 = sigma_pairs(&c4);
    ensure(p4.len() == 7, "expected 7 closure pairs over GF(16)")?;
    let mut exhaustive = 0;
    for zero_one in [false, true] {
        for m in 0u32..1 << p4.len() {
            check(&admissible(&c4, zero_one, &p4, |i| m >> i & 1 == 1))?;
            exhaustive += 1;
        }
    }
    let c6 = Arc::new(FieldCtx::with_default(6).unwrap());
    let p6 = sigma_pairs(&c6);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1200 {
        // density varies so both outcomes occur
        let density: f64 = rng.gen::<f64>().powi(3);
        let bits: Vec<bool> = (0..p6.len()).map(|_| rng.gen_bool(density)).collect();
        check(&admissible(&c6, rng.gen(), &p6, |i| bits[i]))?;
    }
    Ok(format!(
        "{exhaustive} exhaustive (n=4) + 1200 random (n=6); {} at most 4-uniform, {} not; 0 disagreements",
        tally[1], tally[0]
    ))
}

fn constructions_under_test() -> Result<Vec<ConstructionResult>, String> {
    let mut out = Vec::new();
    let e = |e: switchbox::ConstructionError| e.to_string();
    for n in [6, 10, 12] {
        let ctx = repro::repro_field(n).map_err(|e| e.to_string())?;
        let empty = ElementSet::empty(ctx.clone());
        let ks: &[u32] = match n {
            6 => &[1, 2, 3],
            10 => &[1, 2],
            _ => &[2, 4, 6],
        };
        for &k in ks {
            out.push(construct::subfield(&ctx, k, CheckMode::Full).map_err(e)?);
        }
        if n != 12 {
            out.push(construct::omega_pair(&ctx, CheckMode::Full).map_err(e)?);
            out.push(
                construct::trace_one_with_difference(&ctx, 2, 1, &empty, CheckMode::Full)
                    .map_err(e)?,
            );
        }
        if n == 6 {
            out.push(construct::cubic_subfield_union(&ctx, 2, CheckMode::Full).map_err(e)?);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let pairs = trace_one_closure_pairs(&ctx);
        let s1 = repro::random_s1(&ctx, &pairs, &mut rng);
        out.push(construct::trace_one_closed(&ctx, &s1, CheckMode::Full).map_err(e)?);
        if n == 12 {
            out.push(construct::subfield_union(&ctx, 4, 6, CheckMode::Full).map_err(e)?);
            out.push(
                construct::trace_one_with_difference(&ctx, 4, 2, &empty, CheckMode::Full)
                    .map_err(e)?,
            );
            out.push(construct::quartic_affine_inverse(&ctx, CheckMode::Full).map_err(e)?);
            for ex in 1..=3 {
                let (_, s1) = repro::example_set(&ctx, ex).map_err(|e| e.to_string())?;
                out.push(construct::trace_one_closed(&ctx, &s1, CheckMode::Full).map_err(e)?);
                out.push(
                    construct::trace_one_with_difference(&ctx, 4, 2, &s1, CheckMode::Full)
                        .map_err(e)?,
                );
            }
        }
    }
    Ok(out)
}

fn criterion_7() -> Check {
    let all = constructions_under_test()?;
    for r in &all {
        let n = r.perm.ctx().n();
        let label = format!("n={n} {}", r.provenance);
        let mut sorted = r.perm.table().to_vec();
        sorted.sort_unstable();
        ensure(
            sorted.iter().enumerate().all(|(i, &v)| v == i as u32),
            format!("{label}: not bijective"),
        )?;
        ensure(
            r.inverse.compose(&r.perm).unwrap().is_identity(),
            format!("{label}: g(f(x)) != x"),
        )?;
        ensure(
            r.perm.algebraic_degree() == n - 1,
            format!("{label}: degree {}", r.perm.algebraic_degree()),
        )?;
        ensure(
            repro::structural_invariants_hold(r),
            format!("{label}: mass/Parseval/uniformity"),
        )?;
        let b = nl_bounds(n, r.shape()).unwrap();
        let nl = walsh_stats(&r.perm).nonlinearity as i64;
        ensure(
            nl >= b.best,
            format!("{label}: NL {nl} below bound {}", b.best),
        )?;
    }
    Ok(format!(
        "{} constructions at n = 6, 10, 12, 0 violations",
        all.len()
    ))
}

fn criterion_8() -> Check {
    let t = Instant::now();
    for n in [4u32, 6, 8] {
        let ctx = FieldCtx::with_default(n).unwrap();
        let r = 1i64 << (n / 2 + 1);
        let values: std::collections::BTreeSet<i64> =
            ctx.elements().map(|l| ctx.kloosterman(l)).collect();
        ensure(ctx.kloosterman(Elem::ZERO) == 0, "K(0) != 0")?;
        let expected: std::collections::BTreeSet<i64> =
            (-r + 1..=r + 1).filter(|t| t.rem_euclid(4) == 0).collect();
        ensure(values == expected, format!("n={n}: value set {values:?}"))?;
    }
    within(t.elapsed(), Duration::from_secs(5), "Kloosterman scan")?;
    Ok("value sets are exactly the multiples of 4 in range for n = 4, 6, 8".into())
}

fn criterion_9() -> Check {
    let ctx = FieldCtx::with_default(6).unwrap();
    let mut checked = 0;
    for k in [1, 2, 3] {
        let floor = subfield_sum_floor(k);
        let mut worst = 0;
        for b in ctx.elements().filter(|&b| ctx.trace(b) == 1) {
            for a in ctx.elements() {
                let s = subfield_sum(&ctx, k, a, b).map_err(|e| e.to_string())?;
                worst = worst.max(s.abs());
                checked += 1;
            }
        }
        ensure(
            worst <= floor,
            format!("k={k}: |sum| reaches {worst} > {floor}"),
        )?;
    }
    Ok(format!("{checked} (k, a, b) triples within the floors"))
}

fn criterion_10() -> Check {
    let t = Instant::now();
    let stats = repro::sample_random_s1(200, 0).map_err(|e| e.to_string())?;
    let (a2, a5) = (stats.s1_only.average(), stats.with_difference.average());
    let summary = format!(
        "S1 avg {a2:.3} [{}, {}], S1 u (F16\\F4) avg {a5:.3} [{}, {}], {:.1?}",
        stats.s1_only.min,
        stats.s1_only.max,
        stats.with_difference.min,
        stats.with_difference.max,
        t.elapsed()
    );
    let in_band = |lo: u32, hi: u32| lo >= 1850 && hi <= 1990;
    ensure(
        (a2 - 1911.106).abs() <= 10.0,
        format!("S1 average off: {summary}"),
    )?;
    ensure(
        (a5 - 1910.264).abs() <= 10.0,
        format!("union average off: {summary}"),
    )?;
    ensure(
        in_band(stats.s1_only.min, stats.s1_only.max),
        format!("S1 NL outside band: {summary}"),
    )?;
    ensure(
        in_band(stats.with_difference.min, stats.with_difference.max),
        format!("union NL outside band: {summary}"),
    )?;
    Ok(summary)
}

fn published_differs(a: &TableRow, b: &TableRow) -> bool {
    a.status != RowStatus::ErratumSuspect
        && b.status != RowStatus::ErratumSuspect
        && (a.published_nl != b.published_nl || a.published_spectrum != b.published_spectrum)
}

fn criterion_11() -> Check {
    let mut compared = 0;
    for n in [6, 10, 12] {
        let ctx = repro::repro_field(n).map_err(|e| e.to_string())?;
        let rows = repro::reproduce_table(n).map_err(|e| e.to_string())?;
        let build = |r: &TableRow| -> Result<switchbox::Permutation, String> {
            let e = |e: switchbox::ConstructionError| e.to_string();
            let empty = ElementSet::empty(ctx.clone());
            Ok(match r.set_label.as_str() {
                "F_2" => construct::subfield(&ctx, 1, CheckMode::Fast),
                "F_2^2" => construct::subfield(&ctx, 2, CheckMode::Fast),
                "F_2^3" => construct::subfield(&ctx, 3, CheckMode::Fast),
                "F_2^4" => construct::subfield(&ctx, 4, CheckMode::Fast),
                "F_2^6" => construct::subfield(&ctx, 6, CheckMode::Fast),
                "F_2^2 u F_2^3" => construct::cubic_subfield_union(&ctx, 2, CheckMode::Fast),
                "F_2^4 u F_2^6" => construct::subfield_union(&ctx, 4, 6, CheckMode::Fast),
                "F_2^2 \\ F_2" => construct::omega_pair(&ctx, CheckMode::Fast),
                "F_2^4 \\ F_2^2" => {
                    construct::trace_one_with_difference(&ctx, 4, 2, &empty, CheckMode::Fast)
                }
                "x^-4 + x^-1 = 1" => construct::quartic_affine_inverse(&ctx, CheckMode::Fast),
                other => return Err(format!("unknown row {other}")),
            }
            .map_err(e)?
            .perm)
        };
        let (base, others): (Vec<&TableRow>, Vec<&TableRow>) =
            rows.iter().partition(|r| r.construction == "1");
        for o in &others {
            let fo = ccz_fingerprint(&build(o)?);
            for b in &base {
                if published_differs(o, b) {
                    let fb = ccz_fingerprint(&build(b)?);
                    ensure(
                        fingerprints_differ(&fo, &fb).unwrap(),
                        format!(
                            "n={n}: {} indistinguishable from {}",
                            o.set_label, b.set_label
                        ),
                    )?;
                    compared += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..20 {
        let n = [6, 8, 6, 10][i % 4];
        let ctx = Arc::new(FieldCtx::with_default(n).unwrap());
        let pairs = trace_one_closure_pairs(&ctx);
        let s1 = repro::random_s1(&ctx, &pairs, &mut rng);
        let r = if i % 4 < 2 {
            construct::trace_one_closed(&ctx, &s1, CheckMode::Fast)
        } else {
            construct::trace_one_with_difference(&ctx, 2, 1, &s1, CheckMode::Fast)
        }
        .map_err(|e| e.to_string())?;
        ensure(
            ccz_fingerprint(&r.perm) == ccz_fingerprint(&r.perm.invert()),
            format!("sample {i}: fingerprint changes under inversion"),
        )?;
    }
    Ok(format!(
        "{compared} pairs separated; 20 random constructions invariant under inversion"
    ))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Check)> = vec![
        ("1 n=6 table exact", || {
            table_exact(6, 5, Duration::from_secs(5))
        }),
        ("2 n=12 table exact", || {
            table_exact(12, 6, Duration::from_secs(300))
        }),
        ("3 n=10 table with suspect row", criterion_3),
        ("4 worked examples", criterion_4),
        ("5 trace-closure count", criterion_5),
        ("6 criterion vs brute force", criterion_6),
        ("7 structural invariants", criterion_7),
        ("8 Kloosterman value set", criterion_8),
        ("9 subfield sum floors", criterion_9),
        ("10 random-S1 statistics", criterion_10),
        ("11 CCZ fingerprints", criterion_11),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
