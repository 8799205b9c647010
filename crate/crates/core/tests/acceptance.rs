//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilmod::bracket::{
    degeneration_search, format_salamon, gl_action, jmap, parse_salamon, BracketError, DegenerationOutcome,
    LieBracket,
};
use nilmod::catalog::{ABELIAN6, SALAMON_LIST};
use nilmod::classify::{classify, structure_equations, IsoClass};
use nilmod::geometry::{curvature, curvature_table_d62, infinitesimal_rank, jacobi_operator, DEFAULT_RANK_SAMPLES};
use nilmod::moduli::{
    canonical_coeffs, canonicalize_tau, invariants, normalize_trace, normalized_invariants, random_jmap, retract,
    t_interval, ModuliPoint,
};
use nilmod::numerics::{self, Mat};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn parse(s: &str) -> LieBracket {
    parse_salamon(s).expect("catalog strings parse")
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let expected = [
        (SALAMON_LIST[0], IsoClass::N63),
        (SALAMON_LIST[1], IsoClass::H3C),
        (SALAMON_LIST[2], IsoClass::A12_14p23),
        (SALAMON_LIST[3], IsoClass::H3plusH3),
        (SALAMON_LIST[4], IsoClass::N5plusR),
        (SALAMON_LIST[5], IsoClass::H5plusR),
        (SALAMON_LIST[6], IsoClass::H3plusR3),
        (ABELIAN6, IsoClass::Abelian),
    ];
    let mut correct = 0;
    for (s, class) in expected {
        let got = classify(&parse(s)).map_err(|e| format!("{s}: {e}"))?;
        ensure(got.class == class, || format!("{s}: got {}, expected {}", got.class.name(), class.name()))?;
        correct += 1;
    }
    within(start.elapsed(), Duration::from_secs(1), "classification")?;
    Ok(format!("{correct}/8 exact in {:?}", start.elapsed()))
}

fn criterion_2() -> Check {
    let tol = 1e-9;
    let dots: [(&str, [f64; 5]); 5] = [
        ("(0,0,0,0,12,34)", [0.0, 1.0, 0.0, 1.0, 0.0]),
        ("(0,0,0,0,0,12)", [0.0, 1.0, 0.0, 1.0, 1.0]),
        ("(0,0,0,0,0,12+34)", [0.0, 2.0, 0.0, 0.0, 0.0]),
        ("(0,0,0,0,13+42,14+23)", [1.0, 1.0, 0.0, 0.0, 0.0]),
        ("(0,0,0,0,12,13)", [0.5, 0.5, 0.5, 0.5, 0.5]),
    ];
    let mut worst = 0.0_f64;
    for (s, tuple) in dots {
        let p = normalized_invariants(&parse(s)).map_err(|e| e.to_string())?;
        let target = ModuliPoint::new(tuple[0], tuple[1], tuple[2], tuple[3], tuple[4]);
        // equality up to exchanging the factors
        let d = p.distance(&target).min(p.distance(&target.swapped()));
        worst = worst.max(d);
        ensure(d <= tol, || format!("{s}: {:?} vs {tuple:?}", p.tuple()))?;
    }
    let p = normalized_invariants(&parse("(0,0,0,12,13,23)")).map_err(|e| e.to_string())?;
    let third = 1.0 / 3.0;
    let omega = p.omega.ok_or("no omega for the 3-dimensional commutator")?;
    for (name, v) in [("omega", omega), ("alpha", p.alpha_minus), ("beta", p.beta_minus), ("t", p.t)] {
        worst = worst.max((v - third).abs());
        ensure((v - third).abs() <= tol, || format!("(0,0,0,12,13,23): {name} = {v}"))?;
    }
    Ok(format!("6 dots, max deviation {worst:.1e}"))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let j = random_jmap(2, &mut rng).map_err(|e| e.to_string())?;
        let q = numerics::random_orthogonal_with(2, &mut rng);
        let r = numerics::random_orthogonal_with(4, &mut rng);
        let before = invariants(&j).map_err(|e| e.to_string())?;
        let after = invariants(&j.precompose(&q).conjugate(&r)).map_err(|e| e.to_string())?;
        worst = worst.max(before.distance(&after));
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    Ok(format!("1000 actions, max deviation {worst:.1e}"))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(400);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let mut v: [f64; 4] = [0.0; 4];
        v.iter_mut().for_each(|x| *x = rng.random_range(0.0..1.0));
        let (am, bm) = (v[0].min(v[1]), v[0].max(v[1]));
        let (ap, bp) = (v[2].min(v[3]), v[2].max(v[3]));
        let (lo, hi) = t_interval(am, bm, ap, bp);
        let t = rng.random_range(lo..=hi);
        let point = canonicalize_tau(&ModuliPoint::new(am, bm, ap, bp, t));
        let (lo, hi) = t_interval(point.alpha_minus, point.beta_minus, point.alpha_plus, point.beta_plus);
        ensure(point.t >= lo - 1e-10 && point.t <= hi + 1e-10, || format!("{point:?} outside its interval"))?;
        let f = canonical_coeffs(&point).map_err(|e| format!("{point:?}: {e}"))?;
        let back = invariants(&f.to_jmap()).map_err(|e| e.to_string())?;
        worst = worst.max(back.distance(&point));
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("10000 points, max deviation {worst:.1e}"))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut worst = 0.0_f64;
    let mut worst_sym = 0.0_f64;
    // listed equalities between table entries, 1-based
    let equal = [
        ((1, 2, 3, 4), (3, 4, 1, 2)),
        ((1, 3, 2, 4), (2, 4, 1, 3)),
        ((1, 4, 2, 3), (2, 3, 1, 4)),
        ((1, 4, 5, 6), (5, 6, 1, 4)),
        ((1, 5, 1, 5), (2, 5, 2, 5)),
        ((1, 5, 4, 6), (4, 6, 1, 5)),
        ((1, 6, 1, 6), (3, 6, 3, 6)),
        ((1, 6, 4, 5), (4, 5, 1, 6)),
        ((2, 3, 5, 6), (5, 6, 2, 3)),
        ((2, 5, 3, 6), (3, 6, 2, 5)),
        ((2, 6, 2, 6), (4, 6, 4, 6)),
        ((2, 6, 3, 5), (3, 5, 2, 6)),
        ((3, 5, 3, 5), (4, 5, 4, 5)),
    ];
    for _ in 0..100 {
        let v: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.5)).collect();
        let f = nilmod::moduli::CanonicalForm::new(v[0], v[1], v[2], v[3], 0.0);
        let c = structure_equations(&f).map_err(|e| e.to_string())?;
        let computed = curvature(&c).map_err(|e| e.to_string())?;
        let table = curvature_table_d62(&f);
        worst = worst.max(computed.max_abs_diff(&table));
        for ((i, j, h, k), (a, b, c2, d)) in equal {
            let x = computed.get(i - 1, j - 1, h - 1, k - 1);
            let y = computed.get(a - 1, b - 1, c2 - 1, d - 1);
            worst = worst.max((x - y).abs());
        }
        worst_sym = worst_sym.max(computed.pair_asymmetry()).max(computed.bianchi_defect());
    }
    ensure(worst <= 1e-12, || format!("table deviation {worst:e}"))?;
    ensure(worst_sym <= 1e-10, || format!("symmetry/Bianchi defect {worst_sym:e}"))?;
    Ok(format!("100 forms, table deviation {worst:.1e}, symmetry defect {worst_sym:.1e}"))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut worst = 0.0_f64;
    let mut literal = 0.0_f64;
    for _ in 0..20 {
        let f = common::random_isometric(&mut rng);
        let r = curvature(&structure_equations(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let cases: [(usize, usize, Mat, Mat); 2] = [
            (0, 5, common::corrected_e1_e6(&f), common::printed_e1_e6(&f)),
            (1, 4, common::corrected_e2_e5(&f), common::printed_e2_e5(&f)),
        ];
        for (i, j, corrected, printed) in cases {
            let mut v = DVector::zeros(6);
            v[i] = h;
            v[j] = h;
            let op = jacobi_operator(&r, &v).map_err(|e| e.to_string())?;
            // the printed matrices use the unnormalized base vector
            let scaled = op.matrix * 2.0;
            worst = worst.max(numerics::max_abs(&(&scaled - corrected)));
            literal = literal.max(numerics::max_abs(&(&scaled - printed)));
        }
    }
    ensure(worst <= 1e-10, || format!("deviation {worst:e}"))?;
    Ok(format!(
        "20 forms, deviation {worst:.1e} against the printed matrices with typographic fixes \
         (entry (5,4) of the first; column swap 5/6 and two squares in the second); \
         literal printed deviation {literal:.2}"
    ))
}

fn criterion_7() -> Check {
    let cases = [
        ("(0,0,0,0,12,34)", 2),
        ("(0,0,0,0,12,13)", 2),
        ("(0,0,0,0,13+42,14+23)", 1),
        ("(0,0,0,0,0,0)", 6),
    ];
    let mut parts = Vec::new();
    for (s, expect) in cases {
        let start = Instant::now();
        let res = infinitesimal_rank(&parse(s), DEFAULT_RANK_SAMPLES, 0).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure(res.rank == expect, || format!("{s}: rank {} expected {expect}", res.rank))?;
        within(elapsed, Duration::from_secs(5), s)?;
        parts.push(format!("{s}->{} ({} ms)", res.rank, elapsed.as_millis()));
    }
    Ok(parts.join(", "))
}

fn criterion_8() -> Check {
    let n5 = parse("(0,0,0,0,12,13)");
    let mut parts = Vec::new();
    for s in ["(0,0,0,0,13+42,14+23)", "(0,0,0,0,12,34)", "(0,0,0,0,12,14+23)"] {
        let c = parse(s);
        let start = Instant::now();
        let out = degeneration_search(&c, &n5, 3).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let w = out.witness().ok_or_else(|| format!("{s}: no witness"))?;
        // the family must actually converge to the target
        let moved = gl_action(&w.family_at(1e-6), &c).map_err(|e| e.to_string())?;
        ensure(moved.distance(&n5) < 1e-5, || format!("{s}: family misses the target"))?;
        within(elapsed, Duration::from_secs(5), s)?;
        parts.push(format!("{s} ({} ms)", elapsed.as_millis()));
    }
    for s in SALAMON_LIST.iter().chain([&ABELIAN6]) {
        let c = parse(s);
        let out = degeneration_search(&c, &c, 3).map_err(|e| e.to_string())?;
        ensure(matches!(&out, DegenerationOutcome::Witness(w) if w.is_identity()), || {
            format!("{s}: identity self-degeneration not found")
        })?;
    }
    Ok(format!("witnesses for {}; identity for all 8", parts.join(", ")))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    let mut inputs: Vec<LieBracket> = SALAMON_LIST.iter().map(|s| parse(s)).collect();
    for k in [2, 3] {
        for _ in 0..25 {
            let j = random_jmap(k, &mut rng).map_err(|e| e.to_string())?;
            inputs.push(j.to_bracket());
        }
    }
    let (mut count2, mut count3, mut worst) = (0, 0, 0.0_f64);
    for c in &inputs {
        let j = jmap(c).map_err(|e| e.to_string())?;
        if j.k() < 2 {
            continue;
        }
        let iso = jmap(&retract(c, 1.0).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if j.k() == 2 {
            let p = invariants(&normalize_trace(&iso, 2.0).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            worst = worst.max((p.alpha_minus + p.beta_plus - 1.0).abs()).max((p.alpha_plus + p.beta_minus - 1.0).abs());
            count2 += 1;
        } else {
            let p = invariants(&iso).map_err(|e| e.to_string())?;
            let omega = p.omega.ok_or("missing omega")?;
            for v in [omega, p.alpha_minus, p.beta_minus, p.alpha_plus, p.beta_plus] {
                worst = worst.max((v - 0.5).abs());
            }
            count3 += 1;
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("{count2} k=2 and {count3} k=3 retractions, max deviation {worst:.1e}"))
}

fn criterion_10() -> Check {
    for s in SALAMON_LIST.iter().chain([&ABELIAN6]) {
        let c = parse_salamon(s).map_err(|e| format!("{s}: {e}"))?;
        let back = format_salamon(&c).map_err(|e| format!("{s}: {e}"))?;
        let again = parse_salamon(&back).map_err(|e| format!("{back}: {e}"))?;
        ensure(again == c, || format!("{s} -> {back} does not round trip"))?;
    }
    for bad in ["(0,0,11)", "(0,0,17)"] {
        ensure(matches!(parse_salamon(bad), Err(BracketError::Parse { .. })), || {
            format!("{bad} was not rejected with a parse error")
        })?;
    }
    Ok("8 strings round trip, 2 malformed inputs rejected".into())
}

#[test]
fn all_criteria() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("classification table", criterion_1),
        ("figure dots", criterion_2),
        ("orthogonal invariance", criterion_3),
        ("reconstruction round trip", criterion_4),
        ("curvature table", criterion_5),
        ("Jacobi matrices", criterion_6),
        ("infinitesimal rank", criterion_7),
        ("degeneration witnesses", criterion_8),
        ("isometric retraction", criterion_9),
        ("parser goldens", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
