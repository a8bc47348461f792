//! Acceptance suite. Each criterion runs in turn and prints one PASS/FAIL
//! line; the process fails if any criterion fails.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tangram_core::exactnum::{ExactValue, Scalar};
use tangram_core::geom::{hausdorff, intersection_area, iou, polygon_area, Point, Polygon};
use tangram_core::pipeline::{gen_task1, DistractorPool, normalize, normalize_pieces, snap_scalar, RawAssembly, SNAP_TOL};
use tangram_core::solver::{generate_instances, solve, GenerateConfig, SolveOutcome, SolverConfig, UnsatReason};
use tangram_core::tangram::{canonical_pieces, congruent_silhouettes, serialize_tce, tce_json, to_canonical_text, Outline, PieceState, TceInstance};
use tangram_core::verify::{aggregate, evaluate, evaluate_pieces, render_csv, VerificationRecord, VerifyConfig};
use tangram_harness::{score_task1, ResponseRecord};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const CORPUS_SEED: u64 = 20_240_601;

fn corpus(n: usize) -> &'static [TceInstance] {
    static CORPUS: OnceLock<Vec<TceInstance>> = OnceLock::new();
    let all = CORPUS.get_or_init(|| {
        let g = generate_instances(400, CORPUS_SEED, &GenerateConfig::default());
        assert!(g.warning.is_none(), "{:?}", g.warning);
        g.instances
    });
    &all[..n.min(all.len())]
}

fn ev(p: (i64, i64), q: (i64, i64)) -> ExactValue {
    ExactValue::from_parts(p, q)
}

fn int_outline(pts: &[(i64, i64)]) -> Outline {
    Outline::new(Polygon::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap())
}

fn square(x0: f64, y0: f64, s: f64) -> Polygon {
    Polygon::new(vec![Point::new(x0, y0), Point::new(x0 + s, y0), Point::new(x0 + s, y0 + s), Point::new(x0, y0 + s)]).unwrap()
}

// Fixed-point oracle with 256 fractional bits, built from integer square
// roots only.
const FRAC: u64 = 256;

struct Fixed {
    one: BigInt,
    sqrt2: BigInt,
}

impl Fixed {
    fn new() -> Self {
        let one = BigInt::one() << FRAC;
        let sqrt2 = (BigInt::from(2) << (2 * FRAC)).sqrt();
        Self { one, sqrt2 }
    }

    /// (p/q) + (r/s)√2 in fixed point.
    fn value(&self, p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) -> BigInt {
        (p * &self.one * s + r * &self.sqrt2 * q) / (q * s)
    }

    fn of(&self, v: &ExactValue) -> BigInt {
        let (a, b) = (v.rational_part(), v.radical_part());
        self.value(a.numer(), a.denom(), b.numer(), b.denom())
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b >> FRAC
    }

    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << FRAC) / b
    }
}

fn random_q2(rng: &mut ChaCha8Rng) -> ((i64, i64), (i64, i64)) {
    let part = |rng: &mut ChaCha8Rng| {
        if rng.random_ratio(1, 6) {
            (0, 1)
        } else {
            (rng.random_range(-1000..=1000), rng.random_range(1..=1000))
        }
    };
    (part(rng), part(rng))
}

fn exact_arithmetic() -> Outcome {
    let start = Instant::now();
    let fx = Fixed::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let to_fixed = |(p, r): ((i64, i64), (i64, i64))| fx.value(&BigInt::from(p.0), &BigInt::from(p.1), &BigInt::from(r.0), &BigInt::from(r.1));
    // Operands are ≤ 10^6 in magnitude and nonzero values are ≥ 10^-13, so a
    // 2^-200 band separates rounding noise from sign.
    let tol = |v: &BigInt| (v.abs() >> 180u32) + (BigInt::one() << (FRAC - 200));
    let ops = 100_000;
    for k in 0..ops {
        let (ca, cb) = (random_q2(&mut rng), random_q2(&mut rng));
        let (a, b) = (ev(ca.0, ca.1), ev(cb.0, cb.1));
        let (fa, fb) = (to_fixed(ca), to_fixed(cb));
        let (exact, oracle) = match k % 5 {
            0 => (&a + &b, &fa + &fb),
            1 => (&a - &b, &fa - &fb),
            2 => (&a * &b, fx.mul(&fa, &fb)),
            3 if !b.is_zero() => (&a / &b, fx.div(&fa, &fb)),
            _ => {
                let want = if (&fa - &fb).abs() <= tol(&fa) { std::cmp::Ordering::Equal } else { fa.cmp(&fb) };
                ensure!(a.cmp(&b) == want, "comparison of {a} and {b} disagrees with the oracle");
                let s = if fa.abs() <= tol(&fa) { 0 } else if fa.is_positive() { 1 } else { -1 };
                ensure!(a.signum() == s, "sign of {a} disagrees with the oracle");
                continue;
            }
        };
        let diff = (fx.of(&exact) - &oracle).abs();
        let band = tol(&oracle);
        ensure!(diff <= band, "op {k}: {a} ∘ {b} = {exact} disagrees with the oracle");
        let s = if oracle.abs() <= band { 0 } else if oracle.is_positive() { 1 } else { -1 };
        ensure!(exact.signum() == s, "op {k}: sign of {exact}");
    }
    let roots = 10_000;
    for _ in 0..roots {
        let (p, r) = random_q2(&mut rng);
        let x = ev(p, r);
        let got = (&x * &x).exact_sqrt().map_err(|e| format!("{e}"))?;
        ensure!(got.as_ref() == Some(&x.abs()), "exact_sqrt(({x})²) = {got:?}");
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 30.0, "took {secs:.1} s");
    Ok(format!("{ops} ops and {roots} square roots agree, {secs:.1} s"))
}

fn verifier_soundness() -> Outcome {
    let start = Instant::now();
    let cfg = VerifyConfig::default();
    ensure!(cfg.resolution == 0.01, "resolution is {}", cfg.resolution);
    let instances = corpus(200);
    ensure!(instances.len() >= 200, "only {} instances", instances.len());
    let records: Vec<VerificationRecord> = instances.iter().map(|i| evaluate(&i.instance_id, &serialize_tce(i), &i.target_outline, &cfg)).collect();
    let report = aggregate(&records).map_err(|e| e.to_string())?;
    ensure!(report.vpr == 100.0, "VPR {}", report.vpr);
    let worst_iou = records.iter().map(|r| r.iou).fold(f64::INFINITY, f64::min);
    let worst_hd = records.iter().map(|r| r.hausdorff).fold(0.0, f64::max);
    ensure!(worst_iou >= 1.0 - 1e-9, "IoU {worst_iou}");
    ensure!(worst_hd <= 0.005, "Hausdorff {worst_hd}");
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 120.0, "took {secs:.1} s");
    Ok(format!("{} instances, VPR 100, min IoU {worst_iou:.12}, max Hausdorff {worst_hd:.2e}, {secs:.1} s", records.len()))
}

fn translated(p: &PieceState, dx: &Scalar, dy: &Scalar) -> PieceState {
    PieceState::new(p.kind, p.polygon.translate(dx, dy))
}

fn scaled(p: &PieceState, f: &Scalar) -> PieceState {
    let o = &p.polygon.vertices()[0];
    let pts = p.polygon.vertices().iter().map(|v| Point { x: &o.x + &(&(&v.x - &o.x) * f), y: &o.y + &(&(&v.y - &o.y) * f) }).collect();
    PieceState::new(p.kind, Polygon::new(pts).unwrap())
}

fn mutation_detection() -> Outcome {
    let start = Instant::now();
    let cfg = VerifyConfig::default();
    let check = |i: &TceInstance, pieces: Vec<PieceState>| evaluate_pieces(&i.instance_id, pieces, Default::default(), &i.target_outline, &cfg);
    let factor = Scalar::Exact(ev((11, 10), (0, 1)));
    let mut counts = [0usize; 4];
    for (n, inst) in corpus(100).iter().enumerate() {
        let k = n % 7;
        let base = &inst.final_state;

        let mut deleted = base.clone();
        deleted.remove(k);
        let r = check(inst, deleted);
        ensure!(r.tse, "{}: deletion not flagged", inst.instance_id);
        counts[0] += 1;

        let mut grown = base.clone();
        grown[k] = scaled(&base[k], &factor);
        let r = check(inst, grown);
        ensure!(r.rge, "{}: scaling not flagged", inst.instance_id);
        counts[1] += 1;

        let j = (k + 1) % 7;
        let (ck, cj) = (base[k].polygon.vertex_centroid(), base[j].polygon.vertex_centroid());
        let mut stacked = base.clone();
        stacked[k] = translated(&base[k], &(&cj.x - &ck.x), &(&cj.y - &ck.y));
        let area = intersection_area(&stacked[k].polygon, &stacked[j].polygon).to_f64();
        ensure!(area > 1e-3, "{}: overlap mutant has area {area}", inst.instance_id);
        let r = check(inst, stacked);
        ensure!(r.pe && !r.pe_detail.overlap_pairs.is_empty(), "{}: overlap not flagged", inst.instance_id);
        counts[2] += 1;

        let ten = Scalar::from(10);
        let mut far = base.clone();
        far[k] = translated(&base[k], &ten, &Scalar::zero());
        let r = check(inst, far);
        ensure!(r.pe && r.pe_detail.component_count >= 2, "{}: detached piece not flagged", inst.instance_id);
        counts[3] += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(counts.iter().all(|&c| c >= 100), "mutant counts {counts:?}");
    ensure!(secs < 120.0, "took {secs:.1} s");
    Ok(format!("deleted/scaled/overlap/detached {counts:?} all flagged, {secs:.1} s"))
}

fn metric_fixtures() -> Outcome {
    let v = iou(&[square(0.0, 0.0, 1.0)], &square(0.5, 0.5, 1.0));
    ensure!((v - 1.0 / 7.0).abs() <= 1e-9, "IoU {v}");
    let h = hausdorff(&square(0.0, 0.0, 1.0).boundary(), &square(3.0, 0.0, 1.0).boundary(), 0.01);
    ensure!((h - 3.0).abs() <= 0.005, "Hausdorff {h}");
    let table = [(2, 1), (2, 1), (1, 1), (1, 2), (1, 2), (1, 1), (1, 1)];
    for (p, (num, den)) in canonical_pieces().iter().zip(table) {
        let a = polygon_area(&p.polygon);
        ensure!(a == Scalar::Exact(ev((num, den), (0, 1))), "{} area {a}", p.kind);
    }
    Ok(format!("IoU {v:.12}, Hausdorff {h:.4}, canonical areas exact"))
}

fn choice_fixture() -> (Vec<ResponseRecord>, HashMap<String, char>) {
    let letters = ['A', 'B', 'C', 'D'];
    let styles = ["The answer is {}.", "Answer: ({})", "option {}", "After comparing the outlines:\n{}", "It must be {}"];
    let mut keys = HashMap::new();
    let mut responses = Vec::new();
    for i in 0..20 {
        let id = format!("item-{i:02}");
        let key = letters[i % 4];
        keys.insert(id.clone(), key);
        let text = match i {
            0..13 => styles[i % styles.len()].replace("{}", &key.to_string()),
            13..17 => format!("The answer is {}.", letters[(i + 1) % 4]),
            _ => ["", "I cannot decide between A and C.", "None of these match."][i - 17].to_owned(),
        };
        responses.push(ResponseRecord::new(id, text, 1));
    }
    (responses, keys)
}

fn scoring() -> Outcome {
    let (responses, keys) = choice_fixture();
    let s = score_task1(&responses, &keys).map_err(|e| e.to_string())?;
    let (acc, invalid) = (format!("{:.2}", s.acc), format!("{:.2}", s.invalid));
    ensure!(acc == "65.00" && invalid == "15.00", "Acc {acc}, Invalid {invalid}");
    let inst = &corpus(1)[0];
    let record = evaluate(&inst.instance_id, &serialize_tce(inst), &inst.target_outline, &VerifyConfig::default());
    let report = aggregate(&[record]).map_err(|e| e.to_string())?;
    let csv = render_csv(&[("m".into(), report)]);
    let header = csv.lines().next().unwrap_or_default();
    ensure!(header == "TSE,RGE,PE,VPR,IoU,Hausdorff,Success", "CSV header {header}");
    Ok(format!("Acc {acc}, Invalid {invalid}, CSV columns {header}"))
}

fn pipeline_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let noise = Normal::new(0.0, 1e-4).unwrap();
    let instances = corpus(200);
    for inst in instances {
        let mut raw = RawAssembly::from_pieces(&inst.final_state).translate(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        for p in &mut raw.pieces {
            for v in &mut p.vertices {
                v[0] += noise.sample(&mut rng);
                v[1] += noise.sample(&mut rng);
            }
        }
        let out = normalize(&raw, SNAP_TOL, None).map_err(|e| format!("{}: {e}", inst.instance_id))?;
        ensure!(out.final_state == inst.final_state, "{}: normalized state differs", inst.instance_id);
        let again = normalize_pieces(out.final_state.clone(), Some(&out.instance_id)).map_err(|e| e.to_string())?;
        ensure!(to_canonical_text(&tce_json(&again)) == to_canonical_text(&tce_json(&out)), "{}: not idempotent", inst.instance_id);
    }
    let mut lattice = 0usize;
    for d in [1i64, 2, 4] {
        for a in -64i64..=64 {
            for b in -64i64..=64 {
                let want = ev((a, d), (b, d));
                let got = snap_scalar(want.to_f64(), SNAP_TOL).map_err(|e| e.to_string())?;
                ensure!(got == want, "({a} + {b}√2)/{d} snapped to {got}");
                lattice += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(format!("{} perturbed assemblies accepted and idempotent, {lattice} lattice values invert, {secs:.1} s", instances.len()))
}

fn solver() -> Outcome {
    let cfg = SolverConfig::default();
    let verify = VerifyConfig::default();
    let (z, s) = (ExactValue::zero(), ev((0, 1), (2, 1)));
    let big = Outline::new(Polygon::new(vec![Point::exact(z.clone(), z.clone()), Point::exact(s.clone(), z.clone()), Point::exact(s.clone(), s.clone()), Point::exact(z, s)]).unwrap());
    let rect = int_outline(&[(0, 0), (4, 0), (4, 2), (0, 2)]);
    let mut checked = 0;
    let mut times = Vec::new();
    for (name, target) in [("square", &big), ("rectangle", &rect)] {
        let start = Instant::now();
        let out = solve(target, &SolverConfig { find_all: true, ..cfg.clone() }).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        ensure!(secs < 60.0, "{name} took {secs:.1} s");
        let SolveOutcome::Solved { solutions, .. } = out else {
            return Err(format!("{name}: {out:?}"));
        };
        for sol in &solutions {
            let r = evaluate_pieces(name, sol.clone(), Default::default(), target, &verify);
            ensure!(r.vpr_pass && r.iou >= 1.0 - 1e-9 && r.hausdorff <= 0.005, "{name}: solution fails verification");
            checked += 1;
        }
        times.push(format!("{name} {secs:.2} s"));
    }
    let wrong_area = [
        int_outline(&[(0, 0), (7, 0), (7, 1), (0, 1)]),
        int_outline(&[(0, 0), (3, 0), (3, 3), (0, 3)]),
        int_outline(&[(0, 0), (2, 0), (2, 2), (0, 2)]),
        int_outline(&[(0, 0), (3, 0), (0, 3)]),
        int_outline(&[(0, 0), (5, 0), (5, 2), (0, 2)]),
    ];
    let mut slowest = Duration::ZERO;
    for t in &wrong_area {
        let start = Instant::now();
        let out = solve(t, &cfg).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        ensure!(matches!(out, SolveOutcome::Unsat { reason: UnsatReason::AreaMismatch, .. }), "area ≠ 8 target gave {out:?}");
    }
    ensure!(slowest < Duration::from_millis(100), "unsat took {slowest:?}");
    Ok(format!("{}, {checked} solutions verified, area ≠ 8 unsat in ≤ {:.3} ms", times.join(", "), slowest.as_secs_f64() * 1e3))
}

fn task1_generation() -> Outcome {
    let instances = corpus(400);
    ensure!(instances.len() == 400, "only {} instances", instances.len());
    let pool: Vec<(String, Outline)> = instances.iter().map(|i| (i.instance_id.clone(), i.target_outline.clone())).collect();
    let distractors = DistractorPool::new(&pool).map_err(|e| e.to_string())?;
    let by_id: HashMap<&str, &Outline> = pool.iter().map(|(id, o)| (id.as_str(), o)).collect();
    let mut freq: HashMap<char, usize> = HashMap::new();
    for inst in instances {
        let item = gen_task1(inst, &distractors, 99).map_err(|e| e.to_string())?;
        let congruent: Vec<char> = item
            .options
            .iter()
            .filter(|o| congruent_silhouettes(by_id[o.source_id.as_str()], &inst.target_outline).unwrap_or(false))
            .map(|o| o.label)
            .collect();
        ensure!(congruent == [item.answer], "{}: options congruent to the truth {congruent:?}, key {}", inst.instance_id, item.answer);
        *freq.entry(item.answer).or_default() += 1;
    }
    let mut shares = Vec::new();
    for label in ['A', 'B', 'C', 'D'] {
        let share = 100.0 * *freq.get(&label).unwrap_or(&0) as f64 / instances.len() as f64;
        ensure!((20.0..=30.0).contains(&share), "label {label} is the key in {share:.1}% of items");
        shares.push(format!("{label} {share:.1}%"));
    }
    Ok(format!("400 items with a unique correct option, keys {}", shares.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("exact arithmetic agrees with a 256-bit oracle", exact_arithmetic),
        ("verifier accepts every generated instance", verifier_soundness),
        ("mutants are detected", mutation_detection),
        ("metric fixtures", metric_fixtures),
        ("choice scoring fixture and report columns", scoring),
        ("pipeline round trip and snap inversion", pipeline_round_trip),
        ("solver targets and area refutation", solver),
        ("multiple-choice item generation", task1_generation),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} ({:.1} s)", start.elapsed().as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
