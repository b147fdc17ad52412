//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hrflow::blowup::{blowup_options, soliton_limit, SolitonLimit};
use hrflow::catalog;
use hrflow::classify::{analyze, AncientType, ForwardOutcome, SingularType};
use hrflow::einstein::{critical_directions, einstein_roots};
use hrflow::flow::{integrate, rhs_two, IntegrationOptions, MetricState, Termination};
use hrflow::poly;
use hrflow::space::FlowCoefficients;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn coeffs(space: &hrflow::space::TwoSummandSpace) -> FlowCoefficients {
    FlowCoefficients::derive(space).unwrap()
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn relative_spread(v: &[f64]) -> f64 {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (max - min) / min.abs().max(max.abs())
}

fn su42_nonexistence() -> Outcome {
    let start = Instant::now();
    let raw = catalog::su42_exact();
    let [a, b, c, d] = raw.nonmax_formulas();
    let disc = raw.einstein_discriminant();
    let es = einstein_roots(&coeffs(&catalog::su42()));
    let elapsed = start.elapsed();
    ensure!(a == Ratio::new(1, 8), "A = {a}");
    ensure!(b == Ratio::new(7, 20), "B = {b}");
    ensure!(c == Ratio::new(27, 40), "C = {c}");
    ensure!(d == Ratio::from_integer(1), "D = {d}");
    ensure!(disc == Ratio::new(-113, 400), "discriminant {disc}");
    ensure!(es.is_empty(), "Einstein set {:?}", es.values());
    ensure!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
    Ok(format!("A=1/8 B=7/20 C=27/40 D=1, disc={disc}, no roots, {elapsed:?}"))
}

fn su42_dynamics() -> Outcome {
    let start = Instant::now();
    let c = coeffs(&catalog::su42());
    let mut min_x2 = f64::INFINITY;
    for y0 in log_spaced(0.05, 20.0, 20) {
        let a = analyze(&c, MetricState::from_ratio(y0, 1.0), &IntegrationOptions::default())
            .map_err(|e| format!("y0={y0}: {e}"))?;
        let fwd = &a.forward;
        ensure!(fwd.termination == Termination::CollapseX1, "y0={y0}: forward {:?}", fwd.termination);
        let x2 = fwd.last().state.x2;
        ensure!(x2 > 0.0, "y0={y0}: x2(T) = {x2}");
        min_x2 = min_x2.min(x2);
        let ys = fwd.ratios();
        ensure!(
            ys.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)),
            "y0={y0}: y not monotone decreasing"
        );
        ensure!(
            a.report.singular_type == SingularType::TypeI,
            "y0={y0}: singular type {:?}",
            a.report.singular_type
        );
        let bwd = &a.backward;
        ensure!(bwd.termination == Termination::CollapseX2, "y0={y0}: backward {:?}", bwd.termination);
        let tau = bwd.elapsed(bwd.len() - 1);
        ensure!(tau.is_finite() && tau < 1e3, "y0={y0}: backward tau {tau}");
        ensure!(!a.report.ancient_exists, "y0={y0}: reported ancient");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("20 starts: CollapseX1 (min x2(T) = {min_x2:.4}), type I, backward CollapseX2, {elapsed:?}"))
}

fn fixed_directions() -> Outcome {
    let c = coeffs(&catalog::fix_a());
    let (d1, d2) = c.dims();
    let half_n = 0.5 * f64::from(d1 + d2);
    let mut notes = Vec::new();
    for (y0, k) in [(0.5, (1.25, 2.5)), (1.0, (2.0, 2.0))] {
        let scale = 2.0;
        let t = integrate(&c, MetricState::from_ratio(y0, scale), &IntegrationOptions::forward())
            .map_err(|e| e.to_string())?;
        ensure!(t.termination == Termination::CollapseBoth, "y0={y0}: {:?}", t.termination);
        let drift = t.ratios().iter().map(|y| (y - y0).abs()).fold(0.0, f64::max);
        ensure!(drift <= 1e-8, "y0={y0}: y drifted by {drift:e}");
        let (s0, s1) = (t.first().state, t.last().state);
        let slope1 = -(s1.x1 - s0.x1) / (s1.t - s0.t);
        let slope2 = -(s1.x2 - s0.x2) / (s1.t - s0.t);
        ensure!(
            (slope1 - k.0).abs() <= 1e-6 && (slope2 - k.1).abs() <= 1e-6,
            "y0={y0}: slopes ({slope1}, {slope2}) vs {k:?}"
        );
        let t_sing = t.t_estimate.ok_or("no T estimate")?;
        let last_gap = t_sing - s1.t;
        for s in t.samples.iter().filter(|s| t_sing - s.state.t <= 10.0 * last_gap) {
            let v = (t_sing - s.state.t) * s.r;
            ensure!((v - half_n).abs() <= 0.01 * half_n, "y0={y0}: (T-t)R = {v}");
        }
        notes.push(format!("y0={y0} drift {drift:.1e} slopes ({slope1:.9}, {slope2:.9})"));
    }
    Ok(format!("{}; (T-t)R -> {half_n}", notes.join("; ")))
}

fn first_integrals() -> Outcome {
    let mut notes = Vec::new();
    for (space, ys) in [(catalog::fix_a(), vec![0.2, 0.75, 2.0]), (catalog::fix_b(), vec![0.2, 0.9, 3.0])] {
        let c = coeffs(&space);
        for y0 in ys {
            let opts = IntegrationOptions {
                rel_tol: 1e-10,
                ..IntegrationOptions::forward()
            };
            let t = integrate(&c, MetricState::from_ratio(y0, 1.0), &opts).map_err(|e| e.to_string())?;
            let t_sing = t.t_estimate.ok_or("no T estimate")?;
            let with: Vec<_> = t
                .samples
                .iter()
                .filter_map(|s| s.first_integral.map(|v| (t_sing - s.state.t, v)))
                .collect();
            ensure!(with.len() >= 10, "{} y0={y0}: {} defined values", space.name(), with.len());
            let decades = (with[0].0 / with.last().unwrap().0).log10();
            ensure!(decades >= 3.0, "{} y0={y0}: only {decades:.1} decades", space.name());
            let values: Vec<f64> = with.iter().map(|p| p.1).collect();
            let spread = relative_spread(&values);
            ensure!(spread < 1e-6, "{} y0={y0}: first integral varies by {spread:e}", space.name());
            notes.push(format!("{} y0={y0}: {spread:.1e} over {decades:.1} dec", space.name()));
        }
    }
    Ok(notes.join("; "))
}

fn connecting_orbit() -> Outcome {
    let c = coeffs(&catalog::fix_a());
    let mut notes = Vec::new();
    for scale in [1.0, 1e-4] {
        let a = analyze(&c, MetricState::from_ratio(0.75, scale), &IntegrationOptions::default())
            .map_err(|e| e.to_string())?;
        let r = &a.report;
        ensure!(a.backward.termination == Termination::HorizonReached, "backward {:?}", a.backward.termination);
        let tau = a.backward.elapsed(a.backward.len() - 1);
        ensure!((tau - 1e3).abs() < 1e-9, "horizon tau = {tau}");
        let fy = r.forward_y_limit.ok_or("no forward limit")?;
        let by = r.backward_y_limit.ok_or("no backward limit")?;
        ensure!((fy - 1.0).abs() <= 1e-3, "forward limit {fy}");
        ensure!((by - 0.5).abs() <= 1e-3, "backward limit {by}");
        ensure!(r.ancient_exists && r.ancient_type == Some(AncientType::TypeI), "ancient {:?}", r.ancient_type);
        let fy_raw = a.forward.last().state.y();
        let by_raw = a.backward.last().state.y();
        notes.push(format!("scale {scale}: limits ({fy:.6}, {by:.6}), raw y at T and at tau=1e3 ({fy_raw:.6}, {by_raw:.6})"));
        // The raw ends are checked where the run is long enough in log time:
        // forward from unit scale, backward from a small start.
        if scale == 1.0 {
            ensure!((fy_raw - 1.0).abs() <= 1e-3, "raw forward y {fy_raw}");
        } else {
            ensure!((by_raw - 0.5).abs() <= 1e-3, "raw backward y at tau=1e3: {by_raw}");
        }
    }
    Ok(notes.join("; "))
}

fn c0_type_two() -> Outcome {
    let c = coeffs(&catalog::c0_fixture());
    let a = analyze(&c, MetricState::from_ratio(0.5, 1.0), &IntegrationOptions::default())
        .map_err(|e| e.to_string())?;
    let b = &a.backward;
    ensure!(b.termination == Termination::HorizonReached, "backward {:?}", b.termination);
    let tau_end = b.elapsed(b.len() - 1);
    let idx: Vec<usize> = (1..b.len()).filter(|&i| b.elapsed(i) >= tau_end / 100.0).collect();
    ensure!(idx.len() >= 5, "{} samples in the final two decades", idx.len());
    let tk: Vec<f64> = idx.iter().map(|&i| b.elapsed(i) * b.samples[i].kappa).collect();
    let growth = tk.last().unwrap() / tk[0];
    ensure!(tk.windows(2).all(|w| w[1] >= w[0]), "|t| kappa not monotone");
    ensure!(growth > 10.0, "|t| kappa grew only {growth}x");
    let log_tau: Vec<f64> = idx.iter().map(|&i| b.elapsed(i).ln()).collect();
    let log_x1: Vec<f64> = idx.iter().map(|&i| b.samples[i].state.x1.ln()).collect();
    let log_x2: Vec<f64> = idx.iter().map(|&i| b.samples[i].state.x2.ln()).collect();
    let e1 = common::slope(&log_tau, &log_x1);
    let e2 = common::slope(&log_tau, &log_x2);
    ensure!(e1.abs() <= 0.1, "x1 exponent {e1}");
    ensure!((e2 - 1.0).abs() <= 0.05, "x2 exponent {e2}");
    // d log x1 / d log |t| along the tail.
    let last = b.last().state;
    let (dx1, _) = rhs_two(&last, &c).map_err(|e| e.to_string())?;
    let log_rate = dx1.abs() * tau_end / last.x1;
    ensure!(log_rate <= 0.1, "x1' |t| / x1 = {log_rate}");
    ensure!(
        a.report.ancient_type == Some(AncientType::TypeII),
        "classified {:?}",
        a.report.ancient_type
    );
    Ok(format!(
        "|t|kappa x{growth:.1}, exponents x1 {e1:.4} x2 {e2:.4}, x1'|t|/x1 = {log_rate:.2e}, TypeII"
    ))
}

fn maximal_matrix() -> Outcome {
    let f_root = {
        let p = [-0.5, 3.5, -3.5, 1.0];
        let r = common::bisection_roots(&p, 1e-3, 10.0, 4000);
        ensure!(r.len() == 1, "oracle found {r:?} for FIX-F");
        r[0]
    };
    let e1_double = (7.0 + 7f64.sqrt()) / 6.0;
    let e2_double = (7.0 - 7f64.sqrt()) / 6.0;
    let (e1_single, e2_single) = (3.5 - 2.0 * e1_double, 3.5 - 2.0 * e2_double);
    // (space, y0, regime, forward limit, backward limit when ancient)
    let table = [
        (catalog::fix_d(), 0.3, "d1", 0.5, None),
        (catalog::fix_d(), 0.75, "d2", 0.5, Some(1.0)),
        (catalog::fix_d(), 1.5, "d3", 2.0, Some(1.0)),
        (catalog::fix_d(), 3.0, "d4", 2.0, None),
        (catalog::fix_e1(), 0.1, "e1", e1_single, None),
        (catalog::fix_e1(), 1.0, "e2", e1_single, Some(e1_double)),
        (catalog::fix_e1(), 3.0, "e3", e1_double, None),
        (catalog::fix_e2(), 0.3, "e4", e2_double, None),
        (catalog::fix_e2(), 1.0, "e5", e2_single, Some(e2_double)),
        (catalog::fix_e2(), 3.0, "e6", e2_single, None),
        (catalog::fix_f(), 0.05, "f", f_root, None),
        (catalog::fix_f(), 1.0, "f", f_root, None),
    ];
    for (space, y0, code, fwd, bwd) in table {
        let c = coeffs(&space);
        let a = analyze(&c, MetricState::from_ratio(y0, 1.0), &IntegrationOptions::default())
            .map_err(|e| format!("{code}: {e}"))?;
        let r = &a.report;
        ensure!(r.regime_code == code, "{} y0={y0}: regime {} vs {code}", space.name(), r.regime_code);
        ensure!(r.forward_outcome == ForwardOutcome::SimultaneousCollapse, "{code}: {:?}", r.forward_outcome);
        let fy = r.forward_y_limit.ok_or(format!("{code}: no forward limit"))?;
        ensure!((fy - fwd).abs() <= 1e-3, "{code}: forward limit {fy} vs {fwd}");
        ensure!(r.ancient_exists == bwd.is_some(), "{code}: ancient {}", r.ancient_exists);
        if let Some(b) = bwd {
            let by = r.backward_y_limit.ok_or(format!("{code}: no backward limit"))?;
            ensure!((by - b).abs() <= 1e-3, "{code}: backward limit {by} vs {b}");
            ensure!(r.ancient_type == Some(AncientType::TypeI), "{code}: {:?}", r.ancient_type);
        }
    }
    Ok("d1-d4, e1-e6, f match the outcome table".into())
}

fn invariant_regions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20241);
    let (mut trajectories, mut negative_starts, mut entered) = (0, 0, 0);
    for k in 0..100 {
        let space = if k < 50 { common::random_nonmax(&mut rng) } else { common::random_max(&mut rng) };
        let c = coeffs(&space);
        let inside: Box<dyn Fn(f64) -> bool> = match &c {
            FlowCoefficients::NonMaximal(n) => {
                let db = n.d / n.b;
                Box::new(move |y| y < db)
            }
            FlowCoefficients::Maximal(m) => {
                let cd = critical_directions(m);
                Box::new(move |y| cd.y_tilde_1 < y && y < cd.y_tilde_2)
            }
        };
        let y0 = (rng.random_range(-4.0f64..4.0)).exp();
        let t = integrate(&c, MetricState::from_ratio(y0, 1.0), &IntegrationOptions::forward())
            .map_err(|e| format!("space {k}: {e}"))?;
        trajectories += 1;
        let ys = t.ratios();
        if let Some(first) = ys.iter().position(|&y| inside(y)) {
            entered += 1;
            let leaves = ys[first..].iter().position(|&y| !inside(y));
            ensure!(leaves.is_none(), "space {k} y0={y0}: left the invariant region at sample {}", first + leaves.unwrap());
        }
        if t.first().r < 0.0 {
            negative_starts += 1;
            ensure!(t.samples.iter().any(|s| s.r > 0.0), "space {k} y0={y0}: R never turned positive");
        }
    }
    Ok(format!("{trajectories} runs, {entered} entered the region, 0 exits; {negative_starts} with R(0) < 0 all turned positive"))
}

fn root_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut count = [0usize; 2];
    for (kind, n) in count.iter_mut().enumerate() {
        for _ in 0..200 {
            let space = if kind == 0 { common::random_nonmax(&mut rng) } else { common::random_max(&mut rng) };
            let c = coeffs(&space);
            let p: Vec<f64> = match &c {
                FlowCoefficients::NonMaximal(n) => vec![n.c, -n.d, n.a + n.b],
                FlowCoefficients::Maximal(m) => m.einstein_cubic().to_vec(),
            };
            let got = einstein_roots(&c).values();
            let bound = 1.0 + p[..p.len() - 1].iter().map(|v| (v / p[p.len() - 1]).abs()).fold(0.0, f64::max);
            let oracle = common::bisection_roots(&p, 1e-9, bound, 20_000);
            // Simple roots only; a double root has no sign change.
            if got.len() != oracle.len() {
                let double = einstein_roots(&c).roots.iter().any(|r| r.multiplicity > 1);
                ensure!(double, "kind {kind}: roots {got:?} vs oracle {oracle:?} for {p:?}");
                continue;
            }
            for (g, o) in got.iter().zip(&oracle) {
                let err = (g - o).abs() / o.abs().max(1.0);
                worst = worst.max(err);
                ensure!(err <= 1e-9, "kind {kind}: root {g} vs oracle {o}");
            }
            if kind == 1 {
                ensure!(!got.is_empty(), "maximal cubic without positive root: {p:?}");
                let all = poly::real_roots(&p, poly::MERGE_TOL);
                ensure!(all.iter().all(|r| r.value > 0.0), "maximal cubic has a nonpositive root: {all:?}");
                let neg = common::bisection_roots(&[p[0], -p[1], p[2], -p[3]], 1e-9, bound, 20_000);
                ensure!(neg.is_empty(), "oracle found negative roots {neg:?}");
            }
            *n += 1;
        }
    }
    Ok(format!("{} non-maximal, {} maximal sets; worst relative deviation {worst:.1e}", count[0], count[1]))
}

fn blowup_limits() -> Outcome {
    let c = coeffs(&catalog::fix_a());
    let es = einstein_roots(&c);
    let mut notes = Vec::new();
    for y0 in [0.6, 0.75, 0.9] {
        let t = integrate(&c, MetricState::from_ratio(y0, 1.0), &blowup_options()).map_err(|e| e.to_string())?;
        let a = analyze(&c, MetricState::from_ratio(y0, 1.0), &IntegrationOptions::default())
            .map_err(|e| e.to_string())?;
        let fy = a.report.forward_y_limit.ok_or("no forward limit")?;
        match soliton_limit(&t, &es).map_err(|e| format!("y0={y0}: {e}"))? {
            SolitonLimit::EinsteinPoint { rescaled, .. } => {
                let ratio = rescaled.0 / rescaled.1;
                ensure!((ratio - fy).abs() <= 1e-3, "y0={y0}: k1/k2 = {ratio} vs limit {fy}");
                notes.push(format!("y0={y0} k1/k2={ratio:.6}"));
            }
            other => return Err(format!("y0={y0}: {other:?}")),
        }
    }
    let c = coeffs(&catalog::su42());
    let t = integrate(&c, MetricState::from_ratio(1.0, 1.0), &blowup_options()).map_err(|e| e.to_string())?;
    match soliton_limit(&t, &einstein_roots(&c)).map_err(|e| e.to_string())? {
        SolitonLimit::RigidProduct { q, .. } => ensure!(q == 5, "q = {q}"),
        other => return Err(format!("SU42: {other:?}")),
    }
    Ok(format!("FIX-A EinsteinPoint ({}); SU42 RigidProduct q=5", notes.join(", ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("SU(4)/SU(2) has no invariant Einstein metric", su42_nonexistence),
        ("SU(4)/SU(2) fibre collapse, no ancient solutions", su42_dynamics),
        ("Einstein fixed directions", fixed_directions),
        ("first-integral conservation", first_integrals),
        ("connecting orbit between Einstein directions", connecting_orbit),
        ("C = 0 type II ancient solution", c0_type_two),
        ("maximal-case outcome matrix", maximal_matrix),
        ("invariant regions and scalar-curvature sign", invariant_regions),
        ("root solver against bisection oracle", root_oracle),
        ("blow-up limits", blowup_limits),
    ];
    // Only the summary lines should reach the terminal.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
