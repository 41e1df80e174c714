//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::sync::Arc;
use std::time::Instant;

use gooddeal::cases::{abs_penalty_measure, scaled_half_market, two_state_market};
use gooddeal::schema::MarketFile;
use gooddeal_core::diagnostics::{self, build_truncation, CheckOptions, TruncationKind};
use gooddeal_core::market::{conical_hull, Friction};
use gooddeal_core::risk::{
    axioms_check, penalty_rho0, restrict_conical, rho_hat0, superhedging_rho0, Entropic, IndifferencePrice, PenaltyTable,
    Restriction, RhoHat0, RiskMeasure, Shortfall, AXIOM_TOL,
};
use gooddeal_core::space::{luxemburg_norm, Claim, YoungFunction};
use gooddeal_core::{Density, Extended, MarketModel, SampleSpace, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg.into()) }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn opts() -> CheckOptions {
    CheckOptions::default()
}

fn half() -> SampleSpace {
    SampleSpace::uniform(2).unwrap()
}

fn fixtures() -> Vec<(String, MarketModel)> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let mut out: Vec<(String, MarketModel)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let m = MarketFile::load(path.to_str().unwrap()).unwrap().build().unwrap();
            (path.file_stem().unwrap().to_string_lossy().into_owned(), m)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    for kind in TruncationKind::ALL {
        let f = build_truncation(kind, 6).unwrap();
        out.push((format!("{}-6", kind.id()), f.market));
    }
    out
}

fn criterion_1() -> Outcome {
    let m = two_state_market();
    let mut worst = 0.0f64;
    for i in 0..=20 {
        let q = i as f64 / 20.0;
        let s = penalty_rho0(&m, &[q, 1.0 - q]).map_err(err)?.to_f64();
        worst = worst.max((s - (2.0 * q - 1.0).powi(2) / 4.0).abs());
    }
    ensure(worst <= 1e-9, format!("penalty grid error {worst:e}"))?;
    let x = [-0.5, 0.0];
    let r = rho_hat0(&m, &x).map_err(err)?.to_f64();
    ensure((r - 0.3125).abs() <= 1e-9, format!("rho_hat0(x) = {r}"))?;
    let rho = abs_penalty_measure();
    let v = rho.evaluate(&x).map_err(err)?.to_f64();
    ensure((v - 0.25).abs() <= 1e-9, format!("rho(x) = {v}"))?;
    let gdv = diagnostics::is_gdv(&rho, &m, &opts()).map_err(err)?;
    ensure(gdv.holds(), format!("is_gdv verdict {}", gdv.verdict.as_str()))?;
    let anchors: Vec<Vec<f64>> = [0.0, 0.5, 1.0].iter().map(|q| vec![*q, 1.0 - q]).collect();
    let id = diagnostics::penalty_identity_check(&rho, &m, &anchors, &[vec![0.25, 0.75]]).map_err(err)?;
    let gap = id.margin_of("anchor_gap").unwrap_or(f64::NAN);
    let defect = id.margin_of("convexity_defect").unwrap_or(f64::NAN);
    ensure(id.holds() && gap <= 1e-9 && defect > 1e-3, format!("penalty identity gap {gap:e}, defect {defect}"))?;
    Ok(format!("grid error {worst:.1e}, rho_hat0 {r}, rho {v}, is_gdv holds, defect at 1/4 {defect:.4}"))
}

fn criterion_2() -> Outcome {
    let m = scaled_half_market();
    let min = diagnostics::min_penalty(&m).map_err(err)?.value.to_f64();
    ensure((min - 0.5).abs() <= 1e-9, format!("min penalty {min}"))?;
    let r = rho_hat0(&m, &[0.0, 0.0]).map_err(err)?.to_f64();
    ensure((r + 0.5).abs() <= 1e-9, format!("rho_hat0(0) = {r}"))?;
    let (exists, _) = diagnostics::gdv_exists(&m).map_err(err)?;
    ensure(exists.verdict == Verdict::Fails, "gdv_exists does not fail")?;
    let (_, coherent) = diagnostics::coherent_gdv(&m, &opts()).map_err(err)?;
    ensure(coherent.is_none(), "coherent_gdv returned a measure")?;
    Ok(format!("min penalty {min}, rho_hat0(0) {r}, gdv_exists fails, coherent none"))
}

fn same(a: Extended, b: Extended, tol: f64) -> bool {
    match (a, b) {
        (Extended::Finite(x), Extended::Finite(y)) => (x - y).abs() <= tol,
        _ => a == b,
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut markets, mut claims, mut worst) = (0, 0, 0.0f64);
    for i in 0..240 {
        let n = rng.gen_range(1..=6);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let space = SampleSpace::from_weights(&weights).map_err(err)?;
        let j = rng.gen_range(0..=6);
        let gens: Vec<Vec<f64>> = (0..j).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let m = if i % 3 == 2 && j > 0 {
            let bounds = (0..j).map(|_| (-rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0))).collect();
            MarketModel::scaled_box(space, gens, bounds).map_err(err)?
        } else {
            MarketModel::polytope(space, gens).map_err(err)?
        };
        markets += 1;
        for _ in 0..12 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let a = superhedging_rho0(&m, &x).map_err(err)?;
            let b = rho_hat0(&m, &x).map_err(err)?;
            if let (Extended::Finite(p), Extended::Finite(q)) = (a, b) {
                worst = worst.max((p - q).abs());
            }
            ensure(same(a, b, 1e-7), format!("duality gap on {} market: rho0 {a:?}, rho_hat0 {b:?}", m.kind()))?;
            claims += 1;
        }
    }
    let mut illiquid = 0;
    for _ in 0..220 {
        let n = rng.gen_range(1..=5);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let friction = if rng.gen_bool(0.5) {
            Friction::Quadratic { c: rng.gen_range(0.1..3.0) }
        } else {
            Friction::Exponential { c: rng.gen_range(0.1..2.0), k: rng.gen_range(0.2..3.0) }
        };
        let lo = if rng.gen_bool(0.5) { f64::NEG_INFINITY } else { -rng.gen_range(0.0..2.0) };
        let hi = if rng.gen_bool(0.5) { f64::INFINITY } else { rng.gen_range(0.0..2.0) };
        let m = MarketModel::illiquid(SampleSpace::from_weights(&weights).map_err(err)?, s, friction, lo, hi).map_err(err)?;
        for _ in 0..3 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let a = superhedging_rho0(&m, &x).map_err(err)?.to_f64();
            let b = rho_hat0(&m, &x).map_err(err)?.to_f64();
            ensure(b <= a + 1e-9, format!("rho_hat0 {b} above rho0 {a}"))?;
        }
        illiquid += 1;
    }
    Ok(format!("{markets} polyhedral markets, {claims} claims, max gap {worst:.1e}; minorant on {illiquid} illiquid markets"))
}

fn criterion_4() -> Outcome {
    let mut holds = 0;
    let all = fixtures();
    for (name, m) in &all {
        let r = diagnostics::existence_battery(m, &opts()).map_err(err)?;
        ensure(r.holds(), format!("existence routes disagree on {name}"))?;
        if r.text_is("gdv", "holds") {
            holds += 1;
        }
    }
    Ok(format!("{} markets agree ({holds} with a GDV)", all.len()))
}

fn criterion_5() -> Outcome {
    let mut nfl = 0;
    let all = fixtures();
    for (name, m) in &all {
        let r = diagnostics::ftap_battery(m, &opts()).map_err(err)?;
        ensure(r.holds(), format!("FTAP routes disagree on {name}"))?;
        if r.text_is("nfl", "holds") {
            nfl += 1;
        }
    }
    Ok(format!("{} markets agree ({nfl} free of free lunches)", all.len()))
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=64 {
        let f = build_truncation(TruncationKind::Counterexample1, n).map_err(err)?;
        let min = diagnostics::min_penalty(&f.market).map_err(err)?.value.to_f64();
        worst = worst.max((min - 1.0 / n as f64).abs());
        ensure((min - 1.0 / n as f64).abs() <= 1e-9, format!("counterexample-1 N={n}: min {min}"))?;
        let nfl = diagnostics::nfl_check(&f.market).map_err(err)?;
        ensure(nfl.verdict == Verdict::Fails, format!("counterexample-1 N={n}: NFL {}", nfl.verdict.as_str()))?;
    }
    let mut tents = 0;
    for window in [3, 8, 12] {
        let f = build_truncation(TruncationKind::Counterexample2, window).map_err(err)?;
        for d in f.densities.iter().filter(|d| d.label.starts_with("tent")) {
            let s = f.market.support(&d.density).to_f64();
            ensure((s - d.expected_penalty).abs() <= 1e-9, format!("{} in window {window}: {s}", d.label))?;
            tents += 1;
        }
        let rel = diagnostics::is_relevant(&RhoHat0::new(f.market.clone()), &opts()).map_err(err)?;
        ensure(rel.holds(), format!("rho_hat0 not relevant in window {window}"))?;
        let report = diagnostics::truncation_report(&f, &opts()).map_err(err)?;
        let note = report.notes.iter().find(|n| n.starts_with("divergence"));
        ensure(note.is_some(), "divergence note missing")?;
        if window == 8 {
            println!("    note: {}", note.unwrap());
        }
    }
    Ok(format!("counterexample-1 min = 1/N for N = 2..64 (max error {worst:.1e}), NFL fails; {tents} tents at 1/j^2, rho_hat0 relevant"))
}

fn criterion_7() -> Outcome {
    let samples = 10_000;
    let two = two_state_market();
    let shortfall = Shortfall::normalized(MarketModel::nonpositive(half()), YoungFunction::Power { p: 2.0 }, 0.04).map_err(err)?;
    let martingale = MarketModel::scaled_box(half(), vec![vec![1.0, -1.0]], vec![(-1.0, 1.0)]).map_err(err)?;
    let indiff = IndifferencePrice::new(Arc::new(Entropic::new(half(), 1.0).map_err(err)?), martingale).map_err(err)?;
    let measures: Vec<(Box<dyn RiskMeasure>, Option<bool>)> = vec![
        (Box::new(Entropic::new(half(), 1.0).map_err(err)?), Some(false)),
        (Box::new(RhoHat0::new(two)), Some(false)),
        (Box::new(PenaltyTable::worst_case(Density::two_point(0.3).map_err(err)?)), Some(true)),
        (Box::new(shortfall), None),
        (Box::new(indiff), None),
    ];
    let mut parts = Vec::new();
    for (rho, homogeneous) in &measures {
        let r = axioms_check(rho.as_ref(), samples, 42).map_err(err)?;
        let worst = ["monotonicity", "cash_invariance", "convexity"]
            .iter()
            .map(|k| r.margin_of(k).unwrap_or(f64::INFINITY))
            .fold(0.0f64, f64::max);
        ensure(r.holds() && worst <= AXIOM_TOL, format!("{}: worst violation {worst:e}", rho.name()))?;
        let h = r.margin_of("homogeneity").unwrap_or(f64::NAN);
        match homogeneous {
            Some(true) => ensure(h <= AXIOM_TOL, format!("{}: homogeneity violation {h:e}", rho.name()))?,
            Some(false) => ensure(
                h > AXIOM_TOL && r.vector_of("homogeneity_claim").is_some(),
                format!("{}: homogeneity not refuted", rho.name()),
            )?,
            None => {}
        }
        parts.push(format!("{} {worst:.0e}", rho.name()));
    }
    Ok(format!("{samples} triples each, worst violations: {}", parts.join(", ")))
}

fn criterion_8() -> Outcome {
    let e = Entropic::new(half(), 1.0).map_err(err)?.evaluate(&[1.0, -1.0]).map_err(err)?.to_f64();
    let expected = 1f64.cosh().ln();
    ensure((e - expected).abs() <= 1e-12, format!("entropic {e} vs {expected}"))?;
    let s = Shortfall::new(MarketModel::nonpositive(half()), YoungFunction::Power { p: 2.0 }, 0.04)
        .map_err(err)?
        .evaluate(&[0.0, 0.0])
        .map_err(err)?
        .to_f64();
    ensure((s + 0.2).abs() <= 1e-9, format!("shortfall {s}"))?;
    let n = luxemburg_norm(&YoungFunction::Power { p: 2.0 }, &half(), &Claim::new(vec![2.0, 0.0]).map_err(err)?).map_err(err)?;
    ensure((n - 2f64.sqrt()).abs() <= 1e-10, format!("norm {n}"))?;
    Ok(format!("entropic {e:.12}, shortfall {s}, norm {n:.12}"))
}

fn criterion_9() -> Outcome {
    let m = two_state_market();
    let Restriction::Ready(r) = restrict_conical(Arc::new(RhoHat0::new(m.clone())), &m).map_err(err)? else {
        return Err(String::from("conical restriction unavailable"));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut dev, mut excess) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..1_000 {
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let v = r.evaluate(&x).map_err(err)?.to_f64();
        dev = dev.max((v + 0.5 * (x[0] + x[1])).abs());
        excess = excess.max(v - rho_hat0(&m, &x).map_err(err)?.to_f64());
    }
    ensure(dev <= 1e-9, format!("deviation from E_1/2[-x] {dev:e}"))?;
    ensure(excess <= 1e-9, format!("rho' exceeds rho_hat0 by {excess:e}"))?;
    let gdv = diagnostics::is_gdv(&r, &conical_hull(&m), &opts()).map_err(err)?;
    ensure(gdv.holds(), "rho' is not a GDV for the conical hull")?;
    Ok(format!("max deviation {dev:.1e}, max rho' - rho_hat0 {excess:.1e}, is_gdv on the cone holds"))
}

fn criterion_10() -> Outcome {
    let two = two_state_market();
    let neg = MarketModel::nonpositive(half());
    let pairs: Vec<(&str, Box<dyn RiskMeasure>, MarketModel)> = vec![
        ("rho_hat0 / two-state", Box::new(RhoHat0::new(two.clone())), two.clone()),
        ("abs penalty / two-state", Box::new(abs_penalty_measure()), two.clone()),
        ("worst case 1/2 / two-state", Box::new(PenaltyTable::worst_case(Density::two_point(0.5).map_err(err)?)), two.clone()),
        ("entropic / -L_+", Box::new(Entropic::new(half(), 1.0).map_err(err)?), neg.clone()),
        ("worst case (1,0) / -L_+", Box::new(PenaltyTable::worst_case(Density::point_mass(2, 0))), neg.clone()),
    ];
    let mut failing = 0;
    let mut verdicts = Vec::new();
    for (label, rho, m) in &pairs {
        let r = diagnostics::extension_consistency(rho.as_ref(), m, &opts()).map_err(err)?;
        ensure(r.verdict != Verdict::Inconclusive, format!("{label}: routes disagree or precondition failed"))?;
        if r.verdict == Verdict::Fails {
            failing += 1;
        }
        verdicts.push(format!("{label} {}", r.verdict.as_str()));
    }
    ensure(failing > 0, "no failing pair")?;
    Ok(verdicts.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("two-state illiquid market", criterion_1),
        ("scaled-half market", criterion_2),
        ("LP duality and minorant", criterion_3),
        ("GDV existence battery", criterion_4),
        ("FTAP battery", criterion_5),
        ("counterexample truncations", criterion_6),
        ("risk-measure axioms", criterion_7),
        ("closed-form spot values", criterion_8),
        ("conical restriction", criterion_9),
        ("extension theorem", criterion_10),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err(String::from("panicked")));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
