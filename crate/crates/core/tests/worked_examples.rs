use std::sync::Arc;

use gooddeal_core::diagnostics::{self, CheckOptions, TruncationKind};
use gooddeal_core::market::{conical_hull, extended_market, Friction};
use gooddeal_core::risk::{
    acceptance_set_measure, axioms_check, indifference_price, penalty_rho0, restrict_conical, rho_hat0, superhedging_rho0,
    AcceptanceSet, Entropic, IndifferencePrice, PenaltyTable, Restriction, RhoHat0, RiskMeasure, Shortfall,
};
use gooddeal_core::space::{luxemburg_norm, Claim, YoungFunction};
use gooddeal_core::{Density, MarketModel, SampleSpace, Verdict};

fn half() -> SampleSpace {
    SampleSpace::uniform(2).unwrap()
}

fn two_state() -> MarketModel {
    MarketModel::illiquid(half(), vec![1.0, -1.0], Friction::Quadratic { c: 1.0 }, f64::NEG_INFINITY, f64::INFINITY).unwrap()
}

fn scaled_half() -> MarketModel {
    MarketModel::scaled_box(half(), vec![vec![1.0, 0.5]], vec![(0.0, 1.0)]).unwrap()
}

fn abs_measure() -> PenaltyTable {
    let entries = (0..=20)
        .map(|i| {
            let q = i as f64 / 20.0;
            (Density::two_point(q).unwrap(), (2.0 * q - 1.0).abs() / 4.0)
        })
        .collect();
    PenaltyTable::named("abs_penalty", entries).unwrap()
}

fn opts() -> CheckOptions {
    CheckOptions { samples: 1_000, ..CheckOptions::default() }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn two_state_penalty_and_values() {
    let m = two_state();
    for i in 0..=20 {
        let q = i as f64 / 20.0;
        let s = penalty_rho0(&m, &[q, 1.0 - q]).unwrap().to_f64();
        assert!(close(s, (2.0 * q - 1.0).powi(2) / 4.0, 1e-9));
    }
    assert!(close(rho_hat0(&m, &[-0.5, 0.0]).unwrap().to_f64(), 0.3125, 1e-9));
    assert!(close(superhedging_rho0(&m, &[-0.5, 0.0]).unwrap().to_f64(), 0.3125, 1e-9));
    assert!(close(abs_measure().evaluate(&[-0.5, 0.0]).unwrap().to_f64(), 0.25, 1e-9));
}

#[test]
fn two_state_measure_is_gdv_but_not_indifference_price() {
    let m = two_state();
    assert!(diagnostics::is_gdv(&abs_measure(), &m, &opts()).unwrap().holds());
    let anchors: Vec<Vec<f64>> = [0.0, 0.5, 1.0].iter().map(|q| vec![*q, 1.0 - q]).collect();
    let r = diagnostics::penalty_identity_check(&abs_measure(), &m, &anchors, &[vec![0.25, 0.75]]).unwrap();
    assert!(r.holds());
    assert!(r.margin_of("convexity_defect").unwrap() > 1e-3);
}

#[test]
fn scaled_half_market() {
    let m = scaled_half();
    let (r, _) = diagnostics::gdv_exists(&m).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    assert!(close(r.margin_of("min_penalty").unwrap(), 0.5, 1e-9));
    assert!(close(rho_hat0(&m, &[0.0, 0.0]).unwrap().to_f64(), -0.5, 1e-9));
    let (c, rho) = diagnostics::coherent_gdv(&m, &opts()).unwrap();
    assert_eq!(c.verdict, Verdict::Fails);
    assert!(rho.is_none());
    assert!(matches!(restrict_conical(Arc::new(RhoHat0::new(m.clone())), &m).unwrap(), Restriction::EmptyZeroSet));
}

#[test]
fn monotone_cap_market() {
    let m = MarketModel::scaled_box(SampleSpace::uniform(1).unwrap(), vec![vec![1.0]], vec![(0.0, 1.0)]).unwrap();
    assert!(close(superhedging_rho0(&m, &[0.0]).unwrap().to_f64(), -1.0, 1e-12));
}

#[test]
fn closed_form_spot_values() {
    let e = Entropic::new(half(), 1.0).unwrap();
    assert!(close(e.evaluate(&[1.0, -1.0]).unwrap().to_f64(), libm::log(libm::cosh(1.0)), 1e-12));
    let s = Shortfall::new(MarketModel::nonpositive(half()), YoungFunction::Power { p: 2.0 }, 0.04).unwrap();
    assert!(close(s.evaluate(&[0.0, 0.0]).unwrap().to_f64(), -0.2, 1e-9));
    let n = luxemburg_norm(&YoungFunction::Power { p: 2.0 }, &half(), &Claim::new(vec![2.0, 0.0]).unwrap()).unwrap();
    assert!(close(n, 2f64.sqrt(), 1e-10));
}

#[test]
fn shortfall_on_larger_market_is_cheaper() {
    let s = Shortfall::new(two_state(), YoungFunction::Power { p: 2.0 }, 0.04).unwrap();
    assert!(s.evaluate(&[0.0, 0.0]).unwrap().to_f64() <= -0.2 + 1e-9);
}

#[test]
fn acceptance_sets() {
    let e: Arc<dyn RiskMeasure> = Arc::new(Entropic::new(half(), 1.0).unwrap());
    let a = acceptance_set_measure(&AcceptanceSet::Sublevel(e.clone()), &MarketModel::nonpositive(half()), &[0.3, -0.7])
        .unwrap()
        .to_f64();
    assert!(close(a, e.evaluate(&[0.3, -0.7]).unwrap().to_f64(), 1e-6));
    let w = acceptance_set_measure(&AcceptanceSet::nonnegative(2), &MarketModel::nonpositive(half()), &[-1.0, -2.0]).unwrap();
    assert!(close(w.to_f64(), 2.0, 1e-9));
}

#[test]
fn indifference_prices() {
    let e = Entropic::new(half(), 1.0).unwrap();
    let out = indifference_price(&e, &MarketModel::nonpositive(half()), &[1.0, -1.0]).unwrap();
    assert!(close(out.price.to_f64(), libm::log(libm::cosh(1.0)), 1e-7));
    let m = MarketModel::scaled_box(half(), vec![vec![1.0, -1.0]], vec![(-1.0, 1.0)]).unwrap();
    let out = indifference_price(&e, &m, &[0.0, 0.0]).unwrap();
    assert!(close(out.inner_inf_at_zero.to_f64(), 0.0, 1e-7));
    assert!(close(out.price.to_f64(), 0.0, 1e-12));
    let ip = IndifferencePrice::new(Arc::new(e), m).unwrap();
    assert_eq!(axioms_check(&ip, 300, 7).unwrap().verdict, Verdict::Holds);
}

#[test]
fn conical_restriction_on_two_state() {
    let m = two_state();
    let Restriction::Ready(r) = restrict_conical(Arc::new(RhoHat0::new(m.clone())), &m).unwrap() else {
        panic!("zero set is nonempty")
    };
    assert!(close(r.evaluate(&[-0.5, 0.0]).unwrap().to_f64(), 0.25, 1e-9));
    for x in [[1.0, -2.0], [0.3, 0.9], [-1.5, 0.2]] {
        let v = r.evaluate(&x).unwrap().to_f64();
        assert!(close(v, -(x[0] + x[1]) / 2.0, 1e-9));
        assert!(v <= rho_hat0(&m, &x).unwrap().to_f64() + 1e-9);
    }
    assert!(diagnostics::is_gdv(&r, &conical_hull(&m), &opts()).unwrap().holds());
}

#[test]
fn extended_market_membership() {
    let m = two_state();
    let rho = RhoHat0::new(m);
    assert!(extended_market(&rho).contains(&[0.0, 0.0], 1e-9).unwrap());
    let e = Entropic::new(half(), 1.0).unwrap();
    assert!(!extended_market(&e).contains(&[1.0, -1.0], 1e-9).unwrap());
    assert!(!extended_market(&e).contains(&[1e-3, 0.0], 1e-12).unwrap());
}

#[test]
fn counterexample_one_min_penalty_for_every_size() {
    for n in 2..=64 {
        let f = diagnostics::build_truncation(TruncationKind::Counterexample1, n).unwrap();
        let min = diagnostics::min_penalty(&f.market).unwrap().value.to_f64();
        assert!(close(min, 1.0 / n as f64, 1e-9), "N={n}: {min}");
    }
}

#[test]
fn counterexample_two_tents() {
    let f = diagnostics::build_truncation(TruncationKind::Counterexample2, 8).unwrap();
    for d in &f.densities {
        assert!(close(f.market.support(&d.density).to_f64(), d.expected_penalty, 1e-9), "{}", d.label);
    }
    assert!(diagnostics::is_relevant(&RhoHat0::new(f.market.clone()), &opts()).unwrap().holds());
}

#[test]
fn fixture_batteries() {
    let markets = [
        two_state(),
        scaled_half(),
        MarketModel::nonpositive(half()),
        MarketModel::polytope(SampleSpace::uniform(3).unwrap(), vec![vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0]]).unwrap(),
        MarketModel::illiquid(half(), vec![2.0, 1.0], Friction::Exponential { c: 0.5, k: 1.0 }, -1.0, 1.0).unwrap(),
    ];
    for m in &markets {
        let e = diagnostics::existence_battery(m, &opts()).unwrap();
        assert!(e.holds(), "{e:?}");
        let f = diagnostics::ftap_battery(m, &opts()).unwrap();
        assert!(f.holds(), "{f:?}");
    }
}
