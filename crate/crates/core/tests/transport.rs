mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use rotcover::sphere::{Boundary, LuneBoundary};
use rotcover::transport::{
    build_transport_plan, count_covering_squares, count_inner_squares, transport_round, validate_plan, build_cap_cover,
    HalvingState, RoundKind, TransportConfig, TransportPair, TransportPlan,
};
use rotcover::{Error, Lune, McConfig, Region, Rotation, SphericalCap, UnitVector};

fn cfg(seed: u64) -> TransportConfig {
    TransportConfig {
        mc: McConfig::new(seed, 4),
        ..TransportConfig::default()
    }
}

fn cap(center: UnitVector, area: f64) -> Region {
    Region::Cap(SphericalCap::with_area(center, area, Boundary::Closed).unwrap())
}

fn assert_round_invariants(plan: &TransportPlan) {
    let first = &plan.rounds[0];
    let floor = first.area_before.value - first.area_prime_before.value;
    for r in &plan.rounds {
        if r.kind == RoundKind::Halving {
            let t = r.round as i32;
            assert!(r.area_prime_after.value <= 0.5f64.powi(t) + 4.0 * r.area_prime_after.stderr, "{r:?}");
            assert!(r.area_after.value >= floor - 4.0 * r.area_after.stderr, "{r:?}");
        }
    }
    let last = plan.rounds.last().unwrap();
    assert_eq!(last.kind, RoundKind::Final);
    assert!(last.area_before.value > 4.0 * last.area_prime_before.value);
}

#[test]
fn full_into_empty_is_trivial() {
    let plan = build_transport_plan(&Region::Full, &Region::Empty, &cfg(1)).unwrap();
    assert!(plan.pairs.is_empty());
    let v = validate_plan(&plan, &Region::Full, &Region::Empty, 10_000, McConfig::new(2, 2));
    assert!(v.passed(), "{v:?}");
}

#[test]
fn small_cap_needs_only_the_final_round() {
    let m = common::hole(0.2);
    let m_prime = cap(UnitVector::X, 0.1);
    let plan = build_transport_plan(&m, &m_prime, &cfg(3)).unwrap();
    assert_eq!(plan.rounds.len(), 1);
    assert_round_invariants(&plan);
    let v = validate_plan(&plan, &m, &m_prime, 100_000, McConfig::new(4, 4));
    assert!(v.passed(), "{v:?}");
    assert_eq!(v.containment_rate, 1.0);
}

#[test]
fn open_quarter_lune_takes_a_halving_round() {
    let m = common::hole(0.2);
    let m_prime = Region::Lune(Lune::new(UnitVector::X, 0.0, FRAC_PI_2, LuneBoundary::Open).unwrap());
    let plan = build_transport_plan(&m, &m_prime, &cfg(5)).unwrap();
    assert!(plan.rounds.iter().any(|r| r.kind == RoundKind::Halving));
    assert_round_invariants(&plan);
    let v = validate_plan(&plan, &m, &m_prime, 100_000, McConfig::new(6, 4));
    assert!(v.passed(), "{v:?}");
}

#[test]
fn first_round_removes_half_of_the_target() {
    let m = common::hole(0.2);
    let m_prime = common::complement_of_last_lune(4, UnitVector::Z);
    let config = cfg(7);
    let mut state = HalvingState::new(m, m_prime, &config);
    let mut cover = build_cap_cover(config.theta, config.mc).unwrap();
    let before = state.area_prime();
    let out = transport_round(&mut state, &mut cover, config.epsilon, &config).unwrap();
    let after = state.area_prime();
    assert!(before.value - after.value >= before.value / 2.0 - 4.0 * before.stderr);
    let caps: Vec<SphericalCap> = out.pairs.iter().map(|p| p.cap).collect();
    let index = rotcover::transport::CapIndex::from_caps(caps.iter().copied());
    for c in &caps {
        assert_eq!(index.overlapping(c).len(), 1);
    }
}

#[test]
fn empty_target_round_is_a_no_op() {
    let config = cfg(8);
    let mut state = HalvingState::new(Region::Full, Region::Empty, &config);
    let mut cover = build_cap_cover(config.theta, config.mc).unwrap();
    let out = transport_round(&mut state, &mut cover, config.epsilon, &config).unwrap();
    assert!(out.pairs.is_empty());
    assert_eq!(state.round(), 0);
}

#[test]
fn overlapping_caps_are_reported() {
    let a = SphericalCap::new(UnitVector::X, 0.2, Boundary::Closed).unwrap();
    let b = SphericalCap::new(UnitVector::new(1.0, 0.1, 0.0).unwrap(), 0.2, Boundary::Closed).unwrap();
    let c = SphericalCap::new(UnitVector::Y, 0.1, Boundary::Closed).unwrap();
    let plan = TransportPlan {
        pairs: [c, a, b]
            .into_iter()
            .map(|cap| TransportPair {
                cap,
                rotation: Rotation::IDENTITY,
            })
            .collect(),
        leftover_witness: SphericalCap::new(-UnitVector::Z, 0.1, Boundary::Closed).unwrap(),
        rounds: Vec::new(),
    };
    let v = validate_plan(&plan, &Region::Full, &Region::Empty, 1_000, McConfig::new(1, 1));
    assert!(!v.disjoint);
    assert_eq!(v.offending_pair, Some((1, 2)));
}

#[test]
fn uncovered_target_fails_validation() {
    let m = common::hole(0.2);
    let plan = build_transport_plan(&m, &cap(UnitVector::X, 0.1), &cfg(9)).unwrap();
    let wider = cap(UnitVector::X, 0.3);
    let v = validate_plan(&plan, &m, &wider, 20_000, McConfig::new(10, 2));
    assert!(!v.passed());
    assert!(v.coverage_rate < 0.5);
    assert!(!v.uncovered.is_empty());
    assert!(v.uncovered.iter().all(|p| wider.contains(p)));
}

#[test]
fn plans_round_trip_through_json_exactly() {
    let m = common::hole(0.2);
    let m_prime = cap(UnitVector::Y, 0.05);
    let plan = build_transport_plan(&m, &m_prime, &cfg(11)).unwrap();
    let json = plan.to_json_string();
    let back = TransportPlan::from_json_str(&json).unwrap();
    assert_eq!(back, plan);
    assert_eq!(back.to_json_string(), json);
    let mc = McConfig::new(12, 2);
    assert_eq!(validate_plan(&back, &m, &m_prime, 20_000, mc), validate_plan(&plan, &m, &m_prime, 20_000, mc));
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(value["pairs"][0]["U"]["center"].is_array());
    assert!(value["pairs"][0]["rho"][2].is_array());
}

#[test]
fn precondition_and_config_errors() {
    let small = cap(UnitVector::X, 0.1);
    let large = cap(UnitVector::Y, 0.3);
    assert!(matches!(build_transport_plan(&small, &large, &cfg(1)), Err(Error::TransportPrecondition(_))));
    let bad = TransportConfig { theta: 1.2, ..cfg(1) };
    assert!(matches!(build_transport_plan(&Region::Full, &Region::Empty, &bad), Err(Error::InvalidParameter(_))));
}

#[test]
fn lattice_counts_stay_within_the_boundary_collar() {
    // For a convex region every miscounted square meets the boundary, so it
    // lies in the collar of width √2ε whose area is at most √2·P·ε + 2πε².
    let disk = |q: [f64; 2]| q[0] * q[0] + q[1] * q[1] <= 1.0;
    // Side 1.3, off the lattice.
    let square = |q: [f64; 2]| (-0.61..=0.69).contains(&q[0]) && (-0.57..=0.73).contains(&q[1]);
    for eps in [0.1, 0.05, 0.025, 0.0125] {
        let collar = |perimeter: f64| 2f64.sqrt() * perimeter * eps + 2.0 * PI * eps * eps;
        let cases = [
            (count_inner_squares(&disk, eps, 1.0), PI, 2.0 * PI),
            (count_covering_squares(&disk, eps, 1.0), PI, 2.0 * PI),
            (count_inner_squares(&square, eps, 1.0), 1.69, 5.2),
            (count_covering_squares(&square, eps, 1.0), 1.69, 5.2),
        ];
        for (k, (count, area, perimeter)) in cases.into_iter().enumerate() {
            let n = count.unwrap().count as f64;
            let err = (n * eps * eps - area).abs();
            assert!(err <= collar(perimeter), "case {k} eps {eps}: {err}");
        }
    }
}
