//! Library-level end-to-end checks on small links.

use siet::prelude::*;

fn qam4() -> (Constellation, ChannelParams) {
    (
        Constellation::rect_qam(4, 1.0).unwrap(),
        ChannelParams::new(0.5).unwrap(),
    )
}

#[test]
fn simulated_dep_matches_the_exact_decoder_error() {
    let (c, ch) = qam4();
    let counts = rationalize(&InputType::uniform(4), 8).unwrap();
    let code = build_code(&counts, 200, BuildMode::Sample { seed: 1 }).unwrap();
    let d = MapDetector::new(&c, &code.code_type(), ch).unwrap();
    let est = simulate_dep(&code, &d, 200_000, 9).unwrap();
    assert!(est.consistent(), "{est:?}");
    let rp = region_probs(&d, RegionSampler::Auto);
    assert_eq!(rp.method, RegionMethod::ClosedForm);
    let lb = dep_lb_homogeneous(&code.code_type(), &rp, 8).unwrap().value;
    assert!((lb - est.analytic_dep).abs() < 1e-12);
}

#[test]
fn skewed_code_uses_quadrature_regions() {
    let (c, ch) = qam4();
    let ty = InputType::new(vec![0.5, 0.25, 0.125, 0.125]).unwrap();
    let counts = rationalize(&ty, 8).unwrap();
    let code = build_code(&counts, 100, BuildMode::Enumerate).unwrap();
    let d = MapDetector::new(&c, &code.code_type(), ch).unwrap();
    let rp = region_probs(&d, RegionSampler::Auto);
    assert_eq!(rp.method, RegionMethod::Quadrature);
    let est = simulate_dep(&code, &d, 200_000, 4).unwrap();
    assert!(est.consistent(), "{est:?}");
}

#[test]
fn validation_ledger_on_a_noisy_link() {
    let c = Constellation::rect_qam(16, 1.0).unwrap();
    let ch = ChannelParams::new(1.0).unwrap();
    let m = HarvesterModel::new(1.0, 0.2, 0.8).unwrap();
    let counts = rationalize(&InputType::uniform(16), 32).unwrap();
    let code = build_code(&counts, 500, BuildMode::Sample { seed: 2 }).unwrap();
    let d = MapDetector::new(&c, &code.code_type(), ch).unwrap();
    let mean = siet::bounds::mean_expected_energy(&c, &code.code_type(), &ch, &m).unwrap();
    let ledger = validate_bounds(&code, &d, &m, 1.2 * mean, 0.01, 50_000, 5).unwrap();
    assert!(ledger.all_passed(), "{:?}", ledger.checks);
    assert!(ledger.rate <= ledger.rate_ub_exact);
    assert!(ledger.energy_rate_ub > mean);
}

#[test]
fn frontier_endpoints_on_the_reference_link() {
    let symbols = [
        (5, 5),
        (-5, 5),
        (-5, -5),
        (5, -5),
        (15, 5),
        (5, 15),
        (-5, 15),
        (-15, 5),
        (-15, -5),
        (-5, -15),
        (5, -15),
        (15, -5),
        (15, 15),
        (-15, 15),
        (-15, -15),
        (15, -15),
    ];
    let c = Constellation::new(
        symbols
            .iter()
            .map(|&(a, b)| ComplexSymbol::new(a as f64, b as f64))
            .collect(),
        None,
    )
    .unwrap();
    let setup = FrontierSetup {
        constellation: c,
        ch: ChannelParams::new(2.0).unwrap(),
        harvester: HarvesterModel::unit(),
        n: 80,
        delta: 1e-4,
        sampler: RegionSampler::Auto,
    };
    let pts = sweep(&setup, &[0.0, 0.5, 1.0]).unwrap();
    assert!((pts[0].energy_ub - 84_768.476_847_684_77).abs() < 1e-6);
    assert!((pts[2].energy_ub - 206_580.658_065_806_6).abs() < 1e-6);
    assert!((pts[1].probs[12] - 0.15625).abs() < 1e-15);
    assert!((pts[2].rate_ub_exact - 1.881_466_544_349_179_4).abs() < 1e-12);
}
