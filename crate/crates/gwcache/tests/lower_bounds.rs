use gwcache::bounds::*;
use gwcache::rates::{mr_avg_rate_two_file, mr_peak_rate_two_file, two_request_rate};
use gwcache::source::IndependentLibrary;
use gwcache::{gwmr_curve, lower_convex_envelope, Criterion, EntropyOracle, GwTuple2, SourceModel};
use proptest::prelude::*;

const DSBS: SourceModel = SourceModel::Dsbs { p0: 0.2 };
const H12: f64 = 1.721928094887362;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn grid(hi: f64, step: f64) -> Vec<f64> {
    let n = (hi / step).round() as usize;
    (0..=n).map(|i| (i as f64 * step).min(hi)).collect()
}

fn dsbs_sum(inst: BoundInstance, m: f64) -> f64 {
    cutset_sum_rate_bound(&DSBS, &inst, m).unwrap()
}

#[test]
fn cutset_examples() {
    let case_i = BoundInstance::new(vec![Demand::files(&[1, 2])], vec![0b11]);
    close(dsbs_sum(case_i, 0.5), 0.72193, 5e-6);

    let case_ii = BoundInstance::new(vec![Demand::files(&[1, 2]), Demand::files(&[2, 1])], vec![0b01, 0b01]);
    close(dsbs_sum(case_ii.clone(), 0.0), 1.72193, 5e-6);
    close(dsbs_sum(case_ii, 0.0) / 2.0, 0.5 * H12, 1e-12);

    let single = BoundInstance::new(vec![Demand::files(&[1, 1])], vec![0b01]);
    close(dsbs_sum(single, DSBS.entropy(0b01)), 0.0, 1e-12);
}

#[test]
fn cutset_rejects_bad_instances() {
    let mismatched = BoundInstance::new(vec![Demand::files(&[1, 2])], vec![0b01, 0b10]);
    assert!(cutset_sum_rate_bound(&DSBS, &mismatched, 0.0).is_err());
    let empty_subset = BoundInstance::new(vec![Demand::files(&[1, 2])], vec![0]);
    assert!(cutset_sum_rate_bound(&DSBS, &empty_subset, 0.0).is_err());
    let third_file = BoundInstance::new(vec![Demand::files(&[1, 3])], vec![0b11]);
    assert!(cutset_sum_rate_bound(&DSBS, &third_file, 0.0).is_err());
    let ragged = BoundInstance::new(vec![Demand::files(&[1, 2]), Demand::files(&[1])], vec![0b01, 0b01]);
    assert!(cutset_sum_rate_bound(&DSBS, &ragged, 0.0).is_err());
}

// The conditioning sets follow the literal definition: files requested under
// earlier demands by receivers in S_i ∩ S_j.
#[test]
fn conditioning_sets_of_appendix_cases() {
    let g = appendix_witnesses(&DSBS, DemandKind::SingleFile);
    let by_label = |l: &str| g.iter().find(|w| w.label == l).unwrap().instance.clone();
    assert_eq!(by_label("G case (i)").conditioning(0), 0);
    let ii = by_label("G case (ii)");
    assert_eq!((ii.conditioning(0), ii.conditioning(1)), (0, 0b01));
    let iii = by_label("G case (iii)");
    assert_eq!((iii.conditioning(0), iii.conditioning(1)), (0, 0));

    let triple = SourceModel::TripleBsc { p0: 0.05 };
    let j = appendix_witnesses(&triple, DemandKind::SingleFile);
    let j3 = &j.iter().find(|w| w.label == "J case (iii)").unwrap().instance;
    // d = (1,2), (2,3), (3,1), all for receiver 1
    assert_eq!(j3.demands, vec![Demand::files(&[1, 2]), Demand::files(&[2, 3]), Demand::files(&[3, 1])]);
    assert_eq!((j3.conditioning(1), j3.conditioning(2)), (0b001, 0b011));
    let j4 = &j.iter().find(|w| w.label == "J case (iv)").unwrap().instance;
    assert_eq!(j4.conditioning(1), 0);

    let m = appendix_witnesses(&IndependentLibrary { lengths: vec![1.0; 3] }, DemandKind::TwoRequest);
    let m3 = &m.iter().find(|w| w.label == "M case (iii)").unwrap().instance;
    // receiver 1 asked for {1,2} first
    assert_eq!(m3.conditioning(1), 0b011);
    let m2 = &m.iter().find(|w| w.label == "M case (ii)").unwrap().instance;
    assert_eq!(m2.conditioning(1), 0);
}

#[test]
fn admissibility() {
    let overlap_out = BoundInstance::new(
        vec![Demand::files(&[2, 1]), Demand::files(&[1, 2]), Demand::files(&[1, 2])],
        vec![0b11, 0b10, 0b01],
    );
    assert!(!overlap_out.is_admissible());
    let nested = BoundInstance::new(vec![Demand::files(&[1, 2]), Demand::files(&[2, 1])], vec![0b01, 0b11]);
    assert!(nested.is_admissible());
    let s = CutsetSearch::new(&DSBS, 2, 3, DemandKind::SingleFile).unwrap();
    assert!(!s.contains(&overlap_out));
    assert!(s.contains(&nested));
}

#[test]
fn search_examples() {
    let s = CutsetSearch::new(&DSBS, 2, 3, DemandKind::SingleFile).unwrap();
    let at0 = s.best(0.0);
    close(at0.value, 1.72193, 5e-6);
    assert_eq!(at0.witness.nu(), 1);
    assert_eq!(at0.witness.subsets, vec![0b11]);

    let late = s.best(1.6);
    close(late.value, 0.5 * (H12 - 1.6), 1e-12);
    close(late.value, 0.06096, 5e-6);
    assert_eq!(late.witness.nu(), 2);

    for model in [DSBS, SourceModel::TripleBsc { p0: 0.05 }, SourceModel::Structured3 { l_v: 0.5, l_u: 1.0, l_x: 1.0 }]
    {
        let h = model.entropy(model.all());
        assert_eq!(search_best_peak_bound(&model, 2, h, 3, DemandKind::SingleFile).unwrap().value, 0.0);
    }
}

#[test]
fn search_scale_limits() {
    assert!(matches!(
        CutsetSearch::new(&DSBS, 4, 2, DemandKind::SingleFile),
        Err(gwcache::Error::ScaleExceeded(_))
    ));
    assert!(matches!(CutsetSearch::new(&DSBS, 2, 4, DemandKind::SingleFile), Err(gwcache::Error::ScaleExceeded(_))));
    assert!(CutsetSearch::new(&DSBS, 2, 2, DemandKind::TwoRequest).is_err());
}

#[test]
fn closed_form_examples() {
    close(peak_lb_two_file(&DSBS, 0.0).unwrap(), 1.72193, 5e-6);
    close(avg_lb_two_file(&DSBS, 5, 0.0).unwrap(), 0.9375 * H12 + 0.0625, 1e-12);
    close(avg_lb_two_file(&DSBS, 5, 0.0).unwrap(), 1.67681, 5e-6);
    assert_eq!(peak_lb_two_file(&DSBS, H12).unwrap(), 0.0);
    assert!(peak_lb_two_file(&SourceModel::TripleBsc { p0: 0.05 }, 0.0).is_err());
    assert!(avg_lb_two_file(&DSBS, 1, 0.0).is_err());

    let t = GwTuple2::new(0.5, 0.3, 0.4).unwrap();
    close(mr_peak_lb(&t, 0.0).unwrap(), 1.2, 1e-12);
    let p = peak_lb_two_file_pieces(&tuple_as_model(&t), 0.5);
    close(p[0], 0.2, 1e-12);
    close(p[1], 0.55, 1e-12);
    close(p[2], 0.35, 1e-12);
    close(mr_peak_lb(&t, 0.5).unwrap(), 0.55, 1e-12);
    close(mr_peak_lb(&t, 1.2).unwrap(), 0.0, 1e-12);
    assert!(mr_peak_lb(&GwTuple2 { rho0: -0.1, rho1: 0.3, rho2: 0.4 }, 0.0).is_err());

    let triple = SourceModel::TripleBsc { p0: 0.05 };
    close(peak_lb_three_file(&triple, 0.0).unwrap(), 1.45294, 5e-6);
    assert_eq!(peak_lb_three_file(&triple, triple.entropy(0b111)).unwrap(), 0.0);

    let s3 = SourceModel::Structured3 { l_v: 0.5, l_u: 1.0, l_x: 1.0 };
    let p = peak_lb_three_file_pieces(&s3, 3.0);
    // pairwise entropy 5.5, single 3.5, joint 6.5; the last piece dominates and
    // meets the achievable rate 0 + R_L2(1.5) + R_L1(1) = 2
    let expected = [5.5 - 6.0, 0.5 * 2.5, 3.5 / 3.0, 0.5 * 10.0 - 3.0];
    for (a, b) in p.iter().zip(expected) {
        close(*a, b, 1e-12);
    }
    close(peak_lb_three_file(&s3, 3.0).unwrap(), 2.0, 1e-12);

    close(two_request_lb(1.0, 0.5).unwrap(), 2.0, 1e-12);
    close(two_request_lb(1.0, 1.5).unwrap(), 1.0, 1e-12);
    assert_eq!(two_request_lb(1.0, 3.0).unwrap(), 0.0);
    assert!(two_request_lb(-1.0, 0.0).is_err());
}

fn pieces_for(model: &dyn EntropyOracle, kind: DemandKind, m: f64) -> Vec<f64> {
    match (kind, model.num_files()) {
        (DemandKind::TwoRequest, _) => two_request_lb_pieces(model.entropy(0b001), m).to_vec(),
        (_, 2) => peak_lb_two_file_pieces(model, m).to_vec(),
        _ => peak_lb_three_file_pieces(model, m).to_vec(),
    }
}

fn check_witnesses(model: &dyn EntropyOracle, kind: DemandKind) {
    let ws = appendix_witnesses(model, kind);
    let n_pieces = pieces_for(model, kind, 0.0).len();
    assert_eq!(ws.len(), n_pieces);
    let search = CutsetSearch::new(model, 2, 3, kind).unwrap();
    for w in &ws {
        assert!(w.instance.is_admissible(), "{}", w.label);
        assert!(search.contains(&w.instance), "{} not enumerated", w.label);
        for m in [0.0, 0.3, 0.7, 1.1, 2.0] {
            let v = cutset_sum_rate_bound(model, &w.instance, m).unwrap() / w.instance.nu() as f64;
            close(v, pieces_for(model, kind, m)[w.piece], 1e-9);
        }
    }
}

#[test]
fn appendix_witnesses_attain_their_pieces() {
    for model in [
        DSBS,
        SourceModel::Dsbs { p0: 0.05 },
        SourceModel::Structured2 { l_v: 0.5, l1: 0.3, l2: 0.4 },
        SourceModel::Structured2 { l_v: 0.1, l1: 1.0, l2: 0.2 },
        SourceModel::TripleBsc { p0: 0.05 },
        SourceModel::Structured3 { l_v: 0.5, l_u: 1.0, l_x: 1.0 },
        SourceModel::Structured3 { l_v: 0.2, l_u: 0.4, l_x: 0.7 },
    ] {
        check_witnesses(&model, DemandKind::SingleFile);
    }
    check_witnesses(&IndependentLibrary { lengths: vec![1.0; 3] }, DemandKind::TwoRequest);
    check_witnesses(&IndependentLibrary { lengths: vec![0.4; 3] }, DemandKind::TwoRequest);
}

#[test]
fn average_bound_matches_cutset_assembly() {
    for model in [DSBS, SourceModel::Dsbs { p0: 0.4 }, SourceModel::Structured2 { l_v: 0.5, l1: 0.3, l2: 0.4 }] {
        let h = model.entropy(0b11);
        for k in 2..=6 {
            for m in grid(h, 0.01) {
                close(avg_lb_two_file_cutset(&model, k, m).unwrap(), avg_lb_two_file(&model, k, m).unwrap(), 1e-12);
            }
        }
    }
    assert!(avg_lb_two_file_cutset(&SourceModel::TripleBsc { p0: 0.1 }, 2, 0.0).is_err());
}

// Yu et al.'s exact peak rate for independent unit files under uncoded placement.
fn yu_peak(n: usize, k: usize) -> gwcache::RateCurve {
    let c = |a: usize, b: usize| -> f64 {
        if b > a {
            0.0
        } else {
            (0..b).fold(1.0, |x, i| x * (a - i) as f64 / (i + 1) as f64)
        }
    };
    let lo = k.saturating_sub(n.min(k));
    let pts: Vec<(f64, f64)> = (0..=k)
        .map(|t| {
            let r = if t == k { 0.0 } else { (c(k, t + 1) - c(lo, t + 1)) / c(k, t) };
            (t as f64 * n as f64 / k as f64, r)
        })
        .collect();
    lower_convex_envelope(&pts).unwrap()
}

#[test]
fn search_never_exceeds_an_achievable_rate() {
    for (n, k) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let lib = IndependentLibrary { lengths: vec![1.0; n] };
        let ach = yu_peak(n, k);
        let s = CutsetSearch::new(&lib, k, 3, DemandKind::SingleFile).unwrap();
        for m in grid(n as f64, 0.01) {
            let b = s.best(m);
            assert!(b.value <= ach.eval(m).unwrap() + 1e-9, "N={n} K={k} M={m}: {} via {}", b.value, b.witness);
        }
    }
}

#[test]
fn search_equals_closed_form_on_grids() {
    let models = [
        DSBS,
        SourceModel::Dsbs { p0: 0.05 },
        SourceModel::Structured2 { l_v: 0.5, l1: 0.3, l2: 0.4 },
        SourceModel::TripleBsc { p0: 0.05 },
        SourceModel::TripleBsc { p0: 0.2 },
        SourceModel::Structured3 { l_v: 0.5, l_u: 1.0, l_x: 1.0 },
    ];
    for model in models {
        for k in [2, 3] {
            if model.num_files() == 3 && k == 3 {
                continue;
            }
            let s = CutsetSearch::new(&model, k, 3, DemandKind::SingleFile).unwrap();
            let h = model.entropy(model.all());
            for m in grid(h, h / 200.0) {
                let closed = opt_lb(&model, 2, Criterion::Peak, m).unwrap();
                close(s.best(m).value, closed, 1e-9);
            }
        }
    }
    let lib = IndependentLibrary { lengths: vec![1.0; 3] };
    let s = CutsetSearch::new(&lib, 2, 3, DemandKind::TwoRequest).unwrap();
    for m in grid(3.0, 0.01) {
        close(s.best(m).value, two_request_lb(1.0, m).unwrap(), 1e-9);
    }
}

#[test]
fn two_request_curve_meets_bound_below_three_halves() {
    for rho_p in [1.0, 0.25, 0.8] {
        let c = two_request_rate(rho_p).unwrap();
        for m in grid(1.5 * rho_p, rho_p * 1e-3) {
            close(c.eval(m).unwrap(), two_request_lb(rho_p, m).unwrap(), 1e-12);
        }
        let above = 2.0 * rho_p;
        assert!(c.eval(above).unwrap() > two_request_lb(rho_p, above).unwrap() + 1e-6);
    }
}

#[test]
fn corollary_five_and_six_k2() {
    for t in [GwTuple2::new(0.5, 0.3, 0.4).unwrap(), GwTuple2::new(0.0, 1.0, 0.2).unwrap()] {
        let peak = mr_peak_rate_two_file(&t, 2).unwrap();
        let avg = mr_avg_rate_two_file(&t, 2).unwrap();
        let g = grid(t.sum(), 1e-3);
        let r = gap_report(|m| peak.eval_clamped(m), |m| mr_peak_lb(&t, m).unwrap(), |_| 0.0, &g).unwrap();
        assert!(r.passed() && r.max_gap.abs() < 1e-9, "{t:?}: {}", r.max_gap);
        let r = gap_report(|m| avg.eval_clamped(m), |m| mr_avg_lb(&t, 2, m).unwrap(), |_| 0.0, &g).unwrap();
        assert!(r.passed() && r.max_gap.abs() < 1e-9, "{t:?}: {}", r.max_gap);
    }
}

#[test]
fn gap_report_regions_and_errors() {
    let g = grid(1.0, 0.01);
    let r = gap_report(|m| (1.0 - m).max(0.5), |m| 1.0 - m, |_| 0.5, &g).unwrap();
    assert!(r.passed());
    assert_eq!(r.optimal_regions.len(), 1);
    close(r.optimal_regions[0].0, 0.0, 1e-12);
    close(r.optimal_regions[0].1, 0.5, 1e-8);
    close(r.max_gap, 0.5, 1e-12);
    close(r.argmax, 1.0, 1e-12);
    assert!(r.is_optimal_at(0.3, 0.0) && !r.is_optimal_at(0.7, 0.0));

    let r = gap_report(|m| (1.0 - m).max(0.5), |m| 1.0 - m, |_| 0.1, &g).unwrap();
    assert!(!r.passed());
    close(r.violations[0], 0.61, 1e-9);
    // a bound above the rate fails regardless of the cap
    let r = gap_report(|_| 1.0, |_| 1.1, |_| 10.0, &g).unwrap();
    assert!(!r.passed());

    assert!(gap_report(|m| m, |m| m, |_| 0.0, &[]).is_err());
    assert!(gap_report(|m| m, |m| m, |_| 0.0, &[0.5, 0.2]).is_err());
    assert!(gap_report(|_| f64::NAN, |m| m, |_| 0.0, &[0.0, 0.1]).is_err());
}

fn two_file_cap_report(model: &SourceModel, k: usize, criterion: Criterion) -> GapReport {
    let ach = gwmr_curve(model, k, criterion).unwrap();
    let h = model.entropy(0b11);
    gap_report(
        |m| ach.eval(m).unwrap(),
        |m| opt_lb(model, k, criterion, m).unwrap(),
        |m| cap_two_file(model, k, criterion, m).unwrap().value,
        &grid(h, 1e-3),
    )
    .unwrap()
}

#[test]
fn theorem_caps_hold_on_fine_grids() {
    let two_file = [
        DSBS,
        SourceModel::Dsbs { p0: 0.05 },
        SourceModel::Dsbs { p0: 0.4 },
        SourceModel::Structured2 { l_v: 0.5, l1: 0.3, l2: 0.4 },
        SourceModel::Structured2 { l_v: 0.2, l1: 1.0, l2: 0.6 },
    ];
    for model in &two_file {
        for k in 2..=5 {
            for criterion in [Criterion::Peak, Criterion::Average] {
                let r = two_file_cap_report(model, k, criterion);
                assert!(r.passed(), "{model:?} K={k} {criterion:?}: violations at {:?}", r.violations);
            }
        }
    }

    // Theorem 6: the MR curve against the Theorem 2 bound
    for t in [GwTuple2::new(0.5, 0.3, 0.4).unwrap(), GwTuple2::new(0.1, 0.9, 0.6).unwrap()] {
        for k in 2..=6 {
            let c = mr_peak_rate_two_file(&t, k).unwrap();
            let r = gap_report(
                |m| c.eval_clamped(m),
                |m| mr_peak_lb(&t, m).unwrap(),
                |m| cap_mr_peak_two_file(&t, k, m).value,
                &grid(t.sum(), 1e-3),
            )
            .unwrap();
            assert!(r.passed(), "{t:?} K={k}: {:?}", r.violations);
            let c = mr_avg_rate_two_file(&t, k).unwrap();
            let r = gap_report(
                |m| c.eval_clamped(m),
                |m| mr_avg_lb(&t, k, m).unwrap(),
                |m| cap_mr_avg_two_file(&t, k, m).value,
                &grid(t.sum(), 1e-3),
            )
            .unwrap();
            assert!(r.passed(), "{t:?} K={k} avg: {:?}", r.violations);
        }
    }

    for model in [
        SourceModel::TripleBsc { p0: 0.05 },
        SourceModel::TripleBsc { p0: 0.2 },
        SourceModel::Structured3 { l_v: 0.5, l_u: 1.0, l_x: 1.0 },
        SourceModel::Structured3 { l_v: 0.5, l_u: 0.4, l_x: 0.2 },
    ] {
        let ach = gwmr_curve(&model, 2, Criterion::Peak).unwrap();
        let h = model.entropy(0b111);
        let r = gap_report(
            |m| ach.eval(m).unwrap(),
            |m| peak_lb_three_file(&model, m).unwrap(),
            |m| cap_three_file(&model, m).unwrap().value,
            &grid(h, 1e-3),
        )
        .unwrap();
        assert!(r.passed(), "{model:?}: {:?}", r.violations);
    }
}

#[test]
fn triple_bsc_cap_value() {
    let model = SourceModel::TripleBsc { p0: 0.05 };
    // ½H(X2,X3|X1) − ρ̃ below ζ
    let c = theorem12_cap(&model, 0.0).unwrap();
    close(c.value, 0.2871, 5e-4);
    assert_eq!(theorem12_cap(&model, model.entropy(0b111)).unwrap().value, 0.0);
    assert!(corollary8_cap(&model, 0.0).is_err());
}

fn arb_model() -> impl Strategy<Value = SourceModel> {
    prop_oneof![
        (0.01f64..0.5).prop_map(|p0| SourceModel::Dsbs { p0 }),
        (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(l_v, l1, l2)| SourceModel::Structured2 { l_v, l1, l2 }),
        (0.01f64..0.5).prop_map(|p0| SourceModel::TripleBsc { p0 }),
        (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)
            .prop_map(|(l_v, l_u, l_x)| SourceModel::Structured3 { l_v, l_u, l_x }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sandwich(model in arb_model(), k in 2usize..=5, frac in 0.0f64..=1.0, avg in any::<bool>()) {
        let three = model.num_files() == 3;
        let (k, criterion) = if three { (2, Criterion::Peak) } else if avg { (k, Criterion::Average) } else { (k, Criterion::Peak) };
        let h = model.entropy(model.all());
        prop_assume!(h > 1e-6);
        let m = frac * h;
        let ach = gwmr_curve(&model, k, criterion).unwrap().eval(m).unwrap();
        let lb = opt_lb(&model, k, criterion, m).unwrap();
        prop_assert!(lb >= 0.0);
        prop_assert!(ach >= lb - 1e-9, "ach {} < lb {}", ach, lb);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Each search builds the full ν ≤ 3 instance table, so fewer cases here.
    #[test]
    fn search_dominates_and_attains_closed_form(model in arb_model(), k in 2usize..=3, frac in 0.0f64..=1.0) {
        let k = if model.num_files() == 3 { 2 } else { k };
        let h = model.entropy(model.all());
        let m = frac * h;
        let found = search_best_peak_bound(&model, k, m, 3, DemandKind::SingleFile).unwrap();
        let closed = opt_lb(&model, 2, Criterion::Peak, m).unwrap();
        prop_assert!(found.value >= closed - 1e-9);
        prop_assert!((found.value - closed).abs() <= 1e-9, "searched {} closed {} via {}", found.value, closed, found.witness);
        let direct = cutset_sum_rate_bound(&model, &found.witness, m).unwrap() / found.witness.nu() as f64;
        prop_assert!((direct - found.raw).abs() <= 1e-9);
    }
}
