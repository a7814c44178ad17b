//! Acceptance suite. Each test enforces one exit criterion at its stated
//! tolerance and prints a single PASS line; a failing assertion is the FAIL
//! signal. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines.

#![allow(clippy::needless_range_loop)]

use cosupp_core::dercat::{ext_modules, homology, tor_modules, Complex};
use cosupp_core::dvr::{self, BasicObject, DvrKind, Probe, ProbeStatus};
use cosupp_core::finmod::{
    self, char_dual, direct_sum, enumerate_submodules, hom_module, injective_envelope,
    quotient_by_columns, ring_module, FinModule,
};
use cosupp_core::finring::{build_ring, catalog, RingSpec};
use cosupp_core::linalg::Mat;
use cosupp_core::supports::{
    coass_bruteforce, module_ass, support_set_all_routes, SupportKind,
};
use cosupp_core::verify::{
    generate_finite_instance, run_suite, GenProfile, Instance, SuiteConfig, Verdict,
};
use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

fn jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(2)
}

/// Criterion 1: the full property registry over the ten-ring catalog, 200
/// seeds per property, |M| ≤ 1024, complexes up to 5 nonzero degrees — zero
/// failures outside the flagged probe class, within five minutes.
#[test]
fn acceptance_1_registry_green_run() {
    let start = Instant::now();
    let config = SuiteConfig {
        properties: vec!["all".into()],
        seed_start: 0,
        seed_end: 200,
        jobs: jobs(),
        validate: true,
        profile: GenProfile {
            max_module_order: 1024,
            max_complex_modules: 5,
            ..Default::default()
        },
    };
    let summary = run_suite(&config);
    let elapsed = start.elapsed();
    let failures: Vec<String> = summary
        .records
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .map(|r| format!("{} seed {} ({}): {}", r.property, r.seed, r.ring, r.detail))
        .collect();
    assert!(failures.is_empty(), "failing verdicts:\n{}", failures.join("\n"));
    assert!(
        summary
            .records
            .iter()
            .filter(|r| r.verdict == Verdict::Flagged)
            .all(|r| r.property.starts_with("P-Cor34-literal")),
        "flagged verdicts outside the minimality-probe class"
    );
    assert!(summary.vacuity_violations.is_empty(), "{:?}", summary.vacuity_violations);
    assert!(
        elapsed.as_secs() <= 300,
        "registry run took {}s, budget is 300s",
        elapsed.as_secs()
    );
    println!(
        "PASS criterion-1: registry green run — {} pass, 0 fail, {} flagged in {:.1}s",
        summary.pass,
        summary.flagged,
        elapsed.as_secs_f64()
    );
}

/// Criterion 2: on every instance of the criterion-1 stream, the
/// definitional, dual and homology routes return identical sets for all six
/// kinds — exact set equality.
#[test]
fn acceptance_2_multi_path_exactness() {
    let profile = GenProfile {
        max_module_order: 1024,
        max_complex_modules: 5,
        ..Default::default()
    };
    let counter = std::sync::atomic::AtomicUsize::new(0);
    let seeds: Vec<u64> = (0..200).collect();
    let chunk = seeds.len().div_ceil(jobs());
    std::thread::scope(|scope| {
        for slice in seeds.chunks(chunk) {
            let profile = &profile;
            let counter = &counter;
            scope.spawn(move || {
                for &seed in slice {
                    let inst = generate_finite_instance(seed, profile);
                    for kind in SupportKind::ALL {
                        support_set_all_routes(&inst.complex, kind, true).unwrap_or_else(|e| {
                            panic!("routes disagree at seed {seed} for {}: {e}", kind.label())
                        });
                        counter.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    }
                }
            });
        }
    });
    println!(
        "PASS criterion-2: multi-path exactness — {} (instance, kind) checks, three routes each",
        counter.load(std::sync::atomic::Ordering::Relaxed)
    );
}

/// Criterion 3: the DVR rule table reproduces the computation table
/// verbatim — exact equality.
#[test]
fn acceptance_3_dvr_table_reproduction() {
    use dvr::{dvr_support, max_only, spec, under, zero_only, DvrPrime};
    let free = BasicObject::free_part(1);
    let frac = BasicObject::frac_part(1);
    let residue = BasicObject::tors_part(1, 1);
    let env = BasicObject::env_part(1);
    assert_eq!(dvr_support(&free, DvrKind::SmallCosupp), max_only(), "cosupp R = Max R");
    assert_eq!(dvr_support(&free, DvrKind::SmallSupp), spec(), "supp R = Spec R");
    assert_eq!(dvr_support(&residue, DvrKind::SmallCosupp), max_only(), "cosupp k(m) = {{m}}");
    assert_eq!(dvr_support(&residue, DvrKind::SmallSupp), max_only(), "supp k(m) = {{m}}");
    assert_eq!(dvr_support(&frac, DvrKind::SmallCosupp), zero_only(), "cosupp k(0) = {{(0)}}");
    assert_eq!(dvr_support(&frac, DvrKind::SmallSupp), zero_only(), "supp k(0) = {{(0)}}");
    assert_eq!(dvr_support(&env, DvrKind::SmallSupp), max_only(), "supp E(R/m) = {{m}}");
    assert_eq!(
        dvr_support(&env, DvrKind::SmallCosupp),
        under(DvrPrime::Max),
        "cosupp E(R/m) = U(m)"
    );
    assert_eq!(
        dvr_support(&frac, DvrKind::SmallCosupp),
        under(DvrPrime::Zero),
        "cosupp E(R/(0)) = U((0))"
    );
    println!("PASS criterion-3: DVR support/cosupport table reproduced exactly");
}

/// Criterion 4: the strictness demo exhibits both strict inclusions and the
/// fraction-field witness for strictness of cosupp ⊆ coSupp.
#[test]
fn acceptance_4_strictness_demo() {
    let report = dvr::dvr_demo(Probe::Strictness);
    assert_eq!(report.claims.len(), 3);
    for claim in &report.claims {
        assert_eq!(claim.status, ProbeStatus::Holds, "{}: {}", claim.label, claim.detail);
    }
    // and the displayed sets are the expected ones
    assert!(report.claims[0].detail.contains("cosupp R = {m}"));
    assert!(report.claims[0].detail.contains("supp R = {(0), m}"));
    assert!(report.claims[1].detail.contains("supp E = {m}"));
    assert!(report.claims[1].detail.contains("cosupp E = {(0), m}"));
    assert!(report.claims[2].detail.contains("cosupp K = {(0)}"));
    assert!(report.claims[2].detail.contains("coSupp K = {(0), m}"));
    println!("PASS criterion-4: strictness displays and the fraction-field witness hold");
}

/// Criterion 5: the printed minimality identity for small cosupport passes
/// on all finite-ring instances, fails flagged (not failing) on the envelope
/// probe, and the min-min form passes everywhere.
#[test]
fn acceptance_5_minimality_probe() {
    let config = SuiteConfig {
        properties: vec![
            "P-Cor34-literal".into(),
            "P-Cor34-minmin".into(),
            "P-Cor34-literal-dvr".into(),
        ],
        seed_start: 0,
        seed_end: 200,
        jobs: jobs(),
        validate: true,
        profile: GenProfile { max_module_order: 1024, ..Default::default() },
    };
    let summary = run_suite(&config);
    assert_eq!(summary.fail, 0, "no hard failures in the probe class");
    for r in &summary.records {
        match r.property.as_str() {
            "P-Cor34-literal" | "P-Cor34-minmin" => {
                assert_eq!(r.verdict, Verdict::Pass, "{} seed {}: {}", r.property, r.seed, r.detail)
            }
            "P-Cor34-literal-dvr" => assert!(
                matches!(r.verdict, Verdict::Pass | Verdict::Flagged),
                "probe class may pass or flag, never fail"
            ),
            _ => {}
        }
    }
    assert!(summary.flagged > 0, "the probe class must actually fire on chain objects");
    // the envelope probe itself
    let cor = dvr::dvr_demo(Probe::Cor34);
    assert_eq!(cor.claims[0].status, ProbeStatus::Flagged, "literal form fails on E(R/m)");
    assert_eq!(cor.claims[1].status, ProbeStatus::Holds, "min-min form holds");
    println!(
        "PASS criterion-5: minimality probe — literal green on finite rings, flagged {} times on the DVR chain objects, min-min green everywhere",
        summary.flagged
    );
}

/// Documented enumeration for criterion 6: every cyclic quotient R/a over
/// each ring, then direct sums of two cyclic quotients, and over the
/// order-four rings also sums of three, all capped at |K| ≤ 64, in
/// deterministic order.
fn enumerate_small_modules(ring: &Arc<cosupp_core::Ring>) -> Vec<FinModule> {
    let rm = ring_module(ring);
    let ideals = enumerate_submodules(&rm).expect("ring is small");
    let mut cyclic: Vec<FinModule> = ideals
        .iter()
        .map(|elems| quotient_by_columns(&rm, elems).module)
        .filter(|m| m.order() <= 64)
        .collect();
    cyclic.sort_by_key(|m| m.order());
    let mut out = cyclic.clone();
    for i in 0..cyclic.len() {
        for j in i..cyclic.len() {
            let sum = direct_sum(ring, &[cyclic[i].clone(), cyclic[j].clone()]).module;
            if sum.order() <= 64 {
                out.push(sum);
            }
            if ring.order() <= 4 {
                for t in j..cyclic.len() {
                    let triple = direct_sum(
                        ring,
                        &[cyclic[i].clone(), cyclic[j].clone(), cyclic[t].clone()],
                    )
                    .module;
                    if triple.order() <= 64 {
                        out.push(triple);
                    }
                }
            }
        }
    }
    out
}

/// Criterion 6: brute-force coassociated primes via cocyclic-image
/// enumeration agree exactly with the associated primes of the dual, on an
/// enumeration of at least fifty modules with |K| ≤ 64, within two minutes.
#[test]
fn acceptance_6_coass_oracle_equivalence() {
    let start = Instant::now();
    let specs = [
        RingSpec::Zmod { n: 4 },
        RingSpec::Zmod { n: 6 },
        RingSpec::Zmod { n: 8 },
        RingSpec::Quot {
            char: 2,
            vars: vec!["x".into()],
            relations: vec![("x".into(), 2)],
        },
    ];
    let mut total = 0usize;
    for spec in &specs {
        let ring = build_ring(spec).unwrap();
        for module in enumerate_small_modules(&ring) {
            let (brute, _) = coass_bruteforce(&module).expect("under the enumeration cap");
            let dual_route: BTreeSet<usize> = module_ass(&char_dual(&module)).unwrap();
            assert_eq!(
                brute.primes, dual_route,
                "Coass by cocyclic enumeration vs Ass of the dual on {:?} over {}",
                module.orders,
                ring.label()
            );
            total += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(total >= 50, "documented enumeration produced only {total} modules");
    assert!(elapsed.as_secs() <= 120, "oracle sweep took {}s, budget 120s", elapsed.as_secs());
    println!(
        "PASS criterion-6: Coass oracle equivalence on {total} modules in {:.1}s",
        elapsed.as_secs_f64()
    );
}

/// Criterion 7: the kernel oracles — the periodic Tor/Ext values over Z/4,
/// and the duality/exactness invariants on every catalog module.
#[test]
fn acceptance_7_kernel_oracles() {
    let r4 = build_ring(&RingSpec::Zmod { n: 4 }).unwrap();
    let z2 = finmod::cokernel_presentation(&r4, 1, &[vec![vec![2]]]).unwrap();
    let tor = tor_modules(&z2, &z2, 3).unwrap();
    let ext = ext_modules(&z2, &z2, 3).unwrap();
    for i in 0..=3 {
        assert_eq!(tor[i].orders, vec![2], "Tor_{i}(Z/2, Z/2) = Z/2 over Z/4");
        assert_eq!(ext[i].orders, vec![2], "Ext^{i}(Z/2, Z/2) = Z/2 over Z/4");
    }
    for (name, ring) in catalog() {
        // a small family per ring: the ring, its radical quotient, a cyclic cut
        let rm = ring_module(&ring);
        let rad = ring.jacobson_radical().subgroup.basis_rows();
        let mut family = vec![rm.clone(), quotient_by_columns(&rm, &rad).module];
        if let Some(first) = rad.first() {
            family.push(quotient_by_columns(&rm, std::slice::from_ref(first)).module);
        }
        for m in family {
            let dual = char_dual(&m);
            assert_eq!(dual.order(), m.order(), "|D(M)| = |M| over {name}");
            double_dual_is_natural_iso(&m);
        }
        for p in ring.spectrum() {
            injective_envelope(&ring, p).expect("essentiality holds on the catalog");
        }
    }
    println!("PASS criterion-7: periodic Tor/Ext oracle and duality invariants on the catalog");
}

/// Evaluation `M → Hom(Hom(M, ⊕E), ⊕E)` must be a bijective morphism.
fn double_dual_is_natural_iso(m: &FinModule) {
    let ring = m.ring.clone();
    let d1 = finmod::matlis_dual(m, finmod::DualTarget::All).unwrap();
    let d2 = hom_module(&d1.module, &d1.target).unwrap();
    let mut cols = Vec::new();
    for l in 0..m.dim() {
        let mut x = vec![0i128; m.dim()];
        x[l] = 1;
        let mut hmat = Mat::zeros(d1.target.dim(), d1.module.dim());
        for s in 0..d1.module.dim() {
            let mut unit = vec![0i128; d1.module.dim()];
            unit[s] = 1;
            let psi = d1.elem_to_matrix(&unit);
            let val = d1.target.reduce(&psi.mul_vec(&x));
            for r in 0..d1.target.dim() {
                hmat.set(r, s, val[r]);
            }
        }
        cols.push(d2.matrix_to_elem(&hmat).expect("evaluation lands in the double dual"));
    }
    let eval = finmod::ModuleMap::new(
        m.clone(),
        d2.module.clone(),
        Mat::from_fn(d2.module.dim(), m.dim(), |r, c| cols[c][r]),
    )
    .expect("evaluation is a morphism");
    assert!(eval.is_bijective(), "double-dual evaluation must be an isomorphism");
    let _ = ring;
}

/// Criterion 8: the Nakayama-style implication on at least fifty
/// non-vacuous targeted instances, holding on every one, vacuity under 80%.
#[test]
fn acceptance_8_nakayama_extension() {
    let config = SuiteConfig {
        properties: vec!["P-Nakayama".into()],
        seed_start: 0,
        seed_end: 200,
        jobs: jobs(),
        validate: true,
        profile: GenProfile { max_module_order: 1024, ..Default::default() },
    };
    let summary = run_suite(&config);
    let total = summary.records.len();
    let vacuous = summary.records.iter().filter(|r| r.vacuous).count();
    let nonvacuous_pass = summary
        .records
        .iter()
        .filter(|r| !r.vacuous && r.verdict == Verdict::Pass)
        .count();
    assert_eq!(summary.fail, 0, "the implication held on every instance");
    assert!(
        nonvacuous_pass >= 50,
        "need at least 50 non-vacuous instances, got {nonvacuous_pass}"
    );
    assert!(vacuous * 5 < total * 4, "vacuity rate {vacuous}/{total} must stay under 80%");
    println!(
        "PASS criterion-8: Nakayama extension held on {nonvacuous_pass} non-vacuous instances (vacuous {vacuous}/{total})"
    );
}

/// The generated stream itself obeys the documented caps, so the criteria
/// above quantify over what they claim to.
#[test]
fn acceptance_stream_shape() {
    let profile = GenProfile { max_module_order: 1024, max_complex_modules: 5, ..Default::default() };
    let mut rings = BTreeSet::new();
    for seed in 0..200 {
        let inst = generate_finite_instance(seed, &profile);
        rings.insert(inst.ring_name.clone());
        assert!(inst.complex.modules.len() <= 5);
        for m in &inst.complex.modules {
            assert!(m.order() <= 1024);
        }
        // instances are reconstructible from the seed alone
        let again = generate_finite_instance(seed, &profile);
        assert_eq!(
            Instance::Finite(Box::new(inst)).to_json(),
            Instance::Finite(Box::new(again)).to_json()
        );
    }
    assert!(rings.len() >= 8, "catalog coverage in the acceptance stream");
    let zero = Complex::zero(&build_ring(&RingSpec::Zmod { n: 4 }).unwrap());
    assert!(homology(&zero).is_zero());
    println!("PASS stream-shape: caps, determinism and catalog coverage of the instance stream");
}
