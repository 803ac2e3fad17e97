//! Acceptance suite: every pinned computation, one test per criterion,
//! printing one pass/fail line each. All checks are exact F2 identities, so
//! no tolerances appear anywhere.

use std::process::Command;

use hfbord_core::algebra::{AlgebraElement, Basis, Idem, BASIS};
use hfbord_core::bimod::{box_a_d, box_da_d, box_da_da, da_iso_by_renaming, da_reduce};
use hfbord_core::builtins::{az_model, Builtins};
use hfbord_core::cfk;
use hfbord_core::config::Config;
use hfbord_core::f2::Echelon;
use hfbord_core::involution::{
    check_local_triviality, find_equivalence, solve_involution, InvariantProfile,
};
use hfbord_core::translate::translate;
use hfbord_core::typed::{
    compose, is_cycle, iso_search, reduce, MorComplex, TypeDModule, TypeDMorphism,
};

fn cfg() -> Config {
    Config::default()
}

fn printed_trefoil() -> TypeDModule {
    TypeDModule::from_named(
        vec![
            hfbord_core::typed::DGen::new("e0", Idem::I0),
            hfbord_core::typed::DGen::new("f0", Idem::I0),
            hfbord_core::typed::DGen::new("f1", Idem::I1),
            hfbord_core::typed::DGen::new("g0", Idem::I0),
            hfbord_core::typed::DGen::new("g1", Idem::I1),
            hfbord_core::typed::DGen::new("h1", Idem::I1),
            hfbord_core::typed::DGen::new("k1", Idem::I1),
        ],
        &[
            ("e0", Basis::R3, "f1"),
            ("e0", Basis::R1, "g1"),
            ("f1", Basis::R2, "f0"),
            ("f0", Basis::R1, "k1"),
            ("h1", Basis::R23, "k1"),
            ("g0", Basis::R3, "h1"),
            ("g0", Basis::R123, "g1"),
        ],
    )
    .unwrap()
}

fn printed_figure8() -> TypeDModule {
    TypeDModule::from_named(
        vec![
            hfbord_core::typed::DGen::new("e0", Idem::I0),
            hfbord_core::typed::DGen::new("e1", Idem::I1),
            hfbord_core::typed::DGen::new("f0", Idem::I0),
            hfbord_core::typed::DGen::new("f1", Idem::I1),
            hfbord_core::typed::DGen::new("g0", Idem::I0),
            hfbord_core::typed::DGen::new("g1", Idem::I1),
            hfbord_core::typed::DGen::new("h0", Idem::I0),
            hfbord_core::typed::DGen::new("h1", Idem::I1),
            hfbord_core::typed::DGen::new("z", Idem::I0),
        ],
        &[
            ("f0", Basis::R1, "f1"),
            ("e1", Basis::R2, "f0"),
            ("e0", Basis::R3, "e1"),
            ("e0", Basis::R1, "h1"),
            ("g0", Basis::R123, "f1"),
            ("g1", Basis::R2, "g0"),
            ("h0", Basis::R3, "g1"),
            ("h0", Basis::R123, "h1"),
            ("z", Basis::R12, "z"),
        ],
    )
    .unwrap()
}

fn pass(n: u32, what: &str) {
    println!("[PASS] criterion {n}: {what}");
}

#[test]
fn criterion_01_algebra_laws() {
    for a in BASIS {
        for b in BASIS {
            for c in BASIS {
                let (ea, eb, ec): (AlgebraElement, AlgebraElement, AlgebraElement) =
                    (a.into(), b.into(), c.into());
                assert_eq!(ea.mul(eb).mul(ec), ea.mul(eb.mul(ec)), "({a}·{b})·{c}");
            }
        }
    }
    let unit = AlgebraElement::unit();
    for b in BASIS {
        let e: AlgebraElement = b.into();
        assert_eq!(unit.mul(e), e);
        assert_eq!(e.mul(unit), e);
        let (l, r) = b.idempotents();
        assert_eq!(
            AlgebraElement::from(Basis::idem(l))
                .mul(e)
                .mul(Basis::idem(r).into()),
            e
        );
    }
    assert_eq!(Basis::I0.mul(Basis::I1), None);
    pass(1, "associativity over all 8^3 triples, unit and idempotent laws");
}

#[test]
fn criterion_02_solid_torus_self_pairing() {
    let b = Builtins::shipped();
    b.cfd_t0.check_structure().unwrap();
    let mor = MorComplex::new(&b.cfd_t0, &b.cfd_t0);
    assert_eq!(mor.homology().unwrap().dim, 2);
    pass(2, "CFD(T0) passes the structure equation; Mor self-pairing has homology dimension 2");
}

#[test]
fn criterion_03_five_generator_model() {
    let b = Builtins::shipped();
    let product = box_da_d(&b.az, &b.cfd_tinf_nu, &cfg()).unwrap();
    let rd = reduce(&product).unwrap();
    let iso = iso_search(&rd.reduced, &az_model(), 12, &cfg()).unwrap();
    assert!(iso.is_some(), "no exact isomorphism with the model");
    pass(3, "reduce(AZ ⊠ CFD(T∞,ν)) is isomorphic to the five-generator model");
}

#[test]
fn criterion_04_az_duality() {
    let b = Builtins::shipped();
    let product = box_da_da(&b.conj_az, &b.az, &cfg()).unwrap();
    let reduced = da_reduce(&product).unwrap();
    assert!(da_iso_by_renaming(&reduced, &b.identity));
    pass(4, "reduce(conjAZ ⊠ AZ) is isomorphic to the identity bimodule");
}

#[test]
fn criterion_05_l2_complex() {
    let c = cfk::l2_link();
    c.check().unwrap();
    let hat = cfk::hat_truncate(&c, None).unwrap();
    let mut degs = hat.class_bidegrees.clone();
    degs.sort();
    assert_eq!(hat.homology_dim, 4);
    assert_eq!(degs, vec![(-1, -1), (0, 0), (0, 0), (1, 1)]);
    pass(5, "L2 complex squares to zero; hat homology has four classes at the pinned bidegrees");
}

#[test]
fn criterion_06_pairing_with_the_model() {
    let b = Builtins::shipped();
    let paired = box_a_d(&b.cfa_t0, &az_model(), &cfg()).unwrap();
    assert_eq!(paired.homology_dim().unwrap(), 1);
    pass(6, "CFA(T0) ⊠ five-generator model has homology dimension 1");
}

#[test]
fn criterion_07_translation_targets() {
    let b = Builtins::shipped();
    let u = translate(&cfk::unknot().0, 0, 0).unwrap().module;
    assert!(iso_search(&u, &b.cfd_t0, 12, &cfg()).unwrap().is_some());

    let t = translate(&cfk::trefoil_lh().0, -1, 0).unwrap().module;
    assert!(iso_search(&t, &printed_trefoil(), 12, &cfg()).unwrap().is_some());

    let f8 = translate(&cfk::figure8().0, 0, 0).unwrap().module;
    assert!(iso_search(&f8, &printed_figure8(), 12, &cfg()).unwrap().is_some());
    pass(7, "translations hit CFD(T0), the 7-generator, and the 9-generator printed modules exactly");
}

#[test]
fn criterion_08_trefoil_reflection_and_rigidity() {
    let b = Builtins::shipped();
    let (c, iota) = cfk::trefoil_lh();
    let tref = printed_trefoil();
    let report = solve_involution(&b, &tref, &c, &iota, &cfg()).unwrap();
    assert!(!report.candidates.is_empty());
    let reflection = InvariantProfile {
        dim: 3,
        min_poly: vec![1, 0, 1],
        rank_profile: vec![1, 0],
    };
    for cand in &report.candidates {
        assert_eq!(cand.report.profile, reflection, "E^2=id, E!=id, rank(E+id)=1");
        assert!(cand.report.invertible);
    }
    // Rigidity surrogate over the ungraded class enumeration: the ungraded
    // endomorphism homology contains non-degree-preserving invertible
    // classes, so the enumeration splits into the reflection profile and its
    // unipotent twist; every solver-accepted candidate lands on the
    // reflection. The split is pinned here and recorded in the project
    // notes.
    use hfbord_core::involution::{invertible_classes, HatIotaEvaluator};
    let product = box_da_d(&b.az, &tref, &cfg()).unwrap();
    let base = find_equivalence(&product, &tref, &cfg()).unwrap().unwrap();
    let eval = HatIotaEvaluator::new(&b, &tref, &cfg()).unwrap();
    let end = MorComplex::new(&tref, &tref);
    let classes = invertible_classes(&end, &cfg()).unwrap();
    let mut split = std::collections::BTreeMap::new();
    for (_, g) in &classes {
        let cand = compose(g, &base).unwrap();
        let e = eval.induced_matrix(&cand).unwrap();
        *split.entry(InvariantProfile::of(&e)).or_insert(0usize) += 1;
    }
    assert_eq!(split.get(&reflection), Some(&16));
    assert_eq!(split.values().sum::<usize>(), 32);
    println!(
        "[NOTE] criterion 8: ungraded invertible classes split {:?} across {} profiles; \
         all solver-accepted candidates give the reflection",
        split.values().collect::<Vec<_>>(),
        split.len()
    );
    pass(8, "trefoil involution acts by the reflection; every matching candidate agrees");
}

#[test]
fn criterion_09_figure_eight() {
    let b = Builtins::shipped();
    let (c, iota) = cfk::figure8();
    let f8 = printed_figure8();

    // Printed endomorphisms. The printed K2(z) = g0 + ρ3 f1 needs its ρ1 g1
    // term to close (see the project notes); K1 and K3 are cycles as
    // printed.
    let k1 = TypeDMorphism::from_named(
        &f8,
        &f8,
        &[("e0", Basis::I0, "z"), ("h1", Basis::R2, "z")],
    )
    .unwrap();
    let k2 = TypeDMorphism::from_named(
        &f8,
        &f8,
        &[
            ("z", Basis::I0, "g0"),
            ("z", Basis::R3, "f1"),
            ("z", Basis::R1, "g1"),
        ],
    )
    .unwrap();
    let k3 = TypeDMorphism::from_named(&f8, &f8, &[("z", Basis::I0, "z")]).unwrap();
    for (name, k) in [("K1", &k1), ("K2", &k2), ("K3", &k3)] {
        assert!(is_cycle(k), "{name} is a cycle");
    }
    let k2k1 = compose(&k2, &k1).unwrap();
    assert!(!k2k1.is_zero(), "K2 ∘ K1 is nonzero");

    // Linear independence of the five classes in Mor homology.
    let end = MorComplex::new(&f8, &f8);
    let h = end.homology().unwrap();
    let mut ech = Echelon::new(h.dim);
    for (name, m) in [
        ("id", &f8.identity()),
        ("K1", &k1),
        ("K2", &k2),
        ("K2K1", &k2k1),
        ("K3", &k3),
    ] {
        let v = end.vec_of(m).unwrap();
        let coords = h.class_coords(&v);
        assert!(ech.insert(coords), "{name} is independent");
    }

    // Pairing dimension and the solved involution.
    let mor = MorComplex::new(&b.cfd_tinf_nu, &f8);
    assert_eq!(mor.homology().unwrap().dim, 5);
    let report = solve_involution(&b, &f8, &c, &iota, &cfg()).unwrap();
    assert!(!report.candidates.is_empty());
    for cand in &report.candidates {
        assert_eq!(cand.report.profile.min_poly, vec![1, 1, 1, 1], "min poly (t+1)^3");
    }
    pass(9, "figure-eight: printed classes independent, solver matches min-poly (t+1)^3, pairing dimension 5");
}

#[test]
fn criterion_10_involution_axioms() {
    let shipped = vec![
        ("unknot", cfk::unknot()),
        ("trefoil", cfk::trefoil_lh()),
        ("figure8", cfk::figure8()),
    ];
    for (name, (c, i)) in &shipped {
        let r = cfk::check_involution(c, i, 3).unwrap();
        assert!(r.pass(), "{name}: {:?}", r.failure);
    }
    for (n1, (c1, i1)) in &shipped {
        for (n2, (c2, i2)) in &shipped {
            let (s, si) = cfk::connected_sum(c1, i1, c2, i2).unwrap();
            let r = cfk::check_involution(&s, &si, 3).unwrap();
            assert!(r.pass(), "{n1} # {n2}: {:?}", r.failure);
        }
    }
    let (c, i) = cfk::unknot_free_basepoint();
    let (s, si) = cfk::connected_sum(&c, &i, &c, &i).unwrap();
    assert!(cfk::check_involution(&s, &si, 3).unwrap().pass());
    pass(10, "involution axioms hold for the shipped constants and every connected sum of shipped pairs");
}

#[test]
fn criterion_11_local_map_search() {
    let (c, i) = cfk::figure8();
    let r = cfk::local_map_search(&c, &i, cfk::Direction::FromTrivial, 3).unwrap();
    assert!(r.none_at_cap());
    let names: Vec<&str> = r.obstructions.iter().map(|(c, _)| c.as_str()).collect();
    assert!(names.contains(&"x") && names.contains(&"d+x"));
    assert!(r.obstructions.iter().all(|(_, d)| d == "d"));

    let (t, ti) = cfk::trivial_complex();
    let rt = cfk::local_map_search(&t, &ti, cfk::Direction::FromTrivial, 3).unwrap();
    assert!(rt.found.is_some());
    pass(11, "figure-eight from-trivial search is none-at-cap with the printed obstruction; trivial finds the identity");
}

#[test]
fn criterion_12_mainthm1_smoke() {
    let b = Builtins::shipped();
    let (c, iota) = cfk::trefoil_lh();
    let tref = translate(&c, -1, 0).unwrap().module;
    let solved = solve_involution(&b, &tref, &c, &iota, &cfg()).unwrap();
    let iota_d = &solved.candidates[0].morphism;
    let r = check_local_triviality(&b, &tref.identity(), iota_d, iota_d, &cfg()).unwrap();
    assert!(r.square_commutes && r.pairing_proxy_iso && r.pass);
    let zero = TypeDModule::zero_morphism(&tref, &tref);
    let rz = check_local_triviality(&b, &zero, iota_d, iota_d, &cfg()).unwrap();
    assert!(!rz.pairing_proxy_iso && !rz.pass);
    pass(12, "mainthm1 smoke: identity passes, zero fails the pairing condition");
}

#[test]
fn criterion_13_reproduce_determinism() {
    let exe = env!("CARGO_BIN_EXE_hfbord");
    for target in [
        "unknot",
        "az-model",
        "l2",
        "trefoil",
        "figure8",
        "mainthm1-smoke",
        "local-search-fig8",
    ] {
        let run = || {
            let out = Command::new(exe)
                .args(["reproduce", target])
                .output()
                .expect("binary runs");
            assert!(out.status.success(), "reproduce {target} failed");
            out.stdout
        };
        let first = run();
        let second = run();
        assert_eq!(first, second, "reproduce {target} is not byte-identical");
    }
    pass(13, "two consecutive runs of every reproduce target are byte-identical");
}
