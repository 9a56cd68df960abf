//! Acceptance suite: the worked transition families and the randomized
//! property checks, each printing one pass/fail line.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_transitions::cohomology::{
    ideal_image, minimal_relations, mult_kernel, narrow_by_interior_cones,
    paper_basis_candidates, ring_presentation, CohClass, GradedRing, Poly,
};
use toric_transitions::fan::Model;
use toric_transitions::kernel::mat::{smith_normal_form, IntMatrix};
use toric_transitions::kernel::rat::{int, rat_i64, Rat};
use toric_transitions::presentation::{anticones, validate, GitPresentation};
use toric_transitions::preset::preset;
use toric_transitions::transition::{
    check_conditions, crepancy_check, dtilde_coefficients, epsilon_select, fiber_character,
    hat_characters, support_function, verify_blowup_fan, verify_total_space, wall_chart,
    Pipeline, TransitionSpec,
};

struct Criterion {
    label: &'static str,
    budget: Duration,
    start: Instant,
}

impl Criterion {
    fn new(label: &'static str, budget_secs: u64) -> Criterion {
        Criterion { label, budget: Duration::from_secs(budget_secs), start: Instant::now() }
    }

    fn finish(self) {
        let elapsed = self.start.elapsed();
        let ok = elapsed <= self.budget;
        println!(
            "ACCEPTANCE {}: {} ({elapsed:.2?} of {:?} budget)",
            self.label,
            if ok { "PASS" } else { "FAIL (over budget)" },
            self.budget
        );
        assert!(ok, "{} exceeded its time budget: {elapsed:?}", self.label);
    }
}

fn quintic_pipeline() -> Pipeline {
    let doc = preset("quintic-conifold", &BTreeMap::new()).unwrap();
    Pipeline::build(doc.transition_spec().unwrap()).unwrap()
}

fn proj_spec(m: usize, k: usize, d: i64) -> TransitionSpec {
    let base = GitPresentation::from_i64(1, &vec![vec![1]; m], &[1]);
    let mut a = vec![0i64; m];
    a[m - 1] = d;
    let center: Vec<usize> = (0..k).collect();
    TransitionSpec::from_i64(base, &a, &center, None)
}

/// Example of the conifold transition: the blow-up fan has exactly the two
/// predicted cone families and the transform is anticanonical.
#[test]
fn criterion_1_conifold_blowup_and_crepancy() {
    let c = Criterion::new("1 (conifold blow-up fan + crepancy)", 5);
    let pipeline = quintic_pipeline();
    assert_eq!(pipeline.x_tilde.fan.maximal_cones.len(), 8);
    let checks = verify_blowup_fan(&pipeline);
    assert!(checks.minus_equals_base.matches);
    assert!(checks.plus_families.matches);
    assert_eq!((checks.type1_count, checks.type2_count), (2, 6));

    let spec = &pipeline.spec;
    let support = support_function(&pipeline.base.fan, &spec.divisor).unwrap();
    let cert = crepancy_check(spec, &pipeline.hat, &pipeline.base.fan, &support).unwrap();
    assert!(cert.holds);
    // Dtilde coefficients are exactly sum of hats plus the exceptional one.
    let dt = dtilde_coefficients(spec);
    assert_eq!(dt, vec![1, 1, 1, 1, 1, 1].into_iter().map(BigInt::from).collect::<Vec<_>>());
    // And the class equals minus the canonical class of the blow-up.
    let anticanonical: Vec<BigInt> = (0..=1)
        .map(|coord| {
            pipeline
                .hat
                .characters
                .iter()
                .map(|c| c[coord].clone())
                .sum()
        })
        .collect();
    assert_eq!(cert.dtilde, anticanonical);
    c.finish();
}

/// Nef threshold for blow-ups of projective space along a point: d >= k - 1.
#[test]
fn criterion_2_projective_nef_threshold() {
    let c = Criterion::new("2 (projective nef threshold)", 10);
    for (d, expected) in [(1, false), (2, false), (3, true), (4, true), (5, true), (6, true)] {
        let spec = proj_spec(5, 4, d);
        let pipeline = Pipeline::build(spec.clone()).unwrap();
        let dt = dtilde_coefficients(&spec);
        let support = support_function(&pipeline.x_tilde.fan, &dt).unwrap();
        assert_eq!(support.nef(), expected, "m=5 k=4 d={d}");
    }
    c.finish();
}

/// Weighted-projective nef threshold: the flag flips at d = c_max (k - 1).
#[test]
fn criterion_3_weighted_nef_threshold() {
    let c = Criterion::new("3 (weighted nef threshold)", 10);
    for (d, expected) in [(1, false), (2, true), (3, true), (4, true)] {
        let base = GitPresentation::from_i64(
            1,
            &[vec![1], vec![1], vec![1], vec![2], vec![2], vec![1]],
            &[1],
        );
        let spec = TransitionSpec::from_i64(base, &[0, 0, 0, 0, 0, d], &[3, 4], None);
        let pipeline = Pipeline::build(spec.clone()).unwrap();
        let dt = dtilde_coefficients(&spec);
        let support = support_function(&pipeline.x_tilde.fan, &dt).unwrap();
        assert_eq!(support.nef(), expected, "weights (2,2) center, d={d}");
    }
    c.finish();
}

fn polys_equal_up_to_scalar(ring: &GradedRing, a: &Poly, b: &Poly) -> bool {
    let na = ring.nf(a);
    let nb = ring.nf(b);
    if na.degree != nb.degree || na.coords.len() != nb.coords.len() {
        return false;
    }
    scalar_multiple(&na.coords, &nb.coords)
}

fn scalar_multiple(a: &[Rat], b: &[Rat]) -> bool {
    let Some(i) = a.iter().position(|x| !x.is_zero()) else {
        return b.iter().all(Zero::is_zero);
    };
    if b[i].is_zero() {
        return false;
    }
    let ratio = &a[i] / &b[i];
    a.iter().zip(b).all(|(x, y)| x == &(y * &ratio))
}

/// The degree-five hypersurface family: presentation, narrow module,
/// multiplication kernel and both conditions, across three regimes.
#[test]
fn criterion_4_hypersurface_family() {
    let c = Criterion::new("4 (hypersurface family rings + conditions)", 30);
    // (m, k, d) = (5, 2, 5).
    let pipeline = Pipeline::build(proj_spec(5, 2, 5)).unwrap();
    let report = check_conditions(&pipeline).unwrap();
    let ring = &report.t_bar_ring;
    assert_eq!(report.t_bar_dims.iter().sum::<usize>(), 8);

    // Relations {e u^3, u^5, (-5u + e) e} up to scalar and order.
    let expected = [
        poly(&[(vec![3, 1], 1)]),
        poly(&[(vec![5, 0], 1)]),
        poly(&[(vec![1, 1], -5), (vec![0, 2], 1)]),
    ];
    let relations = minimal_relations(ring);
    assert_eq!(relations.len(), 3);
    for e in &expected {
        assert!(
            relations.iter().any(|r| scalar_poly_eq(r, e)),
            "missing relation {}",
            ring.poly_string(e)
        );
    }

    // Narrow space equals the ideal <-5u + e, u^2>.
    let untwisted_model = pipeline.t_bar.sector_model(
        &toric_transitions::fan::twisted_sectors(
            &pipeline.t_bar.presentation,
            &pipeline.t_bar.family,
        )
        .unwrap()
        .into_iter()
        .find(|s| s.is_untwisted())
        .unwrap(),
    )
    .unwrap();
    let narrow = narrow_by_interior_cones(&untwisted_model, ring).unwrap();
    let uf = Poly::linear(&[int(-5), int(1)]);
    let usq = poly(&[(vec![2, 0], 1)]);
    let ideal = ideal_image(ring, &[uf.clone(), usq.clone()]);
    assert!(narrow.equals(&ideal));

    // ker(e . -) = u_f H* (+) C u^3: the extra class lives in one degree.
    let e_poly = Poly::linear(&[int(0), int(1)]);
    let kernel = mult_kernel(ring, &e_poly);
    let uf_ideal = ideal_image(ring, &[uf.clone()]);
    let ucube_class = ring.nf(&poly(&[(vec![3, 0], 1)]));
    for d in 0..=ring.degree_cap {
        if d == 3 {
            let span3 = toric_transitions::kernel::solve::Subspace::from_spanning(
                ring.dim_at(3),
                &[ucube_class.coords.clone()],
            );
            let sum = uf_ideal.per_degree[3].sum(&span3);
            assert_eq!(kernel.per_degree[3], sum, "kernel mismatch in degree 3");
            assert_eq!(
                kernel.per_degree[3].dim(),
                uf_ideal.per_degree[3].dim() + 1,
                "sum is not direct in degree 3"
            );
        } else {
            assert_eq!(kernel.per_degree[d], uf_ideal.per_degree[d], "kernel mismatch in degree {d}");
        }
    }

    assert!(report.condition1.holds);
    assert!(!report.condition2.holds);

    // (5, 4, 5): both conditions hold; also on the ones-divisor variant.
    let report2 = check_conditions(&Pipeline::build(proj_spec(5, 4, 5)).unwrap()).unwrap();
    assert!(report2.condition1.holds && report2.condition2.holds);
    let cubic = preset("cubic-transition", &BTreeMap::new()).unwrap();
    let report3 =
        check_conditions(&Pipeline::build(cubic.transition_spec().unwrap()).unwrap()).unwrap();
    assert!(report3.condition1.holds && report3.condition2.holds);

    // d = k - 1 instances satisfy condition (2).
    for (m, k) in [(5usize, 2usize), (6, 3)] {
        let d = (k - 1) as i64;
        let report = check_conditions(&Pipeline::build(proj_spec(m, k, d)).unwrap()).unwrap();
        assert!(report.condition1.holds, "(m,k,d)=({m},{k},{d})");
        assert!(report.condition2.holds, "(m,k,d)=({m},{k},{d})");
    }
    c.finish();
}

fn poly(terms: &[(Vec<u32>, i64)]) -> Poly {
    let mut p = Poly::zero();
    for (mono, c) in terms {
        p.add_term(mono.clone(), int(*c));
    }
    p
}

fn scalar_poly_eq(a: &Poly, b: &Poly) -> bool {
    if a.terms.len() != b.terms.len() {
        return false;
    }
    let monos: Vec<&Vec<u32>> = a.terms.keys().collect();
    if b.terms.keys().collect::<Vec<_>>() != monos {
        return false;
    }
    let av: Vec<Rat> = a.terms.values().cloned().collect();
    let bv: Vec<Rat> = b.terms.values().cloned().collect();
    scalar_multiple(&av, &bv)
}

/// The weighted orbifold example: sector inventory, sector rings, and the
/// failure of condition (1) with the predicted witness class.
#[test]
fn criterion_5_weighted_orbifold_sectors() {
    let c = Criterion::new("5 (weighted orbifold sectors + witness)", 10);
    let doc = preset("weighted-p11122-8", &BTreeMap::new()).unwrap();
    let spec = doc.transition_spec().unwrap();

    // Base sector list {0, 1/2} and the half-sector ring C[u]/<u^2>.
    let base = Model::analyze(spec.base.clone()).unwrap();
    let base_ring = ring_presentation(
        &base,
        &paper_basis_candidates(&base.presentation, None, None),
    )
    .unwrap();
    let sectors = toric_transitions::cohomology::chen_ruan(&base, &base_ring).unwrap();
    assert_eq!(sectors.len(), 2);
    let keys: Vec<Vec<Rat>> = sectors.iter().map(|(s, _, _)| s.nu.clone()).collect();
    assert!(keys.contains(&vec![Rat::zero()]));
    assert!(keys.contains(&vec![rat_i64(1, 2)]));
    let half = sectors.iter().find(|(s, _, _)| !s.is_untwisted()).unwrap();
    assert_eq!(half.2.dims(), vec![1, 1]);
    let half_rels = minimal_relations(&half.2);
    assert_eq!(half_rels.len(), 1);
    assert!(scalar_poly_eq(&half_rels[0], &poly(&[(vec![2], 1)])));

    // Compactified total space: the half sector ring is C[u,e]/<u^2, (-8u+e)e>
    // and condition (1) fails with witness (-8u + e) u.
    let pipeline = Pipeline::build(spec).unwrap();
    let report = check_conditions(&pipeline).unwrap();
    assert!(!report.condition1.holds);
    let half_detail = report
        .sectors
        .iter()
        .find(|s| s.key.iter().any(|x| !x.is_zero()))
        .unwrap();
    assert_eq!(half_detail.dims, vec![1, 2, 1]);
    let expected_rels = [
        poly(&[(vec![2, 0], 1)]),
        poly(&[(vec![1, 1], -8), (vec![0, 2], 1)]),
    ];
    let rels = minimal_relations(&half_detail.ring);
    assert_eq!(rels.len(), 2);
    for e in &expected_rels {
        assert!(rels.iter().any(|r| scalar_poly_eq(r, e)));
    }
    assert!(!half_detail.injective);
    assert_eq!(half_detail.kernel_witnesses.len(), 1);
    let (degree, coords) = &half_detail.kernel_witnesses[0];
    let witness = CohClass { degree: *degree, coords: coords.clone() };
    let witness_poly = half_detail.ring.class_to_poly(&witness);
    let expected_witness = Poly::linear(&[int(-8), int(1)]).mul(&Poly::linear(&[int(1), int(0)]));
    assert!(
        polys_equal_up_to_scalar(&half_detail.ring, &witness_poly, &expected_witness),
        "witness {} is not (-8u+e)u up to scalar",
        half_detail.ring.poly_string(&witness_poly)
    );
    c.finish();
}

/// Structural statements about the total spaces hold on every preset, the
/// blow-up cone families match the predicted counts, and the two walls have
/// the expected crepancy signs.
#[test]
fn criterion_6_structure_on_every_preset() {
    let c = Criterion::new("6 (total-space structure on all presets)", 30);
    for name in [
        "quintic-conifold",
        "proj-hypersurface",
        "cubic-transition",
        "product-proj",
        "weighted-p11122-8",
    ] {
        let start = Instant::now();
        let doc = preset(name, &BTreeMap::new()).unwrap();
        let spec = doc.transition_spec().unwrap();
        let k = spec.center.len();
        let pipeline = Pipeline::build(spec).unwrap();
        let checks = verify_total_space(&pipeline).unwrap();
        assert!(checks.all_pass(), "{name}: {checks:?}");

        // Cone-count formula for the plus-side blow-up fan.
        let fan_checks = verify_blowup_fan(&pipeline);
        assert!(fan_checks.minus_equals_base.matches, "{name}");
        assert!(fan_checks.plus_families.matches, "{name}");
        let containing = pipeline
            .base
            .fan
            .maximal_cones
            .iter()
            .filter(|cone| pipeline.spec.center.iter().all(|i| cone.contains(i)))
            .count();
        assert_eq!(fan_checks.type2_count, k * containing, "{name}");
        assert_eq!(
            pipeline.x_tilde.fan.maximal_cones.len(),
            fan_checks.type1_count + fan_checks.type2_count,
            "{name}"
        );

        // Wall crepancy signs: the total-space wall is K-equivalent, the
        // blow-up wall is discrepant once the center has codimension two.
        let ts = wall_chart(&pipeline.t_bar, &pipeline.t_tilde).unwrap();
        assert!(ts.crepant, "{name}: total-space wall not crepant");
        let bl = wall_chart(&pipeline.x_minus, &pipeline.x_tilde).unwrap();
        if k >= 2 {
            assert!(!bl.crepant, "{name}: blow-up wall unexpectedly crepant");
        }

        // The exceptional and fiber classes multiply to zero in the
        // compactified total-space ring.
        let report = check_conditions(&pipeline).unwrap();
        let ring = &report.t_bar_ring;
        let e_class = toric_transitions::cohomology::class_coordinates(
            &pipeline.t_bar.presentation,
            pipeline.t_bar.extended(),
            &ring.basis_vectors,
            &pipeline.t_bar.presentation.character_rat(pipeline.e_index),
        )
        .unwrap();
        let f_class = toric_transitions::cohomology::class_coordinates(
            &pipeline.t_bar.presentation,
            pipeline.t_bar.extended(),
            &ring.basis_vectors,
            &pipeline.t_bar.presentation.character_rat(pipeline.f_index),
        )
        .unwrap();
        let product = Poly::linear(&e_class).mul(&Poly::linear(&f_class));
        let nf = ring.nf(&product);
        assert!(
            nf.coords.iter().all(Zero::is_zero),
            "{name}: u_e * u_f does not vanish"
        );

        assert!(
            start.elapsed() < Duration::from_secs(60),
            "{name} exceeded the per-preset budget"
        );
    }
    c.finish();
}

/// Restriction maps are ring maps: the normal form of an image of a product
/// equals the product of the images, on random homogeneous pairs.
#[test]
fn restriction_is_a_ring_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let pipeline = quintic_pipeline();
    let report = check_conditions(&pipeline).unwrap();
    let ring = &report.t_bar_ring;
    let e_class = toric_transitions::cohomology::class_coordinates(
        &pipeline.t_bar.presentation,
        pipeline.t_bar.extended(),
        &ring.basis_vectors,
        &pipeline.t_bar.presentation.character_rat(pipeline.e_index),
    )
    .unwrap();
    let restriction = toric_transitions::cohomology::restriction_map(ring, &e_class).unwrap();
    let random_poly = |rng: &mut ChaCha8Rng, d: usize| -> Poly {
        let mut p = Poly::zero();
        for mono in random_monomials(d, ring.h()) {
            p.add_term(mono, int(rng.gen_range(-3..=3i64)));
        }
        p
    };
    let mut checked = 0;
    while checked < 50 {
        let d1 = rng.gen_range(0..=2usize);
        let d2 = rng.gen_range(0..=2usize);
        let a = random_poly(&mut rng, d1);
        let b = random_poly(&mut rng, d2);
        // Image of nf(ab) under the matrices.
        let product_class = ring.nf(&a.mul(&b));
        let image_of_product = apply(
            &restriction.matrices[d1 + d2],
            &product_class.coords,
        );
        // Product of images computed in the target ring.
        let ia = apply(&restriction.matrices[d1], &ring.nf(&a).coords);
        let ib = apply(&restriction.matrices[d2], &ring.nf(&b).coords);
        let pa = target_poly(&restriction.target, d1, &ia);
        let pb = target_poly(&restriction.target, d2, &ib);
        let product_of_images = restriction.target.nf(&pa.mul(&pb));
        assert_eq!(image_of_product, product_of_images.coords);
        checked += 1;
    }
}

fn random_monomials(d: usize, h: usize) -> Vec<Vec<u32>> {
    // All monomials of total degree d in h variables.
    fn rec(pos: usize, rem: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = rem as u32;
            out.push(cur.clone());
            return;
        }
        for t in 0..=rem {
            cur[pos] = t as u32;
            rec(pos + 1, rem - t, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; h];
    if h > 0 {
        rec(0, d, &mut cur, &mut out);
    }
    out
}

fn apply(matrix: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    matrix
        .iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn target_poly(ring: &GradedRing, degree: usize, coords: &[Rat]) -> Poly {
    ring.class_to_poly(&CohClass { degree, coords: coords.to_vec() })
}

/// Wall charts of the conifold example: the total-space wall is crepant with
/// unit constant; the blow-up wall is discrepant.
#[test]
fn criterion_7_wall_charts() {
    let c = Criterion::new("7 (wall charts)", 5);
    let pipeline = quintic_pipeline();
    let chart = wall_chart(&pipeline.t_bar, &pipeline.t_tilde).unwrap();
    assert_eq!(chart.e, vec![BigInt::zero(), BigInt::one()]);
    assert!(chart.pairing_sum.is_zero());
    assert!(chart.crepant);
    assert_eq!(chart.c_frak, Rat::one());
    let chart2 = wall_chart(&pipeline.x_minus, &pipeline.x_tilde).unwrap();
    assert_eq!(chart2.e, vec![BigInt::zero(), BigInt::one()]);
    assert_eq!(chart2.pairing_sum, BigInt::one());
    assert!(!chart2.crepant);
    assert!(chart2.warning.is_some());
    c.finish();
}

// ----- Criterion 8: randomized property suites, fixed seeds. -----

/// Random valid presentation: weighted projective or a product of two
/// projective spaces, occasionally with an extra extended-style character.
fn random_proper_presentation(rng: &mut ChaCha8Rng) -> GitPresentation {
    if rng.gen_bool(0.5) {
        let q = rng.gen_range(2..=5usize);
        let mut chars: Vec<Vec<i64>> = (0..q).map(|_| vec![rng.gen_range(1..=3i64)]).collect();
        chars.push(vec![1]);
        GitPresentation::from_i64(1, &chars, &[1])
    } else {
        let a = rng.gen_range(1..=3usize);
        let b = rng.gen_range(1..=2usize);
        let mut chars = Vec::new();
        for _ in 0..=a {
            chars.push(vec![1, 0]);
        }
        for _ in 0..=b {
            chars.push(vec![0, 1]);
        }
        GitPresentation::from_i64(2, &chars, &[1, 1])
    }
}

/// Random valid spec over a random proper base with a genuine cone center.
fn random_spec(rng: &mut ChaCha8Rng) -> TransitionSpec {
    loop {
        let base = random_proper_presentation(rng);
        let m = base.char_count();
        let family = anticones(&base).unwrap();
        let Ok(model) = Model::analyze(base.clone()) else { continue };
        let k = rng.gen_range(1..=3usize.min(m - base.torus_rank));
        let mut center: Vec<usize> = (0..m).collect();
        for _ in 0..m {
            let i = rng.gen_range(0..center.len());
            center.swap(i, 0);
        }
        center.truncate(k);
        center.sort_unstable();
        let complement: Vec<usize> = (0..m).filter(|i| !center.contains(i)).collect();
        if !family.contains(&complement) {
            continue;
        }
        if center.iter().any(|i| model.extended().contains(i)) {
            continue;
        }
        let a: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3i64)).collect();
        let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=2i64)).collect();
        let use_weights = rng.gen_bool(0.3);
        return TransitionSpec::from_i64(
            base,
            &a,
            &center,
            use_weights.then_some(weights.as_slice()),
        );
    }
}

/// Anticone upward closure over random supersets.
#[test]
fn criterion_8a_upward_closure() {
    let c = Criterion::new("8a (anticone upward closure)", 120);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut checked = 0usize;
    for _ in 0..100 {
        let p = random_proper_presentation(&mut rng);
        let family = anticones(&p).unwrap();
        let m = p.char_count();
        for _ in 0..2 {
            let j = &family.minimal[rng.gen_range(0..family.minimal.len())];
            let mut superset: Vec<usize> = j.clone();
            for extra in 0..m {
                if rng.gen_bool(0.5) && !superset.contains(&extra) {
                    superset.push(extra);
                }
            }
            superset.sort_unstable();
            assert!(
                p.is_anticone(&superset).unwrap(),
                "superset {superset:?} of {j:?} infeasible"
            );
            checked += 1;
        }
    }
    assert!(checked >= 200);
    c.finish();
}

/// Smith normal form round trip on random integer matrices.
#[test]
fn criterion_8b_snf_round_trip() {
    let c = Criterion::new("8b (SNF round trip)", 120);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..100 {
        let rows = rng.gen_range(1..=8usize);
        let cols = rng.gen_range(1..=8usize);
        let entries: Vec<BigInt> = (0..rows * cols)
            .map(|_| BigInt::from(rng.gen_range(-9..=9i64)))
            .collect();
        let m = IntMatrix::new(rows, cols, entries);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.u.mul(&snf.s).mul(&snf.v), m);
        assert_eq!(snf.u.det().abs(), BigInt::one());
        assert_eq!(snf.v.det().abs(), BigInt::one());
        let diag = snf.diagonal();
        for i in 0..diag.len().saturating_sub(1) {
            if !diag[i + 1].is_zero() {
                assert!((&diag[i + 1] % &diag[i]).is_zero());
            }
        }
    }
    c.finish();
}

/// The crepancy identity holds for every spec whose transform follows the
/// displayed formula, across random valid specs.
#[test]
fn criterion_8c_crepancy_universal() {
    let c = Criterion::new("8c (universal crepancy identity)", 120);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for trial in 0..100 {
        let spec = random_spec(&mut rng);
        let base = Model::analyze(spec.base.clone()).unwrap();
        let support = support_function(&base.fan, &spec.divisor).unwrap();
        let hat = toric_transitions::transition::HatPresentation {
            characters: hat_characters(&spec),
            labels: {
                let mut l = spec.base.labels.clone();
                l.push("e".into());
                l
            },
            e_index: spec.base.char_count(),
            omega_plus: vec![],
            omega_minus: vec![],
            selected_epsilon: Rat::one(),
        };
        let cert = crepancy_check(&spec, &hat, &base.fan, &support).unwrap();
        assert!(cert.holds, "trial {trial}: crepancy identity failed for {spec:?}");
    }
    c.finish();
}

/// Narrow-by-interior-cones equals the fiber ideal on random total spaces.
#[test]
fn criterion_8d_narrow_equals_fiber_ideal() {
    let c = Criterion::new("8d (narrow = fiber ideal on total spaces)", 120);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut done = 0usize;
    while done < 100 {
        let base = random_proper_presentation(&mut rng);
        let m = base.char_count();
        if m > 5 {
            continue; // keep the total space at most six characters
        }
        let a: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=3i64)).collect();
        let Ok(base_model) = Model::analyze(base.clone()) else { continue };
        let divisor: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        let support = support_function(&base_model.fan, &divisor).unwrap();
        if !support.nef() {
            continue;
        }
        // Total space characters: base plus the dual fiber class.
        let r = base.torus_rank;
        let mut chars = base.characters.clone();
        let mut fiber = vec![BigInt::zero(); r];
        for (ai, d) in divisor.iter().zip(&base.characters) {
            for (x, di) in fiber.iter_mut().zip(d) {
                *x -= ai * di;
            }
        }
        chars.push(fiber);
        let mut labels = base.labels.clone();
        labels.push("f".into());
        let total = GitPresentation::with_labels(r, chars, base.stability.clone(), labels);
        let model = Model::analyze(total).unwrap();
        let ring = ring_presentation(
            &model,
            &paper_basis_candidates(&model.presentation, None, Some(m)),
        )
        .unwrap();
        let narrow = narrow_by_interior_cones(&model, &ring).unwrap();
        let f_class = toric_transitions::cohomology::class_coordinates(
            &model.presentation,
            model.extended(),
            &ring.basis_vectors,
            &model.presentation.character_rat(m),
        )
        .unwrap();
        let ideal = ideal_image(&ring, &[Poly::linear(&f_class)]);
        assert!(
            narrow.equals(&ideal),
            "narrow {:?} != fiber ideal {:?} for a={a:?}",
            narrow.dims(),
            ideal.dims()
        );
        done += 1;
    }
    c.finish();
}

/// Betti numbers of random proper presentations satisfy duality.
#[test]
fn criterion_8e_poincare_duality() {
    let c = Criterion::new("8e (Betti duality on proper presets)", 120);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for _ in 0..100 {
        let p = random_proper_presentation(&mut rng);
        let model = Model::analyze(p).unwrap();
        let ring = ring_presentation(
            &model,
            &paper_basis_candidates(&model.presentation, None, None),
        )
        .unwrap();
        let dims = ring.dims();
        let n = dims.len() - 1;
        for k in 0..=n {
            assert_eq!(dims[k], dims[n - k], "duality failure: {dims:?}");
        }
    }
    c.finish();
}

/// Halving the selected epsilon never changes the anticone families.
#[test]
fn criterion_8f_epsilon_halving() {
    let c = Criterion::new("8f (epsilon-halving chamber constancy)", 120);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    for _ in 0..100 {
        let spec = random_spec(&mut rng);
        let mut chars = hat_characters(&spec);
        chars.push(fiber_character(&spec));
        let eps = epsilon_select(&chars, &spec.base.stability).unwrap();
        let labels: Vec<String> = (0..chars.len()).map(|i| format!("c{i}")).collect();
        for sign in [1i64, -1] {
            let mut omega_full = spec.base.stability.clone();
            omega_full.push(int(sign) * &eps);
            let mut omega_half = spec.base.stability.clone();
            omega_half.push(int(sign) * &eps / int(2));
            let p_full = GitPresentation::with_labels(
                spec.base.torus_rank + 1,
                chars.clone(),
                omega_full,
                labels.clone(),
            );
            let p_half = GitPresentation::with_labels(
                spec.base.torus_rank + 1,
                chars.clone(),
                omega_half,
                labels.clone(),
            );
            let fam_full = anticones(&p_full).unwrap();
            let fam_half = anticones(&p_half).unwrap();
            assert_eq!(
                fam_full.minimal, fam_half.minimal,
                "chamber changed under halving for {spec:?}"
            );
        }
    }
    c.finish();
}

/// Full pipeline verdicts of the presets, as one summary line each.
#[test]
fn preset_verdict_summary() {
    // The orbifold preset's condition (2) verdict is not stated in the
    // reference computations; a hand check finds the kernel of the
    // exceptional class picks up an extra degree-8 class on the untwisted
    // sector, so it fails alongside condition (1).
    let expectations = [
        ("quintic-conifold", true, false),
        ("cubic-transition", true, true),
        ("weighted-p11122-8", false, false),
    ];
    for (name, c1, c2) in expectations {
        let doc = preset(name, &BTreeMap::new()).unwrap();
        let pipeline = Pipeline::build(doc.transition_spec().unwrap()).unwrap();
        let report = check_conditions(&pipeline).unwrap();
        assert_eq!(report.condition1.holds, c1, "{name} condition (1)");
        assert_eq!(report.condition2.holds, c2, "{name} condition (2)");
        assert!(report.paper_inconsistency.is_none());
        println!(
            "PRESET {name}: condition1={} condition2={}",
            report.condition1.holds, report.condition2.holds
        );
    }
}

/// Validation is rejected cleanly for wall-sitting stability conditions.
#[test]
fn wall_sitting_is_rejected() {
    let p = GitPresentation::from_i64(2, &[vec![1, 0], vec![0, 1]], &[1, 0]);
    let report = validate(&p).unwrap();
    assert!(!report.is_valid());
}
