//! The transition pipeline: blow-up and total-space presentations, epsilon
//! selection, support functions and nef flags, section filters, crepancy
//! certificates, wall charts, and the two cohomological conditions.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::cohomology::{
    chen_ruan, class_coordinates, ideal_image, minimal_relations, mult_kernel,
    narrow_by_interior_cones, paper_basis_candidates, restriction_map, ring_presentation,
    BasisCandidate, GradedRing, Poly, RestrictionMap,
};
use crate::error::{Error, Result};
use crate::fan::{classify_sectors_int_frac, interior_cones, Model, StackyFan};
use crate::kernel::cone::{polar_cone, PolyCone};
use crate::kernel::mat::{smith_normal_form, IntMatrix};
use crate::kernel::rat::{
    dot, dot_int_rat, from_int_vec, int, is_zero_vec, neg, primitive, rat_to_string, Rat,
};
use crate::kernel::solve::{coordinates_in_span, solve};
use crate::presentation::{divisor_class_data, paper_indices, GitPresentation};

/// Input data of a transition: a base presentation, a divisor, a blow-up
/// center, optional weights, and an optional explicit epsilon.
#[derive(Debug, Clone)]
pub struct TransitionSpec {
    pub base: GitPresentation,
    pub divisor: Vec<BigInt>,
    pub center: Vec<usize>,
    pub weights: Option<Vec<BigInt>>,
    pub epsilon: Option<Rat>,
}

impl TransitionSpec {
    pub fn from_i64(
        base: GitPresentation,
        divisor: &[i64],
        center: &[usize],
        weights: Option<&[i64]>,
    ) -> TransitionSpec {
        TransitionSpec {
            base,
            divisor: divisor.iter().map(|&x| BigInt::from(x)).collect(),
            center: center.to_vec(),
            weights: weights.map(|w| w.iter().map(|&x| BigInt::from(x)).collect()),
            epsilon: None,
        }
    }

    pub fn resolved_weights(&self) -> Vec<BigInt> {
        match &self.weights {
            Some(w) => w.clone(),
            None => vec![BigInt::one(); self.center.len()],
        }
    }

    pub fn weight_sum(&self) -> BigInt {
        self.resolved_weights().iter().sum()
    }

    pub fn is_weighted(&self) -> bool {
        self.resolved_weights().iter().any(|w| !w.is_one())
    }
}

/// The hat presentation over the extended torus, with both stability sides.
#[derive(Debug, Clone)]
pub struct HatPresentation {
    pub characters: Vec<Vec<BigInt>>,
    pub labels: Vec<String>,
    pub e_index: usize,
    pub omega_plus: Vec<Rat>,
    pub omega_minus: Vec<Rat>,
    pub selected_epsilon: Rat,
}

impl HatPresentation {
    pub fn presentation_at(&self, omega: &[Rat]) -> GitPresentation {
        GitPresentation::with_labels(
            omega.len(),
            self.characters.clone(),
            omega.to_vec(),
            self.labels.clone(),
        )
    }
}

/// Hat characters for the blow-up: `(D_i, w_i)` on the center, `(D_i, 0)`
/// elsewhere, and the exceptional character `(0, -1)`.
pub fn hat_characters(spec: &TransitionSpec) -> Vec<Vec<BigInt>> {
    let r = spec.base.torus_rank;
    let weights = spec.resolved_weights();
    let mut out = Vec::with_capacity(spec.base.char_count() + 1);
    for (i, d) in spec.base.characters.iter().enumerate() {
        let mut v = d.clone();
        match spec.center.iter().position(|&c| c == i) {
            Some(k) => v.push(weights[k].clone()),
            None => v.push(BigInt::zero()),
        }
        out.push(v);
    }
    let mut e = vec![BigInt::zero(); r + 1];
    e[r] = -BigInt::one();
    out.push(e);
    out
}

/// The fiber character `-D~` over the extended torus.
pub fn fiber_character(spec: &TransitionSpec) -> Vec<BigInt> {
    let r = spec.base.torus_rank;
    let w = spec.weight_sum();
    let mut v = vec![BigInt::zero(); r + 1];
    for (a, d) in spec.divisor.iter().zip(&spec.base.characters) {
        for (coord, x) in v.iter_mut().take(r).zip(d) {
            *coord -= a * x;
        }
    }
    v[r] = BigInt::one() - w;
    v
}

/// The proper-transform divisor coefficients on the hat presentation:
/// `a_i` on the old characters and `1 + sum w_i (a_i - 1)` on the
/// exceptional one.
pub fn dtilde_coefficients(spec: &TransitionSpec) -> Vec<BigInt> {
    let weights = spec.resolved_weights();
    let mut coeffs = spec.divisor.clone();
    let mut e_coeff = BigInt::one();
    for (k, &i) in spec.center.iter().enumerate() {
        e_coeff += &weights[k] * (&spec.divisor[i] - BigInt::one());
    }
    coeffs.push(e_coeff);
    coeffs
}

/// Smallest positive parameter at which the vertical stability line meets a
/// span of at most `r` characters, halved; `1` when no such crossing exists.
pub fn epsilon_select(characters: &[Vec<BigInt>], omega: &[Rat]) -> Result<Rat> {
    let r = omega.len();
    let dim = r + 1;
    for c in characters {
        assert_eq!(c.len(), dim, "hat characters must live over the extended torus");
    }
    let mut criticals: BTreeSet<Rat> = BTreeSet::new();
    let m = characters.len();
    let mut target: Vec<Rat> = omega.to_vec();
    target.push(Rat::zero());

    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    while let Some(subset) = stack.pop() {
        if !subset.is_empty() {
            // Solve sum lambda_b B_b - t e_last = (omega, 0).
            let cols: Vec<Vec<Rat>> = subset
                .iter()
                .map(|&b| from_int_vec(&characters[b]))
                .chain(std::iter::once({
                    let mut v = vec![Rat::zero(); dim];
                    v[r] = -Rat::one();
                    v
                }))
                .collect();
            let rows: Vec<Vec<Rat>> = (0..dim)
                .map(|coord| cols.iter().map(|c| c[coord].clone()).collect())
                .collect();
            if let Some(sol) = solve(&rows, &target) {
                let kernel = crate::kernel::solve::kernel_basis(&rows, cols.len());
                let t_free = kernel.iter().any(|k| !k[cols.len() - 1].is_zero());
                if !t_free {
                    // Both signs matter: the minus-side stability descends.
                    let t = sol[cols.len() - 1].clone();
                    if !t.is_zero() {
                        criticals.insert(t.abs());
                    }
                }
            }
        }
        if subset.len() < r {
            let start = subset.last().map_or(0, |&x| x + 1);
            for b in start..m {
                let mut next = subset.clone();
                next.push(b);
                stack.push(next);
            }
        }
    }
    match criticals.into_iter().next() {
        Some(first) => Ok(first / int(2)),
        None => Ok(Rat::one()),
    }
}

/// Assemble and validate the hat presentation for a blow-up spec.
pub fn blowup_presentation(spec: &TransitionSpec, base: &Model) -> Result<HatPresentation> {
    let m = spec.base.char_count();
    if spec.center.is_empty() {
        return Err(Error::Validation("blow-up center is empty".into()));
    }
    let mut sorted = spec.center.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != spec.center.len() || sorted.iter().any(|&i| i >= m) {
        return Err(Error::Validation(format!(
            "center {:?} must be distinct in-range indices",
            spec.center
        )));
    }
    if spec.divisor.len() != m {
        return Err(Error::Validation("divisor coefficient count mismatch".into()));
    }
    let weights = spec.resolved_weights();
    if weights.len() != sorted.len() {
        return Err(Error::Validation("one weight per center index is required".into()));
    }
    if weights.iter().any(|w| !w.is_positive()) {
        return Err(Error::Validation("weights must be positive".into()));
    }
    let s = base.extended().to_vec();
    if sorted.iter().any(|i| s.contains(i)) {
        return Err(Error::CenterMeetsExtendedSet { center: paper_indices(&sorted), s: paper_indices(&s) });
    }
    let complement: Vec<usize> = (0..m).filter(|i| !sorted.contains(i)).collect();
    if !base.family.contains(&complement) {
        return Err(Error::CenterNotCone { center: paper_indices(&sorted) });
    }

    let mut characters = hat_characters(spec);
    let mut labels = spec.base.labels.clone();
    labels.push("e".into());
    // Walls of the full arrangement, fiber character included, so one
    // epsilon serves the blow-up and both total spaces.
    characters.push(fiber_character(spec));
    let auto_eps = epsilon_select(&characters, &spec.base.stability)?;
    characters.pop();

    let epsilon = spec.epsilon.clone().unwrap_or_else(|| auto_eps.clone());
    if !epsilon.is_positive() {
        return Err(Error::Validation("epsilon must be positive".into()));
    }
    let mut omega_plus = spec.base.stability.clone();
    omega_plus.push(epsilon.clone());
    let mut omega_minus = spec.base.stability.clone();
    omega_minus.push(-epsilon.clone());
    let hat = HatPresentation {
        characters,
        labels,
        e_index: m,
        omega_plus,
        omega_minus,
        selected_epsilon: epsilon.clone(),
    };

    // An explicit epsilon must select the same chamber as the automatic one.
    if spec.epsilon.is_some() && spec.epsilon != Some(auto_eps.clone()) {
        for side in [true, false] {
            let user = if side { &hat.omega_plus } else { &hat.omega_minus };
            let mut auto = spec.base.stability.clone();
            auto.push(if side { auto_eps.clone() } else { -auto_eps.clone() });
            let p_user = hat.presentation_at(user);
            let p_auto = hat.presentation_at(&auto);
            let fam_user = crate::presentation::validate(&p_user)?;
            let fam_auto = crate::presentation::validate(&p_auto)?;
            if !fam_user.is_valid() || fam_user.minimal_anticones != fam_auto.minimal_anticones {
                return Err(Error::ChamberChanged {
                    detail: format!(
                        "epsilon {} selects a different chamber than {}",
                        rat_to_string(&epsilon),
                        rat_to_string(&auto_eps)
                    ),
                });
            }
        }
    }

    // Both sides must validate.
    for omega in [&hat.omega_plus, &hat.omega_minus] {
        let report = crate::presentation::validate(&hat.presentation_at(omega))?;
        if !report.is_valid() {
            return Err(Error::OmegaOnWall);
        }
    }
    Ok(hat)
}

/// Per-cone linear data of the support function of a divisor.
#[derive(Debug, Clone)]
pub struct SupportFunctionData {
    /// (maximal cone, linear form) pairs.
    pub m_sigma: Vec<(Vec<usize>, Vec<Rat>)>,
    pub cartier: bool,
    pub convex: bool,
    pub extended_ok: bool,
}

impl SupportFunctionData {
    pub fn nef(&self) -> bool {
        self.convex && self.extended_ok
    }
}

/// Solve the support function on each maximal cone and evaluate the
/// Cartier, convexity and extended-vector flags.
pub fn support_function(fan: &StackyFan, a: &[BigInt]) -> Result<SupportFunctionData> {
    assert_eq!(a.len(), fan.rays.len());
    let mut m_sigma = Vec::new();
    for cone in &fan.maximal_cones {
        let rows: Vec<Vec<Rat>> = cone.iter().map(|&i| fan.rays[i].clone()).collect();
        let rhs: Vec<Rat> = cone.iter().map(|&i| -Rat::from(a[i].clone())).collect();
        let m = solve(&rows, &rhs).ok_or_else(|| Error::InconsistentOnSharedFace {
            detail: format!("no linear form on cone {:?}", paper_indices(cone)),
        })?;
        m_sigma.push((cone.clone(), m));
    }
    let cartier = m_sigma
        .iter()
        .all(|(_, m)| m.iter().all(crate::kernel::rat::is_integral));

    // Global convexity test: every linear piece over-estimates on every ray.
    let ray_indices: Vec<usize> = {
        let mut set = BTreeSet::new();
        for cone in &fan.maximal_cones {
            set.extend(cone.iter().copied());
        }
        set.into_iter().collect()
    };
    let mut convex = true;
    'outer: for (_, m) in &m_sigma {
        for &i in &ray_indices {
            if dot(m, &fan.rays[i]) < -Rat::from(a[i].clone()) {
                convex = false;
                break 'outer;
            }
        }
    }

    let mut extended_ok = true;
    for &j in &fan.extended {
        let value = phi_value(fan, &m_sigma, &fan.rays[j])
            .ok_or(Error::ExtendedVectorOutsideSupport { index: j })?;
        if value < -Rat::from(a[j].clone()) {
            extended_ok = false;
        }
    }
    Ok(SupportFunctionData { m_sigma, cartier, convex, extended_ok })
}

/// Value of the support function at a point of the fan's support.
pub fn phi_value(
    fan: &StackyFan,
    m_sigma: &[(Vec<usize>, Vec<Rat>)],
    point: &[Rat],
) -> Option<Rat> {
    for (cone, m) in m_sigma {
        let gens: Vec<Vec<Rat>> = cone.iter().map(|&i| fan.rays[i].clone()).collect();
        if let Some(coords) = coordinates_in_span(&gens, point) {
            if coords.iter().all(|c| !c.is_negative()) {
                return Some(dot(m, point));
            }
        }
    }
    None
}

/// Lattice points of the divisor polytope, enumerated from a bounding box of
/// the per-cone vertices.
pub fn delta_polytope_points(
    fan: &StackyFan,
    a: &[BigInt],
    support: &SupportFunctionData,
) -> Result<Vec<Vec<BigInt>>> {
    let n = fan.n_free_rank;
    let ray_indices: Vec<usize> = {
        let mut set = BTreeSet::new();
        for cone in &fan.maximal_cones {
            set.extend(cone.iter().copied());
        }
        set.into_iter().collect()
    };
    // Bounded iff the rays positively span the whole space.
    let ray_vectors: Vec<Vec<Rat>> = ray_indices.iter().map(|&i| fan.rays[i].clone()).collect();
    let polar = polar_cone(n, &ray_vectors)?;
    if !polar.rays.is_empty() || !polar.lineality.is_empty() {
        return Err(Error::UnboundedPolytope);
    }
    let mut lows = vec![BigInt::zero(); n];
    let mut highs = vec![BigInt::zero(); n];
    for (idx, (_, m)) in support.m_sigma.iter().enumerate() {
        for (c, x) in m.iter().enumerate() {
            let floor = x.floor().to_integer();
            let ceil = x.ceil().to_integer();
            if idx == 0 || floor < lows[c] {
                lows[c] = floor.clone();
            }
            if idx == 0 || ceil > highs[c] {
                highs[c] = ceil.clone();
            }
        }
    }
    let mut volume = BigInt::one();
    for (lo, hi) in lows.iter().zip(&highs) {
        volume *= hi - lo + 1;
    }
    if volume > BigInt::from(5_000_000u64) {
        return Err(Error::EnumerationLimit(format!(
            "divisor polytope bounding box holds {volume} lattice points"
        )));
    }

    let mut points = Vec::new();
    let mut cursor = lows.clone();
    'enumerate: loop {
        let candidate: Vec<Rat> = cursor.iter().map(|x| Rat::from(x.clone())).collect();
        let inside = ray_indices
            .iter()
            .all(|&i| dot(&candidate, &fan.rays[i]) >= -Rat::from(a[i].clone()));
        if inside {
            points.push(cursor.clone());
        }
        for c in 0..n {
            if cursor[c] < highs[c] {
                cursor[c] += 1;
                for x in cursor.iter_mut().take(c) {
                    *x = lows[0].clone();
                }
                // Reset all earlier coordinates to their own lows.
                for (cc, x) in cursor.iter_mut().enumerate().take(c) {
                    *x = lows[cc].clone();
                }
                continue 'enumerate;
            }
            if c + 1 == n {
                break 'enumerate;
            }
        }
        if n == 0 {
            break;
        }
    }
    points.sort();
    Ok(points)
}

/// Outcome of the section filter on the divisor polytope points.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub survivors: Vec<Vec<BigInt>>,
    pub dropped: Vec<Vec<BigInt>>,
    /// The coefficient filter and the transformed-polytope membership test
    /// must select the same points.
    pub routes_agree: bool,
}

/// Keep the sections whose weighted vanishing order along the center is at
/// least the discrepancy threshold; cross-check against membership in the
/// transformed divisor polytope.
pub fn degenerate_filter(
    points: &[Vec<BigInt>],
    fan: &StackyFan,
    a: &[BigInt],
    center: &[usize],
    weights: &[BigInt],
) -> FilterOutcome {
    let w_sum: BigInt = weights.iter().sum();
    let threshold = &w_sum - BigInt::one();
    let b_e: Vec<Rat> = {
        let n = fan.n_free_rank;
        let mut v = vec![Rat::zero(); n];
        for (k, &i) in center.iter().enumerate() {
            for (x, b) in v.iter_mut().zip(&fan.rays[i]) {
                *x = &*x + &(Rat::from(weights[k].clone()) * b);
            }
        }
        v
    };
    let center_a: Rat = center
        .iter()
        .enumerate()
        .map(|(k, &i)| Rat::from(&weights[k] * &a[i]))
        .sum();

    let mut survivors = Vec::new();
    let mut dropped = Vec::new();
    let mut routes_agree = true;
    for point in points {
        let p: Vec<Rat> = from_int_vec(point);
        let order_sum: Rat = center
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let ord = dot(&p, &fan.rays[i]) + Rat::from(a[i].clone());
                Rat::from(weights[k].clone()) * ord
            })
            .sum();
        let keep = order_sum >= Rat::from(threshold.clone());
        let delta_route = dot(&p, &b_e) + &center_a >= Rat::from(threshold.clone());
        if keep != delta_route {
            routes_agree = false;
        }
        if keep {
            survivors.push(point.clone());
        } else {
            dropped.push(point.clone());
        }
    }
    FilterOutcome { survivors, dropped, routes_agree }
}

/// Exact crepancy certificate: both displayed identities, recomputed from
/// the support-function route on one side and the stated formulas on the
/// other, as integer-vector identities over the extended character lattice.
#[derive(Debug, Clone)]
pub struct CrepancyCertificate {
    pub holds: bool,
    pub pullback_d: Vec<BigInt>,
    pub dtilde: Vec<BigInt>,
    pub discrepancy_multiple: BigInt,
    pub mismatch: Option<Vec<BigInt>>,
    pub phi_route_agrees: bool,
}

pub fn crepancy_check(
    spec: &TransitionSpec,
    hat: &HatPresentation,
    base_fan: &StackyFan,
    base_support: &SupportFunctionData,
) -> Result<CrepancyCertificate> {
    let r = spec.base.torus_rank;
    let m = spec.base.char_count();
    let weights = spec.resolved_weights();
    let w_sum = spec.weight_sum();

    // phi_D(b_e) evaluated on the fan versus its symbolic value.
    let b_e: Vec<Rat> = {
        let n = base_fan.n_free_rank;
        let mut v = vec![Rat::zero(); n];
        for (k, &i) in spec.center.iter().enumerate() {
            for (x, b) in v.iter_mut().zip(&base_fan.rays[i]) {
                *x = &*x + &(Rat::from(weights[k].clone()) * b);
            }
        }
        v
    };
    let phi_be = phi_value(base_fan, &base_support.m_sigma, &b_e)
        .ok_or(Error::Internal("center point escaped the fan support".into()))?;
    let symbolic: Rat = -spec
        .center
        .iter()
        .enumerate()
        .map(|(k, &i)| Rat::from(&weights[k] * &spec.divisor[i]))
        .sum::<Rat>();
    let phi_route_agrees = phi_be == symbolic;

    // q*(D) = sum a_i Dhat_i - phi_D(b_e) Dhat_e.
    let hat_e = &hat.characters[hat.e_index];
    let mut pullback = vec![BigInt::zero(); r + 1];
    for (i, a) in spec.divisor.iter().enumerate() {
        for (x, d) in pullback.iter_mut().zip(&hat.characters[i]) {
            *x += a * d;
        }
    }
    let phi_int = phi_be.to_integer();
    if !crate::kernel::rat::is_integral(&phi_be) {
        return Err(Error::Internal("support function is non-integral at the center ray".into()));
    }
    for (x, d) in pullback.iter_mut().zip(hat_e) {
        *x -= &phi_int * d;
    }

    // Dtilde as a class over the extended lattice.
    let dt_coeffs = dtilde_coefficients(spec);
    let mut dtilde = vec![BigInt::zero(); r + 1];
    for (i, a) in dt_coeffs.iter().enumerate().take(m) {
        for (x, d) in dtilde.iter_mut().zip(&hat.characters[i]) {
            *x += a * d;
        }
    }
    for (x, d) in dtilde.iter_mut().zip(hat_e) {
        *x += &dt_coeffs[m] * d;
    }

    // Identity 1: q*(D) - Dtilde = (W - 1) Dhat_e.
    let discrepancy_multiple = &w_sum - BigInt::one();
    let id1 = pullback
        .iter()
        .zip(&dtilde)
        .zip(hat_e)
        .all(|((p, t), e)| p - t == &discrepancy_multiple * e);

    // Identity 2: q*(K) = K~ + (1 - W) Dhat_e, expanded on both sides.
    let mut id2 = true;
    for coord in 0..=r {
        let qk: BigInt = -(0..m)
            .map(|i| hat.characters[i][coord].clone())
            .sum::<BigInt>()
            - &w_sum * &hat_e[coord];
        let ktilde: BigInt = -(0..=m)
            .map(|i| hat.characters[i][coord].clone())
            .sum::<BigInt>();
        if qk != &ktilde + (BigInt::one() - &w_sum) * &hat_e[coord] {
            id2 = false;
        }
    }

    let holds = id1 && id2 && phi_route_agrees;
    let mismatch = if id1 {
        None
    } else {
        Some(
            pullback
                .iter()
                .zip(&dtilde)
                .zip(hat_e)
                .map(|((p, t), e)| p - t - &discrepancy_multiple * e)
                .collect(),
        )
    };
    Ok(CrepancyCertificate {
        holds,
        pullback_d: pullback,
        dtilde,
        discrepancy_multiple,
        mismatch,
        phi_route_agrees,
    })
}

/// All models of the pipeline, analyzed and validated.
#[derive(Debug)]
pub struct Pipeline {
    pub spec: TransitionSpec,
    pub base: Model,
    pub hat: HatPresentation,
    /// Blow-up side: the hat presentation at omega_plus.
    pub x_tilde: Model,
    /// The hat presentation at omega_minus (the base stack again).
    pub x_minus: Model,
    /// Total spaces.
    pub t: Model,
    pub t_bar: Model,
    pub t_tilde: Model,
    pub e_index: usize,
    pub f_index: usize,
    pub t_f_index: usize,
}

impl Pipeline {
    pub fn build(spec: TransitionSpec) -> Result<Pipeline> {
        let base = Model::analyze(spec.base.clone())?;
        let hat = blowup_presentation(&spec, &base)?;
        let x_tilde = Model::analyze(hat.presentation_at(&hat.omega_plus))?;
        let x_minus = Model::analyze(hat.presentation_at(&hat.omega_minus))?;

        let m = spec.base.char_count();
        let f_char = fiber_character(&spec);
        let mut total_chars = hat.characters.clone();
        total_chars.push(f_char.clone());
        let mut total_labels = hat.labels.clone();
        total_labels.push("f".into());
        let r = spec.base.torus_rank;
        let t_tilde = Model::analyze(GitPresentation::with_labels(
            r + 1,
            total_chars.clone(),
            hat.omega_plus.clone(),
            total_labels.clone(),
        ))?;
        let t_bar = Model::analyze(GitPresentation::with_labels(
            r + 1,
            total_chars,
            hat.omega_minus.clone(),
            total_labels,
        ))?;
        let mut t_chars = spec.base.characters.clone();
        t_chars.push(f_char[..r].to_vec());
        let mut t_labels = spec.base.labels.clone();
        t_labels.push("f".into());
        let t = Model::analyze(GitPresentation::with_labels(
            r,
            t_chars,
            spec.base.stability.clone(),
            t_labels,
        ))?;
        Ok(Pipeline {
            spec,
            base,
            hat,
            x_tilde,
            x_minus,
            t,
            t_bar,
            t_tilde,
            e_index: m,
            f_index: m + 1,
            t_f_index: m,
        })
    }
}

/// Result of comparing a fan against predicted maximal-cone families.
#[derive(Debug, Clone)]
pub struct FanComparison {
    pub matches: bool,
    pub missing: Vec<Vec<usize>>,
    pub unexpected: Vec<Vec<usize>>,
}

fn compare_cone_sets(actual: &[Vec<usize>], predicted: &[Vec<usize>]) -> FanComparison {
    let a: BTreeSet<Vec<usize>> = actual.iter().cloned().collect();
    let p: BTreeSet<Vec<usize>> = predicted.iter().cloned().collect();
    FanComparison {
        matches: a == p,
        missing: p.difference(&a).cloned().collect(),
        unexpected: a.difference(&p).cloned().collect(),
    }
}

/// Checks of the two predicted blow-up cone families.
#[derive(Debug, Clone)]
pub struct BlowupFanChecks {
    pub minus_equals_base: FanComparison,
    pub plus_families: FanComparison,
    pub type1_count: usize,
    pub type2_count: usize,
}

pub fn verify_blowup_fan(pipeline: &Pipeline) -> BlowupFanChecks {
    let base_cones = &pipeline.base.fan.maximal_cones;
    let center = &pipeline.spec.center;
    let e = pipeline.e_index;

    let minus_equals_base =
        compare_cone_sets(&pipeline.x_minus.fan.maximal_cones, base_cones);

    let mut predicted: Vec<Vec<usize>> = Vec::new();
    let mut type1 = 0usize;
    let mut type2 = 0usize;
    for cone in base_cones {
        if center.iter().all(|i| cone.contains(i)) {
            for &drop in center {
                let mut c: Vec<usize> = cone.iter().copied().filter(|&i| i != drop).collect();
                c.push(e);
                c.sort_unstable();
                predicted.push(c);
                type2 += 1;
            }
        } else {
            predicted.push(cone.clone());
            type1 += 1;
        }
    }
    let plus_families = compare_cone_sets(&pipeline.x_tilde.fan.maximal_cones, &predicted);
    BlowupFanChecks { minus_equals_base, plus_families, type1_count: type1, type2_count: type2 }
}

/// Structural checks of the total spaces.
#[derive(Debug, Clone)]
pub struct TotalSpaceChecks {
    pub t_tilde_cones: FanComparison,
    pub t_bar_cones: FanComparison,
    pub unique_interior_ray_is_f: bool,
    pub interior_rays: Vec<Vec<usize>>,
    pub sector_bijection: bool,
    pub sector_bijection_detail: Option<String>,
    pub extended_sets_match: bool,
    pub ample_splitting: bool,
    pub prime_ample_splitting: bool,
    pub mori_splitting: bool,
}

impl TotalSpaceChecks {
    pub fn all_pass(&self) -> bool {
        self.t_tilde_cones.matches
            && self.t_bar_cones.matches
            && self.unique_interior_ray_is_f
            && self.sector_bijection
            && self.extended_sets_match
            && self.ample_splitting
            && self.prime_ample_splitting
            && self.mori_splitting
    }
}

pub fn verify_total_space(pipeline: &Pipeline) -> Result<TotalSpaceChecks> {
    let f = pipeline.f_index;
    let e = pipeline.e_index;
    let center = &pipeline.spec.center;

    // (a) Every maximal cone of the plus total space is a plus blow-up cone
    // with the fiber ray appended.
    let predicted_tilde: Vec<Vec<usize>> = pipeline
        .x_tilde
        .fan
        .maximal_cones
        .iter()
        .map(|c| {
            let mut v = c.clone();
            v.push(f);
            v.sort_unstable();
            v
        })
        .collect();
    let t_tilde_cones =
        compare_cone_sets(&pipeline.t_tilde.fan.maximal_cones, &predicted_tilde);

    // (b) The minus total space splits into the two predicted families.
    let mut predicted_bar: Vec<Vec<usize>> = Vec::new();
    for cone in &pipeline.base.fan.maximal_cones {
        let mut v = cone.clone();
        v.push(f);
        v.sort_unstable();
        predicted_bar.push(v);
        if center.iter().all(|i| cone.contains(i)) {
            let mut w = cone.clone();
            w.push(e);
            w.sort_unstable();
            predicted_bar.push(w);
        }
    }
    let t_bar_cones = compare_cone_sets(&pipeline.t_bar.fan.maximal_cones, &predicted_bar);

    // (c) The unique interior ray of the plus total-space fan is the fiber.
    let interior = interior_cones(&pipeline.t_tilde.fan)?;
    let interior_rays: Vec<Vec<usize>> =
        interior.iter().filter(|c| c.len() == 1).cloned().collect();
    let unique_interior_ray_is_f = interior_rays == vec![vec![f]];

    // (d) Integral sectors of the minus total space match sectors of T.
    let bar_sectors =
        crate::fan::twisted_sectors(&pipeline.t_bar.presentation, &pipeline.t_bar.family)?;
    let t_sectors = crate::fan::twisted_sectors(&pipeline.t.presentation, &pipeline.t.family)?;
    let (sector_bijection, sector_bijection_detail) =
        match classify_sectors_int_frac(&bar_sectors, e, Some(&t_sectors)) {
            Ok(_) => (true, None),
            Err(err) => (false, Some(err.to_string())),
        };

    // Extended sets are preserved across all presentations.
    let base_s: Vec<usize> = pipeline.base.extended().to_vec();
    let reindex_t: Vec<usize> = pipeline
        .t
        .extended()
        .iter()
        .copied()
        .filter(|&i| i != pipeline.t_f_index)
        .collect();
    let bar_s: Vec<usize> = pipeline
        .t_bar
        .extended()
        .iter()
        .copied()
        .filter(|&i| i != e && i != f)
        .collect();
    let tilde_s: Vec<usize> = pipeline
        .t_tilde
        .extended()
        .iter()
        .copied()
        .filter(|&i| i != e && i != f)
        .collect();
    let extended_sets_match = base_s == reindex_t && base_s == bar_s && base_s == tilde_s;

    // (e) Extended ample cones, ample cones and Mori cones split off a ray.
    let t_data = divisor_class_data(
        &pipeline.t.presentation,
        &pipeline.t.family,
        &pipeline.t.fan.rays,
        &pipeline.t.fan.maximal_cones,
    )?;
    let bar_data = divisor_class_data(
        &pipeline.t_bar.presentation,
        &pipeline.t_bar.family,
        &pipeline.t_bar.fan.rays,
        &pipeline.t_bar.fan.maximal_cones,
    )?;
    let ample_splitting = facet_split_matches(
        &bar_data.extended_ample_cone,
        &t_data.extended_ample_cone,
    );
    let prime_ample_splitting = facet_split_matches(&bar_data.ample_cone, &t_data.ample_cone);
    let mori_splitting = generator_split_matches(&bar_data.mori_cone, &t_data.mori_cone);

    Ok(TotalSpaceChecks {
        t_tilde_cones,
        t_bar_cones,
        unique_interior_ray_is_f,
        interior_rays,
        sector_bijection,
        sector_bijection_detail,
        extended_sets_match,
        ample_splitting,
        prime_ample_splitting,
        mori_splitting,
    })
}

/// Facet-set identity `C_minus = C x R_{>=0}(0,...,0,-1)`.
fn facet_split_matches(big: &PolyCone, small: &PolyCone) -> bool {
    let r = small.ambient_dim();
    let mut expected: BTreeSet<Vec<BigInt>> = small
        .facets()
        .iter()
        .map(|h| {
            let mut v = h.clone();
            v.push(Rat::zero());
            primitive(&v)
        })
        .collect();
    let mut last = vec![Rat::zero(); r + 1];
    last[r] = -Rat::one();
    expected.insert(primitive(&last));
    let actual: BTreeSet<Vec<BigInt>> =
        big.facets().iter().map(|h| primitive(h)).collect();
    actual == expected
}

/// Generator-set identity for the homology-side cones.
fn generator_split_matches(big: &PolyCone, small: &PolyCone) -> bool {
    let r = small.ambient_dim();
    let mut expected: BTreeSet<Vec<BigInt>> = small
        .generators()
        .iter()
        .map(|g| {
            let mut v = g.clone();
            v.push(Rat::zero());
            primitive(&v)
        })
        .collect();
    let mut last = vec![Rat::zero(); r + 1];
    last[r] = -Rat::one();
    expected.insert(primitive(&last));
    let actual: BTreeSet<Vec<BigInt>> =
        big.generators().iter().map(|g| primitive(g)).collect();
    actual == expected
}

/// The wall-crossing chart between two adjacent chambers.
#[derive(Debug, Clone)]
pub struct WallChart {
    /// Primitive wall normal with positive pairing against the plus side.
    pub e: Vec<BigInt>,
    /// Pairings of every character with the normal.
    pub pairings: Vec<BigInt>,
    pub pairing_sum: BigInt,
    pub crepant: bool,
    pub warning: Option<String>,
    /// The conifold-point constant `prod (D_j . e)^(D_j . e)`.
    pub c_frak: Rat,
    /// Shared integral basis of the wall lattice, inside the wall face.
    pub wall_basis: Vec<Vec<BigInt>>,
    pub p_plus: Vec<BigInt>,
    pub p_minus: Vec<BigInt>,
    /// Change-of-variables exponents from `p_plus + p_minus = sum c_i p_i`.
    pub exponents: Vec<BigInt>,
}

pub fn wall_chart(minus: &Model, plus: &Model) -> Result<WallChart> {
    let p = &plus.presentation;
    let dim = p.torus_rank;
    let minus_data = divisor_class_data(
        &minus.presentation,
        &minus.family,
        &minus.fan.rays,
        &minus.fan.maximal_cones,
    )?;
    let plus_data = divisor_class_data(
        &plus.presentation,
        &plus.family,
        &plus.fan.rays,
        &plus.fan.maximal_cones,
    )?;
    let c_minus = &minus_data.extended_ample_cone;
    let c_plus = &plus_data.extended_ample_cone;

    // The wall is the unique facet shared with opposite orientations.
    let mut normal: Option<Vec<BigInt>> = None;
    for h in c_plus.facets() {
        if c_minus.facets().iter().any(|g| primitive(&neg(g)) == primitive(h)) {
            normal = Some(primitive(h));
            break;
        }
    }
    let Some(mut e) = normal else {
        return Err(Error::NoCommonWall);
    };
    let e_rat: Vec<Rat> = from_int_vec(&e);
    if dot(&e_rat, &p.stability).is_negative() {
        e = e.iter().map(|x| -x).collect();
    }
    let e_rat: Vec<Rat> = from_int_vec(&e);
    if !dot(&e_rat, &p.stability).is_positive() {
        return Err(Error::NoCommonWall);
    }
    let wall_face = c_plus.intersect(c_minus)?;
    if wall_face.span_dim() != dim - 1 {
        return Err(Error::NoCommonWall);
    }

    let pairings: Vec<BigInt> = p
        .characters
        .iter()
        .map(|d| {
            dot_int_rat(d, &e_rat)
                .to_integer()
        })
        .collect();
    let pairing_sum: BigInt = pairings.iter().sum();
    let crepant = pairing_sum.is_zero();
    let warning = (!crepant).then(|| {
        format!(
            "discrepant wall crossing: character pairings against the wall normal sum to {pairing_sum}"
        )
    });
    let c_frak = conifold_constant(&pairings);

    // Integral basis of the wall lattice lying in the wall face.
    let wall_basis = wall_lattice_basis_in_cone(&e, &wall_face)?;

    // p_minus is pinned to (0,...,0,-1); it must lie in the minus chamber.
    let mut p_minus = vec![BigInt::zero(); dim];
    p_minus[dim - 1] = -BigInt::one();
    let p_minus_rat = from_int_vec(&p_minus);
    if !c_minus.contains(&p_minus_rat) {
        return Err(Error::Internal(
            "the pinned minus-side basis vector escapes the minus chamber".into(),
        ));
    }

    // p_plus: integral, pairing one against e, inside the plus chamber,
    // completing the wall basis to a basis of the whole lattice.
    let v0 = bezout_vector(&e)?;
    let omega_plus = &p.stability;
    let scale = dot(&e_rat, omega_plus);
    let x0: Vec<Rat> = omega_plus.iter().map(|x| x / &scale).collect();
    let diff: Vec<Rat> = x0
        .iter()
        .zip(&v0)
        .map(|(a, b)| a - Rat::from(b.clone()))
        .collect();
    let basis_rat: Vec<Vec<Rat>> = wall_basis.iter().map(|b| from_int_vec(b)).collect();
    let coords = coordinates_in_span(&basis_rat, &diff).ok_or_else(|| {
        Error::Internal("stability difference escapes the wall span".into())
    })?;
    let mut p_plus = v0.clone();
    for (c, b) in coords.iter().zip(&wall_basis) {
        let k = c.ceil().to_integer();
        for (x, bi) in p_plus.iter_mut().zip(b) {
            *x += &k * bi;
        }
    }
    if !c_plus.contains(&from_int_vec(&p_plus)) {
        return Err(Error::Internal("adjusted plus-side basis vector escapes its chamber".into()));
    }
    // Reduce to the minimal chamber representative along the wall basis, so
    // the chart does not depend on the selected epsilon.
    let mut reduced = true;
    let mut guard = 0usize;
    while reduced {
        reduced = false;
        for b in &wall_basis {
            loop {
                let candidate: Vec<BigInt> =
                    p_plus.iter().zip(b).map(|(x, bi)| x - bi).collect();
                if c_plus.contains(&from_int_vec(&candidate)) {
                    p_plus = candidate;
                    reduced = true;
                    guard += 1;
                    if guard > 10_000 {
                        return Err(Error::Internal("wall-chart reduction does not terminate".into()));
                    }
                } else {
                    break;
                }
            }
        }
    }
    // Unimodularity of {wall basis, p_plus}.
    let mut rows = wall_basis.clone();
    rows.push(p_plus.clone());
    let det = IntMatrix::from_rows(&rows).det();
    if det.abs() != BigInt::one() {
        return Err(Error::Internal("chart basis is not unimodular".into()));
    }

    // Exponents from p_plus + p_minus = sum c_i p_i.
    let target: Vec<Rat> = p_plus
        .iter()
        .zip(&p_minus)
        .map(|(a, b)| Rat::from(a + b))
        .collect();
    let coords = coordinates_in_span(&basis_rat, &target)
        .ok_or_else(|| Error::Internal("exponent system is inconsistent".into()))?;
    let mut exponents = Vec::new();
    for c in &coords {
        if !crate::kernel::rat::is_integral(c) {
            return Err(Error::Internal("non-integral change-of-variables exponent".into()));
        }
        exponents.push(c.to_integer());
    }

    Ok(WallChart {
        e,
        pairings,
        pairing_sum,
        crepant,
        warning,
        c_frak,
        wall_basis,
        p_plus,
        p_minus,
        exponents,
    })
}

/// The constant `prod (n_j)^(n_j)` over nonzero pairings, as an exact
/// rational (negative exponents divide).
pub fn conifold_constant(pairings: &[BigInt]) -> Rat {
    let mut c_frak = Rat::one();
    for n in pairings {
        if n.is_zero() {
            continue;
        }
        let exp = n.abs().to_u64_digits().1;
        let exp = if exp.is_empty() { 0 } else { exp[0] };
        let powered = num::pow::pow(Rat::from(n.clone()), exp as usize);
        if n.is_positive() {
            c_frak *= powered;
        } else {
            c_frak /= powered;
        }
    }
    c_frak
}

/// Integral basis of `{x : <e, x> = 0}` whose members lie in the given cone.
fn wall_lattice_basis_in_cone(e: &[BigInt], face: &PolyCone) -> Result<Vec<Vec<BigInt>>> {
    let dim = e.len();
    let row = IntMatrix::from_rows(&[e.to_vec()]);
    let snf = smith_normal_form(&row);
    // Kernel lattice: columns of V^{-1} past the rank.
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for c in snf.rank..dim {
        basis.push(snf.v_inv.col(c));
    }
    if basis.len() != dim - 1 {
        return Err(Error::Internal("wall normal is zero".into()));
    }
    // Prefer the cone's extreme rays when they already form a lattice basis.
    let gens = face.generators();
    if gens.len() == dim - 1 {
        let prim: Vec<Vec<BigInt>> = gens.iter().map(|g| primitive(g)).collect();
        if lattice_index(&basis, &prim)? == BigInt::one() {
            let mut sorted = prim;
            sorted.sort();
            return Ok(sorted);
        }
    }
    // Otherwise: primitive interior lattice point, completed to a basis and
    // pushed into the cone by adding multiples of the interior point.
    let interior_rat: Vec<Rat> = (0..dim)
        .map(|c| gens.iter().map(|g| g[c].clone()).sum())
        .collect();
    if is_zero_vec(&interior_rat) {
        return Err(Error::Internal("wall face has no interior direction".into()));
    }
    // Coordinates in the kernel lattice, made primitive there.
    let basis_rat: Vec<Vec<Rat>> = basis.iter().map(|b| from_int_vec(b)).collect();
    let coords = coordinates_in_span(&basis_rat, &interior_rat)
        .ok_or_else(|| Error::Internal("interior point escapes the wall lattice".into()))?;
    let prim_coords = primitive(&coords);
    let w: Vec<BigInt> = (0..dim)
        .map(|c| {
            prim_coords
                .iter()
                .zip(&basis)
                .map(|(k, b)| k * &b[c])
                .sum()
        })
        .collect();
    // Complete w (in lattice coordinates) to a unimodular basis: the columns
    // of U from the Smith form of the coordinate column vector.
    let col = IntMatrix::from_rows(&prim_coords.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>());
    let wsnf = smith_normal_form(&col);
    if wsnf.s.at(0, 0) != &BigInt::one() {
        return Err(Error::Internal("interior point is not primitive".into()));
    }
    let mut out: Vec<Vec<BigInt>> = vec![w.clone()];
    for c in 1..dim - 1 {
        let lattice_coords = wsnf.u.col(c);
        let mut v: Vec<BigInt> = (0..dim)
            .map(|coord| {
                lattice_coords
                    .iter()
                    .zip(&basis)
                    .map(|(k, b)| k * &b[coord])
                    .sum()
            })
            .collect();
        // Push into the cone: v + M w stays a basis and enters for large M.
        let mut shift = BigInt::zero();
        for h in face.proper_facets() {
            let hv = dot(&from_int_vec(&v), &h);
            let hw = dot(&from_int_vec(&w), &h);
            if !hw.is_positive() {
                return Err(Error::Internal("interior direction is not interior".into()));
            }
            if hv.is_negative() {
                let needed = (-&hv / &hw).ceil().to_integer();
                if needed > shift {
                    shift = needed;
                }
            }
        }
        for (x, wi) in v.iter_mut().zip(&w) {
            *x += &shift * wi;
        }
        out.push(v);
    }
    out.sort();
    Ok(out)
}

/// Index of the sublattice spanned by `vectors` inside the lattice spanned
/// by `basis` (both full rank).
fn lattice_index(basis: &[Vec<BigInt>], vectors: &[Vec<BigInt>]) -> Result<BigInt> {
    let basis_rat: Vec<Vec<Rat>> = basis.iter().map(|b| from_int_vec(b)).collect();
    let mut rows = Vec::new();
    for v in vectors {
        let coords = coordinates_in_span(&basis_rat, &from_int_vec(v))
            .ok_or_else(|| Error::Internal("vector escapes the wall lattice".into()))?;
        if coords.iter().any(|c| !crate::kernel::rat::is_integral(c)) {
            return Err(Error::Internal("vector is not a lattice point of the wall".into()));
        }
        rows.push(coords.iter().map(Rat::to_integer).collect::<Vec<BigInt>>());
    }
    Ok(IntMatrix::from_rows(&rows).det().abs())
}

fn bezout_vector(e: &[BigInt]) -> Result<Vec<BigInt>> {
    // Integer vector with <v, e> = 1, via the Smith form of the row.
    let row = IntMatrix::from_rows(&[e.to_vec()]);
    let snf = smith_normal_form(&row);
    if snf.s.at(0, 0) != &BigInt::one() {
        return Err(Error::Internal("wall normal is not primitive".into()));
    }
    // e . x = 1 <=> (U S V) x = 1; x = V^{-1} (first column scaled by U^{-1}).
    let u_inv_00 = snf.u_inv.at(0, 0).clone();
    let v_inv_first = snf.v_inv.col(0);
    Ok(v_inv_first.into_iter().map(|x| x * &u_inv_00).collect())
}

/// Verdict with human-readable witnesses for one of the two conditions.
#[derive(Debug, Clone)]
pub struct ConditionVerdict {
    pub holds: bool,
    pub witnesses: Vec<String>,
}

/// Per-sector detail of the condition checks.
#[derive(Debug, Clone)]
pub struct SectorConditionDetail {
    pub key: Vec<Rat>,
    pub injective: bool,
    pub surjective: bool,
    pub kernel_matches: bool,
    pub fiber_ideal_dims: Vec<usize>,
    pub narrow_dims: Vec<usize>,
    /// Kernel classes of the restriction on the fiber ideal, in the sector
    /// ring's slice coordinates.
    pub kernel_witnesses: Vec<(usize, Vec<Rat>)>,
    /// The sector ring the witnesses live in.
    pub ring: GradedRing,
    pub relations: Vec<String>,
    pub dims: Vec<usize>,
}

/// Outcome of the two cohomological conditions, with all sector rings.
#[derive(Debug)]
pub struct ConditionsReport {
    pub condition1: ConditionVerdict,
    pub condition2: ConditionVerdict,
    pub sectors: Vec<SectorConditionDetail>,
    /// Set when a fractional sector carries a nonzero fiber ideal, which
    /// would contradict the vanishing used to restrict to integral sectors.
    pub paper_inconsistency: Option<String>,
    pub t_bar_ring: GradedRing,
    pub t_bar_relations: Vec<String>,
    pub t_bar_dims: Vec<usize>,
    pub t_bar_narrow_dims: Vec<usize>,
    pub t_bar_narrow_generators: Vec<String>,
}

/// Decide the two conditions sector by sector.
pub fn check_conditions(pipeline: &Pipeline) -> Result<ConditionsReport> {
    let e = pipeline.e_index;
    let f = pipeline.f_index;
    let bar = &pipeline.t_bar;
    let t = &pipeline.t;

    let bar_candidates = paper_basis_candidates(&bar.presentation, Some(e), Some(f));
    let bar_ring = ring_presentation(bar, &bar_candidates)?;
    let bar_sector_data = chen_ruan(bar, &bar_ring)?;
    let t_sectors = crate::fan::twisted_sectors(&t.presentation, &t.family)?;

    let mut condition1 = ConditionVerdict { holds: true, witnesses: vec![] };
    let mut condition2 = ConditionVerdict { holds: true, witnesses: vec![] };
    let mut sector_details = Vec::new();
    let mut paper_inconsistency = None;

    for (sector, sector_model, sector_ring) in &bar_sector_data {
        let e_class = class_coordinates(
            &sector_model.presentation,
            sector_model.extended(),
            &sector_ring.basis_vectors,
            &from_int_vec(&bar.presentation.characters[e]),
        )?;
        let f_class = class_coordinates(
            &sector_model.presentation,
            sector_model.extended(),
            &sector_ring.basis_vectors,
            &from_int_vec(&bar.presentation.characters[f]),
        )?;
        let uf = Poly::linear(&f_class);
        let fiber_ideal = ideal_image(sector_ring, &[uf.clone()]);

        if !sector.key[e].is_zero() {
            // Fractional sector: the fiber ideal must vanish identically.
            if fiber_ideal.total_dim() != 0 {
                paper_inconsistency = Some(format!(
                    "fractional sector {} carries a nonzero fiber ideal",
                    key_string(&sector.key)
                ));
            }
            continue;
        }

        // Matching sector of T under nu -> (nu, 0).
        let mut t_key = sector.key.clone();
        t_key.remove(e);
        let t_sector = t_sectors
            .iter()
            .find(|s| s.key == t_key)
            .ok_or_else(|| Error::BijectionFailure {
                reason: format!("integral sector {} has no partner", key_string(&sector.key)),
            })?;
        let t_sector_model = t.sector_model(t_sector)?;

        // Restriction: quotient of the sector ring by the exceptional class.
        let restriction = build_restriction(sector_ring, &e_class)?;
        let t_ring = build_matching_t_ring(&restriction, &t_sector_model)?;
        assert_rings_agree(&restriction.target, &t_ring, &sector.key)?;

        let narrow_t = narrow_by_interior_cones(&t_sector_model, &t_ring)?;
        let image = restriction.image(&fiber_ideal);

        let injective = fiber_ideal.dims() == image.dims();
        let surjective = image.equals(&narrow_t);
        let kernel_witnesses = restriction.kernel_on(&fiber_ideal);
        if !injective {
            for (d, v) in &kernel_witnesses {
                let class = crate::cohomology::CohClass { degree: *d, coords: v.clone() };
                let poly = sector_ring.class_to_poly(&class);
                condition1.witnesses.push(format!(
                    "sector {}: kernel class {} in degree {}",
                    key_string(&sector.key),
                    sector_ring.poly_string(&poly),
                    2 * d
                ));
            }
        }
        if !surjective {
            if let Some((d, w)) = narrow_t.witness_not_in(&image) {
                let class = crate::cohomology::CohClass { degree: d, coords: w };
                let poly = t_ring.class_to_poly(&class);
                condition1.witnesses.push(format!(
                    "sector {}: narrow class {} in degree {} is not in the image",
                    key_string(&sector.key),
                    t_ring.poly_string(&poly),
                    2 * d
                ));
            }
        }
        condition1.holds &= injective && surjective;

        // Condition 2 on this sector: fiber ideal vs kernel of the
        // exceptional class inside the narrow subspace.
        let narrow_bar = narrow_by_interior_cones(sector_model, sector_ring)?;
        let kernel = mult_kernel(sector_ring, &Poly::linear(&e_class));
        let rhs = kernel.intersect(&narrow_bar);
        let kernel_matches = fiber_ideal.equals(&rhs);
        if !kernel_matches {
            if let Some((d, w)) = rhs.witness_not_in(&fiber_ideal) {
                let class = crate::cohomology::CohClass { degree: d, coords: w };
                let poly = sector_ring.class_to_poly(&class);
                condition2.witnesses.push(format!(
                    "sector {}: kernel class {} in degree {} is not in the fiber ideal",
                    key_string(&sector.key),
                    sector_ring.poly_string(&poly),
                    2 * d
                ));
            }
            if let Some((d, w)) = fiber_ideal.witness_not_in(&rhs) {
                let class = crate::cohomology::CohClass { degree: d, coords: w };
                let poly = sector_ring.class_to_poly(&class);
                condition2.witnesses.push(format!(
                    "sector {}: fiber class {} in degree {} escapes the kernel",
                    key_string(&sector.key),
                    sector_ring.poly_string(&poly),
                    2 * d
                ));
            }
        }
        condition2.holds &= kernel_matches;

        let relations = minimal_relations(sector_ring)
            .iter()
            .map(|p| sector_ring.poly_string(p))
            .collect();
        sector_details.push(SectorConditionDetail {
            key: sector.key.clone(),
            injective,
            surjective,
            kernel_matches,
            fiber_ideal_dims: fiber_ideal.dims(),
            narrow_dims: narrow_t.dims(),
            kernel_witnesses,
            ring: sector_ring.clone(),
            relations,
            dims: sector_ring.dims(),
        });
    }

    let untwisted = bar_sector_data
        .iter()
        .find(|(s, _, _)| s.is_untwisted())
        .ok_or_else(|| Error::Internal("missing untwisted sector".into()))?;
    let bar_narrow = narrow_by_interior_cones(&untwisted.1, &untwisted.2)?;
    let relations = minimal_relations(&untwisted.2)
        .iter()
        .map(|p| untwisted.2.poly_string(p))
        .collect();
    Ok(ConditionsReport {
        condition1,
        condition2,
        sectors: sector_details,
        paper_inconsistency,
        t_bar_dims: untwisted.2.dims(),
        t_bar_narrow_dims: bar_narrow.dims(),
        t_bar_narrow_generators: bar_narrow.provenance.clone(),
        t_bar_relations: relations,
        t_bar_ring: untwisted.2.clone(),
    })
}

fn key_string(key: &[Rat]) -> String {
    let inner: Vec<String> = key.iter().map(rat_to_string).collect();
    format!("({})", inner.join(","))
}

/// Identity restriction used when the exceptional class already vanishes on
/// a sector.
fn build_restriction(ring: &GradedRing, e_class: &[Rat]) -> Result<RestrictionMap> {
    if is_zero_vec(e_class) {
        // Quotient by zero: the identity map onto the same ring.
        let matrices = (0..=ring.degree_cap)
            .map(|d| {
                let dim = ring.dim_at(d);
                (0..dim)
                    .map(|r| {
                        (0..dim)
                            .map(|c| if r == c { Rat::one() } else { Rat::zero() })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        return Ok(RestrictionMap {
            target: ring.clone(),
            matrices,
            killed_coordinate: usize::MAX,
        });
    }
    restriction_map(ring, e_class)
}

/// Ring of the matching T-sector in coordinates compatible with the
/// restriction target: the target's basis vectors with the exceptional
/// coordinate dropped.
fn build_matching_t_ring(restriction: &RestrictionMap, t_model: &Model) -> Result<GradedRing> {
    let mut candidates: Vec<BasisCandidate> = restriction
        .target
        .basis_vectors
        .iter()
        .zip(&restriction.target.basis_labels)
        .enumerate()
        .map(|(rank, (v, l))| BasisCandidate {
            label: l.clone(),
            display_rank: rank,
            vector: v[..v.len() - 1].to_vec(),
        })
        .collect();
    for i in (0..t_model.presentation.char_count()).rev() {
        candidates.push(BasisCandidate {
            label: format!("w{}", i + 1),
            display_rank: 2_000_000 + i,
            vector: t_model.presentation.character_rat(i),
        });
    }
    ring_presentation(t_model, &candidates)
}

/// The restriction target and the independently built T-sector ring must be
/// literally the same graded presentation.
fn assert_rings_agree(a: &GradedRing, b: &GradedRing, key: &[Rat]) -> Result<()> {
    if a.h() != b.h() || a.dims() != b.dims() {
        return Err(Error::BijectionFailure {
            reason: format!(
                "sector {}: restriction ring dims {:?} differ from the T-sector ring dims {:?}",
                key_string(key),
                a.dims(),
                b.dims()
            ),
        });
    }
    for d in 0..=a.degree_cap {
        let sa = a.slice(d).unwrap();
        let sb = b.slice(d).unwrap();
        if sa.basis_cols != sb.basis_cols {
            return Err(Error::BijectionFailure {
                reason: format!(
                    "sector {}: graded bases differ in degree {}",
                    key_string(key),
                    2 * d
                ),
            });
        }
    }
    Ok(())
}
