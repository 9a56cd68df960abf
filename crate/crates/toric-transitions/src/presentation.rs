//! GIT presentation data: anticone families, the standing validity checks,
//! and divisor-class bookkeeping (extended set, theta, xi, ample and Mori
//! cones).

use num::bigint::BigInt;
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::cone::PolyCone;
use crate::kernel::lp::strict_cone_feasibility;
use crate::kernel::rat::{dot, from_int_vec, neg, Rat};
use crate::kernel::solve::{rank, solve, Subspace};

/// The universal input: a torus rank, a character matrix and a rational
/// stability vector.
#[derive(Debug, Clone)]
pub struct GitPresentation {
    pub torus_rank: usize,
    pub characters: Vec<Vec<BigInt>>,
    pub stability: Vec<Rat>,
    pub labels: Vec<String>,
}

impl GitPresentation {
    pub fn new(torus_rank: usize, characters: Vec<Vec<BigInt>>, stability: Vec<Rat>) -> Self {
        let labels = (0..characters.len()).map(|i| format!("x{}", i + 1)).collect();
        Self::with_labels(torus_rank, characters, stability, labels)
    }

    pub fn with_labels(
        torus_rank: usize,
        characters: Vec<Vec<BigInt>>,
        stability: Vec<Rat>,
        labels: Vec<String>,
    ) -> Self {
        assert_eq!(stability.len(), torus_rank, "stability length must equal torus rank");
        for c in &characters {
            assert_eq!(c.len(), torus_rank, "character length must equal torus rank");
        }
        assert_eq!(labels.len(), characters.len());
        GitPresentation { torus_rank, characters, stability, labels }
    }

    pub fn from_i64(torus_rank: usize, characters: &[Vec<i64>], stability: &[i64]) -> Self {
        Self::new(
            torus_rank,
            characters
                .iter()
                .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            stability.iter().map(|&x| Rat::from(BigInt::from(x))).collect(),
        )
    }

    pub fn char_count(&self) -> usize {
        self.characters.len()
    }

    pub fn character_rat(&self, i: usize) -> Vec<Rat> {
        from_int_vec(&self.characters[i])
    }

    fn characters_rat(&self, indices: &[usize]) -> Vec<Vec<Rat>> {
        indices.iter().map(|&i| self.character_rat(i)).collect()
    }

    /// Strict-feasibility membership test for a candidate anticone.
    pub fn is_anticone(&self, indices: &[usize]) -> Result<bool> {
        let (ok, _) = strict_cone_feasibility(&self.characters_rat(indices), &self.stability)?;
        Ok(ok)
    }
}

/// Inclusion-minimal anticones of a presentation, with membership queries
/// answered through upward closure.
#[derive(Debug, Clone)]
pub struct AnticoneFamily {
    pub minimal: Vec<Vec<usize>>,
    pub(crate) char_count: usize,
}

impl AnticoneFamily {
    pub fn contains(&self, indices: &[usize]) -> bool {
        let set: std::collections::BTreeSet<usize> = indices.iter().copied().collect();
        self.minimal.iter().any(|j| j.iter().all(|i| set.contains(i)))
    }

    /// Intersection of all minimal anticones (the extended set S).
    pub fn extended_set(&self) -> Vec<usize> {
        let Some(first) = self.minimal.first() else {
            return vec![];
        };
        first
            .iter()
            .copied()
            .filter(|i| self.minimal.iter().all(|j| j.contains(i)))
            .collect()
    }

    pub fn char_count(&self) -> usize {
        self.char_count
    }

    /// Index sets of maximal fan cones: complements of minimal anticones.
    pub fn maximal_cones(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .minimal
            .iter()
            .map(|j| (0..self.char_count).filter(|i| !j.contains(i)).collect())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Exhaustive minimal-anticone scan with superset pruning, plus a modest
/// deterministic upward-closure audit; a failed audit signals a stability
/// condition on a wall or degenerate data.
pub fn anticones(p: &GitPresentation) -> Result<AnticoneFamily> {
    let family = scan_minimal_anticones(p)?;
    if let Some((anticone, superset)) = upward_closure_violation(p, &family)? {
        return Err(Error::NotUpwardClosed { anticone, superset });
    }
    Ok(family)
}

fn scan_minimal_anticones(p: &GitPresentation) -> Result<AnticoneFamily> {
    let m = p.char_count();
    if m > 22 {
        return Err(Error::EnumerationLimit(format!(
            "anticone scan supports at most 22 characters, got {m}"
        )));
    }
    let mut minimal: Vec<u32> = Vec::new();
    for size in 1..=m {
        for mask in subsets_of_size(m, size) {
            if minimal.iter().any(|&j| mask & j == j) {
                continue;
            }
            let indices = mask_to_indices(mask);
            if p.is_anticone(&indices)? {
                minimal.push(mask);
            }
        }
    }
    Ok(AnticoneFamily {
        minimal: minimal.iter().map(|&mask| mask_to_indices(mask)).collect(),
        char_count: m,
    })
}

/// Deterministic audit: single-element extensions of every minimal anticone
/// and the full index set must remain feasible.
fn upward_closure_violation(
    p: &GitPresentation,
    family: &AnticoneFamily,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let m = p.char_count();
    for j in &family.minimal {
        for extra in 0..m {
            if j.contains(&extra) {
                continue;
            }
            let mut superset = j.clone();
            superset.push(extra);
            superset.sort_unstable();
            if !p.is_anticone(&superset)? {
                return Ok(Some((j.clone(), superset)));
            }
        }
    }
    if !family.minimal.is_empty() {
        let full: Vec<usize> = (0..m).collect();
        if !p.is_anticone(&full)? {
            return Ok(Some((family.minimal[0].clone(), full)));
        }
    }
    Ok(None)
}

fn subsets_of_size(m: usize, size: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn rec(start: usize, m: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<u32>) {
        if current.len() == size {
            let mask = current.iter().fold(0u32, |acc, &i| acc | (1 << i));
            out.push(mask);
            return;
        }
        for i in start..m {
            if m - i < size - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, m, size, current, out);
            current.pop();
        }
    }
    rec(0, m, size, &mut current, &mut out);
    out
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Outcome of the standing-assumption checks.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub full_set_is_anticone: bool,
    pub anticone_dims_maximal: bool,
    pub simplicial: bool,
    pub failures: Vec<String>,
    pub minimal_anticones: Vec<Vec<usize>>,
    pub extended_set: Vec<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.full_set_is_anticone && self.anticone_dims_maximal && self.simplicial
    }
}

/// Check the standing assumptions: the full index set is an anticone, every
/// anticone spans maximally, and the fan cones are simplicial.
pub fn validate(p: &GitPresentation) -> Result<ValidationReport> {
    let family = scan_minimal_anticones(p)?;
    let mut failures = Vec::new();
    let m = p.char_count();
    let r = p.torus_rank;

    if let Some((anticone, superset)) = upward_closure_violation(p, &family)? {
        failures.push(format!(
            "anticone family is not upward closed: {:?} feasible but {:?} is not",
            paper_indices(&anticone),
            paper_indices(&superset)
        ));
    }

    let full: Vec<usize> = (0..m).collect();
    let full_ok = p.is_anticone(&full)? && failures.is_empty();
    if !full_ok {
        failures.push("the full index set {1..m} is not an anticone".into());
    }

    let mut dims_ok = !family.minimal.is_empty();
    if family.minimal.is_empty() {
        failures.push("no anticone contains the stability condition".into());
    }
    for j in &family.minimal {
        let vecs: Vec<Vec<Rat>> = j.iter().map(|&i| p.character_rat(i)).collect();
        let dim = rank(&vecs);
        if dim != r || j.len() != r {
            dims_ok = false;
            failures.push(format!(
                "minimal anticone {:?} spans dimension {} (rank {} required); stability sits on a wall",
                paper_indices(j),
                dim,
                r
            ));
        }
    }

    // Simpliciality of the fan: rays indexed by each minimal anticone's
    // complement must be linearly independent.
    let mut simplicial = true;
    if dims_ok && full_ok {
        let rays = ray_images(p)?;
        for j in &family.minimal {
            let complement: Vec<usize> = (0..m).filter(|i| !j.contains(i)).collect();
            let vecs: Vec<Vec<Rat>> = complement.iter().map(|&i| rays[i].clone()).collect();
            if rank(&vecs) != complement.len() {
                simplicial = false;
                failures.push(format!(
                    "rays of cone {:?} are linearly dependent",
                    paper_indices(&complement)
                ));
            }
        }
    }

    let extended_set = family.extended_set();
    Ok(ValidationReport {
        full_set_is_anticone: full_ok,
        anticone_dims_maximal: dims_ok,
        simplicial,
        failures,
        minimal_anticones: family.minimal,
        extended_set,
    })
}

/// 1-based index sets for human-readable messages.
pub fn paper_indices(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|&i| i + 1).collect()
}

/// Free-part ray images of the quotient-lattice map, one per character.
pub fn ray_images(p: &GitPresentation) -> Result<Vec<Vec<Rat>>> {
    let matrix = crate::kernel::mat::IntMatrix::from_rows(&p.characters);
    let ck = crate::kernel::mat::cokernel_presentation(&matrix);
    let mut rays = Vec::with_capacity(p.char_count());
    for i in 0..p.char_count() {
        let col = ck.projection.col(i);
        rays.push(from_int_vec(&col[..ck.free_rank]));
    }
    Ok(rays)
}

/// Divisor-class bookkeeping attached to a validated presentation.
#[derive(Debug, Clone)]
pub struct DivisorClassData {
    pub extended: Vec<usize>,
    /// For each `j` in the extended set: the minimal cone containing the ray
    /// image of `b_j` and the positive coefficients `c_{ij}` on its rays.
    pub minimal_cone_data: Vec<(usize, Vec<usize>, Vec<Rat>)>,
    /// `xi_j` vectors, aligned with `extended`.
    pub xi: Vec<Vec<Rat>>,
    /// Indices whose classes form the chosen basis of `H^2`.
    pub h2_basis_indices: Vec<usize>,
    /// `theta` as a matrix: rows are the coordinates of each character's
    /// class in the chosen basis (length = basis size), one row per character.
    pub theta: Vec<Vec<Rat>>,
    pub extended_ample_cone: PolyCone,
    pub ample_cone: PolyCone,
    pub mori_cone: PolyCone,
}

/// Compute S, the xi vectors, theta, and the ample/Mori cones.
pub fn divisor_class_data(
    p: &GitPresentation,
    family: &AnticoneFamily,
    rays: &[Vec<Rat>],
    maximal_cones: &[Vec<usize>],
) -> Result<DivisorClassData> {
    let r = p.torus_rank;
    let extended = family.extended_set();

    let mut minimal_cone_data = Vec::new();
    for &j in &extended {
        let (cone, coeffs) = minimal_containing_cone(&rays[j], rays, maximal_cones, j)?;
        minimal_cone_data.push((j, cone, coeffs));
    }

    // xi_j from the displayed pairing table.
    let mut xi = Vec::new();
    for (j, cone, coeffs) in &minimal_cone_data {
        let mut required = vec![Rat::zero(); p.char_count()];
        required[*j] = Rat::one();
        for (i, c) in cone.iter().zip(coeffs) {
            required[*i] = -c.clone();
        }
        let a_rows: Vec<Vec<Rat>> = (0..p.char_count()).map(|i| p.character_rat(i)).collect();
        let x = solve(&a_rows, &required).ok_or_else(|| {
            Error::Internal(format!("xi system inconsistent for extended index {}", j + 1))
        })?;
        xi.push(x);
    }

    // Basis of H^2: lexicographically-first maximal independent subset of the
    // classes theta(D_i), i not in S, taken modulo span{D_j : j in S}.
    let s_span: Vec<Vec<Rat>> = extended.iter().map(|&j| p.character_rat(j)).collect();
    let mut basis_indices: Vec<usize> = Vec::new();
    let mut accumulated = s_span.clone();
    for i in 0..p.char_count() {
        if extended.contains(&i) {
            continue;
        }
        let mut trial = accumulated.clone();
        trial.push(p.character_rat(i));
        if rank(&trial) > rank(&accumulated) {
            basis_indices.push(i);
            accumulated = trial;
        }
        if rank(&accumulated) == r {
            break;
        }
    }

    let theta = theta_matrix(p, &extended, &basis_indices)?;

    // Extended ample cone: facet intersection over minimal anticones.
    let mut all_facets: Vec<Vec<Rat>> = Vec::new();
    for j in &family.minimal {
        let gens: Vec<Vec<Rat>> = j.iter().map(|&i| p.character_rat(i)).collect();
        let facets = crate::kernel::cone::cone_facets(r, &gens)?;
        all_facets.extend(facets);
    }
    let extended_ample_cone = PolyCone::from_facets(r, &all_facets)?;

    // Ample cone: slice the extended ample cone by ker(xi_j) for j in S.
    let mut slice_facets = extended_ample_cone.facets().to_vec();
    for x in &xi {
        slice_facets.push(x.clone());
        slice_facets.push(neg(x));
    }
    let ample_cone = PolyCone::from_facets(r, &slice_facets)?;

    // Mori cone: dual of the ample cone inside the annihilator of the
    // extended classes.
    let mut mori_normals: Vec<Vec<Rat>> = ample_cone.generators().to_vec();
    for &j in &extended {
        let d = p.character_rat(j);
        mori_normals.push(neg(&d));
        mori_normals.push(d);
    }
    let mori_cone = PolyCone::from_facets(r, &mori_normals)?;

    Ok(DivisorClassData {
        extended,
        minimal_cone_data,
        xi,
        h2_basis_indices: basis_indices,
        theta,
        extended_ample_cone,
        ample_cone,
        mori_cone,
    })
}

/// Coordinates of every character's class in the chosen `H^2` basis, solving
/// `D_i = sum_t alpha_t B_t mod span{D_j : j in S}`.
pub fn theta_matrix(
    p: &GitPresentation,
    extended: &[usize],
    basis_indices: &[usize],
) -> Result<Vec<Vec<Rat>>> {
    let r = p.torus_rank;
    let h = basis_indices.len();
    let mut theta = Vec::with_capacity(p.char_count());
    for i in 0..p.char_count() {
        if extended.contains(&i) {
            theta.push(vec![Rat::zero(); h]);
            continue;
        }
        // Solve D_i = sum alpha_t B_t + sum beta_j D_j.
        let mut cols: Vec<Vec<Rat>> = basis_indices.iter().map(|&b| p.character_rat(b)).collect();
        cols.extend(extended.iter().map(|&j| p.character_rat(j)));
        let rows: Vec<Vec<Rat>> = (0..r)
            .map(|coord| cols.iter().map(|c| c[coord].clone()).collect())
            .collect();
        let sol = solve(&rows, &p.character_rat(i)).ok_or_else(|| {
            Error::Internal(format!("class of character {} outside basis span", i + 1))
        })?;
        theta.push(sol[..h].to_vec());
    }
    Ok(theta)
}

/// Minimal cone of the fan containing `point`, found through the simplicial
/// maximal cones; errors if distinct maximal cones disagree.
pub fn minimal_containing_cone(
    point: &[Rat],
    rays: &[Vec<Rat>],
    maximal_cones: &[Vec<usize>],
    index_for_error: usize,
) -> Result<(Vec<usize>, Vec<Rat>)> {
    let mut found: Option<(Vec<usize>, Vec<Rat>)> = None;
    for cone in maximal_cones {
        let gens: Vec<Vec<Rat>> = cone.iter().map(|&i| rays[i].clone()).collect();
        let Some(coords) = crate::kernel::solve::coordinates_in_span(&gens, point) else {
            continue;
        };
        if coords.iter().any(num::Signed::is_negative) {
            continue;
        }
        let support: Vec<usize> = cone
            .iter()
            .zip(&coords)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&i, _)| i)
            .collect();
        let coeffs: Vec<Rat> = coords.into_iter().filter(|c| !c.is_zero()).collect();
        match &found {
            None => found = Some((support, coeffs)),
            Some((prev, _)) => {
                if *prev != support {
                    return Err(Error::AmbiguousMinimalCone { index: index_for_error });
                }
            }
        }
    }
    found.ok_or(Error::ExtendedVectorOutsideSupport { index: index_for_error })
}

/// The xi pairing table must reproduce the defining display exactly.
pub fn verify_xi_pairings(p: &GitPresentation, data: &DivisorClassData) -> bool {
    for ((j, cone, coeffs), x) in data.minimal_cone_data.iter().zip(&data.xi) {
        for i in 0..p.char_count() {
            let pairing = dot(&p.character_rat(i), x);
            let expected = if i == *j {
                Rat::one()
            } else if let Some(pos) = cone.iter().position(|&c| c == i) {
                -coeffs[pos].clone()
            } else {
                Rat::zero()
            };
            if pairing != expected {
                return false;
            }
        }
    }
    true
}

/// H^2-annihilating subspace spanned by the extended classes; used by tests.
pub fn extended_class_span(p: &GitPresentation, extended: &[usize]) -> Subspace {
    let vecs: Vec<Vec<Rat>> = extended.iter().map(|&j| p.character_rat(j)).collect();
    Subspace::from_spanning(p.torus_rank, &vecs)
}
