//! Graded cohomology rings from Stanley-Reisner presentations, narrow
//! subspaces, multiplication kernels, and restriction maps.
//!
//! Rings are presented in reduced coordinates: a basis of the degree-two
//! part is chosen once, every divisor class becomes a linear form in that
//! basis, and the product relations are expanded accordingly. Degree slices
//! are reduced by exact row elimination, pivoting on the monomials in which
//! the latest basis coordinate is most significant; the surviving monomials
//! form the graded basis.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fan::{interior_cones, Model, TwistedSector};
use crate::kernel::rat::{is_zero_vec, primitive_rat, rat_to_string, Rat};
use crate::kernel::solve::{kernel_basis, rank, rref, solve, Subspace};
use crate::presentation::GitPresentation;

pub type Mono = Vec<u32>;

/// Sparse polynomial over the reduced ring coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one(h: usize) -> Poly {
        Poly::from_term(vec![0; h], Rat::one())
    }

    pub fn from_term(mono: Mono, coeff: Rat) -> Poly {
        let mut p = Poly::default();
        if !coeff.is_zero() {
            p.terms.insert(mono, coeff);
        }
        p
    }

    /// The linear form with the given coordinates.
    pub fn linear(coords: &[Rat]) -> Poly {
        let h = coords.len();
        let mut p = Poly::default();
        for (t, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                let mut mono = vec![0u32; h];
                mono[t] = 1;
                p.terms.insert(mono, c.clone());
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; polynomials here are homogeneous by construction.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, mono: Mono, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert_with(Rat::zero);
        *entry = &*entry + &coeff;
        if entry.is_zero() {
            let key: Vec<Mono> = self
                .terms
                .iter()
                .filter(|(_, c)| c.is_zero())
                .map(|(m, _)| m.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mono: Mono = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.add_term(mono, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        let mut out = Poly::default();
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a * c);
        }
        out
    }
}

/// Comparison key in which exponents of later coordinates dominate; slices
/// list monomials in descending key order, so elimination pivots kill the
/// latest-variable-heavy monomials first and the quotient basis keeps powers
/// of the earliest coordinate.
fn mono_key(m: &Mono) -> Vec<u32> {
    m.iter().rev().copied().collect()
}

fn monomials_of_degree(h: usize, d: usize) -> Vec<Mono> {
    let mut out = Vec::new();
    if h == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    let mut current = vec![0u32; h];
    fn rec(pos: usize, remaining: usize, current: &mut Mono, out: &mut Vec<Mono>) {
        if pos + 1 == current.len() {
            current[pos] = remaining as u32;
            out.push(current.clone());
            return;
        }
        for take in 0..=remaining {
            current[pos] = take as u32;
            rec(pos + 1, remaining - take, current, out);
        }
    }
    rec(0, d, &mut current, &mut out);
    out.sort_by(|a, b| mono_key(b).cmp(&mono_key(a)));
    out
}

/// One graded slice: its monomials (pivot order), the reduced relation rows,
/// and the surviving basis monomials.
#[derive(Debug, Clone)]
pub struct DegreeSlice {
    pub monomials: Vec<Mono>,
    index: BTreeMap<Mono, usize>,
    rel_rows: Vec<Vec<Rat>>,
    rel_pivots: Vec<usize>,
    pub basis_cols: Vec<usize>,
}

impl DegreeSlice {
    pub fn dim(&self) -> usize {
        self.basis_cols.len()
    }

    /// Reduce a full coefficient vector modulo the relation rows.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut v = v.to_vec();
        for (row, &p) in self.rel_rows.iter().zip(&self.rel_pivots) {
            if !v[p].is_zero() {
                let factor = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = &*x - &(r * &factor);
                }
            }
        }
        v
    }

    pub fn compress(&self, full: &[Rat]) -> Vec<Rat> {
        self.basis_cols.iter().map(|&c| full[c].clone()).collect()
    }

    pub fn expand(&self, coords: &[Rat]) -> Vec<Rat> {
        let mut full = vec![Rat::zero(); self.monomials.len()];
        for (&c, x) in self.basis_cols.iter().zip(coords) {
            full[c] = x.clone();
        }
        full
    }

    pub fn coeff_vector(&self, poly: &Poly) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.monomials.len()];
        for (m, c) in &poly.terms {
            if let Some(&i) = self.index.get(m) {
                v[i] = c.clone();
            }
        }
        v
    }

    pub fn basis_monomials(&self) -> Vec<Mono> {
        self.basis_cols.iter().map(|&c| self.monomials[c].clone()).collect()
    }
}

/// A homogeneous class in reduced slice coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohClass {
    pub degree: usize,
    pub coords: Vec<Rat>,
}

/// Presentation of a graded cohomology ring in reduced coordinates.
#[derive(Debug, Clone)]
pub struct GradedRing {
    /// Parent character index of each surviving variable.
    pub var_indices: Vec<usize>,
    pub var_labels: Vec<String>,
    /// Class of each surviving variable in the chosen degree-two basis.
    pub var_classes: Vec<Vec<Rat>>,
    /// Chosen degree-two basis as ambient vectors, with display labels.
    pub basis_vectors: Vec<Vec<Rat>>,
    pub basis_labels: Vec<String>,
    /// Minimal product relations as variable-position lists.
    pub transversals: Vec<Vec<usize>>,
    pub product_relations: Vec<Poly>,
    /// Algebra-degree cap (complex dimension of the stack).
    pub degree_cap: usize,
    slices: Vec<DegreeSlice>,
}

impl GradedRing {
    pub fn h(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn slice(&self, d: usize) -> Option<&DegreeSlice> {
        self.slices.get(d)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.slices.iter().map(DegreeSlice::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn dim_at(&self, d: usize) -> usize {
        self.slices.get(d).map_or(0, DegreeSlice::dim)
    }

    /// Linear form of a surviving variable.
    pub fn var_poly(&self, var_pos: usize) -> Poly {
        Poly::linear(&self.var_classes[var_pos])
    }

    /// Variable position of a parent character index, if it survived.
    pub fn var_pos(&self, parent_index: usize) -> Option<usize> {
        self.var_indices.iter().position(|&i| i == parent_index)
    }

    /// Normal form of a homogeneous polynomial, as slice coordinates.
    pub fn nf(&self, poly: &Poly) -> CohClass {
        let d = poly.degree();
        match self.slices.get(d) {
            None => CohClass { degree: d, coords: vec![] },
            Some(slice) => {
                let reduced = slice.reduce(&slice.coeff_vector(poly));
                CohClass { degree: d, coords: slice.compress(&reduced) }
            }
        }
    }

    pub fn class_to_poly(&self, class: &CohClass) -> Poly {
        let Some(slice) = self.slices.get(class.degree) else {
            return Poly::zero();
        };
        let full = slice.expand(&class.coords);
        let mut p = Poly::zero();
        for (m, c) in slice.monomials.iter().zip(full) {
            p.add_term(m.clone(), c);
        }
        p
    }

    /// Matrix of multiplication by a homogeneous polynomial from degree `d`
    /// to degree `d + deg`, acting on slice coordinates (rows indexed by the
    /// target basis, columns by the source basis).
    pub fn operator_matrix(&self, c: &Poly, d: usize) -> Vec<Vec<Rat>> {
        let k = c.degree();
        let source_dim = self.dim_at(d);
        let target_dim = self.dim_at(d + k);
        let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(source_dim);
        if let Some(source) = self.slices.get(d) {
            for mono in source.basis_monomials() {
                let product = c.mul(&Poly::from_term(mono, Rat::one()));
                let nf = self.nf(&product);
                let mut col = nf.coords;
                col.resize(target_dim, Rat::zero());
                columns.push(col);
            }
        }
        (0..target_dim)
            .map(|r| (0..source_dim).map(|cix| columns[cix][r].clone()).collect())
            .collect()
    }

    /// Display string of a homogeneous polynomial with the ring's labels.
    pub fn poly_string(&self, poly: &Poly) -> String {
        if poly.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(&Mono, &Rat)> = poly.terms.iter().collect();
        terms.sort_by(|a, b| mono_key(a.0).cmp(&mono_key(b.0)));
        let mut out = String::new();
        for (i, (mono, coeff)) in terms.iter().enumerate() {
            let mut body = String::new();
            for (t, &e) in mono.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !body.is_empty() {
                    body.push('*');
                }
                body.push_str(&self.basis_labels[t]);
                if e > 1 {
                    body.push_str(&format!("^{e}"));
                }
            }
            let is_const = body.is_empty();
            let mag = coeff.abs();
            let lead = if coeff.is_negative() {
                if i == 0 { "-" } else { " - " }
            } else if i == 0 {
                ""
            } else {
                " + "
            };
            out.push_str(lead);
            if is_const {
                out.push_str(&rat_to_string(&mag));
            } else {
                if !mag.is_one() {
                    out.push_str(&rat_to_string(&mag));
                    out.push('*');
                }
                out.push_str(&body);
            }
        }
        out
    }
}

/// Ordered basis candidate for the degree-two part.
#[derive(Debug, Clone)]
pub struct BasisCandidate {
    pub label: String,
    pub display_rank: usize,
    pub vector: Vec<Rat>,
}

/// Candidate list matching the conventions of the worked examples: the
/// exceptional class first in selection order (so it always survives), then
/// the ordinary characters from the last one down, then the fiber class.
pub fn paper_basis_candidates(
    p: &GitPresentation,
    e_index: Option<usize>,
    f_index: Option<usize>,
) -> Vec<BasisCandidate> {
    let mut out = Vec::new();
    if let Some(e) = e_index {
        out.push(BasisCandidate {
            label: "e".into(),
            display_rank: 1_000_000,
            vector: p.character_rat(e),
        });
    }
    for i in (0..p.char_count()).rev() {
        if Some(i) == e_index || Some(i) == f_index {
            continue;
        }
        out.push(BasisCandidate {
            label: format!("u{}", i + 1),
            display_rank: i,
            vector: p.character_rat(i),
        });
    }
    if let Some(f) = f_index {
        out.push(BasisCandidate {
            label: "f".into(),
            display_rank: 1_000_001,
            vector: p.character_rat(f),
        });
    }
    out
}

/// Candidates inherited from a parent ring's chosen basis, with the sector's
/// own character classes as a fallback.
pub fn inherited_basis_candidates(parent: &GradedRing, p: &GitPresentation) -> Vec<BasisCandidate> {
    let mut out: Vec<BasisCandidate> = parent
        .basis_vectors
        .iter()
        .zip(&parent.basis_labels)
        .enumerate()
        .map(|(rank, (v, l))| BasisCandidate {
            label: l.clone(),
            display_rank: rank,
            vector: v.clone(),
        })
        .collect();
    for i in (0..p.char_count()).rev() {
        out.push(BasisCandidate {
            label: format!("w{}", i + 1),
            display_rank: 2_000_000 + i,
            vector: p.character_rat(i),
        });
    }
    out
}

/// Build the Stanley-Reisner presentation of a validated model in reduced
/// coordinates with the given basis candidates.
pub fn ring_presentation(model: &Model, candidates: &[BasisCandidate]) -> Result<GradedRing> {
    let p = &model.presentation;
    let r = p.torus_rank;
    let extended = model.extended().to_vec();

    // Greedy basis selection modulo the span of the extended classes.
    let s_span: Vec<Vec<Rat>> = extended.iter().map(|&j| p.character_rat(j)).collect();
    let base_rank = rank(&s_span);
    let mut accumulated = s_span.clone();
    let mut chosen: Vec<BasisCandidate> = Vec::new();
    for cand in candidates {
        if rank(&accumulated) == r {
            break;
        }
        let mut trial = accumulated.clone();
        trial.push(cand.vector.clone());
        if rank(&trial) > rank(&accumulated) {
            accumulated = trial;
            chosen.push(cand.clone());
        }
    }
    if rank(&accumulated) != r {
        return Err(Error::Internal("basis candidates do not span H^2".into()));
    }
    chosen.sort_by_key(|c| c.display_rank);
    let h = r - base_rank;
    debug_assert_eq!(chosen.len(), h);

    // A single surviving ordinary class is called plain `u`.
    let mut basis_labels: Vec<String> = chosen.iter().map(|c| c.label.clone()).collect();
    let ordinary: Vec<usize> = basis_labels
        .iter()
        .enumerate()
        .filter(|(_, l)| l.starts_with('u') && l.len() > 1)
        .map(|(i, _)| i)
        .collect();
    if ordinary.len() == 1 {
        basis_labels[ordinary[0]] = "u".into();
    }
    let basis_vectors: Vec<Vec<Rat>> = chosen.iter().map(|c| c.vector.clone()).collect();

    // Classes of surviving variables in the chosen basis.
    let var_indices: Vec<usize> =
        (0..p.char_count()).filter(|i| !extended.contains(i)).collect();
    let var_labels: Vec<String> = var_indices.iter().map(|&i| p.labels[i].clone()).collect();
    let mut var_classes = Vec::with_capacity(var_indices.len());
    for &i in &var_indices {
        var_classes.push(class_coordinates(p, &extended, &basis_vectors, &p.character_rat(i))?);
    }

    // Minimal product relations from the anticone family.
    let mut transversals = Vec::new();
    for q in minimal_transversals(&model.family.minimal) {
        if q.len() == 1 && extended.contains(&q[0]) {
            continue; // encodes u_j = 0 for an extended index, already eliminated
        }
        debug_assert!(q.iter().all(|i| !extended.contains(i)));
        let positions: Vec<usize> = q
            .iter()
            .map(|&i| var_indices.iter().position(|&v| v == i).unwrap())
            .collect();
        transversals.push(positions);
    }
    transversals.sort();

    let degree_cap = p.char_count() - r;
    GradedRing::from_parts(
        var_indices,
        var_labels,
        var_classes,
        basis_vectors,
        basis_labels,
        transversals,
        degree_cap,
    )
}

impl GradedRing {
    /// Assemble a ring from its reduced presentation parts, computing and
    /// verifying the graded slices.
    pub fn from_parts(
        var_indices: Vec<usize>,
        var_labels: Vec<String>,
        var_classes: Vec<Vec<Rat>>,
        basis_vectors: Vec<Vec<Rat>>,
        basis_labels: Vec<String>,
        transversals: Vec<Vec<usize>>,
        degree_cap: usize,
    ) -> Result<GradedRing> {
        let h = basis_labels.len();
        let mut product_relations = Vec::new();
        for q in &transversals {
            let mut poly = Poly::one(h);
            for &pos in q {
                poly = poly.mul(&Poly::linear(&var_classes[pos]));
            }
            if !poly.is_zero() {
                product_relations.push(poly);
            }
        }

        let guard = product_relations.iter().map(Poly::degree).max().unwrap_or(1).max(1);
        let mut slices = Vec::new();
        for d in 0..=degree_cap + guard {
            let monomials = monomials_of_degree(h, d);
            let index: BTreeMap<Mono, usize> =
                monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            for rel in &product_relations {
                let q = rel.degree();
                if q > d {
                    continue;
                }
                for mono in monomials_of_degree(h, d - q) {
                    let shifted = rel.mul(&Poly::from_term(mono, Rat::one()));
                    let mut v = vec![Rat::zero(); monomials.len()];
                    for (m, c) in &shifted.terms {
                        v[index[m]] = c.clone();
                    }
                    rows.push(v);
                }
            }
            let (rel_rows, rel_pivots) = rref(&rows);
            let pivot_set: BTreeSet<usize> = rel_pivots.iter().copied().collect();
            let basis_cols: Vec<usize> =
                (0..monomials.len()).filter(|c| !pivot_set.contains(c)).collect();
            slices.push(DegreeSlice { monomials, index, rel_rows, rel_pivots, basis_cols });
        }
        for d in degree_cap + 1..=degree_cap + guard {
            let dim = slices[d].dim();
            if dim != 0 {
                return Err(Error::NonvanishingAboveCap { degree: 2 * d, dim });
            }
        }
        slices.truncate(degree_cap + 1);
        if slices[0].dim() != 1 {
            return Err(Error::Internal("degree-zero part is not one-dimensional".into()));
        }
        Ok(GradedRing {
            var_indices,
            var_labels,
            var_classes,
            basis_vectors,
            basis_labels,
            transversals,
            product_relations,
            degree_cap,
            slices,
        })
    }
}

/// Coordinates of `target` in `basis_vectors` modulo the span of the
/// extended classes.
pub fn class_coordinates(
    p: &GitPresentation,
    extended: &[usize],
    basis_vectors: &[Vec<Rat>],
    target: &[Rat],
) -> Result<Vec<Rat>> {
    let r = p.torus_rank;
    let h = basis_vectors.len();
    let mut cols: Vec<Vec<Rat>> = basis_vectors.to_vec();
    cols.extend(extended.iter().map(|&j| p.character_rat(j)));
    let rows: Vec<Vec<Rat>> = (0..r)
        .map(|coord| cols.iter().map(|c| c[coord].clone()).collect())
        .collect();
    let sol = solve(&rows, target)
        .ok_or_else(|| Error::Internal("class outside the chosen basis span".into()))?;
    Ok(sol[..h].to_vec())
}

/// Minimal hitting sets of a family of index sets.
pub fn minimal_transversals(family: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new()];
    for j in family {
        let mut next: Vec<BTreeSet<usize>> = Vec::new();
        for t in &sets {
            if j.iter().any(|x| t.contains(x)) {
                next.push(t.clone());
                continue;
            }
            for &x in j {
                let mut s = t.clone();
                s.insert(x);
                next.push(s);
            }
        }
        next.sort_by_key(BTreeSet::len);
        let mut pruned: Vec<BTreeSet<usize>> = Vec::new();
        for s in next {
            if !pruned.iter().any(|p| p.is_subset(&s)) {
                pruned.push(s);
            }
        }
        sets = pruned;
    }
    let mut out: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
    out.sort();
    out
}

/// A graded subspace of a ring, one canonical subspace per degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSubspace {
    pub per_degree: Vec<Subspace>,
    /// Provenance of the generators (interior cones or explicit classes).
    pub provenance: Vec<String>,
}

impl GradedSubspace {
    pub fn dims(&self) -> Vec<usize> {
        self.per_degree.iter().map(Subspace::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn equals(&self, other: &GradedSubspace) -> bool {
        self.per_degree == other.per_degree
    }

    pub fn contains(&self, other: &GradedSubspace) -> bool {
        self.per_degree
            .iter()
            .zip(&other.per_degree)
            .all(|(a, b)| a.contains_space(b))
    }

    pub fn sum(&self, other: &GradedSubspace) -> GradedSubspace {
        let per_degree = self
            .per_degree
            .iter()
            .zip(&other.per_degree)
            .map(|(a, b)| a.sum(b))
            .collect();
        let mut provenance = self.provenance.clone();
        provenance.extend(other.provenance.iter().cloned());
        GradedSubspace { per_degree, provenance }
    }

    pub fn intersect(&self, other: &GradedSubspace) -> GradedSubspace {
        let per_degree = self
            .per_degree
            .iter()
            .zip(&other.per_degree)
            .map(|(a, b)| a.intersect(b))
            .collect();
        GradedSubspace { per_degree, provenance: vec!["intersection".into()] }
    }

    /// First witness vector (with its degree) in `self` but not in `other`.
    pub fn witness_not_in(&self, other: &GradedSubspace) -> Option<(usize, Vec<Rat>)> {
        for (d, (a, b)) in self.per_degree.iter().zip(&other.per_degree).enumerate() {
            if let Some(w) = a.witness_not_in(b) {
                return Some((d, w));
            }
        }
        None
    }
}

/// Span of the ideal generated by homogeneous polynomials, degree by degree.
pub fn ideal_image(ring: &GradedRing, generators: &[Poly]) -> GradedSubspace {
    let mut per_degree = Vec::with_capacity(ring.degree_cap + 1);
    for d in 0..=ring.degree_cap {
        let dim = ring.dim_at(d);
        let mut vectors: Vec<Vec<Rat>> = Vec::new();
        for g in generators {
            if g.is_zero() {
                continue;
            }
            let q = g.degree();
            if q > d {
                continue;
            }
            for mono in monomials_of_degree(ring.h(), d - q) {
                let nf = ring.nf(&g.mul(&Poly::from_term(mono, Rat::one())));
                if !is_zero_vec(&nf.coords) {
                    vectors.push(nf.coords);
                }
            }
        }
        per_degree.push(Subspace::from_spanning(dim, &vectors));
    }
    let provenance = generators.iter().map(|g| ring.poly_string(g)).collect();
    GradedSubspace { per_degree, provenance }
}

/// Narrow subspace from the interior cones of the model's fan: the module
/// generated by the interior-cone monomials.
pub fn narrow_by_interior_cones(model: &Model, ring: &GradedRing) -> Result<GradedSubspace> {
    let interior = interior_cones(&model.fan)?;
    // Inclusion-minimal interior cones generate the same module.
    let mut minimal: Vec<Vec<usize>> = Vec::new();
    for cone in &interior {
        if !interior
            .iter()
            .any(|c| c != cone && c.iter().all(|i| cone.contains(i)))
        {
            minimal.push(cone.clone());
        }
    }
    let mut gens = Vec::new();
    let mut provenance = Vec::new();
    for cone in &minimal {
        let mut poly = Poly::one(ring.h());
        for &i in cone {
            let pos = ring.var_pos(i).ok_or_else(|| {
                Error::Internal(format!("interior cone ray {} is an extended index", i + 1))
            })?;
            poly = poly.mul(&ring.var_poly(pos));
        }
        provenance.push(format!(
            "interior cone {:?} -> {}",
            crate::presentation::paper_indices(cone),
            ring.poly_string(&poly)
        ));
        gens.push(poly);
    }
    let mut space = ideal_image(ring, &gens);
    space.provenance = provenance;
    Ok(space)
}

/// Kernel of multiplication by a homogeneous class, degree by degree.
pub fn mult_kernel(ring: &GradedRing, c: &Poly) -> GradedSubspace {
    let mut per_degree = Vec::with_capacity(ring.degree_cap + 1);
    for d in 0..=ring.degree_cap {
        let dim = ring.dim_at(d);
        if c.is_zero() {
            per_degree.push(Subspace::from_spanning(
                dim,
                &identity_rows(dim),
            ));
            continue;
        }
        let matrix = ring.operator_matrix(c, d);
        let kernel = kernel_basis(&matrix, dim);
        per_degree.push(Subspace::from_spanning(dim, &kernel));
    }
    GradedSubspace { per_degree, provenance: vec![format!("ker({} . -)", ring.poly_string(c))] }
}

fn identity_rows(dim: usize) -> Vec<Vec<Rat>> {
    (0..dim)
        .map(|i| {
            let mut row = vec![Rat::zero(); dim];
            row[i] = Rat::one();
            row
        })
        .collect()
}

/// The whole ring as a graded subspace.
pub fn full_space(ring: &GradedRing) -> GradedSubspace {
    let per_degree = (0..=ring.degree_cap)
        .map(|d| {
            let dim = ring.dim_at(d);
            Subspace::from_spanning(dim, &identity_rows(dim))
        })
        .collect();
    GradedSubspace { per_degree, provenance: vec!["1".into()] }
}

/// Quotient map induced by setting one degree-two class to zero.
#[derive(Debug, Clone)]
pub struct RestrictionMap {
    pub target: GradedRing,
    /// Per-degree matrices in slice coordinates.
    pub matrices: Vec<Vec<Vec<Rat>>>,
    /// Index of the eliminated basis coordinate in the source ring.
    pub killed_coordinate: usize,
}

impl RestrictionMap {
    /// Image of a graded subspace of the source.
    pub fn image(&self, space: &GradedSubspace) -> GradedSubspace {
        let per_degree = space
            .per_degree
            .iter()
            .enumerate()
            .map(|(d, sub)| {
                let dim = self.target.dim_at(d);
                let vectors: Vec<Vec<Rat>> = sub
                    .basis()
                    .iter()
                    .map(|v| apply_matrix(&self.matrices[d], v))
                    .collect();
                Subspace::from_spanning(dim, &vectors)
            })
            .collect();
        GradedSubspace { per_degree, provenance: vec!["restriction image".into()] }
    }

    /// Kernel of the map restricted to a graded subspace of the source,
    /// described by source-coordinate vectors per degree.
    pub fn kernel_on(&self, space: &GradedSubspace) -> Vec<(usize, Vec<Rat>)> {
        let mut out = Vec::new();
        for (d, sub) in space.per_degree.iter().enumerate() {
            if sub.dim() == 0 {
                continue;
            }
            // Columns: images of the subspace basis.
            let images: Vec<Vec<Rat>> =
                sub.basis().iter().map(|v| apply_matrix(&self.matrices[d], v)).collect();
            let target_dim = self.target.dim_at(d);
            let rows: Vec<Vec<Rat>> = (0..target_dim)
                .map(|r| images.iter().map(|img| img[r].clone()).collect())
                .collect();
            for combo in kernel_basis(&rows, sub.dim()) {
                let mut vec = vec![Rat::zero(); sub.basis().first().map_or(0, Vec::len)];
                for (c, b) in combo.iter().zip(sub.basis()) {
                    for (x, bi) in vec.iter_mut().zip(b) {
                        *x = &*x + &(c * bi);
                    }
                }
                if !is_zero_vec(&vec) {
                    out.push((d, vec));
                }
            }
        }
        out
    }
}

fn apply_matrix(m: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Build the quotient of `ring` by the degree-two class with the given
/// coordinates (typically the class of one surviving variable).
pub fn restriction_map(ring: &GradedRing, kill_coords: &[Rat]) -> Result<RestrictionMap> {
    let h = ring.h();
    assert_eq!(kill_coords.len(), h);
    let Some(t_star) = (0..h).rev().find(|&t| !kill_coords[t].is_zero()) else {
        return Err(Error::Internal("cannot quotient by the zero class".into()));
    };
    // Substitution g_{t*} = -(1/k_{t*}) sum_{t != t*} k_t g_t.
    let inv = -kill_coords[t_star].clone();
    let sub_coords: Vec<Rat> = (0..h)
        .filter(|&t| t != t_star)
        .map(|t| &kill_coords[t] / &inv)
        .collect();

    let project = |coords: &[Rat]| -> Vec<Rat> {
        let carry = coords[t_star].clone();
        (0..h)
            .filter(|&t| t != t_star)
            .enumerate()
            .map(|(new_t, t)| &coords[t] + &(&sub_coords[new_t] * &carry))
            .collect()
    };

    let var_classes: Vec<Vec<Rat>> = ring.var_classes.iter().map(|c| project(c)).collect();
    let basis_vectors: Vec<Vec<Rat>> = ring
        .basis_vectors
        .iter()
        .enumerate()
        .filter(|(t, _)| *t != t_star)
        .map(|(_, v)| v.clone())
        .collect();
    let basis_labels: Vec<String> = ring
        .basis_labels
        .iter()
        .enumerate()
        .filter(|(t, _)| *t != t_star)
        .map(|(_, l)| l.clone())
        .collect();
    let target = GradedRing::from_parts(
        ring.var_indices.clone(),
        ring.var_labels.clone(),
        var_classes,
        basis_vectors,
        basis_labels,
        ring.transversals.clone(),
        ring.degree_cap,
    )?;

    // Per-degree matrices: substitute into each source basis monomial.
    let mut matrices = Vec::with_capacity(ring.degree_cap + 1);
    for d in 0..=ring.degree_cap {
        let source_dim = ring.dim_at(d);
        let target_dim = target.dim_at(d);
        let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(source_dim);
        if let Some(slice) = ring.slice(d) {
            for mono in slice.basis_monomials() {
                // Expand the monomial with g_{t*} substituted.
                let mut poly = Poly::one(h - 1);
                for (t, &e) in mono.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let factor = if t == t_star {
                        Poly::linear(&sub_coords)
                    } else {
                        let new_t = if t < t_star { t } else { t - 1 };
                        let mut coords = vec![Rat::zero(); h - 1];
                        coords[new_t] = Rat::one();
                        Poly::linear(&coords)
                    };
                    for _ in 0..e {
                        poly = poly.mul(&factor);
                    }
                }
                let mut col = target.nf(&poly).coords;
                col.resize(target_dim, Rat::zero());
                columns.push(col);
            }
        }
        let matrix: Vec<Vec<Rat>> = (0..target_dim)
            .map(|r| (0..source_dim).map(|c| columns[c][r].clone()).collect())
            .collect();
        matrices.push(matrix);
    }
    Ok(RestrictionMap { target, matrices, killed_coordinate: t_star })
}

/// Chen-Ruan assembly: one ring per twisted sector, basis inherited from the
/// parent ring.
pub fn chen_ruan(
    model: &Model,
    parent_ring: &GradedRing,
) -> Result<Vec<(TwistedSector, Model, GradedRing)>> {
    let sectors = crate::fan::twisted_sectors(&model.presentation, &model.family)?;
    let mut out = Vec::new();
    for sector in sectors {
        let sub_model = model.sector_model(&sector)?;
        let candidates = inherited_basis_candidates(parent_ring, &sub_model.presentation);
        let ring = ring_presentation(&sub_model, &candidates)?;
        out.push((sector, sub_model, ring));
    }
    Ok(out)
}

/// Reduce the product relations to a minimal generating set, each generator
/// normalized to primitive integer coefficients with positive leading term.
pub fn minimal_relations(ring: &GradedRing) -> Vec<Poly> {
    let mut candidates: Vec<Poly> = ring.product_relations.clone();
    candidates.sort_by_key(Poly::degree);
    let mut accepted: Vec<Poly> = Vec::new();
    for cand in candidates {
        let d = cand.degree();
        let monomials = monomials_of_degree(ring.h(), d);
        let index: BTreeMap<Mono, usize> =
            monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for acc in &accepted {
            let q = acc.degree();
            if q > d {
                continue;
            }
            for mono in monomials_of_degree(ring.h(), d - q) {
                let shifted = acc.mul(&Poly::from_term(mono, Rat::one()));
                let mut v = vec![Rat::zero(); monomials.len()];
                for (m, c) in &shifted.terms {
                    v[index[m]] = c.clone();
                }
                rows.push(v);
            }
        }
        let (rref_rows, pivots) = rref(&rows);
        let mut v = vec![Rat::zero(); monomials.len()];
        for (m, c) in &cand.terms {
            v[index[m]] = c.clone();
        }
        for (row, &p) in rref_rows.iter().zip(&pivots) {
            if !v[p].is_zero() {
                let factor = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = &*x - &(r * &factor);
                }
            }
        }
        if is_zero_vec(&v) {
            continue;
        }
        let prim = primitive_rat(&v);
        let lead = prim.iter().find(|c| !c.is_zero()).unwrap();
        let sign = if lead.is_negative() { -Rat::one() } else { Rat::one() };
        let mut poly = Poly::zero();
        for (m, c) in monomials.iter().zip(&prim) {
            poly.add_term(m.clone(), c * &sign);
        }
        accepted.push(poly);
    }
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rat::int;

    fn model(r: usize, chars: &[Vec<i64>], omega: &[i64]) -> Model {
        Model::analyze(GitPresentation::from_i64(r, chars, omega)).unwrap()
    }

    fn default_ring(m: &Model) -> GradedRing {
        let candidates = paper_basis_candidates(&m.presentation, None, None);
        ring_presentation(m, &candidates).unwrap()
    }

    #[test]
    fn projective_space_ring() {
        let m = model(1, &vec![vec![1]; 5], &[1]);
        let ring = default_ring(&m);
        assert_eq!(ring.basis_labels, vec!["u"]);
        assert_eq!(ring.dims(), vec![1, 1, 1, 1, 1]);
        let rels = minimal_relations(&ring);
        assert_eq!(rels.len(), 1);
        assert_eq!(ring.poly_string(&rels[0]), "u^5");
    }

    #[test]
    fn weighted_projective_ring_dims() {
        let m = model(1, &[vec![1], vec![1], vec![1], vec![2], vec![2], vec![1]], &[1]);
        let ring = default_ring(&m);
        assert_eq!(ring.dims(), vec![1; 6]);
    }

    #[test]
    fn poincare_duality_dims() {
        for chars in [vec![vec![1]; 4], vec![vec![1], vec![2], vec![3], vec![1]]] {
            let m = model(1, &chars, &[1]);
            let ring = default_ring(&m);
            let dims = ring.dims();
            let n = dims.len() - 1;
            for k in 0..=n {
                assert_eq!(dims[k], dims[n - k], "duality fails at {k}: {dims:?}");
            }
        }
    }

    #[test]
    fn mono_order_prefers_early_variables() {
        let monos = monomials_of_degree(2, 2);
        assert_eq!(monos, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn product_of_projective_spaces() {
        // P^1 x P^2 with characters split across two factors.
        let m = model(
            2,
            &[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1]],
            &[1, 1],
        );
        let ring = default_ring(&m);
        assert_eq!(ring.dims(), vec![1, 2, 2, 1]);
        let rels = minimal_relations(&ring);
        assert_eq!(rels.len(), 2);
    }

    #[test]
    fn extended_presentation_of_p1() {
        // S = {1}: the ring collapses to C[u]/<u^2>.
        let m = model(2, &[vec![1, 0], vec![0, 1], vec![1, 1]], &[2, 1]);
        let ring = default_ring(&m);
        assert_eq!(ring.var_indices, vec![1, 2]);
        assert_eq!(ring.dims(), vec![1, 1]);
    }

    #[test]
    fn narrow_of_complete_fan_is_everything() {
        let m = model(1, &vec![vec![1]; 3], &[1]);
        let ring = default_ring(&m);
        let narrow = narrow_by_interior_cones(&m, &ring).unwrap();
        assert!(narrow.equals(&full_space(&ring)));
    }

    #[test]
    fn narrow_of_total_space_matches_fiber_ideal() {
        // T = O_{P^2}(-3): characters (1,1,1,-3).
        let m = model(1, &[vec![1], vec![1], vec![1], vec![-3]], &[1]);
        let ring = default_ring(&m);
        let narrow = narrow_by_interior_cones(&m, &ring).unwrap();
        let f_pos = ring.var_pos(3).unwrap();
        let ideal = ideal_image(&ring, &[ring.var_poly(f_pos)]);
        assert!(narrow.equals(&ideal));
        assert_eq!(narrow.dims(), vec![0, 1, 1, 0]);
    }

    #[test]
    fn mult_kernel_trivial_cases() {
        let m = model(1, &vec![vec![1]; 3], &[1]);
        let ring = default_ring(&m);
        let whole = mult_kernel(&ring, &Poly::zero());
        assert!(whole.equals(&full_space(&ring)));
        let none = mult_kernel(&ring, &Poly::one(1));
        assert_eq!(none.total_dim(), 0);
    }

    #[test]
    fn multiplication_operators_commute() {
        let m = model(
            2,
            &[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1]],
            &[1, 1],
        );
        let ring = default_ring(&m);
        for a in 0..ring.var_indices.len() {
            for b in a + 1..ring.var_indices.len() {
                let pa = ring.var_poly(a);
                let pb = ring.var_poly(b);
                for d in 0..=ring.degree_cap.saturating_sub(2) {
                    let ab = compose(&ring.operator_matrix(&pa, d + 1), &ring.operator_matrix(&pb, d));
                    let ba = compose(&ring.operator_matrix(&pb, d + 1), &ring.operator_matrix(&pa, d));
                    assert_eq!(ab, ba);
                }
            }
        }
    }

    fn compose(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
        a.iter()
            .map(|row| {
                (0..b.first().map_or(0, Vec::len))
                    .map(|c| row.iter().zip(b).map(|(x, brow)| x * &brow[c]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn restriction_to_hyperplane_ring() {
        // Kill one factor's class in the P^1 x P^2 ring: dimensions drop to
        // those of C[v]/<v^3>.
        let m = model(
            2,
            &[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1]],
            &[1, 1],
        );
        let ring = default_ring(&m);
        // Kill the class of the first factor (label of variable 0).
        let kill = ring.var_classes[0].clone();
        let restriction = restriction_map(&ring, &kill).unwrap();
        assert_eq!(restriction.target.dims(), vec![1, 1, 1, 0]);
    }

    #[test]
    fn chen_ruan_weighted_projective() {
        let m = model(1, &[vec![1], vec![1], vec![1], vec![2], vec![2], vec![1]], &[1]);
        let ring = default_ring(&m);
        let sectors = chen_ruan(&m, &ring).unwrap();
        assert_eq!(sectors.len(), 2);
        let twisted = sectors.iter().find(|(s, _, _)| !s.is_untwisted()).unwrap();
        // X_{1/2} = P(2,2): the ring is C[u]/<u^2> on the inherited class.
        assert_eq!(twisted.2.dims(), vec![1, 1]);
        let rels = minimal_relations(&twisted.2);
        assert_eq!(rels.len(), 1);
        assert_eq!(twisted.2.poly_string(&rels[0]), "u^2");
    }

    #[test]
    fn ideal_of_unit_is_everything() {
        let m = model(1, &vec![vec![1]; 3], &[1]);
        let ring = default_ring(&m);
        let whole = ideal_image(&ring, &[Poly::one(1)]);
        assert!(whole.equals(&full_space(&ring)));
    }

    #[test]
    fn poly_display() {
        let m = model(1, &vec![vec![1]; 3], &[1]);
        let ring = default_ring(&m);
        let mut p = Poly::zero();
        p.add_term(vec![2], int(-3));
        p.add_term(vec![1], int(1));
        assert_eq!(ring.poly_string(&p), "u - 3*u^2");
    }
}
