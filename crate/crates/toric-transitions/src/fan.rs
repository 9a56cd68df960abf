//! Stacky fans from GIT data: cone families, interior-cone queries, and
//! twisted-sector enumeration.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::Zero;

use crate::error::{Error, Result};
use crate::kernel::mat::{cokernel_presentation, overlattice_cosets, IntMatrix};
use crate::kernel::rat::{dot_int_rat, frac_part, from_int_vec, Rat};
use crate::kernel::solve::{coordinates_in_span, rank};
use crate::presentation::{anticones, AnticoneFamily, GitPresentation};

/// The fan of a presentation in the free part of the quotient lattice.
#[derive(Debug, Clone)]
pub struct StackyFan {
    /// Rank of the free part of N.
    pub n_free_rank: usize,
    /// Torsion factors of N.
    pub n_torsion: Vec<BigInt>,
    /// Full projection matrix Z^m -> Z^n (+) torsion coordinates.
    pub beta: IntMatrix,
    /// Free-part ray images, one per character.
    pub rays: Vec<Vec<Rat>>,
    /// Maximal cone index sets (complements of minimal anticones).
    pub maximal_cones: Vec<Vec<usize>>,
    /// Extended index set S.
    pub extended: Vec<usize>,
}

impl StackyFan {
    /// All cone index sets: subsets of maximal cones, deduplicated.
    pub fn all_cones(&self) -> Vec<Vec<usize>> {
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        for max in &self.maximal_cones {
            for mask in 0u64..(1 << max.len()) {
                let cone: Vec<usize> = max
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &i)| i)
                    .collect();
                out.insert(cone);
            }
        }
        out.into_iter().collect()
    }

    /// Geometric membership of a point in the cone spanned by an index set.
    pub fn cone_contains(&self, cone: &[usize], point: &[Rat]) -> bool {
        let gens: Vec<Vec<Rat>> = cone.iter().map(|&i| self.rays[i].clone()).collect();
        match coordinates_in_span(&gens, point) {
            Some(coords) => coords.iter().all(|c| !num::Signed::is_negative(c)),
            None => point.iter().all(Zero::is_zero) && cone.is_empty(),
        }
    }
}

/// Build the fan of a validated presentation from the cokernel of its
/// character matrix.
pub fn build_fan(p: &GitPresentation, family: &AnticoneFamily) -> Result<StackyFan> {
    let matrix = IntMatrix::from_rows(&p.characters);
    let ck = cokernel_presentation(&matrix);
    let n = ck.free_rank;
    let rays: Vec<Vec<Rat>> = (0..p.char_count())
        .map(|i| {
            let col = ck.projection.col(i);
            from_int_vec(&col[..n])
        })
        .collect();
    let maximal_cones = family.maximal_cones();
    for cone in &maximal_cones {
        let vecs: Vec<Vec<Rat>> = cone.iter().map(|&i| rays[i].clone()).collect();
        if rank(&vecs) != cone.len() {
            return Err(Error::NonSimplicial { cone: cone.clone() });
        }
    }
    Ok(StackyFan {
        n_free_rank: n,
        n_torsion: ck.torsion_factors,
        beta: ck.projection,
        rays,
        maximal_cones,
        extended: family.extended_set(),
    })
}

/// Interior cones by the boundary-facet criterion: a cone is interior iff it
/// is contained in no codimension-one cone that lies on exactly one maximal
/// cone. Requires a pure full-dimensional fan.
pub fn interior_cones(fan: &StackyFan) -> Result<Vec<Vec<usize>>> {
    let n = fan.n_free_rank;
    if fan.maximal_cones.is_empty() {
        return Err(Error::NotPureFullDimensional { reason: "fan has no maximal cones".into() });
    }
    for cone in &fan.maximal_cones {
        if cone.len() != n {
            return Err(Error::NotPureFullDimensional {
                reason: format!(
                    "maximal cone {:?} has {} rays in dimension {}",
                    crate::presentation::paper_indices(cone),
                    cone.len(),
                    n
                ),
            });
        }
        let vecs: Vec<Vec<Rat>> = cone.iter().map(|&i| fan.rays[i].clone()).collect();
        if rank(&vecs) != n {
            return Err(Error::NonSimplicial { cone: cone.clone() });
        }
    }

    // Count how many maximal cones contain each codimension-one face.
    let mut facet_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for cone in &fan.maximal_cones {
        for drop in 0..cone.len() {
            let facet: Vec<usize> = cone
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != drop)
                .map(|(_, &i)| i)
                .collect();
            *facet_count.entry(facet).or_insert(0) += 1;
        }
    }
    let boundary_facets: Vec<Vec<usize>> = facet_count
        .into_iter()
        .filter(|(_, count)| *count == 1)
        .map(|(facet, _)| facet)
        .collect();

    let mut interior = Vec::new();
    for cone in fan.all_cones() {
        let on_boundary = boundary_facets.iter().any(|facet| {
            cone.iter().all(|&i| {
                facet.contains(&i) || {
                    // Geometric fallback for duplicated ray directions.
                    let gens: Vec<Vec<Rat>> =
                        facet.iter().map(|&f| fan.rays[f].clone()).collect();
                    match coordinates_in_span(&gens, &fan.rays[i]) {
                        Some(coords) => coords.iter().all(|c| !num::Signed::is_negative(c)),
                        None => false,
                    }
                }
            })
        });
        if !on_boundary {
            interior.push(cone);
        }
    }
    Ok(interior)
}

/// A component of the inertia stack: a coset representative, the indices it
/// fixes, and the induced sub-presentation.
#[derive(Debug, Clone)]
pub struct TwistedSector {
    /// Representative with coordinates in [0,1).
    pub nu: Vec<Rat>,
    /// Indices with integral pairing against nu.
    pub i_nu: Vec<usize>,
    /// Canonical key: fractional pairings against all characters.
    pub key: Vec<Rat>,
    /// Presentation on the characters indexed by `i_nu`, same stability.
    pub sub_presentation: GitPresentation,
    /// Sum of fractional pairings over all characters. Convention only; the
    /// toolkit never feeds this into any verdict.
    pub age_label: Rat,
}

impl TwistedSector {
    pub fn is_untwisted(&self) -> bool {
        self.key.iter().all(Zero::is_zero)
    }
}

/// Enumerate the twisted sectors of a validated presentation: overlattice
/// cosets of each minimal anticone, deduplicated by fractional pairing key.
pub fn twisted_sectors(p: &GitPresentation, family: &AnticoneFamily) -> Result<Vec<TwistedSector>> {
    let mut seen: BTreeMap<Vec<Rat>, TwistedSector> = BTreeMap::new();
    for j in &family.minimal {
        let rows: Vec<Vec<BigInt>> = j.iter().map(|&i| p.characters[i].clone()).collect();
        let matrix = IntMatrix::from_rows(&rows);
        for nu in overlattice_cosets(&matrix)? {
            let key: Vec<Rat> = (0..p.char_count())
                .map(|i| frac_part(&dot_int_rat(&p.characters[i], &nu)))
                .collect();
            if seen.contains_key(&key) {
                continue;
            }
            let i_nu: Vec<usize> = key
                .iter()
                .enumerate()
                .filter(|(_, f)| f.is_zero())
                .map(|(i, _)| i)
                .collect();
            if !family.contains(&i_nu) {
                return Err(Error::Internal(format!(
                    "sector index set {:?} escaped the anticone family",
                    crate::presentation::paper_indices(&i_nu)
                )));
            }
            let sub_presentation = GitPresentation::with_labels(
                p.torus_rank,
                i_nu.iter().map(|&i| p.characters[i].clone()).collect(),
                p.stability.clone(),
                i_nu.iter().map(|&i| p.labels[i].clone()).collect(),
            );
            let age_label: Rat = key.iter().cloned().sum();
            seen.insert(
                key.clone(),
                TwistedSector { nu, i_nu, key, sub_presentation, age_label },
            );
        }
    }
    Ok(seen.into_values().collect())
}

/// Split sectors of a hat presentation by integrality of the pairing with a
/// distinguished character index; optionally verify the bijection of the
/// integral part with the sectors of a base presentation under
/// `nu -> (nu, 0)` (the base key embeds with a zero inserted at `e_index`).
pub fn classify_sectors_int_frac(
    sectors: &[TwistedSector],
    e_index: usize,
    base: Option<&[TwistedSector]>,
) -> Result<(Vec<TwistedSector>, Vec<TwistedSector>)> {
    let mut int_list = Vec::new();
    let mut frac_list = Vec::new();
    for s in sectors {
        if s.key[e_index].is_zero() {
            int_list.push(s.clone());
        } else {
            frac_list.push(s.clone());
        }
    }
    if let Some(base_sectors) = base {
        if base_sectors.len() != int_list.len() {
            return Err(Error::BijectionFailure {
                reason: format!(
                    "{} integral sectors vs {} base sectors",
                    int_list.len(),
                    base_sectors.len()
                ),
            });
        }
        for b in base_sectors {
            let mut expected = b.key.clone();
            expected.insert(e_index, Rat::zero());
            if !int_list.iter().any(|s| s.key == expected) {
                return Err(Error::BijectionFailure {
                    reason: format!(
                        "base sector with key {:?} has no integral partner",
                        b.key.iter().map(crate::kernel::rat::rat_to_string).collect::<Vec<_>>()
                    ),
                });
            }
        }
    }
    Ok((int_list, frac_list))
}

/// Restriction of an anticone family to the characters of a sector: minimal
/// anticones of the sub-presentation are exactly the parent minimal
/// anticones contained in `i_nu`, reindexed.
pub fn restrict_family(family: &AnticoneFamily, i_nu: &[usize]) -> AnticoneFamily {
    let position: BTreeMap<usize, usize> =
        i_nu.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let minimal: Vec<Vec<usize>> = family
        .minimal
        .iter()
        .filter(|j| j.iter().all(|i| position.contains_key(i)))
        .map(|j| j.iter().map(|i| position[i]).collect())
        .collect();
    AnticoneFamily { minimal, char_count: i_nu.len() }
}

/// Convenience bundle: presentation, anticone family and fan together.
#[derive(Debug, Clone)]
pub struct Model {
    pub presentation: GitPresentation,
    pub family: AnticoneFamily,
    pub fan: StackyFan,
}

impl Model {
    pub fn analyze(presentation: GitPresentation) -> Result<Model> {
        let report = crate::presentation::validate(&presentation)?;
        if !report.is_valid() {
            return Err(Error::Validation(report.failures.join("; ")));
        }
        let family = anticones(&presentation)?;
        let fan = build_fan(&presentation, &family)?;
        Ok(Model { presentation, family, fan })
    }

    pub fn extended(&self) -> &[usize] {
        &self.fan.extended
    }

    /// Sub-model for a twisted sector, reusing the parent anticone scan.
    pub fn sector_model(&self, sector: &TwistedSector) -> Result<Model> {
        let family = restrict_family(&self.family, &sector.i_nu);
        let fan = build_fan(&sector.sub_presentation, &family)?;
        Ok(Model { presentation: sector.sub_presentation.clone(), family, fan })
    }
}
