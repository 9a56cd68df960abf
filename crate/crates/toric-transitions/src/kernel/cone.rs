//! Polyhedral cones over the rationals: double description at desk scale.
//!
//! The double description method below keeps an explicit lineality basis, so
//! non-pointed cones (half-planes, full spaces) are handled uniformly. All
//! vectors are normalized to primitive integer direction vectors.

use std::collections::BTreeSet;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::kernel::rat::{dot, is_zero_vec, neg, primitive_rat, sub, Rat};
use crate::kernel::solve::rank;

const MAX_DIM: usize = 12;
const MAX_GENERATORS: usize = 64;

/// V-representation of a cone: `span(lineality) + cone(rays)`.
#[derive(Debug, Clone)]
pub struct ConeRep {
    pub lineality: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
}

struct Ray {
    v: Vec<Rat>,
    tight: BTreeSet<usize>,
}

/// Generators of the polar cone `{y : <y, v> >= 0 for all v}`.
pub fn polar_cone(dim: usize, vectors: &[Vec<Rat>]) -> Result<ConeRep> {
    if dim > MAX_DIM || vectors.len() > MAX_GENERATORS {
        return Err(Error::DoubleDescriptionLimit { dim, generators: vectors.len() });
    }
    let mut constraints: Vec<Vec<Rat>> = Vec::new();
    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for v in vectors {
        if is_zero_vec(v) {
            continue;
        }
        let p = primitive_rat(v);
        if seen.insert(p.clone()) {
            constraints.push(p);
        }
    }

    let mut lineality: Vec<Vec<Rat>> = (0..dim)
        .map(|i| {
            let mut e = vec![Rat::zero(); dim];
            e[i] = Rat::from(num::BigInt::from(1));
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (idx, h) in constraints.iter().enumerate() {
        let lin_pairings: Vec<Rat> = lineality.iter().map(|l| dot(h, l)).collect();
        if let Some(pos) = lin_pairings.iter().position(|p| !p.is_zero()) {
            // Split the lineality direction that sees the constraint.
            let mut l0 = lineality.remove(pos);
            let mut p0 = lin_pairings[pos].clone();
            if p0.is_negative() {
                l0 = neg(&l0);
                p0 = -p0;
            }
            for (i, l) in lineality.iter_mut().enumerate() {
                let pi = &lin_pairings[if i < pos { i } else { i + 1 }];
                if !pi.is_zero() {
                    let coef = pi / &p0;
                    let shift: Vec<Rat> = l0.iter().map(|x| x * &coef).collect();
                    *l = sub(l, &shift);
                }
            }
            for r in rays.iter_mut() {
                let pr = dot(h, &r.v);
                if !pr.is_zero() {
                    let coef = &pr / &p0;
                    let shift: Vec<Rat> = l0.iter().map(|x| x * &coef).collect();
                    r.v = primitive_rat(&sub(&r.v, &shift));
                }
                r.tight.insert(idx);
            }
            let tight: BTreeSet<usize> = (0..idx).collect();
            rays.push(Ray { v: primitive_rat(&l0), tight });
            continue;
        }

        let pairings: Vec<Rat> = rays.iter().map(|r| dot(h, &r.v)).collect();
        if pairings.iter().all(|p| !p.is_negative()) {
            for (r, p) in rays.iter_mut().zip(&pairings) {
                if p.is_zero() {
                    r.tight.insert(idx);
                }
            }
            continue;
        }
        let mut new_rays: Vec<Ray> = Vec::new();
        for (i, ri) in rays.iter().enumerate() {
            if !pairings[i].is_positive() {
                continue;
            }
            for (j, rj) in rays.iter().enumerate() {
                if !pairings[j].is_negative() {
                    continue;
                }
                let common: BTreeSet<usize> = ri.tight.intersection(&rj.tight).copied().collect();
                let adjacent = !rays.iter().enumerate().any(|(k, rk)| {
                    k != i && k != j && common.is_subset(&rk.tight)
                });
                if !adjacent {
                    continue;
                }
                let a = &pairings[i];
                let b = &pairings[j];
                // w = a * r_j - b * r_i pairs to zero with h.
                let w: Vec<Rat> = rj
                    .v
                    .iter()
                    .zip(&ri.v)
                    .map(|(x, y)| a * x - b * y)
                    .collect();
                if is_zero_vec(&w) {
                    continue;
                }
                let mut tight = common;
                tight.insert(idx);
                new_rays.push(Ray { v: primitive_rat(&w), tight });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (r, p) in rays.into_iter().zip(pairings.iter()) {
            if p.is_positive() {
                kept.push(r);
            } else if p.is_zero() {
                let mut r = r;
                r.tight.insert(idx);
                kept.push(r);
            }
        }
        for nr in new_rays {
            if !kept.iter().any(|r| r.v == nr.v) {
                kept.push(nr);
            }
        }
        rays = kept;
    }

    let mut ray_vecs: Vec<Vec<Rat>> = rays.into_iter().map(|r| r.v).collect();
    ray_vecs.sort();
    ray_vecs.dedup();
    let mut lin: Vec<Vec<Rat>> = lineality.into_iter().map(|l| primitive_rat(&l)).collect();
    lin.retain(|l| !is_zero_vec(l));
    lin.sort();
    Ok(ConeRep { lineality: lin, rays: ray_vecs })
}

/// Irredundant facet normals of `cone(generators)`. Non-full-dimensional
/// cones are described with opposite normal pairs for the span equations.
pub fn cone_facets(dim: usize, generators: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>> {
    let polar = polar_cone(dim, generators)?;
    let mut facets = polar.rays;
    for l in polar.lineality {
        facets.push(neg(&l));
        facets.push(l);
    }
    facets.sort();
    facets.dedup();
    Ok(facets)
}

/// Generators (rays plus a lineality basis folded in as opposite pairs) of
/// the cone cut out by `<h, x> >= 0` for each listed normal.
pub fn generators_from_facets(dim: usize, facets: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>> {
    let rep = polar_cone(dim, facets)?;
    let mut gens = rep.rays;
    for l in rep.lineality {
        gens.push(neg(&l));
        gens.push(l);
    }
    gens.sort();
    gens.dedup();
    Ok(gens)
}

/// A rational polyhedral cone carrying both representations.
#[derive(Debug, Clone)]
pub struct PolyCone {
    dim: usize,
    generators: Vec<Vec<Rat>>,
    facets: Vec<Vec<Rat>>,
}

impl PolyCone {
    pub fn from_generators(dim: usize, generators: &[Vec<Rat>]) -> Result<Self> {
        let mut gens: Vec<Vec<Rat>> = generators
            .iter()
            .filter(|g| !is_zero_vec(g))
            .map(|g| primitive_rat(g))
            .collect();
        gens.sort();
        gens.dedup();
        let facets = cone_facets(dim, &gens)?;
        Ok(PolyCone { dim, generators: gens, facets })
    }

    pub fn from_facets(dim: usize, facets: &[Vec<Rat>]) -> Result<Self> {
        let gens = generators_from_facets(dim, facets)?;
        Self::from_generators(dim, &gens)
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<Rat>] {
        &self.generators
    }

    pub fn facets(&self) -> &[Vec<Rat>] {
        &self.facets
    }

    /// Facet normals that occur together with their negation (the span
    /// equations of a non-full-dimensional cone).
    pub fn equation_normals(&self) -> Vec<Vec<Rat>> {
        self.facets
            .iter()
            .filter(|h| self.facets.contains(&neg(h)))
            .cloned()
            .collect()
    }

    /// Facet normals that are genuine inequalities (not equations).
    pub fn proper_facets(&self) -> Vec<Vec<Rat>> {
        self.facets
            .iter()
            .filter(|h| !self.facets.contains(&neg(h)))
            .cloned()
            .collect()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.facets.iter().all(|h| !dot(h, x).is_negative())
    }

    pub fn contains_cone(&self, other: &PolyCone) -> bool {
        other.generators.iter().all(|g| self.contains(g))
    }

    pub fn equals(&self, other: &PolyCone) -> bool {
        self.contains_cone(other) && other.contains_cone(self)
    }

    pub fn relative_interior_contains(&self, x: &[Rat]) -> bool {
        self.facets.iter().all(|h| {
            let p = dot(h, x);
            if self.facets.contains(&neg(h)) {
                p.is_zero()
            } else {
                p.is_positive()
            }
        })
    }

    pub fn span_dim(&self) -> usize {
        rank(&self.generators)
    }

    /// Intersection via concatenated facet systems.
    pub fn intersect(&self, other: &PolyCone) -> Result<PolyCone> {
        assert_eq!(self.dim, other.dim);
        let mut facets = self.facets.clone();
        facets.extend(other.facets.iter().cloned());
        PolyCone::from_facets(self.dim, &facets)
    }

    /// The dual cone `{y : <y, g> >= 0 for all generators g}`.
    pub fn dual(&self) -> Result<PolyCone> {
        PolyCone::from_facets(self.dim, &self.generators)
    }

    /// Round-trip invariant: generators of the facet system span this cone.
    pub fn verify_round_trip(&self) -> Result<bool> {
        let regen = generators_from_facets(self.dim, &self.facets)?;
        let back = PolyCone::from_generators(self.dim, &regen)?;
        Ok(self.equals(&back))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rat::int;

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn quadrant_is_self_dual() {
        let facets = cone_facets(2, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(facets, vec![v(&[0, 1]), v(&[1, 0])]);
    }

    #[test]
    fn skew_cone_facets() {
        let facets = cone_facets(2, &[v(&[1, 1]), v(&[1, 0])]).unwrap();
        assert_eq!(facets, vec![v(&[0, 1]), v(&[1, -1])]);
        // Both generators satisfy both normals, tight where expected.
        for g in [v(&[1, 1]), v(&[1, 0])] {
            for h in &facets {
                assert!(!dot(h, &g).is_negative());
            }
        }
    }

    #[test]
    fn half_plane_single_facet() {
        let facets = cone_facets(2, &[v(&[1, 0]), v(&[-1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(facets, vec![v(&[0, 1])]);
    }

    #[test]
    fn full_space_has_no_facets() {
        let facets = cone_facets(2, &[v(&[1, 0]), v(&[-1, 0]), v(&[0, 1]), v(&[0, -1])]).unwrap();
        assert!(facets.is_empty());
    }

    #[test]
    fn ray_in_plane_needs_equations() {
        let cone = PolyCone::from_generators(2, &[v(&[1, 0])]).unwrap();
        assert!(cone.contains(&v(&[2, 0])));
        assert!(!cone.contains(&v(&[-1, 0])));
        assert!(!cone.contains(&v(&[1, 1])));
        assert!(cone.verify_round_trip().unwrap());
        assert_eq!(cone.equation_normals().len(), 2);
    }

    #[test]
    fn relative_interior() {
        let cone = PolyCone::from_generators(2, &[v(&[1, 1]), v(&[1, 0])]).unwrap();
        assert!(cone.relative_interior_contains(&v(&[2, 1])));
        assert!(!cone.relative_interior_contains(&v(&[1, 1])));
        assert!(!cone.relative_interior_contains(&v(&[0, 0])));
    }

    #[test]
    fn three_dimensional_octant_round_trip() {
        let cone =
            PolyCone::from_generators(3, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(cone.facets().len(), 3);
        assert!(cone.verify_round_trip().unwrap());
        let dual = cone.dual().unwrap();
        assert!(dual.equals(&cone));
    }

    #[test]
    fn square_pyramid_cone() {
        // Cone over a square: four facets, DD must produce adjacent-pair rays.
        let gens = [v(&[1, 1, 1]), v(&[-1, 1, 1]), v(&[1, -1, 1]), v(&[-1, -1, 1])];
        let cone = PolyCone::from_generators(3, &gens).unwrap();
        assert_eq!(cone.facets().len(), 4);
        let dual = cone.dual().unwrap();
        assert_eq!(dual.generators().len(), 4);
        assert!(cone.verify_round_trip().unwrap());
        // Dual of dual round trip.
        assert!(dual.dual().unwrap().equals(&cone));
    }

    #[test]
    fn limit_guard() {
        let gens: Vec<Vec<Rat>> = (0..70).map(|i| v(&[i, 1])).collect();
        assert!(matches!(
            cone_facets(2, &gens),
            Err(Error::DoubleDescriptionLimit { .. })
        ));
    }
}
