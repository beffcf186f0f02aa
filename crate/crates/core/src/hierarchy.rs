//! Hierarchical meshes and the hierarchical B-spline basis.
//!
//! Subdomains `Ω_ℓ` are stored as sets of level-`ℓ` cells. A function `β` of level `ℓ`
//! belongs to `ℬᵏ_{ℓ,ℓ'}` when its open support lies in `Ω_{ℓ'}`, i.e. when every
//! level-`ℓ` element of its support is a cell of `Ω_{ℓ'}`. Active and deactivated sets
//! are `𝒜ᵏ_ℓ = ℬᵏ_{ℓ,ℓ} \ ℬᵏ_{ℓ,ℓ+1}` and `𝒟ᵏ_ℓ = ℬᵏ_{ℓ,ℓ+1}`, restricted to functions
//! that survive homogeneous boundary conditions.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{FunctionIndex, LevelSpace};

/// Axis-aligned half-open box of cell indices, `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellBox {
    pub x: [usize; 2],
    pub y: [usize; 2],
}

impl CellBox {
    pub fn new(x: [usize; 2], y: [usize; 2]) -> Self {
        CellBox { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSet {
    dims: [usize; 2],
    mask: Vec<bool>,
}

impl CellSet {
    pub fn empty(dims: [usize; 2]) -> Self {
        CellSet { dims, mask: vec![false; dims[0] * dims[1]] }
    }

    pub fn full(dims: [usize; 2]) -> Self {
        CellSet { dims, mask: vec![true; dims[0] * dims[1]] }
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn contains(&self, e1: usize, e2: usize) -> bool {
        e1 < self.dims[0] && e2 < self.dims[1] && self.mask[e2 * self.dims[0] + e1]
    }

    pub fn insert(&mut self, e1: usize, e2: usize) {
        self.mask[e2 * self.dims[0] + e1] = true;
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    /// Cells in `(e2, e1)` lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n1 = self.dims[0];
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(move |(t, _)| (t % n1, t / n1))
    }

    pub fn contains_all(&self, rx: std::ops::Range<usize>, ry: std::ops::Range<usize>) -> bool {
        ry.clone().all(|e2| rx.clone().all(|e1| self.contains(e1, e2)))
    }

    /// The same region on the next finer grid.
    pub fn refine(&self) -> CellSet {
        let mut out = CellSet::empty([2 * self.dims[0], 2 * self.dims[1]]);
        for (e1, e2) in self.iter() {
            for (c1, c2) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                out.insert(2 * e1 + c1, 2 * e2 + c2);
            }
        }
        out
    }

    /// Coarse cells whose four children all belong to the set.
    pub fn coarsen(&self) -> CellSet {
        let dims = [self.dims[0] / 2, self.dims[1] / 2];
        let mut out = CellSet::empty(dims);
        for e2 in 0..dims[1] {
            for e1 in 0..dims[0] {
                if self.contains_all(2 * e1..2 * e1 + 2, 2 * e2..2 * e2 + 2) {
                    out.insert(e1, e2);
                }
            }
        }
        out
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        let mask = self.mask.iter().zip(&other.mask).map(|(&a, &b)| a && !b).collect();
        CellSet { dims: self.dims, mask }
    }
}

/// Nested levels with their subdomains `Ω_0 ⊇ Ω_1 ⊇ … ⊇ Ω_L`.
#[derive(Debug, Clone)]
pub struct HierarchicalMesh {
    levels: Vec<LevelSpace>,
    /// `Ω_ℓ` in level-`ℓ` cells.
    domains: Vec<CellSet>,
    /// `Ω_{ℓ+1}` in level-`ℓ` cells (empty for the finest level).
    refined: Vec<CellSet>,
    /// Maximal `𝒮_ℓ ⊂ ℬ²_ℓ` generating `Ω_{ℓ+1}`, as linear `X²` indices.
    generators: Vec<Vec<usize>>,
}

impl HierarchicalMesh {
    /// Builds the mesh from per-level refinement boxes. `refinement[ℓ]` lists the
    /// level-`(ℓ+1)` cell boxes whose union is `Ω_{ℓ+1}`; `L = refinement.len()`.
    pub fn build(degree: usize, base: [usize; 2], refinement: &[Vec<CellBox>]) -> Result<Self> {
        let mut levels = vec![LevelSpace::build(degree, base, 0)?];
        let mut domains = vec![CellSet::full(levels[0].elements())];
        let mut refined = Vec::new();
        let mut generators = Vec::new();

        for (l, boxes) in refinement.iter().enumerate() {
            let fine = levels[l].refine();
            let dims = fine.elements();
            let mut omega = CellSet::empty(dims);
            for b in boxes {
                if b.x[0] >= b.x[1] || b.y[0] >= b.y[1] || b.x[1] > dims[0] || b.y[1] > dims[1] {
                    return Err(Error::arg(format!(
                        "box {b:?} invalid for the {}x{} cell grid of level {}",
                        dims[0],
                        dims[1],
                        l + 1
                    )));
                }
                for e2 in b.y[0]..b.y[1] {
                    for e1 in b.x[0]..b.x[1] {
                        omega.insert(e1, e2);
                    }
                }
            }
            if let Some((e1, e2)) = omega.iter().find(|&(e1, e2)| !domains[l].contains(e1 / 2, e2 / 2)) {
                return Err(Error::Admissibility {
                    level: l + 1,
                    detail: format!("cell ({e1}, {e2}) lies outside the level-{l} subdomain"),
                });
            }

            let coarse = omega.coarsen();
            let (cover, gens) = support_cover(&levels[l], &coarse, 2);
            if cover.refine() != omega {
                return Err(Error::Admissibility {
                    level: l + 1,
                    detail: format!("region is not a union of supports of level-{l} X2 functions"),
                });
            }
            generators.push(gens);
            refined.push(coarse);
            domains.push(omega);
            levels.push(fine);
        }
        let last = levels.len() - 1;
        refined.push(CellSet::empty(levels[last].elements()));
        Ok(HierarchicalMesh { levels, domains, refined, generators })
    }

    /// Index `L` of the finest level.
    pub fn finest(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn degree(&self) -> usize {
        self.levels[0].degree()
    }

    pub fn level(&self, l: usize) -> &LevelSpace {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[LevelSpace] {
        &self.levels
    }

    /// `Ω_ℓ` as level-`ℓ` cells.
    pub fn domain(&self, l: usize) -> &CellSet {
        &self.domains[l]
    }

    /// `Ω_{ℓ+1}` as level-`ℓ` cells.
    pub fn refined_region(&self, l: usize) -> &CellSet {
        &self.refined[l]
    }

    /// `Ω_{ℓ'}` as level-`ℓ` cells, for `ℓ' ∈ {ℓ, ℓ+1}`.
    pub fn domain_at(&self, l: usize, target: usize) -> &CellSet {
        match target - l {
            0 => &self.domains[l],
            1 => &self.refined[l],
            _ => panic!("subdomain {target} is not expressible on level {l}"),
        }
    }

    /// Cells of level `ℓ` in `Ω_ℓ \ Ω_{ℓ+1}`.
    pub fn active_cells(&self, l: usize) -> CellSet {
        self.domains[l].difference(&self.refined[l])
    }

    pub fn generators(&self, l: usize) -> &[usize] {
        &self.generators[l]
    }

    /// Whether `f` (a level-`ℓ` function) has its support inside `Ω_{ℓ'}`.
    pub fn support_in(&self, l: usize, f: FunctionIndex, target: usize) -> bool {
        let (rx, ry) = self.levels[l].support_elements(f);
        self.domain_at(l, target).contains_all(rx, ry)
    }

    /// `ℬᵏ_{ℓ,ℓ'}` as sorted linear indices, boundary functions excluded.
    pub fn contained_functions(&self, k: usize, l: usize, target: usize) -> Vec<usize> {
        let space = &self.levels[l];
        (0..space.dim(k))
            .filter(|&t| {
                let f = space.unlinear(k, t);
                space.is_interior(f) && self.support_in(l, f, target)
            })
            .collect()
    }
}

/// Union of supports of all `Xᵏ` functions contained in `region`, and those functions.
fn support_cover(space: &LevelSpace, region: &CellSet, k: usize) -> (CellSet, Vec<usize>) {
    let mut cover = CellSet::empty(region.dims());
    let mut chosen = Vec::new();
    for t in 0..space.dim(k) {
        let (rx, ry) = space.support_elements(space.unlinear(k, t));
        if region.contains_all(rx.clone(), ry.clone()) {
            chosen.push(t);
            for e2 in ry {
                for e1 in rx.clone() {
                    cover.insert(e1, e2);
                }
            }
        }
    }
    (cover, chosen)
}

/// Active and deactivated functions of one form degree across all levels, with a
/// global numbering of `ℋᵏ_L = ⋃_ℓ 𝒜ᵏ_ℓ` (level-major, then linear order).
#[derive(Debug, Clone)]
pub struct HierarchicalBasis {
    k: usize,
    active: Vec<Vec<usize>>,
    deactivated: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    lookup: Vec<Vec<Option<usize>>>,
}

impl HierarchicalBasis {
    pub fn form_degree(&self) -> usize {
        self.k
    }

    pub fn active(&self, l: usize) -> &[usize] {
        &self.active[l]
    }

    pub fn deactivated(&self, l: usize) -> &[usize] {
        &self.deactivated[l]
    }

    pub fn num_levels(&self) -> usize {
        self.active.len()
    }

    /// `dim Wᵏ_L`.
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Global DOF of an active level-`ℓ` function.
    pub fn global(&self, l: usize, linear: usize) -> Option<usize> {
        self.lookup[l][linear]
    }

    /// `(level, linear index)` of a global DOF.
    pub fn local(&self, global: usize) -> (usize, usize) {
        let l = self.offsets.partition_point(|&o| o <= global) - 1;
        (l, self.active[l][global - self.offsets[l]])
    }

    pub fn level_offset(&self, l: usize) -> usize {
        self.offsets[l]
    }
}

/// Selects `ℋᵏ_L` for one form degree.
pub fn select_basis(mesh: &HierarchicalMesh, k: usize) -> Result<HierarchicalBasis> {
    let nl = mesh.num_levels();
    let mut active = Vec::with_capacity(nl);
    let mut deactivated = Vec::with_capacity(nl);
    for l in 0..nl {
        let own = mesh.contained_functions(k, l, l);
        let next: BTreeSet<usize> = mesh.contained_functions(k, l, l + 1).into_iter().collect();
        if let Some(t) = next.iter().find(|t| own.binary_search(t).is_err()) {
            return Err(Error::Consistency(format!(
                "level-{l} X{k} function {t} is in B_(l,l+1) but not in B_(l,l)"
            )));
        }
        active.push(own.into_iter().filter(|t| !next.contains(t)).collect::<Vec<_>>());
        deactivated.push(next.into_iter().collect::<Vec<_>>());
    }

    let mut offsets = vec![0];
    let mut lookup = Vec::with_capacity(nl);
    for (l, a) in active.iter().enumerate() {
        let mut map = vec![None; mesh.level(l).dim(k)];
        for (t, &idx) in a.iter().enumerate() {
            map[idx] = Some(offsets[l] + t);
        }
        lookup.push(map);
        offsets.push(offsets[l] + a.len());
    }
    let basis = HierarchicalBasis { k, active, deactivated, offsets, lookup };
    verify_recursion(mesh, &basis)?;
    Ok(basis)
}

/// Re-derives `ℋᵏ_L` with `ℋ_{ℓ+1} = (ℋ_ℓ \ ℬ_{ℓ,ℓ+1}) ∪ ℬ_{ℓ+1,ℓ+1}` and compares.
fn verify_recursion(mesh: &HierarchicalMesh, basis: &HierarchicalBasis) -> Result<()> {
    let k = basis.k;
    let mut h: BTreeSet<(usize, usize)> = mesh.contained_functions(k, 0, 0).into_iter().map(|t| (0, t)).collect();
    for l in 0..mesh.finest() {
        for t in mesh.contained_functions(k, l, l + 1) {
            h.remove(&(l, t));
        }
        h.extend(mesh.contained_functions(k, l + 1, l + 1).into_iter().map(|t| (l + 1, t)));
    }
    let union: BTreeSet<(usize, usize)> = basis
        .active
        .iter()
        .enumerate()
        .flat_map(|(l, a)| a.iter().map(move |&t| (l, t)))
        .collect();
    if h != union {
        return Err(Error::Consistency(format!(
            "X{k}: recursive basis has {} functions, union of active sets has {}",
            h.len(),
            union.len()
        )));
    }
    Ok(())
}

/// Hierarchical bases for `k = 0, 1, 2`.
#[derive(Debug, Clone)]
pub struct HierarchicalSpace {
    bases: [HierarchicalBasis; 3],
}

impl HierarchicalSpace {
    pub fn new(mesh: &HierarchicalMesh) -> Result<Self> {
        Ok(HierarchicalSpace { bases: [select_basis(mesh, 0)?, select_basis(mesh, 1)?, select_basis(mesh, 2)?] })
    }

    pub fn basis(&self, k: usize) -> &HierarchicalBasis {
        &self.bases[k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionDefect {
    Disconnected,
    NotSimplyConnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityFailure {
    pub level: usize,
    pub function: FunctionIndex,
    pub defect: RegionDefect,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub failures: Vec<AdmissibilityFailure>,
    /// Per level `ℓ < L`: whether `Ω_{ℓ+1}` is also a union of supports of `X⁰` functions.
    pub generated_by_x0: Vec<bool>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every level `ℓ`, form degree `k` and function `β ∈ ℬᵏ_ℓ`, checks that
/// `supp β ∩ (Ω \ Ω_{ℓ+1})` is connected and simply connected.
pub fn check_admissibility(mesh: &HierarchicalMesh) -> AdmissibilityReport {
    let mut report = AdmissibilityReport::default();
    for l in 0..mesh.num_levels() {
        let space = mesh.level(l);
        let refined = mesh.refined_region(l);
        for k in 0..3 {
            for t in 0..space.dim(k) {
                let f = space.unlinear(k, t);
                let (rx, ry) = space.support_elements(f);
                let cells: Vec<(usize, usize)> = ry
                    .flat_map(|e2| rx.clone().map(move |e1| (e1, e2)))
                    .filter(|&(e1, e2)| !refined.contains(e1, e2))
                    .collect();
                if let Some(defect) = region_defect(&cells) {
                    report.failures.push(AdmissibilityFailure { level: l, function: f, defect });
                }
            }
        }
        if l < mesh.finest() {
            let (cover, _) = support_cover(space, refined, 0);
            report.generated_by_x0.push(&cover == refined);
        }
    }
    report
}

/// Connectivity by edge adjacency, then simple connectivity through the Euler
/// characteristic `V - E + F = 1` of the closed cell complex. Empty regions pass.
pub fn region_defect(cells: &[(usize, usize)]) -> Option<RegionDefect> {
    if cells.is_empty() {
        return None;
    }
    let set: HashSet<(usize, usize)> = cells.iter().copied().collect();
    let mut seen = HashSet::from([cells[0]]);
    let mut queue = VecDeque::from([cells[0]]);
    while let Some((a, b)) = queue.pop_front() {
        let mut nbrs = vec![(a + 1, b), (a, b + 1)];
        if a > 0 {
            nbrs.push((a - 1, b));
        }
        if b > 0 {
            nbrs.push((a, b - 1));
        }
        for n in nbrs {
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    if seen.len() != set.len() {
        return Some(RegionDefect::Disconnected);
    }
    let mut vertices = HashSet::new();
    let mut edges = HashSet::new();
    for &(a, b) in &set {
        vertices.extend([(a, b), (a + 1, b), (a, b + 1), (a + 1, b + 1)]);
        // horizontal edges tagged 0, vertical 1, keyed by their lower-left vertex
        edges.extend([(a, b, 0), (a, b + 1, 0), (a, b, 1), (a + 1, b, 1)]);
    }
    let chi = vertices.len() as isize - edges.len() as isize + set.len() as isize;
    if chi != 1 {
        return Some(RegionDefect::NotSimplyConnected);
    }
    None
}
