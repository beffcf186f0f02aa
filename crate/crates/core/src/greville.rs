//! Greville grids and the per-level Greville subgrids used as graphs.
//!
//! Node `(i, j)` sits at the tensor Greville point `(γ¹ᵢ, γ²ⱼ)` and carries the `X⁰`
//! function `(i, j)`. Edges carry `X¹` functions and cells carry `X²` functions, with
//! the same numbering as the spline spaces. The subgrid `G_{ℓ,ℓ'}` consists of the
//! cells whose `X²` function has support inside `Ω_{ℓ'}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{HierarchicalMesh, HierarchicalSpace};
use crate::sparse::CsrMatrix;
use crate::tensor::{Axis, FormSpace, FunctionIndex, Geometry, LevelSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct GrevilleGrid {
    level: usize,
    n: [usize; 2],
    gx: Vec<f64>,
    gy: Vec<f64>,
    geometry: Geometry,
}

impl GrevilleGrid {
    pub fn build(space: &LevelSpace, geometry: Geometry) -> Self {
        let gx = space.standard(Axis::X).greville_abscissae().expect("standard flavor");
        let gy = space.standard(Axis::Y).greville_abscissae().expect("standard flavor");
        GrevilleGrid { level: space.level(), n: [gx.len(), gy.len()], gx, gy, geometry }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Nodes per direction.
    pub fn shape(&self) -> [usize; 2] {
        self.n
    }

    pub fn num_nodes(&self) -> usize {
        self.n[0] * self.n[1]
    }

    fn num_x_edges(&self) -> usize {
        (self.n[0] - 1) * self.n[1]
    }

    pub fn num_edges(&self) -> usize {
        self.num_x_edges() + self.n[0] * (self.n[1] - 1)
    }

    pub fn num_cells(&self) -> usize {
        (self.n[0] - 1) * (self.n[1] - 1)
    }

    pub fn node_id(&self, i: usize, j: usize) -> usize {
        j * self.n[0] + i
    }

    pub fn node_ij(&self, id: usize) -> (usize, usize) {
        (id % self.n[0], id / self.n[0])
    }

    pub fn cell_id(&self, i: usize, j: usize) -> usize {
        j * (self.n[0] - 1) + i
    }

    /// Edge from node `(i, j)` in the `+x` or `+y` direction.
    pub fn edge_id(&self, dir: Axis, i: usize, j: usize) -> usize {
        match dir {
            Axis::X => j * (self.n[0] - 1) + i,
            Axis::Y => self.num_x_edges() + j * self.n[0] + i,
        }
    }

    /// Direction and lower node `(i, j)` of an edge.
    pub fn edge_origin(&self, e: usize) -> (Axis, usize, usize) {
        if e < self.num_x_edges() {
            (Axis::X, e % (self.n[0] - 1), e / (self.n[0] - 1))
        } else {
            let r = e - self.num_x_edges();
            (Axis::Y, r % self.n[0], r / self.n[0])
        }
    }

    /// Endpoints `(lower, higher)` of an edge.
    pub fn edge_nodes(&self, e: usize) -> (usize, usize) {
        let (dir, i, j) = self.edge_origin(e);
        match dir {
            Axis::X => (self.node_id(i, j), self.node_id(i + 1, j)),
            Axis::Y => (self.node_id(i, j), self.node_id(i, j + 1)),
        }
    }

    /// Cells touching an edge (one or two).
    pub fn edge_cells(&self, e: usize) -> Vec<usize> {
        let (dir, i, j) = self.edge_origin(e);
        let mut out = Vec::with_capacity(2);
        match dir {
            Axis::X => {
                if j > 0 {
                    out.push(self.cell_id(i, j - 1));
                }
                if j + 1 < self.n[1] {
                    out.push(self.cell_id(i, j));
                }
            }
            Axis::Y => {
                if i > 0 {
                    out.push(self.cell_id(i - 1, j));
                }
                if i + 1 < self.n[0] {
                    out.push(self.cell_id(i, j));
                }
            }
        }
        out
    }

    /// Cells touching a node (one to four).
    pub fn node_cells(&self, id: usize) -> Vec<usize> {
        let (i, j) = self.node_ij(id);
        let mut out = Vec::with_capacity(4);
        for cj in j.saturating_sub(1)..=j.min(self.n[1] - 2) {
            for ci in i.saturating_sub(1)..=i.min(self.n[0] - 2) {
                out.push(self.cell_id(ci, cj));
            }
        }
        out
    }

    /// Edges of a cell: bottom, top, left, right.
    pub fn cell_edges(&self, c: usize) -> [usize; 4] {
        let (i, j) = (c % (self.n[0] - 1), c / (self.n[0] - 1));
        [
            self.edge_id(Axis::X, i, j),
            self.edge_id(Axis::X, i, j + 1),
            self.edge_id(Axis::Y, i, j),
            self.edge_id(Axis::Y, i + 1, j),
        ]
    }

    /// Corners of a cell in counter-clockwise order.
    pub fn cell_nodes(&self, c: usize) -> [usize; 4] {
        let (i, j) = (c % (self.n[0] - 1), c / (self.n[0] - 1));
        [self.node_id(i, j), self.node_id(i + 1, j), self.node_id(i + 1, j + 1), self.node_id(i, j + 1)]
    }

    pub fn parametric_position(&self, id: usize) -> [f64; 2] {
        let (i, j) = self.node_ij(id);
        [self.gx[i], self.gy[j]]
    }

    /// Greville point mapped to the physical domain.
    pub fn position(&self, id: usize) -> [f64; 2] {
        self.geometry.map(self.parametric_position(id))
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// Signed node-edge incidence: `-1` at the lower endpoint, `+1` at the higher one.
    pub fn incidence_matrix(&self) -> CsrMatrix {
        let triplets = (0..self.num_edges())
            .flat_map(|e| {
                let (a, b) = self.edge_nodes(e);
                [(e, a, -1.0), (e, b, 1.0)]
            })
            .collect();
        CsrMatrix::from_triplets(self.num_edges(), self.num_nodes(), triplets)
    }
}

/// Role of a subgrid entity in the tree construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityClass {
    Boundary,
    Active,
    Deactivated,
}

impl EntityClass {
    /// Kruskal weight: boundary edges first, then active, then deactivated.
    pub fn weight(self) -> u8 {
        match self {
            EntityClass::Boundary => 1,
            EntityClass::Active => 2,
            EntityClass::Deactivated => 3,
        }
    }
}

/// The subgrid `G_{ℓ,ℓ}` as a graph, with entities classified against `G_{ℓ,ℓ+1}`.
#[derive(Debug, Clone)]
pub struct LevelGraph {
    grid: GrevilleGrid,
    cells: Vec<bool>,
    cells_next: Vec<bool>,
    node_class: Vec<Option<EntityClass>>,
    edge_class: Vec<Option<EntityClass>>,
    nodes: Vec<usize>,
    edges: Vec<usize>,
}

impl LevelGraph {
    /// Classifies the subgrid purely from cell membership. An edge with fewer than two
    /// member cells, or a node with fewer than four, lies on the boundary.
    pub fn from_cells(grid: GrevilleGrid, cells: Vec<bool>, cells_next: Vec<bool>) -> Self {
        assert_eq!(cells.len(), grid.num_cells());
        assert_eq!(cells_next.len(), grid.num_cells());
        let classify = |incident: Vec<usize>, full: usize| {
            let inside = incident.iter().filter(|&&c| cells[c]).count();
            if inside == 0 {
                None
            } else if inside < full {
                Some(EntityClass::Boundary)
            } else if incident.iter().all(|&c| cells_next[c]) {
                Some(EntityClass::Deactivated)
            } else {
                Some(EntityClass::Active)
            }
        };
        let node_class: Vec<_> = (0..grid.num_nodes()).map(|v| classify(grid.node_cells(v), 4)).collect();
        let edge_class: Vec<_> = (0..grid.num_edges()).map(|e| classify(grid.edge_cells(e), 2)).collect();
        let nodes = (0..grid.num_nodes()).filter(|&v| node_class[v].is_some()).collect();
        let edges = (0..grid.num_edges()).filter(|&e| edge_class[e].is_some()).collect();
        LevelGraph { grid, cells, cells_next, node_class, edge_class, nodes, edges }
    }

    pub fn grid(&self) -> &GrevilleGrid {
        &self.grid
    }

    pub fn level(&self) -> usize {
        self.grid.level()
    }

    /// Whether a cell belongs to `G_{ℓ,ℓ}`.
    pub fn has_cell(&self, c: usize) -> bool {
        self.cells[c]
    }

    /// Whether a cell belongs to `G_{ℓ,ℓ+1}`.
    pub fn has_next_cell(&self, c: usize) -> bool {
        self.cells_next[c]
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn node_class(&self, v: usize) -> Option<EntityClass> {
        self.node_class[v]
    }

    pub fn edge_class(&self, e: usize) -> Option<EntityClass> {
        self.edge_class[e]
    }

    pub fn edge_weight(&self, e: usize) -> Option<u8> {
        self.edge_class[e].map(EntityClass::weight)
    }

    pub fn nodes_of(&self, class: EntityClass) -> Vec<usize> {
        self.nodes.iter().copied().filter(|&v| self.node_class[v] == Some(class)).collect()
    }

    pub fn edges_of(&self, class: EntityClass) -> Vec<usize> {
        self.edges.iter().copied().filter(|&e| self.edge_class[e] == Some(class)).collect()
    }

    /// Connected components of the subgraph formed by `edges` over `nodes`.
    fn count_components(&self, nodes: &[usize], edges: &[usize]) -> usize {
        let mut uf = crate::gauging::UnionFind::new(self.grid.num_nodes());
        let mut merged = 0;
        for &e in edges {
            let (a, b) = self.grid.edge_nodes(e);
            if uf.union(a, b) {
                merged += 1;
            }
        }
        nodes.len() - merged
    }

    pub fn num_components(&self) -> usize {
        self.count_components(&self.nodes, &self.edges)
    }

    /// Components of the boundary subgraph `𝒢^∂_ℓ`.
    pub fn num_boundary_components(&self) -> usize {
        self.count_components(&self.nodes_of(EntityClass::Boundary), &self.edges_of(EntityClass::Boundary))
    }

    /// Incidence restricted to the subgraph; rows follow [`Self::edges`], columns [`Self::nodes`].
    pub fn incidence_matrix(&self) -> CsrMatrix {
        let mut col = vec![usize::MAX; self.grid.num_nodes()];
        for (t, &v) in self.nodes.iter().enumerate() {
            col[v] = t;
        }
        let triplets = self
            .edges
            .iter()
            .enumerate()
            .flat_map(|(r, &e)| {
                let (a, b) = self.grid.edge_nodes(e);
                [(r, col[a], -1.0), (r, col[b], 1.0)]
            })
            .collect();
        CsrMatrix::from_triplets(self.edges.len(), self.nodes.len(), triplets)
    }
}

/// Builds `G_{ℓ,ℓ}` for level `l` and cross-checks its interior entities against the
/// active and deactivated sets of the hierarchical basis.
pub fn build_subgraph(
    grid: &GrevilleGrid,
    mesh: &HierarchicalMesh,
    space: &HierarchicalSpace,
    l: usize,
) -> Result<LevelGraph> {
    let level = mesh.level(l);
    if grid.shape() != level.n() {
        return Err(Error::arg("grid does not belong to this level"));
    }
    let member = |target: usize| -> Vec<bool> {
        (0..grid.num_cells())
            .map(|c| {
                let (i, j) = (c % (grid.shape()[0] - 1), c / (grid.shape()[0] - 1));
                mesh.support_in(l, FunctionIndex { space: FormSpace::X2, i, j }, target)
            })
            .collect()
    };
    let graph = LevelGraph::from_cells(grid.clone(), member(l), member(l + 1));

    for (k, what) in [(0, "node"), (1, "edge")] {
        let basis = space.basis(k);
        let classes = if k == 0 { &graph.node_class } else { &graph.edge_class };
        let pick = |class| -> Vec<usize> { (0..classes.len()).filter(|&t| classes[t] == Some(class)).collect() };
        if pick(EntityClass::Active) != basis.active(l) {
            return Err(Error::Consistency(format!(
                "level {l}: active {what}s of the Greville subgrid differ from the active X{k} functions"
            )));
        }
        if pick(EntityClass::Deactivated) != basis.deactivated(l) {
            return Err(Error::Consistency(format!(
                "level {l}: deactivated {what}s of the Greville subgrid differ from the deactivated X{k} functions"
            )));
        }
    }
    Ok(graph)
}

/// All level graphs of a mesh.
pub fn build_level_graphs(mesh: &HierarchicalMesh, space: &HierarchicalSpace, geometry: Geometry) -> Result<Vec<LevelGraph>> {
    (0..mesh.num_levels())
        .map(|l| build_subgraph(&GrevilleGrid::build(mesh.level(l), geometry), mesh, space, l))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::CellBox;

    fn graphs(p: usize, base: [usize; 2], refinement: &[Vec<CellBox>]) -> (HierarchicalMesh, HierarchicalSpace, Vec<LevelGraph>) {
        let mesh = HierarchicalMesh::build(p, base, refinement).unwrap();
        let space = HierarchicalSpace::new(&mesh).unwrap();
        let g = build_level_graphs(&mesh, &space, Geometry::unit()).unwrap();
        (mesh, space, g)
    }

    #[test]
    fn grid_counts() {
        let s = LevelSpace::build(1, [4, 4], 0).unwrap();
        let g = GrevilleGrid::build(&s, Geometry::unit());
        assert_eq!((g.num_nodes(), g.num_edges(), g.num_cells()), (25, 40, 16));
        // p = 1 Greville points are the knots
        assert_eq!(g.parametric_position(g.node_id(1, 3)), [0.25, 0.75]);
        let s = LevelSpace::build(2, [8, 8], 0).unwrap();
        let g = GrevilleGrid::build(&s, Geometry::unit());
        assert_eq!((g.num_nodes(), g.num_edges(), g.num_cells()), (100, 180, 81));
        assert_eq!(g.num_cells(), s.dim(2));
        assert_eq!(g.num_edges(), s.dim(1));
    }

    #[test]
    fn incidence_equals_gradient() {
        for p in 1..=3 {
            let s = LevelSpace::build(p, [3, 5], 1).unwrap();
            let g = GrevilleGrid::build(&s, Geometry::default());
            assert_eq!(&g.incidence_matrix(), s.gradient_operator().matrix());
        }
    }

    #[test]
    fn cell_topology() {
        let s = LevelSpace::build(2, [3, 3], 0).unwrap();
        let g = GrevilleGrid::build(&s, Geometry::unit());
        for c in 0..g.num_cells() {
            let corners = g.cell_nodes(c);
            for e in g.cell_edges(c) {
                let (a, b) = g.edge_nodes(e);
                assert!(corners.contains(&a) && corners.contains(&b));
                assert!(g.edge_cells(e).contains(&c));
            }
            for v in corners {
                assert!(g.node_cells(v).contains(&c));
            }
        }
    }

    #[test]
    fn single_edge_incidence() {
        let s = LevelSpace::build(1, [2, 2], 0).unwrap();
        let g = GrevilleGrid::build(&s, Geometry::unit());
        let mut cells = vec![false; 4];
        cells[0] = true;
        let graph = LevelGraph::from_cells(g.clone(), cells, vec![false; 4]);
        assert_eq!(graph.edges().len(), 4);
        let inc = graph.incidence_matrix();
        let row: Vec<_> = inc.row(0).map(|(_, v)| v).collect();
        assert_eq!(row, vec![-1.0, 1.0]);
        // each component indicator lies in the left kernel of the transposed incidence
        assert!(inc.mul_vec(&vec![1.0; graph.nodes().len()]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn coarsest_level_is_full_grid() {
        let (_, _, g) = graphs(2, [4, 4], &[]);
        let g = &g[0];
        assert_eq!(g.nodes().len(), g.grid().num_nodes());
        assert_eq!(g.edges().len(), g.grid().num_edges());
        assert_eq!(g.edges_of(EntityClass::Boundary).len(), 4 * 5);
        assert!(g.edges_of(EntityClass::Deactivated).is_empty());
        assert_eq!(g.num_components(), 1);
        assert_eq!(g.num_boundary_components(), 1);
    }

    #[test]
    fn example1_level1_subgrids_nest() {
        let boxes = vec![vec![CellBox::new([4, 12], [4, 12])], vec![CellBox::new([12, 20], [12, 20])]];
        let (_, _, g) = graphs(2, [8, 8], &boxes);
        let g1 = &g[1];
        let own = (0..g1.grid().num_cells()).filter(|&c| g1.has_cell(c)).count();
        let next = (0..g1.grid().num_cells()).filter(|&c| g1.has_next_cell(c)).count();
        assert!(next > 0 && next < own && own < g1.grid().num_cells());
        assert!((0..g1.grid().num_cells()).all(|c| !g1.has_next_cell(c) || g1.has_cell(c)));
    }

    #[test]
    fn hole_gives_two_boundary_components() {
        let ring = vec![
            CellBox::new([0, 16], [0, 6]),
            CellBox::new([0, 16], [10, 16]),
            CellBox::new([0, 6], [6, 10]),
            CellBox::new([10, 16], [6, 10]),
        ];
        for p in [1, 3] {
            let (_, _, g) = graphs(p, [8, 8], std::slice::from_ref(&ring));
            assert_eq!(g[1].num_components(), 1);
            assert_eq!(g[1].num_boundary_components(), 2, "p = {p}");
        }
    }
}
