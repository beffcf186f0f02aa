//! Per-level spanning trees and the multi-level tree-cotree gauge.
//!
//! On every level a minimum spanning forest of `G_{ℓ,ℓ}` is grown with Kruskal's
//! algorithm under weights 1 (boundary), 2 (active), 3 (deactivated). Boundary edges
//! therefore form a spanning forest of the boundary first, active edges then reach
//! what they can, and deactivated edges only close the remaining gaps. The gauge set
//! `M_L` is the union of the active tree edges of all levels; the cotree is its
//! complement in `ℋ¹_L`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greville::{EntityClass, LevelGraph};
use crate::hierarchy::HierarchicalBasis;

/// Disjoint sets with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind { parent: (0..len).collect(), size: vec![1; len] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTree {
    level: usize,
    /// Tree edges in Kruskal acceptance order, with their class.
    edges: Vec<(usize, EntityClass)>,
}

impl LevelTree {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().map(|&(e, _)| e)
    }

    pub fn classified_edges(&self) -> &[(usize, EntityClass)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges_of(&self, class: EntityClass) -> Vec<usize> {
        self.edges.iter().filter(|&&(_, c)| c == class).map(|&(e, _)| e).collect()
    }

    pub fn count(&self, class: EntityClass) -> usize {
        self.edges.iter().filter(|&&(_, c)| c == class).count()
    }
}

/// Minimum spanning forest of the level graph. Within one weight class edges are
/// taken in increasing edge id, i.e. component, then `j`, then `i`.
pub fn build_level_tree(graph: &LevelGraph) -> LevelTree {
    let mut order: Vec<(u8, usize)> = graph.edges().iter().map(|&e| (graph.edge_weight(e).unwrap(), e)).collect();
    order.sort_unstable();
    let mut uf = UnionFind::new(graph.grid().num_nodes());
    let mut edges = Vec::with_capacity(graph.nodes().len());
    for (_, e) in order {
        let (a, b) = graph.grid().edge_nodes(e);
        if uf.union(a, b) {
            edges.push((e, graph.edge_class(e).unwrap()));
        }
    }
    LevelTree { level: graph.level(), edges }
}

/// Counts describing a verified level tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub level: usize,
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub boundary_nodes: usize,
    pub boundary_components: usize,
    pub tree_edges: usize,
    pub boundary_tree_edges: usize,
    pub active_tree_edges: usize,
    pub deactivated_tree_edges: usize,
}

/// Checks acyclicity, spanning, the forest-size formula, the boundary-forest property
/// and the weight ordering of Kruskal acceptance.
pub fn verify_level_tree(graph: &LevelGraph, tree: &LevelTree) -> Result<TreeStats> {
    let l = graph.level();
    let fail = |what: String| Error::Consistency(format!("level {l} tree: {what}"));
    let grid = graph.grid();

    let mut uf = UnionFind::new(grid.num_nodes());
    let mut touched = vec![false; grid.num_nodes()];
    for &(e, class) in tree.classified_edges() {
        if graph.edge_class(e) != Some(class) {
            return Err(fail(format!("edge {e} is not a {class:?} edge of the subgraph")));
        }
        let (a, b) = grid.edge_nodes(e);
        if !uf.union(a, b) {
            return Err(fail(format!("edge {e} closes a cycle")));
        }
        touched[a] = true;
        touched[b] = true;
    }
    let components = graph.num_components();
    if tree.len() != graph.nodes().len() - components {
        return Err(fail(format!(
            "{} edges, expected |N| - c = {} - {components}",
            tree.len(),
            graph.nodes().len()
        )));
    }
    // acyclic with |N| - c edges means spanning; every node also lies on a cell
    if let Some(&v) = graph.nodes().iter().find(|&&v| !touched[v]) {
        return Err(fail(format!("node {v} not reached")));
    }

    let boundary_nodes = graph.nodes_of(EntityClass::Boundary);
    let boundary_components = graph.num_boundary_components();
    let boundary_tree = tree.count(EntityClass::Boundary);
    if boundary_tree != boundary_nodes.len() - boundary_components {
        return Err(fail(format!(
            "{boundary_tree} boundary edges do not span the boundary ({} nodes, {boundary_components} components)",
            boundary_nodes.len()
        )));
    }
    if tree.classified_edges().windows(2).any(|w| w[0].1.weight() > w[1].1.weight()) {
        return Err(fail("edges not accepted in nondecreasing weight order".into()));
    }

    Ok(TreeStats {
        level: l,
        nodes: graph.nodes().len(),
        edges: graph.edges().len(),
        components,
        boundary_nodes: boundary_nodes.len(),
        boundary_components,
        tree_edges: tree.len(),
        boundary_tree_edges: boundary_tree,
        active_tree_edges: tree.count(EntityClass::Active),
        deactivated_tree_edges: tree.count(EntityClass::Deactivated),
    })
}

/// `M_L` and its complement, as sorted global `ℋ¹_L` indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiLevelTree {
    tree: Vec<usize>,
    cotree: Vec<usize>,
}

impl MultiLevelTree {
    /// Builds the gauge directly from a tree index set; used for mutation tests.
    pub fn from_tree_indices(mut tree: Vec<usize>, dofs: usize) -> Result<Self> {
        tree.sort_unstable();
        tree.dedup();
        if tree.last().is_some_and(|&t| t >= dofs) {
            return Err(Error::arg("tree index out of range"));
        }
        let mut in_tree = vec![false; dofs];
        for &t in &tree {
            in_tree[t] = true;
        }
        let cotree = (0..dofs).filter(|&t| !in_tree[t]).collect();
        Ok(MultiLevelTree { tree, cotree })
    }

    pub fn tree(&self) -> &[usize] {
        &self.tree
    }

    pub fn cotree(&self) -> &[usize] {
        &self.cotree
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }
}

/// Collects the active tree edges of every level as hierarchical `X¹` DOFs.
pub fn build_multilevel_tree(trees: &[LevelTree], curl_basis: &HierarchicalBasis) -> Result<MultiLevelTree> {
    if curl_basis.form_degree() != 1 {
        return Err(Error::arg("the multi-level tree lives in the curl-conforming basis"));
    }
    let mut dofs = Vec::new();
    for tree in trees {
        for e in tree.edges_of(EntityClass::Active) {
            let g = curl_basis.global(tree.level(), e).ok_or_else(|| {
                Error::Consistency(format!("active tree edge {e} of level {} has no hierarchical DOF", tree.level()))
            })?;
            dofs.push(g);
        }
    }
    let n = dofs.len();
    let m = MultiLevelTree::from_tree_indices(dofs, curl_basis.len())?;
    if m.len() != n {
        return Err(Error::Consistency("duplicate DOFs in the multi-level tree".into()));
    }
    Ok(m)
}

/// Cotree DOFs kept in the gauged system, strictly increasing.
pub fn gauge_indices(tree: &MultiLevelTree) -> Vec<usize> {
    tree.cotree().to_vec()
}
