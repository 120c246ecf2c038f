//! Trees spanned by the non-contracted ends.
//!
//! Every marked end of a curve that can contribute sits on the subtree
//! spanned by the `3d` directed ends: a marked end hanging off a subtree
//! without directed ends would sit behind a contracted bounded edge, whose
//! length is a free parameter, so the cell is never rigid. Curves are
//! therefore enumerated as a core tree plus placements of marked ends on it.

use std::collections::BTreeMap;

use super::geometry::{StandardDirection, Vec2};

/// A leaf-labelled tree. Vertices `0..leaves.len()` are the directed ends,
/// the rest are inner vertices of valence at least three (degree 0: one
/// inner vertex and no leaves).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreTree {
    pub degree: u32,
    pub leaves: Vec<StandardDirection>,
    pub adj: Vec<Vec<usize>>,
}

impl CoreTree {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v < self.leaves.len()
    }

    pub fn inner(&self) -> std::ops::Range<usize> {
        self.leaves.len()..self.adj.len()
    }

    /// Sum of valence minus three over inner vertices.
    pub fn excess(&self) -> usize {
        self.inner().map(|v| self.adj[v].len().saturating_sub(3)).sum()
    }

    fn code_from(&self, v: usize, parent: usize) -> String {
        if self.is_leaf(v) {
            return self.leaves[v].letter().to_string();
        }
        let mut parts: Vec<String> =
            self.adj[v].iter().filter(|&&w| w != parent).map(|&w| self.code_from(w, v)).collect();
        parts.sort();
        format!("({})", parts.concat())
    }

    /// Canonical code up to permutations of equal-direction leaves.
    pub fn code(&self) -> String {
        self.inner().map(|r| self.code_from(r, usize::MAX)).min().unwrap_or_default()
    }

    /// Sum of leaf directions on the `child` side of the edge `parent - child`.
    pub fn side_direction(&self, parent: usize, child: usize) -> Vec2 {
        if self.is_leaf(child) {
            return self.leaves[child].vector();
        }
        self.adj[child]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| self.side_direction(child, w))
            .fold(Vec2::ZERO, |a, b| a + b)
    }

    /// True if some bounded edge would be contracted.
    pub fn has_contracted_edge(&self) -> bool {
        self.inner()
            .any(|v| self.adj[v].iter().any(|&w| w > v && !self.is_leaf(w) && self.side_direction(v, w).is_zero()))
    }
}

/// An isomorphism class of core trees with the number of labelled trees in it.
#[derive(Clone, Debug)]
pub struct CoreClass {
    pub tree: CoreTree,
    pub labelled_count: u64,
    pub code: String,
}

fn leaf_directions(degree: u32) -> Vec<StandardDirection> {
    StandardDirection::ALL.iter().flat_map(|&d| std::iter::repeat_n(d, degree as usize)).collect()
}

/// Every labelled core tree with total excess at most `max_excess` and no
/// contracted bounded edge, grouped into classes in code order.
pub fn core_classes(degree: u32, max_excess: usize) -> Vec<CoreClass> {
    let mut classes: BTreeMap<String, CoreClass> = BTreeMap::new();
    for tree in labelled_core_trees(degree, max_excess) {
        if tree.has_contracted_edge() {
            continue;
        }
        let code = tree.code();
        classes.entry(code.clone()).and_modify(|c| c.labelled_count += 1).or_insert(CoreClass {
            tree,
            labelled_count: 1,
            code,
        });
    }
    classes.into_values().collect()
}

/// All leaf-labelled trees on the `3d` directed ends, by leaf insertion:
/// leaf `k` either subdivides an edge of a tree on leaves `0..k` or joins an
/// inner vertex. Each tree arises from exactly one predecessor.
pub fn labelled_core_trees(degree: u32, max_excess: usize) -> Vec<CoreTree> {
    let leaves = leaf_directions(degree);
    let l = leaves.len();
    if l == 0 {
        return vec![CoreTree { degree, leaves, adj: vec![Vec::new()] }];
    }
    // node ids: leaves 0..l, inner l..
    let start: Vec<(usize, usize)> = (0..3).map(|k| (l, k)).collect();
    let mut out = Vec::new();
    grow(&mut out, &leaves, start, vec![3], 3, max_excess, degree);
    out
}

fn grow(
    out: &mut Vec<CoreTree>,
    leaves: &[StandardDirection],
    edges: Vec<(usize, usize)>,
    inner_deg: Vec<usize>,
    next: usize,
    max_excess: usize,
    degree: u32,
) {
    let l = leaves.len();
    if next == l {
        let mut adj = vec![Vec::new(); l + inner_deg.len()];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        out.push(CoreTree { degree, leaves: leaves.to_vec(), adj });
        return;
    }
    let excess: usize = inner_deg.iter().map(|d| d - 3).sum();
    for e in 0..edges.len() {
        let (a, b) = edges[e];
        let w = l + inner_deg.len();
        let mut ed = edges.clone();
        ed[e] = (a, w);
        ed.push((w, b));
        ed.push((w, next));
        let mut deg = inner_deg.clone();
        deg.push(3);
        grow(out, leaves, ed, deg, next + 1, max_excess, degree);
    }
    if excess < max_excess {
        for v in 0..inner_deg.len() {
            let mut ed = edges.clone();
            ed.push((l + v, next));
            let mut deg = inner_deg.clone();
            deg[v] += 1;
            grow(out, leaves, ed, deg, next + 1, max_excess, degree);
        }
    }
}

/// Where a marked end can sit on a core tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    /// At an inner vertex (index into [`CoreLayout::vertices`]).
    Vertex(usize),
    /// On a new vertex subdividing an edge (index into [`CoreLayout::edges`]).
    Edge(usize),
}

/// An edge of a core tree, oriented away from the root.
#[derive(Clone, Debug)]
pub struct CoreEdge {
    /// Index into [`CoreLayout::vertices`] of the vertex nearer the root.
    pub from: usize,
    /// Far vertex index, or `None` for an end.
    pub to: Option<usize>,
    /// Displacement per unit length from `from` towards `to`.
    pub direction: Vec2,
    /// Column of the edge length among the unknowns (bounded edges only).
    pub length_col: Option<usize>,
    /// Directed end at the far side (ends only).
    pub end: Option<(usize, StandardDirection)>,
}

/// Coordinates on a core tree: anchor `(x, y)` in columns 0 and 1 at the
/// root vertex, then one length per bounded edge.
#[derive(Clone, Debug)]
pub struct CoreLayout {
    /// Tree vertex id of each inner vertex; index 0 is the root.
    pub vertices: Vec<usize>,
    /// Valence in the core tree.
    pub valence: Vec<usize>,
    pub edges: Vec<CoreEdge>,
    /// Position of each vertex as `anchor + sum length_col * direction`.
    pub position: Vec<Vec<(usize, Vec2)>>,
    pub bounded: usize,
}

impl CoreLayout {
    pub fn new(tree: &CoreTree) -> Self {
        let root = tree.inner().start;
        // breadth-first order over inner vertices; parents come first
        let mut vertices = vec![root];
        let mut parent_of = vec![usize::MAX; tree.adj.len()];
        let mut k = 0;
        while k < vertices.len() {
            let v = vertices[k];
            let mut kids: Vec<usize> =
                tree.adj[v].iter().copied().filter(|&w| w != parent_of[v] && !tree.is_leaf(w)).collect();
            kids.sort();
            for w in kids {
                parent_of[w] = v;
                vertices.push(w);
            }
            k += 1;
        }
        let mut index = vec![usize::MAX; tree.adj.len()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        let mut position: Vec<Vec<(usize, Vec2)>> = vec![Vec::new(); vertices.len()];
        let mut bounded = 0;
        for (iv, &v) in vertices.iter().enumerate() {
            let mut kids: Vec<usize> = tree.adj[v].iter().copied().filter(|&w| w != parent_of[v]).collect();
            kids.sort();
            for w in kids {
                let direction = tree.side_direction(v, w);
                if tree.is_leaf(w) {
                    edges.push(CoreEdge {
                        from: iv,
                        to: None,
                        direction,
                        length_col: None,
                        end: Some((w, tree.leaves[w])),
                    });
                } else {
                    let col = 2 + bounded;
                    bounded += 1;
                    let mut p = position[iv].clone();
                    p.push((col, direction));
                    position[index[w]] = p;
                    edges.push(CoreEdge { from: iv, to: Some(index[w]), direction, length_col: Some(col), end: None });
                }
            }
        }
        let valence = vertices.iter().map(|&v| tree.adj[v].len()).collect();
        CoreLayout { vertices, valence, edges, position, bounded }
    }

    pub fn locations(&self) -> impl Iterator<Item = Location> + '_ {
        (0..self.vertices.len()).map(Location::Vertex).chain((0..self.edges.len()).map(Location::Edge))
    }

    /// Position form of a location: the vertex position, or for an edge the
    /// position of its near vertex plus `offset_col * direction`.
    pub fn form(&self, loc: Location, offset_col: usize) -> Vec<(usize, Vec2)> {
        match loc {
            Location::Vertex(v) => self.position[v].clone(),
            Location::Edge(e) => {
                let edge = &self.edges[e];
                let mut p = self.position[edge.from].clone();
                p.push((offset_col, edge.direction));
                p
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_is_a_star() {
        let c = core_classes(1, 0);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].labelled_count, 1);
        assert_eq!(c[0].tree.inner().len(), 1);
    }

    #[test]
    fn labelled_counts_six_leaves() {
        // (2n-5)!! trivalent trees on n labelled leaves
        let tri = labelled_core_trees(2, 0);
        assert_eq!(tri.len(), 105);
        // all trees with internal valence >= 3 on 6 labelled leaves
        assert_eq!(labelled_core_trees(2, 3).len(), 236);
    }

    #[test]
    fn classes_partition_the_labelled_trees() {
        for e in 0..=3 {
            let all = labelled_core_trees(2, e).into_iter().filter(|t| !t.has_contracted_edge()).count() as u64;
            let classes = core_classes(2, e);
            assert_eq!(classes.iter().map(|c| c.labelled_count).sum::<u64>(), all);
        }
    }

    #[test]
    fn layout_is_balanced_and_a_tree() {
        for class in core_classes(2, 3) {
            let lay = CoreLayout::new(&class.tree);
            assert_eq!(lay.bounded, lay.vertices.len() - 1);
            for v in 0..lay.vertices.len() {
                let mut sum = Vec2::ZERO;
                for e in &lay.edges {
                    if e.from == v {
                        sum += e.direction;
                    }
                    if e.to == Some(v) {
                        sum += -e.direction;
                    }
                }
                assert!(sum.is_zero(), "unbalanced vertex in {}", class.code);
            }
            assert!(lay.edges.iter().all(|e| !e.direction.is_zero()));
        }
    }
}
