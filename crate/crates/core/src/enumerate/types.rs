//! Full combinatorial types: every marked end placed on a core tree.
//!
//! This is the slow, literal form of the enumeration. Each type carries its
//! own position system; a type contributes `|det|` times its psi weight and
//! labelled count when that system has a solution with positive lengths.

use std::collections::BTreeMap;

use super::core_tree::{core_classes, CoreClass, CoreLayout, Location};
use super::geometry::{StandardDirection, Vec2};
use super::oracle::{excess_bound, marks_of, multinomial};
use super::OracleError;
use crate::invariant::{Codim, Insertion, Invariant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EndKind {
    /// Marked end for the insertion at this index (canonical order).
    Marked(usize),
    /// Non-contracted end: direction and copy index `1..=d`.
    Directed(StandardDirection, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FullEnd {
    pub vertex: usize,
    pub kind: EndKind,
}

/// Bounded edge; `from` is the endpoint nearer vertex 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FullEdge {
    pub from: usize,
    pub to: usize,
    /// Displacement per unit length from `from` to `to`.
    pub direction: Vec2,
}

#[derive(Clone, Debug)]
pub struct CombinatorialType {
    pub degree: u32,
    pub insertions: Vec<Insertion>,
    pub vertex_count: usize,
    pub ends: Vec<FullEnd>,
    /// Ordered so that every edge's `from` is vertex 0 or the `to` of an earlier edge.
    pub edges: Vec<FullEdge>,
    /// Ray of the line that the line-constrained end lies on.
    pub ray: Option<StandardDirection>,
    /// Number of labellings of the directed ends giving this type.
    pub labelled_count: u64,
    pub code: String,
}

impl CombinatorialType {
    pub fn valence(&self, v: usize) -> usize {
        self.ends.iter().filter(|e| e.vertex == v).count()
            + self.edges.iter().filter(|e| e.from == v || e.to == v).count()
    }

    /// Vertex carrying marked end `m`.
    pub fn vertex_of(&self, m: usize) -> usize {
        self.ends.iter().find(|e| e.kind == EndKind::Marked(m)).expect("every insertion has an end").vertex
    }

    /// Position of `v` as `anchor + sum length * direction`, with the anchor
    /// in columns 0 and 1 and edge `k`'s length in column `2 + k`.
    pub fn position_form(&self, v: usize) -> Vec<(usize, Vec2)> {
        let mut out = Vec::new();
        let mut cur = v;
        while cur != 0 {
            let k = self.edges.iter().position(|e| e.to == cur).expect("connected tree");
            out.push((2 + k, self.edges[k].direction));
            cur = self.edges[k].from;
        }
        out
    }

    /// Marked ends on the far side of edge `k` from vertex 0.
    pub fn marks_beyond(&self, k: usize) -> Vec<usize> {
        let mut inside = vec![false; self.vertex_count];
        inside[self.edges[k].to] = true;
        // edges are ordered parents first
        for e in &self.edges[k + 1..] {
            if inside[e.from] {
                inside[e.to] = true;
            }
        }
        self.ends
            .iter()
            .filter_map(|e| match e.kind {
                EndKind::Marked(m) if inside[e.vertex] => Some(m),
                _ => None,
            })
            .collect()
    }

    /// Whether every vertex has valence three plus the psi powers of its marked ends.
    pub fn satisfies_valence(&self) -> bool {
        (0..self.vertex_count).all(|v| {
            let psi: u32 = self
                .ends
                .iter()
                .filter(|e| e.vertex == v)
                .filter_map(|e| match e.kind {
                    EndKind::Marked(m) => Some(self.insertions[m].psi),
                    EndKind::Directed(..) => None,
                })
                .sum();
            self.valence(v) == 3 + psi as usize
        })
    }

    /// Product over vertices of `(sum k)! / prod k!` for the psi powers `k`
    /// of the marked ends there: the weight of the psi product on the cell.
    pub fn psi_weight(&self) -> i128 {
        (0..self.vertex_count)
            .map(|v| {
                multinomial(self.ends.iter().filter(|e| e.vertex == v).filter_map(|e| match e.kind {
                    EndKind::Marked(m) => Some(self.insertions[m].psi),
                    EndKind::Directed(..) => None,
                }))
            })
            .product()
    }

    /// Sum of outgoing directions at `v`, marked ends counting as zero.
    pub fn balance_at(&self, v: usize) -> Vec2 {
        let ends = self.ends.iter().filter(|e| e.vertex == v).map(|e| match e.kind {
            EndKind::Directed(d, _) => d.vector(),
            EndKind::Marked(_) => Vec2::ZERO,
        });
        let out = self.edges.iter().filter(|e| e.from == v).map(|e| e.direction);
        let back = self.edges.iter().filter(|e| e.to == v).map(|e| -e.direction);
        ends.chain(out).chain(back).fold(Vec2::ZERO, |a, b| a + b)
    }
}

/// Where one marked end goes while building placements.
#[derive(Clone, Copy, Debug)]
enum Slot {
    Vertex(usize),
    Group(usize),
}

#[derive(Clone, Debug, Default)]
struct Placement {
    slots: Vec<Slot>,
    /// Per core edge: group ids from the near vertex outward.
    order: Vec<Vec<usize>>,
    group_marks: Vec<Vec<usize>>,
}

/// Every type for `insertions` at degree `d`, in canonical-code order. A line
/// insertion yields one type per ray. Marked ends behind a contracted bounded
/// edge never give a rigid cell and are not generated.
pub fn generate_types(
    d: u32,
    insertions: &[Insertion],
    max_degree: u32,
) -> Result<Vec<CombinatorialType>, OracleError> {
    if d > max_degree {
        return Err(OracleError::DegreeTooHigh { degree: d, max: max_degree });
    }
    let inv = Invariant::new(d, insertions.iter().copied());
    let insertions = inv.insertions().to_vec();
    let marks = marks_of(&inv);
    let mut by_code: BTreeMap<String, CombinatorialType> = BTreeMap::new();
    for class in core_classes(d, excess_bound(&marks)) {
        let layout = CoreLayout::new(&class.tree);
        let mut local: BTreeMap<String, (CombinatorialType, u64)> = BTreeMap::new();
        let mut placement =
            Placement { slots: Vec::new(), order: vec![Vec::new(); layout.edges.len()], group_marks: Vec::new() };
        place(&layout, &insertions, &mut placement, &mut |p| {
            let t = build(&class, &layout, &insertions, p);
            if t.satisfies_valence() {
                local.entry(t.code.clone()).and_modify(|e| e.1 += 1).or_insert((t, 1));
            }
        });
        for (code, (mut t, mult)) in local {
            t.labelled_count = class.labelled_count * mult;
            by_code.insert(code, t);
        }
    }
    let has_line = insertions.iter().any(|i| i.codim == Codim::Line);
    let mut out = Vec::new();
    for t in by_code.into_values() {
        if has_line {
            for r in StandardDirection::ALL {
                let mut c = t.clone();
                c.ray = Some(r);
                c.code = format!("{}|{}", t.code, r.letter());
                out.push(c);
            }
        } else {
            out.push(t);
        }
    }
    Ok(out)
}

fn place(layout: &CoreLayout, insertions: &[Insertion], p: &mut Placement, emit: &mut impl FnMut(&Placement)) {
    let m = p.slots.len();
    if m == insertions.len() {
        emit(p);
        return;
    }
    for loc in layout.locations() {
        match loc {
            Location::Vertex(v) => {
                p.slots.push(Slot::Vertex(v));
                place(layout, insertions, p, emit);
                p.slots.pop();
            }
            Location::Edge(e) => {
                // a new group, at every position along the edge
                for pos in 0..=p.order[e].len() {
                    let g = p.group_marks.len();
                    p.group_marks.push(vec![m]);
                    p.order[e].insert(pos, g);
                    p.slots.push(Slot::Group(g));
                    place(layout, insertions, p, emit);
                    p.slots.pop();
                    p.order[e].remove(pos);
                    p.group_marks.pop();
                }
            }
        }
    }
    // join a group opened by an earlier mark
    for g in 0..p.group_marks.len() {
        p.group_marks[g].push(m);
        p.slots.push(Slot::Group(g));
        place(layout, insertions, p, emit);
        p.slots.pop();
        p.group_marks[g].pop();
    }
}

fn build(class: &CoreClass, layout: &CoreLayout, insertions: &[Insertion], p: &Placement) -> CombinatorialType {
    let tree = &class.tree;
    let core_vertices = layout.vertices.len();
    let mut group_vertex = vec![usize::MAX; p.group_marks.len()];
    let mut next = core_vertices;
    let mut edges = Vec::new();
    let mut ends = Vec::new();
    // core vertices keep their layout index; layout edges list parents first
    for (ei, ce) in layout.edges.iter().enumerate() {
        let mut prev = ce.from;
        for &g in &p.order[ei] {
            group_vertex[g] = next;
            edges.push(FullEdge { from: prev, to: next, direction: ce.direction });
            prev = next;
            next += 1;
        }
        match (ce.to, ce.end) {
            (Some(to), _) => edges.push(FullEdge { from: prev, to, direction: ce.direction }),
            (None, Some((leaf, dir))) => {
                let copy = tree.leaves[..leaf].iter().filter(|&&l| l == dir).count() as u32 + 1;
                ends.push(FullEnd { vertex: prev, kind: EndKind::Directed(dir, copy) });
            }
            (None, None) => unreachable!("core edges are bounded or ends"),
        }
    }
    for (m, slot) in p.slots.iter().enumerate() {
        let vertex = match *slot {
            Slot::Vertex(v) => v,
            Slot::Group(g) => group_vertex[g],
        };
        ends.push(FullEnd { vertex, kind: EndKind::Marked(m) });
    }
    let mut t = CombinatorialType {
        degree: tree.degree,
        insertions: insertions.to_vec(),
        vertex_count: next,
        ends,
        edges,
        ray: None,
        labelled_count: 0,
        code: String::new(),
    };
    t.code = canonical_code(&t);
    t
}

/// Code invariant under permutations of equal-direction ends; marked ends
/// keep their identity.
pub fn canonical_code(t: &CombinatorialType) -> String {
    let mut adj = vec![Vec::new(); t.vertex_count];
    for e in &t.edges {
        adj[e.from].push(e.to);
        adj[e.to].push(e.from);
    }
    fn code(t: &CombinatorialType, adj: &[Vec<usize>], v: usize, parent: usize) -> String {
        let mut parts: Vec<String> = t
            .ends
            .iter()
            .filter(|e| e.vertex == v)
            .map(|e| match e.kind {
                EndKind::Marked(m) => format!("m{m}"),
                EndKind::Directed(d, _) => d.letter().to_string(),
            })
            .collect();
        parts.extend(adj[v].iter().filter(|&&w| w != parent).map(|&w| code(t, adj, w, v)));
        parts.sort();
        format!("({})", parts.join(","))
    }
    (0..t.vertex_count).map(|r| code(t, &adj, r, usize::MAX)).min().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_invariant;

    fn types_of(s: &str) -> Vec<CombinatorialType> {
        let inv = parse_invariant(s).unwrap();
        generate_types(inv.degree(), inv.insertions(), 2).unwrap()
    }

    #[test]
    fn degree_zero_three_ends() {
        let t = types_of("<tau_0(0) tau_0(0) tau_0(2)>_0");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].vertex_count, 1);
        assert_eq!(t[0].valence(0), 3);
    }

    #[test]
    fn types_are_balanced_and_valent() {
        for s in ["<tau_0(2)^2>_1", "<tau_1(0) tau_0(2)^2>_1", "<tau_0(2) tau_1(2)^2>_2"] {
            for t in types_of(s) {
                assert!(t.satisfies_valence());
                assert!((0..t.vertex_count).all(|v| t.balance_at(v).is_zero()), "{}", t.code);
                let directed = t.ends.iter().filter(|e| matches!(e.kind, EndKind::Directed(..))).count();
                assert_eq!(directed, 3 * t.degree as usize);
            }
        }
    }

    #[test]
    fn psi_ends_sit_at_four_valent_vertices() {
        for t in types_of("<tau_0(2) tau_1(2)^2>_2") {
            // canonical order puts the psi insertions first
            assert_eq!(t.insertions[..2], [Insertion::point(1); 2]);
            let (v1, v2, v0) = (t.vertex_of(0), t.vertex_of(1), t.vertex_of(2));
            if v1 != v2 && v0 != v1 && v0 != v2 {
                assert_eq!((t.valence(v1), t.valence(v2), t.valence(v0)), (4, 4, 3));
            }
        }
    }

    #[test]
    fn line_types_come_in_ray_triples() {
        let t = types_of("<tau_0(1) tau_0(2)^2>_1");
        assert_eq!(t.len() % 3, 0);
        assert!(t.iter().all(|x| x.ray.is_some()));
    }

    #[test]
    fn frozen_type_count_for_the_line_through_two_points() {
        // regression constant, recorded from the first verified run
        let t = types_of("<tau_0(2)^2>_1");
        assert_eq!(t.len(), FROZEN_LINE_TYPES);
        assert_eq!(t.iter().map(|x| x.labelled_count).sum::<u64>(), FROZEN_LINE_LABELLED);
    }

    const FROZEN_LINE_TYPES: usize = 12;
    const FROZEN_LINE_LABELLED: u64 = 12;
}
