//! Direct evaluation: count curves through a configuration.
//!
//! For each class of core trees, the constrained marked ends (points, then
//! the line) are placed one at a time at a core vertex or on a new vertex
//! subdividing a core edge. Every placement adds its incidence rows to an
//! incremental exact system over the unknowns (anchor, core edge lengths,
//! one offset per subdividing vertex); branches die as soon as the rows are
//! inconsistent or a pinned-down length or offset has the wrong sign. Free
//! ends add no rows and are distributed afterwards by counting.

use num_bigint::BigInt;

use super::config::{random_general_config_from, Configuration, DrawOptions, ScaledConfig};
use super::core_tree::{core_classes, CoreLayout, Location};
use super::geometry::StandardDirection;
use super::OracleError;
use crate::exact::{determinant, Frac, IncrementalSystem, PushOutcome, Value};
use crate::invariant::{Codim, Invariant};
use crate::par::Execution;

/// One marked end of the invariant, in canonical insertion order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    pub psi: u32,
    pub codim: Codim,
    /// Index into the configuration's points (point marks only).
    pub point: usize,
}

pub fn marks_of(inv: &Invariant) -> Vec<Mark> {
    let mut next_point = 0;
    inv.insertions()
        .iter()
        .map(|i| {
            let point = next_point;
            if i.codim == Codim::Point {
                next_point += 1;
            }
            Mark { psi: i.psi, codim: i.codim, point }
        })
        .collect()
}

/// Upper bound on the total core excess `sum (valence - 3)` of a curve
/// contributing to the marks.
pub fn excess_bound(marks: &[Mark]) -> usize {
    marks.iter().map(|m| m.psi.saturating_sub(1) as usize).sum()
}

/// `(sum k)! / prod k!`, the weight of a vertex carrying psi powers `ks`.
pub fn multinomial(ks: impl IntoIterator<Item = u32>) -> i128 {
    let mut total = 0u32;
    let mut w: i128 = 1;
    for k in ks {
        for j in 1..=k {
            total += 1;
            w = w * i128::from(total) / i128::from(j);
        }
    }
    w
}

pub(crate) fn factorial(n: u32) -> i128 {
    (1..=i128::from(n)).product()
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub max_degree: u32,
    pub execution: Execution,
    pub draw: DrawOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_degree: 2, execution: Execution::default(), draw: DrawOptions::default() }
    }
}

/// Rejects inputs outside the oracle's scope.
pub fn check_oracle_input(inv: &Invariant, opts: &OracleOptions) -> Result<(), OracleError> {
    let balance = inv.dimension_balance();
    if balance != 0 {
        return Err(OracleError::DimensionInvalid(inv.clone(), balance));
    }
    if inv.degree() > opts.max_degree {
        return Err(OracleError::DegreeTooHigh { degree: inv.degree(), max: opts.max_degree });
    }
    let lines: Vec<_> = inv.insertions().iter().filter(|i| i.codim == Codim::Line).collect();
    if lines.len() > 1 {
        return Err(OracleError::Unsupported(format!("{inv}: more than one line condition")));
    }
    if lines.iter().any(|l| l.psi > 1) {
        return Err(OracleError::Unsupported(format!("{inv}: psi power above 1 at the line")));
    }
    Ok(())
}

/// The invariant counted on one configuration.
pub fn evaluate_direct(inv: &Invariant, config: &Configuration) -> Result<Value, OracleError> {
    evaluate_direct_with(inv, config, &OracleOptions::default())
}

pub fn evaluate_direct_with(
    inv: &Invariant,
    config: &Configuration,
    opts: &OracleOptions,
) -> Result<Value, OracleError> {
    check_oracle_input(inv, opts)?;
    if !config.matches(inv) {
        return Err(OracleError::ConfigMismatch(inv.clone()));
    }
    let marks = marks_of(inv);
    let scaled = config.scaled();
    let classes = core_classes(inv.degree(), excess_bound(&marks));
    let parts = opts.execution.map(&classes, |class| {
        let layout = CoreLayout::new(&class.tree);
        count_on_core(&layout, &marks, &scaled).map(|w| w * i128::from(class.labelled_count))
    });
    let mut total: i128 = 0;
    for p in parts {
        total += p?;
    }
    let norm = factorial(inv.degree()).pow(3);
    Ok(Value::new(BigInt::from(total), BigInt::from(norm)))
}

/// Draws configurations for `seed` until one is general for `inv`.
pub fn evaluate_seeded(
    inv: &Invariant,
    seed: u64,
    opts: &OracleOptions,
) -> Result<(Value, Configuration), OracleError> {
    check_oracle_input(inv, opts)?;
    let mut first = 0;
    loop {
        let config = random_general_config_from(seed, first, inv, opts.draw)?;
        match evaluate_direct_with(inv, &config, opts) {
            Err(OracleError::NonGeneral(_)) => first = config.attempt + 1,
            other => return other.map(|v| (v, config)),
        }
    }
}

/// Weighted count of curves on one labelled core tree: sum of
/// `|det| * psi weight` over all solutions.
pub fn count_on_core(layout: &CoreLayout, marks: &[Mark], config: &ScaledConfig) -> Result<i128, OracleError> {
    let rows: usize = marks.iter().map(|m| m.codim.value() as usize).sum();
    let mut order: Vec<usize> = (0..marks.len()).filter(|&i| marks[i].codim != Codim::Free).collect();
    // points by descending psi (canonical order already), the line last
    order.sort_by_key(|&i| (marks[i].codim == Codim::Line, std::cmp::Reverse(marks[i].psi)));
    let free: Vec<usize> = (0..marks.len()).filter(|&i| marks[i].codim == Codim::Free).collect();
    let Some(groups_needed) = rows.checked_sub(2 + layout.bounded) else {
        return Ok(0);
    };
    let Some(vertex_needed) = order.len().checked_sub(groups_needed) else {
        return Ok(0);
    };
    let cols = rows;
    let mut search = Search { layout, marks, order, free, config, cols, groups_needed, vertex_needed, total: 0 };
    let start = State {
        sys: IncrementalSystem::new(cols),
        rows: Vec::with_capacity(rows),
        vertex_mark: vec![None; layout.vertices.len()],
        groups: Vec::new(),
        line: None,
        at_vertices: 0,
    };
    search.dfs(&start, 0)?;
    Ok(search.total)
}

/// A constrained mark on a new vertex inside a core edge.
#[derive(Clone, Copy, Debug)]
struct Group {
    edge: usize,
    col: usize,
    mark: usize,
}

#[derive(Clone)]
struct State {
    sys: IncrementalSystem,
    rows: Vec<Vec<i128>>,
    vertex_mark: Vec<Option<usize>>,
    groups: Vec<Group>,
    /// Ray parameter of the line end's image: `form . x - constant > 0`.
    line: Option<(Vec<i128>, i128)>,
    at_vertices: usize,
}

struct Search<'a> {
    layout: &'a CoreLayout,
    marks: &'a [Mark],
    order: Vec<usize>,
    free: Vec<usize>,
    config: &'a ScaledConfig,
    cols: usize,
    groups_needed: usize,
    vertex_needed: usize,
    total: i128,
}

fn sign(sys: &IncrementalSystem, form: &[i128], constant: i128) -> Option<i128> {
    sys.determined(form).map(|v| (v - Frac::new(constant, 1)).signum())
}

impl Search<'_> {
    fn dense(&self, form: &[(usize, super::geometry::Vec2)]) -> (Vec<i128>, Vec<i128>) {
        let mut fx = vec![0i128; self.cols];
        let mut fy = vec![0i128; self.cols];
        fx[0] = 1;
        fy[1] = 1;
        for &(c, v) in form {
            fx[c] += i128::from(v.x);
            fy[c] += i128::from(v.y);
        }
        (fx, fy)
    }

    fn unit(&self, c: usize) -> Vec<i128> {
        let mut f = vec![0i128; self.cols];
        f[c] = 1;
        f
    }

    /// `Ok(false)` if a pinned-down quantity is strictly out of range,
    /// `Err` if one sits exactly on the boundary.
    fn feasible(&self, st: &State) -> Result<bool, OracleError> {
        let degenerate = |what: &str| Err(OracleError::NonGeneral(format!("{what} vanishes")));
        for c in 2..2 + self.layout.bounded {
            match sign(&st.sys, &self.unit(c), 0) {
                Some(0) => return degenerate("an edge length"),
                Some(s) if s < 0 => return Ok(false),
                _ => {}
            }
        }
        for (gi, g) in st.groups.iter().enumerate() {
            let s = self.unit(g.col);
            match sign(&st.sys, &s, 0) {
                Some(0) => return degenerate("an offset"),
                Some(x) if x < 0 => return Ok(false),
                _ => {}
            }
            if let Some(lc) = self.layout.edges[g.edge].length_col {
                let mut f = s.clone();
                f[lc] -= 1;
                match sign(&st.sys, &f, 0) {
                    Some(0) => return degenerate("an offset minus its edge length"),
                    Some(x) if x > 0 => return Ok(false),
                    _ => {}
                }
            }
            for h in &st.groups[gi + 1..] {
                if h.edge == g.edge {
                    let mut f = s.clone();
                    f[h.col] -= 1;
                    if sign(&st.sys, &f, 0) == Some(0) {
                        return degenerate("an offset difference");
                    }
                }
            }
        }
        if let Some((form, constant)) = &st.line {
            match sign(&st.sys, form, *constant) {
                Some(0) => return degenerate("the ray parameter of the line end"),
                Some(x) if x < 0 => return Ok(false),
                _ => {}
            }
        }
        Ok(true)
    }

    fn dfs(&mut self, st: &State, step: usize) -> Result<(), OracleError> {
        if step == self.order.len() {
            return self.leaf(st);
        }
        let m = self.order[step];
        let mark = self.marks[m];
        let rays: &[Option<StandardDirection>] = if mark.codim == Codim::Line {
            &[Some(StandardDirection::West), Some(StandardDirection::South), Some(StandardDirection::NorthEast)]
        } else {
            &[None]
        };
        let locations: Vec<Location> = self.layout.locations().collect();
        for loc in locations {
            match loc {
                Location::Vertex(v) if st.vertex_mark[v].is_some() || st.at_vertices == self.vertex_needed => continue,
                Location::Edge(_) if st.groups.len() == self.groups_needed => continue,
                _ => {}
            }
            let col = 2 + self.layout.bounded + st.groups.len();
            let (fx, fy) = self.dense(&self.layout.form(loc, col));
            for ray in rays {
                let mut rows: Vec<(Vec<i128>, i128)> = Vec::with_capacity(2);
                let mut line = None;
                match ray {
                    None => {
                        let p = self.config.points[mark.point];
                        rows.push((fx.clone(), p[0]));
                        rows.push((fy.clone(), p[1]));
                    }
                    Some(r) => {
                        let root = self.config.root.expect("line condition");
                        let (n, w) = (r.normal(), r.along());
                        let comb = |a: i64, b: i64| -> Vec<i128> {
                            fx.iter().zip(&fy).map(|(x, y)| i128::from(a) * x + i128::from(b) * y).collect()
                        };
                        rows.push((comb(n.x, n.y), i128::from(n.x) * root[0] + i128::from(n.y) * root[1]));
                        line = Some((comb(w.x, w.y), i128::from(w.x) * root[0] + i128::from(w.y) * root[1]));
                    }
                }
                let mut next = st.clone();
                let mut consistent = true;
                for (coeffs, rhs) in rows {
                    match next.sys.push(&coeffs, rhs) {
                        PushOutcome::Independent => next.rows.push(coeffs),
                        PushOutcome::Inconsistent => {
                            consistent = false;
                            break;
                        }
                        PushOutcome::Redundant => {
                            return Err(OracleError::NonGeneral("a condition is implied by the others".into()))
                        }
                    }
                }
                if !consistent {
                    continue;
                }
                match loc {
                    Location::Vertex(v) => {
                        next.vertex_mark[v] = Some(m);
                        next.at_vertices += 1;
                    }
                    Location::Edge(e) => next.groups.push(Group { edge: e, col, mark: m }),
                }
                if line.is_some() {
                    next.line = line;
                }
                if !self.feasible(&next)? {
                    continue;
                }
                self.dfs(&next, step + 1)?;
            }
        }
        Ok(())
    }

    fn leaf(&mut self, st: &State) -> Result<(), OracleError> {
        debug_assert_eq!(st.sys.rank(), self.cols);
        let weight = self.free_weight(st);
        if weight == 0 {
            return Ok(());
        }
        let det = determinant(st.rows.clone()).abs();
        debug_assert!(det > 0);
        self.total += det * weight;
        Ok(())
    }

    /// Sum over distributions of the free marks among the occupied
    /// locations of the product of vertex weights, subject to the valence
    /// condition at every vertex.
    fn free_weight(&self, st: &State) -> i128 {
        // (required sum of psi - 1 over the marks there, constrained marks)
        let mut places: Vec<(i64, Vec<usize>)> = Vec::new();
        for v in 0..self.layout.vertices.len() {
            places.push((self.layout.valence[v] as i64 - 3, st.vertex_mark[v].into_iter().collect()));
        }
        for g in &st.groups {
            places.push((-1, vec![g.mark]));
        }
        distribute(&places, &self.free, self.marks)
    }
}

/// Counts weighted assignments of the `free` marks to `places`; a place
/// `(target, fixed)` needs `sum (psi - 1) == target` over its marks and
/// contributes the multinomial of their psi powers.
pub(crate) fn distribute(places: &[(i64, Vec<usize>)], free: &[usize], marks: &[Mark]) -> i128 {
    let n = free.len();
    let full = (1usize << n) - 1;
    let excess: Vec<i64> = (0..=full)
        .map(|s| (0..n).filter(|b| s >> b & 1 == 1).map(|b| i64::from(marks[free[b]].psi) - 1).sum())
        .collect();
    let mut dp = vec![0i128; full + 1];
    dp[0] = 1;
    for (target, fixed) in places {
        let base: i64 = fixed.iter().map(|&i| i64::from(marks[i].psi) - 1).sum();
        let mut next = vec![0i128; full + 1];
        for (mask, &ways) in dp.iter().enumerate() {
            if ways == 0 {
                continue;
            }
            let rest = full & !mask;
            let mut sub = rest;
            loop {
                if base + excess[sub] == *target {
                    let ks = fixed
                        .iter()
                        .map(|&i| marks[i].psi)
                        .chain((0..n).filter(|b| sub >> b & 1 == 1).map(|b| marks[free[b]].psi));
                    next[mask | sub] += ways * multinomial(ks);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        dp = next;
    }
    dp[full]
}
