//! The determinant identity behind the correction term of the recursion.
//!
//! Adding a forgetful-map row to a one-dimensional family with a line
//! condition gives a square system. On curves whose line-constrained end sits
//! at a trivalent vertex together with a directed end parallel to its ray,
//! the absolute determinant equals that of the system where the line
//! condition is replaced by a point condition at the same end.

use super::solve::coordinate_rows;
use super::types::{generate_types, CombinatorialType, EndKind};
use super::OracleError;
use crate::exact::determinant;
use crate::invariant::{classify, Codim, Insertion, Invariant, InvariantShape};

/// Insertions of the one-dimensional family behind a recursion head: the
/// psi class at the line is dropped.
pub fn lambda_profile(inv: &Invariant) -> Result<Vec<Insertion>, OracleError> {
    if classify(inv) != Ok(InvariantShape::TrrHead) {
        return Err(OracleError::ShapeViolation(format!("{inv} is not a recursion head")));
    }
    Ok(inv.insertions().iter().map(|&i| if i.codim == Codim::Line { Insertion::line(0) } else { i }).collect())
}

/// Marked ends playing roles 1, 2, 3 and the vertex of role 1, or why the
/// type does not qualify.
fn roles(t: &CombinatorialType) -> Result<(usize, usize, usize, usize), OracleError> {
    let bad = |why: &str| Err(OracleError::ShapeViolation(format!("{}: {why}", t.code)));
    let Some(line) = t.insertions.iter().position(|i| i.codim == Codim::Line) else {
        return bad("no line condition");
    };
    if t.insertions[line].psi != 0 {
        return bad("psi class at the line-constrained end");
    }
    let points: Vec<usize> = (0..t.insertions.len()).filter(|&m| t.insertions[m].codim == Codim::Point).collect();
    if points.len() < 2 {
        return bad("fewer than two point conditions");
    }
    let v = t.vertex_of(line);
    let ray = t.ray.expect("line types carry a ray");
    let at_v: Vec<EndKind> = t.ends.iter().filter(|e| e.vertex == v).map(|e| e.kind).collect();
    let parallel = at_v.iter().filter(|k| matches!(k, EndKind::Directed(d, _) if *d == ray)).count();
    if t.valence(v) != 3 || at_v.len() != 2 || parallel != 1 {
        return bad("line end is not next to a single directed end along its ray");
    }
    Ok((line, points[0], points[1], v))
}

pub fn qualifies(t: &CombinatorialType) -> bool {
    roles(t).is_ok()
}

/// `(|det(ft x ev)|, |det(ev~)|)` for a qualifying type.
pub fn det_identity_sides(t: &CombinatorialType) -> Result<(i128, i128), OracleError> {
    let (line, x2, x3, v) = roles(t)?;
    let cols = 2 + t.edges.len();
    // the forgetful map to the four-marked line: total length of the edges
    // separating {line end, its directed neighbour} from {x2, x3}
    let mut ft = vec![0i128; cols];
    for k in 0..t.edges.len() {
        let beyond = t.marks_beyond(k);
        let (a, b, c) = (beyond.contains(&line), beyond.contains(&x2), beyond.contains(&x3));
        if b == c && a != b {
            ft[2 + k] = 1;
        }
    }
    let mut ev = vec![ft];
    let mut ev_tilde = Vec::new();
    for (m, ins) in t.insertions.iter().enumerate() {
        let (fx, fy) = coordinate_rows(t, t.vertex_of(m));
        match ins.codim {
            Codim::Free => {}
            Codim::Point => {
                ev.extend([fx.clone(), fy.clone()]);
                ev_tilde.extend([fx, fy]);
            }
            Codim::Line => {
                debug_assert_eq!(t.vertex_of(m), v);
                let n = t.ray.expect("line types carry a ray").normal();
                ev.push(fx.iter().zip(&fy).map(|(x, y)| i128::from(n.x) * x + i128::from(n.y) * y).collect());
                ev_tilde.extend([fx, fy]);
            }
        }
    }
    for m in [&ev, &ev_tilde] {
        if m.len() != cols {
            return Err(OracleError::NonSquare { rows: m.len(), cols });
        }
    }
    Ok((determinant(ev).abs(), determinant(ev_tilde).abs()))
}

/// Whether `|det(ft x ev)| = |det(ev~)|` on a qualifying type; other types
/// are a shape violation.
pub fn verify_det_identity(t: &CombinatorialType) -> Result<bool, OracleError> {
    det_identity_sides(t).map(|(a, b)| a == b)
}

/// Qualifying types of the one-dimensional family behind `inv`.
pub fn qualifying_types(inv: &Invariant, max_degree: u32) -> Result<Vec<CombinatorialType>, OracleError> {
    let profile = lambda_profile(inv)?;
    Ok(generate_types(inv.degree(), &profile, max_degree)?.into_iter().filter(qualifies).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_invariant;

    #[test]
    fn identity_on_the_headline_family() {
        let inv = parse_invariant("<tau_1(1) tau_1(2)^2>_2").unwrap();
        let types = qualifying_types(&inv, 2).unwrap();
        assert!(!types.is_empty());
        let mut nonzero = 0;
        for t in &types {
            let (a, b) = det_identity_sides(t).unwrap();
            assert_eq!(a, b, "{}", t.code);
            nonzero += usize::from(a != 0);
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn other_types_are_rejected() {
        let inv = parse_invariant("<tau_1(1) tau_1(2)^2>_2").unwrap();
        let all = generate_types(2, &lambda_profile(&inv).unwrap(), 2).unwrap();
        let rejected = all.iter().find(|t| !qualifies(t)).unwrap();
        assert!(matches!(verify_det_identity(rejected), Err(OracleError::ShapeViolation(_))));
        assert!(lambda_profile(&parse_invariant("<tau_0(2)^2>_1").unwrap()).is_err());
    }
}
