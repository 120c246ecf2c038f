//! Position systems of full types and their solutions.

use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Value as Json};

use super::config::{Configuration, ScaledConfig};
use super::oracle::{check_oracle_input, factorial, OracleOptions};
use super::types::{generate_types, CombinatorialType};
use super::OracleError;
use crate::exact::{determinant, format_value, Frac, IncrementalSystem, PushOutcome, Value};
use crate::invariant::{Codim, Invariant};

/// `matrix * (anchor, lengths) = rhs` in the configuration's scaled integer
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionSystem {
    pub matrix: Vec<Vec<i128>>,
    pub rhs: Vec<i128>,
    pub scale: i128,
}

/// Linear form of `x` and `y` of vertex `v`, one entry per unknown.
pub(crate) fn coordinate_rows(t: &CombinatorialType, v: usize) -> (Vec<i128>, Vec<i128>) {
    let cols = 2 + t.edges.len();
    let mut fx = vec![0i128; cols];
    let mut fy = vec![0i128; cols];
    fx[0] = 1;
    fy[1] = 1;
    for (c, dir) in t.position_form(v) {
        fx[c] += i128::from(dir.x);
        fy[c] += i128::from(dir.y);
    }
    (fx, fy)
}

fn combine(a: i64, fx: &[i128], b: i64, fy: &[i128]) -> Vec<i128> {
    fx.iter().zip(fy).map(|(x, y)| i128::from(a) * x + i128::from(b) * y).collect()
}

/// Two rows per point condition, one per line condition (normal to the
/// type's ray). Points are matched to point insertions in canonical order.
pub fn position_system(t: &CombinatorialType, config: &Configuration) -> Result<PositionSystem, OracleError> {
    let scaled = config.scaled();
    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    let mut point = 0;
    for (m, ins) in t.insertions.iter().enumerate() {
        let (fx, fy) = coordinate_rows(t, t.vertex_of(m));
        match ins.codim {
            Codim::Free => {}
            Codim::Point => {
                let p = scaled.points.get(point).ok_or_else(|| mismatch(t))?;
                matrix.push(fx);
                rhs.push(p[0]);
                matrix.push(fy);
                rhs.push(p[1]);
                point += 1;
            }
            Codim::Line => {
                let (Some(ray), Some(root)) = (t.ray, scaled.root) else { return Err(mismatch(t)) };
                let n = ray.normal();
                matrix.push(combine(n.x, &fx, n.y, &fy));
                rhs.push(i128::from(n.x) * root[0] + i128::from(n.y) * root[1]);
            }
        }
    }
    let cols = 2 + t.edges.len();
    if matrix.len() != cols {
        return Err(OracleError::NonSquare { rows: matrix.len(), cols });
    }
    Ok(PositionSystem { matrix, rhs, scale: scaled.scale })
}

fn mismatch(t: &CombinatorialType) -> OracleError {
    OracleError::ConfigMismatch(Invariant::new(t.degree, t.insertions.iter().copied()))
}

/// A solved cell: the type's anchor and edge lengths in input coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterizedCurve {
    pub code: String,
    pub anchor: [Value; 2],
    pub lengths: Vec<Value>,
    pub multiplicity: i128,
    pub psi_weight: i128,
    pub labelled_count: u64,
    /// Position of every vertex.
    pub vertices: Vec<[Value; 2]>,
}

impl ParameterizedCurve {
    pub fn to_json(&self) -> Json {
        let pair = |p: &[Value; 2]| json!([format_value(&p[0]), format_value(&p[1])]);
        json!({
            "type": self.code,
            "anchor": pair(&self.anchor),
            "lengths": self.lengths.iter().map(format_value).collect::<Vec<_>>(),
            "vertices": self.vertices.iter().map(pair).collect::<Vec<_>>(),
            "multiplicity": self.multiplicity.to_string(),
            "psi_weight": self.psi_weight.to_string(),
            "labelled_count": self.labelled_count,
        })
    }
}

fn frac_value(f: Frac, scale: i128) -> Value {
    f.to_value() / Value::from_integer(BigInt::from(scale))
}

/// The unique curve of type `t` through the configuration, `None` when the
/// system is singular or a length or the line end's ray parameter is
/// negative. A zero length or a line end at the root means the
/// configuration is not general.
pub fn solve_cell(t: &CombinatorialType, config: &Configuration) -> Result<Option<ParameterizedCurve>, OracleError> {
    let sys = position_system(t, config)?;
    let cols = sys.matrix.len();
    let mut inc = IncrementalSystem::new(cols);
    for (row, &b) in sys.matrix.iter().zip(&sys.rhs) {
        if inc.push(row, b) != PushOutcome::Independent {
            return Ok(None);
        }
    }
    let values: Vec<Frac> = (0..cols).map(|c| inc.column_value(c).expect("full rank")).collect();
    for v in &values[2..] {
        match v.signum() {
            0 => return Err(OracleError::NonGeneral("an edge length vanishes".into())),
            s if s < 0 => return Ok(None),
            _ => {}
        }
    }
    if let Some(m) = t.insertions.iter().position(|i| i.codim == Codim::Line) {
        let scaled: ScaledConfig = config.scaled();
        let (ray, root) = (t.ray.expect("line type"), scaled.root.expect("line condition"));
        let (fx, fy) = coordinate_rows(t, t.vertex_of(m));
        let w = ray.along();
        let form = combine(w.x, &fx, w.y, &fy);
        let constant = i128::from(w.x) * root[0] + i128::from(w.y) * root[1];
        match (inc.determined(&form).expect("full rank") - Frac::new(constant, 1)).signum() {
            0 => return Err(OracleError::NonGeneral("the line end sits at the root".into())),
            s if s < 0 => return Ok(None),
            _ => {}
        }
    }
    let anchor = [frac_value(values[0], sys.scale), frac_value(values[1], sys.scale)];
    let lengths: Vec<Value> = values[2..].iter().map(|&v| frac_value(v, sys.scale)).collect();
    let vertices = (0..t.vertex_count)
        .map(|v| {
            let mut p = anchor.clone();
            for (c, dir) in t.position_form(v) {
                p[0] += &lengths[c - 2] * Value::from_integer(dir.x.into());
                p[1] += &lengths[c - 2] * Value::from_integer(dir.y.into());
            }
            p
        })
        .collect();
    Ok(Some(ParameterizedCurve {
        code: t.code.clone(),
        anchor,
        lengths,
        multiplicity: multiplicity(&sys),
        psi_weight: t.psi_weight(),
        labelled_count: t.labelled_count,
        vertices,
    }))
}

/// `|det|` of the position system's matrix.
pub fn multiplicity(sys: &PositionSystem) -> i128 {
    determinant(sys.matrix.clone()).abs()
}

/// The invariant as a sum over full types: `sum labelled_count * |det| *
/// psi weight` over solved cells, divided by `(d!)^3`. Returns the solved curves too.
pub fn evaluate_by_types(
    inv: &Invariant,
    config: &Configuration,
    opts: &OracleOptions,
) -> Result<(Value, Vec<ParameterizedCurve>), OracleError> {
    check_oracle_input(inv, opts)?;
    if !config.matches(inv) {
        return Err(OracleError::ConfigMismatch(inv.clone()));
    }
    let types = generate_types(inv.degree(), inv.insertions(), opts.max_degree)?;
    let solved = opts.execution.map(&types, |t| solve_cell(t, config));
    let mut curves = Vec::new();
    let mut total = BigInt::from(0);
    for s in solved {
        if let Some(c) = s? {
            total += BigInt::from(c.multiplicity * c.psi_weight) * BigInt::from(c.labelled_count);
            curves.push(c);
        }
    }
    let norm = BigInt::from(factorial(inv.degree()).pow(3));
    let value = Value::new(total, norm);
    debug_assert!(!value.is_negative());
    Ok((value, curves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::config::RatPoint;
    use crate::enumerate::oracle::evaluate_direct;
    use crate::enumerate::{random_general_config, TropicalLine};
    use crate::grammar::parse_invariant;

    fn p(s: &str) -> Invariant {
        parse_invariant(s).unwrap()
    }

    #[test]
    fn systems_are_square() {
        let inv = p("<tau_1(1) tau_1(2)^2>_2");
        let config = random_general_config(1, &inv).unwrap();
        let types = generate_types(2, inv.insertions(), 2).unwrap();
        assert!(!types.is_empty());
        for t in &types {
            let sys = position_system(t, &config).unwrap();
            assert_eq!(sys.matrix.len(), 1 + 4);
            assert_eq!(sys.matrix[0].len(), 2 + t.edges.len());
        }
    }

    #[test]
    fn line_through_two_points() {
        let inv = p("<tau_0(2)^2>_1");
        let config = Configuration::new(vec![RatPoint::int(0, 0), RatPoint::int(3, 1)], None);
        let types = generate_types(1, inv.insertions(), 2).unwrap();
        let solved: Vec<_> = types.iter().filter_map(|t| solve_cell(t, &config).unwrap()).collect();
        assert_eq!(solved.len(), 1);
        assert_eq!(solved[0].multiplicity, 1);
        // the vertex of the line sits at (3, 1)
        assert!(solved[0]
            .vertices
            .iter()
            .any(|v| v == &[Value::from_integer(3.into()), Value::from_integer(1.into())]));
        let shifted =
            Configuration::new(vec![RatPoint::int(0, 0), RatPoint::new((31, 10).into(), (11, 10).into())], None);
        let again = types.iter().filter_map(|t| solve_cell(t, &shifted).unwrap()).count();
        assert_eq!(again, 1);
    }

    #[test]
    fn point_on_the_root_is_degenerate() {
        let inv = p("<tau_0(1) tau_0(2)^2>_1");
        let mut config = random_general_config(4, &inv).unwrap();
        config.points[0] = config.line.unwrap().root;
        let types = generate_types(1, inv.insertions(), 2).unwrap();
        let any_degenerate = types.iter().any(|t| matches!(solve_cell(t, &config), Err(OracleError::NonGeneral(_))));
        assert!(any_degenerate);
    }

    #[test]
    fn types_agree_with_the_search() {
        for s in [
            "<tau_0(2)^2>_1",
            "<tau_1(0) tau_0(2)^2>_1",
            "<tau_0(1) tau_0(2)^2>_1",
            "<tau_0(0) tau_1(2) tau_0(2)>_1",
            "<tau_1(2) tau_1(0)>_1",
            "<tau_0(2) tau_1(2)^2>_2",
            "<tau_1(1) tau_1(2)^2>_2",
        ] {
            let inv = p(s);
            for seed in 1..=2 {
                let config = random_general_config(seed, &inv).unwrap();
                let (by_types, _) = evaluate_by_types(&inv, &config, &OracleOptions::default()).unwrap();
                assert_eq!(by_types, evaluate_direct(&inv, &config).unwrap(), "{s} seed {seed}");
            }
        }
    }

    #[test]
    fn headline_curves() {
        let inv = p("<tau_1(1) tau_1(2)^2>_2");
        let config = random_general_config(1, &inv).unwrap();
        let (v, curves) = evaluate_by_types(&inv, &config, &OracleOptions::default()).unwrap();
        assert_eq!(v, Value::from_integer(3.into()));
        assert!(curves.iter().all(|c| c.lengths.iter().all(|l| l.is_positive())));
        let root = config.line.map(|l: TropicalLine| l.root).unwrap();
        assert!(curves.iter().all(|c| c.to_json()["anchor"].is_array()) && root.x != root.y);
    }
}
