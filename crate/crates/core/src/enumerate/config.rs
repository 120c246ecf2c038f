//! Point and line conditions with exact rational coordinates.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{StandardDirection, Vec2};
use super::OracleError;
use crate::invariant::{Codim, Invariant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatPoint {
    pub x: Rational64,
    pub y: Rational64,
}

impl RatPoint {
    pub fn new(x: Rational64, y: Rational64) -> Self {
        RatPoint { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        RatPoint::new(x.into(), y.into())
    }

    pub fn dot(&self, v: Vec2) -> Rational64 {
        self.x * v.x + self.y * v.y
    }
}

/// A tropical line: three rays from `root` in the standard directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TropicalLine {
    pub root: RatPoint,
}

impl TropicalLine {
    /// The ray containing `q` in its relative interior, `Ok(None)` when `q`
    /// is off the line, an error when `q` is the root.
    pub fn ray_of(&self, q: RatPoint) -> Result<Option<StandardDirection>, OracleError> {
        if q == self.root {
            return Err(OracleError::NonGeneral("point at the root of the line".into()));
        }
        let d = RatPoint::new(q.x - self.root.x, q.y - self.root.y);
        Ok(StandardDirection::ALL.into_iter().find(|r| d.dot(r.normal()).is_zero() && d.dot(r.along()).is_positive()))
    }
}

/// Conditions for one invariant: a point per codimension-2 insertion (in
/// canonical order) and the line for the codimension-1 insertion, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub points: Vec<RatPoint>,
    pub line: Option<TropicalLine>,
    pub seed: u64,
    /// Number of draws rejected before this one.
    pub attempt: u32,
}

/// Integer coordinates after clearing the common denominator.
#[derive(Clone, Debug)]
pub struct ScaledConfig {
    pub scale: i128,
    pub points: Vec<[i128; 2]>,
    pub root: Option<[i128; 2]>,
}

impl Configuration {
    pub fn new(points: Vec<RatPoint>, line: Option<TropicalLine>) -> Self {
        Configuration { points, line, seed: 0, attempt: 0 }
    }

    fn coords(&self) -> impl Iterator<Item = Rational64> + '_ {
        self.points.iter().chain(self.line.iter().map(|l| &l.root)).flat_map(|p| [p.x, p.y])
    }

    pub fn scaled(&self) -> ScaledConfig {
        let scale = self.coords().fold(1i64, |acc, c| acc.lcm(c.denom()));
        let s = |c: Rational64| i128::from(*c.numer()) * i128::from(scale / c.denom());
        ScaledConfig {
            scale: scale.into(),
            points: self.points.iter().map(|p| [s(p.x), s(p.y)]).collect(),
            root: self.line.map(|l| [s(l.root.x), s(l.root.y)]),
        }
    }

    /// Whether the configuration fits the insertion profile of `inv`.
    pub fn matches(&self, inv: &Invariant) -> bool {
        self.points.len() == inv.count(Codim::Point) && self.line.is_some() == (inv.count(Codim::Line) == 1)
    }
}

/// Cheap necessary conditions for general position: distinct points and no
/// two of the points and the line root on a common line of standard slope.
/// Remaining degeneracies are caught while solving.
pub fn check_general_position(config: &Configuration) -> Result<(), OracleError> {
    let all: Vec<RatPoint> = config.points.iter().copied().chain(config.line.map(|l| l.root)).collect();
    for (i, p) in all.iter().enumerate() {
        for q in &all[..i] {
            if p == q {
                return Err(OracleError::NonGeneral("two conditions at the same point".into()));
            }
            if p.x == q.x || p.y == q.y || p.x - p.y == q.x - q.y {
                return Err(OracleError::NonGeneral("conditions aligned along a standard direction".into()));
            }
        }
    }
    Ok(())
}

/// Options for drawing configurations.
#[derive(Clone, Copy, Debug)]
pub struct DrawOptions {
    pub max_attempts: u32,
    /// Test hook: the first this many draws are made degenerate on purpose.
    pub force_degenerate: u32,
}

impl Default for DrawOptions {
    fn default() -> Self {
        DrawOptions { max_attempts: 32, force_degenerate: 0 }
    }
}

/// The `attempt`-th raw draw for `seed`, without any check.
pub fn draw(seed: u64, attempt: u32, inv: &Invariant, force_degenerate: bool) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(attempt));
    let bound = 2_000 * (i64::from(inv.degree()) + 1);
    let mut coord = || Rational64::new(rng.gen_range(-bound..=bound), rng.gen_range(1..=9));
    let mut points: Vec<RatPoint> = (0..inv.count(Codim::Point)).map(|_| RatPoint::new(coord(), coord())).collect();
    let mut line = (inv.count(Codim::Line) > 0).then(|| TropicalLine { root: RatPoint::new(coord(), coord()) });
    if force_degenerate {
        match (points.len(), line.as_mut()) {
            (n, _) if n >= 2 => points[1] = points[0],
            (1, Some(l)) => l.root = points[0],
            (_, _) => {}
        }
    }
    Configuration { points, line, seed, attempt }
}

/// First draw for `seed` passing [`check_general_position`].
pub fn random_general_config(seed: u64, inv: &Invariant) -> Result<Configuration, OracleError> {
    random_general_config_from(seed, 0, inv, DrawOptions::default())
}

/// As [`random_general_config`], starting at draw `first`.
pub fn random_general_config_from(
    seed: u64,
    first: u32,
    inv: &Invariant,
    opts: DrawOptions,
) -> Result<Configuration, OracleError> {
    for attempt in first..opts.max_attempts {
        let c = draw(seed, attempt, inv, attempt < opts.force_degenerate);
        if check_general_position(&c).is_ok() {
            return Ok(c);
        }
    }
    Err(OracleError::RetriesExhausted { seed, attempts: opts.max_attempts })
}

/// Stable intersection number of two tropical lines: the sum over crossing
/// ray pairs of `|det(u, v)|`.
pub fn line_intersection_number(a: &TropicalLine, b: &TropicalLine) -> Result<i64, OracleError> {
    let mut total = 0;
    for ra in StandardDirection::ALL {
        for rb in StandardDirection::ALL {
            let (u, v) = (ra.vector(), rb.vector());
            let det = u.cross(v);
            let w = RatPoint::new(b.root.x - a.root.x, b.root.y - a.root.y);
            if det == 0 {
                // parallel rays overlap only if the roots are aligned
                if (w.x * u.y - w.y * u.x).is_zero() {
                    return Err(OracleError::NonGeneral("parallel rays on a common line".into()));
                }
                continue;
            }
            // a.root + t u = b.root + s v
            let t = (w.x * v.y - w.y * v.x) / det;
            let s = (w.x * u.y - w.y * u.x) / det;
            if t.is_zero() || s.is_zero() {
                return Err(OracleError::NonGeneral("lines meet at a root".into()));
            }
            if t.is_positive() && s.is_positive() {
                total += det.abs();
            }
        }
    }
    Ok(total)
}
