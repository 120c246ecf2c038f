use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::exact::gcd;

/// Integer vector in the plane: edge directions, possibly with weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: i64,
    pub y: i64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> i64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> i64 {
        self.x * o.y - self.y * o.x
    }

    pub fn is_zero(self) -> bool {
        self == Vec2::ZERO
    }

    /// Lattice length; zero for the zero vector.
    pub fn weight(self) -> i64 {
        gcd(self.x.into(), self.y.into()) as i64
    }

    /// Primitive vector in the same direction (zero stays zero).
    pub fn primitive(self) -> Vec2 {
        match self.weight() {
            0 => self,
            w => Vec2::new(self.x / w, self.y / w),
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        *self = *self + o;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<i64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: i64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// One of `-e1`, `-e2`, `e1+e2`: the directions of non-contracted ends and
/// of the three rays of a tropical line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StandardDirection {
    West,
    South,
    NorthEast,
}

impl StandardDirection {
    pub const ALL: [StandardDirection; 3] =
        [StandardDirection::West, StandardDirection::South, StandardDirection::NorthEast];

    pub fn vector(self) -> Vec2 {
        match self {
            StandardDirection::West => Vec2::new(-1, 0),
            StandardDirection::South => Vec2::new(0, -1),
            StandardDirection::NorthEast => Vec2::new(1, 1),
        }
    }

    /// Primitive normal: a point `q` lies on the line through `r` along this
    /// direction iff `normal . (q - r) = 0`.
    pub fn normal(self) -> Vec2 {
        match self {
            StandardDirection::West => Vec2::new(0, 1),
            StandardDirection::South => Vec2::new(1, 0),
            StandardDirection::NorthEast => Vec2::new(1, -1),
        }
    }

    /// `w` with `w . vector = 1`; `w . (q - r)` is the ray parameter of `q`.
    pub fn along(self) -> Vec2 {
        match self {
            StandardDirection::West => Vec2::new(-1, 0),
            StandardDirection::South => Vec2::new(0, -1),
            StandardDirection::NorthEast => Vec2::new(1, 0),
        }
    }

    pub fn letter(self) -> char {
        match self {
            StandardDirection::West => 'W',
            StandardDirection::South => 'S',
            StandardDirection::NorthEast => 'N',
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for StandardDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StandardDirection::West => "-e1",
            StandardDirection::South => "-e2",
            StandardDirection::NorthEast => "e1+e2",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_directions_balance() {
        let sum = StandardDirection::ALL.iter().fold(Vec2::ZERO, |a, d| a + d.vector());
        assert!(sum.is_zero());
        for d in StandardDirection::ALL {
            assert_eq!(d.normal().dot(d.vector()), 0);
            assert_eq!(d.along().dot(d.vector()), 1);
            assert_eq!(d.normal().cross(d.along()).abs(), 1);
        }
    }

    #[test]
    fn weights() {
        assert_eq!(Vec2::new(-2, 0).weight(), 2);
        assert_eq!(Vec2::new(-2, 0).primitive(), Vec2::new(-1, 0));
        assert_eq!(Vec2::new(1, 1).weight(), 1);
        assert_eq!(Vec2::ZERO.weight(), 0);
    }
}
