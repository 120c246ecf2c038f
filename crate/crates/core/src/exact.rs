//! Exact integer linear algebra for the small dense systems of the oracle.
//!
//! Coefficients are small integers (edge directions) and right-hand sides are
//! integers after clearing the configuration's common denominator, so all
//! elimination is fraction-free over `i128` with gcd normalisation. Overflow
//! panics (overflow checks are enabled in every profile).

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Value = BigRational;

pub fn int_value(v: i64) -> Value {
    BigRational::from_integer(BigInt::from(v))
}

/// `p/q` text, or `p` when the denominator is one.
pub fn format_value(v: &Value) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_value(text: &str) -> Option<Value> {
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    if d == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(n, d))
}

pub fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn normalize(row: &mut [i128], pivot: Option<usize>) {
    let g = row.iter().fold(0, |g, &x| gcd(g, x));
    if g > 1 {
        row.iter_mut().for_each(|x| *x /= g);
    }
    if let Some(p) = pivot {
        if row[p] < 0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// A rational `num / den` with `den > 0`, used for comparisons only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

impl Frac {
    pub fn new(num: i128, den: i128) -> Frac {
        assert!(den != 0, "zero denominator");
        let s = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Frac { num: s * num / g, den: s * den / g }
    }

    pub fn signum(self) -> i128 {
        self.num.signum()
    }

    pub fn to_value(self) -> Value {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

impl std::ops::Sub for Frac {
    type Output = Frac;

    fn sub(self, other: Frac) -> Frac {
        Frac::new(self.num * other.den - other.num * self.den, self.den * other.den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PushOutcome {
    /// The row raised the rank.
    Independent,
    /// The row's coefficients are dependent and its right-hand side disagrees.
    Inconsistent,
    /// The row is a consequence of earlier rows, right-hand side included.
    Redundant,
}

/// Fraction-free reduced row echelon form maintained under row insertion.
///
/// Every stored row has a pivot column, and no other stored row has a
/// nonzero entry in that column. The last entry of each row is the
/// right-hand side.
#[derive(Clone, Debug)]
pub struct IncrementalSystem {
    cols: usize,
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

impl IncrementalSystem {
    pub fn new(cols: usize) -> Self {
        IncrementalSystem { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn push(&mut self, coefficients: &[i128], rhs: i128) -> PushOutcome {
        debug_assert_eq!(coefficients.len(), self.cols);
        let mut r: Vec<i128> = coefficients.iter().copied().chain(std::iter::once(rhs)).collect();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = r[p];
            if f != 0 {
                let a = row[p];
                for (x, &y) in r.iter_mut().zip(row) {
                    *x = *x * a - y * f;
                }
                normalize(&mut r, None);
            }
        }
        let Some(c) = r[..self.cols].iter().position(|&x| x != 0) else {
            return if r[self.cols] == 0 { PushOutcome::Redundant } else { PushOutcome::Inconsistent };
        };
        normalize(&mut r, Some(c));
        for row in self.rows.iter_mut() {
            let f = row[c];
            if f != 0 {
                let a = r[c];
                for (x, &y) in row.iter_mut().zip(&r) {
                    *x = *x * a - y * f;
                }
            }
        }
        for (row, &p) in self.rows.iter_mut().zip(&self.pivots) {
            normalize(row, Some(p));
        }
        self.rows.push(r);
        self.pivots.push(c);
        PushOutcome::Independent
    }

    /// Value of the linear form `form . x` if the current rows pin it down.
    pub fn determined(&self, form: &[i128]) -> Option<Frac> {
        // form = sum_k (form[p_k] / a_k) row_k on the coefficient part
        let mut den: i128 = 1;
        let mut rest: Vec<i128> = form.to_vec();
        let mut acc_num: i128 = 0;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = rest[p];
            if f == 0 {
                continue;
            }
            let a = row[p];
            // rest <- rest * a - row * f ; acc tracks the rhs side in the same scale
            for (x, &y) in rest.iter_mut().zip(row.iter()) {
                *x = *x * a - y * f;
            }
            acc_num = acc_num * a + f * row[self.cols];
            den *= a;
            let g = rest.iter().fold(gcd(acc_num, den), |g, &x| gcd(g, x));
            if g > 1 {
                rest.iter_mut().for_each(|x| *x /= g);
                acc_num /= g;
                den /= g;
            }
        }
        if rest[..self.cols].iter().any(|&x| x != 0) {
            return None;
        }
        Some(Frac::new(acc_num, den))
    }

    /// Value of column `col` if pinned down.
    pub fn column_value(&self, col: usize) -> Option<Frac> {
        let k = self.pivots.iter().position(|&p| p == col)?;
        let row = &self.rows[k];
        if row[..self.cols].iter().enumerate().any(|(j, &x)| j != col && x != 0) {
            return None;
        }
        Some(Frac::new(row[self.cols], row[col]))
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains(&col)
    }
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    assert!(m.iter().all(|r| r.len() == n), "matrix is not square");
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}
