//! Exact rational linear algebra.
//!
//! Everything here works over arbitrary-precision rationals; there is no
//! floating point anywhere in the crate. Matrices are dense and row-major,
//! which is plenty for the problem sizes involved (at most a few thousand
//! rows, at most a few hundred columns).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text encoding: `p/q`, or `p` when the denominator is one.
pub fn encode_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn decode_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("malformed rational {s:?}"));
    let r = match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p).map_err(|_| bad())?;
            let q = BigInt::from_str(q).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Rat::new(p, q)
        }
        None => Rat::from_integer(BigInt::from_str(s).map_err(|_| bad())?),
    };
    Ok(r)
}

/// Dense rational matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(encode_rat).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rat>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Mat {
            rows: n,
            cols,
            data,
        })
    }

    pub fn from_int_rows<R: AsRef<[i64]>>(cols: usize, rows: &[R]) -> Result<Self> {
        Mat::from_rows(
            cols,
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }
}

/// Reduced row echelon form. Pivot columns come back strictly increasing.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    rref_limited(m, m.cols)
}

/// Row reduction that only places pivots in the first `pivot_cols` columns;
/// the remaining columns ride along (augmented right-hand sides).
pub fn rref_limited(m: &Mat, pivot_cols: usize) -> (Mat, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut lead = 0;
    for col in 0..pivot_cols.min(a.cols) {
        if lead == a.rows {
            break;
        }
        let Some(p) = (lead..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(lead, p);
        let inv = a[(lead, col)].recip();
        for c in col..a.cols {
            let v = &a[(lead, c)] * &inv;
            a[(lead, c)] = v;
        }
        for r in 0..a.rows {
            if r == lead || a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone();
            for c in col..a.cols {
                if a[(lead, c)].is_zero() {
                    continue;
                }
                let v = &a[(r, c)] - &factor * &a[(lead, c)];
                a[(r, c)] = v;
            }
        }
        pivots.push(col);
        lead += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Mat) -> usize {
    rref(m).1.len()
}

/// Finds `c` with `cᵀ · basis_rows = target`, or `None` when the target is
/// outside the row space. Free coefficients are set to zero.
pub fn solve_in_span(basis_rows: &Mat, target: &[Rat]) -> Result<Option<Vec<Rat>>> {
    Ok(solve_many_in_span(basis_rows, std::slice::from_ref(&target.to_vec()))?
        .pop()
        .flatten())
}

/// Batched [`solve_in_span`]: one elimination shared by all targets.
pub fn solve_many_in_span(basis_rows: &Mat, targets: &[Vec<Rat>]) -> Result<Vec<Option<Vec<Rat>>>> {
    let k = basis_rows.rows;
    let d = basis_rows.cols;
    for t in targets {
        if t.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: t.len(),
            });
        }
    }
    // Columns of the augmented system are the basis rows followed by targets.
    let mut aug = Mat::zeros(d, k + targets.len());
    for r in 0..k {
        for c in 0..d {
            aug[(c, r)] = basis_rows[(r, c)].clone();
        }
    }
    for (j, t) in targets.iter().enumerate() {
        for (c, v) in t.iter().enumerate() {
            aug[(c, k + j)] = v.clone();
        }
    }
    let (red, pivots) = rref_limited(&aug, k);
    let rank = pivots.len();
    let out = (0..targets.len())
        .map(|j| {
            let col = k + j;
            if (rank..d).any(|r| !red[(r, col)].is_zero()) {
                return None;
            }
            let mut coeffs = vec![Rat::zero(); k];
            for (r, &p) in pivots.iter().enumerate() {
                coeffs[p] = red[(r, col)].clone();
            }
            Some(coeffs)
        })
        .collect();
    Ok(out)
}

/// Basis of the right kernel `{x : m·x = 0}`.
pub fn nullspace(m: &Mat) -> Vec<Vec<Rat>> {
    let (red, pivots) = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut x = vec![Rat::zero(); m.cols];
            x[free] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -red[(r, free)].clone();
            }
            x
        })
        .collect()
}

/// Scales a rational vector by a positive factor so that it becomes an
/// integer vector with content one. The zero vector maps to zero.
pub fn integer_direction(v: &[Rat]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Like [`integer_direction`] but narrowed to machine integers.
pub fn integer_direction_i64(v: &[Rat]) -> Result<Vec<i64>> {
    integer_direction(v)
        .iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::Overflow))
        .collect()
}

/// Incrementally maintained row-echelon basis, for rank-increasing scans.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Vec<Rat>)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        v
    }

    /// True when `v` lies in the span of the rows inserted so far.
    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Inserts `v`; returns whether the rank went up.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push((p, r));
        true
    }

    pub fn insert_int(&mut self, v: &[i64]) -> bool {
        let r: Vec<Rat> = v.iter().map(|&x| rat(x)).collect();
        self.insert(&r)
    }
}

pub fn dot_rat_int(a: &[Rat], b: &[i64]) -> Rat {
    a.iter()
        .zip(b)
        .filter(|(_, &y)| y != 0)
        .fold(Rat::zero(), |acc, (x, &y)| acc + x * rat(y))
}

pub fn is_nonnegative(v: &[Rat]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_mat(rows: &[&[i64]]) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat::from_int_rows(cols, rows).unwrap()
    }

    #[test]
    fn identity_is_its_own_rref() {
        let id = Mat::identity(3);
        let (r, pivots) = rref(&id);
        assert_eq!(r, id);
        assert_eq!(pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_of_singular_matrix() {
        let m = int_mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (r, pivots) = rref(&m);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(r.row(2), &[rat(0), rat(0), rat(0)]);
        assert_eq!(r.row(0), &[rat(1), rat(0), rat(1)]);
        assert_eq!(r.row(1), &[rat(0), rat(1), rat(1)]);
    }

    #[test]
    fn solve_first_row_gives_unit_coefficients() {
        let m = int_mat(&[&[1, 1, 0], &[0, 1, 1]]);
        let c = solve_in_span(&m, m.row(0)).unwrap().unwrap();
        assert_eq!(c, vec![rat(1), rat(0)]);
    }

    #[test]
    fn solve_reports_out_of_span() {
        let m = int_mat(&[&[1, 1, 0], &[0, 1, 1]]);
        assert!(solve_in_span(&m, &[rat(1), rat(0), rat(0)]).unwrap().is_none());
        assert!(solve_in_span(&m, &[rat(1)]).is_err());
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = int_mat(&[&[1, 2, 3, 4], &[0, 1, 1, 2]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 2);
        for x in ns {
            for r in 0..m.rows() {
                let s: Rat = m.row(r).iter().zip(&x).map(|(a, b)| a * b).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn echelon_basis_tracks_rank() {
        let mut e = EchelonBasis::new();
        assert!(e.insert_int(&[1, 1, 0]));
        assert!(e.insert_int(&[0, 1, 1]));
        assert!(!e.insert_int(&[1, 2, 1]));
        assert!(e.contains(&[rat(2), rat(1), rat(-1)]));
        assert!(e.insert_int(&[0, 0, 5]));
        assert_eq!(e.rank(), 3);
    }

    #[test]
    fn rational_encoding() {
        assert_eq!(encode_rat(&rat_frac(6, -4)), "-3/2");
        assert_eq!(encode_rat(&rat(7)), "7");
        assert_eq!(decode_rat("-3/2").unwrap(), rat_frac(-3, 2));
        assert_eq!(decode_rat("4/2").unwrap(), rat(2));
        assert!(decode_rat("1/0").is_err());
        assert!(decode_rat("x").is_err());
    }

    #[test]
    fn integer_direction_clears_denominators() {
        let v = vec![rat_frac(1, 2), rat_frac(-1, 3), rat(0)];
        let d = integer_direction_i64(&v).unwrap();
        assert_eq!(d, vec![3, -2, 0]);
    }
}
