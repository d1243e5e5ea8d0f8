//! Integer-preserving (fraction-free) phase-one simplex for conic membership.
//!
//! Solves "is `b` a nonnegative combination of the columns `a_0 … a_{m-1}`"
//! exactly. Every tableau entry stays an integer: after each pivot the whole
//! tableau is scaled by the determinant of the current basis, and the update
//! `(p·t − q·s) / D_prev` divides exactly. The arithmetic is generic so the
//! same code runs on checked machine integers first and on `BigInt` when
//! those overflow.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub(crate) trait PivotNum: Clone + Ord + Send + Sync {
    fn from_i64(x: i64) -> Self;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn sub(&self, other: &Self) -> Option<Self>;
    /// `(a·p − b·c) / d`, exact.
    fn pivot(a: &Self, p: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self>;
    /// Compares `a·b` with `c·d`.
    fn cmp_products(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Ordering>;
    fn to_bigint(&self) -> BigInt;
}

impl PivotNum for i64 {
    fn from_i64(x: i64) -> Self {
        x
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_positive(&self) -> bool {
        *self > 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    #[inline]
    fn pivot(a: &Self, p: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        let num = a.checked_mul(*p)?.checked_sub(b.checked_mul(*c)?)?;
        debug_assert_eq!(num % d, 0, "fraction-free pivot must divide exactly");
        if *d == 1 {
            Some(num)
        } else {
            Some(num / d)
        }
    }
    fn cmp_products(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Ordering> {
        Some(a.checked_mul(*b)?.cmp(&c.checked_mul(*d)?))
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl PivotNum for i128 {
    fn from_i64(x: i64) -> Self {
        x as i128
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_positive(&self) -> bool {
        *self > 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    #[inline]
    fn pivot(a: &Self, p: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        let num = if *b == 0 || *c == 0 {
            a.checked_mul(*p)?
        } else {
            a.checked_mul(*p)?.checked_sub(b.checked_mul(*c)?)?
        };
        debug_assert_eq!(num % d, 0, "fraction-free pivot must divide exactly");
        if *d == 1 {
            Some(num)
        } else {
            Some(num / d)
        }
    }
    fn cmp_products(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Ordering> {
        Some(a.checked_mul(*b)?.cmp(&c.checked_mul(*d)?))
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl PivotNum for BigInt {
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn pivot(a: &Self, p: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        let num = a * p - b * c;
        let (q, r) = num.div_rem(d);
        debug_assert!(Zero::is_zero(&r), "fraction-free pivot must divide exactly");
        Some(q)
    }
    fn cmp_products(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Ordering> {
        Some((a * b).cmp(&(c * d)))
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Result of a phase-one solve, expressed with a common positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum RawOutcome {
    /// `λ_j = numerators[j] / denom`, all nonnegative.
    Feasible {
        denom: BigInt,
        numerators: Vec<BigInt>,
    },
    /// Integer `x` with `a_jᵀx >= 0` for all `j` and `bᵀx < 0`.
    Infeasible { separator: Vec<BigInt> },
}

/// After this many consecutive degenerate pivots the entering rule switches
/// from steepest reduced cost to Bland's rule for the rest of the solve.
const DEGENERATE_STREAK: usize = 50;

struct Tableau<N> {
    rows: usize,
    width: usize,
    data: Vec<N>,
    basic: Vec<usize>,
    det: N,
}

impl<N: PivotNum> Tableau<N> {
    #[inline]
    fn at(&self, r: usize, c: usize) -> &N {
        &self.data[r * self.width + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) -> Option<()> {
        let w = self.width;
        let p = self.at(pr, pc).clone();
        // With an unchanged determinant, entries off the pivot row's support
        // and rows with a zero multiplier stay as they are.
        let same = p == self.det;
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        let prow: &[N] = prow;
        let support: Vec<usize> = (0..w).filter(|&j| !prow[j].is_zero()).collect();
        let det = &self.det;
        let update = |row: &mut [N]| -> Option<()> {
            let q = row[pc].clone();
            if q.is_zero() {
                if same {
                    return Some(());
                }
                for t in row.iter_mut() {
                    if !t.is_zero() {
                        *t = N::pivot(t, &p, &q, &q, det)?;
                    }
                }
            } else if same {
                for &j in &support {
                    row[j] = N::pivot(&row[j], &p, &q, &prow[j], det)?;
                }
            } else {
                for (t, s) in row.iter_mut().zip(prow) {
                    if t.is_zero() && s.is_zero() {
                        continue;
                    }
                    *t = N::pivot(t, &p, &q, s, det)?;
                }
            }
            Some(())
        };
        for row in before.chunks_mut(w) {
            update(row)?;
        }
        for row in after.chunks_mut(w) {
            update(row)?;
        }
        self.det = p;
        self.basic[pr] = pc;
        Some(())
    }
}

/// Phase one on `Σ λ_j a_j = b`, `λ >= 0`. Returns `None` only when the
/// number type overflowed.
pub(crate) fn solve<N: PivotNum>(columns: &[&[i64]], target: &[i64]) -> Option<RawOutcome> {
    let d = target.len();
    let m = columns.len();
    let width = m + d + 1;
    let rhs_col = m + d;
    let rows = d + 1;
    let obj = d;
    let mut data = vec![N::zero(); rows * width];
    let sigma: Vec<i64> = target.iter().map(|&b| if b < 0 { -1 } else { 1 }).collect();
    for i in 0..d {
        for (j, col) in columns.iter().enumerate() {
            data[i * width + j] = N::from_i64(sigma[i] * col[i]);
        }
        data[i * width + m + i] = N::from_i64(1);
        data[i * width + rhs_col] = N::from_i64(sigma[i] * target[i]);
    }
    for c in 0..width {
        if (m..m + d).contains(&c) {
            continue;
        }
        let mut acc = N::zero();
        for i in 0..d {
            acc = acc.sub(&data[i * width + c])?;
        }
        data[obj * width + c] = acc;
    }
    let mut t = Tableau {
        rows,
        width,
        data,
        basic: (m..m + d).collect(),
        det: N::from_i64(1),
    };

    let mut bland = false;
    let mut streak = 0usize;
    loop {
        let obj_row = &t.data[obj * width..(obj + 1) * width];
        let entering = if bland {
            (0..m + d).find(|&j| obj_row[j].is_negative())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..m + d {
                if !obj_row[j].is_negative() {
                    continue;
                }
                if best.is_none_or(|b| obj_row[j] < obj_row[b]) {
                    best = Some(j);
                }
            }
            best
        };
        let Some(pc) = entering else { break };

        let mut leave: Option<usize> = None;
        for i in 0..d {
            let a = t.at(i, pc);
            if !a.is_positive() {
                continue;
            }
            leave = match leave {
                None => Some(i),
                Some(l) => {
                    // rhs_i / a_i  vs  rhs_l / a_l
                    let ord = N::cmp_products(t.at(i, rhs_col), t.at(l, pc), t.at(l, rhs_col), a)?;
                    match ord {
                        Ordering::Less => Some(i),
                        Ordering::Equal if t.basic[i] < t.basic[l] => Some(i),
                        _ => Some(l),
                    }
                }
            };
        }
        // Phase one is bounded below by zero, so a leaving row always exists.
        let pr = leave.expect("phase-one objective is bounded");
        if t.at(pr, rhs_col).is_zero() {
            streak += 1;
            if streak > DEGENERATE_STREAK {
                bland = true;
            }
        } else {
            streak = 0;
        }
        t.pivot(pr, pc)?;
        debug_assert!(t.rows == rows);
    }

    let det = t.det.to_bigint();
    if t.at(obj, rhs_col).is_zero() {
        let mut numerators = vec![<BigInt as Zero>::zero(); m];
        for i in 0..d {
            let b = t.basic[i];
            if b < m {
                numerators[b] = t.at(i, rhs_col).to_bigint();
            }
        }
        Some(RawOutcome::Feasible {
            denom: det,
            numerators,
        })
    } else {
        // Reduced cost of artificial i is det·(1 − y_i).
        let mut x: Vec<BigInt> = (0..d)
            .map(|i| {
                let dy = &det - t.at(obj, m + i).to_bigint();
                if sigma[i] < 0 {
                    dy
                } else {
                    -dy
                }
            })
            .collect();
        let g = x.iter().fold(<BigInt as Zero>::zero(), |acc, v| acc.gcd(v));
        if !Zero::is_zero(&g) && !g.is_one() {
            for v in x.iter_mut() {
                *v = &*v / &g;
            }
        }
        Some(RawOutcome::Infeasible { separator: x })
    }
}

/// Runs on `i64`, then `i128`, then `BigInt`, moving up a tier whenever an
/// operation overflows.
pub(crate) fn solve_exact(columns: &[&[i64]], target: &[i64]) -> RawOutcome {
    solve::<i64>(columns, target)
        .or_else(|| solve::<i128>(columns, target))
        .or_else(|| solve::<BigInt>(columns, target))
        .expect("BigInt arithmetic cannot overflow")
}
