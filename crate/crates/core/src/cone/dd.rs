//! One step of the double-description method, run on the dual cone.
//!
//! The facets of a full-dimensional cone `C` are the extreme rays of its dual
//! `C*`, and `C*` is cut out by the generators of `C`. Enlarging `C` by a ray
//! `g` intersects `C*` with `{H : H(g) >= 0}`; enlarging it by a line `v`
//! intersects with `{H : H(v) = 0}`. Each step only pairs rays of `C*` that
//! are adjacent, which is decided combinatorially from zero sets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Sign census of one elimination step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ElimCounts {
    pub zero: usize,
    pub positive: usize,
    pub negative: usize,
    /// Inequalities produced before deduplication and reduction.
    pub raw: usize,
}

impl ElimCounts {
    pub(crate) fn from_signs(signs: &[i128], line: bool) -> Self {
        let zero = signs.iter().filter(|s| **s == 0).count();
        let positive = signs.iter().filter(|s| **s > 0).count();
        let negative = signs.len() - zero - positive;
        let kept = if line { zero } else { zero + positive };
        ElimCounts {
            zero,
            positive,
            negative,
            raw: kept + positive * negative,
        }
    }
}

pub(crate) fn eval(form: &[i64], x: &[i64]) -> i128 {
    form.iter()
        .zip(x)
        .map(|(&a, &b)| a as i128 * b as i128)
        .sum()
}

/// Divides out the content and narrows to `i64`. Returns `None` for zero.
pub(crate) fn normalize_i128(v: &[i128]) -> Result<Option<Vec<i64>>> {
    let g = v.iter().fold(0i128, |acc, &x| acc.gcd(&x));
    if g == 0 {
        return Ok(None);
    }
    v.iter()
        .map(|&x| i64::try_from(x / g).map_err(|_| Error::Overflow))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// `s_p·H_q − s_q·H_p` for `s_p > 0 > s_q`, content-normalized.
pub(crate) fn combine(hp: &[i64], sp: i128, hq: &[i64], sq: i128) -> Result<Option<Vec<i64>>> {
    let g = sp.gcd(&sq);
    let (a, b) = (sp / g, -sq / g);
    let mut out = Vec::with_capacity(hp.len());
    for (&x, &y) in hp.iter().zip(hq) {
        let t = a
            .checked_mul(y as i128)
            .and_then(|u| b.checked_mul(x as i128).and_then(|w| u.checked_add(w)))
            .ok_or(Error::Overflow)?;
        out.push(t);
    }
    normalize_i128(&out)
}

trait Bits: Copy + Send + Sync {
    fn empty() -> Self;
    fn set(&mut self, i: usize);
    fn and(&self, o: &Self) -> Self;
    fn subset_of(&self, o: &Self) -> bool;
    fn count(&self) -> u32;
}

impl<const W: usize> Bits for [u64; W] {
    #[inline]
    fn empty() -> Self {
        [0; W]
    }
    #[inline]
    fn set(&mut self, i: usize) {
        self[i / 64] |= 1 << (i % 64);
    }
    #[inline]
    fn and(&self, o: &Self) -> Self {
        let mut r = [0; W];
        for k in 0..W {
            r[k] = self[k] & o[k];
        }
        r
    }
    #[inline]
    fn subset_of(&self, o: &Self) -> bool {
        (0..W).all(|k| self[k] & !o[k] == 0)
    }
    #[inline]
    fn count(&self) -> u32 {
        self.iter().map(|w| w.count_ones()).sum()
    }
}

/// Largest generator count the bitset step supports.
pub(crate) const MAX_GENERATORS: usize = 64 * 16;

/// Rays of the dual after adding `g` (as a ray, or as a line when `line`).
///
/// `forms` must be exactly the facets of the cone generated by `gens`, and
/// `gens` must span the ambient space.
pub(crate) fn step(
    dim: usize,
    forms: &[Vec<i64>],
    gens: &[&[i64]],
    g: &[i64],
    line: bool,
) -> Result<(Vec<Vec<i64>>, ElimCounts)> {
    match gens.len().div_ceil(64) {
        0 | 1 => step_w::<[u64; 1]>(dim, forms, gens, g, line),
        2 => step_w::<[u64; 2]>(dim, forms, gens, g, line),
        3 | 4 => step_w::<[u64; 4]>(dim, forms, gens, g, line),
        5..=8 => step_w::<[u64; 8]>(dim, forms, gens, g, line),
        9..=16 => step_w::<[u64; 16]>(dim, forms, gens, g, line),
        _ => Err(Error::Invalid(format!(
            "double description supports at most {MAX_GENERATORS} generators"
        ))),
    }
}

fn step_w<B: Bits>(
    dim: usize,
    forms: &[Vec<i64>],
    gens: &[&[i64]],
    g: &[i64],
    line: bool,
) -> Result<(Vec<Vec<i64>>, ElimCounts)> {
    let signs: Vec<i128> = forms.iter().map(|f| eval(f, g)).collect();
    let counts = ElimCounts::from_signs(&signs, line);
    let zsets: Vec<B> = forms
        .par_iter()
        .map(|f| {
            let mut z = B::empty();
            for (i, x) in gens.iter().enumerate() {
                if eval(f, x) == 0 {
                    z.set(i);
                }
            }
            z
        })
        .collect();

    let pos: Vec<usize> = (0..forms.len()).filter(|&i| signs[i] > 0).collect();
    let neg: Vec<usize> = (0..forms.len()).filter(|&i| signs[i] < 0).collect();
    let need = dim.saturating_sub(2) as u32;

    let combos: Vec<Vec<i64>> = pos
        .par_iter()
        .map(|&p| -> Result<Vec<Vec<i64>>> {
            let mut out = Vec::new();
            for &q in &neg {
                let zpq = zsets[p].and(&zsets[q]);
                if zpq.count() < need {
                    continue;
                }
                let blocked = zsets
                    .iter()
                    .enumerate()
                    .any(|(r, zr)| r != p && r != q && zpq.subset_of(zr));
                if blocked {
                    continue;
                }
                if let Some(h) = combine(&forms[p], signs[p], &forms[q], signs[q])? {
                    out.push(h);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut next: Vec<Vec<i64>> = forms
        .iter()
        .zip(&signs)
        .filter(|(_, &s)| s == 0 || (!line && s > 0))
        .map(|(f, _)| f.clone())
        .collect();
    next.extend(combos);
    Ok((next, counts))
}

/// Rank of an integer matrix by fraction-free elimination.
pub(crate) fn int_rank(rows: &[&[i64]]) -> usize {
    if let Some(r) = bareiss_i128(rows) {
        return r;
    }
    bareiss_big(rows)
}

fn bareiss_i128(rows: &[&[i64]]) -> Option<usize> {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let piv = m[rank][c];
        for i in rank + 1..m.len() {
            let f = m[i][c];
            for j in c..cols {
                let v = piv
                    .checked_mul(m[i][j])?
                    .checked_sub(f.checked_mul(m[rank][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = piv;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    Some(rank)
}

fn bareiss_big(rows: &[&[i64]]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let piv = m[rank][c].clone();
        for i in rank + 1..m.len() {
            let f = m[i][c].clone();
            for j in c..cols {
                let v = &piv * &m[i][j] - &f * &m[rank][j];
                m[i][j] = v / &prev;
            }
        }
        prev = piv;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        let a: Vec<&[i64]> = vec![&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]];
        assert_eq!(int_rank(&a), 2);
        assert_eq!(bareiss_big(&a), 2);
        let big: Vec<&[i64]> = vec![&[i64::MAX, 1], &[1, i64::MAX]];
        assert_eq!(int_rank(&big), 2);
        assert_eq!(int_rank(&[]), 0);
    }

    #[test]
    fn combine_cancels_and_normalizes() {
        let h = combine(&[1, 0, 2], 2, &[0, 3, -4], -4).unwrap().unwrap();
        // 2·(0,3,-4) + 4·(1,0,2) = (4,6,0) → (2,3,0)
        assert_eq!(h, vec![2, 3, 0]);
        assert!(combine(&[1, 0], 1, &[-1, 0], -1).unwrap().is_none());
    }

    #[test]
    fn square_to_halfplane() {
        // Orthant in R^2 plus the line (1,-1): the half-plane x + y >= 0.
        let forms = vec![vec![1, 0], vec![0, 1]];
        let gens: Vec<&[i64]> = vec![&[1, 0], &[0, 1]];
        let (next, counts) = step(2, &forms, &gens, &[1, -1], true).unwrap();
        assert_eq!(next, vec![vec![1, 1]]);
        assert_eq!(counts.raw, 1);
        let (next, counts) = step(2, &forms, &gens, &[1, -1], false).unwrap();
        assert_eq!(next, vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(
            counts,
            ElimCounts {
                zero: 0,
                positive: 1,
                negative: 1,
                raw: 2
            }
        );
    }
}
