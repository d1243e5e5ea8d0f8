//! Brute-force reference implementations used only by tests.
//!
//! Facets come from every (d−1)-subset of generators: when the subset spans
//! a hyperplane, its normal (in either orientation) is a facet iff it is
//! nonnegative on all rays and zero on all lines. Linear algebra here is a
//! separate integer elimination so that it shares no code with the
//! crate under test.
#![allow(dead_code)]

use std::collections::BTreeSet;

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn primitive(v: &mut [i128]) {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// Right kernel of a small integer matrix by fraction-free Gauss-Jordan
/// elimination, one primitive integer vector per free column.
pub fn kernel(rows: &[Vec<i64>], d: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..d {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let (a, b) = (m[r][c], m[i][c]);
                for j in 0..d {
                    m[i][j] = a * m[i][j] - b * m[r][j];
                }
                primitive(&mut m[i]);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..d)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let l = pivots.iter().enumerate().fold(1i128, |l, (row, &p)| {
                let x = m[row][p].abs();
                l / gcd(l, x) * x
            });
            let mut x = vec![0i128; d];
            x[free] = l;
            for (row, &p) in pivots.iter().enumerate() {
                x[p] = -m[row][free] * (l / m[row][p]);
            }
            primitive(&mut x);
            x.into_iter().map(|v| i64::try_from(v).unwrap()).collect()
        })
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

fn subsets(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Facets of `cone(rays) + span(lines)` in dimension `d`, assumed
/// full-dimensional.
pub fn facets(d: usize, rays: &[Vec<i64>], lines: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    let all: Vec<Vec<i64>> = rays.iter().chain(lines).cloned().collect();
    let mut out = BTreeSet::new();
    if d == 1 {
        for h in [vec![1], vec![-1]] {
            if rays.iter().all(|r| dot(&h, r) >= 0) && lines.iter().all(|l| dot(&h, l) == 0) {
                out.insert(h);
            }
        }
        return out;
    }
    subsets(all.len(), d - 1, &mut |idx| {
        let rows: Vec<Vec<i64>> = idx.iter().map(|&i| all[i].clone()).collect();
        let ker = kernel(&rows, d);
        if ker.len() != 1 {
            return;
        }
        let h = ker[0].clone();
        for h in [h.clone(), h.iter().map(|x| -x).collect::<Vec<_>>()] {
            if rays.iter().all(|r| dot(&h, r) >= 0) && lines.iter().all(|l| dot(&h, l) == 0) {
                out.insert(h);
            }
        }
    });
    out
}

/// Extreme rays of the pointed cone `{x : H(x) >= 0}`.
pub fn extreme_rays(d: usize, forms: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    // Rays of a pointed H-cone are the facets of its dual.
    facets(d, forms, &[])
}

/// `true` when `x` satisfies every form.
pub fn satisfies(forms: &[Vec<i64>], x: &[i64]) -> bool {
    forms.iter().all(|h| dot(h, x) >= 0)
}

/// Rank of an integer matrix, again by plain elimination.
pub fn rank(rows: &[Vec<i64>], d: usize) -> usize {
    d - kernel(rows, d).len()
}
