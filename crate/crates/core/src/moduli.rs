//! Combinatorics of boundary divisors on M̄₀,ₙ.
//!
//! Boundary classes are stored as bitmasks over the labels `1..=n` (bit
//! `i - 1` for label `i`), which caps `n` at 12 comfortably. Coordinates are
//! ordered lexicographically on the sorted member lists, so for `n = 7` the
//! order is `{1,2}, {1,2,3}, {1,2,4}, …, {1,3}, …`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;

use crate::exactla::{self, rat, EchelonBasis, Mat, Rat};
use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 4;
pub const MAX_POINTS: usize = 12;

pub fn check_n(n: usize) -> Result<()> {
    if (MIN_POINTS..=MAX_POINTS).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidPointCount(n))
    }
}

fn full_mask(n: usize) -> u16 {
    ((1u32 << n) - 1) as u16
}

fn label_bit(label: usize) -> u16 {
    1 << (label - 1)
}

fn members_of(mask: u16) -> impl Iterator<Item = usize> {
    (0..16).filter(move |i| mask & (1 << i) != 0).map(|i| i + 1)
}

/// A boundary divisor class `Δ_S = Δ_{Sᶜ}` in canonical form: the smaller of
/// `S`, `Sᶜ`, or the one containing label 1 when both have size `n/2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryClass {
    n: u8,
    mask: u16,
}

impl BoundaryClass {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u16 {
        self.mask
    }

    pub fn members(&self) -> Vec<usize> {
        members_of(self.mask).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, label: usize) -> bool {
        label >= 1 && label <= self.n() && self.mask & label_bit(label) != 0
    }

    /// Image under a relabeling; `perm[i - 1]` is the new name of label `i`.
    pub fn relabel(&self, perm: &[usize]) -> Result<BoundaryClass> {
        let mask = members_of(self.mask).fold(0u16, |m, i| m | label_bit(perm[i - 1]));
        canonical_mask(self.n(), mask)
    }

    /// Comma-separated member list, e.g. `1,2,5`.
    pub fn label(&self) -> String {
        self.members()
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Debug for BoundaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Δ{{{}}}", self.label())
    }
}

impl fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.label())
    }
}

impl Ord for BoundaryClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| members_of(self.mask).cmp(members_of(other.mask)))
    }
}

impl PartialOrd for BoundaryClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn canonical_mask(n: usize, mask: u16) -> Result<BoundaryClass> {
    check_n(n)?;
    let size = mask.count_ones() as usize;
    if size < 2 || size + 2 > n {
        return Err(Error::InvalidBoundary { n, size });
    }
    let comp = full_mask(n) & !mask;
    let keep = match (2 * size).cmp(&n) {
        Ordering::Less => true,
        Ordering::Equal => mask & 1 != 0,
        Ordering::Greater => false,
    };
    Ok(BoundaryClass {
        n: n as u8,
        mask: if keep { mask } else { comp },
    })
}

/// Canonical representative of `{raw, rawᶜ}`.
pub fn canonical_class(n: usize, raw: &[usize]) -> Result<BoundaryClass> {
    check_n(n)?;
    let mut mask = 0u16;
    for &l in raw {
        if l == 0 || l > n {
            return Err(Error::LabelOutOfRange { n, label: l });
        }
        mask |= label_bit(l);
    }
    canonical_mask(n, mask)
}

/// The ordered coordinate system of `W_n`: one coordinate per boundary class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbientIndex {
    n: usize,
    classes: Vec<BoundaryClass>,
    position: Vec<u32>,
}

const NO_POSITION: u32 = u32::MAX;

impl AmbientIndex {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `N = 2^(n-1) - n - 1`.
    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[BoundaryClass] {
        &self.classes
    }

    /// Coordinate of the class of `mask` (either representative works).
    pub fn position_of_mask(&self, mask: u16) -> Option<usize> {
        let p = *self.position.get(mask as usize)?;
        (p != NO_POSITION).then_some(p as usize)
    }

    pub fn position(&self, class: &BoundaryClass) -> Option<usize> {
        if class.n() != self.n {
            return None;
        }
        self.position_of_mask(class.mask)
    }

    pub fn unit(&self, class: &BoundaryClass) -> Vec<i64> {
        let mut v = vec![0; self.dim()];
        if let Some(p) = self.position(class) {
            v[p] = 1;
        }
        v
    }
}

pub fn enumerate_classes(n: usize) -> Result<AmbientIndex> {
    check_n(n)?;
    let mut classes: Vec<BoundaryClass> = (0..=full_mask(n))
        .filter_map(|m| canonical_mask(n, m).ok())
        .collect();
    classes.sort();
    classes.dedup();
    let mut position = vec![NO_POSITION; 1 << n];
    for (i, c) in classes.iter().enumerate() {
        position[c.mask as usize] = i as u32;
        position[(full_mask(n) & !c.mask) as usize] = i as u32;
    }
    Ok(AmbientIndex {
        n,
        classes,
        position,
    })
}

pub fn ambient_dim(n: usize) -> usize {
    (1usize << (n - 1)) - n - 1
}

pub fn relation_dim(n: usize) -> usize {
    n * (n - 3) / 2
}

pub fn quotient_dim(n: usize) -> usize {
    (1usize << (n - 1)) - n * (n - 1) / 2 - 1
}

/// Keel relation for distinct labels `a, b, c, d`:
/// `Σ_{a,b∈S; c,d∉S} Δ_S − Σ_{a,c∈S; b,d∉S} Δ_S`.
pub fn keel_relation(idx: &AmbientIndex, quad: [usize; 4]) -> Result<Vec<i64>> {
    let n = idx.n;
    for &l in &quad {
        if l == 0 || l > n {
            return Err(Error::LabelOutOfRange { n, label: l });
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if quad[i] == quad[j] {
                return Err(Error::NonDistinctLabels);
            }
        }
    }
    let [a, b, c, d] = quad.map(label_bit);
    let mut v = vec![0i64; idx.dim()];
    for (pos, class) in idx.classes.iter().enumerate() {
        for s in [class.mask, full_mask(n) & !class.mask] {
            let has = |bit: u16| s & bit != 0;
            if has(a) && has(b) && !has(c) && !has(d) {
                v[pos] += 1;
            }
            if has(a) && has(c) && !has(b) && !has(d) {
                v[pos] -= 1;
            }
        }
    }
    Ok(v)
}

/// Quadruples behind the printed generator lists: `(1,2,3,k), (1,2,k,3)` for
/// `k = 4..=n`, then `(1,2,j,k)` for `4 <= j < k <= n`.
fn printed_quadruples(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for k in 4..=n {
        out.push([1, 2, 3, k]);
        out.push([1, 2, k, 3]);
    }
    for j in 4..=n {
        for k in j + 1..=n {
            out.push([1, 2, j, k]);
        }
    }
    out
}

/// A basis of `V_n` made of Keel relations, as integer vectors in ambient
/// coordinates. For `n <= 6` this is the printed generator list; from `n = 7`
/// on, the first seven printed generators are completed by a lexicographic
/// scan over all quadruples that keeps every rank-increasing relation.
pub fn relation_basis(idx: &AmbientIndex) -> Vec<Vec<i64>> {
    let n = idx.n;
    let m = relation_dim(n);
    let mut seed = printed_quadruples(n);
    if n >= 7 {
        seed.truncate(7);
    }
    let mut ech = EchelonBasis::new();
    let mut out = Vec::with_capacity(m);
    let scan = seed.into_iter().chain(all_quadruples(n));
    for quad in scan {
        if out.len() == m {
            break;
        }
        let v = keel_relation(idx, quad).expect("quadruple labels are valid");
        if ech.insert_int(&v) {
            out.push(v);
        }
    }
    assert_eq!(out.len(), m, "Keel relations must span a space of dimension n(n-3)/2");
    out
}

fn all_quadruples(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (1..=n).flat_map(move |a| {
        (1..=n).flat_map(move |b| {
            (1..=n).flat_map(move |c| {
                (1..=n)
                    .map(move |d| [a, b, c, d])
                    .filter(|q| q[0] != q[1] && q[0] != q[2] && q[0] != q[3])
                    .filter(|q| q[1] != q[2] && q[1] != q[3] && q[2] != q[3])
            })
        })
    })
}

/// Every Keel relation (one per ordered quadruple, duplicates included).
pub fn all_keel_relations(idx: &AmbientIndex) -> Vec<Vec<i64>> {
    all_quadruples(idx.n)
        .map(|q| keel_relation(idx, q).expect("valid quadruple"))
        .collect()
}

/// A partition of `{1..n}` into four nonempty blocks, blocks sorted by
/// their minimum element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition4 {
    blocks: [u16; 4],
}

impl Partition4 {
    pub fn new(n: usize, blocks: [&[usize]; 4]) -> Result<Self> {
        check_n(n)?;
        let mut masks = [0u16; 4];
        for (m, block) in masks.iter_mut().zip(blocks) {
            for &l in block {
                if l == 0 || l > n {
                    return Err(Error::LabelOutOfRange { n, label: l });
                }
                *m |= label_bit(l);
            }
        }
        let union = masks.iter().fold(0u16, |a, &b| a | b);
        let total: u32 = masks.iter().map(|m| m.count_ones()).sum();
        if masks.contains(&0) || union != full_mask(n) || total as usize != n {
            return Err(Error::Invalid("blocks must partition 1..n into 4 nonempty parts".into()));
        }
        masks.sort_by_key(|m| m.trailing_zeros());
        Ok(Partition4 { blocks: masks })
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|&m| members_of(m).collect()).collect()
    }

    /// `w_{I∪J} + w_{I∪K} + w_{I∪L} − w_I − w_J − w_K − w_L`; singleton blocks
    /// carry no coordinate.
    pub fn fnef_form(&self, idx: &AmbientIndex) -> Vec<i64> {
        self.fnef_form_with_first(idx, 0)
    }

    fn fnef_form_with_first(&self, idx: &AmbientIndex, first: usize) -> Vec<i64> {
        let mut v = vec![0i64; idx.dim()];
        let i = self.blocks[first];
        for (k, &b) in self.blocks.iter().enumerate() {
            if k != first {
                let p = idx.position_of_mask(i | b).expect("union of two blocks is a boundary class");
                v[p] += 1;
            }
            if b.count_ones() >= 2 {
                let p = idx.position_of_mask(b).expect("block of size >= 2 is a boundary class");
                v[p] -= 1;
            }
        }
        v
    }
}

/// All set partitions of `{1..n}` into exactly four blocks.
pub fn partitions4(n: usize) -> Result<Vec<Partition4>> {
    check_n(n)?;
    let mut out = Vec::new();
    // Restricted growth strings with maximum block index 3.
    let mut assign = vec![0usize; n];
    fn rec(pos: usize, used: usize, assign: &mut [usize], out: &mut Vec<Partition4>) {
        let n = assign.len();
        if pos == n {
            if used == 4 {
                let mut blocks = [0u16; 4];
                for (label0, &b) in assign.iter().enumerate() {
                    blocks[b] |= 1 << label0;
                }
                out.push(Partition4 { blocks });
            }
            return;
        }
        if 4 - used > n - pos {
            return;
        }
        for b in 0..=used.min(3) {
            assign[pos] = b;
            rec(pos + 1, used.max(b + 1), assign, out);
        }
    }
    rec(0, 0, &mut assign, &mut out);
    Ok(out)
}

/// One F-nef form per partition into four blocks, in partition order.
pub fn fnef_forms(idx: &AmbientIndex) -> Vec<Vec<i64>> {
    partitions4(idx.n)
        .expect("index was built for a valid n")
        .iter()
        .map(|p| p.fnef_form(idx))
        .collect()
}

/// The recursively defined basis `B_n` of the Picard group, sorted in
/// coordinate order.
pub fn basis_bn(n: usize) -> Result<Vec<BoundaryClass>> {
    check_n(n)?;
    let (all, _) = basis_masks(n);
    let mut out: Vec<BoundaryClass> = all
        .into_iter()
        .map(|m| canonical_mask(n, m).expect("basis subsets are boundary classes"))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Returns the basis at level `n` and the part new at level `n` as raw
/// subsets of `{1..n-1}`. Elements of a lower level keep their subset when
/// lifted; only the final level is canonicalized.
fn basis_masks(n: usize) -> (Vec<u16>, Vec<u16>) {
    if n == 4 {
        let b = label_bit(2) | label_bit(3);
        return (vec![b], vec![b]);
    }
    let (mut all, prev_new) = basis_masks(n - 1);
    let mut new = Vec::new();
    let pair = label_bit(n - 2) | label_bit(n - 1);
    for m in 0..=full_mask(n - 1) {
        let size = m.count_ones() as usize;
        if m & pair == pair && size + 2 <= n {
            new.push(m);
        }
    }
    for &b in &prev_new {
        new.push(full_mask(n - 1) & !b);
    }
    all.extend_from_slice(&new);
    (all, new)
}

/// Expansion of every class in a basis of a complement of `V_n`.
#[derive(Clone, Debug)]
pub struct QuotientCoordinates {
    basis: Vec<BoundaryClass>,
    /// Indexed by ambient coordinate; each row has one entry per basis class.
    coords: Vec<Vec<Rat>>,
}

impl QuotientCoordinates {
    pub fn basis(&self) -> &[BoundaryClass] {
        &self.basis
    }

    pub fn of_position(&self, pos: usize) -> &[Rat] {
        &self.coords[pos]
    }

    pub fn of(&self, idx: &AmbientIndex, class: &BoundaryClass) -> Option<&[Rat]> {
        idx.position(class).map(|p| self.coords[p].as_slice())
    }

    /// Projects an ambient vector to basis coordinates (modulo `V_n`).
    pub fn project(&self, v: &[Rat]) -> Vec<Rat> {
        let k = self.basis.len();
        let mut out = vec![Rat::zero(); k];
        for (x, row) in v.iter().zip(&self.coords) {
            if x.is_zero() {
                continue;
            }
            for (o, e) in out.iter_mut().zip(row) {
                *o += x * e;
            }
        }
        out
    }
}

/// Checks that `basis` spans a complement of `V_n` and expands every class
/// `δ_S` in it.
pub fn quotient_coordinates(
    idx: &AmbientIndex,
    relations: &[Vec<i64>],
    basis: &[BoundaryClass],
) -> Result<QuotientCoordinates> {
    let n_amb = idx.dim();
    let needed = quotient_dim(idx.n);
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(n_amb);
    for b in basis {
        if idx.position(b).is_none() {
            return Err(Error::Invalid(format!("{b} is not a class of M_0,{}", idx.n)));
        }
        rows.push(idx.unit(b));
    }
    rows.extend(relations.iter().cloned());
    let mat = Mat::from_int_rows(n_amb, &rows)?;
    let r = exactla::rank(&mat);
    if basis.len() != needed || r != n_amb {
        return Err(Error::NotComplement {
            rank: r.saturating_sub(relations.len()),
            needed,
        });
    }
    let targets: Vec<Vec<Rat>> = (0..n_amb)
        .map(|p| {
            let mut t = vec![Rat::zero(); n_amb];
            t[p] = rat(1);
            t
        })
        .collect();
    let sols = exactla::solve_many_in_span(&mat, &targets)?;
    let coords = sols
        .into_iter()
        .map(|s| {
            let mut s = s.expect("rows span the ambient space");
            s.truncate(basis.len());
            s
        })
        .collect();
    Ok(QuotientCoordinates {
        basis: basis.to_vec(),
        coords,
    })
}
