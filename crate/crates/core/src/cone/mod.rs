//! Homogeneous polyhedral cones in H-representation.
//!
//! A [`ConeH`] is a list of integer forms `H`, each read as `H(x) >= 0`.
//! Minkowski sums with a line or a ray eliminate the translation parameter:
//! forms that vanish on the new direction survive, and every pair with
//! opposite signs is combined so the direction cancels.
//!
//! Cones built from known generators (orthants, [`ConeH::from_generators`])
//! carry them along. Their sums are computed by a double-description step
//! whose output is already facet-minimal. Cones without generators fall back
//! to full pairwise elimination followed by LP-based [`ConeH::facet_reduce`].

mod dd;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactla::{self, dot_rat_int, Mat, Rat};
use crate::lp;
use crate::moduli::{AmbientIndex, BoundaryClass};

pub use dd::ElimCounts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AmbientKind {
    /// One coordinate per boundary class.
    Full,
    /// One coordinate per element of a basis of a complement to the
    /// relations.
    Basis,
    /// Unlabelled coordinates.
    Plain,
}

impl AmbientKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AmbientKind::Full => "full",
            AmbientKind::Basis => "basis",
            AmbientKind::Plain => "plain",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(AmbientKind::Full),
            "basis" => Ok(AmbientKind::Basis),
            "plain" => Ok(AmbientKind::Plain),
            _ => Err(Error::Invalid(format!("unknown ambient kind {s:?}"))),
        }
    }
}

/// Ordered coordinate labels shared by every cone living in one space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ambient {
    n: Option<usize>,
    kind: AmbientKind,
    labels: Vec<String>,
}

impl Ambient {
    pub fn new(n: Option<usize>, kind: AmbientKind, labels: Vec<String>) -> Arc<Self> {
        Arc::new(Ambient { n, kind, labels })
    }

    pub fn full(idx: &AmbientIndex) -> Arc<Self> {
        Self::new(
            Some(idx.n()),
            AmbientKind::Full,
            idx.classes().iter().map(BoundaryClass::label).collect(),
        )
    }

    pub fn basis(n: usize, basis: &[BoundaryClass]) -> Arc<Self> {
        Self::new(
            Some(n),
            AmbientKind::Basis,
            basis.iter().map(BoundaryClass::label).collect(),
        )
    }

    pub fn plain(dim: usize) -> Arc<Self> {
        Self::new(None, AmbientKind::Plain, (0..dim).map(|i| format!("x{i}")).collect())
    }

    pub fn n(&self) -> Option<usize> {
        self.n
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self, i: usize) -> Vec<i64> {
        let mut e = vec![0; self.dim()];
        e[i] = 1;
        e
    }
}

/// A nonzero integer form with content one. The sign is never changed by
/// normalization.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinForm(Vec<i64>);

impl LinForm {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        let g = coeffs.iter().fold(0i64, |acc, x| acc.gcd(x));
        if g == 0 {
            return Err(Error::ZeroVector);
        }
        if g == 1 {
            return Ok(LinForm(coeffs));
        }
        Ok(LinForm(coeffs.into_iter().map(|x| x / g).collect()))
    }

    pub fn from_rats(coeffs: &[Rat]) -> Result<Self> {
        Self::new(exactla::integer_direction_i64(coeffs)?)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn eval(&self, x: &[i64]) -> i128 {
        dd::eval(&self.0, x)
    }

    pub fn eval_rat(&self, x: &[Rat]) -> Rat {
        dot_rat_int(x, &self.0)
    }

    pub fn into_coeffs(self) -> Vec<i64> {
        self.0
    }

    /// Human-readable form over coordinate labels, e.g. `w{1,2}+w{1,3}`.
    pub fn render(&self, labels: &[String]) -> String {
        let mut out = String::new();
        for (c, l) in self.0.iter().zip(labels) {
            match *c {
                0 => continue,
                1 if out.is_empty() => {}
                1 => out.push('+'),
                -1 => out.push('-'),
                c if c > 0 && !out.is_empty() => out.push_str(&format!("+{c}")),
                c => out.push_str(&c.to_string()),
            }
            out.push_str(&format!("w{{{l}}}"));
        }
        out
    }
}

impl fmt::Debug for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Generators of a cone: `cone(rays) + span(lines)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Generators {
    pub rays: Vec<Vec<i64>>,
    pub lines: Vec<Vec<i64>>,
}

impl Generators {
    fn all(&self) -> Vec<&[i64]> {
        self.rays
            .iter()
            .chain(&self.lines)
            .map(Vec::as_slice)
            .collect()
    }

    fn len(&self) -> usize {
        self.rays.len() + self.lines.len()
    }
}

/// Polyhedral cone `{x : H(x) >= 0 for every form H}`.
///
/// Forms are kept sorted in descending lexicographic order without
/// repetitions, so two cones with the same form set compare equal.
#[derive(Clone)]
pub struct ConeH {
    ambient: Arc<Ambient>,
    forms: Vec<LinForm>,
    gens: Option<Generators>,
}

impl PartialEq for ConeH {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.forms == other.forms
    }
}

impl Eq for ConeH {}

impl fmt::Debug for ConeH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConeH")
            .field("dim", &self.dim())
            .field("forms", &self.forms.len())
            .field("generators", &self.gens.as_ref().map(Generators::len))
            .finish()
    }
}

fn canonical(mut forms: Vec<LinForm>) -> Vec<LinForm> {
    forms.par_sort_unstable_by(|a, b| b.cmp(a));
    forms.dedup();
    forms
}

fn check_dim(expected: usize, v: &[i64]) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: v.len(),
        });
    }
    Ok(())
}

impl ConeH {
    /// Normalizes and deduplicates; zero forms are dropped.
    pub fn new(ambient: Arc<Ambient>, forms: Vec<Vec<i64>>) -> Result<Self> {
        let d = ambient.dim();
        let mut out = Vec::with_capacity(forms.len());
        for f in forms {
            check_dim(d, &f)?;
            match LinForm::new(f) {
                Ok(h) => out.push(h),
                Err(Error::ZeroVector) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(ConeH {
            ambient,
            forms: canonical(out),
            gens: None,
        })
    }

    fn from_forms(ambient: Arc<Ambient>, forms: Vec<LinForm>, gens: Option<Generators>) -> Self {
        ConeH {
            ambient,
            forms: canonical(forms),
            gens,
        }
    }

    pub fn positive_orthant(ambient: Arc<Ambient>) -> Self {
        let d = ambient.dim();
        let units: Vec<Vec<i64>> = (0..d).map(|i| ambient.unit(i)).collect();
        let forms = units.iter().cloned().map(LinForm).collect();
        Self::from_forms(
            ambient,
            forms,
            Some(Generators {
                rays: units,
                lines: Vec::new(),
            }),
        )
    }

    /// The cone `cone(rays) + span(lines)`, which must be full-dimensional.
    pub fn from_generators(ambient: Arc<Ambient>, rays: &[Vec<i64>], lines: &[Vec<i64>]) -> Result<Self> {
        let d = ambient.dim();
        for v in rays.iter().chain(lines) {
            check_dim(d, v)?;
        }
        let mut echelon = exactla::EchelonBasis::new();
        let mut start: Vec<Vec<i64>> = Vec::new();
        let mut used = vec![false; rays.len() + lines.len()];
        for (i, v) in rays.iter().chain(lines).enumerate() {
            if echelon.insert_int(v) {
                start.push(v.clone());
                used[i] = true;
            }
        }
        if start.len() < d {
            return Err(Error::NotFullDimensional {
                rank: start.len(),
                dim: d,
            });
        }
        // Facets of the simplicial cone are the columns of the inverse.
        let g = Mat::from_int_rows(d, &start)?;
        let inv = invert(&g);
        let mut forms = Vec::with_capacity(d);
        for c in 0..d {
            let col: Vec<Rat> = (0..d).map(|r| inv[(r, c)].clone()).collect();
            forms.push(LinForm::from_rats(&col)?);
        }
        let mut cone = Self::from_forms(
            ambient,
            forms,
            Some(Generators {
                rays: start,
                lines: Vec::new(),
            }),
        );
        for (i, r) in rays.iter().enumerate() {
            if !used[i] {
                cone = cone.sum_ray(r)?;
            }
        }
        for l in lines {
            cone = cone.sum_line(l)?;
        }
        Ok(cone)
    }

    /// Attaches generators to a cone whose forms are all of its facets.
    /// Checked: the generators span the space, satisfy every form, and each
    /// form vanishes on a hyperplane's worth of them.
    pub fn with_generators(self, gens: Generators) -> Result<Self> {
        let d = self.dim();
        let all = gens.all();
        for v in &all {
            check_dim(d, v)?;
        }
        let rank = dd::int_rank(&all);
        if rank < d {
            return Err(Error::NotFullDimensional { rank, dim: d });
        }
        let bad = |msg: &str| Err(Error::Invalid(format!("generators do not match forms: {msg}")));
        let ok = self.forms.par_iter().all(|h| {
            gens.rays.iter().all(|r| h.eval(r) >= 0) && gens.lines.iter().all(|l| h.eval(l) == 0)
        });
        if !ok {
            return bad("a generator violates a form");
        }
        let facets = self.forms.par_iter().all(|h| {
            let tight: Vec<&[i64]> = all.iter().copied().filter(|v| h.eval(v) == 0).collect();
            dd::int_rank(&tight) == d - 1
        });
        if !facets {
            return bad("a form is not a facet");
        }
        Ok(ConeH {
            gens: Some(gens),
            ..self
        })
    }

    pub fn ambient(&self) -> &Arc<Ambient> {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn forms(&self) -> &[LinForm] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn generators(&self) -> Option<&Generators> {
        self.gens.as_ref()
    }

    pub fn without_generators(mut self) -> Self {
        self.gens = None;
        self
    }

    pub fn contains_point(&self, x: &[Rat]) -> bool {
        x.len() == self.dim() && self.forms.iter().all(|h| !h.eval_rat(x).is_negative())
    }

    pub fn contains_int_point(&self, x: &[i64]) -> bool {
        x.len() == self.dim() && self.forms.iter().all(|h| h.eval(x) >= 0)
    }

    /// `self + ℚ·v`.
    pub fn sum_line(&self, v: &[i64]) -> Result<ConeH> {
        self.sum_line_counted(v).map(|(c, _)| c)
    }

    /// `self + ℚ≥0·r`.
    pub fn sum_ray(&self, r: &[i64]) -> Result<ConeH> {
        self.sum_ray_counted(r).map(|(c, _)| c)
    }

    pub fn sum_line_counted(&self, v: &[i64]) -> Result<(ConeH, ElimCounts)> {
        self.enlarge(v, true)
    }

    pub fn sum_ray_counted(&self, r: &[i64]) -> Result<(ConeH, ElimCounts)> {
        self.enlarge(r, false)
    }

    fn enlarge(&self, v: &[i64], line: bool) -> Result<(ConeH, ElimCounts)> {
        check_dim(self.dim(), v)?;
        if v.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        let dd_ok = self.gens.as_ref().is_some_and(|g| g.len() < dd::MAX_GENERATORS);
        if dd_ok {
            let gens = self.gens.as_ref().expect("checked above");
            let forms: Vec<Vec<i64>> = self.forms.iter().map(|h| h.0.clone()).collect();
            let (next, counts) = dd::step(self.dim(), &forms, &gens.all(), v, line)?;
            let mut gens = gens.clone();
            if line {
                gens.lines.push(v.to_vec());
            } else {
                gens.rays.push(v.to_vec());
            }
            let forms = next.into_iter().map(LinForm).collect();
            return Ok((Self::from_forms(self.ambient.clone(), forms, Some(gens)), counts));
        }
        let (raw, counts) = self.eliminate(v, line)?;
        Ok((raw.facet_reduce()?, counts))
    }

    /// All pairwise combinations, normalized and deduplicated, without any
    /// redundancy removal.
    pub fn eliminate(&self, v: &[i64], line: bool) -> Result<(ConeH, ElimCounts)> {
        check_dim(self.dim(), v)?;
        let signs: Vec<i128> = self.forms.iter().map(|h| h.eval(v)).collect();
        let counts = ElimCounts::from_signs(&signs, line);
        let mut out: Vec<LinForm> = self
            .forms
            .iter()
            .zip(&signs)
            .filter(|(_, &s)| s == 0 || (!line && s > 0))
            .map(|(h, _)| h.clone())
            .collect();
        for (p, &sp) in signs.iter().enumerate().filter(|(_, &s)| s > 0) {
            for (q, &sq) in signs.iter().enumerate().filter(|(_, &s)| s < 0) {
                if let Some(h) = dd::combine(&self.forms[p].0, sp, &self.forms[q].0, sq)? {
                    out.push(LinForm(h));
                }
            }
        }
        Ok((Self::from_forms(self.ambient.clone(), out, None), counts))
    }

    /// Drops every form that is a nonnegative combination of the others.
    ///
    /// A first parallel round tests each form against all others; forms that
    /// survive it are irredundant in every subsystem. The remaining candidates
    /// are then rechecked one at a time, in list order, against the current
    /// survivors.
    pub fn facet_reduce(&self) -> Result<ConeH> {
        let all: Vec<&[i64]> = self.forms.iter().map(|h| h.coeffs()).collect();
        let without = |skip: &dyn Fn(usize) -> bool, i: usize| -> Vec<&[i64]> {
            all.iter()
                .enumerate()
                .filter(|&(j, _)| j != i && !skip(j))
                .map(|(_, h)| *h)
                .collect()
        };
        let redundant: Vec<bool> = (0..all.len())
            .into_par_iter()
            .map(|i| -> Result<bool> {
                let others = without(&|_| false, i);
                Ok(matches!(lp::conic_membership(&others, all[i])?, lp::Membership::Combination(_)))
            })
            .collect::<Result<_>>()?;
        let mut removed = vec![false; all.len()];
        for i in 0..all.len() {
            if !redundant[i] {
                continue;
            }
            let others = without(&|j| removed[j], i);
            if let lp::Membership::Combination(_) = lp::conic_membership(&others, all[i])? {
                removed[i] = true;
            }
        }
        let forms = self
            .forms
            .iter()
            .zip(&removed)
            .filter(|(_, &r)| !r)
            .map(|(h, _)| h.clone())
            .collect();
        Ok(Self::from_forms(self.ambient.clone(), forms, self.gens.clone()))
    }

    /// Sets every coordinate outside `keep` to zero and reads the forms in
    /// the coordinates of `keep`, in the given order. Forms that vanish are
    /// dropped.
    pub fn restrict_to_section(&self, keep: &[usize], ambient: Arc<Ambient>) -> Result<ConeH> {
        if keep.len() != ambient.dim() {
            return Err(Error::DimensionMismatch {
                expected: ambient.dim(),
                found: keep.len(),
            });
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.dim()) {
            return Err(Error::Invalid(format!("coordinate {bad} is outside the ambient space")));
        }
        let forms = self
            .forms
            .iter()
            .map(|h| keep.iter().map(|&k| h.0[k]).collect())
            .collect();
        ConeH::new(ambient, forms)
    }

    /// Forms as a set, for order-independent comparisons.
    pub fn form_set(&self) -> BTreeSet<Vec<i64>> {
        self.forms.iter().map(|h| h.0.clone()).collect()
    }
}

fn invert(g: &Mat) -> Mat {
    let d = g.rows();
    let mut aug = Mat::zeros(d, 2 * d);
    for r in 0..d {
        for c in 0..d {
            aug[(r, c)] = g[(r, c)].clone();
        }
        aug[(r, d + r)] = Rat::from_integer(BigInt::from(1));
    }
    let (red, _) = exactla::rref_limited(&aug, d);
    let mut inv = Mat::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            inv[(r, c)] = red[(r, d + c)].clone();
        }
    }
    inv
}

impl ConeH {
    /// Sum of `self` with `ℚ·v` for a rational direction.
    pub fn sum_line_rat(&self, v: &[Rat]) -> Result<ConeH> {
        let v = exactla::integer_direction_i64(v)?;
        self.sum_line(&v)
    }

    /// Sum of `self` with `ℚ≥0·r` for a rational direction.
    pub fn sum_ray_rat(&self, r: &[Rat]) -> Result<ConeH> {
        let r = exactla::integer_direction_i64(r)?;
        self.sum_ray(&r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::{self, enumerate_classes};

    fn n5() -> (AmbientIndex, Arc<Ambient>) {
        let idx = enumerate_classes(5).unwrap();
        let amb = Ambient::full(&idx);
        (idx, amb)
    }

    #[test]
    fn linform_normalization_keeps_sign() {
        assert_eq!(LinForm::new(vec![-2, 4, 0]).unwrap().coeffs(), &[-1, 2, 0]);
        assert_eq!(LinForm::new(vec![0, 0]), Err(Error::ZeroVector));
    }

    #[test]
    fn orthant_is_sorted_and_irredundant() {
        let (_, amb) = n5();
        let o = ConeH::positive_orthant(amb);
        assert_eq!(o.len(), 10);
        assert_eq!(o.forms()[0].coeffs()[0], 1);
        assert_eq!(o.facet_reduce().unwrap(), o);
    }

    #[test]
    fn scaled_duplicates_collapse() {
        let c = ConeH::new(Ambient::plain(2), vec![vec![1, 1], vec![3, 3], vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn first_line_at_n5_matches_printed_system() {
        let (idx, amb) = n5();
        let o = ConeH::positive_orthant(amb.clone());
        let v1 = moduli::keel_relation(&idx, [1, 2, 3, 4]).unwrap();
        let (e1, counts) = o.sum_line_counted(&v1).unwrap();
        assert_eq!(e1.len(), 10);
        assert_eq!((counts.zero, counts.positive, counts.negative), (6, 2, 2));
        let pos = |l: &str| amb.labels().iter().position(|x| x == l).unwrap();
        let mut pair = vec![0; 10];
        pair[pos("1,2")] = 1;
        pair[pos("1,3")] = 1;
        assert!(e1.form_set().contains(&pair));
        // Same result through full elimination and LP reduction.
        let fm = o.clone().without_generators().sum_line(&v1).unwrap();
        assert_eq!(fm.form_set(), e1.form_set());
    }

    #[test]
    fn n5_facet_sequence() {
        let (idx, amb) = n5();
        let mut c = ConeH::positive_orthant(amb);
        let mut counts = vec![c.len()];
        for v in moduli::relation_basis(&idx) {
            c = c.sum_line(&v).unwrap();
            counts.push(c.len());
        }
        assert_eq!(counts, vec![10, 10, 12, 11, 10, 10]);
    }

    #[test]
    fn lineality_direction_leaves_cone_unchanged() {
        let c = ConeH::new(Ambient::plain(3), vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let s = c.sum_line(&[0, 0, 1]).unwrap();
        assert_eq!(s, c);
        assert_eq!(c.sum_ray(&[0, 0, 0]).unwrap_err(), Error::ZeroVector);
    }

    #[test]
    fn absorbing_member_ray() {
        let o = ConeH::positive_orthant(Ambient::plain(3));
        assert_eq!(o.sum_ray(&[1, 2, 3]).unwrap(), o);
    }

    #[test]
    fn from_generators_simplex_and_extra_rays() {
        let amb = Ambient::plain(3);
        let rays = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]];
        let c = ConeH::from_generators(amb.clone(), &rays, &[]).unwrap();
        for r in &rays {
            assert!(c.contains_int_point(r));
        }
        let plain = ConeH::new(amb.clone(), c.forms().iter().map(|h| h.coeffs().to_vec()).collect()).unwrap();
        assert_eq!(plain.facet_reduce().unwrap(), c);
        let re = ConeH::new(amb, c.forms().iter().map(|h| h.coeffs().to_vec()).collect())
            .unwrap()
            .with_generators(c.generators().unwrap().clone())
            .unwrap();
        assert_eq!(re, c);
        assert!(ConeH::from_generators(Ambient::plain(3), &rays[..2], &[]).is_err());
    }

    #[test]
    fn with_generators_rejects_non_facets() {
        let amb = Ambient::plain(2);
        let c = ConeH::new(amb, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let gens = Generators {
            rays: vec![vec![1, 0], vec![0, 1]],
            lines: vec![],
        };
        assert!(c.with_generators(gens).is_err());
    }

    #[test]
    fn restriction_substitutes_zero() {
        let c = ConeH::new(Ambient::plain(3), vec![vec![1, -1, 0], vec![0, 0, 1], vec![2, 0, 5]]).unwrap();
        let r = c.restrict_to_section(&[0, 1], Ambient::plain(2)).unwrap();
        assert_eq!(r.form_set(), BTreeSet::from([vec![1, -1], vec![1, 0]]));
        let id = c.restrict_to_section(&[0, 1, 2], Ambient::plain(3)).unwrap();
        assert_eq!(id, c);
    }
}
