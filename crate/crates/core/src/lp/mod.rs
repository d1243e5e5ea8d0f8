//! Exact linear programming over H-cones.
//!
//! For a homogeneous cone `C = {x : L_k(x) >= 0}` the minimum of a linear
//! form `H` over `C` is either `0` or `-∞`. It is `0` exactly when `H` is a
//! nonnegative combination of the `L_k` (Farkas), so every question here is
//! reduced to one conic-membership solve, and both outcomes come back with a
//! witness that can be checked by plain arithmetic:
//!
//! - bounded: multipliers `λ >= 0` with `Σ λ_k L_k = H`;
//! - unbounded: a point `x` with every `L_k(x) >= 0` and `H(x) < 0`.

mod simplex;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::cone::ConeH;
use crate::error::{Error, Result};
use crate::exactla::{self, dot_rat_int, rat, Mat, Rat};

use simplex::RawOutcome;

/// Nonnegative multipliers expressing `target` over the forms of a cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub target: Vec<i64>,
    /// `(form index, multiplier)`, indices increasing, multipliers positive.
    pub support: Vec<(usize, Rat)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundednessVerdict {
    Bounded(FarkasCertificate),
    /// A point of the cone on which the target is negative.
    Unbounded { point: Vec<Rat> },
}

impl BoundednessVerdict {
    pub fn is_bounded(&self) -> bool {
        matches!(self, BoundednessVerdict::Bounded(_))
    }

    pub fn certificate(&self) -> Option<&FarkasCertificate> {
        match self {
            BoundednessVerdict::Bounded(c) => Some(c),
            BoundednessVerdict::Unbounded { .. } => None,
        }
    }

    /// Re-checks the witness against the cone by direct evaluation.
    pub fn recheck(&self, cone: &ConeH, target: &[i64]) -> bool {
        match self {
            BoundednessVerdict::Bounded(cert) => cert.target == target && verify_certificate(cone, cert),
            BoundednessVerdict::Unbounded { point } => {
                point.len() == cone.dim()
                    && cone.forms().iter().all(|f| !dot_rat_int(point, f.coeffs()).is_negative())
                    && dot_rat_int(point, target).is_negative()
            }
        }
    }
}

/// Outcome of a conic-membership question.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Nonnegative weights, one per column.
    Combination(Vec<Rat>),
    /// `x` with `columnᵀx >= 0` for every column and `targetᵀx < 0`.
    Separated(Vec<Rat>),
}

/// Decides whether `target` lies in the conical hull of `columns`.
pub fn conic_membership(columns: &[&[i64]], target: &[i64]) -> Result<Membership> {
    for c in columns {
        if c.len() != target.len() {
            return Err(Error::DimensionMismatch {
                expected: target.len(),
                found: c.len(),
            });
        }
    }
    Ok(match simplex::solve_exact(columns, target) {
        RawOutcome::Feasible { denom, numerators } => Membership::Combination(
            numerators
                .into_iter()
                .map(|num| Rat::new(num, denom.clone()))
                .collect(),
        ),
        RawOutcome::Infeasible { separator } => {
            Membership::Separated(separator.into_iter().map(Rat::from_integer).collect())
        }
    })
}

/// Reusable boundedness oracle for one cone.
///
/// Precomputes the lineality space of the cone: a target that is not
/// orthogonal to it is unbounded along a lineality direction, which settles
/// most targets without running the simplex.
pub struct ConeSolver<'a> {
    cone: &'a ConeH,
    columns: Vec<&'a [i64]>,
    lineality: Vec<Vec<i64>>,
}

impl<'a> ConeSolver<'a> {
    pub fn new(cone: &'a ConeH) -> Self {
        let columns: Vec<&[i64]> = cone.forms().iter().map(|f| f.coeffs()).collect();
        let lineality = if columns.is_empty() {
            // The whole space; unit vectors span it.
            (0..cone.dim())
                .map(|i| {
                    let mut e = vec![0; cone.dim()];
                    e[i] = 1;
                    e
                })
                .collect()
        } else {
            let m = Mat::from_int_rows(cone.dim(), &columns).expect("forms share the ambient dimension");
            exactla::nullspace(&m)
                .iter()
                .filter_map(|z| exactla::integer_direction_i64(z).ok())
                .collect()
        };
        ConeSolver {
            cone,
            columns,
            lineality,
        }
    }

    pub fn cone(&self) -> &ConeH {
        self.cone
    }

    pub fn min_over(&self, target: &[i64]) -> Result<BoundednessVerdict> {
        if target.len() != self.cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.cone.dim(),
                found: target.len(),
            });
        }
        for z in &self.lineality {
            let s: i128 = z.iter().zip(target).map(|(&a, &b)| a as i128 * b as i128).sum();
            if s != 0 {
                let sign = if s > 0 { -1 } else { 1 };
                return Ok(BoundednessVerdict::Unbounded {
                    point: z.iter().map(|&a| rat(sign * a)).collect(),
                });
            }
        }
        Ok(match conic_membership(&self.columns, target)? {
            Membership::Combination(weights) => BoundednessVerdict::Bounded(FarkasCertificate {
                target: target.to_vec(),
                support: weights
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .collect(),
            }),
            Membership::Separated(point) => BoundednessVerdict::Unbounded { point },
        })
    }
}

/// Minimum of `target` over the cone: bounded (zero) or unbounded, with a
/// witness either way.
pub fn min_over_cone(cone: &ConeH, target: &[i64]) -> Result<BoundednessVerdict> {
    ConeSolver::new(cone).min_over(target)
}

/// Containment index of `inner` in `outer`, with the verdict for every
/// outer form.
#[derive(Clone, Debug)]
pub struct ContainmentIndex {
    pub gamma: usize,
    /// Outer form indices whose minimum over `inner` is `-∞`.
    pub violated: Vec<usize>,
    pub verdicts: Vec<BoundednessVerdict>,
}

fn check_same_ambient(inner: &ConeH, outer: &ConeH) -> Result<()> {
    if inner.dim() != outer.dim() {
        return Err(Error::DimensionMismatch {
            expected: inner.dim(),
            found: outer.dim(),
        });
    }
    Ok(())
}

pub fn containment_index(inner: &ConeH, outer: &ConeH) -> Result<ContainmentIndex> {
    check_same_ambient(inner, outer)?;
    let solver = ConeSolver::new(inner);
    containment_index_with(&solver, outer)
}

/// [`containment_index`] against a prepared solver for the inner cone.
pub fn containment_index_with(solver: &ConeSolver<'_>, outer: &ConeH) -> Result<ContainmentIndex> {
    check_same_ambient(solver.cone(), outer)?;
    let verdicts = outer
        .forms()
        .par_iter()
        .map(|h| solver.min_over(h.coeffs()))
        .collect::<Result<Vec<_>>>()?;
    let violated: Vec<usize> = verdicts
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_bounded())
        .map(|(i, _)| i)
        .collect();
    Ok(ContainmentIndex {
        gamma: violated.len(),
        violated,
        verdicts,
    })
}

/// Pure-arithmetic audit: multipliers are nonnegative, indices are valid and
/// the combination reproduces the target exactly.
pub fn verify_certificate(cone: &ConeH, cert: &FarkasCertificate) -> bool {
    let forms: Vec<&[i64]> = cone.forms().iter().map(|f| f.coeffs()).collect();
    verify_combination(&forms, cert)
}

/// [`verify_certificate`] over raw integer forms.
pub fn verify_combination(forms: &[&[i64]], cert: &FarkasCertificate) -> bool {
    let d = cert.target.len();
    let mut acc = vec![Rat::zero(); d];
    for (idx, mult) in &cert.support {
        if mult.is_negative() {
            return false;
        }
        let Some(form) = forms.get(*idx) else {
            return false;
        };
        if form.len() != d {
            return false;
        }
        for (a, &c) in acc.iter_mut().zip(form.iter()) {
            if c != 0 {
                *a += mult * Rat::from_integer(BigInt::from(c));
            }
        }
    }
    acc.iter()
        .zip(&cert.target)
        .all(|(a, &t)| *a == Rat::from_integer(BigInt::from(t)))
}

/// A containment decision; when contained, one certificate per outer form.
#[derive(Clone, Debug)]
pub struct ContainmentProof {
    pub contained: bool,
    pub violated: Vec<usize>,
    pub certificates: Vec<FarkasCertificate>,
}

pub fn contains(inner: &ConeH, outer: &ConeH) -> Result<ContainmentProof> {
    let idx = containment_index(inner, outer)?;
    Ok(proof_from_index(idx))
}

pub fn proof_from_index(idx: ContainmentIndex) -> ContainmentProof {
    let contained = idx.gamma == 0;
    let certificates = if contained {
        idx.verdicts
            .into_iter()
            .map(|v| match v {
                BoundednessVerdict::Bounded(c) => c,
                BoundednessVerdict::Unbounded { .. } => unreachable!("gamma is zero"),
            })
            .collect()
    } else {
        Vec::new()
    };
    ContainmentProof {
        contained,
        violated: idx.violated,
        certificates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{Ambient, ConeH};

    fn plain(d: usize, forms: &[&[i64]]) -> ConeH {
        ConeH::new(Ambient::plain(d), forms.iter().map(|f| f.to_vec()).collect()).unwrap()
    }

    #[test]
    fn orthant_bounded_and_unbounded() {
        let c = ConeH::positive_orthant(Ambient::plain(3));
        let v = min_over_cone(&c, &[1, 0, 0]).unwrap();
        let cert = v.certificate().unwrap();
        assert_eq!(cert.support, vec![(0, rat(1))]);
        assert!(v.recheck(&c, &[1, 0, 0]));

        let v = min_over_cone(&c, &[-1, 0, 0]).unwrap();
        match &v {
            BoundednessVerdict::Unbounded { point } => {
                assert!(point[0].is_positive());
                assert!(point[1].is_zero() && point[2].is_zero());
            }
            _ => panic!("expected unbounded"),
        }
        assert!(v.recheck(&c, &[-1, 0, 0]));
    }

    #[test]
    fn lineality_shortcut_gives_valid_witness() {
        // x >= 0 in R^2: the y axis is a line of the cone.
        let c = plain(2, &[&[1, 0]]);
        let v = min_over_cone(&c, &[0, 1]).unwrap();
        assert!(!v.is_bounded());
        assert!(v.recheck(&c, &[0, 1]));
        assert!(min_over_cone(&c, &[1]).is_err());
    }

    #[test]
    fn self_containment_has_index_zero() {
        let c = plain(3, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1], &[1, 1, 1]]);
        let idx = containment_index(&c, &c).unwrap();
        assert_eq!(idx.gamma, 0);
        let proof = contains(&c, &c).unwrap();
        assert!(proof.contained);
        assert_eq!(proof.certificates.len(), c.forms().len());
        assert!(proof.certificates.iter().all(|cert| verify_certificate(&c, cert)));
    }

    #[test]
    fn tampered_certificates_fail() {
        let c = plain(3, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        let v = min_over_cone(&c, &[2, 2, 2]).unwrap();
        let cert = v.certificate().unwrap().clone();
        assert!(verify_certificate(&c, &cert));

        let mut neg = cert.clone();
        neg.support[0].1 = -neg.support[0].1.clone();
        assert!(!verify_certificate(&c, &neg));

        let mut off = cert.clone();
        off.target[1] += 1;
        assert!(!verify_certificate(&c, &off));

        let mut oob = cert;
        oob.support.push((99, rat(1)));
        assert!(!verify_certificate(&c, &oob));
    }

    #[test]
    fn scaling_target_keeps_verdict() {
        let inner = plain(2, &[&[1, 0], &[1, 1]]);
        let solver = ConeSolver::new(&inner);
        for (t, bounded) in [([0, 1], false), ([2, 1], true)] {
            for k in [1, 3, 7] {
                let scaled = [t[0] * k, t[1] * k];
                assert_eq!(solver.min_over(&scaled).unwrap().is_bounded(), bounded);
            }
        }
        let outer = plain(2, &[&[0, 1], &[1, 0]]);
        assert_eq!(containment_index(&inner, &outer).unwrap().gamma, 1);
    }
}
