use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactla::{self, dot_rat_int, Mat, Rat};
use crate::lp::{self, Membership};
use crate::moduli::{self, AmbientIndex};

/// `b = a + Σ t_m v_m` with `b >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveRepresentation {
    pub a: Vec<Rat>,
    /// Coefficients over the relation basis.
    pub t: Vec<Rat>,
    pub b: Vec<Rat>,
}

impl EffectiveRepresentation {
    /// Rechecks `b >= 0`, `b = a + Σ t_m v_m`, and that `b − a` lies in the
    /// span of the relations by an independent exact solve.
    pub fn verify(&self, relations: &[Vec<i64>]) -> bool {
        let d = self.a.len();
        if self.b.len() != d || self.t.len() != relations.len() || !exactla::is_nonnegative(&self.b) {
            return false;
        }
        let mut sum = self.a.clone();
        for (t, v) in self.t.iter().zip(relations) {
            if v.len() != d {
                return false;
            }
            for (s, &x) in sum.iter_mut().zip(v) {
                if x != 0 {
                    *s += t * Rat::from_integer(BigInt::from(x));
                }
            }
        }
        if sum != self.b {
            return false;
        }
        let diff: Vec<Rat> = self.b.iter().zip(&self.a).map(|(b, a)| b - a).collect();
        let Ok(m) = Mat::from_int_rows(d, relations) else {
            return false;
        };
        matches!(exactla::solve_in_span(&m, &diff), Ok(Some(_)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EffectiveOutcome {
    Effective(EffectiveRepresentation),
    /// `x >= 0` vanishing on every relation with `a·x < 0`: no element of
    /// `a + V_n` is nonnegative.
    NotEffective { witness: Vec<Rat> },
}

impl EffectiveOutcome {
    pub fn representation(&self) -> Option<&EffectiveRepresentation> {
        match self {
            EffectiveOutcome::Effective(r) => Some(r),
            EffectiveOutcome::NotEffective { .. } => None,
        }
    }
}

/// Checks a non-effectiveness witness by direct evaluation.
pub fn verify_witness(a: &[Rat], relations: &[Vec<i64>], x: &[Rat]) -> bool {
    x.len() == a.len()
        && exactla::is_nonnegative(x)
        && relations.iter().all(|v| dot_rat_int(x, v).is_zero())
        && a.iter().zip(x).fold(Rat::zero(), |acc, (p, q)| acc + p * q).is_negative()
}

/// Finds `t` with `a + Σ t_m v_m >= 0`, solved as conic membership of `a`
/// in `cone(e_S, ±v_m)`.
pub fn effective_representation(n: usize, a: &[Rat]) -> Result<EffectiveOutcome> {
    let idx = moduli::enumerate_classes(n)?;
    let relations = moduli::relation_basis(&idx);
    effective_representation_with(&idx, &relations, a)
}

pub fn effective_representation_with(
    idx: &AmbientIndex,
    relations: &[Vec<i64>],
    a: &[Rat],
) -> Result<EffectiveOutcome> {
    let d = idx.dim();
    if a.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: a.len(),
        });
    }
    let scale = a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let target: Vec<i64> = a
        .iter()
        .map(|x| i64::try_from((x * &scale).to_integer()).map_err(|_| Error::Overflow))
        .collect::<Result<_>>()?;
    let units: Vec<Vec<i64>> = (0..d)
        .map(|i| {
            let mut e = vec![0; d];
            e[i] = 1;
            e
        })
        .collect();
    let negs: Vec<Vec<i64>> = relations.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
    let columns: Vec<&[i64]> = units
        .iter()
        .chain(relations)
        .chain(&negs)
        .map(Vec::as_slice)
        .collect();
    let m = relations.len();
    let scale = Rat::from_integer(scale);
    Ok(match lp::conic_membership(&columns, &target)? {
        Membership::Combination(lambda) => {
            let b = lambda[..d].iter().map(|l| l / &scale).collect();
            let t = (0..m)
                .map(|k| (&lambda[d + m + k] - &lambda[d + k]) / &scale)
                .collect();
            EffectiveOutcome::Effective(EffectiveRepresentation { a: a.to_vec(), t, b })
        }
        Membership::Separated(x) => EffectiveOutcome::NotEffective { witness: x },
    })
}
