use std::sync::Arc;

use crate::cone::ConeH;
use crate::error::{Error, Result};
use crate::lp::{self, FarkasCertificate};

use super::{Filtration, FiltrationReport, Mode, Order, Outcome, Setup};

/// Which containment the bundle proves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formulation {
    /// `F_n ⊆ O_n + V_n` in `W_n`.
    Ambient,
    /// `F̄_n ⊆ Ē_n^(k)` in basis coordinates.
    Quotient,
}

impl Formulation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Formulation::Ambient => "ambient",
            Formulation::Quotient => "quotient",
        }
    }
}

/// A containment proof: for every form of `outer`, a certificate over the
/// forms of `inner`.
#[derive(Clone, Debug)]
pub struct ProofBundle {
    pub n: usize,
    pub formulation: Formulation,
    pub report: FiltrationReport,
    pub inner: ConeH,
    pub outer: ConeH,
    pub proven: bool,
    /// Empty unless `proven`.
    pub certificates: Vec<FarkasCertificate>,
}

impl ProofBundle {
    /// Arithmetic-only recheck of every certificate against both cones.
    pub fn verify(&self) -> bool {
        self.proven
            && self.certificates.len() == self.outer.len()
            && self
                .certificates
                .iter()
                .zip(self.outer.forms())
                .all(|(c, h)| c.target == h.coeffs() && lp::verify_certificate(&self.inner, c))
    }
}

/// Runs the filtration for `n ∈ {5, 6, 7}` until the F-nef cone is contained
/// and collects one certificate per facet of the final cone.
///
/// At `n = 5` the ambient route is used (the full cone `O_5 + V_5`); at
/// `n = 6, 7` the quotient route with the published generator order, stopped
/// as soon as `Γ = 0`.
pub fn verify_theorem(n: usize) -> Result<ProofBundle> {
    let (mode, formulation) = match n {
        5 => (Mode::Ambient, Formulation::Ambient),
        6 | 7 => (Mode::Quotient, Formulation::Quotient),
        _ => return Err(Error::Invalid(format!("containment proofs are provided for n = 5, 6, 7, not {n}"))),
    };
    let setup = Arc::new(match mode {
        Mode::Ambient => Setup::ambient(n)?,
        Mode::Quotient => Setup::quotient(n, None)?,
    });
    let order = setup.paper_order()?;
    let mut f = Filtration::start(setup.clone())?;
    for label in &order {
        if mode == Mode::Quotient && f.last().gamma == 0 {
            break;
        }
        let cand = setup.candidate(label)?.clone();
        f.advance(&cand)?;
    }
    let proven = f.last().gamma == 0;
    let outcome = if proven {
        Outcome::Contained
    } else {
        Outcome::Exhausted
    };
    let certificates = f.certificates()?.unwrap_or_default();
    Ok(ProofBundle {
        n,
        formulation,
        report: f.report(outcome),
        inner: setup.inner.clone(),
        outer: f.cone().clone(),
        proven,
        certificates,
    })
}

/// Same as [`verify_theorem`] but with an explicit order, for experiments.
pub fn prove_with_order(setup: Arc<Setup>, order: &Order, max_steps: usize) -> Result<ProofBundle> {
    let formulation = match setup.mode {
        Mode::Ambient => Formulation::Ambient,
        Mode::Quotient => Formulation::Quotient,
    };
    let mut f = Filtration::start(setup.clone())?;
    let outcome = f.run(order, max_steps)?;
    let proven = f.last().gamma == 0;
    let certificates = f.certificates()?.unwrap_or_default();
    Ok(ProofBundle {
        n: setup.n,
        formulation,
        report: f.report(outcome),
        inner: setup.inner.clone(),
        outer: f.cone().clone(),
        proven,
        certificates,
    })
}
