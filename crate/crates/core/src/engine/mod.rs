//! Filtrations of cones and end-to-end containment proofs.
//!
//! Two filtrations are supported. In ambient mode the positive orthant of
//! `W_n` is enlarged one Keel relation at a time (as a line) and compared with
//! the F-nef cone `F_n`. In quotient mode everything is read in the
//! coordinates of a basis `B_n`: the orthant is enlarged by classes `δ_S`
//! outside the basis (as rays) and compared with the restricted cone `F̄_n`.

mod effective;
mod proof;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Pow;

use crate::cone::{Ambient, ConeH, ElimCounts, LinForm};
use crate::error::{Error, Result};
use crate::exactla::{self, Rat};
use crate::lp::{self, ConeSolver};
use crate::moduli::{self, AmbientIndex, BoundaryClass, QuotientCoordinates};

pub use effective::{
    effective_representation, effective_representation_with, verify_witness, EffectiveOutcome, EffectiveRepresentation,
};
pub use proof::{prove_with_order, verify_theorem, Formulation, ProofBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Lines in `W_n` against `F_n`.
    Ambient,
    /// Rays in basis coordinates against `F̄_n`.
    Quotient,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Ambient => "ambient-line",
            Mode::Quotient => "quotient-ray",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ambient" | "ambient-line" => Ok(Mode::Ambient),
            "quotient" | "quotient-ray" => Ok(Mode::Quotient),
            _ => Err(Error::Invalid(format!("unknown mode {s:?}"))),
        }
    }
}

/// A direction that can be added to the cone, with a printable name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub label: String,
    pub vector: Vec<i64>,
}

/// Which generators to add, and in what order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Order {
    /// The orders used for the published tables.
    Paper,
    /// Maximal-violation rule, quotient mode only.
    Greedy,
    /// Candidate labels, added in this order.
    Labels(Vec<String>),
    /// Arbitrary directions in the working coordinates.
    Vectors(Vec<Candidate>),
}

/// Quotient-mode addition order of the published n = 6 table.
pub const PAPER_ORDER_6: [&str; 9] = ["1,2,3", "1,2", "1,2,4", "1,3", "1,3,5", "2,4", "3,5", "4,6", "5,6"];
/// Quotient-mode addition order of the published n = 7 table.
pub const PAPER_ORDER_7: [&str; 5] = ["1,2,3", "4,6,7", "1,3,5", "2,4,6", "3,5,7"];

/// Everything a filtration needs that does not change between steps.
#[derive(Clone, Debug)]
pub struct Setup {
    pub n: usize,
    pub mode: Mode,
    pub index: AmbientIndex,
    pub relations: Vec<Vec<i64>>,
    pub ambient: Arc<Ambient>,
    /// `F_n` in ambient mode, `F̄_n` in quotient mode.
    pub inner: ConeH,
    pub quotient: Option<QuotientCoordinates>,
    /// Relations in ambient mode; classes outside the basis in quotient mode,
    /// in class order.
    pub candidates: Vec<Candidate>,
}

impl Setup {
    pub fn ambient(n: usize) -> Result<Self> {
        let index = moduli::enumerate_classes(n)?;
        let relations = moduli::relation_basis(&index);
        let ambient = Ambient::full(&index);
        let inner = ConeH::new(ambient.clone(), moduli::fnef_forms(&index))?;
        let candidates = relations
            .iter()
            .enumerate()
            .map(|(i, v)| Candidate {
                label: format!("v{}", i + 1),
                vector: v.clone(),
            })
            .collect();
        Ok(Setup {
            n,
            mode: Mode::Ambient,
            index,
            relations,
            ambient,
            inner,
            quotient: None,
            candidates,
        })
    }

    /// Quotient setup over `basis`, or over `B_n` when `None`.
    pub fn quotient(n: usize, basis: Option<Vec<BoundaryClass>>) -> Result<Self> {
        let index = moduli::enumerate_classes(n)?;
        let relations = moduli::relation_basis(&index);
        let basis = match basis {
            Some(b) => b,
            None => moduli::basis_bn(n)?,
        };
        let q = moduli::quotient_coordinates(&index, &relations, &basis)?;
        let ambient = Ambient::basis(n, &basis);
        let keep: Vec<usize> = basis
            .iter()
            .map(|b| index.position(b).expect("checked by quotient_coordinates"))
            .collect();
        let full = ConeH::new(Ambient::full(&index), moduli::fnef_forms(&index))?;
        let inner = full.restrict_to_section(&keep, ambient.clone())?;
        let mut candidates = Vec::new();
        for (pos, class) in index.classes().iter().enumerate() {
            if basis.contains(class) {
                continue;
            }
            candidates.push(Candidate {
                label: class.label(),
                vector: exactla::integer_direction_i64(q.of_position(pos))?,
            });
        }
        Ok(Setup {
            n,
            mode: Mode::Quotient,
            index,
            relations,
            ambient,
            inner,
            quotient: Some(q),
            candidates,
        })
    }

    /// The published order for this mode and `n`, as candidate labels.
    pub fn paper_order(&self) -> Result<Vec<String>> {
        match self.mode {
            Mode::Ambient => Ok(self.candidates.iter().map(|c| c.label.clone()).collect()),
            Mode::Quotient => match self.n {
                5 => Ok(Vec::new()),
                6 => Ok(PAPER_ORDER_6.iter().map(|s| s.to_string()).collect()),
                7 => Ok(PAPER_ORDER_7.iter().map(|s| s.to_string()).collect()),
                n => Err(Error::Invalid(format!("no published quotient order for n = {n}"))),
            },
        }
    }

    pub fn candidate(&self, label: &str) -> Result<&Candidate> {
        self.candidates
            .iter()
            .find(|c| c.label == label)
            .ok_or_else(|| Error::Invalid(format!("unknown generator {label:?}")))
    }

    pub fn start_cone(&self) -> ConeH {
        ConeH::positive_orthant(self.ambient.clone())
    }

    /// Default step budget: `2M` in ambient mode, `M` in quotient mode.
    pub fn default_budget(&self) -> usize {
        let m = moduli::relation_dim(self.n);
        match self.mode {
            Mode::Ambient => 2 * m,
            Mode::Quotient => m,
        }
    }
}

/// One row of a filtration table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    /// `None` for the starting orthant.
    pub generator: Option<String>,
    pub counts: Option<ElimCounts>,
    pub facets: usize,
    pub gamma: usize,
    /// Indices of the forms of this step's cone that fail on the inner cone.
    pub violated: Vec<usize>,
    /// How many of the previous step's violated forms the new generator
    /// enlarges.
    pub enlarged: Option<usize>,
}

impl StepRecord {
    /// Inequality count before redundancy removal.
    pub fn raw(&self) -> usize {
        self.counts.map_or(self.facets, |c| c.raw)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The last cone contains the inner cone.
    Contained,
    /// Every requested generator was added and `Γ > 0` remains.
    Exhausted,
    /// The step budget ran out first.
    BudgetExhausted,
    /// No candidate enlarges any violated form.
    DeadEnd,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Contained => "contained",
            Outcome::Exhausted => "generators-exhausted",
            Outcome::BudgetExhausted => "budget-exhausted",
            Outcome::DeadEnd => "greedy-dead-end",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationReport {
    pub n: usize,
    pub mode: Mode,
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
}

impl FiltrationReport {
    pub fn facets(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.facets).collect()
    }

    pub fn gammas(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.gamma).collect()
    }
}

/// Whether `h` is enlarged by the direction `g`.
fn enlarges(mode: Mode, h: &LinForm, g: &[i64]) -> bool {
    let s = h.eval(g);
    match mode {
        Mode::Ambient => s != 0,
        Mode::Quotient => s < 0,
    }
}

/// A filtration in progress.
pub struct Filtration {
    setup: Arc<Setup>,
    cone: ConeH,
    records: Vec<StepRecord>,
    verdicts: Option<Vec<lp::BoundednessVerdict>>,
}

impl Filtration {
    /// Starts from the positive orthant and measures step 0.
    pub fn start(setup: Arc<Setup>) -> Result<Self> {
        let cone = setup.start_cone();
        let idx = lp::containment_index(&setup.inner, &cone)?;
        let record = StepRecord {
            step: 0,
            generator: None,
            counts: None,
            facets: cone.len(),
            gamma: idx.gamma,
            violated: idx.violated,
            enlarged: None,
        };
        Ok(Filtration {
            setup,
            cone,
            records: vec![record],
            verdicts: Some(idx.verdicts),
        })
    }

    /// Continues from a stored state. The cone must carry generators for
    /// further steps to run by double description.
    pub fn resume(setup: Arc<Setup>, cone: ConeH, records: Vec<StepRecord>) -> Result<Self> {
        let last = records
            .last()
            .ok_or_else(|| Error::Invalid("a filtration needs at least one step".into()))?;
        if last.facets != cone.len() || cone.dim() != setup.ambient.dim() {
            return Err(Error::Invalid("stored cone does not match its step record".into()));
        }
        Ok(Filtration {
            setup,
            cone,
            records,
            verdicts: None,
        })
    }

    pub fn setup(&self) -> &Setup {
        &self.setup
    }

    pub fn cone(&self) -> &ConeH {
        &self.cone
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn last(&self) -> &StepRecord {
        self.records.last().expect("never empty")
    }

    pub fn violated_forms(&self) -> Vec<&LinForm> {
        self.last().violated.iter().map(|&i| &self.cone.forms()[i]).collect()
    }

    /// Adds one generator and measures the new cone.
    pub fn advance(&mut self, cand: &Candidate) -> Result<&StepRecord> {
        let mode = self.setup.mode;
        let enlarged = self
            .violated_forms()
            .iter()
            .filter(|h| enlarges(mode, h, &cand.vector))
            .count();
        let (next, counts) = match mode {
            Mode::Ambient => self.cone.sum_line_counted(&cand.vector)?,
            Mode::Quotient => self.cone.sum_ray_counted(&cand.vector)?,
        };
        let idx = lp::containment_index(&self.setup.inner, &next)?;
        self.cone = next;
        self.records.push(StepRecord {
            step: self.records.len(),
            generator: Some(cand.label.clone()),
            counts: Some(counts),
            facets: self.cone.len(),
            gamma: idx.gamma,
            violated: idx.violated,
            enlarged: Some(enlarged),
        });
        self.verdicts = Some(idx.verdicts);
        Ok(self.last())
    }

    /// One certificate per form of the current cone, or `None` while some
    /// form is still violated.
    pub fn certificates(&self) -> Result<Option<Vec<lp::FarkasCertificate>>> {
        let verdicts = match &self.verdicts {
            Some(v) => v.clone(),
            None => lp::containment_index(&self.setup.inner, &self.cone)?.verdicts,
        };
        Ok(verdicts
            .into_iter()
            .map(|v| match v {
                lp::BoundednessVerdict::Bounded(c) => Some(c),
                lp::BoundednessVerdict::Unbounded { .. } => None,
            })
            .collect())
    }

    /// Recounts `Γ` from scratch for the current cone.
    pub fn audit_gamma(&self) -> Result<usize> {
        Ok(lp::containment_index(&self.setup.inner, &self.cone)?.gamma)
    }

    pub fn report(&self, outcome: Outcome) -> FiltrationReport {
        FiltrationReport {
            n: self.setup.n,
            mode: self.setup.mode,
            steps: self.records.clone(),
            outcome,
        }
    }

    /// The explicit candidate list behind `order`, or `None` for greedy.
    pub fn resolve_order(&self, order: &Order) -> Result<Option<Vec<Candidate>>> {
        let setup = &self.setup;
        Ok(match order {
            Order::Greedy => {
                if setup.mode == Mode::Ambient {
                    return Err(Error::Invalid("greedy order needs quotient mode".into()));
                }
                None
            }
            Order::Paper => Some(
                setup
                    .paper_order()?
                    .iter()
                    .map(|l| setup.candidate(l).cloned())
                    .collect::<Result<_>>()?,
            ),
            Order::Labels(ls) => Some(ls.iter().map(|l| setup.candidate(l).cloned()).collect::<Result<_>>()?),
            Order::Vectors(vs) => {
                for v in vs {
                    if v.vector.len() != setup.ambient.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: setup.ambient.dim(),
                            found: v.vector.len(),
                        });
                    }
                }
                Some(vs.clone())
            }
        })
    }

    /// What the next step of a run should do. `explicit` comes from
    /// [`Filtration::resolve_order`].
    pub fn plan_next(&self, explicit: Option<&[Candidate]>, max_steps: usize) -> Result<Next> {
        let done = self.records.len() - 1;
        match explicit {
            Some(list) => {
                if done >= list.len() {
                    return Ok(Next::Stop(if self.last().gamma == 0 {
                        Outcome::Contained
                    } else {
                        Outcome::Exhausted
                    }));
                }
                if done >= max_steps {
                    return Ok(Next::Stop(Outcome::BudgetExhausted));
                }
                Ok(Next::Add(list[done].clone()))
            }
            None => {
                if self.last().gamma == 0 {
                    return Ok(Next::Stop(Outcome::Contained));
                }
                if done >= max_steps {
                    return Ok(Next::Stop(Outcome::BudgetExhausted));
                }
                let used: Vec<&str> = self.records.iter().filter_map(|r| r.generator.as_deref()).collect();
                let pool: Vec<Candidate> = self
                    .setup
                    .candidates
                    .iter()
                    .filter(|c| !used.contains(&c.label.as_str()))
                    .cloned()
                    .collect();
                Ok(match greedy_select(&pool, &self.violated_forms())? {
                    Some(sel) => Next::Add(pool[sel.index].clone()),
                    None => Next::Stop(Outcome::DeadEnd),
                })
            }
        }
    }

    /// Runs until containment, exhaustion of `order`, or the budget.
    pub fn run(&mut self, order: &Order, max_steps: usize) -> Result<Outcome> {
        let explicit = self.resolve_order(order)?;
        loop {
            match self.plan_next(explicit.as_deref(), max_steps)? {
                Next::Add(c) => {
                    self.advance(&c)?;
                }
                Next::Stop(outcome) => return Ok(outcome),
            }
        }
    }
}

/// Decision for the next filtration step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Next {
    Add(Candidate),
    Stop(Outcome),
}

/// Refuses n = 7 ambient runs past the published depth unless overridden.
pub const AMBIENT_N7_LIMIT: usize = 7;

pub fn check_step_budget(setup: &Setup, max_steps: usize, allow_deep: bool) -> Result<()> {
    if setup.mode == Mode::Ambient && setup.n >= 7 && max_steps > AMBIENT_N7_LIMIT && !allow_deep {
        return Err(Error::Invalid(format!(
            "ambient runs at n = {} stop after {AMBIENT_N7_LIMIT} steps unless explicitly overridden",
            setup.n
        )));
    }
    Ok(())
}

/// Ambient filtration with lines; `max_steps` defaults to `2M`, capped at
/// the published depth for `n >= 7` unless `allow_deep`.
pub fn run_ambient_filtration(n: usize, order: &Order, max_steps: Option<usize>, allow_deep: bool) -> Result<FiltrationReport> {
    let setup = Arc::new(Setup::ambient(n)?);
    let budget = max_steps.unwrap_or_else(|| {
        let b = setup.default_budget();
        if n >= 7 && !allow_deep {
            b.min(AMBIENT_N7_LIMIT)
        } else {
            b
        }
    });
    check_step_budget(&setup, budget, allow_deep)?;
    let mut f = Filtration::start(setup)?;
    let outcome = f.run(order, budget)?;
    Ok(f.report(outcome))
}

/// Quotient filtration with rays; `max_steps` defaults to `M`.
pub fn run_quotient_filtration(
    n: usize,
    basis: Option<Vec<BoundaryClass>>,
    order: &Order,
    max_steps: Option<usize>,
) -> Result<FiltrationReport> {
    let setup = Arc::new(Setup::quotient(n, basis)?);
    let budget = max_steps.unwrap_or_else(|| setup.default_budget());
    let mut f = Filtration::start(setup)?;
    let outcome = f.run(order, budget)?;
    Ok(f.report(outcome))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selection {
    pub index: usize,
    pub hits: usize,
}

/// Picks the candidate that enlarges the most violated forms (`H(e) < 0`).
/// Ties go to the earliest candidate. `None` when nothing is enlarged.
pub fn greedy_select(candidates: &[Candidate], violated: &[&LinForm]) -> Result<Option<Selection>> {
    if violated.is_empty() {
        return Err(Error::Invalid("greedy selection needs at least one violated form".into()));
    }
    let mut best: Option<Selection> = None;
    for (index, c) in candidates.iter().enumerate() {
        let hits = violated.iter().filter(|h| h.eval(&c.vector) < 0).count();
        if hits > 0 && best.is_none_or(|b| hits > b.hits) {
            best = Some(Selection { index, hits });
        }
    }
    Ok(best)
}

/// Worst-case inequality count `N^(2^d) / 4^(2^d - 1)` after `d` pair
/// eliminations starting from `N` half-spaces.
pub fn worst_case_bound(n: u64, d: u32) -> Result<Rat> {
    if n == 0 {
        return Err(Error::Invalid("the starting count must be positive".into()));
    }
    if d > 24 {
        return Err(Error::Invalid(format!("depth {d} is too large to evaluate")));
    }
    let e = 1u32 << d;
    let num: BigInt = Pow::pow(BigInt::from(n), e);
    let den: BigInt = Pow::pow(BigInt::from(4), e - 1);
    Ok(Rat::new(num, den))
}

/// Convenience: `Γ` of the restricted F-nef cone against the basis orthant.
pub fn orthant_gamma(n: usize, basis: Option<Vec<BoundaryClass>>) -> Result<usize> {
    let setup = Setup::quotient(n, basis)?;
    let solver = ConeSolver::new(&setup.inner);
    Ok(lp::containment_index_with(&solver, &setup.start_cone())?.gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rat, rat_frac};

    #[test]
    fn bound_examples() {
        assert_eq!(worst_case_bound(7, 0).unwrap(), rat(7));
        assert_eq!(worst_case_bound(10, 1).unwrap(), rat(25));
        assert_eq!(worst_case_bound(56, 2).unwrap(), rat(153664));
        assert!(worst_case_bound(0, 1).is_err());
        assert_eq!(worst_case_bound(3, 1).unwrap(), rat_frac(9, 4));
    }

    #[test]
    fn greedy_prefers_more_hits_then_earlier() {
        let h1 = LinForm::new(vec![1, 0, 0]).unwrap();
        let h2 = LinForm::new(vec![0, 1, 0]).unwrap();
        let cands = vec![
            Candidate { label: "a".into(), vector: vec![-1, 0, 0] },
            Candidate { label: "b".into(), vector: vec![-1, -1, 5] },
            Candidate { label: "c".into(), vector: vec![-2, -1, 0] },
        ];
        let sel = greedy_select(&cands, &[&h1, &h2]).unwrap().unwrap();
        assert_eq!(sel, Selection { index: 1, hits: 2 });
        let none = greedy_select(&cands[..1], &[&h2]).unwrap();
        assert_eq!(none, None);
        assert!(greedy_select(&cands, &[]).is_err());
    }

    #[test]
    fn n5_ambient_reaches_containment() {
        let r = run_ambient_filtration(5, &Order::Paper, None, false).unwrap();
        assert_eq!(r.facets(), vec![10, 10, 12, 11, 10, 10]);
        assert_eq!(*r.gammas().last().unwrap(), 0);
        assert_eq!(r.outcome, Outcome::Contained);
    }

    #[test]
    fn n5_quotient_is_contained_at_start() {
        let r = run_quotient_filtration(5, None, &Order::Greedy, None).unwrap();
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.steps[0].gamma, 0);
        assert_eq!(r.outcome, Outcome::Contained);
    }

    #[test]
    fn n6_greedy_first_step() {
        let setup = Arc::new(Setup::quotient(6, None).unwrap());
        let f = Filtration::start(setup.clone()).unwrap();
        assert_eq!(f.last().gamma, 1);
        let labels = setup.ambient.labels();
        let v = f.violated_forms();
        assert_eq!(v[0].render(labels), "w{1,4,5}");
        let hitters: Vec<&str> = setup
            .candidates
            .iter()
            .filter(|c| v[0].eval(&c.vector) < 0)
            .map(|c| c.label.as_str())
            .collect();
        assert_eq!(hitters, vec!["1,2,3", "1,2,4", "1,3,5"]);
    }

    #[test]
    fn deep_ambient_n7_needs_override() {
        let setup = Setup::ambient(7).unwrap();
        assert!(check_step_budget(&setup, 8, false).is_err());
        assert!(check_step_budget(&setup, 8, true).is_ok());
        assert!(check_step_budget(&setup, 7, false).is_ok());
    }
}
