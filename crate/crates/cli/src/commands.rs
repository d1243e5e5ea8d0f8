use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use nefcone::engine::{
    check_step_budget, effective_representation_with, prove_with_order, verify_theorem, verify_witness,
    worst_case_bound, Candidate, EffectiveOutcome, Filtration, Mode, Next, Order, ProofBundle, Setup,
    AMBIENT_N7_LIMIT,
};
use nefcone::exactla::{self, encode_rat, Mat, Rat};
use nefcone::lp;
use nefcone::moduli::{self, BoundaryClass};

use crate::cache::Cache;
use crate::error::{CliError, CliResult};
use crate::files::{
    self, decode_rats, encode_ints, encode_rats, CertificateFile, Checks, ConeFile, DivisorFile, EffectiveFile,
    EstimateFile, Expansion, LabelsFile, ManifestFile, OrderEntry, OrderFile, QuotientFile, ReportFile, VectorsFile,
    VERSION,
};
use crate::render::{self, Format};

fn parse_class(n: usize, label: &str) -> CliResult<BoundaryClass> {
    let members = label
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("bad class label {label:?}")))?;
    moduli::canonical_class(n, &members).map_err(CliError::config)
}

/// `Bn` or a basis file.
pub fn load_basis(n: usize, spec: &str) -> CliResult<Option<Vec<BoundaryClass>>> {
    if spec == "Bn" {
        return Ok(None);
    }
    let file: LabelsFile = files::read_json(Path::new(spec))?;
    file.check(LabelsFile::BASIS)?;
    if file.n != n {
        return Err(CliError::Config(format!("basis file is for n = {}, not {n}", file.n)));
    }
    file.labels.iter().map(|l| parse_class(n, l)).collect::<CliResult<_>>().map(Some)
}

/// `paper`, `greedy`, or an order file resolved against `setup`.
pub fn load_order(setup: &Setup, spec: &str) -> CliResult<Order> {
    match spec {
        "paper" => Ok(Order::Paper),
        "greedy" => Ok(Order::Greedy),
        path => {
            let file: OrderFile = files::read_json(Path::new(path))?;
            file.check()?;
            let list = file
                .generators
                .iter()
                .map(|e| match e {
                    OrderEntry::Label(l) => setup.candidate(l).cloned().map_err(CliError::config),
                    OrderEntry::Vector { label, vector } => Ok(Candidate {
                        label: label.clone(),
                        vector: files::direction(vector)?,
                    }),
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Order::Vectors(list))
        }
    }
}

fn make_setup(n: usize, mode: Mode, basis: &str) -> CliResult<Arc<Setup>> {
    let setup = match mode {
        Mode::Ambient => {
            if basis != "Bn" {
                return Err(CliError::Config("--basis applies to quotient mode only".into()));
            }
            Setup::ambient(n)
        }
        Mode::Quotient => Setup::quotient(n, load_basis(n, basis)?),
    };
    setup.map(Arc::new).map_err(CliError::config)
}

fn emit(text: &str) {
    print!("{text}");
}

pub fn generate(n: usize, basis: &str, out: &Path) -> CliResult<()> {
    let idx = moduli::enumerate_classes(n).map_err(CliError::config)?;
    let setup = Setup::quotient(n, load_basis(n, basis)?).map_err(CliError::config)?;
    let labels: Vec<String> = idx.classes().iter().map(BoundaryClass::label).collect();
    let q = setup.quotient.as_ref().expect("quotient setup");
    let basis_labels: Vec<String> = q.basis().iter().map(BoundaryClass::label).collect();

    files::write_json(&out.join("index.json"), &LabelsFile::new(LabelsFile::INDEX, n, labels.clone()))?;
    files::write_json(
        &out.join("relations.json"),
        &VectorsFile {
            format: VectorsFile::RELATIONS.into(),
            version: VERSION,
            n,
            labels: labels.clone(),
            vectors: setup.relations.iter().map(|v| encode_ints(v)).collect(),
        },
    )?;
    let fnef = nefcone::cone::ConeH::new(nefcone::cone::Ambient::full(&idx), moduli::fnef_forms(&idx))
        .map_err(CliError::compute)?;
    files::write_json(&out.join("fnef.cone.json"), &ConeFile::from_cone(&fnef, false))?;
    files::write_json(&out.join("basis.json"), &LabelsFile::new(LabelsFile::BASIS, n, basis_labels.clone()))?;
    files::write_json(
        &out.join("quotient.json"),
        &QuotientFile {
            format: QuotientFile::FORMAT.into(),
            version: VERSION,
            n,
            basis: basis_labels.clone(),
            classes: idx
                .classes()
                .iter()
                .enumerate()
                .map(|(pos, c)| Expansion {
                    class: c.label(),
                    coordinates: encode_rats(q.of_position(pos)),
                })
                .collect(),
        },
    )?;
    files::write_json(&out.join("fnef-quotient.cone.json"), &ConeFile::from_cone(&setup.inner, false))?;
    emit(&format!(
        "n = {n}: {} classes, {} relations, {} F-nef forms, basis of {} classes ({} forms after restriction)\n",
        labels.len(),
        setup.relations.len(),
        fnef.len(),
        basis_labels.len(),
        setup.inner.len()
    ));
    Ok(())
}

pub struct FiltrateArgs {
    pub n: usize,
    pub mode: Mode,
    pub order: String,
    pub basis: String,
    pub max_steps: Option<usize>,
    pub allow_deep: bool,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub format: Format,
}

pub fn filtrate(a: &FiltrateArgs) -> CliResult<()> {
    let setup = make_setup(a.n, a.mode, &a.basis)?;
    let budget = a.max_steps.unwrap_or_else(|| {
        let b = setup.default_budget();
        if a.mode == Mode::Ambient && a.n >= 7 && !a.allow_deep {
            b.min(AMBIENT_N7_LIMIT)
        } else {
            b
        }
    });
    check_step_budget(&setup, budget, a.allow_deep).map_err(CliError::config)?;
    let order = load_order(&setup, &a.order)?;
    let cache = Cache::open(a.cache.as_deref())?;

    let mut prefix: Vec<Candidate> = Vec::new();
    let mut f = match cache.as_ref().and_then(|c| c.load(&setup, &prefix)) {
        Some(f) => {
            eprintln!("step 0: cached");
            f
        }
        None => {
            let f = Filtration::start(setup.clone()).map_err(CliError::compute)?;
            eprintln!("step 0: {} facets, Γ = {}", f.last().facets, f.last().gamma);
            if let Some(c) = &cache {
                c.store(&setup, &prefix, &f)?;
            }
            f
        }
    };
    let explicit = f.resolve_order(&order).map_err(CliError::config)?;
    let outcome = loop {
        match f.plan_next(explicit.as_deref(), budget).map_err(CliError::compute)? {
            Next::Stop(o) => break o,
            Next::Add(c) => {
                prefix.push(c.clone());
                let step = prefix.len();
                if let Some(g) = cache.as_ref().and_then(|k| k.load(&setup, &prefix)) {
                    f = g;
                    eprintln!("step {step} ({}): cached", c.label);
                    continue;
                }
                let r = f.advance(&c).map_err(CliError::compute)?;
                eprintln!("step {step} ({}): {} facets, Γ = {}", c.label, r.facets, r.gamma);
                if let Some(k) = &cache {
                    k.store(&setup, &prefix, &f)?;
                }
            }
        }
    };
    let report = f.report(outcome);
    if let Some(out) = &a.out {
        files::write_json(&out.join("report.json"), &ReportFile::from_report(&report))?;
        files::write_json(&out.join("final.cone.json"), &ConeFile::from_cone(f.cone(), false))?;
    }
    emit(&render::report(&report, a.format));
    Ok(())
}

pub struct VerifyArgs {
    pub n: usize,
    pub order: Option<String>,
    pub basis: Option<String>,
    pub max_steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn write_bundle(bundle: &ProofBundle, dir: &Path) -> CliResult<()> {
    let names: Vec<String> = (0..bundle.certificates.len())
        .map(|i| format!("certificates/cert-{i:05}.json"))
        .collect();
    for (i, (c, name)) in bundle.certificates.iter().zip(&names).enumerate() {
        files::write_json(&dir.join(name), &CertificateFile::new(i, c))?;
    }
    files::write_json(&dir.join("inner.cone.json"), &ConeFile::from_cone(&bundle.inner, false))?;
    files::write_json(&dir.join("outer.cone.json"), &ConeFile::from_cone(&bundle.outer, false))?;
    files::write_json(
        &dir.join("manifest.json"),
        &ManifestFile {
            format: ManifestFile::FORMAT.into(),
            version: VERSION,
            n: bundle.n,
            formulation: bundle.formulation.as_str().into(),
            proven: bundle.proven,
            inner: "inner.cone.json".into(),
            outer: "outer.cone.json".into(),
            certificates: names,
            report: ReportFile::from_report(&bundle.report),
        },
    )
}

pub fn verify(a: &VerifyArgs) -> CliResult<()> {
    let bundle = if a.order.is_none() && a.basis.is_none() && a.max_steps.is_none() {
        if !(5..=7).contains(&a.n) {
            return Err(CliError::Config(format!("proofs are available for n = 5, 6, 7, not {}", a.n)));
        }
        verify_theorem(a.n).map_err(CliError::compute)?
    } else {
        let setup = make_setup(a.n, Mode::Quotient, a.basis.as_deref().unwrap_or("Bn"))?;
        let order = load_order(&setup, a.order.as_deref().unwrap_or("paper"))?;
        let budget = a.max_steps.unwrap_or_else(|| setup.default_budget());
        prove_with_order(setup, &order, budget).map_err(CliError::compute)?
    };
    if let Some(dir) = &a.out {
        write_bundle(&bundle, dir)?;
    }
    emit(&render::report(&bundle.report, a.format));
    if !bundle.proven {
        let labels = bundle.outer.ambient().labels();
        let last = bundle.report.steps.last().expect("at least one step");
        let violated: Vec<String> = last
            .violated
            .iter()
            .map(|&i| bundle.outer.forms()[i].render(labels))
            .collect();
        return Err(CliError::Verify(format!(
            "containment not proven; violated forms: {}",
            violated.join(", ")
        )));
    }
    if !bundle.verify() {
        return Err(CliError::Verify("a certificate failed its arithmetic check".into()));
    }
    let k = bundle.certificates.len();
    eprintln!("{k}/{k} certificates verified");
    Ok(())
}

pub fn audit(dir: &Path) -> CliResult<()> {
    let manifest: ManifestFile = files::read_json(&dir.join("manifest.json"))?;
    manifest.check()?;
    if manifest.certificates.is_empty() {
        return Err(CliError::Verify("no certificates".into()));
    }
    let inner = files::read_json::<ConeFile>(&dir.join(&manifest.inner))?.to_cone()?;
    let outer = files::read_json::<ConeFile>(&dir.join(&manifest.outer))?.to_cone()?;
    let mut covered = vec![false; outer.len()];
    let mut failures = Vec::new();
    for name in &manifest.certificates {
        let path = dir.join(name);
        let ok = match files::read_json::<CertificateFile>(&path).and_then(|f| Ok((f.form, f.to_certificate()?))) {
            Ok((form, cert)) => {
                form < outer.len()
                    && cert.target == outer.forms()[form].coeffs()
                    && lp::verify_certificate(&inner, &cert)
                    && !std::mem::replace(&mut covered[form], true)
            }
            Err(_) => false,
        };
        if !ok {
            failures.push(name.clone());
        }
    }
    let verified = manifest.certificates.len() - failures.len();
    println!("{verified}/{} verified", manifest.certificates.len());
    if let Some(first) = failures.first() {
        return Err(CliError::Verify(format!(
            "invalid certificate {} ({} failing)",
            dir.join(first).display(),
            failures.len()
        )));
    }
    if covered.iter().any(|c| !c) {
        return Err(CliError::Verify("some forms of the outer cone have no certificate".into()));
    }
    if !manifest.proven {
        return Err(CliError::Verify("manifest does not claim containment".into()));
    }
    Ok(())
}

pub fn effective(n: usize, input: &Path, out: Option<&Path>) -> CliResult<()> {
    let file: DivisorFile = files::read_json(input)?;
    file.check()?;
    if file.n != n {
        return Err(CliError::Config(format!("divisor file is for n = {}, not {n}", file.n)));
    }
    let idx = moduli::enumerate_classes(n).map_err(CliError::config)?;
    let labels: Vec<String> = idx.classes().iter().map(BoundaryClass::label).collect();
    if file.labels != labels {
        return Err(CliError::Config(format!(
            "divisor coordinates must be the {} boundary classes in index order",
            labels.len()
        )));
    }
    if file.values.len() != labels.len() {
        return Err(CliError::config(nefcone::Error::DimensionMismatch {
            expected: labels.len(),
            found: file.values.len(),
        }));
    }
    let a = decode_rats(&file.values)?;
    let relations = moduli::relation_basis(&idx);
    let outcome = effective_representation_with(&idx, &relations, &a).map_err(CliError::compute)?;
    let mut doc = EffectiveFile {
        format: EffectiveFile::FORMAT.into(),
        version: VERSION,
        n,
        labels,
        effective: false,
        a: encode_rats(&a),
        t: None,
        b: None,
        checks: None,
        witness: None,
        witness_checked: None,
    };
    let passed = match &outcome {
        EffectiveOutcome::Effective(r) => {
            let checks = transcript(&a, &r.t, &r.b, &relations);
            let ok = checks.b_nonnegative && checks.b_equals_a_plus_relations && checks.difference_in_relation_span;
            doc.effective = true;
            doc.t = Some(encode_rats(&r.t));
            doc.b = Some(encode_rats(&r.b));
            doc.checks = Some(checks);
            ok
        }
        EffectiveOutcome::NotEffective { witness } => {
            let ok = verify_witness(&a, &relations, witness);
            doc.witness = Some(encode_rats(witness));
            doc.witness_checked = Some(ok);
            ok
        }
    };
    if let Some(dir) = out {
        files::write_json(&dir.join("effective.json"), &doc)?;
    }
    emit(&files::to_text(&doc));
    if !passed {
        return Err(CliError::Verify("the representation failed its exact recheck".into()));
    }
    Ok(())
}

/// Each postcondition checked on its own.
fn transcript(a: &[Rat], t: &[Rat], b: &[Rat], relations: &[Vec<i64>]) -> Checks {
    let mut sum = a.to_vec();
    for (tm, v) in t.iter().zip(relations) {
        for (s, &x) in sum.iter_mut().zip(v) {
            *s += tm * Rat::from_integer(BigInt::from(x));
        }
    }
    let diff: Vec<Rat> = b.iter().zip(a).map(|(b, a)| b - a).collect();
    let in_span = Mat::from_int_rows(a.len(), relations)
        .ok()
        .and_then(|m| exactla::solve_in_span(&m, &diff).ok())
        .flatten()
        .is_some();
    Checks {
        b_nonnegative: exactla::is_nonnegative(b),
        b_equals_a_plus_relations: t.len() == relations.len() && sum == b,
        difference_in_relation_span: in_span,
    }
}

pub fn estimate(n: Option<usize>, count: Option<u64>, depth: Option<u32>, format: Format) -> CliResult<()> {
    if let Some(n) = n {
        moduli::check_n(n).map_err(CliError::config)?;
    }
    let count = count
        .or(n.map(|n| moduli::ambient_dim(n) as u64))
        .ok_or_else(|| CliError::Config("give --n or --count".into()))?;
    let depth = depth
        .or(n.map(|n| moduli::relation_dim(n) as u32))
        .ok_or_else(|| CliError::Config("give --n or --depth".into()))?;
    let bound = worst_case_bound(count, depth).map_err(CliError::config)?;
    let exact = encode_rat(&bound);
    let text = match format {
        Format::Structured => files::to_text(&EstimateFile {
            format: EstimateFile::FORMAT.into(),
            version: VERSION,
            count,
            depth,
            bound: exact,
        }),
        Format::Csv => format!("count,depth,bound\n{count},{depth},{exact}\n"),
        Format::Table => {
            let shown = if exact.len() <= 60 {
                exact
            } else {
                let int = bound.to_integer().to_string();
                format!("{}.{}e{} ({} digits)", &int[..1], &int[1..4], int.len() - 1, int.len())
            };
            format!("worst-case inequalities after {depth} eliminations from {count} half-spaces: {shown}\n")
        }
    };
    emit(&text);
    Ok(())
}

/// Builds a divisor file in ambient coordinates from `(label, value)` pairs,
/// zero elsewhere.
pub fn divisor_file(n: usize, terms: &[(&str, Rat)]) -> CliResult<DivisorFile> {
    let idx = moduli::enumerate_classes(n).map_err(CliError::config)?;
    let mut values = vec![Rat::zero(); idx.dim()];
    for (label, v) in terms {
        let c = parse_class(n, label)?;
        values[idx.position(&c).expect("canonical class")] += v;
    }
    let labels = idx.classes().iter().map(BoundaryClass::label).collect();
    Ok(DivisorFile::new(n, labels, &values))
}

pub fn divisor(n: usize, terms: &[String], out: &Path) -> CliResult<()> {
    let parsed = terms
        .iter()
        .map(|t| {
            let (label, value) = t
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("expected LABEL=VALUE, found {t:?}")))?;
            Ok((label, exactla::decode_rat(value).map_err(CliError::config)?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let file = divisor_file(n, &parsed)?;
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    files::write_json(out, &file)
}

