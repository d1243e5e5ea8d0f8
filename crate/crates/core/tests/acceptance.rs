//! End-to-end checks against the published tables and examples.
//!
//! Runs as a plain binary so that every criterion prints one line, whether it
//! passes or not. The process exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use num_traits::Zero;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nefcone::cone::{Ambient, ConeH};
use nefcone::engine::{
    self, effective_representation, verify_theorem, EffectiveOutcome, Filtration, Formulation, Mode, Order, Outcome,
    ProofBundle, Setup,
};
use nefcone::exactla::{rat, Rat};
use nefcone::moduli::{self, AmbientIndex, BoundaryClass};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

/// `"145"` → the class `{1,4,5}`; one digit per label.
fn class(n: usize, digits: &str) -> BoundaryClass {
    let members: Vec<usize> = digits.chars().map(|c| c.to_digit(10).unwrap() as usize).collect();
    moduli::canonical_class(n, &members).unwrap()
}

/// `"34+35+45-12"` as an integer vector over `classes`.
fn combo(n: usize, classes: &[BoundaryClass], text: &str) -> Vec<i64> {
    let mut v = vec![0; classes.len()];
    let mut sign = 1;
    let mut digits = String::new();
    let mut flush = |digits: &mut String, sign: i64| {
        if !digits.is_empty() {
            let c = class(n, digits);
            let pos = classes.iter().position(|x| *x == c).expect("class in coordinate list");
            v[pos] += sign;
            digits.clear();
        }
    };
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        match ch {
            '+' | '-' => {
                flush(&mut digits, sign);
                sign = if ch == '+' { 1 } else { -1 };
            }
            _ => digits.push(ch),
        }
    }
    flush(&mut digits, sign);
    v
}

fn form_set(n: usize, classes: &[BoundaryClass], lines: &[&str]) -> BTreeSet<Vec<i64>> {
    lines.iter().map(|l| combo(n, classes, l)).collect()
}

fn c1_dimensions() -> Check {
    for (n, big_n, m, nbar) in [(4, 3, 2, 1), (5, 10, 5, 5), (6, 25, 9, 16), (7, 56, 14, 42)] {
        let idx = moduli::enumerate_classes(n).map_err(err)?;
        ensure(idx.dim() == big_n && moduli::ambient_dim(n) == big_n, format!("N at n={n}"))?;
        ensure(moduli::relation_dim(n) == m, format!("M at n={n}"))?;
        ensure(moduli::relation_basis(&idx).len() == m, format!("relation basis size at n={n}"))?;
        ensure(moduli::quotient_dim(n) == nbar, format!("N̄ at n={n}"))?;
        ensure(moduli::basis_bn(n).map_err(err)?.len() == nbar, format!("|B_n| at n={n}"))?;
    }
    Ok("N = 3,10,25,56; M = 2,5,9,14; N̄ = |B_n| = 1,5,16,42".into())
}

fn c2_fnef_counts() -> Check {
    let mut counts = Vec::new();
    for n in [5, 6, 7] {
        let idx = moduli::enumerate_classes(n).map_err(err)?;
        counts.push(moduli::fnef_forms(&idx).len());
    }
    ensure(counts == [10, 65, 350], format!("counts {counts:?}"))?;
    let idx = moduli::enumerate_classes(5).map_err(err)?;
    let printed = form_set(
        5,
        idx.classes(),
        &[
            "34+35+45-12",
            "24+25+45-13",
            "23+25+35-14",
            "23+24+34-15",
            "14+15+45-23",
            "13+15+35-24",
            "13+14+34-25",
            "12+15+25-34",
            "12+14+24-35",
            "12+13+23-45",
        ],
    );
    let ours: BTreeSet<Vec<i64>> = moduli::fnef_forms(&idx).into_iter().collect();
    ensure(ours == printed, "n=5 forms differ from the printed list")?;
    Ok("10 / 65 / 350 forms; n=5 list matches".into())
}

fn c3_example_m05() -> Check {
    let setup = Arc::new(Setup::ambient(5).map_err(err)?);
    let classes = setup.index.classes();
    let mut f = Filtration::start(setup.clone()).map_err(err)?;
    let mut facets = vec![f.last().facets];
    for (i, v) in setup.relations.iter().enumerate() {
        let cand = engine::Candidate {
            label: format!("v{}", i + 1),
            vector: v.clone(),
        };
        f.advance(&cand).map_err(err)?;
        facets.push(f.last().facets);
        if i == 0 {
            let printed = form_set(
                5,
                classes,
                &["14", "15", "23", "25", "35", "45", "12+13", "12+24", "13+34", "24+34"],
            );
            ensure(f.cone().form_set() == printed, "first enlarged cone differs from the printed system")?;
        }
    }
    ensure(facets == [10, 10, 12, 11, 10, 10], format!("facet sequence {facets:?}"))?;
    let printed = form_set(
        5,
        classes,
        &[
            "12+13+14+15",
            "12+13+14+23+24+34",
            "12+23+24+25",
            "12+13+15+23+25+35",
            "13+23+34+35",
            "12+14+15+24+25+45",
            "14+24+34+45",
            "13+14+15+34+35+45",
            "15+25+35+45",
            "23+24+25+34+35+45",
        ],
    );
    ensure(f.cone().form_set() == printed, "final cone differs from the printed 10 facets")?;
    let proof = nefcone::lp::contains(&setup.inner, f.cone()).map_err(err)?;
    ensure(proof.contained, "F_5 not contained in E_5")?;
    Ok(format!("facets {facets:?}; E_5 matches the printed system and contains F_5"))
}

fn c4_orthant_index() -> Check {
    let mut gammas = Vec::new();
    for n in [5, 6, 7] {
        gammas.push(engine::orthant_gamma(n, None).map_err(err)?);
    }
    ensure(gammas == [0, 1, 7], format!("orthant Γ {gammas:?}"))?;

    // Random complements at n = 5.
    let idx = moduli::enumerate_classes(5).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let (mut valid, mut drawn) = (Vec::new(), 0usize);
    while valid.len() < 1000 {
        drawn += 1;
        let pick = sample(&mut rng, idx.dim(), moduli::quotient_dim(5));
        let basis: Vec<BoundaryClass> = pick.iter().map(|i| idx.classes()[i]).collect();
        match engine::orthant_gamma(5, Some(basis)) {
            Ok(g) => valid.push(g),
            Err(nefcone::Error::NotComplement { .. }) => {}
            Err(e) => return Err(err(e)),
        }
    }
    let min = *valid.iter().min().unwrap();
    let max = *valid.iter().max().unwrap();
    let mean = valid.iter().sum::<usize>() as f64 / valid.len() as f64;
    ensure(max <= 2, format!("random complement Γ up to {max}"))?;
    ensure((mean - 1.11).abs() <= 0.3, format!("random complement mean Γ {mean:.3}"))?;

    // Every 5-subset, for reference.
    let mut all = Vec::new();
    for mask in 0u32..(1 << idx.dim()) {
        if mask.count_ones() as usize != moduli::quotient_dim(5) {
            continue;
        }
        let basis: Vec<BoundaryClass> = (0..idx.dim())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| idx.classes()[i])
            .collect();
        if let Ok(g) = engine::orthant_gamma(5, Some(basis)) {
            all.push(g);
        }
    }
    let all_mean = all.iter().sum::<usize>() as f64 / all.len() as f64;
    Ok(format!(
        "Γ = 0,1,7; {} random complements ({drawn} draws): min {min} max {max} mean {mean:.3}; all {} complements: min {} max {} mean {all_mean:.4}",
        valid.len(),
        all.len(),
        all.iter().min().unwrap(),
        all.iter().max().unwrap()
    ))
}

fn check_rows(report: &engine::FiltrationReport, facets: &[usize], gammas: &[usize]) -> Result<(), String> {
    let f = report.facets();
    let g = report.gammas();
    ensure(f.len() >= facets.len(), format!("only {} steps", f.len()))?;
    ensure(f[..facets.len()] == *facets, format!("facets {f:?}"))?;
    ensure(g[..gammas.len()] == *gammas, format!("gammas {g:?}"))
}

fn c5_table_n6_ambient() -> Check {
    let t = Instant::now();
    let r = engine::run_ambient_filtration(6, &Order::Paper, None, false).map_err(err)?;
    check_rows(
        &r,
        &[25, 33, 77, 109, 175, 266, 341, 871, 1420, 2750],
        &[25, 33, 77, 109, 175, 260, 326, 781, 1033, 0],
    )?;
    ensure(r.outcome == Outcome::Contained, r.outcome.as_str())?;
    Ok(format!("10 rows exact ({:.1?})", t.elapsed()))
}

fn c6_table_n6_quotient() -> Check {
    let t = Instant::now();
    let setup = Arc::new(Setup::quotient(6, None).map_err(err)?);
    let mut f = Filtration::start(setup).map_err(err)?;
    let outcome = f.run(&Order::Paper, usize::MAX).map_err(err)?;
    let r = f.report(outcome);
    check_rows(
        &r,
        &[16, 25, 34, 49, 108, 239, 491, 869, 1419, 2750],
        &[1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    )?;
    Ok(format!("10 rows exact ({:.1?})", t.elapsed()))
}

fn c7_table_n7_quotient(bundle: &ProofBundle) -> Check {
    let r = &bundle.report;
    check_rows(r, &[42, 91, 196, 477, 1433, 5753], &[7, 14, 16, 8, 4, 0])?;
    let gens: Vec<&str> = r.steps.iter().filter_map(|s| s.generator.as_deref()).collect();
    ensure(gens == engine::PAPER_ORDER_7, format!("generators {gens:?}"))?;
    let setup = Setup::quotient(7, None).map_err(err)?;
    let start = setup.start_cone();
    let violated: BTreeSet<String> = r.steps[0]
        .violated
        .iter()
        .map(|&i| start.forms()[i].render(setup.ambient.labels()))
        .collect();
    let expected: BTreeSet<String> = ["1,4,5", "1,4,7", "1,5,6", "2,3,6", "2,3,7", "2,5,6", "3,4,7"]
        .iter()
        .map(|s| format!("w{{{s}}}"))
        .collect();
    ensure(violated == expected, format!("step-0 violated set {violated:?}"))?;
    let enlarged: Vec<usize> = r.steps[1..].iter().map(|s| s.enlarged.unwrap()).collect();
    ensure(enlarged == [3, 8, 13, 6, 4], format!("enlarged counts {enlarged:?}"))?;
    Ok("facets 42..5753, Γ 7,14,16,8,4,0; violated set and enlarged counts 3/7 8/14 13/16 6/8 4/4 exact".into())
}

fn c8_table_n7_ambient() -> Check {
    let t = Instant::now();
    let r = engine::run_ambient_filtration(7, &Order::Paper, Some(7), false).map_err(err)?;
    check_rows(&r, &[56, 104, 544, 1320, 4052, 12276, 28966, 99281], &[])?;
    let g7 = r.steps[7].gamma;
    ensure(g7 == 99249, format!("Γ at step 7 is {g7}"))?;
    Ok(format!(
        "facets 56..12276 exact, plus 28966, 99281 with Γ = 99249 at step 7 ({:.1?})",
        t.elapsed()
    ))
}

fn c9_certificates(bundles: &[&ProofBundle]) -> Check {
    let mut counts = Vec::new();
    for b in bundles {
        ensure(b.proven, format!("n={} not proven", b.n))?;
        ensure(b.verify(), format!("n={} bundle audit failed", b.n))?;
        // Independent recheck against the raw F-nef forms.
        let forms: Vec<&[i64]> = b.inner.forms().iter().map(|f| f.coeffs()).collect();
        ensure(
            b.certificates.iter().all(|c| nefcone::lp::verify_combination(&forms, c)),
            format!("n={} raw recheck failed", b.n),
        )?;
        counts.push(b.certificates.len());
    }
    ensure(counts == [10, 25, 5753], format!("certificate counts {counts:?}"))?;
    ensure(bundles[0].formulation == Formulation::Ambient, "n=5 formulation")?;
    Ok("10 / 25 / 5753 certificates, all pass the arithmetic audit".into())
}

/// Oracle facets of a filtration step from its generators.
fn oracle_step(units: &[Vec<i64>], added: &[Vec<i64>], mode: Mode) -> BTreeSet<Vec<i64>> {
    let d = units.len();
    match mode {
        Mode::Ambient => common::facets(d, units, added),
        Mode::Quotient => {
            let rays: Vec<Vec<i64>> = units.iter().chain(added).cloned().collect();
            common::facets(d, &rays, &[])
        }
    }
}

fn pipeline_agrees(setup: Setup) -> Result<usize, String> {
    let setup = Arc::new(setup);
    let d = setup.ambient.dim();
    let units: Vec<Vec<i64>> = (0..d).map(|i| setup.ambient.unit(i)).collect();
    let mut f = Filtration::start(setup.clone()).map_err(err)?;
    let mut added = Vec::new();
    let mut cones = 1;
    ensure(f.cone().form_set() == oracle_step(&units, &added, setup.mode), "step 0")?;
    for c in setup.candidates.clone() {
        f.advance(&c).map_err(err)?;
        added.push(c.vector.clone());
        let want = oracle_step(&units, &added, setup.mode);
        ensure(
            f.cone().form_set() == want,
            format!("n={} {} after {}", setup.n, setup.mode.as_str(), c.label),
        )?;
        cones += 1;
    }
    Ok(cones)
}

/// Entries skewed positive so that most random cones stay pointed.
fn random_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-1..=3)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

fn c10_oracle() -> Check {
    let mut cones = 0;
    for n in [4, 5] {
        cones += pipeline_agrees(Setup::ambient(n).map_err(err)?)?;
        cones += pipeline_agrees(Setup::quotient(n, None).map_err(err)?)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xdd_0a11);
    let (mut done, mut eliminated) = (0, 0);
    while done < 200 {
        let d = rng.gen_range(2..=8);
        let nrays = rng.gen_range(d..=d + 3);
        let nlines = rng.gen_range(0..=2.min(d - 1));
        let rays: Vec<Vec<i64>> = (0..nrays).map(|_| random_vec(&mut rng, d)).collect();
        let lines: Vec<Vec<i64>> = (0..nlines).map(|_| random_vec(&mut rng, d)).collect();
        let all: Vec<Vec<i64>> = rays.iter().chain(&lines).cloned().collect();
        if common::rank(&all, d) < d {
            continue;
        }
        let cone = ConeH::from_generators(Ambient::plain(d), &rays, &lines).map_err(err)?;
        ensure(cone.form_set() == common::facets(d, &rays, &lines), format!("instance {done}: base cone"))?;
        let g = random_vec(&mut rng, d);
        let as_line = rng.gen_bool(0.5);
        let (mut rays2, mut lines2) = (rays.clone(), lines.clone());
        if as_line {
            lines2.push(g.clone());
        } else {
            rays2.push(g.clone());
        }
        let want = common::facets(d, &rays2, &lines2);
        let bare = cone.clone().without_generators();
        let dd = if as_line { cone.sum_line(&g) } else { cone.sum_ray(&g) };
        ensure(dd.map_err(err)?.form_set() == want, format!("instance {done}: double description"))?;
        // The generator-free path solves one LP per raw inequality; keep it to
        // instances where that stays quick.
        let (_, counts) = bare.eliminate(&g, as_line).map_err(err)?;
        if counts.raw <= 60 {
            let fm = if as_line { bare.sum_line(&g) } else { bare.sum_ray(&g) };
            ensure(fm.map_err(err)?.form_set() == want, format!("instance {done}: elimination"))?;
            eliminated += 1;
        }
        done += 1;
    }
    Ok(format!("{cones} pipeline cones at n=4,5 and {done} random sums agree with the oracle ({eliminated} also by plain elimination)"))
}

fn c11_quotient_goldens() -> Check {
    let cases: [(usize, &[&str]); 2] = [
        (
            6,
            &[
                "12 = -125-126+14+145+146+23-34",
                "123 = 125+134-145-23+25+34-45",
                "124 = 126-14-145+156+16+34-36",
                "13 = -134-136+145+15+156+23-25",
                "135 = 136-145+146-15+16+25-26",
                "24 = 134-136+14+145-156-16+26",
                "35 = 125-126+145-146+15-16+36",
                "46 = -125+126+145-146-25+26+45",
                "56 = -134+136+145-156-34+36+45",
            ],
        ),
        (
            7,
            &[
                "123 = 125+134-145-23-236-237+25+256+257+34+346+347-45-456-457",
                "467 = -125+127+145-147-235+237-25-256+267+27+345-347+45+456-47",
                "135 = 137-145+147-15-156+167+17+235-237+245-247+25+256-267-27",
                "246 = 136-137+146-147+156-157+16-17-236+237+247-256+257-26+27",
                "357 = -126+127-146+147-156+157-16+17+236-237+346-347+356+36-37",
            ],
        ),
    ];
    let mut total = 0;
    for (n, rows) in cases {
        let idx: AmbientIndex = moduli::enumerate_classes(n).map_err(err)?;
        let rels = moduli::relation_basis(&idx);
        let basis = moduli::basis_bn(n).map_err(err)?;
        let q = moduli::quotient_coordinates(&idx, &rels, &basis).map_err(err)?;
        for row in rows {
            let (lhs, rhs) = row.split_once('=').unwrap();
            let target = class(n, lhs.trim());
            let want: Vec<Rat> = combo(n, &basis, rhs).into_iter().map(rat).collect();
            let got = q.of(&idx, &target).ok_or("class missing")?;
            ensure(got == want.as_slice(), format!("n={n} δ{{{}}}", target.label()))?;
            total += 1;
        }
    }
    ensure(total == 14, "row count")?;
    Ok("9 expansions at n=6 and 5 at n=7 match".into())
}

fn c12_effective() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xeff_ec7);
    let mut done = Vec::new();
    for n in [5, 6] {
        let setup = Setup::quotient(n, None).map_err(err)?;
        let d = setup.ambient.dim();
        let dual: Vec<Vec<i64>> = setup.inner.forms().iter().map(|f| f.coeffs().to_vec()).collect();
        let rays = ConeH::from_generators(Ambient::plain(d), &dual, &[]).map_err(err)?;
        let rays: Vec<Vec<i64>> = rays.forms().iter().map(|f| f.coeffs().to_vec()).collect();
        let basis = setup.quotient.as_ref().unwrap().basis().to_vec();
        let pos: Vec<usize> = basis.iter().map(|b| setup.index.position(b).unwrap()).collect();
        let fnef = moduli::fnef_forms(&setup.index);
        for k in 0..100 {
            let mut a = vec![0i64; setup.index.dim()];
            for _ in 0..rng.gen_range(1..=4) {
                let r = &rays[rng.gen_range(0..rays.len())];
                let c = rng.gen_range(1..=5);
                for (j, x) in r.iter().enumerate() {
                    a[pos[j]] += c * x;
                }
            }
            for v in &setup.relations {
                let t = rng.gen_range(-3..=3);
                for (s, x) in a.iter_mut().zip(v) {
                    *s += t * x;
                }
            }
            ensure(
                common::satisfies(&fnef, &a),
                format!("n={n} sample {k} is not F-nef"),
            )?;
            let a: Vec<Rat> = a.into_iter().map(rat).collect();
            match effective_representation(n, &a).map_err(err)? {
                EffectiveOutcome::Effective(r) => {
                    ensure(r.verify(&setup.relations), format!("n={n} sample {k}: postconditions"))?;
                    ensure(r.b.iter().all(|x| *x >= Rat::zero()), format!("n={n} sample {k}: b"))?;
                }
                EffectiveOutcome::NotEffective { .. } => return Err(format!("n={n} sample {k} not effective")),
            }
        }
        done.push(format!("n={n}: 100 samples over {} rays", rays.len()));
    }
    Ok(done.join("; "))
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Check) -> bool {
    let t = Instant::now();
    let out = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = t.elapsed().as_secs_f64();
    match out {
        Ok(msg) => {
            println!("PASS criterion {id:>2} {name}: {msg} [{secs:.1}s]");
            true
        }
        Err(msg) => {
            println!("FAIL criterion {id:>2} {name}: {msg} [{secs:.1}s]");
            false
        }
    }
}

fn main() {
    // `cargo test` passes harness flags such as `--list`; nothing to list.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut ok = true;
    ok &= run(1, "dimensions", c1_dimensions);
    ok &= run(2, "F-nef forms", c2_fnef_counts);
    ok &= run(3, "n=5 example", c3_example_m05);
    ok &= run(4, "orthant index", c4_orthant_index);
    ok &= run(5, "n=6 ambient table", c5_table_n6_ambient);
    ok &= run(6, "n=6 quotient table", c6_table_n6_quotient);

    let t = Instant::now();
    let proofs: Vec<Result<ProofBundle, String>> = [5, 6, 7].iter().map(|&n| verify_theorem(n).map_err(err)).collect();
    println!("      containment proofs for n = 5, 6, 7 built in {:.1?}", t.elapsed());
    let n7 = proofs[2].as_ref().map_err(Clone::clone);
    ok &= run(7, "n=7 quotient table", || c7_table_n7_quotient(n7?));
    ok &= run(8, "n=7 ambient table", c8_table_n7_ambient);
    ok &= run(9, "certificates", || {
        let bundles: Vec<&ProofBundle> = proofs.iter().map(|p| p.as_ref()).collect::<Result<_, _>>().map_err(Clone::clone)?;
        c9_certificates(&bundles)
    });
    ok &= run(10, "oracle equivalence", c10_oracle);
    ok &= run(11, "quotient coordinates", c11_quotient_goldens);
    ok &= run(12, "effective representation", c12_effective);
    if !ok {
        std::process::exit(1);
    }
}
