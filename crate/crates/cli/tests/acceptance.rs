//! Acceptance suite: one PASS/FAIL line per criterion.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use lechkit::extensions::is_ci_fiber;
use lechkit::multiplicity::{default_e_max, hilbert_samuel, hk_sequence, multiplicity};
use lechkit::verify::{check_edim, check_hk_sandwich, check_lemma38, CheckReport, Verdict};
use lechkit::{Ideal, QuotientRing, Rational, StandardMonomials};
use lechkit_cli::fixture::{BuildOptions, CheckKind, Workspace};
use lechkit_cli::harness::{run, strip_timing, RunConfig, RunReport};
use lechkit_cli::registry;
use oracle::{box_colength, hs_multiplicity, ring, staircase, to_lib, Terms};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn e_max_for(p: u32) -> u32 {
    3.min(default_e_max(p))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    ensure(start.elapsed() <= limit, || format!("took {:?}, limit {limit:?}", start.elapsed()))
}

fn verdict_ok(r: &CheckReport) -> Result<(), String> {
    ensure(r.verdict == Verdict::Pass, || {
        let failed: Vec<&str> = r.failed_comparisons().map(|c| c.label.as_str()).collect();
        format!("{} {} is {} ({})", r.fixture_id, r.check_id, r.verdict, failed.join("; "))
    })
}

fn corpus() -> Vec<Workspace> {
    registry::load_all(&BuildOptions { degree_cap: None }).expect("corpus builds")
}

fn random_exps(rng: &mut ChaCha8Rng, n: usize, max_deg: u16) -> Vec<u16> {
    loop {
        let e: Vec<u16> = (0..n).map(|_| rng.gen_range(0..=max_deg)).collect();
        let d: u16 = e.iter().sum();
        if d >= 1 && d <= max_deg {
            return e;
        }
    }
}

fn colength_of(p: u32, n: usize, gens: &[Terms]) -> Result<u64, String> {
    let names = ["x", "y", "z"];
    let r = ring(p, &names[..n]);
    let i = Ideal::new(&r, gens.iter().map(|g| to_lib(&r, g)).collect()).map_err(|e| e.to_string())?;
    match i.standard_monomials().map_err(|e| e.to_string())? {
        StandardMonomials::Finite(ms) => Ok(ms.len() as u64),
        StandardMonomials::Infinite => Err("infinite staircase".into()),
    }
}

fn c1_kernel_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut monomial, mut binomial) = (0, 0);
    for k in 0..60 {
        let n = rng.gen_range(1..=3usize);
        let bounds: Vec<u16> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
        let mut gens: Vec<Terms> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = bounds[i];
                vec![(1, e)]
            })
            .collect();
        let extra = rng.gen_range(0..=3);
        let binomial_case = k % 2 == 1;
        for _ in 0..extra {
            let a = random_exps(&mut rng, n, 4);
            if binomial_case {
                let b = random_exps(&mut rng, n, 4);
                if a != b {
                    gens.push(vec![(1, a), (-(rng.gen_range(1..5)), b)]);
                }
            } else {
                gens.push(vec![(1, a)]);
            }
        }
        let got = colength_of(5, n, &gens)?;
        let want = if binomial_case {
            box_colength(5, &bounds, &gens)
        } else {
            let ms: Vec<Vec<u16>> = gens.iter().map(|g| g[0].1.clone()).collect();
            staircase(&ms, &bounds)
        };
        ensure(got == want, || format!("ideal #{k} {gens:?}: kernel {got}, oracle {want}"))?;
        if binomial_case {
            binomial += 1;
        } else {
            monomial += 1;
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("{monomial} monomial and {binomial} binomial ideals agree"))
}

fn c2_multiplicity_anchors() -> Outcome {
    let start = Instant::now();
    let mut regular = 0;
    for ws in corpus() {
        for name in ws.ring_names() {
            let q = ws.ring(name).unwrap();
            if q.is_polynomial_ring().unwrap() {
                let e = multiplicity(q).map_err(|e| e.to_string())?.e;
                ensure(e == 1, || format!("{}:{name} is regular with e = {e}", ws.name))?;
                regular += 1;
            }
        }
    }
    let curves: [(&str, Terms, u64); 5] = [
        ("cusp", vec![(1, vec![0, 2]), (-1, vec![3, 0])], 2),
        ("tacnode", vec![(1, vec![0, 2]), (-1, vec![4, 0])], 2),
        ("y2-x5", vec![(1, vec![0, 2]), (-1, vec![5, 0])], 2),
        ("y3-x4", vec![(1, vec![0, 3]), (-1, vec![4, 0])], 3),
        ("cone", vec![(1, vec![1, 0, 1]), (-1, vec![0, 2, 0])], 2),
    ];
    let mut anchors = Vec::new();
    for (name, rel, order) in curves {
        let n = rel[0].1.len();
        let names = ["x", "y", "z"];
        let r = ring(5, &names[..n]);
        let q = QuotientRing::new(&r, vec![to_lib(&r, &rel)]).unwrap();
        let oracle = hs_multiplicity(5, n, &[rel], n as u32 - 1, 10);
        let e = multiplicity(&q).map_err(|e| e.to_string())?.e;
        ensure(e == oracle && e == order, || format!("{name}: kernel {e}, oracle {oracle}, order {order}"))?;
        anchors.push(format!("{name} {e}"));
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("{regular} regular rings have e = 1; {}", anchors.join(", ")))
}

fn c3_parameter_exactness() -> Outcome {
    let mut seen = 0;
    for ws in corpus() {
        for spec in ws.checks.iter().filter(|c| c.kind == CheckKind::HkSandwich) {
            let Some(ideal) = &spec.ideal else { continue };
            let q = ws.ring(&spec.target).unwrap();
            let i = ws.ideal_in(&spec.target, ideal).unwrap();
            let e = hilbert_samuel(q, &i).map_err(|e| e.to_string())?.e;
            let seq = hk_sequence(q, &i, e_max_for(q.field().characteristic())).map_err(|e| e.to_string())?;
            let label = format!("{}:{} ideal {ideal}", ws.name, spec.target);
            ensure(!seq.truncated, || format!("{label}: sequence truncated"))?;
            for (lvl, v) in &seq.estimates {
                ensure(*v == Rational::from_integer(e as i128), || {
                    format!("{label}: estimate {v} at e = {lvl}, e(I) = {e}")
                })?;
            }
            seen += 1;
        }
    }
    ensure(seen > 0, || "no fixture declares a parameter ideal".into())?;
    Ok(format!("{seen} parameter ideals have constant HK sequences equal to e(I)"))
}

fn c4_sandwich() -> Outcome {
    let mut n = 0;
    let mut exact = 0;
    for ws in corpus() {
        for name in ws.ring_names() {
            let q = ws.ring(name).unwrap();
            let fid = format!("{}:{name}", ws.name);
            let r = check_hk_sandwich(&fid, q, &q.maximal_ideal(), e_max_for(q.field().characteristic()))
                .map_err(|e| format!("{fid}: {e}"))?;
            verdict_ok(&r)?;
            if q.is_polynomial_ring().unwrap() {
                ensure(r.tolerance == Rational::from_integer(0), || format!("{fid}: regular ring not exact"))?;
                exact += 1;
            }
            n += 1;
        }
    }
    Ok(format!("{n} rings pass, {exact} of them exactly"))
}

fn c5_adjunction() -> Outcome {
    let start = Instant::now();
    let bases = [("cusp_f2", "L"), ("cusp_f2", "C"), ("cone", "P"), ("cone", "R"), ("node", "N"), ("node", "D")];
    let all = corpus();
    let mut primes = BTreeSet::new();
    for (file, name) in bases {
        let ws = all.iter().find(|w| w.name == file).unwrap();
        let q = ws.ring(name).unwrap();
        for adjoin in 1..=2 {
            let fid = format!("{file}:{name}");
            let r = check_lemma38(&fid, q, adjoin, 2).map_err(|e| format!("{fid}: {e}"))?;
            verdict_ok(&r)?;
        }
        primes.insert(q.field().characteristic());
    }
    ensure(primes.contains(&2) && primes.contains(&3), || format!("primes covered: {primes:?}"))?;
    within(Duration::from_secs(120), start)?;
    Ok(format!("{} base rings, 1 and 2 adjoined variables, e <= 2, p in {primes:?}", bases.len()))
}

fn c6_structure() -> Outcome {
    let mut maps = 0;
    let mut ci = 0;
    for ws in corpus() {
        let names: Vec<String> = ws.map_names().cloned().collect();
        for name in names {
            let fid = format!("{}:{name}", ws.name);
            let map = ws.map(&name).map_err(|e| format!("{fid}: {e}"))?;
            verdict_ok(&check_edim(&fid, &map).map_err(|e| e.to_string())?)?;
            let c = map.edim_difference().unwrap();
            if c <= 1 {
                ensure(is_ci_fiber(&map), || format!("{fid}: c = {c} but fibre is not a complete intersection"))?;
                ci += 1;
            }
            let f = ws.cohen(&name, 7).map_err(|e| format!("{fid}: {e}"))?;
            ensure(f.j_in_square().unwrap(), || format!("{fid}: J is not inside n_T^2"))?;
            let expected = f.edim_r as i64 + f.c;
            ensure(f.edim_t as i64 == expected, || format!("{fid}: edim T = {}, edim R + c = {expected}", f.edim_t))?;
            maps += 1;
        }
    }
    Ok(format!("{maps} maps; {ci} with c <= 1 have complete-intersection fibres"))
}

fn reports<'a>(report: &'a RunReport, id: &'a str) -> impl Iterator<Item = &'a CheckReport> {
    report.checks.iter().filter(move |r| r.check_id == id)
}

fn no_errors(report: &RunReport, id: &str) -> Result<(), String> {
    match report.errors.iter().find(|e| e.check_id == id) {
        Some(e) => Err(format!("{} {}: {}", e.fixture_id, e.check_id, e.message)),
        None => Ok(()),
    }
}

fn c7_headline(report: &RunReport, elapsed: Duration) -> Outcome {
    no_errors(report, "lech")?;
    let mut fixtures = 0;
    let mut primes = BTreeSet::new();
    let mut dims = BTreeSet::new();
    let all = corpus();
    for r in reports(report, "lech") {
        verdict_ok(r)?;
        fixtures += 1;
        let (file, map) = r.fixture_id.split_once(':').unwrap();
        let ws = all.iter().find(|w| w.name == file).unwrap();
        let m = ws.map(map).unwrap();
        primes.insert(m.source.field().characteristic());
        dims.insert(m.source.dim().unwrap());
    }
    ensure(fixtures >= 10, || format!("only {fixtures} lech fixtures"))?;
    ensure(dims.iter().all(|&d| d <= 3), || format!("dimensions {dims:?}"))?;
    ensure(elapsed <= Duration::from_secs(300), || format!("corpus took {elapsed:?}"))?;
    Ok(format!(
        "{fixtures} flat maps, p in {primes:?}, d in {dims:?}; whole corpus in {} ms",
        elapsed.as_millis()
    ))
}

fn c8_interchange(report: &RunReport) -> Outcome {
    no_errors(report, "interchange")?;
    let (mut exact, mut monotone) = (0, 0);
    for r in reports(report, "interchange") {
        verdict_ok(r)?;
        if r.tables.get("exact_case").and_then(|v| v.as_bool()) == Some(true) {
            exact += 1;
        } else {
            monotone += 1;
        }
    }
    ensure(exact >= 3 && monotone >= 3, || format!("{exact} exact and {monotone} monotone fixtures"))?;
    Ok(format!("{exact} exact, {monotone} monotone"))
}

fn c9_chi1(report: &RunReport) -> Outcome {
    no_errors(report, "chi1_vanishing")?;
    let mut n = 0;
    let mut zero = 0;
    for r in reports(report, "chi1_vanishing") {
        verdict_ok(r)?;
        n += 1;
        if r.tables.get("exact_case").and_then(|v| v.as_bool()) == Some(true) {
            let table = r.tables["chi1_normalized"].as_object().unwrap();
            ensure(table.values().all(|v| v == "0/1"), || format!("{}: χ₁ not identically 0", r.fixture_id))?;
            zero += 1;
        }
    }
    let interchange = reports(report, "interchange").count();
    ensure(n == interchange, || format!("{n} chi1 checks for {interchange} interchange fixtures"))?;
    Ok(format!("{n} fixtures non-negative and non-increasing, {zero} identically zero"))
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("run{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_lechkit"))
            .args(["fixtures", "run-all", "--seed", "7", "--json"])
            .arg(&path)
            .env_remove("LECH_DEGREE_CAP")
            .env_remove("LECH_T_CAP")
            .env_remove("LECH_E_CAP")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.code() == Some(0), || format!("run {k} exited with {:?}", status.status.code()))?;
        outputs.push(strip_timing(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?));
    }
    ensure(outputs[0] == outputs[1], || "reports differ".into())?;
    Ok(format!("two runs with seed 7 give identical {}-byte reports", outputs[0].len()))
}

fn main() {
    let corpus_start = Instant::now();
    let all = corpus();
    let report = run(&all, &RunConfig { seed: 7, ..RunConfig::default() });
    let corpus_time = corpus_start.elapsed();

    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome + '_>)> = vec![
        ("kernel oracle equivalence", Box::new(c1_kernel_oracle)),
        ("multiplicity anchors", Box::new(c2_multiplicity_anchors)),
        ("parameter-ideal exactness", Box::new(c3_parameter_exactness)),
        ("sandwich property", Box::new(c4_sandwich)),
        ("adjunction identity", Box::new(c5_adjunction)),
        ("structure checks", Box::new(c6_structure)),
        ("headline inequalities", Box::new(|| c7_headline(&report, corpus_time))),
        ("interchange equality", Box::new(|| c8_interchange(&report))),
        ("chi1 vanishing trend", Box::new(|| c9_chi1(&report))),
        ("determinism", Box::new(c10_determinism)),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {ms} ms)", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why}; {ms} ms)", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria pass");
}
