//! Command implementations. Each returns the text to print and an exit code
//! so the binary stays a thin wrapper.

use std::fmt::Write as _;
use std::path::Path;

use lechkit::extensions::{specialize_mod_p, Specialization};
use lechkit::multiplicity::{hilbert_samuel, hk_sequence, set_t_cap, t_cap};

use crate::fixture::{BuildOptions, CheckKind, FResult, FixtureError, Workspace};
use crate::harness::{run, RunConfig, RunReport};
use crate::registry;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Default)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(stdout: String) -> Output {
        Output { code: EXIT_PASS, stdout, stderr: String::new() }
    }

    pub fn error(e: impl std::fmt::Display) -> Output {
        Output { code: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

/// Resource caps read from `LECH_DEGREE_CAP`, `LECH_T_CAP` and `LECH_E_CAP`.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnvCaps {
    pub degree_cap: Option<u32>,
    pub t_cap: Option<u32>,
    pub e_cap: Option<u32>,
}

impl EnvCaps {
    pub fn from_env() -> Result<EnvCaps, FixtureError> {
        let read = |key: &str| -> Result<Option<u32>, FixtureError> {
            match std::env::var(key) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| FixtureError::Semantic(format!("{key}={v} is not a number"))),
                Err(_) => Ok(None),
            }
        };
        Ok(EnvCaps {
            degree_cap: read("LECH_DEGREE_CAP")?,
            t_cap: read("LECH_T_CAP")?,
            e_cap: read("LECH_E_CAP")?,
        })
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions { degree_cap: self.degree_cap }
    }
}

/// Loads a fixture from disk, falling back to the shipped corpus by name.
pub fn load(file: &str, caps: &EnvCaps) -> FResult<Workspace> {
    let path = Path::new(file);
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(file).to_string();
    let opts = caps.build_options();
    match std::fs::read(path) {
        Ok(bytes) => Workspace::from_bytes(&stem, &bytes, &opts),
        Err(err) => match registry::get(&stem) {
            Some(text) if !path.exists() => Workspace::from_text(&stem, text, &opts),
            _ => Err(FixtureError::Semantic(format!("cannot read {file}: {err}"))),
        },
    }
}

fn run_or_error(f: impl FnOnce() -> FResult<Output>) -> Output {
    f().unwrap_or_else(Output::error)
}

pub fn gb(file: &str, name: &str, caps: &EnvCaps) -> Output {
    run_or_error(|| {
        let ws = load(file, caps)?;
        let (ring_name, ideal) = match ws.ring(name) {
            Ok(q) => (name.to_string(), q.defining().clone()),
            Err(_) => {
                let (r, i) = ws.ideal(name)?;
                let q = ws.ring(&r)?;
                (r, q.extend_ideal(&i)?)
            }
        };
        let gb = ideal.groebner()?;
        let mut out = String::new();
        writeln!(out, "reduced Groebner basis of {name} in {ring_name} (grevlex):").unwrap();
        for g in gb.generators() {
            writeln!(out, "  {g}").unwrap();
        }
        if gb.generators().is_empty() {
            writeln!(out, "  (zero ideal)").unwrap();
        }
        Ok(Output::ok(out))
    })
}

pub fn length(file: &str, ring: &str, ideal: &str, caps: &EnvCaps) -> Output {
    run_or_error(|| {
        let ws = load(file, caps)?;
        let q = ws.ring(ring)?;
        let i = ws.ideal_in(ring, ideal)?;
        let rep = q.local_length(&i)?;
        let mut out = String::new();
        writeln!(out, "global colength: {}", rep.global_colength).unwrap();
        writeln!(out, "away from the origin: {}", rep.away_colength).unwrap();
        writeln!(out, "local length: {}", rep.local_length).unwrap();
        Ok(Output::ok(out))
    })
}

pub fn mult(file: &str, ring: &str, ideal: Option<&str>, caps: &EnvCaps) -> Output {
    run_or_error(|| {
        let ws = load(file, caps)?;
        let q = ws.ring(ring)?;
        let i = ws.ideal_in(ring, ideal.unwrap_or("m"))?;
        let rep = hilbert_samuel(q, &i)?;
        let mut out = String::new();
        writeln!(out, "e = {}", rep.e).unwrap();
        writeln!(out, "dim = {}", rep.dim_used).unwrap();
        writeln!(out, "t  length").unwrap();
        for (t, l) in &rep.length_table {
            writeln!(out, "{t:<2} {l}").unwrap();
        }
        Ok(Output::ok(out))
    })
}

pub fn hk(file: &str, ring: &str, ideal: &str, emax: u32, caps: &EnvCaps) -> Output {
    run_or_error(|| {
        let ws = load(file, caps)?;
        let q = ws.ring(ring)?;
        let i = ws.ideal_in(ring, ideal)?;
        let emax = caps.e_cap.map_or(emax, |c| emax.min(c));
        let seq = hk_sequence(q, &i, emax)?;
        let mut out = String::new();
        writeln!(out, "e  q    length  estimate").unwrap();
        for (e, l) in &seq.lengths {
            let q = seq.p.pow(*e);
            writeln!(out, "{e:<2} {q:<4} {l:<7} {}", seq.estimates[e]).unwrap();
        }
        match seq.last() {
            Some((e, v)) => writeln!(out, "Hilbert-Kunz estimate at e = {e}: {v}").unwrap(),
            None => writeln!(out, "no level computed within the caps").unwrap(),
        }
        let code = if seq.truncated {
            writeln!(out, "sequence truncated by the degree cap").unwrap();
            EXIT_INCONCLUSIVE
        } else {
            EXIT_PASS
        };
        Ok(Output { code, stdout: out, stderr: String::new() })
    })
}

pub fn cohen(file: &str, map: &str, seed: u64, caps: &EnvCaps) -> Output {
    run_or_error(|| {
        let ws = load(file, caps)?;
        let m = ws.map(map)?;
        let f = ws.cohen(map, seed)?;
        let mut out = String::new();
        let t = &f.t_ring;
        writeln!(out, "flatness: {}", m.flat_tag).unwrap();
        writeln!(out, "closed fibre length: {}", m.fiber.length).unwrap();
        writeln!(out, "T = F[{}]", t.ring().vars().join(", ")).unwrap();
        for g in t.defining().gens() {
            writeln!(out, "  relation {g}").unwrap();
        }
        for g in f.j.gens() {
            writeln!(out, "J contains {g}").unwrap();
        }
        let names = ws.ring(ws.map_target(map)?)?.ring().vars().to_vec();
        for (v, l) in names.iter().zip(&f.lift) {
            writeln!(out, "{v} lifts to {l}").unwrap();
        }
        writeln!(out, "edim R = {}, edim S = {}, edim T = {}", f.edim_r, f.edim_s, f.edim_t).unwrap();
        writeln!(out, "c = {}", f.c).unwrap();
        writeln!(out, "J in n_T^2: {}", f.j_in_square()?).unwrap();
        Ok(Output::ok(out))
    })
}

pub struct VerifyArgs<'a> {
    pub checks: Option<Vec<String>>,
    pub seed: u64,
    pub emax: Option<u32>,
    pub tmax: Option<u32>,
    pub json: Option<&'a Path>,
    pub jobs: usize,
}

fn run_config(args: &VerifyArgs<'_>, caps: &EnvCaps) -> FResult<RunConfig> {
    let checks = match &args.checks {
        None => None,
        Some(list) => Some(
            list.iter()
                .map(|c| {
                    CheckKind::from_id(c)
                        .ok_or_else(|| FixtureError::Semantic(format!("unknown check `{c}`")))
                })
                .collect::<FResult<Vec<_>>>()?,
        ),
    };
    if let Some(t) = args.tmax.or(caps.t_cap) {
        set_t_cap(t);
    }
    Ok(RunConfig {
        seed: args.seed,
        emax: args.emax,
        e_cap: caps.e_cap,
        degree_cap: caps.degree_cap,
        checks,
        jobs: args.jobs,
    })
}

fn finish_run(report: RunReport, json: Option<&Path>) -> FResult<Output> {
    if let Some(path) = json {
        std::fs::write(path, report.to_json())
            .map_err(|e| FixtureError::Semantic(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Output { code: report.exit_code(), stdout: report.table(), stderr: String::new() })
}

pub fn verify(file: &str, args: &VerifyArgs<'_>, caps: &EnvCaps) -> Output {
    run_or_error(|| {
        let cfg = run_config(args, caps)?;
        let ws = load(file, caps)?;
        finish_run(run(&[ws], &cfg), args.json)
    })
}

pub fn fixtures_list() -> Output {
    let mut out = String::new();
    let width = registry::FIXTURES.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    for (name, text) in registry::FIXTURES {
        writeln!(out, "{name:<width$}  {}", registry::description(text)).unwrap();
    }
    Output::ok(out)
}

pub fn fixtures_run_all(args: &VerifyArgs<'_>, caps: &EnvCaps) -> Output {
    run_or_error(|| {
        let cfg = run_config(args, caps)?;
        let all = registry::load_all(&caps.build_options())?;
        finish_run(run(&all, &cfg), args.json)
    })
}

pub fn specialize(file: &str, map: &str, primes: &[u32], caps: &EnvCaps) -> Output {
    run_or_error(|| {
        let ws = load(file, caps)?;
        let pres = ws.integer_presentation(map)?;
        let mut out = String::new();
        let mut bad = 0;
        for &p in primes {
            match specialize_mod_p(&pres, p)? {
                Specialization::Good(m) => writeln!(
                    out,
                    "p = {p}: good (fibre length {}, flatness {})",
                    m.fiber.length, m.flat_tag
                )
                .unwrap(),
                Specialization::BadPrime { reason, .. } => {
                    bad += 1;
                    writeln!(out, "p = {p}: bad ({reason})").unwrap()
                }
            }
        }
        writeln!(out, "{} of {} primes are bad", bad, primes.len()).unwrap();
        Ok(Output::ok(out))
    })
}

pub fn current_t_cap() -> u32 {
    t_cap()
}
