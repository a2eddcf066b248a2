//! Running the checks of one or more fixtures and assembling the run report.

use std::collections::BTreeMap;
use std::time::Instant;

use lechkit::multiplicity::{default_e_max, t_cap};
use lechkit::verify::{
    check_chi1_vanishing, check_edim, check_embdim_bounds, check_estimate_44, check_hanes_45,
    check_hk_chain, check_hk_sandwich, check_interchange, check_lech, check_lemma38,
    interchange_input, interchange_input_from_sop, CheckReport, Verdict,
};
use lechkit::Ideal;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::fixture::{eval_poly, CheckKind, CheckSpec, FResult, FixtureError, Workspace};

pub const TOOL_VERSION: &str = concat!("lechkit ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    /// Overrides every check's Frobenius exponent bound.
    pub emax: Option<u32>,
    /// Upper bound applied to every Frobenius exponent.
    pub e_cap: Option<u32>,
    pub degree_cap: Option<u32>,
    pub checks: Option<Vec<CheckKind>>,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, emax: None, e_cap: None, degree_cap: None, checks: None, jobs: 4 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckError {
    pub fixture_id: String,
    pub check_id: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub error: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Caps {
    pub degree_cap: Option<u32>,
    pub t_cap: u32,
    pub e_cap: Option<u32>,
    pub emax_override: Option<u32>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timing {
    pub total_ms: u64,
    pub checks_ms: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool_version: String,
    pub seed: u64,
    pub caps: Caps,
    pub fixtures: Vec<String>,
    pub checks: Vec<CheckReport>,
    pub errors: Vec<CheckError>,
    pub resource_cap_hits: Vec<String>,
    pub summary: Summary,
    pub timing: Timing,
}

impl RunReport {
    /// Key-sorted JSON.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    /// JSON with the timing block removed, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> String {
        strip_timing(&self.to_json())
    }

    pub fn exit_code(&self) -> i32 {
        let s = &self.summary;
        if s.error > 0 {
            3
        } else if s.fail > 0 {
            1
        } else if s.inconclusive > 0 {
            2
        } else {
            0
        }
    }

    pub fn table(&self) -> String {
        let mut rows = vec![[
            "fixture".to_string(),
            "check".to_string(),
            "verdict".to_string(),
            "lhs".to_string(),
            "rhs".to_string(),
        ]];
        for r in &self.checks {
            rows.push([
                r.fixture_id.clone(),
                r.check_id.clone(),
                r.verdict.to_string(),
                r.lhs.clone().unwrap_or_default(),
                r.rhs.clone().unwrap_or_default(),
            ]);
        }
        for e in &self.errors {
            rows.push([
                e.fixture_id.clone(),
                e.check_id.clone(),
                "error".into(),
                String::new(),
                String::new(),
            ]);
        }
        let widths: Vec<usize> =
            (0..5).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &rows {
            let cells: Vec<String> =
                row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        for e in &self.errors {
            out.push_str(&format!("error in {} {}: {}\n", e.fixture_id, e.check_id, e.message));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{} pass, {} fail, {} inconclusive, {} error\n",
            s.pass, s.fail, s.inconclusive, s.error
        ));
        out
    }
}

pub fn strip_timing(json: &str) -> String {
    let mut v: Value = serde_json::from_str(json).expect("valid report JSON");
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timing");
    }
    serde_json::to_string_pretty(&v).expect("value serializes")
}

struct Outcome {
    fixture_id: String,
    check_id: String,
    result: Result<CheckReport, String>,
    elapsed_ms: u64,
}

fn e_max_for(spec: &CheckSpec, p: u32, cfg: &RunConfig) -> u32 {
    let base = cfg.emax.or(spec.emax).unwrap_or_else(|| default_e_max(p));
    match cfg.e_cap {
        Some(cap) => base.min(cap),
        None => base,
    }
}

fn run_check(ws: &Workspace, spec: &CheckSpec, cfg: &RunConfig) -> FResult<CheckReport> {
    let fixture_id = format!("{}:{}", ws.name, spec.target);
    let fid = fixture_id.as_str();
    let ring_of_target = |name: &str| -> FResult<String> {
        Ok(if spec.kind.targets_map() { ws.map_target(name)?.to_string() } else { name.to_string() })
    };
    let p = ws.ring(&ring_of_target(&spec.target)?)?.field().characteristic();
    let e_max = e_max_for(spec, p, cfg);
    let report = match spec.kind {
        CheckKind::Lech => check_lech(fid, &ws.map(&spec.target)?)?,
        CheckKind::Edim => check_edim(fid, &ws.map(&spec.target)?)?,
        CheckKind::HkChain => check_hk_chain(fid, &ws.map(&spec.target)?, e_max)?,
        CheckKind::HkSandwich => {
            let q = ws.ring(&spec.target)?;
            let i = ws.ideal_in(&spec.target, spec.ideal.as_deref().unwrap_or("m"))?;
            check_hk_sandwich(fid, q, &i, e_max)?
        }
        CheckKind::Lemma38 => {
            let q = ws.ring(&spec.target)?;
            check_lemma38(fid, q, spec.adjoin.unwrap_or(1), e_max)?
        }
        CheckKind::Estimate44 => {
            let s = ws.ring(&spec.target)?;
            let Some(sop) = &spec.sop else {
                return Err(FixtureError::Semantic("estimate44 needs `with sop (...)`".into()));
            };
            let x = sop.iter().map(|e| eval_poly(e, s.ring())).collect::<FResult<Vec<_>>>()?;
            let a = match &spec.module {
                Some(name) => ws.ideal_in(&spec.target, name)?,
                None => Ideal::zero(s.ring()),
            };
            check_estimate_44(fid, s, &x, &a)?
        }
        CheckKind::Hanes45 => {
            let map = ws.map(&spec.target)?;
            let src = ws.map_source(&spec.target)?;
            let a = match &spec.module {
                Some(name) => ws.ideal_in(&src, name)?,
                None => Ideal::zero(map.source.ring()),
            };
            check_hanes_45(fid, &map, &a)?
        }
        CheckKind::Interchange | CheckKind::Chi1Vanishing => {
            let fact = ws.cohen(&spec.target, cfg.seed)?;
            let input = match &spec.sop {
                Some(sop) => {
                    let s = ws.ring(ws.map_target(&spec.target)?)?;
                    let x = sop.iter().map(|e| eval_poly(e, s.ring())).collect::<FResult<Vec<_>>>()?;
                    interchange_input_from_sop(&fact, &x)?
                }
                None => interchange_input(&fact, cfg.seed)?,
            };
            if spec.kind == CheckKind::Interchange {
                check_interchange(fid, &input, e_max)?
            } else {
                check_chi1_vanishing(fid, &input, e_max)?
            }
        }
        CheckKind::EmbdimBounds => {
            let map = ws.map(&spec.target)?;
            let fact = ws.cohen(&spec.target, cfg.seed)?;
            check_embdim_bounds(fid, &map, &fact)?
        }
    };
    Ok(report)
}

/// Runs the checks of every workspace on a bounded worker pool. Reports are
/// ordered by fixture id, then check id.
pub fn run(workspaces: &[Workspace], cfg: &RunConfig) -> RunReport {
    let start = Instant::now();
    let jobs: Vec<(&Workspace, &CheckSpec)> = workspaces
        .iter()
        .flat_map(|ws| ws.checks.iter().map(move |c| (ws, c)))
        .filter(|(_, c)| cfg.checks.as_ref().is_none_or(|ks| ks.contains(&c.kind)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .expect("thread pool");
    let mut outcomes: Vec<Outcome> = pool.install(|| {
        jobs.par_iter()
            .map(|(ws, spec)| {
                let t0 = Instant::now();
                let result = run_check(ws, spec, cfg).map_err(|e| e.to_string());
                Outcome {
                    fixture_id: format!("{}:{}", ws.name, spec.target),
                    check_id: spec.kind.id().to_string(),
                    result,
                    elapsed_ms: t0.elapsed().as_millis() as u64,
                }
            })
            .collect()
    });
    outcomes.sort_by(|a, b| (&a.fixture_id, &a.check_id).cmp(&(&b.fixture_id, &b.check_id)));
    let mut report = RunReport {
        tool_version: TOOL_VERSION.to_string(),
        seed: cfg.seed,
        caps: Caps { degree_cap: cfg.degree_cap, t_cap: t_cap(), e_cap: cfg.e_cap, emax_override: cfg.emax },
        fixtures: workspaces.iter().map(|w| w.name.clone()).collect(),
        checks: Vec::new(),
        errors: Vec::new(),
        resource_cap_hits: Vec::new(),
        summary: Summary::default(),
        timing: Timing::default(),
    };
    for o in outcomes {
        let key = format!("{} {}", o.fixture_id, o.check_id);
        *report.timing.checks_ms.entry(key.clone()).or_default() += o.elapsed_ms;
        match o.result {
            Ok(r) => {
                match r.verdict {
                    Verdict::Pass => report.summary.pass += 1,
                    Verdict::Fail => report.summary.fail += 1,
                    Verdict::Inconclusive => {
                        report.summary.inconclusive += 1;
                        report.resource_cap_hits.push(key);
                    }
                }
                report.checks.push(r);
            }
            Err(message) => {
                report.summary.error += 1;
                report.errors.push(CheckError { fixture_id: o.fixture_id, check_id: o.check_id, message });
            }
        }
    }
    report.timing.total_ms = start.elapsed().as_millis() as u64;
    report
}
