use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use orbq_core::autlift::{conformal_weight, cycle_type_of, orbifold_type, power_profile, suggest_type0_beta, LiftSpec};
use orbq_core::lattice::{enumerate_by_norm, level_of, GramLattice, ThetaCache};
use orbq_core::orbifold::{orbifold_character, Orbifold};
use orbq_core::qseries::rational::format_rational;
use orbq_core::qseries::{int, parse_rational, Rational};
use serde_json::json;

use crate::error::CliError;
use crate::fetch::{fetch_lattice, CatalogueRef};
use crate::job::{lift_spec, read_gram, read_matrix, JobSpec};
use crate::report::{render_json, render_text};

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

pub fn lattice_info(path: &Path, norm_bound: i64, as_json: bool) -> Result<String> {
    let l = read_gram(path)?;
    let level = level_of(&l).ok();
    let counts = enumerate_by_norm(&l, &int(norm_bound));
    if as_json {
        let theta: serde_json::Map<String, serde_json::Value> =
            counts.iter().map(|(n, c)| (format_rational(n), json!(c))).collect();
        return Ok(serde_json::to_string_pretty(&json!({
            "dim": l.dim(),
            "det": format_rational(&l.det()),
            "integral": l.is_integral(),
            "even": l.is_even(),
            "unimodular": l.is_unimodular(),
            "level": level,
            "theta": theta,
        }))?);
    }
    let mut s = String::new();
    writeln!(s, "dim         {}", l.dim())?;
    writeln!(s, "det         {}", format_rational(&l.det()))?;
    writeln!(s, "even        {}", l.is_even())?;
    writeln!(s, "unimodular  {}", l.is_unimodular())?;
    if let Some(n) = level {
        writeln!(s, "level       {n}")?;
    }
    writeln!(s, "norm  count")?;
    for (n, c) in &counts {
        writeln!(s, "{:>4}  {c}", format_rational(n))?;
    }
    Ok(s)
}

pub fn parse_beta(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_rational(t).ok_or_else(|| CliError::Job(format!("bad beta entry {t:?}"))))
        .collect()
}

fn describe(spec: &LiftSpec) -> serde_json::Value {
    let ty = orbifold_type(spec);
    json!({
        "beta": rationals(spec.beta()),
        "lift_order": spec.hat_order(),
        "case": spec.case(),
        "conformal_weight": format_rational(&conformal_weight(spec)),
        "type": ty.as_ref().ok(),
        "type_error": ty.as_ref().err().map(|e| e.to_string()),
    })
}

pub fn aut_analyze(gram: &Path, aut: &Path, beta: Option<&str>, as_json: bool) -> Result<String> {
    let l = read_gram(gram)?;
    let a = read_matrix(aut)?;
    let beta = beta.map(parse_beta).transpose()?;
    let explicit = beta.is_some();
    let spec = lift_spec(&l, &a, beta)?;
    let base = spec.base();
    let profile = power_profile(&spec);
    let rows: Vec<serde_json::Value> = profile
        .entries
        .iter()
        .map(|e| json!({"k": e.k, "cycle_type": e.cycle_type.to_string(), "fixed_rank": e.fixed.rank(), "phase_order": e.w.order()}))
        .collect();
    let ty = orbifold_type(&spec).ok();
    let suggestions: Vec<serde_json::Value> = if ty != Some(0) && !explicit && base.fixed_rank(1) > 0 {
        match suggest_type0_beta(base) {
            Ok(v) => v.iter().take(5).map(describe).collect(),
            Err(e) => {
                log::info!("no type-0 lift: {e}");
                Vec::new()
            }
        }
    } else {
        Vec::new()
    };
    if as_json {
        return Ok(serde_json::to_string_pretty(&json!({
            "order": base.order(),
            "cycle_type": cycle_type_of(base, 1).to_string(),
            "fixed_rank": base.fixed_rank(1),
            "lift": describe(&spec),
            "powers": rows,
            "type0_suggestions": suggestions,
        }))?);
    }
    let d = describe(&spec);
    let mut s = String::new();
    writeln!(s, "order            {}", base.order())?;
    writeln!(s, "cycle type       {}", cycle_type_of(base, 1))?;
    writeln!(s, "fixed rank       {}", base.fixed_rank(1))?;
    writeln!(s, "lift             {}", spec.case())?;
    writeln!(s, "lift order       {}", spec.hat_order())?;
    writeln!(s, "rho              {}", d["conformal_weight"].as_str().unwrap_or_default())?;
    match orbifold_type(&spec) {
        Ok(t) => writeln!(s, "type             {t}")?,
        Err(e) => writeln!(s, "type             undefined ({e})")?,
    }
    writeln!(s, "\n  k  cycle type  fixed rank  phase order")?;
    for e in &profile.entries {
        writeln!(s, "{:>3}  {:<10}  {:>10}  {:>11}", e.k, e.cycle_type.to_string(), e.fixed.rank(), e.w.order())?;
    }
    if !suggestions.is_empty() {
        writeln!(s, "\ntype-0 lifts (beta in lattice coordinates):")?;
        for v in &suggestions {
            let b: Vec<&str> = v["beta"].as_array().into_iter().flatten().filter_map(|x| x.as_str()).collect();
            writeln!(s, "  beta = ({})  order {}  rho {}", b.join(", "), v["lift_order"], v["conformal_weight"].as_str().unwrap_or_default())?;
        }
    }
    Ok(s)
}

/// Where a job's reports go: (text, JSON).
pub fn report_paths(report: &Path) -> (PathBuf, PathBuf) {
    if report.extension().is_some_and(|e| e == "json") {
        (report.with_extension("txt"), report.to_path_buf())
    } else {
        (report.to_path_buf(), report.with_extension("json"))
    }
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

pub struct JobOutcome {
    pub classification: String,
    pub text: String,
    pub json: serde_json::Value,
}

pub fn run_job(job: &Path, trunc_override: Option<i64>) -> Result<JobOutcome> {
    let mut spec = JobSpec::load(job)?;
    if let Some(w) = trunc_override {
        if w < 1 {
            return Err(CliError::Job(format!("trunc weight must be at least 1, got {w}")).into());
        }
        spec.trunc_weight = w;
    }
    let input = spec.input()?;
    let classification = format!("{} (order {}, cycle type {})", input.lift_case(), input.order(), input.cycle_type());
    eprintln!("{classification}");
    let start = Instant::now();
    let orb = Orbifold::new(input, spec.trunc_weight, spec.cache());
    let report = orbifold_character(&orb)?;
    eprintln!("computed in {:.2?} ({} theta series)", start.elapsed(), report.thetas_computed);
    let text = render_text(&report);
    let json = render_json(&report);
    if let Some(path) = &spec.report {
        let (tp, jp) = report_paths(path);
        if [&tp, &jp].iter().any(|p| same_file(p, job)) {
            return Err(CliError::Job(format!("report {} would overwrite the job file", path.display())).into());
        }
        if let Some(dir) = tp.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(&tp, &text).with_context(|| format!("writing {}", tp.display()))?;
        fs::write(&jp, serde_json::to_string_pretty(&json)? + "\n").with_context(|| format!("writing {}", jp.display()))?;
    }
    Ok(JobOutcome { classification, text, json })
}

pub fn fetch(name: &str, dim: Option<usize>, url: Option<String>, cache_dir: &Path, force_minimum: bool) -> Result<String> {
    let r = CatalogueRef::new(name, dim, url, cache_dir)?;
    let (l, v, cached): (GramLattice, _, _) = fetch_lattice(&r, force_minimum)?;
    let mut s = String::new();
    writeln!(s, "{} ({}): dim {}, even, det 1", r.name, if cached { "cached" } else { "downloaded" }, l.dim())?;
    if v.minimum_checked {
        writeln!(s, "minimum ≥ {} verified", 2 + 2 * (v.dim / 24))?;
    } else {
        writeln!(s, "minimum not checked (pass --check-minimum to enumerate)")?;
    }
    writeln!(s, "{}", r.cache_path.display())?;
    Ok(s)
}

pub fn cache_ls(dir: &Path) -> String {
    let cache = ThetaCache::new(dir);
    let mut s = String::new();
    for e in cache.list() {
        let _ = writeln!(s, "{}  {:>6} entries  {:>8} bytes  {}", &e.key[..16], e.entries, e.bytes, e.preimage.chars().take(60).collect::<String>());
    }
    let lattices = dir.join("lattices");
    if let Ok(rd) = fs::read_dir(&lattices) {
        let mut names: Vec<String> = rd.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
        names.sort();
        for n in names {
            let _ = writeln!(s, "lattices/{n}");
        }
    }
    s
}

pub fn cache_gc(dir: &Path) -> Result<String> {
    let n = ThetaCache::new(dir).gc()?;
    Ok(format!("removed {n} file(s)\n"))
}
