//! Subcommand implementations. Tables are long-format CSV
//! (`center_index,r,quantity,value`); summaries are versioned JSON.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rectiscope::density::{chop, density_profile, upper_regularity_constant};
use rectiscope::io::{fmt_f64, read_path, write_csv, write_path};
use rectiscope::verify::{
    check_beta_vs_curv, check_holder_chain, check_jones_vs_curv, check_volume_identity, InequalityReport,
};
use rectiscope::{
    beta_p, curv_estimate, find_secant_frame, generate, jones_function, theoretical_constants, BetaVariant,
    DiscreteMeasure, Error, SecantConfig,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Centers, RunConfig, Suite};
use crate::{json, CliError, Command};

/// Bumped on any breaking change to the summary layout.
pub const SCHEMA_VERSION: u32 = 1;

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(command: &Command, cfg: &RunConfig) -> Result<()> {
    match command {
        Command::Generate(_) => run_generate(cfg),
        Command::Beta(_) => run_beta(cfg),
        Command::Curv(_) => run_curv(cfg),
        Command::Jones(_) => run_jones(cfg),
        Command::Secant(_) => run_secant(cfg),
        Command::Density(_) => run_density(cfg),
        Command::Chop(_) => run_chop(cfg),
        Command::Verify(_) => run_verify(cfg),
        Command::Report(_) => run_report(cfg),
    }
}

fn load_measure(cfg: &RunConfig) -> Result<DiscreteMeasure> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    read_path(path, cfg.n).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn select_centers(cfg: &RunConfig, mu: &DiscreteMeasure) -> Result<Vec<usize>> {
    let centers: Centers = cfg.centers.parse().map_err(CliError::Usage)?;
    let n = mu.len();
    match centers {
        Centers::All => Ok((0..n).collect()),
        Centers::Sample(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut picked = rand::seq::index::sample(&mut rng, n, k.min(n)).into_vec();
            picked.sort_unstable();
            Ok(picked)
        }
        Centers::File(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let mut picked = Vec::new();
            for (line, raw) in text.lines().enumerate() {
                let raw = raw.trim();
                if raw.is_empty() {
                    continue;
                }
                let i: usize = raw.parse().map_err(|_| {
                    CliError::Input(format!("{} line {}: not an atom index: {raw:?}", path.display(), line + 1))
                })?;
                if i >= n {
                    return Err(CliError::Input(format!(
                        "{} line {}: index {i} out of range for {n} atoms",
                        path.display(),
                        line + 1
                    )));
                }
                picked.push(i);
            }
            Ok(picked)
        }
    }
}

fn write_to(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_error(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("cannot write {}: {e}", path.display()))
}

#[derive(Default)]
struct Table {
    rows: Vec<(usize, f64, &'static str, f64)>,
}

impl Table {
    fn push(&mut self, center: usize, r: f64, quantity: &'static str, value: f64) {
        self.rows.push((center, r, quantity, value));
    }

    fn render(&self) -> String {
        let mut out = String::from("center_index,r,quantity,value\n");
        for (c, r, q, v) in &self.rows {
            out.push_str(&format!("{c},{},{q},{}\n", fmt_f64(*r), fmt_f64(*v)));
        }
        out
    }
}

fn measure_summary(mu: &DiscreteMeasure) -> Value {
    json!({
        "hash": mu.content_hash(),
        "points": mu.len(),
        "ambient_dim": mu.ambient_dim(),
        "intrinsic_dim": mu.intrinsic_dim(),
        "total_mass": mu.total_mass(),
    })
}

fn summary(command: &str, cfg: &RunConfig, mu: Option<&DiscreteMeasure>, results: impl Serialize) -> Result<String> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "rectiscope", "version": env!("CARGO_PKG_VERSION")},
        "command": command,
        "config": cfg,
        "measure": mu.map(measure_summary),
        "results": results,
    });
    json::to_string(&doc).map_err(|e| CliError::Input(format!("cannot serialize summary: {e}")))
}

/// Writes the table to `output` (or stdout) and the summary to `report`.
fn emit_table(command: &str, cfg: &RunConfig, mu: &DiscreteMeasure, table: &Table, results: impl Serialize) -> Result<()> {
    write_to(cfg.output.as_ref(), &table.render())?;
    if let Some(report) = &cfg.report {
        write_to(Some(report), &summary(command, cfg, Some(mu), results)?)?;
    }
    Ok(())
}

/// Writes a JSON-only result to `report`, else `output`, else stdout.
fn emit_json(command: &str, cfg: &RunConfig, mu: Option<&DiscreteMeasure>, results: impl Serialize) -> Result<()> {
    let text = summary(command, cfg, mu, results)?;
    write_to(cfg.report.as_ref().or(cfg.output.as_ref()), &text)
}

fn run_generate(cfg: &RunConfig) -> Result<()> {
    let mu = generate(&cfg.generator)?;
    match &cfg.output {
        Some(path) => write_path(&mu, path)?,
        None => write_csv(&mu, std::io::stdout().lock())?,
    }
    if let Some(report) = &cfg.report {
        write_to(Some(report), &summary("generate", cfg, Some(&mu), json!({}))?)?;
    }
    Ok(())
}

fn beta_variant(cfg: &RunConfig) -> BetaVariant {
    if cfg.centered {
        BetaVariant::Centered
    } else {
        BetaVariant::Uncentered
    }
}

fn run_beta(cfg: &RunConfig) -> Result<()> {
    let mu = load_measure(cfg)?;
    let centers = select_centers(cfg, &mu)?;
    if cfg.p != 2.0 && (cfg.centered || cfg.dini_gamma.is_some()) {
        return Err(CliError::Usage("--centered and --dini-gamma need p = 2".into()));
    }
    cfg.scales.validate()?;
    let radii = cfg.scales.radii();
    let per_center: Vec<(Vec<f64>, Vec<f64>)> = centers
        .par_iter()
        .map(|&c| -> rectiscope::Result<_> {
            let x = mu.point(c);
            if cfg.p == 2.0 {
                let j = jones_function(&mu, x, cfg.alpha, &cfg.scales, beta_variant(cfg), cfg.dini_gamma)?;
                Ok((j.profile.values.clone(), j.partial_sums))
            } else {
                let mut betas = Vec::with_capacity(radii.len());
                let mut partial = Vec::with_capacity(radii.len());
                let mut running = 0.0;
                for &r in &radii {
                    let b = beta_p(&mu, x, r, cfg.p)?.value;
                    running += (b / r.powf(cfg.alpha)).powf(cfg.p);
                    betas.push(b);
                    partial.push(running);
                }
                Ok((betas, partial))
            }
        })
        .collect::<rectiscope::Result<_>>()?;
    let mut table = Table::default();
    let mut results = Vec::new();
    for (&c, (betas, partial)) in centers.iter().zip(&per_center) {
        for ((&r, &b), &s) in radii.iter().zip(betas).zip(partial) {
            table.push(c, r, "beta", b);
            table.push(c, r, "jones_partial", s);
        }
        results.push(json!({"center_index": c, "jones": partial.last().copied().unwrap_or(0.0)}));
    }
    emit_table("beta", cfg, &mu, &table, results)
}

fn run_jones(cfg: &RunConfig) -> Result<()> {
    let mu = load_measure(cfg)?;
    let centers = select_centers(cfg, &mu)?;
    let per_center = centers
        .par_iter()
        .map(|&c| jones_function(&mu, mu.point(c), cfg.alpha, &cfg.scales, beta_variant(cfg), cfg.dini_gamma))
        .collect::<rectiscope::Result<Vec<_>>>()?;
    let mut table = Table::default();
    let mut results = Vec::new();
    for (&c, j) in centers.iter().zip(&per_center) {
        for ((&r, &b), &s) in j.profile.radii.iter().zip(&j.profile.values).zip(&j.partial_sums) {
            table.push(c, r, "beta", b);
            table.push(c, r, "partial_sum", s);
        }
        let empty = j.empty_scales.iter().filter(|&&e| e).count();
        results.push(json!({"center_index": c, "value": j.value, "empty_scales": empty}));
    }
    emit_table("jones", cfg, &mu, &table, results)
}

fn run_curv(cfg: &RunConfig) -> Result<()> {
    let mu = load_measure(cfg)?;
    let centers = select_centers(cfg, &mu)?;
    let estimates = centers
        .par_iter()
        .map(|&c| {
            let opts = cfg.curvature.options(cfg.seed.wrapping_add(c as u64));
            curv_estimate(&mu, mu.point(c), cfg.r, cfg.p, cfg.alpha, &opts)
        })
        .collect::<rectiscope::Result<Vec<_>>>()?;
    let mut table = Table::default();
    let mut results = Vec::new();
    for (&c, e) in centers.iter().zip(&estimates) {
        table.push(c, cfg.r, "curv", e.value);
        table.push(c, cfg.r, "std_error", e.std_error);
        table.push(c, cfg.r, "tuples", e.tuples_evaluated as f64);
        results.push(json!({
            "center_index": c,
            "value": e.value,
            "std_error": e.std_error,
            "method": e.method.as_str(),
            "tuples": e.tuples_evaluated,
        }));
    }
    emit_table("curv", cfg, &mu, &table, results)
}

fn secant_config(cfg: &RunConfig, mu: &DiscreteMeasure) -> Result<SecantConfig> {
    let s = &cfg.secant;
    Ok(SecantConfig::new(s.lambda, s.c0, s.k, cfg.n, mu.ambient_dim())?)
}

fn run_secant(cfg: &RunConfig) -> Result<()> {
    let mu = load_measure(cfg)?;
    let scfg = secant_config(cfg, &mu)?;
    let xi = cfg.secant.x_index;
    if xi >= mu.len() {
        return Err(CliError::Usage(format!("x_index {xi} out of range for {} atoms", mu.len())));
    }
    let x = mu.point(xi);
    let constants = theoretical_constants(&scfg);
    match find_secant_frame(&mu, x, cfg.r, &scfg, cfg.secant.mode) {
        Ok(frame) => {
            let check = rectiscope::secant::verify_frame_conclusions(&frame, &mu, cfg.secant.check_samples, cfg.seed);
            let passed = check.passed;
            emit_json(
                "secant",
                cfg,
                Some(&mu),
                json!({"theoretical_constants": constants, "frame": frame, "check": check}),
            )?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Verification("frame conclusions violated".into()))
            }
        }
        Err(Error::SecantFailure(failures)) => {
            let message = Error::SecantFailure(failures.clone()).to_string();
            emit_json(
                "secant",
                cfg,
                Some(&mu),
                json!({"theoretical_constants": constants, "failures": failures}),
            )?;
            Err(CliError::Verification(message))
        }
        Err(e) => Err(e.into()),
    }
}

fn run_density(cfg: &RunConfig) -> Result<()> {
    let mu = load_measure(cfg)?;
    let centers = select_centers(cfg, &mu)?;
    let profiles = centers
        .par_iter()
        .map(|&c| density_profile(&mu, mu.point(c), &cfg.scales))
        .collect::<rectiscope::Result<Vec<_>>>()?;
    let mut table = Table::default();
    let mut per_center = Vec::new();
    let n = mu.intrinsic_dim() as i32;
    for (&c, p) in centers.iter().zip(&profiles) {
        for (&r, &ratio) in p.radii.iter().zip(&p.ratios) {
            table.push(c, r, "mass", ratio * r.powi(n));
            table.push(c, r, "ratio", ratio);
        }
        per_center.push(json!({"center_index": c, "upper": p.upper_est, "lower": p.lower_est}));
    }
    let points: Vec<Vec<f64>> = centers.iter().map(|&c| mu.point(c).to_vec()).collect();
    let upper = if points.is_empty() {
        None
    } else {
        let mut u = upper_regularity_constant(&mu, &cfg.scales, &points)?;
        u.center_index = centers[u.center_index];
        Some(u)
    };
    emit_table(
        "density",
        cfg,
        &mu,
        &table,
        json!({"upper_regularity": upper, "centers": per_center}),
    )
}

fn run_chop(cfg: &RunConfig) -> Result<()> {
    let mu = load_measure(cfg)?;
    let chopped = chop(&mu, cfg.chop.k, cfg.chop.depth)?;
    let kept = chopped
        .measure
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("no atom satisfies the density bound k = {}", cfg.chop.k)))?;
    match &cfg.output {
        Some(path) => write_path(kept, path)?,
        None => write_csv(kept, std::io::stdout().lock())?,
    }
    if let Some(report) = &cfg.report {
        let results = json!({
            "kept": chopped.indices.len(),
            "kept_mass": chopped.kept_mass(),
            "radii": chopped.radii,
            "indices": chopped.indices,
        });
        write_to(Some(report), &summary("chop", cfg, Some(&mu), results)?)?;
    }
    Ok(())
}

/// Reports for one center; a precondition or frame failure becomes a report
/// with a single skip entry.
fn guarded(name: &str, result: rectiscope::Result<InequalityReport>) -> Result<InequalityReport> {
    match result {
        Ok(r) => Ok(r),
        Err(e @ (Error::Precondition(_) | Error::SecantFailure(_))) => {
            let mut r = InequalityReport::new(name);
            r.skip("all", e.to_string());
            Ok(r)
        }
        Err(e) => Err(e.into()),
    }
}

fn run_verify(cfg: &RunConfig) -> Result<()> {
    let v = &cfg.verify;
    let mut reports: Vec<Value> = Vec::new();
    let mut all_passed = true;
    let mut record = |center: Option<usize>, report: InequalityReport| -> Result<()> {
        all_passed &= report.all_passed();
        let mut value = serde_json::to_value(&report).map_err(|e| CliError::Input(e.to_string()))?;
        value["center_index"] = json!(center);
        reports.push(value);
        Ok(())
    };
    if v.suite.includes(Suite::Volume) {
        record(None, check_volume_identity(v.trials, v.max_dim, v.ambient_dim, cfg.seed)?)?;
    }
    let needs_measure = [Suite::BetaCurv, Suite::JonesCurv, Suite::Holder]
        .iter()
        .any(|&s| v.suite.includes(s));
    let mu = if needs_measure && (v.suite != Suite::All || cfg.input.is_some()) {
        Some(load_measure(cfg)?)
    } else {
        None
    };
    if let Some(mu) = &mu {
        let centers = select_centers(cfg, mu)?;
        let scfg = secant_config(cfg, mu)?;
        let per_center = centers
            .par_iter()
            .map(|&c| -> Result<Vec<InequalityReport>> {
                let x = mu.point(c);
                let mut out = Vec::new();
                if v.suite.includes(Suite::BetaCurv) {
                    let r = check_beta_vs_curv(mu, x, &scfg, &cfg.scales, cfg.secant.mode, v.domain);
                    out.push(guarded("beta-curv", r)?);
                }
                if v.suite.includes(Suite::JonesCurv) {
                    let r = check_jones_vs_curv(mu, x, cfg.alpha, &scfg, cfg.secant.mode, v.max_scales);
                    out.push(guarded("jones-curv", r)?);
                }
                if v.suite.includes(Suite::Holder) {
                    out.push(check_holder_chain(mu, x, v.holder_p, v.holder_alpha, &cfg.scales)?);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        for (&c, list) in centers.iter().zip(per_center) {
            for report in list {
                record(Some(c), report)?;
            }
        }
    }
    let results = json!({"passed": all_passed, "reports": reports});
    emit_json("verify", cfg, mu.as_ref(), results)?;
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Verification("at least one inequality check failed".into()))
    }
}

fn run_report(cfg: &RunConfig) -> Result<()> {
    let mu = load_measure(cfg)?;
    let centers = select_centers(cfg, &mu)?;
    let per_center = centers
        .par_iter()
        .map(|&c| -> rectiscope::Result<Value> {
            let x = mu.point(c);
            let density = density_profile(&mu, x, &cfg.scales)?;
            let jones = jones_function(&mu, x, cfg.alpha, &cfg.scales, BetaVariant::Uncentered, None)?;
            let opts = cfg.curvature.options(cfg.seed.wrapping_add(c as u64));
            let curv = curv_estimate(&mu, x, cfg.r, cfg.p, cfg.alpha, &opts)?;
            Ok(json!({
                "center_index": c,
                "density_upper": density.upper_est,
                "density_lower": density.lower_est,
                "jones": jones.value,
                "betas": jones.profile.values,
                "curv": curv.value,
                "curv_std_error": curv.std_error,
                "curv_method": curv.method.as_str(),
            }))
        })
        .collect::<rectiscope::Result<Vec<_>>>()?;
    let radii = cfg.scales.radii();
    emit_json(
        "report",
        cfg,
        Some(&mu),
        json!({"radii": radii, "centers": per_center}),
    )
}
