use std::path::PathBuf;
use std::time::Instant;

use bdlab_core::closed_forms::{root_mean, root_variance};
use bdlab_core::gaps::GapRecursionTable;
use bdlab_core::montecarlo::{
    run_ensemble, EnsembleConfig, StatisticSet, DEFAULT_RUNS, GENERATOR_ID,
};
use bdlab_core::oracle::{enumerate, ExactDistribution};
use bdlab_core::process::MIN_WIDTH;
use bdlab_core::roots::{aux_root_pgf, cyclic_root_pgf};
use bdlab_core::scalar::ToF64;
use bdlab_core::stats::{
    lattice_ks_statistic, normalized_ks_statistic, IntegerAccumulator, RealAccumulator,
};
use bdlab_core::verify::{run_suite, Suite};
use bdlab_core::{fraction_string, pgf_moments, BoundaryMode, RationalPolynomial};
use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::output::{emit, write_gnuplot, Document};
use crate::settings::FileSettings;
use crate::{
    Common, ExactGapsArgs, ExactRootsArgs, Failure, Format, OracleArgs, SimulateArgs, Stat,
    VerifyArgs,
};

/// Largest width `exact-roots` accepts; the split convolution costs
/// O(K^4) big-integer products (about 20 s at the cap).
const EXACT_ROOTS_MAX_K: usize = 300;
/// Largest width `exact-gaps` accepts (about 12 s for i = 1 at the cap).
const EXACT_GAPS_MAX_K: usize = 80;
const DEFAULT_BINS: usize = 200;

struct Output {
    out: Option<PathBuf>,
    format: Format,
}

fn common(file: &mut FileSettings, c: Common) -> Result<Output, Failure> {
    let threads = file.pick("threads", c.threads)?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::config("--threads must be positive"));
        }
        // ignore failure if a pool already exists (tests call in-process)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(Output {
        out: file.pick("out", c.out)?,
        format: file.pick("format", c.format)?.unwrap_or(Format::Json),
    })
}

fn required_width(file: &mut FileSettings, flag: Option<usize>) -> Result<usize, Failure> {
    let width = file.pick("K", flag)?.ok_or_else(|| {
        Failure::config(format!("--K is required (strip width, K >= {MIN_WIDTH})"))
    })?;
    if width < MIN_WIDTH {
        return Err(Failure::config(format!(
            "strip width must satisfy K >= {MIN_WIDTH}, got K = {width}"
        )));
    }
    Ok(width)
}

fn finish(doc: &Document, out: &Output) -> Result<u8, Failure> {
    emit(&doc.render(out.format), out.out.as_deref())?;
    Ok(0)
}

fn pgf_json(p: &RationalPolynomial) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| fraction_string(c).into())
            .collect(),
    )
}

fn exact_summary(p: &RationalPolynomial) -> Result<Value, Failure> {
    let m = pgf_moments(p)?;
    Ok(json!({
        "pgf": pgf_json(p),
        "mean": fraction_string(&m.mean),
        "variance": fraction_string(&m.variance),
        "second_factorial_moment": fraction_string(&m.second_factorial_moment),
    }))
}

fn pgf_rows(doc: &mut Document, statistic: &str, p: &RationalPolynomial) {
    for (v, c) in p.coeffs().iter().enumerate() {
        doc.rows
            .push([statistic.to_string(), v.to_string(), fraction_string(c)]);
    }
}

fn integer_summary(acc: &IntegerAccumulator, reference: Option<(f64, f64)>) -> Value {
    let var = acc.variance();
    let (mean, sd, source) = match reference {
        Some((m, v)) => (m, v.sqrt(), "exact"),
        None => (acc.mean(), var.sqrt(), "sample"),
    };
    let ks = (sd > 0.0).then(|| {
        let samples: Vec<f64> = acc.samples().collect();
        json!({
            "standardisation": source,
            "reference_mean": mean,
            "reference_sd": sd,
            "raw": normalized_ks_statistic(&samples, mean, sd).ok(),
            "continuity_corrected": lattice_ks_statistic(&acc.histogram, mean, sd).ok(),
        })
    });
    json!({
        "count": acc.count,
        "mean": acc.mean(),
        "variance": var,
        "std_error": (var / acc.count as f64).sqrt(),
        "ks": ks,
        "histogram": acc.histogram.iter().map(|(v, c)| json!([v, c])).collect::<Vec<_>>(),
    })
}

fn real_summary(acc: &RealAccumulator, bins: usize) -> Value {
    let var = acc.variance();
    let sd = var.sqrt();
    json!({
        "count": acc.count,
        "mean": acc.mean(),
        "variance": var,
        "ks_sample_standardised": (sd > 0.0 && !acc.samples().is_empty())
            .then(|| normalized_ks_statistic(acc.samples(), acc.mean(), sd).ok())
            .flatten(),
        "samples_truncated": acc.truncated,
        "histogram_lower_edges": acc.histogram(bins).iter().map(|(x, c)| json!([x, c])).collect::<Vec<_>>(),
    })
}

pub fn simulate(a: SimulateArgs) -> Result<u8, Failure> {
    let mut file = FileSettings::load(a.common.config.as_deref())?;
    let width = required_width(&mut file, a.width)?;
    let mode = file.pick("mode", a.mode)?.unwrap_or(BoundaryMode::Cyclic);
    let runs = file.pick("runs", a.runs)?.unwrap_or(DEFAULT_RUNS);
    let seed = file.pick("seed", a.seed)?.unwrap_or(0);
    let mut stats = file.pick_list("stat", a.stats)?;
    let mut gaps = file.pick_list("i", a.gaps)?;
    let n_steps = file.pick("n-steps", a.n_steps)?;
    let full_simulation = file.pick_switch("full-simulation", a.full_simulation)?;
    let bins = file.pick("bins", a.bins)?.unwrap_or(DEFAULT_BINS);
    let gnuplot_dir: Option<PathBuf> = file.pick("gnuplot-dir", a.gnuplot_dir)?;
    let timing = file.pick_switch("timing", a.timing)?;
    let workers = file.pick("threads", a.common.threads)?;
    let out = common(
        &mut file,
        Common {
            threads: None,
            ..a.common
        },
    )?;
    file.finish()?;

    if stats.is_empty() {
        stats.push(Stat::Roots);
    }
    stats.sort();
    stats.dedup();
    gaps.sort_unstable();
    gaps.dedup();
    let wants = |s: Stat| stats.contains(&s);
    if wants(Stat::Gaps) != !gaps.is_empty() {
        return Err(Failure::config(
            "--stat gaps and --i go together: name at least one gap length with --i",
        ));
    }
    if wants(Stat::HeightGrowth) != n_steps.is_some() {
        return Err(Failure::config(
            "--stat height-growth and --n-steps go together",
        ));
    }
    if bins == 0 {
        return Err(Failure::config("--bins must be positive"));
    }

    let cfg = EnsembleConfig {
        runs,
        base_seed: seed,
        workers,
        full_simulation,
        ..EnsembleConfig::new(
            width,
            mode,
            StatisticSet {
                roots: wants(Stat::Roots),
                gaps: gaps.clone(),
                empirical_gap_average: wants(Stat::EmpiricalAverage),
                height_growth: n_steps,
            },
        )
    };
    eprintln!("bdlab: simulating K = {width} ({mode}), {runs} runs, seed {seed}");
    let started = Instant::now();
    let result = run_ensemble(&cfg)?;
    let elapsed = started.elapsed().as_secs_f64();
    eprintln!("bdlab: done in {elapsed:.2} s");

    let mut doc = Document::new("simulate", ["statistic", "bin", "count"]);
    doc.set("K", width);
    doc.set("mode", mode.to_string());
    doc.set("runs", runs);
    doc.set("seed", seed);
    doc.set("generator", GENERATOR_ID);
    doc.set(
        "stat",
        stats
            .iter()
            .filter_map(|s| s.to_possible_value())
            .map(|v| v.get_name().to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    doc.set(
        "i",
        gaps.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    doc.set("n_steps", n_steps.map(Value::from).unwrap_or(Value::Null));
    doc.set("full_simulation", full_simulation);
    doc.set("bins", bins);

    let mut statistics = Map::new();
    let mut plots: Vec<(String, Vec<(String, u64)>)> = Vec::new();
    if let Some(acc) = &result.roots {
        let reference = (mode == BoundaryMode::Cyclic).then(|| {
            let v = root_variance(width).expect("K >= 3");
            (root_mean(width).to_f64_lossy(), v.to_f64_lossy())
        });
        statistics.insert("roots".into(), integer_summary(acc, reference));
        let points: Vec<_> = acc
            .histogram
            .iter()
            .map(|(v, c)| (v.to_string(), *c))
            .collect();
        doc.rows.extend(
            points
                .iter()
                .map(|(v, c)| ["roots".into(), v.clone(), c.to_string()]),
        );
        plots.push(("roots".into(), points));
    }
    if !result.gaps.is_empty() {
        let mut per_gap = Map::new();
        for (i, acc) in &result.gaps {
            per_gap.insert(i.to_string(), integer_summary(acc, None));
            let name = format!("gap{i}");
            let points: Vec<_> = acc
                .histogram
                .iter()
                .map(|(v, c)| (v.to_string(), *c))
                .collect();
            doc.rows.extend(
                points
                    .iter()
                    .map(|(v, c)| [name.clone(), v.clone(), c.to_string()]),
            );
            plots.push((name, points));
        }
        statistics.insert("gaps".into(), Value::Object(per_gap));
    }
    for (name, acc) in [
        ("empirical_average", &result.empirical_gap_average),
        ("height_growth", &result.height_growth),
    ] {
        let Some(acc) = acc else { continue };
        let mut summary = real_summary(acc, bins);
        if name == "empirical_average" {
            summary["scaled_variance"] = json!(acc.variance() * width as f64);
        } else {
            summary["four_over_K"] = json!(4.0 / width as f64);
        }
        statistics.insert(name.into(), summary);
        let points: Vec<_> = acc
            .histogram(bins)
            .iter()
            .map(|(x, c)| (format!("{x}"), *c))
            .collect();
        doc.rows.extend(
            points
                .iter()
                .map(|(x, c)| [name.to_string(), x.clone(), c.to_string()]),
        );
        plots.push((name.into(), points));
    }
    doc.body
        .insert("statistics".into(), Value::Object(statistics));
    if timing {
        doc.body.insert("runtime_seconds".into(), elapsed.into());
    }
    if let Some(dir) = gnuplot_dir {
        for (name, points) in &plots {
            let path = write_gnuplot(&dir, name, points)?;
            eprintln!("bdlab: wrote {}", path.display());
        }
    }
    finish(&doc, &out)
}

pub fn exact_roots(a: ExactRootsArgs) -> Result<u8, Failure> {
    let mut file = FileSettings::load(a.common.config.as_deref())?;
    let width = required_width(&mut file, a.width)?;
    let mode = file.pick("mode", a.mode)?.unwrap_or(BoundaryMode::Cyclic);
    let out = common(&mut file, a.common)?;
    file.finish()?;
    if width > EXACT_ROOTS_MAX_K {
        return Err(Failure {
            code: 3,
            message: format!("exact-roots is capped at K <= {EXACT_ROOTS_MAX_K}, got K = {width}"),
        });
    }
    let pgf = match mode {
        BoundaryMode::Cyclic => cyclic_root_pgf(width)?,
        BoundaryMode::Auxiliary => aux_root_pgf(width),
    };
    let mut doc = Document::new("exact-roots", ["statistic", "value", "probability"]);
    doc.set("K", width);
    doc.set("mode", mode.to_string());
    doc.body.insert("roots".into(), exact_summary(&pgf)?);
    pgf_rows(&mut doc, "roots", &pgf);
    finish(&doc, &out)
}

pub fn exact_gaps(a: ExactGapsArgs) -> Result<u8, Failure> {
    let mut file = FileSettings::load(a.common.config.as_deref())?;
    let width = required_width(&mut file, a.width)?;
    let mut gaps = file.pick_list("i", a.gaps)?;
    let out = common(&mut file, a.common)?;
    file.finish()?;
    gaps.sort_unstable();
    gaps.dedup();
    if gaps.is_empty() {
        return Err(Failure::config("name at least one gap length with --i"));
    }
    if let Some(bad) = gaps.iter().find(|&&i| i == 0 || i >= width) {
        return Err(Failure::config(format!(
            "gap length must satisfy 1 <= i < K = {width}, got {bad}"
        )));
    }
    if width > EXACT_GAPS_MAX_K {
        return Err(Failure {
            code: 3,
            message: format!("exact-gaps is capped at K <= {EXACT_GAPS_MAX_K}, got K = {width}"),
        });
    }
    let mut doc = Document::new("exact-gaps", ["statistic", "value", "probability"]);
    doc.set("K", width);
    doc.set("mode", "cyclic");
    doc.set(
        "i",
        gaps.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let mut per_gap = Map::new();
    for &i in &gaps {
        let t = GapRecursionTable::build(i, width.max(3))?;
        let pgf = t.distribution(width)?;
        per_gap.insert(i.to_string(), exact_summary(&pgf)?);
        pgf_rows(&mut doc, &format!("gap{i}"), &pgf);
    }
    doc.body.insert("gaps".into(), Value::Object(per_gap));
    finish(&doc, &out)
}

fn distribution_json(d: &ExactDistribution) -> Result<Value, Failure> {
    let mut v = d.to_json();
    v["moments"] = exact_summary(&d.to_pgf())?;
    Ok(v)
}

pub fn oracle(a: OracleArgs) -> Result<u8, Failure> {
    let mut file = FileSettings::load(a.common.config.as_deref())?;
    let width = required_width(&mut file, a.width)?;
    let mode = file.pick("mode", a.mode)?.unwrap_or(BoundaryMode::Cyclic);
    let mut gaps = file.pick_list("i", a.gaps)?;
    let out = common(&mut file, a.common)?;
    file.finish()?;
    if mode == BoundaryMode::Auxiliary && !gaps.is_empty() {
        return Err(Failure::config(
            "gap counts are defined for the cyclic strip only",
        ));
    }
    if let Some(bad) = gaps.iter().find(|&&i| i == 0 || i >= width) {
        return Err(Failure::config(format!(
            "gap length must satisfy 1 <= i < K = {width}, got {bad}"
        )));
    }
    if gaps.is_empty() && mode == BoundaryMode::Cyclic {
        gaps = (1..width).collect();
    }
    gaps.sort_unstable();
    gaps.dedup();
    eprintln!("bdlab: enumerating {width}! first-hit orders ({mode})");
    let e = enumerate(width, mode)?;

    let mut doc = Document::new("oracle", ["statistic", "value", "probability"]);
    doc.set("K", width);
    doc.set("mode", mode.to_string());
    doc.set(
        "i",
        gaps.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    doc.body.insert("orders".into(), e.orders.into());
    doc.body
        .insert("identity_violations".into(), e.identity_violations.into());
    let roots = e.root_distribution();
    doc.body.insert("roots".into(), distribution_json(&roots)?);
    pgf_rows(&mut doc, "roots", &roots.to_pgf());
    let mut per_gap = Map::new();
    for &i in &gaps {
        let d = e.gap_distribution(i)?;
        per_gap.insert(i.to_string(), distribution_json(&d)?);
        pgf_rows(&mut doc, &format!("gap{i}"), &d.to_pgf());
    }
    if !per_gap.is_empty() {
        doc.body.insert("gaps".into(), Value::Object(per_gap));
    }
    finish(&doc, &out)
}

pub fn verify(a: VerifyArgs) -> Result<u8, Failure> {
    let mut file = FileSettings::load(a.common.config.as_deref())?;
    let suite = file.pick("suite", a.suite)?.unwrap_or(Suite::All);
    let kmax = file.pick("kmax", a.kmax)?;
    let out = common(&mut file, a.common)?;
    file.finish()?;
    let report = run_suite(suite, kmax)?;
    for c in &report.checks {
        eprintln!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    for n in &report.notes {
        eprintln!("note: {n}");
    }
    let mut doc = Document::new("verify", ["check", "passed", "detail"]);
    doc.set("suite", suite.to_string());
    doc.set("kmax", report.k_max);
    doc.body.insert("passed".into(), report.passed().into());
    doc.body.insert(
        "checks".into(),
        serde_json::to_value(&report.checks).expect("checks serialise"),
    );
    doc.body.insert("notes".into(), json!(report.notes));
    for c in &report.checks {
        doc.rows.push([
            csv_field(&c.name),
            c.passed.to_string(),
            csv_field(&c.detail),
        ]);
    }
    finish(&doc, &out)?;
    Ok(if report.passed() { 0 } else { 1 })
}

/// Quotes a CSV field when it contains separators.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
