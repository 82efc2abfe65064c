use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use super::args::{FamilyChoice, FisherArgs, FitArgs, PlotArgs, PriorArgs, SimArgs};
use super::config::{pick, ConfigFile};
use super::error::{CliError, CliResult};
use super::ingest::{ingest_csv, ColumnSpec, InputTable};
use super::plot::risk_density;
use crate::copula::{Family, TailFunctional, TailSpec, DEFAULT_ALPHA};
use crate::inference::{
    fit_with_posterior, FisherTable, FitOptions, PosteriorGrid, PriorSpec, RestrictedJeffreysPrior, TailRiskReport,
    DEFAULT_GRID_SIZE, DEFAULT_LEVEL,
};
use crate::numeric::format_float;
use crate::pseudo_obs::to_pseudo_observations;
use crate::sampling::RngSeed;
use crate::sim::{coverage_study_with_prior, SimConfig};

pub const FIT_SCHEMA: &str = "tailrisk/fit-report";
pub const SIM_SCHEMA: &str = "tailrisk/sim-report";
pub const PLOT_SCHEMA: &str = "tailrisk/plot-summary";
pub const SCHEMA_VERSION: u32 = 1;

fn software() -> Value {
    json!({ "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") })
}

fn run_info(started: Instant) -> Value {
    let unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    json!({ "unix_time": unix, "elapsed_seconds": started.elapsed().as_secs_f64() })
}

fn load_config(path: Option<&PathBuf>) -> CliResult<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Output {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn unit_interval(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Prior specification for `family` from defaults, config and flags.
fn prior_spec(family: Family, args: &PriorArgs, seed: Option<u64>, cfg: &ConfigFile) -> CliResult<PriorSpec> {
    let mut spec = PriorSpec::for_family(family);
    if let Some(v) = pick(args.theta_min, cfg, "theta_min")? {
        spec.theta_min = v;
    }
    if let Some(v) = pick(args.theta_max, cfg, "theta_max")? {
        spec.theta_max = v;
    }
    if let Some(v) = pick(args.fisher_draws, cfg, "fisher_draws")? {
        spec.fisher_draws = v;
    }
    if let Some(v) = pick(args.fisher_nodes, cfg, "fisher_nodes")? {
        spec.fisher_nodes = v;
    }
    if let Some(v) = seed {
        spec.seed = RngSeed(v);
    }
    spec.validate()?;
    Ok(spec)
}

fn cache_dir(args: &PriorArgs, cfg: &ConfigFile) -> Option<PathBuf> {
    args.fisher_cache
        .clone()
        .or_else(|| cfg.raw("fisher_cache").map(PathBuf::from))
}

pub fn cache_file(dir: &Path, family: Family) -> PathBuf {
    dir.join(format!("fisher_{family}.txt"))
}

/// Fisher table for `spec`, reusing a matching cache entry when a cache
/// directory is configured.
fn obtain_table(spec: &PriorSpec, cache: Option<&Path>, log: &mut dyn Write) -> CliResult<FisherTable> {
    let Some(dir) = cache else {
        return Ok(FisherTable::compute(spec)?);
    };
    let path = cache_file(dir, spec.family);
    let reason = match FisherTable::load_matching(&path, spec) {
        Ok(Some(table)) => {
            let _ = writeln!(log, "using cached Fisher table {}", path.display());
            return Ok(table);
        }
        Ok(None) if path.exists() => "does not match the configuration".to_string(),
        Ok(None) => "is missing".to_string(),
        Err(e) => format!("could not be parsed ({e})"),
    };
    let _ = writeln!(log, "Fisher cache {} {reason}; recomputing", path.display());
    let table = FisherTable::compute(spec)?;
    write_file(&path, &table.to_text())?;
    Ok(table)
}

struct FitSettings {
    input: PathBuf,
    output: Option<PathBuf>,
    families: Vec<Family>,
    columns: ColumnSpec,
    strict: bool,
    options: FitOptions,
    priors: Vec<PriorSpec>,
    cache: Option<PathBuf>,
}

fn resolve_fit(args: &FitArgs) -> CliResult<FitSettings> {
    let cfg = load_config(args.config.as_ref())?;
    let input = args
        .input
        .clone()
        .or_else(|| cfg.raw("input").map(PathBuf::from))
        .ok_or_else(|| CliError::Config("no input file given (--input)".into()))?;
    let output = args.output.clone().or_else(|| cfg.raw("output").map(PathBuf::from));
    let families = pick(args.family, &cfg, "family")?
        .unwrap_or(FamilyChoice::Both)
        .families();
    let columns = match args.columns.as_deref().or(cfg.raw("columns")) {
        Some(s) => s.parse().map_err(CliError::Config)?,
        None => ColumnSpec::default(),
    };
    let strict = args.strict_parse || cfg.get::<bool>("strict_parse")?.unwrap_or(false);
    let no_delta = args.no_delta || cfg.get::<bool>("no_delta")?.unwrap_or(false);
    let alpha = unit_interval("alpha", pick(args.alpha, &cfg, "alpha")?.unwrap_or(DEFAULT_ALPHA))?;
    let level = unit_interval("level", pick(args.level, &cfg, "level")?.unwrap_or(DEFAULT_LEVEL))?;
    let grid_size = pick(args.grid_size, &cfg, "grid_size")?.unwrap_or(DEFAULT_GRID_SIZE);
    let seed = pick(args.seed, &cfg, "seed")?;
    let priors = families
        .iter()
        .map(|&f| prior_spec(f, &args.prior, seed, &cfg))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(FitSettings {
        input,
        output,
        families,
        columns,
        strict,
        options: FitOptions {
            alpha,
            level,
            grid_size,
            delta_intervals: !no_delta,
        },
        priors,
        cache: cache_dir(&args.prior, &cfg),
    })
}

struct Fitted {
    table: InputTable,
    fits: Vec<(TailRiskReport, PosteriorGrid)>,
}

fn run_fits(s: &FitSettings, log: &mut dyn Write) -> CliResult<Fitted> {
    let table = ingest_csv(&s.input, &s.columns, s.strict)?;
    let _ = writeln!(
        log,
        "read {} rows from {}; dropped {} with missing values and {} malformed; n = {}",
        table.rows_read,
        s.input.display(),
        table.dropped_missing,
        table.dropped_malformed,
        table.len()
    );
    let data = to_pseudo_observations(&table.raw_pairs()?);
    let mut fits = Vec::new();
    for (family, spec) in s.families.iter().zip(&s.priors) {
        let prior = RestrictedJeffreysPrior::from_table(obtain_table(spec, s.cache.as_deref(), log)?)?;
        fits.push(fit_with_posterior(*family, &data, &prior, &s.options)?);
    }
    Ok(Fitted { table, fits })
}

fn fit_payload(s: &FitSettings, fitted: &Fitted) -> Value {
    let reports: Vec<&TailRiskReport> = fitted.fits.iter().map(|(r, _)| r).collect();
    json!({
        "schema": FIT_SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "software": software(),
        "input": fitted.table,
        "settings": {
            "families": s.families,
            "alpha": s.options.alpha,
            "level": s.options.level,
            "grid_size": s.options.grid_size,
            "strict_parse": s.strict,
            "delta_intervals": s.options.delta_intervals,
        },
        "reports": reports,
    })
}

fn fmt_ci(lo: f64, hi: f64, digits: usize) -> String {
    format!("[{lo:.digits$}, {hi:.digits$}]")
}

/// Side-by-side table of the posterior summaries, one column per family.
pub fn render_table(reports: &[&TailRiskReport]) -> String {
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    rows.push((
        "theta (posterior mean)".into(),
        reports.iter().map(|r| format!("{:.4}", r.theta.mean)).collect(),
    ));
    let level = reports.first().map_or(DEFAULT_LEVEL, |r| r.level);
    let pct = format!("{}%", (level * 100.0).round());
    rows.push((
        format!("theta ({pct} CrI)"),
        reports.iter().map(|r| fmt_ci(r.theta.ci.lo, r.theta.ci.hi, 4)).collect(),
    ));
    for functional in TailFunctional::ALL {
        let code = functional.code();
        rows.push((
            format!("R_{code}(alpha) mean"),
            reports.iter().map(|r| format!("{:.6}", r.risk(functional).mean)).collect(),
        ));
        rows.push((
            format!("R_{code}(alpha) {pct} CrI"),
            reports
                .iter()
                .map(|r| {
                    let e = r.risk(functional);
                    fmt_ci(e.ci.lo, e.ci.hi, 6)
                })
                .collect(),
        ));
    }
    rows.push((
        "MLE theta".into(),
        reports
            .iter()
            .map(|r| {
                let flag = if r.mle.at_boundary { " (boundary)" } else { "" };
                format!("{:.4}{flag}", r.mle.theta)
            })
            .collect(),
    ));
    let label_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let col_w = rows
        .iter()
        .flat_map(|r| r.1.iter().map(String::len))
        .chain(reports.iter().map(|r| r.family.name().len()))
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = write!(out, "{:label_w$}", "");
    for r in reports {
        let _ = write!(out, "  {:>col_w$}", r.family.name());
    }
    out.push('\n');
    for (label, cells) in &rows {
        let _ = write!(out, "{label:label_w$}");
        for c in cells {
            let _ = write!(out, "  {c:>col_w$}");
        }
        out.push('\n');
    }
    for r in reports {
        let _ = writeln!(
            out,
            "{}: the posterior mean joint upper-tail risk {:.6} is {:.2} times larger than under independence \
             (alpha^2 = {:.6}).",
            r.family.name(),
            r.risk(TailFunctional::Upper).mean,
            r.independence_ratio_upper,
            r.independence.baseline
        );
    }
    out
}

pub fn cmd_fit(args: &FitArgs, out: &mut dyn Write, log: &mut dyn Write) -> CliResult<()> {
    let started = Instant::now();
    let s = resolve_fit(args)?;
    let fitted = run_fits(&s, log)?;
    let mut doc = fit_payload(&s, &fitted);
    doc["run"] = run_info(started);
    let reports: Vec<&TailRiskReport> = fitted.fits.iter().map(|(r, _)| r).collect();
    let table = render_table(&reports);
    match &s.output {
        Some(path) => {
            write_file(path, &to_json(&doc))?;
            let _ = out.write_all(table.as_bytes());
            let _ = writeln!(log, "wrote {}", path.display());
        }
        None => {
            let _ = out.write_all(to_json(&doc).as_bytes());
            let _ = log.write_all(table.as_bytes());
        }
    }
    Ok(())
}

pub fn cmd_plot_data(args: &PlotArgs, out: &mut dyn Write, log: &mut dyn Write) -> CliResult<()> {
    let s = resolve_fit(&args.fit)?;
    let dir = s
        .output
        .clone()
        .ok_or_else(|| CliError::Config("plot-data needs an output directory (--output)".into()))?;
    let fitted = run_fits(&s, log)?;
    let mut written = Vec::new();
    for (report, post) in &fitted.fits {
        let family = report.family;
        let mut theta_csv = String::from("theta,density,weight\n");
        for ((t, d), w) in post.nodes().iter().zip(post.density()).zip(post.weights()) {
            let _ = writeln!(theta_csv, "{},{},{}", format_float(*t), format_float(*d), format_float(*w));
        }
        let theta_file = dir.join(format!("{family}_theta_posterior.csv"));
        write_file(&theta_file, &theta_csv)?;
        written.push(theta_file);

        let mut entries = Vec::new();
        for functional in TailFunctional::ALL {
            let spec = TailSpec::new(report.alpha, functional)?;
            let density = risk_density(post, &spec);
            for w in &density.warnings {
                let _ = writeln!(log, "warning: {family} {}: {w}", functional.name());
            }
            let file = dir.join(format!("{family}_{}_density.csv", functional.name()));
            write_file(&file, &density.to_csv())?;
            let entry = report.risk(functional);
            entries.push(json!({
                "functional": functional,
                "file": file.file_name().map(|f| f.to_string_lossy().into_owned()),
                "method": density.method,
                "mean": entry.mean,
                "ci_lo": entry.ci.lo,
                "ci_hi": entry.ci.hi,
                "warnings": density.warnings,
            }));
            written.push(file);
        }
        let summary = json!({
            "schema": PLOT_SCHEMA,
            "schema_version": SCHEMA_VERSION,
            "software": software(),
            "family": family,
            "alpha": report.alpha,
            "level": report.level,
            "theta": { "file": theta_file_name(family), "mean": report.theta.mean,
                       "ci_lo": report.theta.ci.lo, "ci_hi": report.theta.ci.hi },
            "functionals": entries,
        });
        let file = dir.join(format!("{family}_plot_summary.json"));
        write_file(&file, &to_json(&summary))?;
        written.push(file);
    }
    if args.scatter {
        let data = to_pseudo_observations(&fitted.table.raw_pairs()?);
        let mut csv = String::from("id,x,y,u,v\n");
        for (row, p) in fitted.table.rows.iter().zip(data.pairs()) {
            let id = row.id.as_deref().unwrap_or("");
            let _ = writeln!(csv, "{id},{},{},{},{}", row.x, row.y, p.u(), p.v());
        }
        let file = dir.join("scatter.csv");
        write_file(&file, &csv)?;
        written.push(file);
    }
    for f in written {
        let _ = writeln!(out, "{}", f.display());
    }
    Ok(())
}

fn theta_file_name(family: Family) -> String {
    format!("{family}_theta_posterior.csv")
}

struct SimSettings {
    sim: SimConfig,
    output: Option<PathBuf>,
    csv: Option<PathBuf>,
    cache: Option<PathBuf>,
}

fn resolve_sim(args: &SimArgs) -> CliResult<SimSettings> {
    let cfg = load_config(args.config.as_ref())?;
    let family = pick(args.family, &cfg, "family")?
        .ok_or_else(|| CliError::Config("simulate needs --family clayton|gumbel".into()))?;
    let theta = pick(args.theta, &cfg, "theta")?
        .ok_or_else(|| CliError::Config("simulate needs the true --theta".into()))?;
    if !family.admits(theta) {
        return Err(CliError::Config(format!("theta = {theta} is not admissible for the {family} family")));
    }
    let mut sim = SimConfig::new(family, theta);
    if let Some(v) = pick(args.n, &cfg, "n")? {
        sim.n = v;
    }
    if let Some(v) = pick(args.replicates, &cfg, "replicates")? {
        sim.replicates = v;
    }
    if let Some(v) = pick(args.alpha, &cfg, "alpha")? {
        sim.alpha = unit_interval("alpha", v)?;
    }
    if let Some(v) = pick(args.level, &cfg, "level")? {
        sim.level = unit_interval("level", v)?;
    }
    if let Some(v) = pick(args.grid_size, &cfg, "grid_size")? {
        sim.grid_size = v;
    }
    if let Some(v) = pick(args.seed, &cfg, "seed")? {
        sim.base_seed = RngSeed(v);
    }
    sim.apply_reranking = args.rerank || cfg.get::<bool>("rerank")?.unwrap_or(false);
    sim.prior = prior_spec(family, &args.prior, pick(args.prior_seed, &cfg, "prior_seed")?, &cfg)?;
    sim.validate()?;
    let output = args.output.clone().or_else(|| cfg.raw("output").map(PathBuf::from));
    let csv = args
        .csv
        .clone()
        .or_else(|| output.as_ref().map(|p| p.with_extension("csv")));
    Ok(SimSettings {
        sim,
        output,
        csv,
        cache: cache_dir(&args.prior, &cfg),
    })
}

pub fn cmd_simulate(args: &SimArgs, out: &mut dyn Write, log: &mut dyn Write) -> CliResult<()> {
    let started = Instant::now();
    let SimSettings { sim, output, csv, cache } = resolve_sim(args)?;
    let prior = RestrictedJeffreysPrior::from_table(obtain_table(&sim.prior, cache.as_deref(), log)?)?;
    let report = coverage_study_with_prior(&sim, &prior)?;
    let mut doc = json!({
        "schema": SIM_SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "software": software(),
        "report": report,
    });
    let mut run = run_info(started);
    run["wall_clock_seconds"] = json!(report.wall_clock_seconds);
    doc["run"] = run;

    let mut summary = format!(
        "{} theta = {} (n = {}, R = {})\n{:<12} {:>10} {:>14} {:>9}\n",
        sim.family.name(),
        sim.theta_true,
        sim.n,
        sim.replicates,
        "functional",
        "true",
        "avg post mean",
        "coverage"
    );
    for f in &report.functionals {
        let _ = writeln!(
            summary,
            "R_{:<10} {:>10.6} {:>14.6} {:>9.2}",
            f.functional.code(),
            f.true_value,
            f.average_posterior_mean,
            f.coverage
        );
    }
    if let Some(path) = &csv {
        write_file(path, &report.replicates_csv())?;
    }
    match &output {
        Some(path) => {
            write_file(path, &to_json(&doc))?;
            let _ = out.write_all(summary.as_bytes());
        }
        None => {
            let _ = out.write_all(to_json(&doc).as_bytes());
            let _ = log.write_all(summary.as_bytes());
        }
    }
    Ok(())
}

pub fn cmd_fisher(args: &FisherArgs, out: &mut dyn Write, log: &mut dyn Write) -> CliResult<()> {
    let cfg = load_config(args.config.as_ref())?;
    let families = pick(args.family, &cfg, "family")?
        .unwrap_or(FamilyChoice::Both)
        .families();
    let seed = pick(args.seed, &cfg, "seed")?;
    let output = args.output.clone().or_else(|| cfg.raw("output").map(PathBuf::from));
    let cache = cache_dir(&args.prior, &cfg);
    if output.is_some() && families.len() > 1 {
        return Err(CliError::Config(
            "--output names a single table; pick one --family or use --fisher-cache".into(),
        ));
    }
    for family in families {
        let spec = prior_spec(family, &args.prior, seed, &cfg)?;
        match (&output, &cache) {
            (Some(path), _) => {
                write_file(path, &FisherTable::compute(&spec)?.to_text())?;
                let _ = writeln!(log, "wrote {}", path.display());
            }
            (None, Some(dir)) => {
                obtain_table(&spec, Some(dir), log)?;
            }
            (None, None) => {
                let _ = out.write_all(FisherTable::compute(&spec)?.to_text().as_bytes());
            }
        }
    }
    Ok(())
}
