mod common;

use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tailrisk::cli::{run, EXIT_CONFIG, EXIT_INPUT, EXIT_OK, EXIT_OUTPUT};

use common::{fixture_csv, schema_errors};

const FAST_PRIOR: [&str; 6] = ["--fisher-draws", "500", "--fisher-nodes", "8", "--grid-size", "400"];

struct Outcome {
    code: i32,
    out: String,
    log: String,
}

fn invoke(args: &[&str]) -> Outcome {
    let argv = std::iter::once("tailrisk").chain(args.iter().copied());
    let (mut out, mut log) = (Vec::new(), Vec::new());
    let code = run(argv.map(std::ffi::OsString::from), &mut out, &mut log);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        log: String::from_utf8(log).unwrap(),
    }
}

fn fit_args<'a>(input: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["fit", "--input", input, "--columns", "LBXGLU,LBXGH,SEQN"];
    v.extend_from_slice(&FAST_PRIOR);
    v.extend_from_slice(extra);
    v
}

fn without_run(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("run");
    v
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn fit_reports_are_deterministic_and_valid() {
    let input = fixture_csv();
    let input = input.to_str().unwrap();
    let a = invoke(&fit_args(input, &[]));
    assert_eq!(a.code, EXIT_OK, "{}", a.log);
    let b = invoke(&fit_args(input, &[]));
    let (ja, jb): (Value, Value) = (serde_json::from_str(&a.out).unwrap(), serde_json::from_str(&b.out).unwrap());
    assert!(ja.get("run").is_some());
    let (sa, sb) = (
        serde_json::to_string(&without_run(ja.clone())).unwrap(),
        serde_json::to_string(&without_run(jb)).unwrap(),
    );
    assert_eq!(sa, sb);
    assert_eq!(schema_errors("fit-report.v1.schema.json", &ja), Vec::<String>::new());

    assert_eq!(ja["input"]["rows_read"], 300);
    assert_eq!(ja["input"]["dropped_missing"], 4);
    let reports = ja["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["family"], "clayton");
    assert_eq!(reports[1]["family"], "gumbel");
    assert!(reports.iter().all(|r| r["n"] == 296));
    assert!(a.log.contains("times larger than under independence"));
}

#[test]
fn report_to_file_and_table_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_csv();
    let out = dir.path().join("fit.json");
    let r = invoke(&fit_args(
        input.to_str().unwrap(),
        &["--family", "gumbel", "--output", out.to_str().unwrap()],
    ));
    assert_eq!(r.code, EXIT_OK, "{}", r.log);
    assert!(r.out.contains("R_U(alpha)"));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["schema"], "tailrisk/fit-report");
    assert_eq!(json["reports"][0]["prior"]["layout"], "log");
}

#[test]
fn exit_codes_separate_error_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_csv();
    let input = input.to_str().unwrap();

    let missing = invoke(&fit_args("/nonexistent/data.csv", &[]));
    assert_eq!(missing.code, EXIT_INPUT, "{}", missing.log);

    let wrong_column = invoke(&["fit", "--input", input, "--columns", "A,B"]);
    assert_eq!(wrong_column.code, EXIT_INPUT);

    let few = write(dir.path(), "few.csv", "x,y\n1,2\n2,3\n3,1\n");
    assert_eq!(invoke(&["fit", "--input", &few]).code, EXIT_INPUT);

    let mut body = String::from("x,y\n");
    for i in 0..30 {
        body.push_str(&format!("{},{}\n", i, (i * 7) % 30));
    }
    body.push_str("abc,1\n");
    let malformed = write(dir.path(), "malformed.csv", &body);
    let lenient = invoke(&[&["fit", "--input", &malformed, "--family", "gumbel"][..], &FAST_PRIOR].concat());
    assert_eq!(lenient.code, EXIT_OK, "{}", lenient.log);
    let json: Value = serde_json::from_str(&lenient.out).unwrap();
    assert_eq!(json["input"]["dropped_malformed"], 1);
    let strict = invoke(&["fit", "--input", &malformed, "--strict-parse"]);
    assert_eq!(strict.code, EXIT_INPUT);
    assert!(strict.log.contains("abc"));

    assert_eq!(invoke(&fit_args(input, &["--family", "frank"])).code, EXIT_CONFIG);
    assert_eq!(invoke(&fit_args(input, &["--alpha", "1.5"])).code, EXIT_CONFIG);
    assert_eq!(
        invoke(&fit_args(input, &["--family", "gumbel", "--theta-min", "0.5"])).code,
        EXIT_CONFIG
    );
    assert_eq!(invoke(&["fit"]).code, EXIT_CONFIG);
    assert_eq!(invoke(&["bogus"]).code, EXIT_CONFIG);

    let blocker = write(dir.path(), "blocker", "not a directory");
    let target = format!("{blocker}/fit.json");
    let unwritable = invoke(&fit_args(input, &["--family", "gumbel", "--output", &target]));
    assert_eq!(unwritable.code, EXIT_OUTPUT);

    let bad_cfg = write(dir.path(), "bad.conf", "alpha = 0.05\nwibble = 3\n");
    let r = invoke(&fit_args(input, &["--config", &bad_cfg]));
    assert_eq!(r.code, EXIT_CONFIG);
    assert!(r.log.contains("line 2"), "{}", r.log);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_tailrisk");
    let status = Command::new(bin).args(["fit", "--input", "/nonexistent.csv"]).status().unwrap();
    assert_eq!(status.code(), Some(EXIT_INPUT));
    let status = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&status.stdout).contains("plot-data"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_csv();
    let cfg = write(
        dir.path(),
        "fit.conf",
        &format!(
            "# fixture run\ninput = {}\ncolumns = LBXGLU,LBXGH\nfamily = gumbel\nalpha = 0.1\ngrid-size = 400\nfisher_draws = 500\nfisher_nodes = 8\n",
            input.display()
        ),
    );
    let from_cfg = invoke(&["fit", "--config", &cfg]);
    assert_eq!(from_cfg.code, EXIT_OK, "{}", from_cfg.log);
    let j: Value = serde_json::from_str(&from_cfg.out).unwrap();
    assert_eq!(j["settings"]["alpha"], 0.1);
    assert_eq!(j["settings"]["families"], serde_json::json!(["gumbel"]));
    assert_eq!(j["settings"]["grid_size"], 400);

    let flagged = invoke(&["fit", "--config", &cfg, "--alpha", "0.05"]);
    let j: Value = serde_json::from_str(&flagged.out).unwrap();
    assert_eq!(j["settings"]["alpha"], 0.05);
}

#[test]
fn fisher_cache_is_keyed_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache_s = cache.to_str().unwrap();
    let base = ["fisher", "--family", "both", "--fisher-draws", "400", "--fisher-nodes", "6", "--fisher-cache", cache_s];

    let first = invoke(&base);
    assert_eq!(first.code, EXIT_OK, "{}", first.log);
    let clayton = cache.join("fisher_clayton.txt");
    let gumbel = cache.join("fisher_gumbel.txt");
    let bytes = std::fs::read(&gumbel).unwrap();
    assert!(clayton.is_file());
    let text = String::from_utf8(bytes.clone()).unwrap();
    assert!(text.contains("\nformat = tailrisk-fisher-table\nversion = 1\n"), "{text}");

    let again = invoke(&base);
    assert_eq!(again.code, EXIT_OK);
    assert!(!again.log.contains("recomput"), "{}", again.log);
    assert_eq!(std::fs::read(&gumbel).unwrap(), bytes);

    // Independent runs into a fresh directory produce identical files.
    let other = dir.path().join("other");
    let mut args = base.to_vec();
    args[8] = other.to_str().unwrap();
    assert_eq!(invoke(&args).code, EXIT_OK);
    assert_eq!(std::fs::read(other.join("fisher_gumbel.txt")).unwrap(), bytes);

    let mut changed = base.to_vec();
    changed[4] = "600";
    let r = invoke(&changed);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.log.contains("recomput"), "{}", r.log);
    assert_ne!(std::fs::read(&gumbel).unwrap(), bytes);
    assert!(std::fs::read_to_string(&gumbel).unwrap().contains("600"));

    // A fit with the same key reads the cache instead of recomputing.
    let input = fixture_csv();
    let fit = invoke(&fit_args(
        input.to_str().unwrap(),
        &["--family", "gumbel", "--fisher-cache", cache_s],
    ));
    assert_eq!(fit.code, EXIT_OK, "{}", fit.log);
    assert!(fit.log.contains("recomput"), "{}", fit.log);
    let reuse = invoke(&fit_args(
        input.to_str().unwrap(),
        &["--family", "gumbel", "--fisher-cache", cache_s],
    ));
    assert!(!reuse.log.contains("recomput"), "{}", reuse.log);

    std::fs::write(&clayton, "format tailrisk-fisher\nversion 99\n").unwrap();
    let corrupt = invoke(&base);
    assert_eq!(corrupt.code, EXIT_OK);
    assert!(corrupt.log.contains("could not be parsed"), "{}", corrupt.log);
    assert!(tailrisk::inference::FisherTable::from_text(&std::fs::read_to_string(&clayton).unwrap()).is_ok());
}

#[test]
fn fisher_table_to_stdout() {
    let r = invoke(&["fisher", "--family", "clayton", "--fisher-draws", "300", "--fisher-nodes", "5"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.log);
    let table = tailrisk::inference::FisherTable::from_text(&r.out).unwrap();
    assert_eq!(table.thetas().len(), 5);
    assert_eq!(table.key().draws, 300);
}

#[test]
fn plot_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_csv();
    let out = dir.path().join("plots");
    let args = [
        &["plot-data", "--output", out.to_str().unwrap(), "--scatter"][..],
        &fit_args(input.to_str().unwrap(), &[])[1..],
    ]
    .concat();
    let r = invoke(&args);
    assert_eq!(r.code, EXIT_OK, "{}", r.log);
    for family in ["clayton", "gumbel"] {
        let theta = std::fs::read_to_string(out.join(format!("{family}_theta_posterior.csv"))).unwrap();
        assert!(theta.starts_with("theta,density,weight\n"));
        assert_eq!(theta.lines().count(), 401);
        for f in ["lower", "upper", "conditional"] {
            let d = std::fs::read_to_string(out.join(format!("{family}_{f}_density.csv"))).unwrap();
            assert!(d.starts_with("value,density\n"));
        }
        let summary: Value =
            serde_json::from_str(&std::fs::read_to_string(out.join(format!("{family}_plot_summary.json"))).unwrap())
                .unwrap();
        assert_eq!(schema_errors("plot-summary.v1.schema.json", &summary), Vec::<String>::new());
    }
    let scatter = std::fs::read_to_string(out.join("scatter.csv")).unwrap();
    assert!(scatter.starts_with("id,x,y,u,v\n"));
    assert_eq!(scatter.lines().count(), 297);
}

#[test]
fn simulate_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let run_once = |name: &str| {
        let out = dir.path().join(name);
        let r = invoke(&[
            "simulate",
            "--family",
            "clayton",
            "--theta",
            "2",
            "--n",
            "120",
            "--replicates",
            "3",
            "--fisher-draws",
            "500",
            "--fisher-nodes",
            "8",
            "--grid-size",
            "400",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(r.code, EXIT_OK, "{}", r.log);
        let json: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
        (json, csv)
    };
    let (a, csv_a) = run_once("a.json");
    let (b, csv_b) = run_once("b.json");
    assert_eq!(schema_errors("sim-report.v1.schema.json", &a), Vec::<String>::new());
    assert_eq!(
        serde_json::to_string(&without_run(a.clone())).unwrap(),
        serde_json::to_string(&without_run(b)).unwrap()
    );
    assert_eq!(csv_a, csv_b);
    assert_eq!(csv_a.lines().count(), 4);
    assert_eq!(a["report"]["replicates"].as_array().unwrap().len(), 3);

    let bad = invoke(&["simulate", "--family", "gumbel", "--theta", "0.5"]);
    assert_eq!(bad.code, EXIT_CONFIG);
}
