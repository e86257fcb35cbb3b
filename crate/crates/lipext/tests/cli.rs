//! End-to-end exercises of the command-line surface: file formats, exit
//! codes, determinism, and the certify round trip.

use std::path::PathBuf;

use lipext::cli::{main_with_args, ExtendOutput, EXIT_INPUT, EXIT_PROPERTY};

fn run(args: &[&str]) -> i32 {
    let argv: Vec<String> = std::iter::once("lipext".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    main_with_args(argv)
}

struct Workdir {
    dir: PathBuf,
}

impl Workdir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!(
            "lipext-cli-{tag}-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        Workdir { dir }
    }

    fn file(&self, name: &str, contents: &str) -> String {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).unwrap();
        path.display().to_string()
    }

    fn path(&self, name: &str) -> String {
        self.dir.join(name).display().to_string()
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.dir.join(name)).unwrap()
    }
}

impl Drop for Workdir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.dir);
    }
}

const LINE_CLOUD: &str = r#"{"coords": [[0.0], [1.0], [2.0]], "norm": "l2"}"#;
const LINE_MAP: &str = r#"{"domain": [0, 2], "values": [[0.0], [2.0]]}"#;

#[test]
fn validate_accepts_clouds_and_matrices() {
    let w = Workdir::new("validate");
    let cloud = w.file("space.json", LINE_CLOUD);
    assert_eq!(run(&["validate", "--input", &cloud]), 0);
    let matrix = w.file(
        "matrix.json",
        r#"{"points": ["a", "b"], "dist": [[0.0, 1.5], [1.5, 0.0]]}"#,
    );
    assert_eq!(run(&["validate", "--input", &matrix]), 0);
}

#[test]
fn validate_rejects_broken_metrics_with_exit_two() {
    let w = Workdir::new("invalid");
    let bad = w.file(
        "bad.json",
        r#"{"dist": [[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]]}"#,
    );
    assert_eq!(run(&["validate", "--input", &bad]), EXIT_INPUT);
    let missing = w.path("missing.json");
    assert_eq!(run(&["validate", "--input", &missing]), EXIT_INPUT);
}

#[test]
fn mcshane_extend_writes_expected_csv_and_json() {
    let w = Workdir::new("mcshane");
    let space = w.file("space.json", LINE_CLOUD);
    let map = w.file("map.json", LINE_MAP);
    let out = w.path("result.json");
    let csv = w.path("values.csv");
    assert_eq!(
        run(&[
            "extend", "--input", &space, "--method", "mcshane", "--map", &map, "--out", &out,
            "--csv", &csv,
        ]),
        0
    );
    // McShane has no partition of unity to export.
    assert_eq!(
        run(&[
            "extend",
            "--input",
            &space,
            "--method",
            "mcshane",
            "--map",
            &map,
            "--weights-csv",
            &w.path("w.csv"),
        ]),
        EXIT_INPUT
    );
    let csv_text = w.read("values.csv");
    // The middle point interpolates to 1.
    assert!(
        csv_text.contains("1,p1,1.00000000000e0"),
        "csv was: {csv_text}"
    );
    let doc: ExtendOutput = serde_json::from_str(&w.read("result.json")).unwrap();
    assert_eq!(doc.result.values[1], vec![1.0]);
    assert!(doc.result.within_bound);
}

#[test]
fn extend_outputs_are_byte_identical_across_runs() {
    let w = Workdir::new("determinism");
    let space = w.file(
        "space.json",
        r#"{"coords": [[0.0,0.0],[1.0,0.2],[2.0,1.0],[3.5,0.4],[0.5,2.0],[2.2,2.4]], "norm": "l2"}"#,
    );
    let map = w.file(
        "map.json",
        r#"{"domain": [0, 1, 2], "values": [[0.0,0.0],[0.7,0.7],[1.5,1.0]]}"#,
    );
    for (tag_a, tag_b, extra) in [
        ("w1.json", "w2.json", vec!["--method", "whitney"]),
        (
            "n1.json",
            "n2.json",
            vec!["--method", "nerve", "--extensor", "skeletal"],
        ),
    ] {
        for tag in [tag_a, tag_b] {
            let out = w.path(tag);
            let mut args = vec!["extend", "--input", &space, "--map", &map, "--out", &out];
            args.extend(extra.iter().copied());
            assert_eq!(run(&args), 0, "args {args:?}");
        }
        assert_eq!(w.read(tag_a), w.read(tag_b));
    }
}

#[test]
fn leenaor_requires_seed_and_sixteen_points() {
    let w = Workdir::new("leenaor");
    let space = w.file("space.json", LINE_CLOUD);
    let map = w.file("map.json", LINE_MAP);
    // Missing seed: input error.
    assert_eq!(
        run(&["extend", "--input", &space, "--method", "leenaor", "--map", &map]),
        EXIT_INPUT
    );
    // With a seed but a 2-point domain: the pipeline's precondition fails.
    assert_eq!(
        run(&["extend", "--input", &space, "--method", "leenaor", "--map", &map, "--seed", "7"]),
        EXIT_PROPERTY
    );
}

#[test]
fn leenaor_full_pipeline_on_a_serialized_instance() {
    let w = Workdir::new("leenaor-full");
    // 16 domain points on a grid and 4 exterior points.
    let mut coords = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            coords.push(vec![i as f64, j as f64]);
        }
    }
    coords.push(vec![0.5, 4.8]);
    coords.push(vec![3.3, 5.1]);
    coords.push(vec![5.2, 1.4]);
    coords.push(vec![4.9, 3.7]);
    let space_doc = serde_json::json!({"coords": coords, "norm": "l2"});
    let values: Vec<Vec<f64>> = (0..16)
        .map(|k| vec![(coords[k][0] + coords[k][1]) / 2.0f64.sqrt()])
        .collect();
    let map_doc = serde_json::json!({"domain": (0..16).collect::<Vec<_>>(), "values": values});
    let space = w.file("space.json", &space_doc.to_string());
    let map = w.file("map.json", &map_doc.to_string());
    let out = w.path("result.json");
    assert_eq!(
        run(&[
            "extend", "--input", &space, "--method", "leenaor", "--map", &map, "--seed", "11",
            "--out", &out,
        ]),
        0
    );
    let doc: ExtendOutput = serde_json::from_str(&w.read("result.json")).unwrap();
    assert!(doc.lee_naor.is_some());
    assert!(doc.result.within_bound);
}

#[test]
fn cover_grid_padded_and_whitney() {
    let w = Workdir::new("cover");
    let space = w.file(
        "space.json",
        r#"{"coords": [[0.0],[1.0],[2.0],[3.0]], "norm": "l2"}"#,
    );
    let out = w.path("grid.json");
    assert_eq!(
        run(&["cover", "--input", &space, "--method", "grid", "--scale", "2.0", "--out", &out]),
        0
    );
    let doc: serde_json::Value = serde_json::from_str(&w.read("grid.json")).unwrap();
    assert_eq!(doc["covering"]["blocks"][0], serde_json::json!([0, 1]));
    assert_eq!(doc["nagata_n"], serde_json::json!(1));

    let out = w.path("padded.json");
    assert_eq!(
        run(&[
            "cover",
            "--input",
            &space,
            "--method",
            "padded",
            "--scale",
            "1.0",
            "--mode",
            "enumerate",
            "--out",
            &out,
        ]),
        0
    );
    let doc: serde_json::Value = serde_json::from_str(&w.read("padded.json")).unwrap();
    assert_eq!(doc["padded"]["holds"], serde_json::json!(true));

    let domain = w.file("domain.json", r#"{"domain": [0]}"#);
    let out = w.path("whitney.json");
    assert_eq!(
        run(&[
            "cover", "--input", &space, "--method", "whitney", "--domain", &domain, "--out", &out,
        ]),
        0
    );
    // An unreasonably small budget turns the grid verification into an
    // input error suggesting --budget.
    assert_eq!(
        run(&[
            "cover",
            "--input",
            &space,
            "--method",
            "grid",
            "--scale",
            "0.1",
            "--budget",
            "1",
            "--out",
            &w.path("toosmall.json"),
        ]),
        EXIT_INPUT
    );
    let doc: serde_json::Value = serde_json::from_str(&w.read("whitney.json")).unwrap();
    assert!(doc["whitney"]["alpha"].as_f64().unwrap() > 1.0);

    // Sampled padded mode needs no enumeration cap but carries no report.
    let big_space = w.file(
        "big.json",
        &serde_json::json!({
            "coords": (0..12).map(|i| vec![i as f64]).collect::<Vec<_>>(),
            "norm": "l2"
        })
        .to_string(),
    );
    let out = w.path("sampled.json");
    assert_eq!(
        run(&[
            "cover",
            "--input",
            &big_space,
            "--method",
            "padded",
            "--scale",
            "2.0",
            "--mode",
            "sample:50:3",
            "--out",
            &out,
        ]),
        0
    );
    let doc: serde_json::Value = serde_json::from_str(&w.read("sampled.json")).unwrap();
    assert!(doc.get("padded").is_none());
}

#[test]
fn certify_round_trip_and_tamper_detection() {
    let w = Workdir::new("certify");
    let space = w.file("space.json", LINE_CLOUD);
    let map = w.file("map.json", LINE_MAP);
    let out = w.path("result.json");
    let wcsv = w.path("weights.csv");
    assert_eq!(
        run(&[
            "extend",
            "--input",
            &space,
            "--method",
            "whitney",
            "--map",
            &map,
            "--out",
            &out,
            "--weights-csv",
            &wcsv,
        ]),
        0
    );
    assert!(w.read("weights.csv").starts_with("point,block,weight"));
    assert_eq!(run(&["certify", "--input", &space, "--result", &out]), 0);
    // Tamper with a value: the stored certificate no longer matches.
    let mut doc: serde_json::Value = serde_json::from_str(&w.read("result.json")).unwrap();
    doc["result"]["values"][1][0] = serde_json::json!(25.0);
    let tampered = w.file("tampered.json", &doc.to_string());
    assert_eq!(
        run(&["certify", "--input", &space, "--result", &tampered]),
        EXIT_PROPERTY
    );
}

#[test]
fn matrix_spaces_extend_through_the_singleton_oracle() {
    // A pure distance-matrix space has no grid oracle; whitney falls back to
    // the singleton certificate Nagata(|A|−1, 0).
    let w = Workdir::new("matrix-extend");
    let space = w.file(
        "space.json",
        r#"{"dist": [[0.0, 2.0, 3.0, 4.0], [2.0, 0.0, 1.5, 2.5], [3.0, 1.5, 0.0, 1.2], [4.0, 2.5, 1.2, 0.0]]}"#,
    );
    let map = w.file("map.json", r#"{"domain": [0, 1], "values": [[0.0], [2.0]]}"#);
    let out = w.path("result.json");
    assert_eq!(
        run(&[
            "extend", "--input", &space, "--method", "whitney", "--map", &map, "--out", &out,
        ]),
        0
    );
    let doc: ExtendOutput = serde_json::from_str(&w.read("result.json")).unwrap();
    assert_eq!(doc.report.nagata_n, Some(1));
    assert_eq!(doc.report.nagata_c, Some(0.0));
    assert!(doc.result.within_bound);
}

#[test]
fn constants_subcommand_prints_known_values() {
    assert_eq!(run(&["constants", "--cn", "2"]), 0);
    assert_eq!(run(&["constants", "--cn", "9"]), EXIT_INPUT);
}

#[test]
fn unknown_flags_exit_with_input_error() {
    assert_eq!(run(&["extend", "--bogus"]), EXIT_INPUT);
}
