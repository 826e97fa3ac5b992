use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use edge_elim::harness::ExperimentConfig;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edge-elim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn generate(dir: &TempDir, name: &str, n: usize, seed: u64) -> String {
    let file = path(dir, name);
    let out = run(&["generate", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", &file]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    file
}

fn write_square(dir: &TempDir) -> String {
    let file = path(dir, "square.tsp");
    fs::write(
        &file,
        "NAME : square\nTYPE : TSP\nDIMENSION : 4\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n\
         1 0 0\n2 1 0\n3 1 1\n4 0 1\nEOF\n",
    )
    .unwrap();
    file
}

fn verdict_rows(text: &str) -> Vec<(usize, usize, bool, String)> {
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.splitn(4, ',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2] == "1", f[3].to_string())
        })
        .collect()
}

#[test]
fn generate_is_deterministic_and_prints_seed() {
    let dir = TempDir::new().unwrap();
    let a = generate(&dir, "a.json", 100, 7);
    let b = generate(&dir, "b.json", 100, 7);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let out = run(&["generate", "--n", "5"]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("seed=0"), "{}", stderr(&out));
    let inspect = run(&["inspect", "--in", &a]);
    assert_eq!(code(&inspect), 0);
    assert!(stdout(&inspect).starts_with("n 100\n"));
}

#[test]
fn generate_rejects_empty_and_unknown_density() {
    assert_eq!(code(&run(&["generate", "--n", "0"])), 2);
    assert_eq!(code(&run(&["generate", "--n", "5", "--density", "nope"])), 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["generate", "--n", "5", "--bogus"])), 1);
    assert_eq!(code(&run(&["eliminate", "--in", "x", "--criterion", "tsp"])), 1);
    assert_eq!(code(&run(&["eliminate", "--in", "x", "--criterion", "jv", "--edges", "some"])), 1);
}

#[test]
fn square_diagonals_are_eliminated() {
    let dir = TempDir::new().unwrap();
    let square = write_square(&dir);
    let out = run(&["eliminate", "--in", &square, "--criterion", "jv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = verdict_rows(&stdout(&out));
    assert_eq!(rows.len(), 6);
    for (i, j, eliminated, _) in rows {
        let diagonal = (i, j) == (0, 2) || (i, j) == (1, 3);
        assert_eq!(eliminated, diagonal, "edge {i}-{j}");
    }
    assert!(stderr(&out).contains("eliminated 2 of 6"));
}

#[test]
fn size_gates() {
    let dir = TempDir::new().unwrap();
    let square = write_square(&dir);
    assert_eq!(code(&run(&["eliminate", "--in", &square, "--criterion", "hs"])), 2);
    let big = generate(&dir, "big.json", 20, 1);
    assert_eq!(code(&run(&["verify", "--in", &big, "--criterion", "jv"])), 2);
    assert_eq!(code(&run(&["eliminate", "--in", "/nonexistent/file", "--criterion", "jv"])), 2);
}

#[test]
fn sampled_edges_give_requested_rows() {
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, "big.json", 10_000, 3);
    let out = run(&[
        "eliminate", "--in", &inst, "--criterion", "jv", "--edges", "sample:1000", "--seed", "9",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 1001);
}

#[test]
fn verify_accepts_sound_verdicts() {
    let dir = TempDir::new().unwrap();
    for seed in 0..5 {
        let inst = generate(&dir, &format!("i{seed}.json"), 8, seed);
        for crit in [["--criterion", "jv"], ["--criterion", "hs"]] {
            let out = run(&["verify", "--in", &inst, crit[0], crit[1]]);
            assert_eq!(code(&out), 0, "{}", stderr(&out));
        }
    }
}

#[test]
fn replayed_witnesses_validate_and_tampering_is_caught() {
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, "i.json", 9, 5);
    let verdicts = path(&dir, "v.csv");
    let out = run(&["eliminate", "--in", &inst, "--criterion", "jv", "--out", &verdicts]);
    assert_eq!(code(&out), 0);
    let replay = run(&["verify", "--in", &inst, "--criterion", "jv", "--replay", &verdicts]);
    assert_eq!(code(&replay), 0, "{}", stderr(&replay));

    // Mark every kept edge as eliminated, reusing some real witness.
    let text = fs::read_to_string(&verdicts).unwrap();
    let rows = verdict_rows(&text);
    let witness = rows.iter().find(|r| r.2).expect("some elimination").3.clone();
    let mut tampered = String::from("i,j,eliminated,witness\n");
    for (i, j, _, _) in &rows {
        tampered.push_str(&format!("{i},{j},1,{witness}\n"));
    }
    let bad = path(&dir, "bad.csv");
    fs::write(&bad, tampered).unwrap();
    let out = run(&["verify", "--in", &inst, "--criterion", "jv", "--replay", &bad]);
    assert_eq!(code(&out), 3, "{}", stdout(&out));

    let garbled = path(&dir, "garbled.csv");
    fs::write(&garbled, "i,j,eliminated,witness\n0,1,2,\n").unwrap();
    assert_eq!(code(&run(&["verify", "--in", &inst, "--criterion", "jv", "--replay", &garbled])), 2);
}

#[test]
fn hs_witnesses_replay() {
    let dir = TempDir::new().unwrap();
    for seed in 0..10 {
        let inst = generate(&dir, "i.json", 12, seed);
        let verdicts = path(&dir, "v.csv");
        let flags = ["--criterion", "hs", "--delta-rule", "pair-adaptive"];
        let out = bin()
            .args(["eliminate", "--in", &inst, "--out", &verdicts])
            .args(flags)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let out = bin()
            .args(["verify", "--in", &inst, "--replay", &verdicts])
            .args(flags)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stdout(&out));
    }
}

fn write_config(dir: &TempDir, name: &str, json: &str) -> String {
    let file = path(dir, name);
    fs::write(&file, json).unwrap();
    file
}

#[test]
fn rate_experiment_writes_csv_and_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{"criterion":"jv","n_values":[10,50],"trials":2,"edges":500,"density":"uniform","seed":3,"timing":false}"#,
    );
    let out = run(&["--threads", "2", "experiment", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,criterion,mode,edges_checked,edges_eliminated,rate,seed,wall_ms"));
    assert_eq!(lines.count(), 2);
    assert!(stderr(&out).contains("rem/n"));
    assert!(stderr(&out).contains("\"seed\":3"));
    let again = run(&["experiment", "--config", &cfg]);
    assert_eq!(stdout(&again), csv);

    let to_file = path(&dir, "out.csv");
    let out = run(&["experiment", "--config", &cfg, "--out", &to_file]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&to_file).unwrap(), csv);
}

#[test]
fn growth_and_soundness_experiments() {
    let dir = TempDir::new().unwrap();
    let growth = write_config(
        &dir,
        "g.json",
        r#"{"experiment":"growth","criterion":"jv","n_values":[50,100,200],"trials":1,"edges":300,"seed":1}"#,
    );
    let out = run(&["experiment", "--config", &growth]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("log-log slope"));

    let sound = write_config(
        &dir,
        "s.json",
        r#"{"experiment":"soundness","criterion":"hs","n_values":[8],"trials":10,"edges":"all","seed":1}"#,
    );
    let out = run(&["experiment", "--config", &sound]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn experiment_config_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&["experiment", "--config", "/nonexistent.json"])), 2);
    let bad = write_config(&dir, "bad.json", r#"{"criterion":"jv","n_values":[],"trials":1,"edges":5,"seed":1}"#);
    assert_eq!(code(&run(&["experiment", "--config", &bad])), 2);
}

#[test]
fn bundled_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(root).unwrap() {
        let file = entry.unwrap().path();
        let text = fs::read_to_string(&file).unwrap();
        ExperimentConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
        seen += 1;
    }
    assert!(seen >= 2);
}
