use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn twohop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twohop")).args(args).env("TWOHOP_WORKERS", "1").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = twohop(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twohop-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn gen_oracle_certify() {
    let dir = scratch("goc");
    let i3 = dir.join("i3.txt");
    fs::write(&i3, "n 3\n1 2 2\n1 2\n1\n").unwrap();
    assert_eq!(stdout(&["oracle", i3.to_str().unwrap()]), "cost 4\nchildren 1\n");
    // the star costs 5, one above the optimum
    let star = stdout(&["certify", i3.to_str().unwrap(), "edge:6:e0"]);
    assert!(star.starts_with("Refuted op="), "{star}");
    let best = stdout(&["certify", i3.to_str().unwrap(), "vertex:3:4"]);
    assert_eq!(best, "Certified cost=4\n");
    assert!(!twohop(&["certify", i3.to_str().unwrap(), "edge:6:94"]).status.success());

    let planted = dir.join("p.txt");
    stdout(&["gen", "--n", "8", "--plant", "op1", "--seed", "4", "--out", planted.to_str().unwrap()]);
    let text = fs::read_to_string(&planted).unwrap();
    let tree = text.lines().find_map(|l| l.strip_prefix("# tree edge")).map(|h| format!("edge{h}")).unwrap();
    assert!(stdout(&["certify", planted.to_str().unwrap(), &tree]).starts_with("Refuted op=1 "));
    let improved = stdout(&["certify", planted.to_str().unwrap(), &tree, "--improve"]);
    assert!(improved.starts_with("Certified after"));

    let a = stdout(&["gen", "--n", "8", "--p1", "0.5", "--seed", "7"]);
    assert_eq!(a, stdout(&["gen", "--n", "8", "--p1", "0.5", "--seed", "7"]));
    assert!(a.starts_with("n 8\n"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn run_summarize_replay() {
    let dir = scratch("run");
    let out = dir.join("runs.csv");
    let o = out.to_str().unwrap();
    stdout(&[
        "run",
        "--algo",
        "gsemo2",
        "--n",
        "6",
        "--trials",
        "3",
        "--seed",
        "5",
        "--target",
        "feasible,ratio32",
        "--out",
        o,
    ]);
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[0],
        "config_hash,algo,n,m,p1,instance_id,seed,budget,eval_feasible,eval_ratio32,eval_opt,final_cost,opt_cost,ratio,wall_ms"
    );
    let row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!((row[1], row[2], row[3], row[6]), ("gsemo2", "6", "21", "6"));
    assert_eq!(row[10], "NOT_REACHED");

    let summary = stdout(&["summarize", o]);
    assert!(summary.contains("gsemo2") && summary.contains("ratio32"));

    let manifest = dir.join("runs.csv.manifest.json");
    let again = stdout(&["replay", "--manifest", manifest.to_str().unwrap(), "--hash", row[0], "--seed", "6"]);
    let strip_time = |l: &str| l.rsplit_once(',').unwrap().0.to_string();
    assert_eq!(strip_time(again.lines().nth(1).unwrap()), strip_time(lines[2]));

    assert!(!twohop(&["run", "--algo", "ea-vertex", "--n", "40", "--target", "ratio32", "--trials", "1"])
        .status
        .success());
    assert!(!twohop(&["run", "--algo", "bogus", "--n", "4"]).status.success());
    fs::remove_dir_all(&dir).unwrap();
}
