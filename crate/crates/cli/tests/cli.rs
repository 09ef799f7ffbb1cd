use std::path::Path;
use std::process::{Command, Output};

fn abcrules(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abcrules"))
        .args(args)
        .env_remove("ABC_ENUM_BUDGET")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const PARTIES: &str = "9 6\n0 1 2\n0 1 2\n0 1 2\n3 4 5\n3 4 5\n6 7 8\n";

#[test]
fn winners_and_score() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write(dir.path(), "p.txt", PARTIES);
    let out = abcrules(&["winners", "av", &profile, "-k", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("optimum: 9"), "{text}");
    assert!(text.contains("{0,1,2}"));

    let out = abcrules(&["winners", "seq-phragmen", &profile, "-k", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("committee: {0,1,3}"), "{text}");
    assert!(text.contains("round 2: candidate 3 value 1/2"), "{text}");

    let out = abcrules(&["score", "pav", &profile, "0,3,6"]);
    assert_eq!(stdout(&out).trim(), "6");
    // quotas of two voters: the single {6,7,8} voter is the only one c6 can satisfy
    let out = abcrules(&["score", "monroe", &profile, "0,3,6"]);
    assert_eq!(stdout(&out).trim(), "5");
    let out = abcrules(&["score", "opt-phragmen", &profile, "0,1,3"]);
    assert_eq!(stdout(&out).trim(), "2/3");
}

#[test]
fn ratios_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write(dir.path(), "p.txt", PARTIES);
    let out = abcrules(&["ratios", &profile, "-k", "3", "--rules", "av,cc"]);
    let text = stdout(&out);
    assert!(text.starts_with("rule,k,av_ratio_exact"));
    assert!(text.contains("av,3,1,1.000000000000,1/2,0.500000000000"), "{text}");

    let out = abcrules(&["bounds", "pav", "-k", "4"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("cc_ratio"));
    let out = abcrules(&["bounds", "geom-2", "-k", "4"]);
    assert!(out.status.success());
}

#[test]
fn construct_feeds_back_into_commands() {
    let out = abcrules(&["construct", "cc-of-av", "-k", "3", "-x", "100", "--check"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("measured 101/301"));
    let dir = tempfile::tempdir().unwrap();
    let profile = write(dir.path(), "c.txt", &stdout(&out));
    let out = abcrules(&["check-efficiency", &profile, "-k", "3", "0,1,2"]);
    assert_eq!(stdout(&out).trim(), "undominated");
}

#[test]
fn efficiency_check_finds_dominator() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write(dir.path(), "p.txt", "4 2\n0 1\n2\n");
    let out = abcrules(&["check-efficiency", &profile, "-k", "2", "0,3"]);
    assert!(stdout(&out).starts_with("dominated by {0,1}"));
}

#[test]
fn experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "run.cfg",
        "profiles = 6\nm = 7\nn = 10\nmin_size = 1\nmax_size = 3\nks = 2\nrules = av, pav\nthreshold = 1\noutput = rows.csv\nsummary = summary.csv\n",
    );
    let out = abcrules(&["experiment", "--config", &config]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    assert!(rows.starts_with("instance,rule,k,av_ratio_exact,av_ratio,cc_ratio_exact,cc_ratio\n"));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "3\n");
    assert_eq!(abcrules(&["winners", "av", &bad, "-k", "1"]).status.code(), Some(3));
    let profile = write(dir.path(), "p.txt", PARTIES);
    assert_eq!(abcrules(&["winners", "av", &profile, "-k", "12"]).status.code(), Some(2));
    assert_eq!(abcrules(&["winners", "borda", &profile, "-k", "2"]).status.code(), Some(2));
    assert_eq!(abcrules(&["--budget", "10", "winners", "cc", &profile, "-k", "3"]).status.code(), Some(4));
    assert_eq!(abcrules(&["construct", "lq-cc", "-k", "3", "-x", "2"]).status.code(), Some(2));
}
