use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("brylinski-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], cache: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brylinski"))
        .args(args)
        .env("BRYLINSKI_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn hilb_row() {
    let c = scratch("hilb");
    let o = run(&["hilb", "--family", "A", "--rank", "1", "--q", "3", "--t", "6"], &c);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let terms: Vec<(u64, u64, String)> = serde_json::from_value(v["series"]["terms"].clone()).unwrap();
    let at = |t: u64, q: u64| terms.iter().find(|x| x.0 == t && x.1 == q).map(|x| x.2.clone());
    assert_eq!(at(2, 3).as_deref(), Some("1"));
    assert_eq!(at(4, 3).as_deref(), Some("1"));
    assert_eq!(at(6, 3).as_deref(), Some("1"));
    assert_eq!(at(4, 1), None);
}

#[test]
fn verify_main_passes_and_is_deterministic() {
    let c = scratch("main");
    let args = ["verify-main", "--family", "A", "--rank", "1", "--n", "4"];
    let a = run(&args, &c);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(json(&a)["ok"], true);
    let entries: Vec<_> = std::fs::read_dir(&c).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let b = run(&args, &c);
    assert_eq!(a.stdout, b.stdout);
    let uncached = Command::new(env!("CARGO_BIN_EXE_brylinski")).args(args).arg("--no-cache").output().unwrap();
    assert_eq!(a.stdout, uncached.stdout);
}

#[test]
fn generic_witness() {
    let c = scratch("generic");
    let o = run(&["generic", "--family", "A", "--rank", "1", "--k", "-1", "--weight", "0"], &c);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["generic"], false);
    assert_eq!(v["result"]["witness"]["kind"], "real");
    let o = run(&["generic", "--family", "A", "--rank", "1", "--k", "-1", "--weight", "-1/4"], &c);
    assert_eq!(json(&o)["result"]["generic"], true);
    let o = run(&["generic", "--family", "A", "--rank", "2", "--shift-rho", "--weight", "1/3,1/5", "--basis", "fundamental"], &c);
    assert_eq!(json(&o)["result"]["generic"], true);
}

#[test]
fn fock_negative_control_is_not_a_violation() {
    let c = scratch("fock");
    let o = run(&["verify-fock", "--family", "A", "--rank", "1", "--n", "3", "--weight", "0"], &c);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v[0]["hypothesis"], false);
    assert_eq!(v[0]["first_deficient_level"], 1);
    let o = run(&["verify-fock", "--family", "A", "--rank", "2", "--n", "2", "--random", "2", "--seed", "4"], &c);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    let c = scratch("codes");
    assert_eq!(run(&["roots", "--family", "F", "--rank", "4"], &c).status.code(), Some(2));
    assert_eq!(run(&["roots", "--family", "A"], &c).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], &c).status.code(), Some(2));
    assert_eq!(run(&["generic", "--family", "A", "--rank", "2", "--k", "0", "--weight", "1"], &c).status.code(), Some(2));
    let o = run(&["brylinski", "--family", "A", "--rank", "2", "--n", "30", "--max-dim", "500"], &c);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn config_file_and_flag_precedence() {
    let c = scratch("config");
    let cfg = c.join("run.toml");
    std::fs::write(&cfg, "family = \"A\"\nrank = 2\nq = 2\nt = 3\nformat = \"json\"\n").unwrap();
    let o = run(&["hilb", "--config", cfg.to_str().unwrap()], &c);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["rank"], 2);
    assert_eq!(json(&o)["series"]["q_order"], 2);
    let o = run(&["hilb", "--config", cfg.to_str().unwrap(), "--rank", "1", "--format", "table"], &c);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("   t\\q"), "{text}");
    std::fs::write(&cfg, "family = \"A\"\nbogus = 1\n").unwrap();
    assert_eq!(run(&["roots", "--config", cfg.to_str().unwrap()], &c).status.code(), Some(2));
}

#[test]
fn cached_generators_reload() {
    let c = scratch("wgens");
    let a = run(&["wgens", "--family", "A", "--rank", "2", "--cutoff", "5"], &c);
    assert_eq!(a.status.code(), Some(0));
    let v = json(&a);
    assert_eq!(v["schema"], "brylinski/wgens/1");
    assert_eq!(v["kernel_dims"], serde_json::json!([1, 0, 1, 2, 3, 4]));
    let file = std::fs::read_dir(&c).unwrap().next().unwrap().unwrap().path();
    let stored = std::fs::read_to_string(&file).unwrap();
    let b = run(&["wgens", "--family", "A", "--rank", "2", "--cutoff", "5"], &c);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stored, std::fs::read_to_string(&file).unwrap());
    std::fs::write(&file, "not json").unwrap();
    let d = run(&["wgens", "--family", "A", "--rank", "2", "--cutoff", "5"], &c);
    assert_eq!(a.stdout, d.stdout);
}
