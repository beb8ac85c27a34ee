use std::path::PathBuf;
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    /// Value of `key` in a text-format report.
    fn get(&self, key: &str) -> Option<&str> {
        self.stdout.lines().find_map(|l| l.split_once(": ").filter(|(k, _)| *k == key).map(|(_, v)| v))
    }

    fn value(&self, key: &str) -> &str {
        self.get(key).unwrap_or_else(|| panic!("no `{key}` in\n{}", self.stdout))
    }
}

fn qfix(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_qfix")).args(args).output().expect("spawn qfix");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
    }
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qfix-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn mk_file(k: usize) -> PathBuf {
    let run = qfix(&["mk", &k.to_string()]);
    assert_eq!(run.code, 0);
    temp_file(&format!("m{k}.txt"), &run.stdout)
}

fn assert_error(run: &Run, code: &str) {
    assert_ne!(run.code, 0);
    assert!(run.stdout.is_empty(), "{}", run.stdout);
    assert_eq!(run.stderr.lines().count(), 1, "{}", run.stderr);
    assert!(run.stderr.starts_with(&format!("error: {code}: ")), "{}", run.stderr);
}

#[test]
fn fixpoint_of_the_worked_example() {
    let run =
        qfix(&["fixpoint", "--logic", "qk-bot", "--n", "1", "--hole", "p", "box(#p -> forall u.(Q(u) -> box #p))"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.value("stage.0"), "true");
    assert_eq!(run.value("stage.1"), "box (true -> forall u. (Q(u) -> true))");
    assert_eq!(run.value("result"), "box (true -> forall u. (Q(u) -> true))");
    assert_eq!(run.value("truncation.1"), "box (#p -> forall u. (Q(u) -> true))");
}

#[test]
fn sigma_fixpoint_of_negated_box() {
    let run = qfix(&["fixpoint", "--logic", "qgl-sigma", "~ box #p"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.value("result"), "~box ~true");
}

#[test]
fn unmodalized_target_is_rejected() {
    assert_error(&qfix(&["fixpoint", "--logic", "qk-bot", "--n", "0", "#p"]), "not-modalized");
    let machine = qfix(&["--format", "machine", "fixpoint", "#p"]);
    assert!(machine.stderr.starts_with("error\tnot-modalized\t"), "{}", machine.stderr);
    assert_error(&qfix(&["fixpoint", "--logic", "qgl-sigma", "forall u. (box #p -> P(u))"]), "not-decomposable");
}

#[test]
fn check_box_false_in_m2() {
    let m2 = mk_file(2);
    let run = qfix(&["check", m2.to_str().unwrap(), "box false", "--frame"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.value("world.0"), "true");
    assert_eq!(run.value("world.1"), "false");
    assert_eq!(run.value("world.2"), "false");
    assert_eq!(run.value("valid"), "false");
    assert_eq!(run.value("frame.transitive"), "yes");
    assert_eq!(run.value("frame.irreflexive"), "yes");
    assert_eq!(run.value("frame.frame_height"), "2");
    assert_eq!(run.value("frame.classes"), "FI,FIFD,FH");
    assert_eq!(qfix(&["check", m2.to_str().unwrap(), "true"]).value("valid"), "true");
}

#[test]
fn invalid_model_files_are_rejected() {
    let bad = temp_file("shrinking.txt", "worlds: 2\nedge: 0 1\ndomain: 0 a\ndomain: 1 b\n");
    assert_error(&qfix(&["check", bad.to_str().unwrap(), "true"]), "invalid-model");
    let garbled = temp_file("garbled.txt", "worlds: two\n");
    assert_error(&qfix(&["check", garbled.to_str().unwrap(), "true"]), "model-syntax");
    assert_error(&qfix(&["check", "/nonexistent/model.txt", "true"]), "io-error");
}

#[test]
fn verify_fixpoint_examples() {
    let run = qfix(&["verify-fixpoint", "~box #p", "--n", "1", "--max-worlds", "2", "--max-domain", "1"]);
    assert_eq!(run.code, 0, "{}", run.stdout);
    assert_eq!(run.value("exhaustive.failures"), "0");
    assert_eq!(run.value("verdict"), "pass");

    let run = qfix(&["verify-fixpoint", "box (#p -> forall u. (Q(u) -> box #p))", "--n", "0"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.value("verdict"), "pass");

    let run = qfix(&["--seed", "1", "verify-fixpoint", "forall u. box (#p -> P(u))", "--n", "2", "--random", "500"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.value("seed"), "1");
    assert_eq!(run.value("random.checked"), "500");
    assert_eq!(run.value("random.failures"), "0");
}

#[test]
fn refute_examples() {
    let run = qfix(&["refute", "true", "--k-max", "2"]);
    assert_eq!(run.value("refuted_at"), "1");
    assert_eq!(run.value("failing_world"), "1");
    assert_eq!(qfix(&["refute", "false", "--k-max", "2"]).value("refuted_at"), "0");

    let a2 = qfix(&["fixpoint", "--n", "2", "forall u. box (#p -> P(u))"]);
    let run = qfix(&["refute", a2.value("result"), "--k-max", "8"]);
    let k: usize = run.value("refuted_at").parse().unwrap();
    assert!(k <= 8);

    let run = qfix(&["refute", "true", "--k-max", "0"]);
    assert_eq!(run.value("refuted_at"), "none (inconclusive)");
    assert_error(&qfix(&["refute", "Q(u)"]), "foreign-predicate");
}

#[test]
fn formulas_can_come_from_files() {
    let path = temp_file("target.txt", "forall u. box (#p -> P(u))\n");
    let from_file = qfix(&["fixpoint", "--n", "2", &format!("@{}", path.display())]);
    let inline = qfix(&["fixpoint", "--n", "2", "forall u. box (#p -> P(u))"]);
    assert_eq!(from_file.code, 0);
    assert_eq!(from_file.stdout, inline.stdout);
    assert_error(&qfix(&["fixpoint", "@/nonexistent/target.txt"]), "io-error");
}

#[test]
fn clashing_variables_are_renamed_and_reported() {
    let run = qfix(&["fixpoint", "--n", "1", "box (#p -> P(u)) & forall u. box P(u)"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.value("normalized"), "box (#p -> P(u)) & forall u0. box P(u0)");
    assert!(qfix(&["fixpoint", "box #p"]).get("normalized").is_none());
}

#[test]
fn seed_is_echoed_in_every_report() {
    for args in [
        vec!["--seed", "9", "fixpoint", "box #p"],
        vec!["--seed", "9", "refute", "true", "--k-max", "1"],
        vec!["--seed", "9", "verify-fixpoint", "box #p", "--random", "3"],
    ] {
        assert_eq!(qfix(&args).value("seed"), "9", "{args:?}");
    }
    let generated = qfix(&["--seed", "9", "gen-model"]);
    assert!(generated.stdout.lines().any(|l| l == "# seed: 9"), "{}", generated.stdout);
}

#[test]
fn generated_models_load_back() {
    for seed in 0..10 {
        let s = seed.to_string();
        let run = qfix(&["--seed", &s, "gen-model", "--worlds", "1..5", "--preds", "P/1,R/2", "--transitive"]);
        assert_eq!(run.code, 0);
        let path = temp_file(&format!("gen{seed}.txt"), &run.stdout);
        let checked = qfix(&["check", path.to_str().unwrap(), "box P(u) -> box box P(u)", "--frame"]);
        assert_eq!(checked.code, 0, "{}", checked.stderr);
        assert_eq!(checked.value("valid"), "true");
        assert_eq!(checked.value("frame.transitive"), "yes");
    }
    assert_error(&qfix(&["gen-model", "--worlds", "3", "--min-edges", "9", "--irreflexive"]), "unsatisfiable-spec");
}

#[test]
fn machine_output_is_key_tab_value() {
    let m2 = mk_file(2);
    for args in [
        vec!["--format", "machine", "fixpoint", "box (#p -> forall u. (Q(u) -> box #p))", "--n", "2"],
        vec!["--format", "machine", "fixpoint", "--logic", "qgl-sigma", "~box #p & box (#p -> P(u))"],
        vec!["--format", "machine", "check", m2.to_str().unwrap(), "box false", "--frame"],
        vec!["--format", "machine", "refute", "box false"],
        vec!["--format", "machine", "gen-model"],
        vec!["--format", "machine", "mk", "1"],
    ] {
        let run = qfix(&args);
        assert_eq!(run.code, 0, "{args:?}");
        assert!(!run.stdout.is_empty());
        for line in run.stdout.lines() {
            assert_eq!(line.matches('\t').count(), 1, "{line:?}");
        }
        assert!(run.stdout.starts_with("command\t"));
    }
}

#[test]
fn parse_errors_are_single_lines() {
    assert_error(&qfix(&["fixpoint", "box (#p ->"]), "parse-error");
    assert_error(&qfix(&["fixpoint", "box (P(u) -> P(u, v)) & #p"]), "arity-mismatch");
}
