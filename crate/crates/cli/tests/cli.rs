use assert_cmd::Command;
use braidaug::ngalg::Presentation;
use braidaug::poly::{LaurentPoly, RatFunc};
use predicates::prelude::*;

fn braidaug() -> Command {
    Command::cargo_bin("braidaug").unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = braidaug().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Parse the {"num": .., "den": ..} JSON printed by `homfly --json`.
fn ratfunc_from_stdout(s: &str) -> RatFunc {
    let v: serde_json::Value = serde_json::from_str(s).unwrap();
    let num = LaurentPoly::from_json(&v["num"]).unwrap();
    let den = LaurentPoly::from_json(&v["den"]).unwrap();
    RatFunc::new(num, den).unwrap()
}

#[test]
fn present_examples() {
    let unknot = stdout_of(&["present", "", "-n", "1"]);
    assert!(unknot.contains("relations (1):"), "{unknot}");
    assert!(unknot.contains("ring: g, nu, Lam"), "{unknot}");

    let trefoil = stdout_of(&["present", "1 1 1"]);
    assert!(trefoil.contains("relations (8):"), "{trefoil}");

    // two components: per-component nu/Lam pairs, transport + conjugation rows
    let hopf = stdout_of(&["present", "1 1"]);
    assert!(hopf.contains("nu1"), "{hopf}");
    assert!(hopf.contains("nu2"), "{hopf}");
    assert!(hopf.contains("Lam1"), "{hopf}");
    assert!(hopf.contains("Lam2"), "{hopf}");
    assert!(hopf.contains("relations (10):"), "{hopf}");
}

#[test]
fn present_json_round_trips() {
    let out = stdout_of(&["present", "1 1 1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let pres = Presentation::from_json(&v).unwrap();
    assert_eq!(pres.gens.len(), 8);
    assert_eq!(pres.to_json(), v);
}

#[test]
fn augpoly_unknot_and_json_round_trip() {
    let text = stdout_of(&["augpoly", "", "-n", "1"]);
    assert!(text.contains("generators (1):"), "{text}");

    let out = stdout_of(&["augpoly", "1 1 1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let gens = v["gens"].as_array().unwrap();
    assert!(!gens.is_empty());
    for g in gens {
        let p = LaurentPoly::from_json(g).unwrap();
        assert_eq!(&p.to_json(), g);
    }
}

#[test]
fn homfly_is_a_link_invariant_across_words() {
    // trefoil = conjugated trefoil = stabilized trefoil, != figure eight
    let trefoil = ratfunc_from_stdout(&stdout_of(&["homfly", "1 1 1", "--json"]));
    let conj = ratfunc_from_stdout(&stdout_of(&["homfly", "-1 1 1 1 1", "--json"]));
    let stab = ratfunc_from_stdout(&stdout_of(&["homfly", "1 1 1 2", "--json"]));
    let fig8 = ratfunc_from_stdout(&stdout_of(&["homfly", "1 -2 1 -2", "--json"]));
    assert_eq!(trefoil, conj);
    assert_eq!(trefoil, stab);
    assert_ne!(trefoil, fig8);
}

#[test]
fn output_is_deterministic() {
    let a = stdout_of(&["homfly", "1 1 1"]);
    let b = stdout_of(&["homfly", "1 1 1"]);
    assert_eq!(a, b);
    let a = stdout_of(&["augpoly", "1 1 1"]);
    let b = stdout_of(&["augpoly", "1 1 1"]);
    assert_eq!(a, b);
}

#[test]
fn verify_unknot_passes_by_default() {
    braidaug()
        .args(["verify-unknot"])
        .assert()
        .success()
        .stdout(predicate::str::contains("annihilation: pass"))
        .stdout(predicate::str::contains("classical-limit: pass"))
        .stdout(predicate::str::contains("ideal-match: pass"))
        .stdout(predicate::str::contains("psi-conjugation: pass"));
}

#[test]
fn verify_unknot_negative_controls() {
    braidaug()
        .args(["verify-unknot", "--torus-sign", "pos"])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("annihilation: fail"));
    braidaug()
        .args(["verify-unknot", "--psi-sign", "dj-minus-di"])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("psi-conjugation: fail"));
}

#[test]
fn markov_moves_preserve_the_unknot_ideal() {
    braidaug()
        .args(["markov-test", "1", "-n", "2"])
        .assert()
        .success()
        .stdout(predicate::str::contains("conjugation: equal"))
        .stdout(predicate::str::contains("stabilization+: equal"))
        .stdout(predicate::str::contains("stabilization-: equal"));
}

#[test]
fn markov_against_distinguishes_knots() {
    braidaug()
        .args(["markov-test", "1 1 1", "--against", "1 1 1 2", "--timeout-s", "120"])
        .assert()
        .success()
        .stdout(predicate::str::contains("against: equal"));
    braidaug()
        .args(["markov-test", "1 1 1", "--against", "1 -2 1 -2", "--timeout-s", "120"])
        .assert()
        .success()
        .stdout(predicate::str::contains("against: unequal"));
}

#[test]
fn resource_exhaustion_reports_incomplete() {
    braidaug()
        .args([
            "augpoly",
            "1 2 -3 1 2 -3 1 2 -3 1 2 -3",
            "-n",
            "4",
            "--timeout-s",
            "1",
            "--spair-budget",
            "500",
        ])
        .assert()
        .code(2)
        .stdout(predicate::str::contains("incomplete:"));
}

#[test]
fn usage_errors_exit_3() {
    braidaug().args(["nosuchcmd"]).assert().code(3);
    braidaug().args(["present", "5", "-n", "2"]).assert().code(3);
    braidaug().args(["present"]).assert().code(3);
}
