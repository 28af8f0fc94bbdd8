use std::fs;
use std::path::PathBuf;

use gausspi::cli::{run, Outcome};

fn file(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("gausspi-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p: PathBuf = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("gausspi").chain(args.iter().copied()))
}

fn ok(args: &[&str]) -> String {
    let o = cli(args);
    assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
    o.stdout
}

const TREFOIL: &str = "gd 1\ngroup trivial\ndegree 3\narrows 0->3:+ 4->1:+ 2->5:+\nedges e e e e e e\n";
const F2: &str = "# two arrows\ngd 1\ngroup free 2\ndegree 2\narrows 0->2:+ 3->1:-\nedges x1 e x2 e\n";

#[test]
fn canon_is_idempotent() {
    for (name, text) in [("t.gd", TREFOIL), ("f.gd", F2)] {
        let once = ok(&["canon", &file(name, text)]);
        let twice = ok(&["canon", &file(&format!("re-{name}"), &once)]);
        assert_eq!(once, twice);
    }
}

#[test]
fn energy_of_the_circle_loop() {
    let zero = "gd 1\ngroup Z\ndegree 0\nclass 2\n";
    for (name, text) in [("t.gd", TREFOIL), ("f.gd", F2), ("z.gd", zero)] {
        assert_eq!(ok(&["homology", "energy", &file(name, text), "--loop", "comb 1 0"]), "1\n");
    }
    let f = file("t.gd", TREFOIL);
    assert_eq!(ok(&["homology", "torsion", &f, "--loop", "comb 1"]), "-1\n");
    assert_eq!(ok(&["homology", "decompose", &f, "--loop", "comb 2 1 0 -1"]), "K 2\nA1 1\nA2 0\nA3 -1\n");
}

#[test]
fn exit_codes() {
    let f = file("f.gd", F2);
    assert_eq!(cli(&["canon", &file("bad.gd", "gd 1\ngroup Q\ndegree 0\nclass e\n")]).code, 2);
    assert_eq!(cli(&["canon", &file("short.gd", "gd 1\ngroup Z\ndegree 1\narrows 0->1:+\nedges 0\n")]).code, 2);
    assert_eq!(cli(&["canon", "/nonexistent/x.gd"]).code, 2);
    assert_eq!(cli(&["canon", &f, "--bogus"]).code, 2);
    assert_eq!(cli(&["frobnicate"]).code, 2);
    let o = cli(&["moves", "apply", &f, "--move", "R1- @arrow=0"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("not isolated"), "{}", o.stderr);
    assert_eq!(cli(&["abelianize", &f]).code, 1);
    let null = file("n.gd", "gd 1\ngroup Z\ndegree 1\narrows 0->1:+\nedges 1 -1\n");
    assert_eq!(cli(&["whitney", &null]).code, 1);
    assert_eq!(cli(&["homology", "energy", &f, "--loop", "loop A1=1"]).code, 1);
    assert_eq!(cli(&["homology", "energy", &f, "--loop", "spiral"]).code, 2);
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn listed_moves_apply() {
    let f = file("t.gd", TREFOIL);
    let list = ok(&["moves", "list", &f, "--ball", "0"]);
    let moves: Vec<&str> = list.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(moves.iter().any(|m| m.starts_with("R1+")) && moves.iter().any(|m| m.starts_with("R2+")));
    for m in moves {
        ok(&["moves", "apply", &f, "--move", m]);
    }
}

#[test]
fn replay_matches_single_steps() {
    let f = file("t.gd", TREFOIL);
    let step1 = ok(&["moves", "apply", &f, "--move", "R1+ @edge=0 writhe=- dir=th"]);
    let f1 = file("t1.gd", &step1);
    let m2 = ok(&["moves", "list", &f1, "--kinds", "R2+", "--ball", "0"]).lines().nth(1).unwrap().to_string();
    let step2 = ok(&["moves", "apply", &f1, "--move", &m2]);
    let script = file("script.txt", &format!("R1+ @edge=0 writhe=- dir=th\n# then\n{m2}\n"));
    assert_eq!(ok(&["moves", "replay", &f, &script]), step2);
    let bad = file("bad.txt", "R2- @arrows=0,1\n");
    let o = cli(&["moves", "replay", &f, &bad]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("line 1"));
}

#[test]
fn series_files() {
    let x = file("x.series", "series 1\ngroup Z/2 w -1\n1 | degree 1 arrows 0->1 edges x1 x1\n-1/2 | degree 0 class e\n");
    let ix = ok(&["imap", &x]);
    let back = ok(&["imapinv", &file("ix.series", &ix)]);
    let direct = ok(&["imapinv", &file("ix2.series", &ok(&["imap", &file("back.series", &back)]))]);
    assert_eq!(back, direct);
    assert!(back.contains("-1/2 | degree 0 class 0"));
    assert_eq!(ok(&["pair", &x, &x]), "5/4\n");
}

#[test]
fn invariance_reports() {
    let good = file("good.series", "series 1\ngroup Z/2 w -1\n1 | degree 1 arrows 0->1 edges x1 x1\n");
    let out = ok(&["check-invariance", "--series", &good, "--ball", "1", "--seed", "3"]);
    assert!(out.starts_with("verdict=PASS\n"));
    assert_eq!(out, ok(&["check-invariance", "--series", &good, "--ball", "1", "--seed", "3"]));
    let bad = file("bad.series", "series 1\ngroup Z/2 w -1\n1 | degree 1 arrows 0->1 edges 0 x1\n1 | degree 1 arrows 0->1 edges x1 0\n");
    let o = cli(&["check-invariance", "--series", &bad, "--ball", "1"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("ap1=fail"));
    let signed = file("signed.series", "series 1\ngroup trivial\n1 | degree 1 arrows 0->1:+ edges e e\n");
    assert_eq!(cli(&["check-invariance", "--series", &signed]).code, 1);
}

#[test]
fn relations_and_span() {
    let a = ok(&["relations", "gen", "--family", "AP1", "--group", "Z/2", "--degree", "1", "--ball", "1"]);
    assert_eq!(a, ok(&["relations", "gen", "--family", "AP1", "--group", "Z/2", "--degree", "1", "--ball", "1"]));
    assert_eq!(a.lines().filter(|l| l.starts_with("relator")).count(), 3);
    let nabla = ok(&["relations", "gen", "--family", "nabla", "--group", "trivial", "--degree", "2"]);
    assert!(nabla.contains("| point degree 2"));
    assert_eq!(cli(&["relations", "gen", "--family", "P9", "--group", "trivial", "--degree", "1"]).code, 2);
    let r = file("r.series", "series 1\ngroup Z/2\n1 | degree 1 arrows 0->1 edges 0 1\n");
    assert!(ok(&["span", &r, "--family", "AP1", "--ball", "1"]).starts_with("member=yes"));
    let s = file("s.series", "series 1\ngroup Z/2\n1 | degree 1 arrows 0->1 edges 1 1\n");
    assert_eq!(ok(&["span", &s, "--family", "AP1", "--ball", "1"]), "member=no\n");
}

#[test]
fn invariants() {
    let g = file("g.gd", "gd 1\ngroup Z\ndegree 2\narrows 0->2:+ 1->3:+\nedges 1 0 0 0\n");
    let c = file("c.series", "series 1\ngroup Z\n1 | degree 0 class 1\n");
    assert_eq!(ok(&["eval", "--series", &c, &g]), "1\n");
    let w = ok(&["whitney", &g]);
    assert!(
        w.ends_with(&format!("writhe={}\n", w.lines().take(2).map(|l| l.split('=').nth(1).unwrap().parse::<i64>().unwrap()).sum::<i64>()))
    );
    let f = file("f.gd", F2);
    assert_eq!(cli(&["gv", "--n", "1", "--gamma", "x1", &f]).code, 2);
    assert_eq!(ok(&["gv", "--n", "1", "--gamma", "x1,x2", &f]), ok(&["gv", "--n", "1", "--gamma", "x1,x2", &f]));
    let orbit = ok(&["worbit", &file("w.gd", "gd 1\ngroup Z/2 w -1\ndegree 1\narrows 0->1:+\nedges 1 0\n"), "--ball", "1"]);
    assert!(orbit.starts_with("size "));
    assert!(ok(&["aut", &file("t.gd", TREFOIL)]) == "3\n");
    assert!(ok(&["abelianize", &file("z.gd", "gd 1\ngroup Z\ndegree 1\narrows 0->1:+\nedges 2 3\n")]).contains("global 5"));
    assert!(ok(&["sub", &file("t.gd", TREFOIL), "--keep", "0"]).contains("degree 1"));
}

#[test]
fn selftest_subset() {
    let o = cli(&["selftest", "--only", "1,2"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert!(o.stdout.ends_with("passed 2/2\n"));
}
