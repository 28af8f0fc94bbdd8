//! Command-line front end. `run` returns the exit code and the text that the
//! binary writes to stdout and stderr.

use std::fs;

use clap::{Args, Parser, Subcommand};

use crate::diagram::{abelianize, Diagram};
use crate::error::{Error, Result};
use crate::group::WeightedGroup;
use crate::homology::{decompose, energy, mu_eval, torsion};
use crate::invariance::{all_degenerate, certify_series, nabla_relator, r3_empirical, Orbits};
use crate::invariants::{eval_arrow, eval_nu, gv_eval, whitney};
use crate::io::{
    format_abelian, format_degenerate, format_diagram, format_move, format_q, format_series, inline, parse_diagram, parse_loop, parse_move,
    parse_series,
};
use crate::moves::{apply, enumerate_moves, replay, validate_site, w_orbit, MoveKind};
use crate::series::{gen_relations, i_inv, i_map, pairing, span_membership, Family, Series};

#[derive(Parser, Debug)]
#[command(name = "gausspi", about = "Gauss diagrams decorated by a weighted group", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Copy)]
struct Common {
    /// Radius of the group ball used for decorations and conjugators.
    #[arg(long, default_value_t = 1)]
    ball: usize,
    /// Degree bound.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Work budget (diagrams visited, samples drawn).
    #[arg(long, default_value_t = 200)]
    budget: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the canonical Gauss code.
    Canon { file: String },
    /// Order of the rotation symmetry group.
    Aut { file: String },
    /// Keep the listed arrows (indices in the canonical form) and drop the rest.
    Sub {
        file: String,
        #[arg(long, value_delimiter = ',')]
        keep: Vec<usize>,
    },
    /// I(x) = sum over subdiagrams.
    Imap { series: String },
    /// Inverse of I.
    Imapinv { series: String },
    /// Abelian Gauss diagram of a diagram over an abelian group.
    Abelianize { file: String },
    /// Pairing of two series (either argument may be a single Gauss code).
    Pair {
        x: String,
        y: String,
        #[arg(long)]
        normalized: bool,
    },
    #[command(subcommand)]
    Moves(MovesCmd),
    /// w-orbit of a diagram, with conjugators from the ball.
    Worbit {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    #[command(subcommand)]
    Homology(HomologyCmd),
    #[command(subcommand)]
    Relations(RelationsCmd),
    /// Decompose a series over the relators of a family.
    Span {
        series: String,
        #[arg(long)]
        family: String,
        #[command(flatten)]
        common: Common,
    },
    /// Certify that an arrow series defines an invariant.
    CheckInvariance {
        #[arg(long)]
        series: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a series (Gauss or arrow) on a diagram.
    Eval {
        #[arg(long)]
        series: String,
        file: String,
    },
    /// Grishanov-Vassiliev invariant for conjugacy classes gamma_0..gamma_n.
    Gv {
        #[arg(long)]
        n: usize,
        /// n+1 comma separated words.
        #[arg(long, value_delimiter = ',')]
        gamma: Vec<String>,
        file: String,
    },
    /// The pair (v_l, v_r) with index and writhe.
    Whitney { file: String },
    /// Run the acceptance suite.
    Selftest {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum MovesCmd {
    /// Admissible moves on the canonical form.
    List {
        file: String,
        /// Comma separated kinds: R1+, R1-, R2+, R2-, R3, W.
        #[arg(long, value_delimiter = ',')]
        kinds: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Apply one move to the canonical form.
    Apply {
        file: String,
        #[arg(long = "move")]
        mv: String,
    },
    /// Apply the moves of a file in turn; each refers to the current canonical form.
    Replay {
        file: String,
        moves: String,
        #[arg(long)]
        trace: bool,
    },
}

#[derive(Subcommand, Debug)]
enum HomologyCmd {
    Energy(LoopArgs),
    Torsion(LoopArgs),
    Decompose(LoopArgs),
    /// Value of the abelianization on the loop.
    Mu(LoopArgs),
}

#[derive(Args, Debug)]
struct LoopArgs {
    file: String,
    /// `comb <cK> <c1> ...` or `loop K=<c> A1=<c> ... edges=<c0>,...`.
    #[arg(long = "loop")]
    lp: String,
}

#[derive(Subcommand, Debug)]
enum RelationsCmd {
    /// Relators of a family (or `nabla` for the degenerate relators).
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        group: String,
        #[command(flatten)]
        common: Common,
    },
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(cli.cmd) {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(e) => {
            let code = match e {
                Error::Parse(_) => 2,
                Error::Domain(_) => 1,
            };
            Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") }
        }
    }
}

fn read(path: &str) -> Result<String> {
    let r = if path == "-" { std::io::read_to_string(std::io::stdin()) } else { fs::read_to_string(path) };
    r.map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))
}

fn load(path: &str) -> Result<(WeightedGroup, String, Diagram)> {
    let (grp, spec, d) = parse_diagram(&read(path)?)?;
    d.check(&grp).map_err(|e| Error::Parse(e.to_string()))?;
    let c = d.canonical(&grp);
    Ok((grp, spec, c))
}

fn load_series(path: &str) -> Result<(WeightedGroup, String, Series<Diagram>)> {
    let text = read(path)?;
    if text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')) == Some("gd 1") {
        let (grp, spec, d) = parse_diagram(&text)?;
        let c = d.canonical(&grp);
        return Ok((grp, spec, Series::single(c)));
    }
    parse_series(&text)
}

fn ok(s: String) -> Result<(i32, String)> {
    Ok((0, s))
}

fn kinds(names: &[String]) -> Result<Vec<MoveKind>> {
    if names.is_empty() {
        return Ok(MoveKind::ALL.to_vec());
    }
    names.iter().map(|n| MoveKind::parse(n)).collect()
}

fn same_group(a: &str, b: &str) -> Result<()> {
    if a.split_whitespace().ne(b.split_whitespace()) {
        return Err(Error::Domain(format!("the inputs live over different groups ({a} and {b})")));
    }
    Ok(())
}

fn dispatch(cmd: Cmd) -> Result<(i32, String)> {
    match cmd {
        Cmd::Canon { file } => {
            let (grp, spec, d) = load(&file)?;
            ok(format_diagram(&spec, &grp, &d))
        }
        Cmd::Aut { file } => {
            let (_, _, d) = load(&file)?;
            ok(format!("{}\n", d.aut_order()))
        }
        Cmd::Sub { file, keep } => {
            let (grp, spec, d) = load(&file)?;
            let mut mask = vec![false; d.degree()];
            for i in keep {
                *mask.get_mut(i).ok_or_else(|| Error::Domain(format!("no arrow {i} in a diagram of degree {}", d.degree())))? = true;
            }
            ok(format_diagram(&spec, &grp, &d.remove_arrows(&grp, &mask)))
        }
        Cmd::Imap { series } => {
            let (grp, spec, x) = load_series(&series)?;
            ok(format_series(&spec, &grp, &i_map(&grp, &x)))
        }
        Cmd::Imapinv { series } => {
            let (grp, spec, x) = load_series(&series)?;
            ok(format_series(&spec, &grp, &i_inv(&grp, &x)))
        }
        Cmd::Abelianize { file } => {
            let (grp, _, d) = load(&file)?;
            ok(format_abelian(&grp, &abelianize(&grp, &d)?))
        }
        Cmd::Pair { x, y, normalized } => {
            let (_, sx, x) = load_series(&x)?;
            let (_, sy, y) = load_series(&y)?;
            same_group(&sx, &sy)?;
            ok(format!("{}\n", format_q(&pairing(&x, &y, normalized))))
        }
        Cmd::Moves(MovesCmd::List { file, kinds: k, common }) => {
            let (grp, _, d) = load(&file)?;
            let mut out = format!("# on {}\n", inline(&grp, &d));
            for m in enumerate_moves(&grp, &d, common.ball, &kinds(&k)?) {
                out += &format_move(&grp, &d, &m);
                out.push('\n');
            }
            ok(out)
        }
        Cmd::Moves(MovesCmd::Apply { file, mv }) => {
            let (grp, spec, d) = load(&file)?;
            let m = parse_move(&grp, &d, &mv)?;
            validate_site(&grp, &d, &m, true)?;
            ok(format_diagram(&spec, &grp, &apply(&grp, &d, &m)?.canonical(&grp)))
        }
        Cmd::Moves(MovesCmd::Replay { file, moves, trace }) => {
            let (grp, spec, mut d) = load(&file)?;
            let mut out = String::new();
            let text = read(&moves)?;
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap().trim();
                if line.is_empty() {
                    continue;
                }
                let m = parse_move(&grp, &d, line).map_err(|e| match e {
                    Error::Parse(s) => Error::Parse(format!("line {}: {s}", i + 1)),
                    Error::Domain(s) => Error::Domain(format!("line {}: {s}", i + 1)),
                })?;
                d = replay(&grp, &d, &[m]).map_err(|e| Error::Domain(format!("line {}: {e}", i + 1)))?;
                if trace {
                    out += &format!("# {}\n", inline(&grp, &d));
                }
            }
            out += &format_diagram(&spec, &grp, &d);
            ok(out)
        }
        Cmd::Worbit { file, common } => {
            let (grp, _, d) = load(&file)?;
            let orbit = w_orbit(&grp, &d, common.ball);
            let mut out = format!("size {}\n", orbit.len());
            for g in &orbit {
                out += &inline(&grp, g);
                out.push('\n');
            }
            ok(out)
        }
        Cmd::Homology(h) => {
            let (which, args) = match h {
                HomologyCmd::Energy(a) => ("energy", a),
                HomologyCmd::Torsion(a) => ("torsion", a),
                HomologyCmd::Decompose(a) => ("decompose", a),
                HomologyCmd::Mu(a) => ("mu", a),
            };
            let (grp, _, d) = load(&args.file)?;
            let g = parse_loop(&d, &args.lp)?;
            match which {
                "energy" => ok(format!("{}\n", energy(&d, &g)?)),
                "torsion" => ok(format!("{}\n", torsion(&d, &g)?)),
                "decompose" => {
                    let (c, e) = decompose(&d, &g)?;
                    let mut out = format!("K {e}\n");
                    for (i, x) in c.iter().enumerate() {
                        out += &format!("A{} {x}\n", i + 1);
                    }
                    ok(out)
                }
                _ => {
                    let ab = abelianize(&grp, &d)?;
                    ok(format!("{}\n", grp.format(&mu_eval(&grp, &ab, &g)?)))
                }
            }
        }
        Cmd::Relations(RelationsCmd::Gen { family, group, common }) => {
            let grp = WeightedGroup::parse_spec(&group)?;
            let n = common.degree.ok_or_else(|| Error::Parse("`relations gen` needs --degree".into()))?;
            let mut out = format!("group {group}\n");
            if family == "nabla" {
                let dec = grp.ball(common.ball);
                let mut k = 0;
                for x in all_degenerate(&grp, n, &dec).iter().filter(|x| x.is_monotonic()) {
                    let r = nabla_relator(&grp, x);
                    if r.is_empty() {
                        continue;
                    }
                    out += &format!("relator {k}\n");
                    for (y, c) in r.iter() {
                        out += &format!("{} | {}\n", format_q(c), format_degenerate(&grp, y));
                    }
                    k += 1;
                }
                return ok(out);
            }
            let f = Family::parse(&family)?;
            for (k, r) in gen_relations(&grp, f, n, common.ball).iter().enumerate() {
                out += &format!("relator {k}\n");
                for (d, c) in r.iter() {
                    out += &format!("{} | {}\n", format_q(c), inline(&grp, d));
                }
            }
            ok(out)
        }
        Cmd::Span { series, family, common } => {
            let (grp, _, x) = load_series(&series)?;
            let f = Family::parse(&family)?;
            let n = match common.degree {
                Some(n) => n,
                None => x.max_degree().unwrap_or(0),
            };
            let rels = gen_relations(&grp, f, n, common.ball);
            match span_membership(&x, &rels) {
                Some(c) => {
                    let mut out = "member=yes\n".to_string();
                    for (i, ci) in c.iter().enumerate().filter(|(_, c)| !num_traits::Zero::is_zero(*c)) {
                        out += &format!("relator {i} {}\n", format_q(ci));
                    }
                    ok(out)
                }
                None => ok("member=no\n".into()),
            }
        }
        Cmd::CheckInvariance { series, common } => {
            let (grp, _, mut x) = load_series(&series)?;
            if let Some(k) = common.degree {
                x = x.homogeneous(k);
            }
            if x.iter().any(|(d, _)| !d.is_arrow_diagram()) {
                return Err(Error::Domain("check-invariance takes an arrow series (no writhes)".into()));
            }
            let orb = Orbits::new(&grp, common.ball);
            let cert = certify_series(&orb, &x);
            let mut out = cert.report();
            match r3_empirical(&grp, &x, common.ball, common.budget, common.seed) {
                None => out += "r3_sampled=ok\n",
                Some((g, m)) => out += &format!("r3_sampled=fail\n# {} then {}\n", inline(&grp, &g), format_move(&grp, &g, &m)),
            }
            Ok((if cert.pass() { 0 } else { 1 }, out))
        }
        Cmd::Eval { series, file } => {
            let (_, sx, x) = load_series(&series)?;
            let (grp, sd, d) = load(&file)?;
            same_group(&sx, &sd)?;
            let v = if x.iter().all(|(k, _)| k.is_arrow_diagram()) { eval_arrow(&grp, &x, &d) } else { eval_nu(&grp, &x, &d) };
            ok(format!("{}\n", format_q(&v)))
        }
        Cmd::Gv { n, gamma, file } => {
            let (grp, _, d) = load(&file)?;
            if gamma.len() != n + 1 {
                return Err(Error::Parse(format!("--gamma needs {} classes for n = {n}", n + 1)));
            }
            let gamma = gamma.iter().map(|w| grp.parse_elem(w.trim())).collect::<Result<Vec<_>>>()?;
            ok(format!("{}\n", format_q(&gv_eval(&grp, &gamma, n, &d)?)))
        }
        Cmd::Whitney { file } => {
            let (grp, _, d) = load(&file)?;
            let w = whitney(&grp, &d)?;
            ok(format!("v_l={}\nv_r={}\nindex={}\nwrithe={}\n", w.v_l, w.v_r, w.index(), w.writhe()))
        }
        Cmd::Selftest { only, seed } => {
            let mut out = String::new();
            let mut failed = 0;
            let mut ran = 0;
            for c in crate::selftest::CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
                let r = (c.run)(seed);
                ran += 1;
                if r.is_err() {
                    failed += 1;
                }
                out += &crate::selftest::line(c, &r);
                out.push('\n');
            }
            out += &format!("passed {}/{ran}\n", ran - failed);
            Ok((if failed == 0 { 0 } else { 1 }, out))
        }
    }
}
