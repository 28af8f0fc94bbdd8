//! Line-oriented text formats: Gauss codes, series files, loops and moves.
//!
//! A Gauss code block:
//!
//! ```text
//! gd 1
//! group free 2
//! degree 2
//! arrows 0->2:+ 1->3:-
//! edges x1 e x2' e
//! ```
//!
//! Degree-0 diagrams replace `arrows`/`edges` by `class <word>`. Arrows
//! without a `:±` suffix describe arrow diagrams (writhes forgotten). The
//! inline form used in series files is the same content on one line:
//! `degree 2 arrows 0->2:+ 1->3:- edges x1 e x2' e`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::diagram::{AbelianDiagram, Arrow, Diagram};
use crate::error::{parse_err, Error, Result};
use crate::group::WeightedGroup;
use crate::homology::{combination, HomologyClass};
use crate::invariance::Degenerate;
use crate::linalg::Q;
use crate::moves::{enumerate_moves, r3_arrows, r3_type, Move, MoveKind};
use crate::series::Series;

pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (BigInt, BigInt) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(a, b))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad {what} '{s}'")))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',').map(|t| parse_usize(t, what)).collect()
}

fn parse_arrow(tok: &str) -> Result<Arrow> {
    let (ends, sign) = match tok.split_once(':') {
        Some((e, s)) => (e, Some(s)),
        None => (tok, None),
    };
    let (t, h) = ends.split_once("->").ok_or_else(|| Error::Parse(format!("bad arrow '{tok}'")))?;
    let writhe = match sign {
        None => 0,
        Some("+") | Some("+1") => 1,
        Some("-") | Some("-1") => -1,
        Some(s) => return parse_err(format!("bad writhe '{s}' in '{tok}'")),
    };
    Ok(Arrow { tail: parse_usize(t, "position")?, head: parse_usize(h, "position")?, writhe })
}

fn format_arrow(a: &Arrow) -> String {
    match a.writhe {
        0 => format!("{}->{}", a.tail, a.head),
        w => format!("{}->{}:{}", a.tail, a.head, if w > 0 { '+' } else { '-' }),
    }
}

fn build(grp: &WeightedGroup, degree: usize, arrows: &[&str], edges: &[&str], class: Option<&str>) -> Result<Diagram> {
    if degree == 0 {
        if !arrows.is_empty() || !edges.is_empty() {
            return parse_err("a degree-0 diagram takes `class`, not arrows or edges");
        }
        let c = class.ok_or_else(|| Error::Parse("degree-0 diagram without `class`".into()))?;
        return Ok(Diagram::circle(grp, &grp.parse_elem(c)?));
    }
    if class.is_some() {
        return parse_err("`class` is only for degree-0 diagrams");
    }
    let arrows: Vec<Arrow> = arrows.iter().map(|t| parse_arrow(t)).collect::<Result<_>>()?;
    if arrows.len() != degree {
        return parse_err(format!("degree {degree} but {} arrows", arrows.len()));
    }
    if arrows.iter().any(|a| a.writhe == 0) && arrows.iter().any(|a| a.writhe != 0) {
        return parse_err("either every arrow carries a writhe or none does");
    }
    if edges.len() != 2 * degree {
        return parse_err(format!("degree {degree} needs {} edge markings, got {}", 2 * degree, edges.len()));
    }
    let edges = edges.iter().map(|w| grp.parse_elem(w)).collect::<Result<Vec<_>>>()?;
    Diagram::from_arrows(&arrows, edges).map_err(|e| Error::Parse(e.to_string()))
}

/// One-line form of a diagram.
pub fn inline(grp: &WeightedGroup, d: &Diagram) -> String {
    if d.degree() == 0 {
        return format!("degree 0 class {}", grp.format(d.edge(0)));
    }
    let arrows: Vec<String> = d.arrows().iter().map(format_arrow).collect();
    let edges: Vec<String> = d.edges().iter().map(|g| grp.format(g)).collect();
    format!("degree {} arrows {} edges {}", d.degree(), arrows.join(" "), edges.join(" "))
}

pub fn parse_inline(grp: &WeightedGroup, s: &str) -> Result<Diagram> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let mut degree = None;
    let (mut arrows, mut edges, mut class) = (vec![], vec![], None);
    let mut i = 0;
    let mut section = "";
    while i < toks.len() {
        match toks[i] {
            "degree" => {
                degree = Some(parse_usize(toks.get(i + 1).copied().unwrap_or(""), "degree")?);
                i += 1;
            }
            "class" => {
                class = Some(*toks.get(i + 1).ok_or_else(|| Error::Parse("`class` without a word".into()))?);
                i += 1;
            }
            "arrows" | "edges" => section = toks[i],
            t if section == "arrows" => arrows.push(t),
            t if section == "edges" => edges.push(t),
            t => return parse_err(format!("unexpected token '{t}'")),
        }
        i += 1;
    }
    let degree = degree.ok_or_else(|| Error::Parse("missing `degree`".into()))?;
    build(grp, degree, &arrows, &edges, class)
}

/// Gauss code block for `d` (printed as given; canonicalize first for the
/// canonical code).
pub fn format_diagram(spec: &str, grp: &WeightedGroup, d: &Diagram) -> String {
    let mut out = format!("gd 1\ngroup {spec}\ndegree {}\n", d.degree());
    if d.degree() == 0 {
        out += &format!("class {}\n", grp.format(d.edge(0)));
    } else {
        let arrows: Vec<String> = d.arrows().iter().map(format_arrow).collect();
        let edges: Vec<String> = d.edges().iter().map(|g| grp.format(g)).collect();
        out += &format!("arrows {}\nedges {}\n", arrows.join(" "), edges.join(" "));
    }
    out
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(|l| l.split('#').next().unwrap().trim()).filter(|l| !l.is_empty())
}

/// Parses a Gauss code block; returns the group, its spec string and the
/// rigid diagram as written.
pub fn parse_diagram(text: &str) -> Result<(WeightedGroup, String, Diagram)> {
    let mut version = None;
    let mut spec = None;
    let mut degree = None;
    let (mut arrows, mut edges, mut class) = (None, None, None);
    for line in content_lines(text) {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "gd" => version = Some(rest.to_string()),
            "group" => spec = Some(rest.to_string()),
            "degree" => degree = Some(parse_usize(rest, "degree")?),
            "arrows" => arrows = Some(rest.to_string()),
            "edges" => edges = Some(rest.to_string()),
            "class" => class = Some(rest.to_string()),
            _ => return parse_err(format!("unknown line '{line}'")),
        }
    }
    if version.as_deref() != Some("1") {
        return parse_err("expected a `gd 1` header");
    }
    let spec = spec.ok_or_else(|| Error::Parse("missing `group` line".into()))?;
    let grp = WeightedGroup::parse_spec(&spec)?;
    let degree = degree.ok_or_else(|| Error::Parse("missing `degree` line".into()))?;
    let arrows = arrows.unwrap_or_default();
    let edges = edges.unwrap_or_default();
    let a: Vec<&str> = arrows.split_whitespace().collect();
    let e: Vec<&str> = edges.split_whitespace().collect();
    let d = build(&grp, degree, &a, &e, class.as_deref())?;
    Ok((grp, spec, d))
}

/// Series file: a `series 1` header, a `group` line, then `<rational> | <inline code>` lines.
pub fn format_series(spec: &str, grp: &WeightedGroup, x: &Series<Diagram>) -> String {
    let mut out = format!("series 1\ngroup {spec}\n");
    for (k, c) in x.iter() {
        out += &format!("{} | {}\n", format_q(c), inline(grp, k));
    }
    out
}

/// Parses a series file; keys are canonicalized and merged.
pub fn parse_series(text: &str) -> Result<(WeightedGroup, String, Series<Diagram>)> {
    let mut lines = content_lines(text);
    if lines.next() != Some("series 1") {
        return parse_err("expected a `series 1` header");
    }
    let spec = lines
        .next()
        .and_then(|l| l.strip_prefix("group "))
        .ok_or_else(|| Error::Parse("expected a `group` line after the header".into()))?
        .trim()
        .to_string();
    let grp = WeightedGroup::parse_spec(&spec)?;
    let mut x = Series::new();
    for line in lines {
        let (c, code) = line.split_once('|').ok_or_else(|| Error::Parse(format!("expected `<rational> | <code>`: '{line}'")))?;
        let d = parse_inline(&grp, code)?;
        d.check(&grp).map_err(|e| Error::Parse(e.to_string()))?;
        x.add_term(d.canonical(&grp), parse_q(c)?);
    }
    Ok((grp, spec, x))
}

pub fn format_abelian(grp: &WeightedGroup, ab: &AbelianDiagram) -> String {
    let c = ab.classical();
    let arrows: Vec<String> = c.arrows().iter().map(format_arrow).collect();
    let marks: Vec<String> = ab.marks().iter().map(|g| grp.format(g)).collect();
    format!("ab 1\ndegree {}\narrows {}\nmarks {}\nglobal {}\n", ab.degree(), arrows.join(" "), marks.join(" "), grp.format(ab.global()))
}

pub fn format_degenerate(grp: &WeightedGroup, x: &Degenerate) -> String {
    format!("point {}", inline(grp, x.diagram()))
}

/// Parses `comb <cK> <c1> ... <cn>` (a combination of the fundamental loops;
/// missing trailing coefficients are zero)
/// or `loop [K=<c>] [A<i>=<c> ...] [edges=<c0>,<c1>,...]` (raw coordinates;
/// `K=c` adds c to every edge coordinate). Arrows are numbered from 1.
pub fn parse_loop(d: &Diagram, s: &str) -> Result<HomologyClass> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let n = d.degree();
    match toks.first() {
        Some(&"comb") => {
            let c: Vec<i64> = toks[1..]
                .iter()
                .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad coefficient '{t}'"))))
                .collect::<Result<_>>()?;
            if c.is_empty() {
                return parse_err("`comb` needs the K coefficient first, then one per arrow");
            }
            if c.len() > n + 1 && c[n + 1..].iter().any(|&x| x != 0) {
                return parse_err(format!("`comb` has nonzero coefficients beyond arrow {n}"));
            }
            let mut arrows = c[1..].to_vec();
            arrows.resize(n, 0);
            Ok(combination(d, &arrows, c[0]))
        }
        Some(&"loop") => {
            let mut g = HomologyClass::zero(d);
            let mut k = 0i64;
            for t in &toks[1..] {
                let (key, val) = t.split_once('=').ok_or_else(|| Error::Parse(format!("bad loop term '{t}'")))?;
                let num = |v: &str| v.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad coordinate '{v}'")));
                if key == "K" {
                    k = num(val)?;
                } else if key == "edges" {
                    let v: Vec<i64> = val.split(',').map(num).collect::<Result<_>>()?;
                    if v.len() != g.edges.len() {
                        return parse_err(format!("expected {} edge coordinates", g.edges.len()));
                    }
                    g.edges = v;
                } else if let Some(i) = key.strip_prefix('A') {
                    let i = parse_usize(i, "arrow")?;
                    if i == 0 || i > n {
                        return parse_err(format!("no arrow A{i}"));
                    }
                    g.arrows[i - 1] = num(val)?;
                } else {
                    return parse_err(format!("bad loop term '{t}'"));
                }
            }
            for e in g.edges.iter_mut() {
                *e += k;
            }
            Ok(g)
        }
        _ => parse_err("a loop starts with `comb` or `loop`"),
    }
}

fn parse_sign(v: &str) -> Result<i8> {
    match v {
        "+" | "+1" | "1" => Ok(1),
        "-" | "-1" => Ok(-1),
        _ => parse_err(format!("bad writhe '{v}'")),
    }
}

/// Parses a move line such as `R1- @arrow=0`, `R2+ @edge=1 dir=tails writhe=+`,
/// `R3 @arrows=0,1,2 type=1` or `W @arrow=2 g=x1'`. Indices refer to `d`.
pub fn parse_move(grp: &WeightedGroup, d: &Diagram, line: &str) -> Result<Move> {
    let mut toks = line.split_whitespace();
    let kind = toks.next().ok_or_else(|| Error::Parse("empty move".into()))?;
    let mut kv = std::collections::BTreeMap::new();
    for t in toks {
        let t = t.strip_prefix('@').unwrap_or(t);
        let (k, v) = t.split_once('=').ok_or_else(|| Error::Parse(format!("bad move field '{t}'")))?;
        if kv.insert(k.to_string(), v.to_string()).is_some() {
            return parse_err(format!("repeated field '{k}'"));
        }
    }
    let take = |kv: &mut std::collections::BTreeMap<String, String>, k: &str| kv.remove(k);
    let need = |v: Option<String>, k: &str| v.ok_or_else(|| Error::Parse(format!("{kind} needs `{k}=`")));
    let m = match kind {
        "R1+" => {
            let edge = parse_usize(&need(take(&mut kv, "edge"), "edge")?, "edge")?;
            let writhe = parse_sign(&need(take(&mut kv, "writhe"), "writhe")?)?;
            let head_first = match take(&mut kv, "dir").as_deref() {
                None | Some("th") | Some("tail") => false,
                Some("ht") | Some("head") => true,
                Some(v) => return parse_err(format!("bad dir '{v}' (th or ht)")),
            };
            let split = match take(&mut kv, "split") {
                Some(w) => grp.parse_elem(&w)?,
                None if d.degree() == 0 => d.edge(0).clone(),
                None => grp.identity(),
            };
            Move::R1Plus { edge, split, writhe, head_first }
        }
        "R1-" => {
            let arrow = parse_usize(&need(take(&mut kv, "arrow"), "arrow")?, "arrow")?;
            let edge = match take(&mut kv, "edge") {
                Some(e) => parse_usize(&e, "edge")?,
                None => {
                    let a = *d.arrows().get(arrow).ok_or_else(|| Error::Parse(format!("no arrow {arrow}")))?;
                    let cands = [a.tail, a.head];
                    *cands
                        .iter()
                        .find(|&&e| d.next(e) == d.partner(e) && grp.is_identity(d.edge(e)))
                        .or_else(|| cands.iter().find(|&&e| d.next(e) == d.partner(e)))
                        .ok_or_else(|| Error::Domain(format!("arrow {arrow} is not isolated")))?
                }
            };
            Move::R1Minus { arrow, edge }
        }
        "R2+" => {
            let edges = match (take(&mut kv, "edge"), take(&mut kv, "edges")) {
                (Some(e), None) => {
                    let e = parse_usize(&e, "edge")?;
                    [e, e]
                }
                (None, Some(es)) => {
                    let v = parse_list(&es, "edge")?;
                    if v.len() != 2 {
                        return parse_err("`edges=` takes two edges");
                    }
                    [v[0], v[1]]
                }
                _ => return parse_err("R2+ needs exactly one of `edge=` or `edges=`"),
            };
            let tails_first = match take(&mut kv, "dir").as_deref() {
                None | Some("tails") => true,
                Some("heads") => false,
                Some(v) => return parse_err(format!("bad dir '{v}' (tails or heads)")),
            };
            let writhe = parse_sign(&need(take(&mut kv, "writhe"), "writhe")?)?;
            let crossed = match take(&mut kv, "crossed").as_deref() {
                None | Some("0") => false,
                Some("1") => true,
                Some(v) => return parse_err(format!("bad crossed '{v}'")),
            };
            let splits = match take(&mut kv, "splits") {
                Some(s) => {
                    let v: Vec<&str> = s.split(',').collect();
                    if v.len() != 2 {
                        return parse_err("`splits=` takes two words");
                    }
                    [grp.parse_elem(v[0])?, grp.parse_elem(v[1])?]
                }
                None if d.degree() == 0 => [d.edge(0).clone(), grp.identity()],
                None => [grp.identity(), grp.identity()],
            };
            Move::R2Plus { edges, splits, tails_first, crossed, writhe }
        }
        "R2-" => {
            let v = parse_list(&need(take(&mut kv, "arrows"), "arrows")?, "arrow")?;
            if v.len() != 2 {
                return parse_err("R2- takes two arrows");
            }
            Move::R2Minus { arrows: [v[0], v[1]] }
        }
        "R3" => {
            let edges = match take(&mut kv, "edges") {
                Some(es) => {
                    let v = parse_list(&es, "edge")?;
                    if v.len() != 3 {
                        return parse_err("`edges=` takes three edges");
                    }
                    Some([v[0], v[1], v[2]])
                }
                None => None,
            };
            let arrows = take(&mut kv, "arrows").map(|s| parse_list(&s, "arrow")).transpose()?;
            let ty = take(&mut kv, "type").map(|t| match t.as_str() {
                "1" => Ok(1u8),
                "2" => Ok(2u8),
                _ => parse_err(format!("bad type '{t}'")),
            });
            let ty = ty.transpose()?;
            match edges {
                Some(e) => Move::R3 { edges: e },
                None => {
                    let mut want = arrows.ok_or_else(|| Error::Parse("R3 needs `arrows=` or `edges=`".into()))?;
                    want.sort();
                    let site = enumerate_moves(grp, d, 0, &[MoveKind::R3]).into_iter().find(|m| match m {
                        Move::R3 { edges } => {
                            r3_arrows(d, edges).map(|a| a.to_vec()) == Some(want.clone())
                                && ty.is_none_or(|t| r3_type(d, edges).ok() == Some(t))
                        }
                        _ => false,
                    });
                    site.ok_or_else(|| Error::Domain(format!("no R3 site on arrows {want:?}")))?
                }
            }
        }
        "W" => {
            let arrow = parse_usize(&need(take(&mut kv, "arrow"), "arrow")?, "arrow")?;
            let g = grp.parse_elem(&need(take(&mut kv, "g"), "g")?)?;
            Move::W { arrow, g }
        }
        _ => return parse_err(format!("unknown move kind '{kind}'")),
    };
    if let Some(k) = kv.keys().next() {
        return parse_err(format!("unknown field '{k}' for {kind}"));
    }
    Ok(m)
}

pub fn format_move(grp: &WeightedGroup, d: &Diagram, m: &Move) -> String {
    let sign = |w: i8| if w > 0 { "+" } else { "-" };
    let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    match m {
        Move::R1Plus { edge, split, writhe, head_first } => {
            format!("R1+ @edge={edge} writhe={} dir={} split={}", sign(*writhe), if *head_first { "ht" } else { "th" }, grp.format(split))
        }
        Move::R1Minus { arrow, edge } => format!("R1- @arrow={arrow} edge={edge}"),
        Move::R2Plus { edges, splits, tails_first, crossed, writhe } => format!(
            "R2+ @edges={} dir={} writhe={} crossed={} splits={},{}",
            list(edges),
            if *tails_first { "tails" } else { "heads" },
            sign(*writhe),
            *crossed as u8,
            grp.format(&splits[0]),
            grp.format(&splits[1])
        ),
        Move::R2Minus { arrows } => format!("R2- @arrows={}", list(arrows)),
        Move::R3 { edges } => {
            let arrows = r3_arrows(d, edges).map(|a| list(&a)).unwrap_or_default();
            let ty = r3_type(d, edges).map(|t| t.to_string()).unwrap_or_default();
            format!("R3 @arrows={arrows} type={ty} edges={}", list(edges))
        }
        Move::W { arrow, g } => format!("W @arrow={arrow} g={}", grp.format(g)),
    }
}
