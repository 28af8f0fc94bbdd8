//! Reidemeister moves and conjugacy moves on Gauss diagrams on π, their
//! abelian counterparts, w-orbits and bounded equivalence search.
//!
//! Move sites are expressed in the rigid positions of the diagram they are
//! applied to; `apply` returns a rigid diagram, callers canonicalize.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::diagram::{abelianize, AbelianDiagram, Arrow, Diagram};
use crate::error::{domain_err, Error, Result};
use crate::group::{Elem, WeightedGroup};
use crate::homology::HomologyClass;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum MoveKind {
    R1Plus,
    R1Minus,
    R2Plus,
    R2Minus,
    R3,
    W,
}

impl MoveKind {
    pub const ALL: [MoveKind; 6] = [MoveKind::R1Plus, MoveKind::R1Minus, MoveKind::R2Plus, MoveKind::R2Minus, MoveKind::R3, MoveKind::W];
    pub const REIDEMEISTER: [MoveKind; 5] = [MoveKind::R1Plus, MoveKind::R1Minus, MoveKind::R2Plus, MoveKind::R2Minus, MoveKind::R3];
    pub const DECREASING: [MoveKind; 3] = [MoveKind::R1Minus, MoveKind::R2Minus, MoveKind::R3];

    pub fn parse(name: &str) -> Result<MoveKind> {
        match name {
            "R1+" => Ok(MoveKind::R1Plus),
            "R1-" => Ok(MoveKind::R1Minus),
            "R2+" => Ok(MoveKind::R2Plus),
            "R2-" => Ok(MoveKind::R2Minus),
            "R3" => Ok(MoveKind::R3),
            "W" => Ok(MoveKind::W),
            _ => Err(Error::Parse(format!("unknown move kind '{name}'"))),
        }
    }
}

/// A move with its site.
///
/// * `R1Plus`: a new isolated arrow inside edge `edge`, splitting its marking
///   `x` into `split`, 1, `split⁻¹x`. On a degree-0 diagram `split` is the
///   marking of the outer edge and must lie in the class.
/// * `R2Plus`: two new arrows with writhes `writhe` and `-writhe`. The first
///   pair of ends goes into `edges[0]`, the second into `edges[1]`. When the
///   two edges differ, each marking `x` becomes `s`, 1, `s⁻¹x`. When they
///   coincide, `x` becomes `s0`, 1, `s1`, 1, `(s0 s1)⁻¹x`. On a degree-0
///   diagram the markings are 1, `s0`, 1, `s1` with `s0 s1` in the class.
///   `tails_first` puts the tails in the first pair; `crossed` pairs the first
///   end of one pair with the second end of the other.
/// * `R3`: the three surrounded edges; the move swaps the ends on each.
/// * `W`: conjugacy move on an arrow.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Move {
    R1Plus { edge: usize, split: Elem, writhe: i8, head_first: bool },
    R1Minus { arrow: usize, edge: usize },
    R2Plus { edges: [usize; 2], splits: [Elem; 2], tails_first: bool, crossed: bool, writhe: i8 },
    R2Minus { arrows: [usize; 2] },
    R3 { edges: [usize; 3] },
    W { arrow: usize, g: Elem },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::R1Plus { .. } => MoveKind::R1Plus,
            Move::R1Minus { .. } => MoveKind::R1Minus,
            Move::R2Plus { .. } => MoveKind::R2Plus,
            Move::R2Minus { .. } => MoveKind::R2Minus,
            Move::R3 { .. } => MoveKind::R3,
            Move::W { .. } => MoveKind::W,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pt {
    id: usize,
    head: bool,
    writhe: i8,
}

/// Mutable view of a diagram as a cyclic list of ends; edge i follows end i.
struct Layout {
    pts: Vec<Pt>,
    edges: Vec<Elem>,
}

impl Layout {
    fn of(d: &Diagram) -> Layout {
        let pts = (0..d.num_positions()).map(|p| Pt { id: d.arrow_index_at(p), head: d.is_head(p), writhe: d.writhe_at(p) }).collect();
        Layout { pts, edges: d.edges().to_vec() }
    }

    fn splice(&mut self, j: usize, new_pts: &[Pt], pieces: Vec<Elem>) {
        debug_assert_eq!(pieces.len(), new_pts.len() + 1);
        let mut pieces = pieces.into_iter();
        self.edges[j] = pieces.next().unwrap();
        for (k, (pt, e)) in new_pts.iter().zip(pieces).enumerate() {
            self.pts.insert(j + 1 + k, *pt);
            self.edges.insert(j + 1 + k, e);
        }
    }

    fn build(self) -> Diagram {
        let mut by_id: BTreeMap<usize, (Option<usize>, Option<usize>, i8)> = BTreeMap::new();
        for (p, pt) in self.pts.iter().enumerate() {
            let e = by_id.entry(pt.id).or_insert((None, None, pt.writhe));
            if pt.head {
                e.1 = Some(p);
            } else {
                e.0 = Some(p);
            }
        }
        let arrows: Vec<Arrow> = by_id.values().map(|&(t, h, w)| Arrow { tail: t.unwrap(), head: h.unwrap(), writhe: w }).collect();
        Diagram::from_arrows(&arrows, self.edges).expect("layout is consistent")
    }
}

fn reject<T>(msg: impl Into<String>) -> Result<T> {
    domain_err(msg)
}

fn check_writhe(w: i8) -> Result<()> {
    if w == 1 || w == -1 {
        Ok(())
    } else {
        reject("inserted arrows need writhe +1 or -1")
    }
}

/// Tail-adjacent and head-adjacent edges of two arrows, as (tail edge, head edge).
fn r2_edges(d: &Diagram, i: usize, j: usize) -> Option<(usize, usize)> {
    let arrows = d.arrows();
    let (a, b) = (arrows[i], arrows[j]);
    let between = |x: usize, y: usize| {
        if d.next(x) == y {
            Some(x)
        } else if d.next(y) == x {
            Some(y)
        } else {
            None
        }
    };
    Some((between(a.tail, b.tail)?, between(a.head, b.head)?))
}

/// Arrows of an R3 site, if the three edges form one.
pub fn r3_arrows(d: &Diagram, edges: &[usize; 3]) -> Option<[usize; 3]> {
    let m = d.num_positions();
    let mut seen_pos = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    let mut ids = BTreeSet::new();
    for &e in edges {
        if e >= m {
            return None;
        }
        let (x, y) = (e, d.next(e));
        if !seen_pos.insert(x) || !seen_pos.insert(y) {
            return None;
        }
        let (a, b) = (d.arrow_index_at(x), d.arrow_index_at(y));
        if a == b {
            return None;
        }
        pairs.insert((a.min(b), a.max(b)));
        ids.insert(a);
        ids.insert(b);
    }
    if ids.len() != 3 || pairs.len() != 3 {
        return None;
    }
    let v: Vec<usize> = ids.into_iter().collect();
    Some([v[0], v[1], v[2]])
}

/// 1 or 2 according to whether the head counts of the three edges, read in
/// circle order, run cyclically through 0, 1, 2 or through 0, 2, 1.
pub fn r3_type(d: &Diagram, edges: &[usize; 3]) -> Result<u8> {
    let mut es = *edges;
    es.sort();
    let up: Vec<u8> = es.iter().map(|&e| d.edge_signs(e).map(|s| s.up)).collect::<Result<_>>()?;
    let k = up.iter().position(|&u| u == 0).ok_or_else(|| Error::Domain("not an R3 site".into()))?;
    Ok(if up[(k + 1) % 3] == 1 { 1 } else { 2 })
}

fn r3_signs_ok(d: &Diagram, edges: &[usize; 3]) -> bool {
    let s: Vec<_> = match edges.iter().map(|&e| d.edge_signs(e)).collect::<Result<Vec<_>>>() {
        Ok(s) => s,
        Err(_) => return false,
    };
    let we: Vec<i8> = s.iter().map(|x| x.wprod * x.eps).collect();
    let mut up: Vec<u8> = s.iter().map(|x| x.up).collect();
    up.sort();
    we[0] == we[1] && we[1] == we[2] && up == [0, 1, 2]
}

/// Checks the site conditions of `m` on `d`. With `decorations` false the
/// identity conditions on surrounded edges are skipped (used for abelian
/// diagrams, where they are replaced by the obstruction loop test).
pub fn validate_site(grp: &WeightedGroup, d: &Diagram, m: &Move, decorations: bool) -> Result<()> {
    let n = d.degree();
    let mpos = d.num_positions();
    let one = |e: usize| !decorations || grp.is_identity(d.edge(e));
    match m {
        Move::R1Plus { edge, split, writhe, .. } => {
            check_writhe(*writhe)?;
            if *edge >= d.edges().len() {
                return reject("edge out of range");
            }
            if !grp.validate(split) {
                return reject("split is not a group element");
            }
            if n == 0 && decorations && grp.conj_class(split) != grp.conj_class(d.edge(0)) {
                return reject("outer marking must lie in the class of the circle");
            }
            Ok(())
        }
        Move::R1Minus { arrow, edge } => {
            if *arrow >= n || *edge >= mpos {
                return reject("arrow or edge out of range");
            }
            let (x, y) = (*edge, d.next(*edge));
            if d.arrow_index_at(x) != *arrow || d.arrow_index_at(y) != *arrow {
                return reject("the arrow does not surround the edge");
            }
            if !one(*edge) {
                return reject("surrounded edge is not marked 1");
            }
            Ok(())
        }
        Move::R2Plus { edges, splits, writhe, .. } => {
            check_writhe(*writhe)?;
            let ne = d.edges().len();
            if edges[0] >= ne || edges[1] >= ne {
                return reject("edge out of range");
            }
            if n == 0 && edges != &[0, 0] {
                return reject("degree-0 insertion uses edge 0 twice");
            }
            if splits.iter().any(|s| !grp.validate(s)) {
                return reject("split is not a group element");
            }
            if n == 0 && decorations {
                let prod = grp.mul(&splits[0], &splits[1]);
                if grp.conj_class(&prod) != grp.conj_class(d.edge(0)) {
                    return reject("outer markings must multiply into the class of the circle");
                }
            }
            Ok(())
        }
        Move::R2Minus { arrows } => {
            let [i, j] = *arrows;
            if i >= n || j >= n || i == j {
                return reject("need two distinct arrows");
            }
            let a = d.arrows();
            if a[i].writhe == 0 || a[i].writhe != -a[j].writhe {
                return reject("writhes are not opposite");
            }
            let (et, eh) = r2_edges(d, i, j).ok_or_else(|| Error::Domain("ends are not adjacent".into()))?;
            if !one(et) || !one(eh) {
                return reject("surrounded edges are not marked 1");
            }
            Ok(())
        }
        Move::R3 { edges } => {
            r3_arrows(d, edges).ok_or_else(|| Error::Domain("edges do not bound a triangle".into()))?;
            if !edges.iter().all(|&e| one(e)) {
                return reject("surrounded edges are not marked 1");
            }
            if !r3_signs_ok(d, edges) {
                return reject("sign conditions fail");
            }
            Ok(())
        }
        Move::W { arrow, g } => {
            if *arrow >= n {
                return reject("arrow out of range");
            }
            if !grp.validate(g) {
                return reject("conjugator is not a group element");
            }
            Ok(())
        }
    }
}

/// Applies a move; the result is rigid (not canonicalized).
pub fn apply(grp: &WeightedGroup, d: &Diagram, m: &Move) -> Result<Diagram> {
    validate_site(grp, d, m, true)?;
    Ok(apply_unchecked(grp, d, m))
}

pub(crate) fn apply_unchecked(grp: &WeightedGroup, d: &Diagram, m: &Move) -> Diagram {
    let n = d.degree();
    let one = grp.identity();
    match m {
        Move::R1Plus { edge, split, writhe, head_first } => {
            let new = n;
            let p = Pt { id: new, head: *head_first, writhe: *writhe };
            let q = Pt { id: new, head: !*head_first, writhe: *writhe };
            if n == 0 {
                return Layout { pts: vec![p, q], edges: vec![one, split.clone()] }.build();
            }
            let mut l = Layout::of(d);
            let rest = grp.mul(&grp.inv(split), d.edge(*edge));
            l.splice(*edge, &[p, q], vec![split.clone(), one.clone(), rest]);
            l.build()
        }
        Move::R1Minus { arrow, .. } => {
            let keep: Vec<bool> = (0..n).map(|i| i != *arrow).collect();
            d.sub_rigid(grp, &keep).0
        }
        Move::R2Plus { edges, splits, tails_first, crossed, writhe } => {
            let (a, b) = (n, n + 1);
            let first_head = !*tails_first;
            let p1 = Pt { id: a, head: first_head, writhe: *writhe };
            let p2 = Pt { id: b, head: first_head, writhe: -*writhe };
            let (q1, q2) = if *crossed { (b, a) } else { (a, b) };
            let wq = |id: usize| if id == a { *writhe } else { -*writhe };
            let q1 = Pt { id: q1, head: !first_head, writhe: wq(q1) };
            let q2 = Pt { id: q2, head: !first_head, writhe: wq(q2) };
            if n == 0 {
                let edges = vec![one.clone(), splits[0].clone(), one, splits[1].clone()];
                return Layout { pts: vec![p1, p2, q1, q2], edges }.build();
            }
            let mut l = Layout::of(d);
            let [j1, j2] = *edges;
            if j1 == j2 {
                let x = d.edge(j1);
                let rest = grp.mul(&grp.inv(&grp.mul(&splits[0], &splits[1])), x);
                l.splice(j1, &[p1, p2, q1, q2], vec![splits[0].clone(), one.clone(), splits[1].clone(), one, rest]);
            } else {
                let r1 = grp.mul(&grp.inv(&splits[0]), d.edge(j1));
                let r2 = grp.mul(&grp.inv(&splits[1]), d.edge(j2));
                let mut parts =
                    vec![(j1, [p1, p2], vec![splits[0].clone(), one.clone(), r1]), (j2, [q1, q2], vec![splits[1].clone(), one, r2])];
                parts.sort_by_key(|x| std::cmp::Reverse(x.0));
                for (j, pts, pieces) in parts {
                    l.splice(j, &pts, pieces);
                }
            }
            l.build()
        }
        Move::R2Minus { arrows } => {
            let keep: Vec<bool> = (0..n).map(|i| i != arrows[0] && i != arrows[1]).collect();
            d.sub_rigid(grp, &keep).0
        }
        Move::R3 { edges } => {
            let mut l = Layout::of(d);
            let mpos = l.pts.len();
            for &e in edges {
                l.pts.swap(e, (e + 1) % mpos);
            }
            l.build()
        }
        Move::W { arrow, g } => {
            let a = d.arrows()[*arrow];
            let mut l = Layout::of(d);
            let mpos = l.pts.len();
            let gi = grp.inv(g);
            for x in [a.tail, a.head] {
                let before = (x + mpos - 1) % mpos;
                l.edges[before] = grp.mul(&l.edges[before], g);
                l.edges[x] = grp.mul(&gi, &l.edges[x]);
            }
            if grp.weight(g) == -1 {
                l.pts[a.tail].head = true;
                l.pts[a.head].head = false;
            }
            l.build()
        }
    }
}

/// Canonical result of a move.
pub fn apply_canonical(grp: &WeightedGroup, d: &Diagram, m: &Move) -> Result<Diagram> {
    Ok(apply(grp, d, m)?.canonical(grp))
}

/// The move undoing `m`, expressed on the rigid result `apply(grp, d, m)`.
pub fn inverse(grp: &WeightedGroup, d: &Diagram, m: &Move) -> Result<Move> {
    let res = apply(grp, d, m)?;
    let n = d.degree();
    let mpos = d.num_positions();
    Ok(match m {
        Move::R1Plus { edge, .. } => {
            if n == 0 {
                Move::R1Minus { arrow: 0, edge: 0 }
            } else {
                Move::R1Minus { arrow: res.arrow_index_at(edge + 1), edge: edge + 1 }
            }
        }
        Move::R1Minus { arrow, edge } => {
            let (x, y) = (*edge, d.next(*edge));
            let a = d.arrows()[*arrow];
            let head_first = d.is_head(x);
            if n == 1 {
                Move::R1Plus { edge: 0, split: d.edge(y).clone(), writhe: a.writhe, head_first }
            } else {
                let before = d.prev(x);
                let keep: Vec<bool> = (0..n).map(|i| i != *arrow).collect();
                let kept = d.sub_rigid(grp, &keep).1;
                let k = kept.iter().position(|&p| p == before).unwrap();
                Move::R1Plus { edge: k, split: d.edge(before).clone(), writhe: a.writhe, head_first }
            }
        }
        Move::R2Plus { edges, .. } => {
            let [j1, j2] = *edges;
            let p1 = if n == 0 {
                0
            } else if j1 <= j2 {
                j1 + 1
            } else {
                j1 + 3
            };
            let (i, j) = (res.arrow_index_at(p1), res.arrow_index_at(p1 + 1));
            Move::R2Minus { arrows: [i.min(j), i.max(j)] }
        }
        Move::R2Minus { arrows } => {
            let [i, j] = *arrows;
            let (et, eh) = r2_edges(d, i, j).unwrap();
            // first pair: the one followed (after one edge) by the other, if any
            let (f, s) = if (et + 2) % mpos == eh { (et, eh) } else { (eh, et) };
            let tails_first = f == et;
            let first_pt = f;
            let crossed = d.partner(first_pt) == d.next(s);
            let writhe = d.writhe_at(first_pt);
            if n == 2 {
                let splits = [d.edge(d.next(f)).clone(), d.edge(d.next(s)).clone()];
                Move::R2Plus { edges: [0, 0], splits, tails_first, crossed, writhe }
            } else {
                let keep: Vec<bool> = (0..n).map(|k| k != i && k != j).collect();
                let kept = d.sub_rigid(grp, &keep).1;
                let idx = |p: usize| kept.iter().position(|&q| q == p).unwrap();
                if (f + 2) % mpos == s {
                    let k = idx(d.prev(f));
                    let splits = [d.edge(d.prev(f)).clone(), d.edge(d.next(f)).clone()];
                    Move::R2Plus { edges: [k, k], splits, tails_first, crossed, writhe }
                } else {
                    let (k1, k2) = (idx(d.prev(f)), idx(d.prev(s)));
                    let splits = [d.edge(d.prev(f)).clone(), d.edge(d.prev(s)).clone()];
                    Move::R2Plus { edges: [k1, k2], splits, tails_first, crossed, writhe }
                }
            }
        }
        Move::R3 { edges } => Move::R3 { edges: *edges },
        Move::W { arrow, g } => {
            let t = d.arrows()[*arrow].tail;
            Move::W { arrow: res.arrow_index_at(t), g: grp.inv(g) }
        }
    })
}

fn conjugates(grp: &WeightedGroup, x: &Elem, ball: &[Elem]) -> Vec<Elem> {
    let set: BTreeSet<Elem> = ball.iter().map(|h| grp.conjugate(x, h)).collect();
    let mut v: Vec<Elem> = set.into_iter().collect();
    v.sort_by(|a, b| grp.length(a).cmp(&grp.length(b)).then_with(|| a.cmp(b)));
    v
}

/// Candidate moves of the given kinds, before checking decorations.
fn candidates(grp: &WeightedGroup, d: &Diagram, ball: &[Elem], allow: &[MoveKind]) -> Vec<Move> {
    let n = d.degree();
    let mpos = d.num_positions();
    let mut out = vec![];
    let outer = if n == 0 { conjugates(grp, d.edge(0), ball) } else { vec![] };
    for kind in MoveKind::ALL {
        if !allow.contains(&kind) {
            continue;
        }
        match kind {
            MoveKind::R1Plus => {
                let splits: &[Elem] = if n == 0 { &outer } else { ball };
                for edge in 0..d.edges().len() {
                    for split in splits {
                        for writhe in [1, -1] {
                            for head_first in [false, true] {
                                out.push(Move::R1Plus { edge, split: split.clone(), writhe, head_first });
                            }
                        }
                    }
                }
            }
            MoveKind::R1Minus => {
                for a in d.arrows().iter() {
                    let i = d.arrow_index_at(a.tail);
                    let mut es: Vec<usize> = [a.tail, a.head].into_iter().filter(|&x| d.partner(x) == d.next(x)).collect();
                    es.sort();
                    for edge in es {
                        out.push(Move::R1Minus { arrow: i, edge });
                    }
                }
            }
            MoveKind::R2Plus => {
                let pairs: Vec<[Elem; 2]> = if n == 0 {
                    ball.iter().flat_map(|a| outer.iter().map(move |x| [a.clone(), grp.mul(&grp.inv(a), x)])).collect()
                } else {
                    ball.iter().flat_map(|a| ball.iter().map(move |b| [a.clone(), b.clone()])).collect()
                };
                let ne = d.edges().len();
                for j1 in 0..ne {
                    for j2 in j1..ne {
                        if n == 0 && j2 != 0 {
                            continue;
                        }
                        for splits in &pairs {
                            for tails_first in [true, false] {
                                for crossed in [false, true] {
                                    for writhe in [1, -1] {
                                        out.push(Move::R2Plus { edges: [j1, j2], splits: splits.clone(), tails_first, crossed, writhe });
                                    }
                                }
                            }
                        }
                    }
                }
            }
            MoveKind::R2Minus => {
                for i in 0..n {
                    for j in i + 1..n {
                        out.push(Move::R2Minus { arrows: [i, j] });
                    }
                }
            }
            MoveKind::R3 => {
                for a in 0..mpos {
                    for b in a + 1..mpos {
                        for c in b + 1..mpos {
                            out.push(Move::R3 { edges: [a, b, c] });
                        }
                    }
                }
            }
            MoveKind::W => {
                for arrow in 0..n {
                    for g in ball.iter().filter(|g| !grp.is_identity(g)) {
                        out.push(Move::W { arrow, g: g.clone() });
                    }
                }
            }
        }
    }
    out
}

/// All admissible moves of the allowed kinds, with insertion decorations and
/// conjugators drawn from `ball(radius)`. Order: kind, then site, then
/// decoration.
pub fn enumerate_moves(grp: &WeightedGroup, d: &Diagram, radius: usize, allow: &[MoveKind]) -> Vec<Move> {
    let ball = grp.ball(radius);
    candidates(grp, d, &ball, allow).into_iter().filter(|m| validate_site(grp, d, m, true).is_ok()).collect()
}

/// Applies moves in turn, canonicalizing after each step.
pub fn replay(grp: &WeightedGroup, d: &Diagram, moves: &[Move]) -> Result<Diagram> {
    let mut cur = d.canonical(grp);
    for m in moves {
        cur = apply_canonical(grp, &cur, m)?;
    }
    Ok(cur)
}

/// The simple loop of a local move picture: along each listed edge, then
/// along the arrow leaving its far end, until the walk closes.
pub fn site_loop(d: &Diagram, edges: &[usize]) -> HomologyClass {
    let mut h = HomologyClass::zero(d);
    let start = edges[0];
    let mut cur = edges[0];
    let mut far = d.next(start);
    h.edges[cur] += 1;
    loop {
        let a = d.arrow_index_at(far);
        h.arrows[a] += if d.is_head(far) { -1 } else { 1 };
        let z = d.partner(far);
        if z == start {
            return h;
        }
        let f = *edges.iter().find(|&&f| f != cur && (f == z || d.next(f) == z)).expect("site edges close up");
        if f == z {
            h.edges[f] += 1;
            far = d.next(f);
        } else {
            h.edges[f] -= 1;
            far = f;
        }
        cur = f;
    }
}

/// Edges that must carry the identity for the move to apply.
pub fn surrounded_edges(d: &Diagram, m: &Move) -> Vec<usize> {
    match m {
        Move::R1Minus { edge, .. } => vec![*edge],
        Move::R2Minus { arrows } => match r2_edges(d, arrows[0], arrows[1]) {
            Some((et, eh)) => vec![et, eh],
            None => vec![],
        },
        Move::R3 { edges } => edges.to_vec(),
        _ => vec![],
    }
}

/// Obstruction loop of a removal or R3 move, on the underlying classical diagram.
pub fn obstruction_loop(d: &Diagram, m: &Move) -> Option<HomologyClass> {
    let es = surrounded_edges(d, m);
    if es.is_empty() {
        None
    } else {
        Some(site_loop(d, &es))
    }
}

/// Conjugacy move with trivial weight: the arrow keeps its orientation.
pub fn w0_shift(grp: &WeightedGroup, d: &Diagram, arrow: usize, g: &Elem) -> Diagram {
    let a = d.arrows()[arrow];
    let mpos = d.num_positions();
    let gi = grp.inv(g);
    let mut edges = d.edges().to_vec();
    for x in [a.tail, a.head] {
        let before = (x + mpos - 1) % mpos;
        edges[before] = grp.mul(&edges[before], g);
        edges[x] = grp.mul(&gi, &edges[x]);
    }
    d.with_edges(edges)
}

/// A Gauss diagram on an abelian group whose abelianization is `ab`, on the
/// rigid positions of `ab.classical()`.
pub fn lift(grp: &WeightedGroup, ab: &AbelianDiagram) -> Diagram {
    let c = ab.classical();
    let m = c.num_positions();
    if m == 0 {
        return Diagram::circle(grp, ab.global());
    }
    let mut g = vec![grp.identity(); m];
    g[0] = ab.global().clone();
    for (a, mark) in c.arrows().iter().zip(ab.marks()) {
        let through_zero = (a.head..a.head + m).map(|j| j % m).take_while(|&j| j != a.tail).any(|j| j == 0);
        let delta = if through_zero { grp.mul(&mark, &grp.inv(ab.global())) } else { mark };
        let before = (a.tail + m - 1) % m;
        g[before] = grp.mul(&g[before], &delta);
        g[a.tail] = grp.mul(&g[a.tail], &grp.inv(&delta));
    }
    c.with_edges(g)
}

/// w₀-moves making every edge in `required` trivial, if possible. Each such
/// edge joins two arrow ends; the moves are potentials on the arrows, solved
/// along a spanning forest and checked on the remaining edges.
pub fn adjust_w0(grp: &WeightedGroup, d: &Diagram, required: &[usize]) -> Option<Diagram> {
    let n = d.degree();
    let mut adj: Vec<Vec<(usize, usize, bool)>> = vec![vec![]; n];
    for &e in required {
        let (x, y) = (d.arrow_index_at(e), d.arrow_index_at(d.next(e)));
        if x == y {
            if !grp.is_identity(d.edge(e)) {
                return None;
            }
            continue;
        }
        adj[x].push((y, e, true));
        adj[y].push((x, e, false));
    }
    // value(e) + pot(y) - pot(x) = 0 for e from an end of x to an end of y
    let mut pot: Vec<Option<Elem>> = vec![None; n];
    for root in 0..n {
        if pot[root].is_some() {
            continue;
        }
        pot[root] = Some(grp.identity());
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let pu = pot[u].clone().unwrap();
            for &(v, e, forward) in &adj[u] {
                let val = d.edge(e);
                let want = if forward { grp.mul(&pu, &grp.inv(val)) } else { grp.mul(&pu, val) };
                match &pot[v] {
                    None => {
                        pot[v] = Some(want);
                        queue.push_back(v);
                    }
                    Some(p) if *p != want => return None,
                    _ => {}
                }
            }
        }
    }
    let mut out = d.clone();
    for (a, p) in pot.iter().enumerate() {
        let p = p.as_ref().unwrap();
        if !grp.is_identity(p) {
            out = w0_shift(grp, &out, a, p);
        }
    }
    debug_assert!(required.iter().all(|&e| grp.is_identity(out.edge(e))));
    Some(out)
}

/// Checks an abelian move: classical side conditions, and for removals and
/// R3 a vanishing value of the obstruction loop.
pub fn validate_abelian(grp: &WeightedGroup, ab: &AbelianDiagram, m: &Move) -> Result<()> {
    if !grp.is_abelian() {
        return domain_err("abelian moves need an abelian group");
    }
    if m.kind() == MoveKind::W {
        return domain_err("w-moves act trivially on abelian diagrams");
    }
    let l = lift(grp, ab);
    validate_site(grp, &l, m, false)?;
    if let Some(lp) = obstruction_loop(&l, m) {
        let v = crate::homology::mu_eval(grp, ab, &lp)?;
        if !grp.is_identity(&v) {
            return domain_err(format!("obstruction loop has value {}", grp.format(&v)));
        }
    }
    Ok(())
}

/// Applies an abelian move by lifting, clearing the surrounded edges with
/// w₀-moves, applying the move on π and abelianizing again.
pub fn apply_abelian(grp: &WeightedGroup, ab: &AbelianDiagram, m: &Move) -> Result<AbelianDiagram> {
    validate_abelian(grp, ab, m)?;
    let l = lift(grp, ab);
    let req = surrounded_edges(&l, m);
    let l = adjust_w0(grp, &l, &req).ok_or_else(|| Error::Domain("surrounded edges cannot be cleared".into()))?;
    abelianize(grp, &apply(grp, &l, m)?)
}

/// Admissible abelian moves. R1 insertions use the trivial split only, since
/// the split does not change the abelian diagram.
pub fn enumerate_abelian_moves(grp: &WeightedGroup, ab: &AbelianDiagram, radius: usize, allow: &[MoveKind]) -> Vec<Move> {
    let l = lift(grp, ab);
    let ball = grp.ball(radius);
    let allow: Vec<MoveKind> = allow.iter().copied().filter(|&k| k != MoveKind::W).collect();
    candidates(grp, &l, &ball, &allow)
        .into_iter()
        .filter(|m| match m {
            Move::R1Plus { split, .. } => l.degree() == 0 || grp.is_identity(split),
            _ => true,
        })
        .filter(|m| validate_abelian(grp, ab, m).is_ok())
        .collect()
}

/// Orbit under conjugacy moves with conjugators from `ball(radius)`. For an
/// infinite group the orbit is cut to diagrams whose markings have length at
/// most max(radius, longest marking of `d`).
pub fn w_orbit(grp: &WeightedGroup, d: &Diagram, radius: usize) -> BTreeSet<Diagram> {
    let start = d.canonical(grp);
    let ball: Vec<Elem> = grp.ball(radius).into_iter().filter(|g| !grp.is_identity(g)).collect();
    let cap = start.edges().iter().map(|g| grp.length(g)).max().unwrap_or(0).max(radius as i64);
    let fits = |x: &Diagram| grp.is_finite() || x.edges().iter().all(|g| grp.length(g) <= cap);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for arrow in 0..cur.degree() {
            for g in &ball {
                let next = apply_unchecked(grp, &cur, &Move::W { arrow, g: g.clone() }).canonical(grp);
                if fits(&next) && seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    seen
}

#[derive(Clone, Debug)]
pub struct Search {
    pub radius: usize,
    pub allow: Vec<MoveKind>,
    pub budget: usize,
    pub max_degree: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Equivalence {
    /// Moves turning the first diagram into the second; each move is
    /// expressed on the canonical form of the current diagram.
    Path(Vec<Move>),
    Unknown,
}

/// Breadth-first search for a move sequence. Running out of budget gives
/// `Unknown`, never a negative answer.
pub fn equivalent(grp: &WeightedGroup, d1: &Diagram, d2: &Diagram, s: &Search) -> Equivalence {
    let start = d1.canonical(grp);
    let target = d2.canonical(grp);
    let mut parent: HashMap<Diagram, Option<(Diagram, Move)>> = HashMap::from([(start.clone(), None)]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur == target {
            let mut path = vec![];
            let mut x = cur;
            while let Some(Some((p, m))) = parent.get(&x) {
                path.push(m.clone());
                x = p.clone();
            }
            path.reverse();
            return Equivalence::Path(path);
        }
        if parent.len() >= s.budget {
            continue;
        }
        for m in enumerate_moves(grp, &cur, s.radius, &s.allow) {
            let next = apply_unchecked(grp, &cur, &m).canonical(grp);
            if next.degree() <= s.max_degree && !parent.contains_key(&next) {
                parent.insert(next.clone(), Some((cur.clone(), m)));
                queue.push_back(next);
            }
        }
    }
    Equivalence::Unknown
}

/// w₀-moves turning `d1` into `d2` when both are rigid diagrams on an abelian
/// group with the same classical diagram and the same abelianization. An
/// arrow crossing another one is peeled first, else an arrow surrounding an
/// isolated edge; the remaining markings are matched by induction and the
/// peeled arrow is then fixed by one move.
pub fn connect_w0(grp: &WeightedGroup, d1: &Diagram, d2: &Diagram) -> Option<Vec<Move>> {
    if !grp.is_abelian() || d1.ends() != d2.ends() {
        return None;
    }
    let (moves, last) = connect_rec(grp, d1, d2)?;
    (last == *d2).then_some(moves)
}

fn connect_rec(grp: &WeightedGroup, d1: &Diagram, d2: &Diagram) -> Option<(Vec<Move>, Diagram)> {
    let n = d1.degree();
    if n == 0 {
        return (d1.edge(0) == d2.edge(0)).then(|| (vec![], d1.clone()));
    }
    let arrows = d1.arrows();
    let crosses = |i: usize| {
        let a = arrows[i];
        arrows.iter().any(|b| *b != a && crate::diagram::chords_cross(a.tail, a.head, b.tail, b.head))
    };
    let alpha = (0..n)
        .find(|&i| crosses(i))
        .or_else(|| (0..n).find(|&i| d1.next(arrows[i].tail) == arrows[i].head || d1.next(arrows[i].head) == arrows[i].tail))?;
    let keep: Vec<bool> = (0..n).map(|i| i != alpha).collect();
    let s1 = d1.sub_rigid(grp, &keep).0;
    let s2 = d2.sub_rigid(grp, &keep).0;
    let (sub_moves, _) = connect_rec(grp, &s1, &s2)?;
    let mut cur = d1.clone();
    let mut moves = vec![];
    for m in sub_moves {
        if let Move::W { arrow, g } = m {
            let arrow = if arrow < alpha { arrow } else { arrow + 1 };
            cur = w0_shift(grp, &cur, arrow, &g);
            moves.push(Move::W { arrow, g });
        }
    }
    let a = arrows[alpha];
    if let Some(x) = [a.tail, a.head].into_iter().find(|&x| d1.partner(x) != d1.prev(x)) {
        let before = d1.prev(x);
        let g = grp.mul(&grp.inv(cur.edge(before)), d2.edge(before));
        if !grp.is_identity(&g) {
            cur = w0_shift(grp, &cur, alpha, &g);
            moves.push(Move::W { arrow: alpha, g });
        }
    }
    Some((moves, cur))
}
