//! Invariance certificates for arrow-diagram formulas.
//!
//! A based diagram is a rigid diagram whose base edge is the last edge. A
//! degenerate diagram is stored as a based diagram whose base edge is marked
//! 1 and joins two different arrows; the two ends at the base edge form the
//! degenerate point, and swapping them gives the same degenerate diagram.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diagram::{Arrow, Diagram};
use crate::error::{domain_err, Result};
use crate::group::{Elem, WeightedGroup};
use crate::invariants::eval_arrow;
use crate::linalg::Q;
use crate::moves::{apply, apply_unchecked, enumerate_moves, Move, MoveKind};
use crate::random::random_sparse_diagram;
use crate::series::{gen_relations, pairing, q, Basis, Family, Series};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Based(Diagram);

impl Based {
    pub fn new(d: &Diagram, edge: usize) -> Based {
        Based(d.rotate_left(edge + 1))
    }

    pub fn diagram(&self) -> &Diagram {
        &self.0
    }

    pub fn base_edge(&self) -> usize {
        self.0.num_positions() - 1
    }
}

impl Basis for Based {
    fn aut_order(&self) -> usize {
        1
    }
    fn degree(&self) -> usize {
        self.0.degree()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Degenerate(Diagram);

fn swap_point(b: &Diagram) -> Diagram {
    let m = b.num_positions();
    let sw = |p: usize| {
        if p == 0 {
            m - 1
        } else if p == m - 1 {
            0
        } else {
            p
        }
    };
    let arrows: Vec<Arrow> = b.arrows().iter().map(|a| Arrow { tail: sw(a.tail), head: sw(a.head), writhe: a.writhe }).collect();
    Diagram::from_arrows(&arrows, b.edges().to_vec()).unwrap()
}

impl Degenerate {
    /// Shrinks edge `e` of `d`, which must be nice.
    pub fn shrink(d: &Diagram, e: usize) -> Degenerate {
        let b = d.rotate_left(e + 1);
        let s = swap_point(&b);
        Degenerate(b.min(s))
    }

    /// The representative, a based diagram with the point as base edge.
    pub fn diagram(&self) -> &Diagram {
        &self.0
    }

    pub fn heads_at_point(&self) -> usize {
        let m = self.0.num_positions();
        self.0.is_head(0) as usize + self.0.is_head(m - 1) as usize
    }

    pub fn is_monotonic(&self) -> bool {
        self.heads_at_point() == 1
    }
}

impl Basis for Degenerate {
    fn aut_order(&self) -> usize {
        1
    }
    fn degree(&self) -> usize {
        self.0.degree()
    }
}

pub fn is_nice(grp: &WeightedGroup, d: &Diagram, e: usize) -> bool {
    d.degree() >= 1 && grp.is_identity(d.edge(e)) && d.partner(e) != d.next(e)
}

/// All based diagrams of a diagram, one per edge.
pub fn base_expand(d: &Diagram) -> Series<Based> {
    Series::from_terms((0..d.num_positions()).map(|e| (Based::new(d, e), q(1))))
}

/// ε times the shrunk diagram, or nothing when the base is not nice.
pub fn delta(grp: &WeightedGroup, b: &Based) -> Option<(Degenerate, i8)> {
    let d = b.diagram();
    let e = b.base_edge();
    if !is_nice(grp, d, e) {
        return None;
    }
    let eps = d.edge_signs(e).unwrap().eps;
    Some((Degenerate::shrink(d, e), eps))
}

pub fn d_map(grp: &WeightedGroup, x: &Series<Diagram>) -> Series<Degenerate> {
    let mut out = Series::new();
    for (a, c) in x.iter() {
        for (b, k) in base_expand(a).iter() {
            if let Some((g, eps)) = delta(grp, b) {
                out.add_term(g, c * k * q(eps as i64));
            }
        }
    }
    out
}

/// Moves the end at position `p` to just after position `f`. Returns the
/// new rigid diagram and the (trivial) edge between `f` and the moved end.
fn relocate(grp: &WeightedGroup, d: &Diagram, p: usize, f: usize) -> (Diagram, usize) {
    let m = d.num_positions();
    let mut order: Vec<usize> = vec![];
    let mut edges: Vec<Elem> = vec![];
    for k in 1..=m {
        let x = (p + k) % m;
        if x == p {
            continue;
        }
        order.push(x);
        let e = if d.next(x) == p { grp.mul(d.edge(x), d.edge(p)) } else { d.edge(x).clone() };
        edges.push(e);
    }
    let i = order.iter().position(|&x| x == f).unwrap();
    order.insert(i + 1, p);
    let after = std::mem::replace(&mut edges[i], grp.identity());
    edges.insert(i + 1, after);
    let mut at = vec![0; m];
    for (new, &old) in order.iter().enumerate() {
        at[old] = new;
    }
    let arrows: Vec<Arrow> = d.arrows().iter().map(|a| Arrow { tail: at[a.tail], head: at[a.head], writhe: a.writhe }).collect();
    (Diagram::from_arrows(&arrows, edges).unwrap(), i)
}

/// The monotonic diagrams sharing a triangle relation with a non-monotonic
/// one: one end at the point moves next to the far end of the other arrow.
pub fn triangle_partners(grp: &WeightedGroup, x: &Degenerate) -> Vec<Degenerate> {
    let d = x.diagram();
    let m = d.num_positions();
    let (u, v) = (m - 1, 0);
    let mut out = BTreeSet::new();
    for (p, other) in [(u, v), (v, u)] {
        let (nd, e) = relocate(grp, d, p, d.partner(other));
        out.insert(Degenerate::shrink(&nd, e));
    }
    out.into_iter().collect()
}

/// The three degenerate diagrams of a triangle, from its monotonic member.
pub fn triangle_sum(grp: &WeightedGroup, mono: &Degenerate) -> Series<Degenerate> {
    assert!(mono.is_monotonic());
    let d = mono.diagram();
    let m = d.num_positions();
    let (hp, tp) = if d.is_head(m - 1) { (m - 1, 0) } else { (0, m - 1) };
    let mut out = Series::single(mono.clone());
    let (a, e) = relocate(grp, d, tp, d.partner(hp));
    out.add_term(Degenerate::shrink(&a, e), q(1));
    let (b, e) = relocate(grp, d, hp, d.partner(tp));
    out.add_term(Degenerate::shrink(&b, e), q(1));
    out
}

/// X minus its monotonic partners.
pub fn nabla_relator(grp: &WeightedGroup, x: &Degenerate) -> Series<Degenerate> {
    let mut s = Series::single(x.clone());
    for p in triangle_partners(grp, x) {
        s.add_term(p, q(-1));
    }
    s
}

/// Rewrites every non-monotonic term through its triangle relation.
pub fn triangle_reduce(grp: &WeightedGroup, y: &Series<Degenerate>) -> Series<Degenerate> {
    let mut out = Series::new();
    for (x, c) in y.iter() {
        if x.is_monotonic() {
            out.add_term(x.clone(), c.clone());
        } else {
            for p in triangle_partners(grp, x) {
                out.add_term(p, c.clone());
            }
        }
    }
    out
}

/// Degenerate diagrams of degree `n` with markings from `decorations`.
pub fn all_degenerate(grp: &WeightedGroup, n: usize, decorations: &[Elem]) -> Vec<Degenerate> {
    let mut set = BTreeSet::new();
    for d in crate::series::all_diagrams(grp, n, decorations, false) {
        for e in 0..d.num_positions() {
            if is_nice(grp, &d, e) {
                set.insert(Degenerate::shrink(&d, e));
            }
        }
    }
    set.into_iter().collect()
}

/// Orbits of w-moves. Finite groups use every element; infinite groups use
/// the ball of the given radius and drop diagrams with markings longer than
/// the radius or the longest input marking.
#[derive(Clone, Debug)]
pub struct Orbits {
    grp: WeightedGroup,
    conj: Vec<Elem>,
    radius: usize,
    keys: RefCell<HashMap<Diagram, Diagram>>,
}

impl Orbits {
    pub fn new(grp: &WeightedGroup, radius: usize) -> Orbits {
        let all = grp.elements().unwrap_or_else(|| grp.ball(radius));
        let conj = all.into_iter().filter(|g| !grp.is_identity(g)).collect();
        Orbits { grp: grp.clone(), conj, radius, keys: RefCell::default() }
    }

    pub fn group(&self) -> &WeightedGroup {
        &self.grp
    }

    /// Rigid diagrams reachable by w-moves. Arrows at the positions in
    /// `locked` move together with a common conjugator.
    pub fn closure(&self, d: &Diagram, locked: Option<(usize, usize)>) -> BTreeSet<Diagram> {
        let grp = &self.grp;
        let cap = d.edges().iter().map(|g| grp.length(g)).max().unwrap_or(0).max(self.radius as i64);
        let fits = |x: &Diagram| grp.is_finite() || x.edges().iter().all(|g| grp.length(g) <= cap);
        let mut seen = BTreeSet::from([d.clone()]);
        let mut queue = VecDeque::from([d.clone()]);
        while let Some(cur) = queue.pop_front() {
            let mut next = vec![];
            let lock_ids: Vec<usize> = match locked {
                Some((p, r)) => vec![cur.arrow_index_at(p), cur.arrow_index_at(r)],
                None => vec![],
            };
            for g in &self.conj {
                for arrow in 0..cur.degree() {
                    if !lock_ids.contains(&arrow) {
                        next.push(apply_unchecked(grp, &cur, &Move::W { arrow, g: g.clone() }));
                    }
                }
                if let Some((p, r)) = locked {
                    let once = apply_unchecked(grp, &cur, &Move::W { arrow: cur.arrow_index_at(p), g: g.clone() });
                    next.push(apply_unchecked(grp, &once, &Move::W { arrow: once.arrow_index_at(r), g: g.clone() }));
                }
            }
            for x in next {
                if fits(&x) && seen.insert(x.clone()) {
                    queue.push_back(x);
                }
            }
        }
        seen
    }

    /// Orbit key of an arrow diagram: the least canonical diagram in its orbit.
    pub fn key(&self, d: &Diagram) -> Diagram {
        if d.degree() == 0 {
            return d.canonical(&self.grp);
        }
        if let Some(k) = self.keys.borrow().get(d) {
            return k.clone();
        }
        let members: BTreeSet<Diagram> = self.closure(d, None).iter().map(|x| x.canonical(&self.grp)).collect();
        let k = members.iter().next().unwrap().clone();
        let mut keys = self.keys.borrow_mut();
        keys.insert(d.clone(), k.clone());
        for m in members {
            keys.insert(m, k.clone());
        }
        k
    }

    /// Canonical members of the orbits of the given keys, mapped to their key.
    fn members(&self, keys: impl IntoIterator<Item = Diagram>) -> HashMap<Diagram, Diagram> {
        let mut out = HashMap::new();
        for k in keys {
            if k.degree() == 0 {
                out.insert(k.clone(), k);
                continue;
            }
            for m in self.closure(&k, None) {
                out.insert(m.canonical(&self.grp), k.clone());
            }
        }
        out
    }

    pub fn degenerate_key(&self, x: &Degenerate) -> Degenerate {
        let d = x.diagram();
        let m = d.num_positions();
        self.closure(d, Some((m - 1, 0))).iter().map(|y| Degenerate::shrink(y, m - 1)).min().unwrap()
    }

    /// Rotations of a rigid representative that stay inside its rigid orbit.
    pub fn aut_order(&self, d: &Diagram) -> usize {
        if d.degree() == 0 {
            return 1;
        }
        let orbit = self.closure(d, None);
        (0..d.num_positions()).filter(|&r| orbit.contains(&d.rotate_left(r))).count()
    }

    /// Projection of an arrow series to orbit keys.
    pub fn project(&self, x: &Series<Diagram>) -> Series<Diagram> {
        let mut cache = BTreeMap::new();
        x.map_keys(|d| cache.entry(d.clone()).or_insert_with(|| self.key(d)).clone())
    }

    /// Section of the projection: each rigid diagram of an orbit counted once.
    pub fn inject(&self, xw: &Series<Diagram>) -> Series<Diagram> {
        xw.flat_map(|k| {
            if k.degree() == 0 {
                return Series::single(k.clone());
            }
            Series::from_terms(self.closure(k, None).iter().map(|r| (r.canonical(&self.grp), q(1))))
        })
    }

    /// The same section through the weights |Aut(orbit)| / |Aut(A)|.
    pub fn inject_weighted(&self, xw: &Series<Diagram>) -> Series<Diagram> {
        xw.flat_map(|k| {
            if k.degree() == 0 {
                return Series::single(k.clone());
            }
            let aw = self.aut_order(k) as i64;
            let members: BTreeSet<Diagram> = self.closure(k, None).iter().map(|r| r.canonical(&self.grp)).collect();
            Series::from_terms(members.into_iter().map(|a| {
                let w = Q::new(aw.into(), (a.aut_order() as i64).into());
                (a, w)
            }))
        })
    }

    /// Section for degenerate orbits: each rigid degenerate diagram once.
    pub fn inject_degenerate(&self, y: &Series<Degenerate>) -> Series<Degenerate> {
        y.flat_map(|x| {
            let d = x.diagram();
            let m = d.num_positions();
            Series::from_terms(self.closure(d, Some((m - 1, 0))).iter().map(|r| (Degenerate::shrink(r, m - 1), q(1))))
        })
    }

    /// Normalized pairing of orbit series.
    pub fn pairing(&self, xw: &Series<Diagram>, yw: &Series<Diagram>) -> Q {
        let mut acc = Q::zero();
        for (k, c) in xw.iter() {
            let d = yw.get(k);
            if !d.is_zero() {
                acc += c * d * q(self.aut_order(k) as i64);
            }
        }
        acc
    }
}

/// Preimage of `x` under the orbit section, if it has one.
pub fn check_w(orb: &Orbits, x: &Series<Diagram>) -> Option<Series<Diagram>> {
    let mut by_orbit: BTreeMap<Diagram, Series<Diagram>> = BTreeMap::new();
    for (a, c) in x.iter() {
        by_orbit.entry(orb.key(a)).or_default().add_term(a.clone(), c.clone());
    }
    let mut out = Series::new();
    for (k, part) in by_orbit {
        let s = orb.inject(&Series::single(k.clone()));
        let (a, c) = part.iter().next().unwrap();
        let base = s.get(a);
        if base.is_zero() {
            return None;
        }
        let ratio = c / base;
        if s.scaled(&ratio) != part {
            return None;
        }
        out.add_term(k, ratio);
    }
    Some(out)
}

fn isolated_arrow(grp: &WeightedGroup, d: &Diagram) -> bool {
    (0..d.num_positions()).any(|p| d.partner(p) == d.next(p) && grp.is_identity(d.edge(p)))
}

/// Tails adjacent and heads adjacent, both separating edges marked 1.
fn parallel_pair(grp: &WeightedGroup, d: &Diagram, a: usize, b: usize) -> bool {
    let arr = d.arrows();
    let between = |x: usize, y: usize| {
        if d.next(x) == y {
            Some(x)
        } else if d.next(y) == x {
            Some(y)
        } else {
            None
        }
    };
    match (between(arr[a].tail, arr[b].tail), between(arr[a].head, arr[b].head)) {
        (Some(e), Some(f)) => grp.is_identity(d.edge(e)) && grp.is_identity(d.edge(f)),
        _ => false,
    }
}

/// Whether some w-move turns two arrows of `d` into a parallel pair.
fn r2_forbidden(grp: &WeightedGroup, d: &Diagram) -> bool {
    let m = d.num_positions();
    for p in 0..m {
        let q = d.next(p);
        let (a, b) = (d.arrow_index_at(p), d.arrow_index_at(q));
        if a == b {
            continue;
        }
        // Clear edge p by conjugating the arrow at q.
        let g = grp.inv(d.edge(p));
        let moved = if grp.is_identity(&g) { d.clone() } else { apply_unchecked(grp, d, &Move::W { arrow: b, g }) };
        let (a2, b2) = (moved.arrow_index_at(p), moved.arrow_index_at(q));
        if parallel_pair(grp, &moved, a2, b2) {
            return true;
        }
    }
    false
}

/// Orbits in the support containing an isolated arrow on a 1-marked edge.
pub fn r1_violations(orb: &Orbits, xw: &Series<Diagram>) -> Vec<Diagram> {
    xw.iter().filter(|(k, _)| isolated_arrow(orb.group(), k)).map(|(k, _)| k.clone()).collect()
}

/// Orbits in the support that can be brought to a parallel pair.
pub fn r2_violations(orb: &Orbits, xw: &Series<Diagram>) -> Vec<Diagram> {
    xw.iter().filter(|(k, _)| r2_forbidden(orb.group(), k)).map(|(k, _)| k.clone()).collect()
}

pub fn check_r1(orb: &Orbits, xw: &Series<Diagram>) -> bool {
    r1_violations(orb, xw).is_empty()
}

pub fn check_r2(orb: &Orbits, xw: &Series<Diagram>) -> bool {
    r2_violations(orb, xw).is_empty()
}

fn degrees<K: Basis>(x: &Series<K>) -> BTreeSet<usize> {
    x.iter().map(|(k, _)| k.degree()).collect()
}

/// Orbit series pairs to zero with the orbit images of a relation family.
pub fn orbit_pairing_test(orb: &Orbits, xw: &Series<Diagram>, family: Family) -> bool {
    let rels: Vec<Series<Diagram>> = degrees(xw).into_iter().flat_map(|n| gen_relations(orb.group(), family, n, orb.radius)).collect();
    orbit_pairs_vanish(orb, xw, &rels)
}

/// Orbit series pairs to zero with the orbit images of the given relators.
pub fn orbit_pairs_vanish(orb: &Orbits, xw: &Series<Diagram>, rels: &[Series<Diagram>]) -> bool {
    let members = orb.members(xw.iter().map(|(k, _)| k.clone()));
    rels.iter().all(|r| {
        let mut rw = Series::new();
        for (a, c) in r.iter() {
            if let Some(k) = members.get(a) {
                rw.add_term(k.clone(), c.clone());
            }
        }
        orb.pairing(xw, &rw).is_zero()
    })
}

/// Arrow series pairs to zero with every relator of a family.
pub fn pairing_test(grp: &WeightedGroup, x: &Series<Diagram>, family: Family, radius: usize) -> bool {
    for n in degrees(x) {
        for r in gen_relations(grp, family, n, radius) {
            if !pairing(x, &r, true).is_zero() {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R3Routes {
    pub triangle: bool,
    pub a6t: bool,
}

/// R3 criterion through triangle reduction and through A6T pairings.
/// Refuses series that fail the R2 condition.
pub fn check_r3(grp: &WeightedGroup, x: &Series<Diagram>, radius: usize) -> Result<R3Routes> {
    if !pairing_test(grp, x, Family::AP2Pair, radius) {
        return domain_err("the R3 criterion needs a series satisfying the R2 condition");
    }
    Ok(R3Routes { triangle: triangle_reduce(grp, &d_map(grp, x)).is_empty(), a6t: pairing_test(grp, x, Family::A6T, radius) })
}

/// Samples R3 moves on random diagrams and compares the formula before and
/// after. Returns a diagram and move changing the value, if one is found.
pub fn r3_empirical(grp: &WeightedGroup, x: &Series<Diagram>, radius: usize, samples: usize, seed: u64) -> Option<(Diagram, Move)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degs: Vec<usize> = degrees(x).into_iter().collect();
    let top = degs.last().copied().unwrap_or(0).max(3);
    for i in 0..samples {
        let n = 3 + i % (top - 1);
        let g = random_sparse_diagram(&mut rng, grp, n, radius, 0.8, true);
        let moves = enumerate_moves(grp, &g, radius, &[MoveKind::R3]);
        if let Some(m) = moves.choose(&mut rng) {
            let h = apply(grp, &g, m).unwrap();
            if eval_arrow(grp, x, &g) != eval_arrow(grp, x, &h.canonical(grp)) {
                return Some((g, m.clone()));
            }
        }
    }
    None
}

/// Orbit-level d: each based edge of a representative, made nice by a
/// w-move on the arrow after the base, then shrunk.
pub fn d_w(orb: &Orbits, xw: &Series<Diagram>) -> Series<Degenerate> {
    let grp = orb.group();
    let mut cache: BTreeMap<Degenerate, Degenerate> = BTreeMap::new();
    let mut out = Series::new();
    for (k, c) in xw.iter() {
        for e in 0..k.num_positions() {
            let f = k.next(e);
            if k.partner(e) == f {
                continue;
            }
            let g = grp.inv(k.edge(e));
            let nice = if grp.is_identity(&g) { k.clone() } else { apply_unchecked(grp, k, &Move::W { arrow: k.arrow_index_at(f), g }) };
            let eps = nice.edge_signs(e).unwrap().eps;
            let x = Degenerate::shrink(&nice, e);
            let key = cache.entry(x.clone()).or_insert_with(|| orb.degenerate_key(&x)).clone();
            out.add_term(key, c * q(eps as i64));
        }
    }
    out
}

/// Orbit-level triangle reduction.
pub fn s_w(orb: &Orbits, y: &Series<Degenerate>) -> Series<Degenerate> {
    let grp = orb.group();
    let mut out = Series::new();
    for (x, c) in y.iter() {
        if x.is_monotonic() {
            out.add_term(x.clone(), c.clone());
        } else {
            for p in triangle_partners(grp, x) {
                out.add_term(orb.degenerate_key(&p), c.clone());
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default)]
pub struct Certificate {
    pub w_lift: bool,
    pub ap1: bool,
    pub ap2: bool,
    pub triangle: bool,
    /// Pairing with A6T relators, when an arrow series over a finite group was given.
    pub a6t: Option<bool>,
    pub diagnostics: Vec<String>,
}

impl Certificate {
    pub fn pass(&self) -> bool {
        self.w_lift && self.ap1 && self.ap2 && self.triangle
    }

    pub fn report(&self) -> String {
        let f = |b: bool| if b { "ok" } else { "fail" };
        let mut s = format!("verdict={}\n", if self.pass() { "PASS" } else { "FAIL" });
        if self.w_lift {
            s += &format!("w_lift=ok\nap1={}\nap2={}\ntriangle={}\n", f(self.ap1), f(self.ap2), f(self.triangle));
        } else {
            s += "w_lift=fail\nap1=skipped\nap2=skipped\ntriangle=skipped\n";
        }
        if let Some(a) = self.a6t {
            s += &format!("a6t={}\n", f(a));
        }
        for d in &self.diagnostics {
            s += &format!("# {d}\n");
        }
        s
    }
}

/// Certificate for a series of w-orbits, given by orbit keys.
pub fn certify_formula(orb: &Orbits, xw: &Series<Diagram>) -> Certificate {
    let mut c = Certificate { w_lift: true, ..Default::default() };
    let r1 = r1_violations(orb, xw);
    c.ap1 = r1.is_empty();
    for k in r1 {
        c.diagnostics.push(format!("ap1: orbit of {k:?} has an isolated arrow on a 1-marked edge"));
    }
    let r2 = r2_violations(orb, xw);
    c.ap2 = r2.is_empty();
    for k in r2 {
        c.diagnostics.push(format!("ap2: orbit of {k:?} contains a parallel pair"));
    }
    let rest = s_w(orb, &d_w(orb, xw));
    c.triangle = rest.is_empty();
    if !c.triangle {
        c.diagnostics.push(format!("triangle: {} monotonic orbits survive", rest.len()));
    }
    c
}

/// Certificate for an arrow series: lift to orbits first.
pub fn certify_series(orb: &Orbits, x: &Series<Diagram>) -> Certificate {
    let Some(xw) = check_w(orb, x) else {
        return Certificate { diagnostics: vec!["w_lift: coefficients are not constant on w-orbits".into()], ..Default::default() };
    };
    let mut c = certify_formula(orb, &xw);
    if orb.group().is_finite() {
        c.a6t = Some(pairing_test(orb.group(), x, Family::A6T, orb.radius));
    }
    c
}

/// Basis of the degree-n arrow series satisfying the AP1, AP2, A6T and AW
/// relations, with markings from the ball.
pub fn invariant_basis(grp: &WeightedGroup, n: usize, radius: usize, skip: &[Family]) -> Vec<Series<Diagram>> {
    let basis = crate::series::all_diagrams(grp, n, &grp.ball(radius), false);
    let mut rels = vec![];
    for f in [Family::AP1, Family::AP2Pair, Family::A6T, Family::AW] {
        if !skip.contains(&f) {
            rels.extend(gen_relations(grp, f, n, radius));
        }
    }
    crate::series::annihilator(&rels, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{s3_table, WeightedGroup};
    use crate::random::{random_diagram, random_elem};
    use crate::series::{all_diagrams, annihilator};
    use rand::Rng;

    fn z2() -> WeightedGroup {
        WeightedGroup::cyclic(2).with_weights(vec![-1]).unwrap()
    }

    fn s3() -> WeightedGroup {
        WeightedGroup::table(s3_table()).with_weights(vec![1, -1, -1, -1, 1, 1]).unwrap()
    }

    fn groups() -> Vec<WeightedGroup> {
        vec![WeightedGroup::trivial(), WeightedGroup::cyclic(2), z2(), WeightedGroup::cyclic(3), s3()]
    }

    fn arrow(t: usize, h: usize) -> Arrow {
        Arrow { tail: t, head: h, writhe: 0 }
    }

    fn random_orbit_series<R: Rng>(rng: &mut R, orb: &Orbits, n: usize, terms: usize) -> Series<Diagram> {
        Series::from_terms((0..terms).map(|_| {
            let a = random_diagram(rng, orb.group(), n, 1, false);
            (orb.key(&a), q(rng.gen_range(-4..=4)))
        }))
    }

    #[test]
    fn based_expansion_counts() {
        let grp = WeightedGroup::trivial();
        let a = Diagram::from_arrows(&[arrow(0, 1)], vec![grp.identity(); 2]).unwrap();
        assert_eq!(base_expand(&a).len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=4 {
            for _ in 0..10 {
                let d = random_diagram(&mut rng, &WeightedGroup::cyclic(2), n, 1, false);
                let s = base_expand(&d);
                let total: Q = s.iter().map(|(_, c)| c.clone()).sum();
                assert_eq!(total, q(2 * n as i64));
                let m = d.num_positions();
                let syms: Vec<usize> = (0..m).filter(|&r| d.rotate_left(r) == d).collect();
                for e in 0..m {
                    let orbit: BTreeSet<usize> = syms.iter().map(|r| (e + m - r) % m).collect();
                    assert_eq!(s.get(&Based::new(&d, e)), q(orbit.len() as i64));
                }
            }
        }
    }

    #[test]
    fn delta_cases() {
        let grp = WeightedGroup::cyclic(2);
        let one = grp.identity();
        let x = grp.generator(1).unwrap();
        // Two tails meeting on an interleaved pair: 0->2, 1->3.
        let d = Diagram::from_arrows(&[arrow(0, 2), arrow(1, 3)], vec![one.clone(); 4]).unwrap();
        let (g, eps) = delta(&grp, &Based::new(&d, 0)).unwrap();
        assert_eq!(eps, 1);
        assert_eq!(g.heads_at_point(), 0);
        let marked = d.with_edges(vec![x.clone(), one.clone(), one.clone(), one.clone()]);
        assert!(delta(&grp, &Based::new(&marked, 0)).is_none());
        let iso = Diagram::from_arrows(&[arrow(0, 1), arrow(2, 3)], vec![one.clone(); 4]).unwrap();
        assert!(delta(&grp, &Based::new(&iso, 0)).is_none());
        assert!(base_expand(&Diagram::circle(&grp, &one)).is_empty());
    }

    #[test]
    fn triangle_relations_are_consistent() {
        for grp in [WeightedGroup::trivial(), z2()] {
            let dec = grp.ball(1);
            for n in 2..=3 {
                let all = all_degenerate(&grp, n, &dec);
                let monos: Vec<&Degenerate> = all.iter().filter(|x| x.is_monotonic()).collect();
                let sums: Vec<Series<Degenerate>> = monos.iter().map(|m| triangle_sum(&grp, m)).collect();
                let mut mono_count: BTreeMap<&Degenerate, usize> = BTreeMap::new();
                for (m, s) in monos.iter().zip(&sums) {
                    assert_eq!(s.len(), 3);
                    for (k, c) in s.iter() {
                        assert_eq!(*c, q(1));
                        if k.is_monotonic() {
                            *mono_count.entry(k).or_default() += 1;
                            assert_eq!(k, *m);
                        }
                    }
                }
                assert!(mono_count.values().all(|&c| c == 1));
                for x in all.iter().filter(|x| !x.is_monotonic()) {
                    let partners = triangle_partners(&grp, x);
                    assert!(!partners.is_empty() && partners.iter().all(|p| p.is_monotonic()));
                    let rel = nabla_relator(&grp, x);
                    assert!(triangle_reduce(&grp, &rel).is_empty());
                    for s in &sums {
                        assert_eq!(pairing(&rel, s, false), q(0));
                    }
                    for p in &partners {
                        assert_eq!(triangle_sum(&grp, p).get(x), q(1));
                    }
                    let red = triangle_reduce(&grp, &Series::single(x.clone()));
                    assert_eq!(triangle_reduce(&grp, &red), red);
                }
            }
        }
    }

    #[test]
    fn triangle_and_pairing_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let grp = z2();
        let mut seen = [0usize; 2];
        for n in 2..=3 {
            let basis = all_diagrams(&grp, n, &grp.ball(1), false);
            let r2 = annihilator(&gen_relations(&grp, Family::AP2Pair, n, 1), &basis);
            let mut good_rels = gen_relations(&grp, Family::AP2Pair, n, 1);
            good_rels.extend(gen_relations(&grp, Family::A6T, n, 1));
            let good = annihilator(&good_rels, &basis);
            for t in 0..12 {
                let pool = if t % 3 == 0 && !good.is_empty() { &good } else { &r2 };
                let mut x = Series::new();
                for _ in 0..3 {
                    x = x.plus(&pool[rng.gen_range(0..pool.len())].scaled(&q(rng.gen_range(-3..=3))));
                }
                let routes = check_r3(&grp, &x, 1).unwrap();
                assert_eq!(routes.triangle, routes.a6t, "{x:?}");
                seen[routes.a6t as usize] += 1;
            }
            for _ in 0..6 {
                let x = Series::from_terms((0..4).map(|_| (random_diagram(&mut rng, &grp, n, 1, false), q(rng.gen_range(-3..=3)))));
                let tri = triangle_reduce(&grp, &d_map(&grp, &x)).is_empty();
                assert_eq!(tri, pairing_test(&grp, &x, Family::A6T, 1));
            }
        }
        assert!(seen[0] > 0 && seen[1] > 0);
        let bad = Series::single(Diagram::from_arrows(&[arrow(0, 2), arrow(1, 3)], vec![grp.identity(); 4]).unwrap().canonical(&grp));
        let bad =
            bad.plus(&Series::single(Diagram::from_arrows(&[arrow(0, 1), arrow(3, 2)], vec![grp.identity(); 4]).unwrap().canonical(&grp)));
        let _ = check_r3(&grp, &bad, 1);
        assert!(check_r3(&grp, &Series::new(), 1).unwrap().triangle);
    }

    #[test]
    fn r3_refuses_without_r2() {
        let grp = WeightedGroup::trivial();
        let par = Diagram::from_arrows(&[arrow(0, 3), arrow(1, 2)], vec![grp.identity(); 4]).unwrap().canonical(&grp);
        assert!(!pairing_test(&grp, &Series::single(par.clone()), Family::AP2Pair, 0));
        assert!(check_r3(&grp, &Series::single(par), 0).is_err());
    }

    #[test]
    fn orbit_sections() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for grp in groups() {
            let orb = Orbits::new(&grp, 1);
            for n in 0..=3 {
                let xw = random_orbit_series(&mut rng, &orb, n, 3);
                let x = orb.inject(&xw);
                assert_eq!(x, orb.inject_weighted(&xw));
                assert!(x.is_integral());
                assert_eq!(check_w(&orb, &x), Some(xw.clone()));
                if grp.elements().map_or(0, |e| e.len()) == 1 {
                    assert_eq!(xw, x);
                }
                // Adjoint pair: inject and project.
                let y = Series::from_terms((0..4).map(|_| (random_diagram(&mut rng, &grp, n, 1, false), q(rng.gen_range(-3..=3)))));
                assert_eq!(pairing(&x, &y, true), orb.pairing(&xw, &orb.project(&y)));
            }
        }
        let grp = z2();
        let orb = Orbits::new(&grp, 1);
        let a = Diagram::from_arrows(&[arrow(0, 1)], vec![grp.identity(), grp.generator(1).unwrap()]).unwrap().canonical(&grp);
        let x = orb.inject(&Series::single(orb.key(&a)));
        assert!(x.len() >= 2);
        let (k, _) = x.iter().next().unwrap();
        let skew = x.plus(&Series::single(k.clone()));
        assert!(check_w(&orb, &skew).is_none());
    }

    #[test]
    fn local_checks_match_pairings() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for grp in groups() {
            let orb = Orbits::new(&grp, 1);
            let top = if grp.elements().map_or(0, |e| e.len()) > 3 { 2 } else { 3 };
            let mut outcomes = BTreeSet::new();
            for n in 1..=top {
                let ap1 = gen_relations(&grp, Family::AP1, n, 1);
                let ap2 = gen_relations(&grp, Family::AP2Pair, n, 1);
                for t in 0..8 {
                    let mut xw = Series::new();
                    for _ in 0..2 {
                        let d = random_sparse_diagram(&mut rng, &grp, n, 1, if t % 2 == 0 { 0.7 } else { 0.2 }, false);
                        let d = d.with_writhes(&vec![0; n]);
                        xw.add_term(orb.key(&d), q(rng.gen_range(1..=3)));
                    }
                    let r1 = check_r1(&orb, &xw);
                    let r2 = check_r2(&orb, &xw);
                    assert_eq!(r1, orbit_pairs_vanish(&orb, &xw, &ap1), "{xw:?}");
                    assert_eq!(r2, orbit_pairs_vanish(&orb, &xw, &ap2), "{xw:?}");
                    outcomes.insert((r1, r2));
                }
            }
            assert!(outcomes.len() >= 3, "{outcomes:?}");
        }
    }

    #[test]
    fn orbit_squares_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for grp in [z2(), WeightedGroup::cyclic(3), s3()] {
            let orb = Orbits::new(&grp, 1);
            for n in 1..=3 {
                let xw = random_orbit_series(&mut rng, &orb, n, 3);
                let x = orb.inject(&xw);
                let dw = d_w(&orb, &xw);
                assert_eq!(d_map(&grp, &x), orb.inject_degenerate(&dw));
                assert_eq!(triangle_reduce(&grp, &d_map(&grp, &x)), orb.inject_degenerate(&s_w(&orb, &dw)));
            }
        }
    }

    #[test]
    fn nice_bases_keep_sign_under_w_moves() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for grp in [z2(), s3()] {
            let orb = Orbits::new(&grp, 1);
            let elems = grp.elements().unwrap();
            for n in 2..=3 {
                for _ in 0..20 {
                    let d = random_sparse_diagram(&mut rng, &grp, n, 1, 0.6, false).with_writhes(&vec![0; n]);
                    let Some(e) = (0..d.num_positions()).find(|&e| is_nice(&grp, &d, e)) else { continue };
                    let g = random_elem(&mut rng, &elems);
                    let (p, r) = (e, d.next(e));
                    let once = apply_unchecked(&grp, &d, &Move::W { arrow: d.arrow_index_at(p), g: g.clone() });
                    let both = apply_unchecked(&grp, &once, &Move::W { arrow: once.arrow_index_at(r), g });
                    assert!(is_nice(&grp, &both, e));
                    assert_eq!(d.edge_signs(e).unwrap().eps, both.edge_signs(e).unwrap().eps);
                    let a = Degenerate::shrink(&d, e);
                    let b = Degenerate::shrink(&both, e);
                    assert_eq!(orb.degenerate_key(&a), orb.degenerate_key(&b));
                }
            }
        }
    }

    fn replay_changes(grp: &WeightedGroup, x: &Series<Diagram>, kinds: &[MoveKind], seed: u64, tries: usize) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..tries {
            let g = random_sparse_diagram(&mut rng, grp, 1 + i % 4, 1, 0.7, true);
            let ms = enumerate_moves(grp, &g, 1, kinds);
            if let Some(m) = ms.choose(&mut rng) {
                let h = apply(grp, &g, m).unwrap().canonical(grp);
                if eval_arrow(grp, x, &g) != eval_arrow(grp, x, &h) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn certificates_and_controls() {
        let grp = z2();
        let orb = Orbits::new(&grp, 1);
        let x = grp.generator(1).unwrap();
        let one = grp.identity();
        let deg1 = |e0: &Elem, e1: &Elem| Diagram::from_arrows(&[arrow(0, 1)], vec![e0.clone(), e1.clone()]).unwrap().canonical(&grp);
        let good = Series::single(orb.key(&deg1(&x, &x)));
        let c = certify_formula(&orb, &good);
        assert!(c.pass(), "{}", c.report());
        let bad = Series::single(orb.key(&deg1(&one, &x)));
        let c = certify_formula(&orb, &bad);
        assert!(!c.pass() && !c.ap1 && c.ap2 && c.triangle);
        assert!(c.diagnostics.iter().any(|d| d.starts_with("ap1")));
        assert!(c.report().contains("ap1=fail"));
        assert!(replay_changes(&grp, &orb.inject(&bad), &[MoveKind::R1Plus, MoveKind::R1Minus], 1, 400));
        assert!(!replay_changes(&grp, &orb.inject(&good), &MoveKind::ALL, 1, 400));
    }

    #[test]
    fn trivial_group_uses_plain_pipeline() {
        let grp = WeightedGroup::trivial();
        let orb = Orbits::new(&grp, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 2..=3 {
            for _ in 0..5 {
                let x = Series::from_terms((0..3).map(|_| (random_diagram(&mut rng, &grp, n, 0, false), q(rng.gen_range(1..=3)))));
                let c = certify_series(&orb, &x);
                assert!(c.w_lift);
                assert_eq!(c.triangle, triangle_reduce(&grp, &d_map(&grp, &x)).is_empty());
                assert_eq!(c.ap2, pairing_test(&grp, &x, Family::AP2Pair, 0));
            }
        }
    }

    #[test]
    fn solved_formulas_pass_and_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut solved = 0;
        for grp in [WeightedGroup::trivial(), z2()] {
            let orb = Orbits::new(&grp, 1);
            for n in 1..=2 {
                let basis = invariant_basis(&grp, n, 1, &[]);
                if basis.is_empty() {
                    continue;
                }
                let mut x = Series::new();
                for b in &basis {
                    x = x.plus(&b.scaled(&q(rng.gen_range(-2..=2))));
                }
                let c = certify_series(&orb, &x);
                assert!(c.pass(), "{}", c.report());
                assert_eq!(c.a6t, Some(true));
                assert!(!replay_changes(&grp, &x, &MoveKind::ALL, 3, 300));
                solved += 1;
            }
        }
        assert!(solved >= 2);
    }
}
