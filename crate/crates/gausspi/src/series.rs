//! Formal series of diagrams with exact rational coefficients, the subdiagram
//! map I and its inverse, forgetful projections and their symmetry-preserving
//! sections, and the Polyak relation families.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{One, Zero};

use crate::diagram::{AbelianDiagram, Arrow, Diagram};
use crate::error::{domain_err, Result};
use crate::group::{Elem, WeightedGroup};
use crate::linalg::{SpanSolver, Q};
use crate::moves::{apply, enumerate_moves, Move, MoveKind};

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Basis elements of a diagram space.
pub trait Basis: Clone + Ord + Hash + Debug {
    fn aut_order(&self) -> usize;
    fn degree(&self) -> usize;
}

impl Basis for Diagram {
    fn aut_order(&self) -> usize {
        Diagram::aut_order(self)
    }
    fn degree(&self) -> usize {
        Diagram::degree(self)
    }
}

impl Basis for AbelianDiagram {
    fn aut_order(&self) -> usize {
        AbelianDiagram::aut_order(self)
    }
    fn degree(&self) -> usize {
        AbelianDiagram::degree(self)
    }
}

/// Finitely supported series; keys are canonical, zero coefficients absent.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Series<K: Ord> {
    terms: BTreeMap<K, Q>,
}

impl<K: Ord> Default for Series<K> {
    fn default() -> Self {
        Series { terms: BTreeMap::new() }
    }
}

impl<K: Basis> Series<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(k: K) -> Self {
        let mut s = Self::new();
        s.add_term(k, q(1));
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, Q)>) -> Self {
        let mut s = Self::new();
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    pub fn add_term(&mut self, k: K, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn get(&self, k: &K) -> Q {
        self.terms.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (k, c) in o.iter() {
            s.add_term(k.clone(), c.clone());
        }
        s
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.scaled(&q(-1)))
    }

    pub fn scaled(&self, c: &Q) -> Self {
        Self::from_terms(self.iter().map(|(k, x)| (k.clone(), x * c)))
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.degree()).max()
    }

    /// Orthogonal projection on degree `k`.
    pub fn homogeneous(&self, k: usize) -> Self {
        Self::from_terms(self.iter().filter(|(g, _)| g.degree() == k).map(|(g, c)| (g.clone(), c.clone())))
    }

    pub fn map_keys<L: Basis>(&self, mut f: impl FnMut(&K) -> L) -> Series<L> {
        Series::from_terms(self.iter().map(|(k, c)| (f(k), c.clone())))
    }

    /// Linear extension of a map from basis elements to series.
    pub fn flat_map<L: Basis>(&self, mut f: impl FnMut(&K) -> Series<L>) -> Series<L> {
        let mut out = Series::new();
        for (k, c) in self.iter() {
            for (l, d) in f(k).iter() {
                out.add_term(l.clone(), c * d);
            }
        }
        out
    }

    /// Same line, scaled so that the first coefficient is 1.
    pub fn normalized(&self) -> Self {
        match self.terms.values().next() {
            None => self.clone(),
            Some(c) => self.scaled(&(Q::one() / c.clone())),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }
}

/// A coefficient functional with an optional support enumerator by degree.
pub struct SeriesFn<'a, K> {
    pub coef: Box<dyn Fn(&K) -> Q + 'a>,
    pub support: Option<Box<dyn Fn(usize) -> Vec<K> + 'a>>,
}

pub enum AnySeries<'a, K: Ord> {
    Finite(Series<K>),
    Functional(SeriesFn<'a, K>),
}

/// (x, y) when `normalized` is false, ⟨x, y⟩ = Σ |Aut(k)| x_k y_k otherwise.
pub fn pairing<K: Basis>(x: &Series<K>, y: &Series<K>, normalized: bool) -> Q {
    let (a, b) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let mut acc = Q::zero();
    for (k, c) in a.iter() {
        let d = b.get(k);
        if !d.is_zero() {
            let w = if normalized { q(k.aut_order() as i64) } else { Q::one() };
            acc += c * d * w;
        }
    }
    acc
}

/// Pairing where at least one side is finite.
pub fn pair<K: Basis>(x: &AnySeries<K>, y: &AnySeries<K>, normalized: bool) -> Result<Q> {
    let (fin, other) = match (x, y) {
        (AnySeries::Finite(a), AnySeries::Finite(b)) => return Ok(pairing(a, b, normalized)),
        (AnySeries::Finite(a), o) | (o, AnySeries::Finite(a)) => (a, o),
        _ => return domain_err("pairing needs one finite side"),
    };
    let AnySeries::Functional(f) = other else { unreachable!() };
    let mut acc = Q::zero();
    for (k, c) in fin.iter() {
        let w = if normalized { q(k.aut_order() as i64) } else { Q::one() };
        acc += c * (f.coef)(k) * w;
    }
    Ok(acc)
}

/// Sum over the 2^n subdiagrams, with sign (-1)^(removed arrows) when `alternating`.
pub fn subdiagram_sum(grp: &WeightedGroup, g: &Diagram, alternating: bool) -> Series<Diagram> {
    let n = g.degree();
    let mut out = Series::new();
    for mask in 0u64..1 << n {
        let removed = n - mask.count_ones() as usize;
        let c = if alternating && removed % 2 == 1 { q(-1) } else { q(1) };
        out.add_term(g.sub_mask(grp, mask), c);
    }
    out
}

pub fn i_map(grp: &WeightedGroup, x: &Series<Diagram>) -> Series<Diagram> {
    x.flat_map(|g| subdiagram_sum(grp, g, false))
}

pub fn i_inv(grp: &WeightedGroup, x: &Series<Diagram>) -> Series<Diagram> {
    x.flat_map(|g| subdiagram_sum(grp, g, true))
}

/// A coarsening of diagram types: a projection to coarser diagrams and the
/// rigid diagrams lying over a rigid coarse diagram.
pub trait Coarsening {
    /// Canonical coarse diagram.
    fn project(&self, g: &Diagram) -> Diagram;
    /// Rigid fine diagrams on the same positions whose projection is `rigid`.
    fn rigid_fiber(&self, rigid: &Diagram) -> Result<Vec<Diagram>>;
    /// Canonical form of a fine diagram.
    fn canonical_fine(&self, g: &Diagram) -> Diagram;
}

/// Forgets the writhes.
pub struct ForgetSigns {
    pub grp: WeightedGroup,
}

impl Coarsening for ForgetSigns {
    fn project(&self, g: &Diagram) -> Diagram {
        g.erase_writhes().canonical(&self.grp)
    }
    fn rigid_fiber(&self, rigid: &Diagram) -> Result<Vec<Diagram>> {
        let n = rigid.degree();
        Ok((0u64..1 << n).map(|m| rigid.with_writhes(&(0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect::<Vec<i8>>())).collect())
    }
    fn canonical_fine(&self, g: &Diagram) -> Diagram {
        g.canonical(&self.grp)
    }
}

/// Forgets the edge decorations. Fibers use all group elements when the
/// group is finite, else the given ball.
pub struct ForgetDecorations {
    pub grp: WeightedGroup,
    pub ball: Option<Vec<Elem>>,
}

impl ForgetDecorations {
    fn decorations(&self) -> Result<Vec<Elem>> {
        match (self.grp.elements(), &self.ball) {
            (Some(e), _) => Ok(e),
            (None, Some(b)) => Ok(b.clone()),
            (None, None) => domain_err("fiber of an infinite group needs a decoration ball"),
        }
    }
}

impl Coarsening for ForgetDecorations {
    fn project(&self, g: &Diagram) -> Diagram {
        g.erase_decorations().canonical(&WeightedGroup::trivial())
    }
    fn rigid_fiber(&self, rigid: &Diagram) -> Result<Vec<Diagram>> {
        let dec = self.decorations()?;
        if rigid.degree() == 0 {
            let classes: BTreeSet<Elem> = dec.iter().map(|g| self.grp.conj_class(g)).collect();
            return Ok(classes.into_iter().map(|c| Diagram::circle(&self.grp, &c)).collect());
        }
        let m = rigid.num_positions();
        let mut out = vec![];
        let mut idx = vec![0usize; m];
        loop {
            out.push(rigid.with_edges(idx.iter().map(|&i| dec[i].clone()).collect()));
            let mut k = 0;
            while k < m {
                idx[k] += 1;
                if idx[k] < dec.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == m {
                return Ok(out);
            }
        }
    }
    fn canonical_fine(&self, g: &Diagram) -> Diagram {
        g.canonical(&self.grp)
    }
}

/// Composition of coarsenings, finest first.
pub struct Chain(pub Vec<Box<dyn Coarsening>>);

impl Coarsening for Chain {
    fn project(&self, g: &Diagram) -> Diagram {
        self.0.iter().fold(g.clone(), |acc, c| c.project(&acc))
    }
    fn rigid_fiber(&self, rigid: &Diagram) -> Result<Vec<Diagram>> {
        let mut layer = vec![rigid.clone()];
        for c in self.0.iter().rev() {
            let mut next = vec![];
            for d in &layer {
                next.extend(c.rigid_fiber(d)?);
            }
            layer = next;
        }
        Ok(layer)
    }
    fn canonical_fine(&self, g: &Diagram) -> Diagram {
        self.0[0].canonical_fine(g)
    }
}

pub fn forget_t(c: &dyn Coarsening, x: &Series<Diagram>) -> Series<Diagram> {
    x.map_keys(|g| c.project(g))
}

/// Symmetry-preserving injection through the weight formula
/// |Aut(G₂)| / |Aut(G₁)| over distinct preimages.
pub fn inject_s(c: &dyn Coarsening, y: &Series<Diagram>) -> Result<Series<Diagram>> {
    let mut out = Series::new();
    for (g2, coef) in y.iter() {
        let fibre: BTreeSet<Diagram> = c.rigid_fiber(g2)?.iter().map(|g| c.canonical_fine(g)).collect();
        for g1 in fibre {
            let w = Q::new((g2.aut_order() as i64).into(), (g1.aut_order() as i64).into());
            out.add_term(g1, coef * w);
        }
    }
    Ok(out)
}

/// Symmetry-preserving injection as the sum of all fine classes contained in
/// a rigid representative, each counted once.
pub fn inject_s_rigid(c: &dyn Coarsening, y: &Series<Diagram>) -> Result<Series<Diagram>> {
    let mut out = Series::new();
    for (g2, coef) in y.iter() {
        for g1 in c.rigid_fiber(g2)? {
            out.add_term(c.canonical_fine(&g1), coef.clone());
        }
    }
    Ok(out)
}

/// Sign-twisted injection from arrow diagrams to Gauss diagrams.
pub fn arrow_s(grp: &WeightedGroup, x: &Series<Diagram>) -> Series<Diagram> {
    let c = ForgetSigns { grp: grp.clone() };
    let mut out = Series::new();
    for (a, coef) in x.iter() {
        let fibre: BTreeSet<Diagram> = c.rigid_fiber(a).unwrap().iter().map(|g| g.canonical(grp)).collect();
        for g in fibre {
            let w = Q::new((a.aut_order() as i64).into(), (g.aut_order() as i64).into());
            out.add_term(g.clone(), coef * w * q(g.sign() as i64));
        }
    }
    out
}

/// Sign-twisted projection T(G) = sign(G) T_a(G).
pub fn arrow_t(grp: &WeightedGroup, x: &Series<Diagram>) -> Series<Diagram> {
    let mut out = Series::new();
    for (g, c) in x.iter() {
        out.add_term(g.erase_writhes().canonical(grp), c * q(g.sign() as i64));
    }
    out
}

/// Exact span membership; coefficients over `gens` reproducing `v`.
pub fn span_membership<K: Basis>(v: &Series<K>, gens: &[Series<K>]) -> Option<Vec<Q>> {
    let mut s = SpanSolver::new(true);
    for g in gens {
        s.add(g.iter());
    }
    s.decompose(v.iter())
}

/// Basis of the series supported on `basis` that pair to zero with every
/// relator under the normalized pairing.
pub fn annihilator<K: Basis>(rels: &[Series<K>], basis: &[K]) -> Vec<Series<K>> {
    let col: BTreeMap<&K, usize> = basis.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let rows = rels
        .iter()
        .map(|r| r.iter().filter_map(|(k, c)| col.get(k).map(|&i| (i, c * q(k.aut_order() as i64)))).collect::<crate::linalg::Row>());
    crate::linalg::nullspace(rows, basis.len())
        .into_iter()
        .map(|v| Series::from_terms(v.into_iter().map(|(i, c)| (basis[i].clone(), c))))
        .collect()
}

fn rigid_matchings(n: usize) -> Vec<Vec<Arrow>> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<Arrow>, out: &mut Vec<Vec<Arrow>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let p = free.remove(0);
        for k in 0..free.len() {
            let q = free.remove(k);
            for (t, h) in [(p, q), (q, p)] {
                cur.push(Arrow { tail: t, head: h, writhe: 0 });
                rec(free, cur, out);
                cur.pop();
            }
            free.insert(k, q);
        }
        free.insert(0, p);
    }
    let mut out = vec![];
    rec(&mut (0..2 * n).collect(), &mut vec![], &mut out);
    out
}

/// Canonical diagrams of degree `n ≥ 1` with trivial markings; writhes ±1
/// when `signed`, else 0.
pub fn shapes(grp: &WeightedGroup, n: usize, signed: bool) -> Vec<Diagram> {
    let one = grp.identity();
    let mut set = BTreeSet::new();
    for arrows in rigid_matchings(n) {
        let d = Diagram::from_arrows(&arrows, vec![one.clone(); 2 * n]).unwrap();
        if signed {
            for m in 0u64..1 << n {
                let w: Vec<i8> = (0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect();
                set.insert(d.with_writhes(&w).canonical(grp));
            }
        } else {
            set.insert(d.canonical(grp));
        }
    }
    set.into_iter().collect()
}

fn for_each_assignment(slots: &[usize], choices: &[Elem], mut f: impl FnMut(&[(usize, Elem)])) {
    let mut idx = vec![0usize; slots.len()];
    loop {
        let cur: Vec<(usize, Elem)> = slots.iter().zip(&idx).map(|(&s, &i)| (s, choices[i].clone())).collect();
        f(&cur);
        let mut k = 0;
        while k < slots.len() {
            idx[k] += 1;
            if idx[k] < choices.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == slots.len() {
            return;
        }
    }
}

/// Canonical diagrams of degree `n` with markings from `decorations`.
pub fn all_diagrams(grp: &WeightedGroup, n: usize, decorations: &[Elem], signed: bool) -> Vec<Diagram> {
    if n == 0 {
        let set: BTreeSet<Diagram> = decorations.iter().map(|g| Diagram::circle(grp, g)).collect();
        return set.into_iter().collect();
    }
    let mut set = BTreeSet::new();
    let slots: Vec<usize> = (0..2 * n).collect();
    for s in shapes(grp, n, signed) {
        for_each_assignment(&slots, decorations, |a| {
            set.insert(s.with_edges(a.iter().map(|(_, g)| g.clone()).collect()).canonical(grp));
        });
    }
    set.into_iter().collect()
}

/// Rigid diagrams of degree `n` carrying a move site of `kind` (a removal or
/// R3), with surrounded edges marked 1 and the other edges from `decorations`.
pub fn decorated_sites(grp: &WeightedGroup, n: usize, decorations: &[Elem], kind: MoveKind) -> Vec<(Diagram, Move)> {
    let mut out = vec![];
    if n == 0 {
        return out;
    }
    for s in shapes(grp, n, true) {
        for m in enumerate_moves(grp, &s, 0, &[kind]) {
            let fixed = crate::moves::surrounded_edges(&s, &m);
            let free: Vec<usize> = (0..2 * n).filter(|e| !fixed.contains(e)).collect();
            for_each_assignment(&free, decorations, |a| {
                let mut edges = s.edges().to_vec();
                for (e, g) in a {
                    edges[*e] = g.clone();
                }
                out.push((s.with_edges(edges), m.clone()));
            });
        }
    }
    out
}

fn without(grp: &WeightedGroup, g: &Diagram, drop: &[usize]) -> Diagram {
    let keep: Vec<bool> = (0..g.degree()).map(|i| !drop.contains(&i)).collect();
    g.remove_arrows(grp, &keep)
}

/// G + G∖A + G∖B for an R2 pair (A, B).
pub fn p2_relator(grp: &WeightedGroup, g: &Diagram, m: &Move) -> Series<Diagram> {
    let Move::R2Minus { arrows: [a, b] } = m else { panic!("not an R2 site") };
    Series::from_terms([(g.canonical(grp), q(1)), (without(grp, g, &[*a]), q(1)), (without(grp, g, &[*b]), q(1))])
}

/// Σ over subsets T of the triangle with |T| ≥ 2 of G_T − G'_T, where G' is
/// the result of the R3 move and the other arrows are kept.
pub fn p3_relator(grp: &WeightedGroup, g: &Diagram, m: &Move) -> Series<Diagram> {
    let Move::R3 { edges } = m else { panic!("not an R3 site") };
    let tri = crate::moves::r3_arrows(g, edges).expect("R3 site");
    let g2 = apply(grp, g, m).expect("valid R3 site");
    let mpos = g.num_positions();
    let moved = |p: usize| {
        for &e in edges {
            if p == e {
                return (e + 1) % mpos;
            }
            if p == (e + 1) % mpos {
                return e;
            }
        }
        p
    };
    let arrows = g.arrows();
    let image = |a: usize| g2.arrow_index_at(moved(arrows[a].tail));
    let mut out = Series::new();
    for mask in 0u8..8 {
        if mask.count_ones() < 2 {
            continue;
        }
        let drop: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 0).map(|i| tri[i]).collect();
        let drop2: Vec<usize> = drop.iter().map(|&a| image(a)).collect();
        out.add_term(without(grp, g, &drop), q(1));
        out.add_term(without(grp, &g2, &drop2), q(-1));
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Family {
    P1,
    P2,
    P3,
    W,
    /// Degree-n part of P2 relators of degree n+1: one arrow with both writhes.
    P2Single,
    /// Degree-n part of P2 relators of degree n: the pair itself.
    P2Pair,
    G6T,
    G2T,
    AP1,
    AP2Pair,
    A6T,
    A2T,
    AW,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::P1,
        Family::P2,
        Family::P3,
        Family::W,
        Family::P2Single,
        Family::P2Pair,
        Family::G6T,
        Family::G2T,
        Family::AP1,
        Family::AP2Pair,
        Family::A6T,
        Family::A2T,
        Family::AW,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::P1 => "P1",
            Family::P2 => "P2",
            Family::P3 => "P3",
            Family::W => "W",
            Family::P2Single => "P2^(n-1),1",
            Family::P2Pair => "P2^(n-2),2",
            Family::G6T => "G6T",
            Family::G2T => "G2T",
            Family::AP1 => "AP1",
            Family::AP2Pair => "AP2^(n-2),2",
            Family::A6T => "A6T",
            Family::A2T => "A2T",
            Family::AW => "AW",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        let t = s.trim();
        let alias = match t {
            "P2n1" | "P2^{(n-1),1}" => Some(Family::P2Single),
            "P2n2" | "P2^{(n-2),2}" => Some(Family::P2Pair),
            "AP2" | "AP2n2" | "AP2^{(n-2),2}" => Some(Family::AP2Pair),
            "8T" => Some(Family::P3),
            _ => None,
        };
        alias
            .or_else(|| Family::ALL.iter().copied().find(|f| f.name() == t))
            .ok_or_else(|| crate::error::Error::Parse(format!("unknown relation family `{t}`")))
    }

    /// The Gauss family whose image under T this arrow family is.
    pub fn gauss_source(&self) -> Option<Family> {
        match self {
            Family::AP1 => Some(Family::P1),
            Family::AP2Pair => Some(Family::P2Pair),
            Family::A6T => Some(Family::G6T),
            Family::A2T => Some(Family::G2T),
            Family::AW => Some(Family::W),
            _ => None,
        }
    }
}

/// Drops zero relators and repeated lines, keeping the first occurrence.
pub fn dedup_lines(rels: Vec<Series<Diagram>>) -> Vec<Series<Diagram>> {
    let mut seen = BTreeSet::new();
    let mut out = vec![];
    for r in rels {
        if r.is_empty() {
            continue;
        }
        if seen.insert(r.normalized()) {
            out.push(r);
        }
    }
    out
}

/// Relators of a family in degree `n`, with decorations from `ball(radius)`.
pub fn gen_relations(grp: &WeightedGroup, family: Family, n: usize, radius: usize) -> Vec<Series<Diagram>> {
    let dec = grp.ball(radius);
    let rels: Vec<Series<Diagram>> = match family {
        Family::P1 => decorated_sites(grp, n, &dec, MoveKind::R1Minus).iter().map(|(g, _)| Series::single(g.canonical(grp))).collect(),
        Family::P2 => decorated_sites(grp, n, &dec, MoveKind::R2Minus).iter().map(|(g, m)| p2_relator(grp, g, m)).collect(),
        Family::P3 => decorated_sites(grp, n, &dec, MoveKind::R3).iter().map(|(g, m)| p3_relator(grp, g, m)).collect(),
        Family::W => {
            let mut v = vec![];
            for g in all_diagrams(grp, n, &dec, true) {
                for m in enumerate_moves(grp, &g, radius, &[MoveKind::W]) {
                    let h = apply(grp, &g, &m).unwrap().canonical(grp);
                    v.push(Series::from_terms([(g.clone(), q(1)), (h, q(-1))]));
                }
            }
            v
        }
        Family::P2Single => {
            decorated_sites(grp, n + 1, &dec, MoveKind::R2Minus).iter().map(|(g, m)| p2_relator(grp, g, m).homogeneous(n)).collect()
        }
        Family::P2Pair => {
            decorated_sites(grp, n, &dec, MoveKind::R2Minus).iter().map(|(g, m)| p2_relator(grp, g, m).homogeneous(n)).collect()
        }
        Family::G6T => decorated_sites(grp, n + 1, &dec, MoveKind::R3).iter().map(|(g, m)| p3_relator(grp, g, m).homogeneous(n)).collect(),
        Family::G2T => decorated_sites(grp, n, &dec, MoveKind::R3).iter().map(|(g, m)| p3_relator(grp, g, m).homogeneous(n)).collect(),
        arrow => {
            let src = arrow.gauss_source().unwrap();
            gen_relations(grp, src, n, radius).iter().map(|r| arrow_t(grp, r)).collect()
        }
    };
    dedup_lines(rels)
}

/// G + (G with one writhe flipped), built directly on degree-n diagrams.
pub fn p2_single_direct(grp: &WeightedGroup, n: usize, radius: usize) -> Vec<Series<Diagram>> {
    let mut v = vec![];
    for g in all_diagrams(grp, n, &grp.ball(radius), true) {
        let w: Vec<i8> = g.arrows().iter().map(|a| a.writhe).collect();
        for i in 0..n {
            let mut w2 = w.clone();
            w2[i] = -w2[i];
            v.push(Series::from_terms([(g.clone(), q(1)), (g.with_writhes(&w2).canonical(grp), q(1))]));
        }
    }
    dedup_lines(v)
}

/// Outcome of comparing I(Span R_i) with Span P_i in degrees ≤ N.
#[derive(Clone, Debug)]
pub struct IsoReport {
    pub family: &'static str,
    pub rank_moves: usize,
    pub rank_polyak: usize,
    pub forward: bool,
    pub backward: bool,
}

impl IsoReport {
    pub fn ok(&self) -> bool {
        self.forward && self.backward && self.rank_moves == self.rank_polyak
    }
}

fn move_relators(grp: &WeightedGroup, kind: MoveKind, max_degree: usize, dec: &[Elem]) -> Vec<Series<Diagram>> {
    let mut v = vec![];
    for n in 1..=max_degree {
        for (g, m) in decorated_sites(grp, n, dec, kind) {
            let h = apply(grp, &g, &m).unwrap().canonical(grp);
            v.push(Series::from_terms([(g.canonical(grp), q(1)), (h, q(-1))]));
        }
    }
    dedup_lines(v)
}

fn iso_check(grp: &WeightedGroup, name: &'static str, moves: &[Series<Diagram>], polyak: &[Series<Diagram>]) -> IsoReport {
    let mut sp = SpanSolver::new(false);
    for p in polyak {
        sp.add(p.iter());
    }
    let mut sr = SpanSolver::new(false);
    for r in moves {
        sr.add(r.iter());
    }
    let forward = moves.iter().all(|r| sp.contains(i_map(grp, r).iter()));
    let backward = polyak.iter().all(|p| sr.contains(i_inv(grp, p).iter()));
    IsoReport { family: name, rank_moves: sr.rank(), rank_polyak: sp.rank(), forward, backward }
}

/// Checks that I maps the span of R_i relators onto the span of P_i
/// relators, for i = 1, 2, 3, and the W span onto itself.
pub fn polyak_isomorphism(grp: &WeightedGroup, max_degree: usize, radius: usize) -> Vec<IsoReport> {
    let dec = grp.ball(radius);
    let collect = |f: Family| -> Vec<Series<Diagram>> { (0..=max_degree).flat_map(|n| gen_relations(grp, f, n, radius)).collect() };
    let mut w_moves = vec![];
    for n in 1..=max_degree {
        w_moves.extend(gen_relations(grp, Family::W, n, radius));
    }
    let _ = &dec;
    vec![
        iso_check(grp, "P1", &move_relators(grp, MoveKind::R1Minus, max_degree, &dec), &collect(Family::P1)),
        iso_check(grp, "P2", &move_relators(grp, MoveKind::R2Minus, max_degree, &dec), &collect(Family::P2)),
        iso_check(grp, "P3", &move_relators(grp, MoveKind::R3, max_degree, &dec), &collect(Family::P3)),
        iso_check(grp, "W", &w_moves, &w_moves),
    ]
}
