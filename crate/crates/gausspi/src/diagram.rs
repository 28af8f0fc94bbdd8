//! Rigid and canonical Gauss diagrams decorated by a group.
//!
//! Positions 0..2n sit on an oriented circle; edge `j` runs from position `j`
//! to position `j+1 mod 2n`. Each position stores whether it is a head, the
//! offset to its partner and the writhe of its arrow (0 once writhes are
//! forgotten). Storing offsets makes a rotation a plain rotation of vectors.

use crate::error::{domain_err, Error, Result};
use crate::group::{Elem, WeightedGroup};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct End {
    pub head: bool,
    pub off: u32,
    pub writhe: i8,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Arrow {
    pub tail: usize,
    pub head: usize,
    pub writhe: i8,
}

/// A Gauss diagram. Field order gives the canonical comparison: degree, then
/// the per-position tokens, then the edge decorations. Degree-0 diagrams have
/// a single edge holding the class representative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Diagram {
    n: usize,
    ends: Vec<End>,
    edges: Vec<Elem>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EdgeSigns {
    pub eta: i8,
    pub up: u8,
    pub wprod: i8,
    pub eps: i8,
}

/// True if the chords {a0,a1} and {b0,b1} cross.
pub fn chords_cross(a0: usize, a1: usize, b0: usize, b1: usize) -> bool {
    let (lo, hi) = if a0 < a1 { (a0, a1) } else { (a1, a0) };
    let inside = |x: usize| lo < x && x < hi;
    inside(b0) != inside(b1)
}

impl Diagram {
    pub fn from_arrows(arrows: &[Arrow], edges: Vec<Elem>) -> Result<Diagram> {
        let n = arrows.len();
        if n == 0 {
            if edges.len() != 1 {
                return domain_err("a degree-0 diagram carries exactly one class");
            }
            return Ok(Diagram { n, ends: vec![], edges });
        }
        let m = 2 * n;
        if edges.len() != m {
            return domain_err(format!("expected {m} edge decorations, got {}", edges.len()));
        }
        let mut ends: Vec<Option<End>> = vec![None; m];
        for a in arrows {
            if a.tail >= m || a.head >= m || a.tail == a.head {
                return domain_err(format!("arrow {}->{} out of range", a.tail, a.head));
            }
            if !(-1..=1).contains(&a.writhe) {
                return domain_err("writhe must be +1, -1 or 0");
            }
            for (p, q, head) in [(a.tail, a.head, false), (a.head, a.tail, true)] {
                if ends[p].is_some() {
                    return domain_err(format!("position {p} used twice"));
                }
                ends[p] = Some(End { head, off: ((q + m - p) % m) as u32, writhe: a.writhe });
            }
        }
        Ok(Diagram { n, ends: ends.into_iter().map(|e| e.unwrap()).collect(), edges })
    }

    /// Degree-0 diagram carrying the conjugacy class of `g`.
    pub fn circle(grp: &WeightedGroup, g: &Elem) -> Diagram {
        Diagram { n: 0, ends: vec![], edges: vec![grp.conj_class(g)] }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn num_positions(&self) -> usize {
        self.ends.len()
    }

    pub fn ends(&self) -> &[End] {
        &self.ends
    }

    pub fn edges(&self) -> &[Elem] {
        &self.edges
    }

    pub fn edge(&self, j: usize) -> &Elem {
        &self.edges[j]
    }

    /// Class of a degree-0 diagram.
    pub fn class(&self) -> Option<&Elem> {
        if self.n == 0 {
            Some(&self.edges[0])
        } else {
            None
        }
    }

    pub fn partner(&self, p: usize) -> usize {
        (p + self.ends[p].off as usize) % self.ends.len()
    }

    pub fn is_head(&self, p: usize) -> bool {
        self.ends[p].head
    }

    pub fn writhe_at(&self, p: usize) -> i8 {
        self.ends[p].writhe
    }

    pub fn next(&self, p: usize) -> usize {
        (p + 1) % self.ends.len()
    }

    pub fn prev(&self, p: usize) -> usize {
        (p + self.ends.len() - 1) % self.ends.len()
    }

    /// Arrows ordered by tail position; this order defines arrow indices.
    pub fn arrows(&self) -> Vec<Arrow> {
        (0..self.ends.len())
            .filter(|&p| !self.ends[p].head)
            .map(|p| Arrow { tail: p, head: self.partner(p), writhe: self.ends[p].writhe })
            .collect()
    }

    /// Index of the arrow having an endpoint at `p`.
    pub fn arrow_index_at(&self, p: usize) -> usize {
        let t = if self.ends[p].head { self.partner(p) } else { p };
        self.ends[..t].iter().filter(|e| !e.head).count()
    }

    pub fn rotate_left(&self, r: usize) -> Diagram {
        if self.n == 0 {
            return self.clone();
        }
        let r = r % self.ends.len();
        let mut ends = self.ends.clone();
        ends.rotate_left(r);
        let mut edges = self.edges.clone();
        edges.rotate_left(r);
        Diagram { n: self.n, ends, edges }
    }

    /// Minimal rotation and the shift achieving it; position p of `self`
    /// becomes position (p - r) mod 2n of the result.
    pub fn canonical_with_shift(&self) -> (Diagram, usize) {
        let m = self.ends.len();
        if m == 0 {
            return (self.clone(), 0);
        }
        let mut best = 0;
        for r in 1..m {
            if self.cmp_rotations(r, best) == std::cmp::Ordering::Less {
                best = r;
            }
        }
        (self.rotate_left(best), best)
    }

    fn cmp_rotations(&self, r: usize, s: usize) -> std::cmp::Ordering {
        let m = self.ends.len();
        for i in 0..m {
            let c = self.ends[(i + r) % m].cmp(&self.ends[(i + s) % m]);
            if c.is_ne() {
                return c;
            }
        }
        for i in 0..m {
            let c = self.edges[(i + r) % m].cmp(&self.edges[(i + s) % m]);
            if c.is_ne() {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    }

    /// Canonical representative. The group is used for degree 0 only, to
    /// normalize the class.
    pub fn canonical(&self, grp: &WeightedGroup) -> Diagram {
        if self.n == 0 {
            return Diagram::circle(grp, &self.edges[0]);
        }
        self.canonical_with_shift().0
    }

    pub fn is_canonical(&self) -> bool {
        (1..self.ends.len()).all(|r| self.cmp_rotations(r, 0).is_ge())
    }

    pub fn aut_order(&self) -> usize {
        if self.n == 0 {
            return 1;
        }
        (0..self.ends.len()).filter(|&r| self.cmp_rotations(r, 0).is_eq()).count()
    }

    pub fn sign(&self) -> i8 {
        self.ends.iter().filter(|e| !e.head).map(|e| if e.writhe == -1 { -1 } else { 1 }).product()
    }

    pub fn total_writhe(&self) -> i64 {
        self.ends.iter().filter(|e| !e.head).map(|e| e.writhe as i64).sum()
    }

    pub fn is_arrow_diagram(&self) -> bool {
        self.ends.iter().all(|e| e.writhe == 0)
    }

    /// Erase writhes (rigid; positions unchanged).
    pub fn erase_writhes(&self) -> Diagram {
        let mut d = self.clone();
        for e in d.ends.iter_mut() {
            e.writhe = 0;
        }
        d
    }

    pub fn forget_signs(&self) -> Diagram {
        self.erase_writhes().canonical_with_shift().0
    }

    /// Erase edge decorations (rigid): they become elements of the trivial group.
    pub fn erase_decorations(&self) -> Diagram {
        let mut d = self.clone();
        for x in d.edges.iter_mut() {
            *x = Elem::default();
        }
        d
    }

    pub fn naked(&self) -> Diagram {
        self.erase_writhes().erase_decorations().canonical_with_shift().0
    }

    pub fn with_writhes(&self, w: &[i8]) -> Diagram {
        let mut d = self.clone();
        let arrows = self.arrows();
        for (a, &s) in arrows.iter().zip(w) {
            d.ends[a.tail].writhe = s;
            d.ends[a.head].writhe = s;
        }
        d
    }

    pub fn with_edges(&self, edges: Vec<Elem>) -> Diagram {
        assert_eq!(edges.len(), self.edges.len());
        Diagram { n: self.n, ends: self.ends.clone(), edges }
    }

    /// Reverse every arrow (rigid).
    pub fn reverse_all(&self) -> Diagram {
        let mut d = self.clone();
        for e in d.ends.iter_mut() {
            e.head = !e.head;
        }
        d
    }

    /// Edge between positions `e` and `e+1`: crossing sign, number of heads,
    /// writhe product and epsilon.
    pub fn edge_signs(&self, e: usize) -> Result<EdgeSigns> {
        let m = self.ends.len();
        if m == 0 || e >= m {
            return domain_err("edge index out of range");
        }
        let p = e;
        let q = self.next(e);
        if self.partner(p) == q {
            return domain_err(format!("edge {e} is bounded twice by the same arrow"));
        }
        let cross = chords_cross(p, self.partner(p), q, self.partner(q));
        let eta = if cross { 1 } else { -1 };
        let up = self.ends[p].head as u8 + self.ends[q].head as u8;
        let wprod = self.ends[p].writhe * self.ends[q].writhe;
        let eps = if up.is_multiple_of(2) { eta } else { -eta };
        Ok(EdgeSigns { eta, up, wprod, eps })
    }

    /// Keep the arrows flagged in `keep` (indexed as in `arrows()`), merging
    /// edges by circle-ordered products. The result is rigid; its position i
    /// is the i-th kept position of `self`. Also returns that position list.
    pub fn sub_rigid(&self, grp: &WeightedGroup, keep: &[bool]) -> (Diagram, Vec<usize>) {
        let m = self.ends.len();
        if m == 0 {
            return (self.clone(), vec![]);
        }
        let arrows = self.arrows();
        let mut kept_pos = vec![false; m];
        for (a, &k) in arrows.iter().zip(keep) {
            if k {
                kept_pos[a.tail] = true;
                kept_pos[a.head] = true;
            }
        }
        let kept: Vec<usize> = (0..m).filter(|&p| kept_pos[p]).collect();
        if kept.is_empty() {
            let total = grp.product(self.edges.iter());
            return (Diagram { n: 0, ends: vec![], edges: vec![total] }, kept);
        }
        let k = kept.len();
        let mut new_index = vec![usize::MAX; m];
        for (i, &p) in kept.iter().enumerate() {
            new_index[p] = i;
        }
        let mut ends = Vec::with_capacity(k);
        let mut edges = Vec::with_capacity(k);
        for (i, &p) in kept.iter().enumerate() {
            let q = new_index[self.partner(p)];
            ends.push(End { head: self.ends[p].head, off: ((q + k - i) % k) as u32, writhe: self.ends[p].writhe });
            let stop = kept[(i + 1) % k];
            let mut acc = self.edges[p].clone();
            let mut j = (p + 1) % m;
            while j != stop {
                acc = grp.mul(&acc, &self.edges[j]);
                j = (j + 1) % m;
            }
            edges.push(acc);
        }
        (Diagram { n: k / 2, ends, edges }, kept)
    }

    pub fn remove_arrows(&self, grp: &WeightedGroup, keep: &[bool]) -> Diagram {
        self.sub_rigid(grp, keep).0.canonical(grp)
    }

    /// Subdiagram given by a bit mask over arrow indices.
    pub fn sub_mask(&self, grp: &WeightedGroup, mask: u64) -> Diagram {
        let keep: Vec<bool> = (0..self.n).map(|i| mask >> i & 1 == 1).collect();
        self.remove_arrows(grp, &keep)
    }

    /// Degree-0 class of the whole circle.
    pub fn total_class(&self, grp: &WeightedGroup) -> Elem {
        grp.conj_class(&grp.product(self.edges.iter()))
    }

    /// Circle-ordered product of the edges from position `p` to position `q`.
    pub fn path_product(&self, grp: &WeightedGroup, p: usize, q: usize) -> Elem {
        let m = self.ends.len();
        let mut acc = grp.identity();
        let mut j = p;
        while j != q {
            acc = grp.mul(&acc, &self.edges[j]);
            j = (j + 1) % m;
        }
        acc
    }

    /// True if no two arrows cross.
    pub fn is_planar(&self) -> bool {
        let a = self.arrows();
        a.iter().enumerate().all(|(i, x)| a[i + 1..].iter().all(|y| !chords_cross(x.tail, x.head, y.tail, y.head)))
    }

    pub fn check(&self, grp: &WeightedGroup) -> Result<()> {
        if self.edges.iter().any(|g| !grp.validate(g)) {
            return Err(Error::Domain(format!("decoration not in {}", grp.spec())));
        }
        Ok(())
    }
}

/// Abelian Gauss diagram: a classical signed diagram with one group element
/// per arrow (its fundamental loop value) and a global marking.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AbelianDiagram {
    ends: Vec<End>,
    marks: Vec<Elem>,
    global: Elem,
}

impl AbelianDiagram {
    /// `marks` are indexed as the arrows of `classical`.
    pub fn new(classical: &Diagram, marks: Vec<Elem>, global: Elem) -> AbelianDiagram {
        let m = classical.num_positions();
        let mut pos_marks = vec![Elem::default(); m];
        for (a, g) in classical.arrows().iter().zip(marks) {
            pos_marks[a.tail] = g;
        }
        let d = AbelianDiagram { ends: classical.ends.clone(), marks: pos_marks, global };
        d.canonical()
    }

    fn canonical(&self) -> AbelianDiagram {
        let m = self.ends.len();
        (0..m.max(1))
            .map(|r| {
                let mut d = self.clone();
                if m > 0 {
                    d.ends.rotate_left(r);
                    d.marks.rotate_left(r);
                }
                d
            })
            .min()
            .unwrap()
    }

    /// Underlying classical diagram with trivial edge decorations.
    pub fn classical(&self) -> Diagram {
        let m = self.ends.len();
        let edges = if m == 0 { vec![Elem::default()] } else { vec![Elem::default(); m] };
        Diagram { n: m / 2, ends: self.ends.clone(), edges }
    }

    pub fn marks(&self) -> Vec<Elem> {
        let c = self.classical();
        c.arrows().iter().map(|a| self.marks[a.tail].clone()).collect()
    }

    pub fn global(&self) -> &Elem {
        &self.global
    }

    pub fn degree(&self) -> usize {
        self.ends.len() / 2
    }

    pub fn aut_order(&self) -> usize {
        let m = self.ends.len();
        if m == 0 {
            return 1;
        }
        (0..m).filter(|&r| (0..m).all(|i| self.ends[(i + r) % m] == self.ends[i] && self.marks[(i + r) % m] == self.marks[i])).count()
    }
}

pub fn abelianize(grp: &WeightedGroup, g: &Diagram) -> Result<AbelianDiagram> {
    if !grp.is_abelian() {
        return domain_err("abelianization needs an abelian group");
    }
    let m = g.num_positions();
    let global = grp.product(g.edges().iter());
    let marks = g.arrows().iter().map(|a| if m == 0 { grp.identity() } else { g.path_product(grp, a.head, a.tail) }).collect();
    let classical = g.erase_decorations();
    let mut d = AbelianDiagram::new(&classical, marks, global);
    if m == 0 {
        d.global = grp.product(g.edges().iter());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_diagram;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z() -> WeightedGroup {
        WeightedGroup::integers()
    }

    fn e(v: i64) -> Elem {
        Elem::from_slice(&[v])
    }

    #[test]
    fn canonical_degree_one() {
        let g = z();
        let d = Diagram::from_arrows(&[Arrow { tail: 0, head: 1, writhe: 1 }], vec![e(2), e(3)]).unwrap();
        let r = d.rotate_left(1);
        assert_eq!(r.arrows()[0].tail, 1);
        assert_eq!(r.edges(), &[e(3), e(2)]);
        assert_eq!(d.canonical(&g), r.canonical(&g));
        assert_eq!(d.canonical(&g), std::cmp::min(d.clone(), r));
        assert_eq!(d.aut_order(), 1);
    }

    #[test]
    fn aut_examples() {
        let d =
            Diagram::from_arrows(&[Arrow { tail: 0, head: 1, writhe: 1 }, Arrow { tail: 2, head: 3, writhe: 1 }], vec![e(1); 4]).unwrap();
        assert_eq!(d.aut_order(), 2);
        assert_eq!(Diagram::circle(&z(), &e(4)).aut_order(), 1);
    }

    #[test]
    fn edge_sign_examples() {
        let d =
            Diagram::from_arrows(&[Arrow { tail: 0, head: 2, writhe: 1 }, Arrow { tail: 1, head: 3, writhe: -1 }], vec![e(0); 4]).unwrap();
        let s = d.edge_signs(0).unwrap();
        assert_eq!((s.eta, s.up, s.eps, s.wprod), (1, 0, 1, -1));
        let d =
            Diagram::from_arrows(&[Arrow { tail: 0, head: 1, writhe: 1 }, Arrow { tail: 2, head: 3, writhe: 1 }], vec![e(0); 4]).unwrap();
        let s = d.edge_signs(1).unwrap();
        assert_eq!((s.eta, s.up, s.eps), (-1, 1, 1));
        assert!(d.edge_signs(0).is_err());
    }

    #[test]
    fn remove_all_arrows_degree_one() {
        let g = z();
        let d = Diagram::from_arrows(&[Arrow { tail: 0, head: 1, writhe: 1 }], vec![e(2), e(5)]).unwrap();
        assert_eq!(d.remove_arrows(&g, &[false]), Diagram::circle(&g, &e(7)));
        assert_eq!(d.remove_arrows(&g, &[true]), d.canonical(&g));
    }

    #[test]
    fn remove_matches_path_walk() {
        let g = WeightedGroup::free(2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let d = random_diagram(&mut rng, &g, 2, 2, true);
            let arrows = d.arrows();
            for drop in 0..2 {
                let keep: Vec<bool> = (0..2).map(|i| i != drop).collect();
                let r = d.remove_arrows(&g, &keep);
                // walk the circle from the kept tail
                let a = arrows[1 - drop];
                let b = arrows[drop];
                let mut words = vec![];
                for start in [a.tail, a.head] {
                    let mut w = vec![];
                    let mut p = start;
                    loop {
                        w.extend(d.edge(p).0.iter().copied());
                        p = (p + 1) % 4;
                        if p == a.tail || p == a.head {
                            break;
                        }
                        assert!(p == b.tail || p == b.head);
                    }
                    words.push(g.product([Elem::from_slice(&w)].iter()));
                }
                let expected = Diagram::from_arrows(&[Arrow { tail: 0, head: 1, writhe: a.writhe }], words).unwrap().canonical(&g);
                assert_eq!(r, expected);
            }
        }
    }

    #[test]
    fn abelianize_loops() {
        let g = z();
        let d = Diagram::from_arrows(
            &[Arrow { tail: 0, head: 2, writhe: 1 }, Arrow { tail: 3, head: 1, writhe: 1 }],
            vec![e(1), e(2), e(3), e(4)],
        )
        .unwrap();
        let ab = abelianize(&g, &d).unwrap();
        // arrow 0 -> 2 returns along edges 2, 3; arrow 3 -> 1 along edges 1, 2
        let mut marks = ab.marks();
        marks.sort();
        assert_eq!(marks, vec![e(5), e(7)]);
        assert_eq!(ab.global(), &e(10));
        let zero = d.with_edges(vec![e(0); 4]);
        assert!(abelianize(&g, &zero).unwrap().marks().iter().all(|m| *m == e(0)));
        assert!(abelianize(&WeightedGroup::free(2), &d).is_err());
    }

    #[test]
    fn sign_and_forget() {
        let d = Diagram::from_arrows(
            &[Arrow { tail: 0, head: 2, writhe: 1 }, Arrow { tail: 3, head: 1, writhe: -1 }],
            vec![e(1), e(2), e(3), e(4)],
        )
        .unwrap();
        assert_eq!(d.sign(), -1);
        for r in 0..4 {
            assert_eq!(d.rotate_left(r).forget_signs(), d.forget_signs());
        }
        assert_eq!(Diagram::circle(&z(), &e(3)).sign(), 1);
    }

    #[test]
    fn random_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for grp in [WeightedGroup::free(2), WeightedGroup::cyclic(2), WeightedGroup::integers()] {
            for _ in 0..150 {
                let n = rand::Rng::gen_range(&mut rng, 0..=5);
                let d = random_diagram(&mut rng, &grp, n, 1, true);
                let c = d.canonical(&grp);
                assert_eq!(c.canonical(&grp), c);
                assert!(c.is_canonical());
                for r in 0..d.num_positions() {
                    assert_eq!(d.rotate_left(r).canonical(&grp), c);
                }
                let a = c.aut_order();
                assert_eq!(c.num_positions().max(1) % a, 0);
                assert_eq!(c.forget_signs().aut_order() % a, 0);
                // nested removal
                let s: Vec<bool> = (0..n).map(|_| rand::Rng::gen_bool(&mut rng, 0.6)).collect();
                let t: Vec<bool> = (0..n).map(|_| rand::Rng::gen_bool(&mut rng, 0.6)).collect();
                let (sub, _) = d.sub_rigid(&grp, &s);
                let t_on_sub: Vec<bool> = (0..n).filter(|&i| s[i]).map(|i| t[i]).collect();
                let both: Vec<bool> = s.iter().zip(&t).map(|(x, y)| *x && *y).collect();
                assert_eq!(sub.remove_arrows(&grp, &t_on_sub), d.remove_arrows(&grp, &both));
                // edge signs from raw positions
                for j in 0..d.num_positions() {
                    let p = j;
                    let q = (j + 1) % d.num_positions();
                    let arrows = d.arrows();
                    let ap = arrows.iter().find(|x| x.tail == p || x.head == p).unwrap();
                    let aq = arrows.iter().find(|x| x.tail == q || x.head == q).unwrap();
                    match d.edge_signs(j) {
                        Err(_) => assert_eq!(ap, aq),
                        Ok(sg) => {
                            let between = |x: usize, lo: usize, hi: usize| {
                                let (lo, hi) = (lo.min(hi), lo.max(hi));
                                lo < x && x < hi
                            };
                            let cross = between(aq.tail, ap.tail, ap.head) ^ between(aq.head, ap.tail, ap.head);
                            assert_eq!(sg.eta == 1, cross);
                            let heads = (ap.head == p) as u8 + (aq.head == q) as u8;
                            assert_eq!(sg.up, heads);
                            assert_eq!(sg.wprod, ap.writhe * aq.writhe);
                            assert_eq!(sg.eps, sg.eta * if heads.is_multiple_of(2) { 1 } else { -1 });
                        }
                    }
                }
            }
        }
    }
}
