//! Evaluation of diagram formulas on Gauss diagrams.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::diagram::{Arrow, Diagram};
use crate::error::{domain_err, Result};
use crate::group::{Elem, WeightedGroup};
use crate::linalg::Q;
use crate::series::{all_diagrams, q, Series};
use rand::seq::SliceRandom;
use rand::Rng;

/// ⟨x, I(G)⟩ for a Gauss series `x`.
pub fn eval_nu(grp: &WeightedGroup, x: &Series<Diagram>, g: &Diagram) -> Q {
    let n = g.degree();
    let mut acc = Q::zero();
    for mask in 0u64..1 << n {
        let s = g.sub_mask(grp, mask);
        let c = x.get(&s);
        if !c.is_zero() {
            acc += c * q(s.aut_order() as i64);
        }
    }
    acc
}

/// ⟨S(a), I(G)⟩ for an arrow series `a`, computed as ⟨a, T(I(G))⟩.
pub fn eval_arrow(grp: &WeightedGroup, a: &Series<Diagram>, g: &Diagram) -> Q {
    let n = g.degree();
    let mut acc = Q::zero();
    for mask in 0u64..1 << n {
        let s = g.sub_mask(grp, mask);
        let b = s.erase_writhes().canonical(grp);
        let c = a.get(&b);
        if !c.is_zero() {
            acc += c * q(b.aut_order() as i64) * q(s.sign() as i64);
        }
    }
    acc
}

/// Region of each edge of a planar diagram; regions are numbered by their
/// least edge. Following an edge to its end, across the chord and on along
/// the circle walks the boundary of one region.
pub fn regions(d: &Diagram) -> Result<Vec<usize>> {
    if !d.is_planar() {
        return domain_err("regions need a planar diagram (no two arrows cross)");
    }
    let m = d.num_positions();
    if m == 0 {
        return Ok(vec![0]);
    }
    let mut region = vec![usize::MAX; m];
    let mut count = 0;
    for e in 0..m {
        if region[e] != usize::MAX {
            continue;
        }
        let mut f = e;
        while region[f] == usize::MAX {
            region[f] = count;
            f = d.partner(d.next(f));
        }
        count += 1;
    }
    Ok(region)
}

/// Regions to the left and to the right of an arrow, with the circle drawn
/// counterclockwise and the arrows as chords inside the disk.
pub fn sides(region: &[usize], a: &Arrow) -> (usize, usize) {
    (region[a.head], region[a.tail])
}

/// A planar naked arrow diagram with a label on every region, stored per edge.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Labelled<L> {
    shape: Diagram,
    labels: Vec<L>,
}

pub type ChainPresentation = Labelled<u32>;
pub type H1Diagram = Labelled<Elem>;

impl<L: Clone + Ord> Labelled<L> {
    /// `shape` is made naked; `per_region[i]` labels region `i`.
    pub fn new(shape: &Diagram, per_region: &[L]) -> Result<Labelled<L>> {
        let shape = shape.erase_writhes().erase_decorations();
        let region = regions(&shape)?;
        if per_region.len() != shape.degree() + 1 {
            return domain_err(format!("expected {} region labels", shape.degree() + 1));
        }
        Ok(Labelled { labels: region.iter().map(|&r| per_region[r].clone()).collect(), shape })
    }

    pub fn shape(&self) -> &Diagram {
        &self.shape
    }

    /// Label of each region, in region order.
    pub fn region_labels(&self) -> Vec<L> {
        let region = regions(&self.shape).expect("planar by construction");
        let mut out: Vec<Option<L>> = vec![None; self.shape.degree() + 1];
        for (e, &r) in region.iter().enumerate() {
            out[r].get_or_insert_with(|| self.labels[e].clone());
        }
        out.into_iter().map(|x| x.unwrap()).collect()
    }

    fn rotate_left(&self, r: usize) -> Labelled<L> {
        let mut labels = self.labels.clone();
        let len = labels.len();
        if self.shape.degree() > 0 {
            labels.rotate_left(r % len);
        }
        Labelled { shape: self.shape.rotate_left(r), labels }
    }

    fn rotations(&self) -> usize {
        self.shape.num_positions().max(1)
    }

    pub fn canonical(&self) -> Labelled<L> {
        (0..self.rotations()).map(|r| self.rotate_left(r)).min().unwrap()
    }

    /// Number of rotations fixing the labelled diagram.
    pub fn stabilizer_order(&self) -> usize {
        (0..self.rotations()).filter(|&r| self.rotate_left(r) == *self).count()
    }
}

/// All rigid planar naked arrow diagrams of degree `n`.
pub fn planar_shapes(n: usize) -> Vec<Diagram> {
    fn matchings(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
        if lo >= hi {
            return vec![vec![]];
        }
        let mut out = vec![];
        for j in (lo + 1..hi).step_by(2) {
            for inner in matchings(lo + 1, j) {
                for outer in matchings(j + 1, hi) {
                    let mut v = vec![(lo, j)];
                    v.extend(inner.iter().copied());
                    v.extend(outer.iter().copied());
                    out.push(v);
                }
            }
        }
        out
    }
    if n == 0 {
        return vec![Diagram::from_arrows(&[], vec![Elem::default()]).unwrap()];
    }
    let mut out = vec![];
    for mt in matchings(0, 2 * n) {
        for flips in 0u32..1 << n {
            let arrows: Vec<Arrow> = mt
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| {
                    let (tail, head) = if flips >> i & 1 == 1 { (b, a) } else { (a, b) };
                    Arrow { tail, head, writhe: 0 }
                })
                .collect();
            out.push(Diagram::from_arrows(&arrows, vec![Elem::default(); 2 * n]).unwrap());
        }
    }
    out
}

/// Numberings 1..=n+1 of the regions of a rigid planar diagram increasing
/// from the left to the right of every arrow; `out[r]` numbers region r.
pub fn chain_numberings(shape: &Diagram) -> Result<Vec<Vec<u32>>> {
    let region = regions(shape)?;
    let k = shape.degree() + 1;
    let mut below: Vec<Vec<usize>> = vec![vec![]; k];
    for a in shape.arrows() {
        let (l, r) = sides(&region, &a);
        below[r].push(l);
    }
    let mut out = vec![];
    let mut number = vec![0u32; k];
    fn rec(below: &[Vec<usize>], number: &mut [u32], next: u32, out: &mut Vec<Vec<u32>>) {
        let k = number.len();
        if next as usize > k {
            out.push(number.to_vec());
            return;
        }
        for r in 0..k {
            if number[r] == 0 && below[r].iter().all(|&l| number[l] != 0) {
                number[r] = next;
                rec(below, number, next + 1, out);
                number[r] = 0;
            }
        }
    }
    rec(&below, &mut number, 1, &mut out);
    Ok(out)
}

/// The universal planar chain of degree `n`: every chain presentation up to
/// rotation, each with coefficient 1.
pub fn gv_universal(n: usize) -> Vec<ChainPresentation> {
    let mut out = std::collections::BTreeSet::new();
    for s in planar_shapes(n) {
        for num in chain_numberings(&s).unwrap() {
            out.insert(Labelled::new(&s, &num).unwrap().canonical());
        }
    }
    out.into_iter().collect()
}

/// Region classes of a planar diagram on π: the conjugacy class of the
/// circle-ordered product of the markings along the region boundary.
pub fn h1_decorate(grp: &WeightedGroup, d: &Diagram) -> Result<H1Diagram> {
    let region = regions(d)?;
    let mut prod = vec![None; d.degree() + 1];
    if d.degree() == 0 {
        prod[0] = Some(d.edge(0).clone());
    } else {
        for (e, &r) in region.iter().enumerate() {
            if prod[r].is_some() {
                continue;
            }
            let mut acc = grp.identity();
            let mut f = e;
            loop {
                acc = grp.mul(&acc, d.edge(f));
                f = d.partner(d.next(f));
                if f == e {
                    break;
                }
            }
            prod[r] = Some(acc);
        }
    }
    let classes: Vec<Elem> = prod.into_iter().map(|g| grp.conj_class(&g.unwrap())).collect();
    Labelled::new(d, &classes)
}

/// Decorates region `r` of a chain presentation by `gamma[number(r) - 1]`.
pub fn gamma_decorate(grp: &WeightedGroup, cp: &ChainPresentation, gamma: &[Elem]) -> Result<H1Diagram> {
    let gamma = gamma_classes(grp, cp.shape.degree(), gamma)?;
    let labels = cp.region_labels().iter().map(|&i| gamma[i as usize - 1].clone()).collect::<Vec<_>>();
    Labelled::new(&cp.shape, &labels)
}

fn gamma_classes(grp: &WeightedGroup, n: usize, gamma: &[Elem]) -> Result<Vec<Elem>> {
    if gamma.len() != n + 1 {
        return domain_err(format!("a degree-{n} chain needs {} classes, got {}", n + 1, gamma.len()));
    }
    if gamma.iter().any(|g| grp.is_identity(g)) {
        return domain_err("the classes of the chain system must be nontrivial");
    }
    Ok(gamma.iter().map(|g| grp.conj_class(g)).collect())
}

/// Number of chain numberings of a rigid planar arrow diagram on π whose
/// Γ-decoration equals its own region classes.
pub fn dec_count(grp: &WeightedGroup, a: &Diagram, gamma: &[Elem]) -> Result<usize> {
    let gamma = gamma_classes(grp, a.degree(), gamma)?;
    if !a.is_planar() {
        return Ok(0);
    }
    let classes = h1_decorate(grp, a)?.region_labels();
    Ok(chain_numberings(a)?.iter().filter(|num| num.iter().zip(&classes).all(|(&i, c)| gamma[i as usize - 1] == *c)).count())
}

/// Γ-decorated universal chain, as multiplicities of canonical decorated diagrams.
pub fn phi_gamma(grp: &WeightedGroup, n: usize, gamma: &[Elem]) -> Result<BTreeMap<H1Diagram, usize>> {
    let mut out = BTreeMap::new();
    for cp in gv_universal(n) {
        *out.entry(gamma_decorate(grp, &cp, gamma)?.canonical()).or_insert(0) += 1;
    }
    Ok(out)
}

/// ⟨S(Φ_Γ), A⟩ for an arrow diagram A, through its decorated class.
pub fn phi_pairing(grp: &WeightedGroup, phi: &BTreeMap<H1Diagram, usize>, a: &Diagram) -> usize {
    if !a.is_planar() {
        return 0;
    }
    let t = h1_decorate(grp, a).unwrap().canonical();
    phi.get(&t).map_or(0, |c| c * t.stabilizer_order())
}

/// Planar chain invariant of degree `n` for the class system `gamma`:
/// the signed count of chain numberings over all planar degree-n subdiagrams.
pub fn gv_eval(grp: &WeightedGroup, gamma: &[Elem], n: usize, g: &Diagram) -> Result<Q> {
    if !grp.has_trivial_weight() {
        return domain_err("the planar chain invariants need a trivial weight");
    }
    gamma_classes(grp, n, gamma)?;
    let m = g.degree();
    let mut acc: i64 = 0;
    if n > m || m > 63 {
        return if n > m { Ok(Q::zero()) } else { domain_err("degree too large") };
    }
    for mask in 0u64..1 << m {
        if mask.count_ones() as usize != n {
            continue;
        }
        let keep: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
        let (s, _) = g.sub_rigid(grp, &keep);
        if !s.is_planar() {
            continue;
        }
        let c = dec_count(grp, &s.erase_writhes(), gamma)?;
        acc += s.sign() as i64 * c as i64;
    }
    Ok(q(acc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Whitney {
    pub v_l: i64,
    pub v_r: i64,
}

impl Whitney {
    pub fn index(&self) -> i64 {
        self.v_r - self.v_l
    }

    pub fn writhe(&self) -> i64 {
        self.v_r + self.v_l
    }
}

/// Writhe sums over the arrows whose left (resp. right) region, in the
/// one-arrow subdiagram, has a nontrivial class.
pub fn whitney(grp: &WeightedGroup, g: &Diagram) -> Result<Whitney> {
    if !grp.has_trivial_weight() {
        return domain_err("the Whitney pair needs a trivial weight");
    }
    if grp.is_identity(&g.total_class(grp)) {
        return domain_err("the Whitney pair needs a non nullhomotopic diagram (total class is trivial)");
    }
    let mut out = Whitney { v_l: 0, v_r: 0 };
    for a in g.arrows() {
        let left = grp.conj_class(&g.path_product(grp, a.head, a.tail));
        let right = grp.conj_class(&g.path_product(grp, a.tail, a.head));
        if !grp.is_identity(&left) {
            out.v_l += a.writhe as i64;
        }
        if !grp.is_identity(&right) {
            out.v_r += a.writhe as i64;
        }
    }
    Ok(out)
}

/// The arrow series whose ν-value is the GV invariant: every degree-n arrow
/// diagram A with coefficient #Dec(A)/|Aut A|. Finite groups only.
pub fn gv_series(grp: &WeightedGroup, gamma: &[Elem], n: usize) -> Result<Series<Diagram>> {
    let Some(all) = grp.elements() else {
        return domain_err("the GV series is finite only over a finite group");
    };
    let phi = phi_gamma(grp, n, gamma)?;
    let mut x = Series::new();
    for a in all_diagrams(grp, n, &all, false) {
        let c = phi_pairing(grp, &phi, &a);
        if c > 0 {
            x.add_term(a.clone(), q(c as i64) / q(a.aut_order() as i64));
        }
    }
    Ok(x)
}

/// A planar diagram whose region classes follow Γ through a chain presentation.
pub fn gamma_instance<R: Rng>(rng: &mut R, grp: &WeightedGroup, n: usize, gamma: &[Elem]) -> Diagram {
    let s = planar_shapes(n).choose(rng).unwrap().clone();
    let nums = chain_numberings(&s).unwrap();
    let num = nums.choose(rng).unwrap();
    let region = regions(&s).unwrap();
    let mut edges = vec![grp.identity(); 2 * n];
    for r in 0..=n {
        let es: Vec<usize> = (0..2 * n).filter(|&e| region[e] == r).collect();
        edges[*es.choose(rng).unwrap()] = gamma[num[r] as usize - 1].clone();
    }
    s.with_edges(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{apply, Move, MoveKind};
    use crate::random::{random_sparse_diagram, random_walk};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> WeightedGroup {
        WeightedGroup::free(2)
    }

    /// Regions by union-find: two edges share a region iff no chord separates them.
    fn regions_by_separation(arrows: &[(usize, usize)], m: usize) -> Vec<usize> {
        let inside = |x: usize, a: usize, b: usize| {
            let (lo, hi) = (a.min(b), a.max(b));
            lo <= x && x < hi
        };
        let mut root: Vec<usize> = (0..m).collect();
        fn find(root: &mut [usize], x: usize) -> usize {
            if root[x] != x {
                let r = find(root, root[x]);
                root[x] = r;
            }
            root[x]
        }
        for e in 0..m {
            for f in e + 1..m {
                if arrows.iter().all(|&(a, b)| inside(e, a, b) == inside(f, a, b)) {
                    let (x, y) = (find(&mut root, e), find(&mut root, f));
                    root[x] = y;
                }
            }
        }
        (0..m).map(|e| find(&mut root, e)).collect()
    }

    fn cyclic_in(x: usize, from: usize, to: usize, m: usize) -> bool {
        (x + m - from) % m < (to + m - from) % m
    }

    /// Rigid chain presentations by brute force over all involutions,
    /// orientations and permutations.
    fn brute_chain_count(n: usize) -> usize {
        let m = 2 * n;
        fn involutions(free: Vec<usize>) -> Vec<Vec<(usize, usize)>> {
            if free.is_empty() {
                return vec![vec![]];
            }
            let a = free[0];
            let mut out = vec![];
            for i in 1..free.len() {
                let rest: Vec<usize> = free.iter().enumerate().filter(|&(j, _)| j != 0 && j != i).map(|(_, &x)| x).collect();
                for mut v in involutions(rest) {
                    v.push((a, free[i]));
                    out.push(v);
                }
            }
            out
        }
        fn perms(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = vec![];
            for p in perms(k - 1) {
                for i in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(i, k - 1);
                    out.push(q);
                }
            }
            out
        }
        let mut count = 0;
        for inv in involutions((0..m).collect()) {
            let crossing = inv.iter().any(|&(a, b)| inv.iter().any(|&(c, d)| crate::diagram::chords_cross(a, b, c, d) && (a, b) != (c, d)));
            if crossing {
                continue;
            }
            let reg = regions_by_separation(&inv, m);
            let mut ids: Vec<usize> = reg.clone();
            ids.sort();
            ids.dedup();
            assert_eq!(ids.len(), n + 1);
            for flips in 0u32..1 << n {
                let arrows: Vec<(usize, usize)> =
                    inv.iter().enumerate().map(|(i, &(a, b))| if flips >> i & 1 == 1 { (b, a) } else { (a, b) }).collect();
                for p in perms(n + 1) {
                    let num = |e: usize| p[ids.iter().position(|&r| r == reg[e]).unwrap()];
                    let ok = arrows.iter().all(|&(t, h)| {
                        // Left of t->h is the side holding the counterclockwise arc from h to t.
                        let left = (0..m).find(|&e| cyclic_in(e, h, t, m)).unwrap();
                        let right = (0..m).find(|&e| cyclic_in(e, t, h, m)).unwrap();
                        num(left) < num(right)
                    });
                    if ok {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn regions_match_separation() {
        for n in 0..=4 {
            for s in planar_shapes(n) {
                let r = regions(&s).unwrap();
                assert_eq!(r.iter().max().unwrap() + 1, n + 1);
                if n == 0 {
                    continue;
                }
                let pairs: Vec<(usize, usize)> = s.arrows().iter().map(|a| (a.tail, a.head)).collect();
                let oracle = regions_by_separation(&pairs, 2 * n);
                for e in 0..2 * n {
                    for f in 0..2 * n {
                        assert_eq!(r[e] == r[f], oracle[e] == oracle[f]);
                    }
                }
            }
        }
        let crossed =
            Diagram::from_arrows(&[Arrow { tail: 0, head: 2, writhe: 0 }, Arrow { tail: 1, head: 3, writhe: 0 }], vec![Elem::default(); 4])
                .unwrap();
        assert!(regions(&crossed).is_err());
    }

    #[test]
    fn universal_chain_counts() {
        let one = gv_universal(1);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].stabilizer_order(), 1);
        for n in 1..=3 {
            let u = gv_universal(n);
            assert!(u.iter().all(|c| c.stabilizer_order() == 1));
            assert_eq!(u.len() * 2 * n, brute_chain_count(n), "degree {n}");
        }
        assert_eq!(gv_universal(2).len(), brute_chain_count(2) / 4);
    }

    #[test]
    fn decorations_of_simple_cases() {
        let grp = f2();
        let (x1, x2) = (grp.generator(1).unwrap(), grp.generator(2).unwrap());
        let e = grp.identity();
        for s in planar_shapes(2) {
            let d = s.with_edges(vec![e.clone(); 4]);
            assert!(h1_decorate(&grp, &d).unwrap().region_labels().iter().all(|c| grp.is_identity(c)));
        }
        // One chord with edge words u, v: the two regions carry u and v.
        let u = grp.mul(&x1, &x2);
        let v = grp.mul(&x2, &x2);
        let d = Diagram::from_arrows(&[Arrow { tail: 0, head: 1, writhe: 0 }], vec![u.clone(), v.clone()]).unwrap();
        let h = h1_decorate(&grp, &d).unwrap();
        let region = regions(&d).unwrap();
        let (l, r) = sides(&region, &d.arrows()[0]);
        let labels = h.region_labels();
        assert_eq!(labels[l], grp.conj_class(&v));
        assert_eq!(labels[r], grp.conj_class(&u));
    }

    #[test]
    fn h1_classes_are_constant_on_w_orbits() {
        let grp = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(1..=3);
            let s = planar_shapes(n).choose(&mut rng).unwrap().clone();
            let ball = grp.ball(1);
            let d = s.with_edges((0..2 * n).map(|_| ball.choose(&mut rng).unwrap().clone()).collect());
            let h = h1_decorate(&grp, &d).unwrap().canonical();
            for _ in 0..5 {
                let m = Move::W { arrow: rng.gen_range(0..n), g: ball.choose(&mut rng).unwrap().clone() };
                let d2 = apply(&grp, &d, &m).unwrap();
                assert_eq!(h1_decorate(&grp, &d2).unwrap().canonical(), h);
            }
        }
    }

    fn gammas(grp: &WeightedGroup, n: usize) -> Vec<Vec<Elem>> {
        let (x1, x2) = (grp.generator(1).unwrap(), grp.generator(2).unwrap());
        let x12 = grp.mul(&x1, &x2);
        let mut out = vec![vec![x1.clone(); n + 1]];
        out.push((0..=n).map(|i| if i % 2 == 0 { x1.clone() } else { x2.clone() }).collect());
        out.push((0..=n).map(|i| [&x1, &x2, &x12][i % 3].clone()).collect());
        out
    }

    #[test]
    fn dec_count_two_ways() {
        let grp = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=3 {
            for gamma in gammas(&grp, n) {
                let phi = phi_gamma(&grp, n, &gamma).unwrap();
                let mut hits = 0;
                for t in 0..30 {
                    let a = if t % 3 == 0 {
                        random_sparse_diagram(&mut rng, &grp, n, 1, 0.5, false)
                    } else {
                        gamma_instance(&mut rng, &grp, n, &gamma)
                    };
                    let direct = dec_count(&grp, &a, &gamma).unwrap();
                    assert_eq!(direct, phi_pairing(&grp, &phi, &a), "{a:?}");
                    assert_eq!(direct, phi_pairing(&grp, &phi, &a.canonical(&grp)));
                    hits += (direct > 0) as usize;
                }
                assert!(hits >= 10);
            }
        }
    }

    #[test]
    fn gv_matches_the_pairing_definition() {
        let grp = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 2..=3 {
            for gamma in gammas(&grp, n) {
                let phi = phi_gamma(&grp, n, &gamma).unwrap();
                for _ in 0..10 {
                    let deg = n + rng.gen_range(0..=2);
                    let g = random_sparse_diagram(&mut rng, &grp, deg, 1, 0.6, true);
                    // Finite part of S(Φ) seen by the subdiagrams of g.
                    let mut x = Series::new();
                    let mut seen = std::collections::BTreeSet::new();
                    for mask in 0u64..1 << g.degree() {
                        if mask.count_ones() as usize != n {
                            continue;
                        }
                        let a = g.sub_mask(&grp, mask).erase_writhes().canonical(&grp);
                        if seen.insert(a.clone()) {
                            let c = phi_pairing(&grp, &phi, &a);
                            x.add_term(a.clone(), q(c as i64) / q(a.aut_order() as i64));
                        }
                    }
                    assert_eq!(gv_eval(&grp, &gamma, n, &g).unwrap(), eval_arrow(&grp, &x, &g));
                }
            }
        }
        let g = random_sparse_diagram(&mut rng, &grp, 1, 1, 0.5, true);
        assert!(gv_eval(&grp, &gammas(&grp, 2)[0], 2, &g).unwrap().is_zero());
        assert!(gv_eval(&grp, &[grp.identity(), grp.generator(1).unwrap()], 1, &g).is_err());
    }

    #[test]
    fn gv_is_invariant_under_moves() {
        let grp = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=3 {
            let mut nonzero = 0;
            for (i, gamma) in gammas(&grp, n).iter().enumerate() {
                for t in 0..8 {
                    let base = if t % 2 == 0 {
                        let mut d = gamma_instance(&mut rng, &grp, n, gamma);
                        let w: Vec<i8> = (0..n).map(|_| if rng.gen() { 1 } else { -1 }).collect();
                        d = d.with_writhes(&w);
                        random_walk(&mut rng, &grp, &d, &[MoveKind::R1Plus, MoveKind::W], 1, 1).0
                    } else {
                        random_sparse_diagram(&mut rng, &grp, n + 1, 1, 0.6, true)
                    };
                    let v = gv_eval(&grp, gamma, n, &base).unwrap();
                    nonzero += !v.is_zero() as usize;
                    let len = 1 + (i + t) % 6;
                    let h = random_walk(&mut rng, &grp, &base, &MoveKind::ALL, 1, len).0;
                    assert_eq!(gv_eval(&grp, gamma, n, &h).unwrap(), v, "{base:?} -> {h:?}");
                }
            }
            assert!(nonzero >= 4, "degree {n}: {nonzero}");
        }
    }

    #[test]
    fn nu_of_simple_series() {
        let grp = WeightedGroup::integers();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let g = random_sparse_diagram(&mut rng, &grp, 3, 1, 0.5, true);
            let c = Diagram::circle(&grp, &g.total_class(&grp));
            assert_eq!(eval_nu(&grp, &Series::single(c.clone()), &g), q(1));
            let other = Diagram::circle(&grp, &grp.mul(&g.total_class(&grp), &grp.generator(1).unwrap()));
            assert!(eval_nu(&grp, &Series::single(other), &g).is_zero());
            assert!(eval_nu(&grp, &Series::new(), &g).is_zero());
        }
    }

    fn z() -> WeightedGroup {
        WeightedGroup::integers()
    }

    fn non_nullhomotopic<R: Rng>(rng: &mut R, grp: &WeightedGroup, n: usize) -> Diagram {
        loop {
            let d = random_sparse_diagram(rng, grp, n, 1, 0.5, true);
            if !grp.is_identity(&d.total_class(grp)) {
                return d;
            }
        }
    }

    #[test]
    fn whitney_r1_table() {
        let grp = z();
        let one = grp.generator(1).unwrap();
        let base = Diagram::circle(&grp, &one);
        assert_eq!(whitney(&grp, &base).unwrap(), Whitney { v_l: 0, v_r: 0 });
        let kinds = [(1, true), (-1, false), (1, false), (-1, true)];
        let want = [(0, 1), (-1, 0), (1, 0), (0, -1)];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut bases = vec![];
        for n in 1..=3 {
            for _ in 0..4 {
                bases.push(non_nullhomotopic(&mut rng, &grp, n));
            }
        }
        for g in bases {
            let w0 = whitney(&grp, &g).unwrap();
            for edge in 0..g.num_positions() {
                for ((writhe, head_first), (dl, dr)) in kinds.iter().zip(want) {
                    let m = Move::R1Plus { edge, split: grp.identity(), writhe: *writhe, head_first: *head_first };
                    let h = apply(&grp, &g, &m).unwrap();
                    let w1 = whitney(&grp, &h).unwrap();
                    assert_eq!((w1.v_l - w0.v_l, w1.v_r - w0.v_r), (dl, dr));
                }
            }
        }
        let null = Diagram::from_arrows(&[Arrow { tail: 0, head: 1, writhe: 1 }], vec![one.clone(), grp.inv(&one)]).unwrap();
        assert!(whitney(&grp, &null).is_err());
        assert!(whitney(&z2_weighted(), &Diagram::circle(&z2_weighted(), &z2_weighted().generator(1).unwrap())).is_err());
    }

    fn z2_weighted() -> WeightedGroup {
        WeightedGroup::cyclic(2).with_weights(vec![-1]).unwrap()
    }

    /// v_l and v_r through the one-arrow subdiagrams and their region classes.
    fn whitney_by_subdiagrams(grp: &WeightedGroup, g: &Diagram) -> (i64, i64) {
        let (mut l, mut r) = (0, 0);
        for (i, a) in g.arrows().iter().enumerate() {
            let keep: Vec<bool> = (0..g.degree()).map(|j| j == i).collect();
            let (s, _) = g.sub_rigid(grp, &keep);
            let h = h1_decorate(grp, &s).unwrap();
            let sa = s.arrows()[0];
            let (li, ri) = sides(&regions(&s).unwrap(), &sa);
            let labels = h.region_labels();
            l += if grp.is_identity(&labels[li]) { 0 } else { a.writhe as i64 };
            r += if grp.is_identity(&labels[ri]) { 0 } else { a.writhe as i64 };
        }
        (l, r)
    }

    #[test]
    fn whitney_invariance() {
        let grp = z();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let regular = [MoveKind::R2Plus, MoveKind::R2Minus, MoveKind::R3, MoveKind::W];
        for t in 0..60 {
            let g = non_nullhomotopic(&mut rng, &grp, 1 + t % 4);
            let w = whitney(&grp, &g).unwrap();
            assert_eq!((w.v_l, w.v_r), whitney_by_subdiagrams(&grp, &g));
            let h = random_walk(&mut rng, &grp, &g, &regular, 1, 1 + t % 6).0;
            assert_eq!(whitney(&grp, &h).unwrap(), w);
            let h = random_walk(&mut rng, &grp, &g, &MoveKind::ALL, 1, 1 + t % 6).0;
            let wh = whitney(&grp, &h).unwrap();
            assert_eq!(wh.writhe() - h.total_writhe(), w.writhe() - g.total_writhe());
        }
    }

    #[test]
    fn labelled_canonical_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for cp in gv_universal(3) {
            let r = rng.gen_range(0..6);
            assert_eq!(cp.rotate_left(r).canonical(), cp);
        }
    }
}
