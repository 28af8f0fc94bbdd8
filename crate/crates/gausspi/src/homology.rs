//! Homology of the diagram 1-complex: vertices are the 2n arrow endpoints,
//! 1-cells are the 2n circle edges and the n arrows.

use crate::diagram::{AbelianDiagram, Arrow, Diagram};
use crate::error::{domain_err, Result};
use crate::group::{Elem, WeightedGroup};

/// Integer coordinates of a 1-chain: one per edge, one per arrow (arrow order
/// as in `Diagram::arrows`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct HomologyClass {
    pub edges: Vec<i64>,
    pub arrows: Vec<i64>,
}

impl HomologyClass {
    pub fn zero(d: &Diagram) -> HomologyClass {
        HomologyClass { edges: vec![0; d.num_positions().max(1)], arrows: vec![0; d.degree()] }
    }

    pub fn add(&self, o: &HomologyClass) -> HomologyClass {
        self.combine(1, o)
    }

    pub fn sub(&self, o: &HomologyClass) -> HomologyClass {
        self.combine(-1, o)
    }

    pub fn scale(&self, k: i64) -> HomologyClass {
        HomologyClass { edges: self.edges.iter().map(|x| k * x).collect(), arrows: self.arrows.iter().map(|x| k * x).collect() }
    }

    fn combine(&self, k: i64, o: &HomologyClass) -> HomologyClass {
        HomologyClass {
            edges: self.edges.iter().zip(&o.edges).map(|(a, b)| a + k * b).collect(),
            arrows: self.arrows.iter().zip(&o.arrows).map(|(a, b)| a + k * b).collect(),
        }
    }

    pub fn is_proper(&self) -> bool {
        self.arrows.iter().any(|&a| a != 0)
    }

    pub fn is_edge_respecting(&self) -> bool {
        self.edges.iter().all(|&e| e >= 0)
    }
}

fn arrow_at(d: &Diagram) -> Vec<usize> {
    let mut at = vec![0; d.num_positions()];
    for (i, a) in d.arrows().iter().enumerate() {
        at[a.tail] = i;
        at[a.head] = i;
    }
    at
}

pub fn is_cycle(d: &Diagram, g: &HomologyClass) -> bool {
    let m = d.num_positions();
    if g.arrows.len() != d.degree() || g.edges.len() != m.max(1) {
        return false;
    }
    let at = arrow_at(d);
    (0..m).all(|p| {
        let a = g.arrows[at[p]];
        let (into, out) = if d.is_head(p) { (a, 0) } else { (0, a) };
        g.edges[d.prev(p)] + into == g.edges[p] + out
    })
}

fn require_cycle(d: &Diagram, g: &HomologyClass) -> Result<()> {
    if is_cycle(d, g) {
        Ok(())
    } else {
        domain_err("the chain is not a cycle of this diagram")
    }
}

pub fn loop_k(d: &Diagram) -> HomologyClass {
    HomologyClass { edges: vec![1; d.num_positions().max(1)], arrows: vec![0; d.degree()] }
}

/// Edges on the return arc of an arrow, from its head around to its tail.
pub fn return_arc(d: &Diagram, a: &Arrow) -> Vec<usize> {
    let mut out = vec![];
    let mut j = a.head;
    while j != a.tail {
        out.push(j);
        j = d.next(j);
    }
    out
}

pub fn loop_arrow(d: &Diagram, i: usize) -> HomologyClass {
    let a = d.arrows()[i];
    let mut g = HomologyClass::zero(d);
    g.arrows[i] = 1;
    for j in return_arc(d, &a) {
        g.edges[j] = 1;
    }
    g
}

/// Fundamental loops [A_1], ..., [A_n], then [K].
pub fn fundamental_basis(d: &Diagram) -> Vec<HomologyClass> {
    let mut v: Vec<HomologyClass> = (0..d.degree()).map(|i| loop_arrow(d, i)).collect();
    v.push(loop_k(d));
    v
}

/// Sum of the basis elements with the given coefficients.
pub fn combination(d: &Diagram, c_arrows: &[i64], c_k: i64) -> HomologyClass {
    let mut g = loop_k(d).scale(c_k);
    for (i, &c) in c_arrows.iter().enumerate() {
        g = g.add(&loop_arrow(d, i).scale(c));
    }
    g
}

/// Energy computed with reference edge `e`.
pub fn energy_at(d: &Diagram, g: &HomologyClass, e: usize) -> i64 {
    let mut v = g.edges[e];
    for (i, a) in d.arrows().iter().enumerate() {
        if return_arc(d, a).contains(&e) {
            v -= g.arrows[i];
        }
    }
    v
}

pub fn energy(d: &Diagram, g: &HomologyClass) -> Result<i64> {
    require_cycle(d, g)?;
    let e0 = energy_at(d, g, 0);
    for e in 1..d.num_positions() {
        if energy_at(d, g, e) != e0 {
            return domain_err("energy depends on the reference edge");
        }
    }
    Ok(e0)
}

/// Coefficients of g in the fundamental basis: arrow coordinates and energy.
pub fn decompose(d: &Diagram, g: &HomologyClass) -> Result<(Vec<i64>, i64)> {
    let e = energy(d, g)?;
    Ok((g.arrows.clone(), e))
}

pub fn torsion(d: &Diagram, g: &HomologyClass) -> Result<i64> {
    let e = energy(d, g)?;
    let neg: i64 = g.arrows.iter().filter(|&&a| a < 0).sum();
    Ok(-(e + neg))
}

/// Coordinates in {-1,0,1} supported on one connected loop.
pub fn is_simple(d: &Diagram, g: &HomologyClass) -> bool {
    if !is_cycle(d, g) || g.edges.iter().chain(&g.arrows).any(|x| x.abs() > 1) {
        return false;
    }
    match traverse(d, g) {
        Some(cells) => {
            let support = g.edges.iter().chain(&g.arrows).filter(|&&x| x != 0).count();
            cells.len() == support
        }
        None => false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Cell {
    Edge(usize),
    Arrow(usize),
}

/// Follow a {-1,0,1} cycle from its first supported edge; returns the cells in
/// traversal order, or None if the support has no edge.
fn traverse(d: &Diagram, g: &HomologyClass) -> Option<Vec<Cell>> {
    let m = d.num_positions();
    if m == 0 {
        return if g.edges[0] != 0 { Some(vec![Cell::Edge(0)]) } else { None };
    }
    let at = arrow_at(d);
    let start = (0..m).find(|&j| g.edges[j] != 0)?;
    let mut cells = vec![];
    let mut cur = Cell::Edge(start);
    // vertex reached after traversing the current cell
    let mut vertex = if g.edges[start] > 0 { d.next(start) } else { start };
    for _ in 0..3 * m + 3 {
        cells.push(cur);
        // choose the other supported cell at `vertex`
        let p = vertex;
        let a = at[p];
        let cands = [Cell::Edge(d.prev(p)), Cell::Edge(p), Cell::Arrow(a)];
        let next = cands.iter().copied().find(|&c| {
            c != cur
                && match c {
                    Cell::Edge(j) => g.edges[j] != 0,
                    Cell::Arrow(i) => g.arrows[i] != 0,
                }
        })?;
        vertex = match next {
            Cell::Edge(j) => {
                if j == p {
                    d.next(p)
                } else {
                    d.prev(p)
                }
            }
            Cell::Arrow(_) => d.partner(p),
        };
        if next == Cell::Edge(start) {
            return Some(cells);
        }
        cur = next;
    }
    None
}

/// Permutation induced by a proper simple loop on its red arcs. A red arc is a
/// maximal run of edges traversed consecutively by the loop; edges separated
/// only by endpoints of arrows the loop avoids belong to the same arc, since
/// deleting such arrows changes neither side of the torsion formula. Arcs are
/// labelled 0..m in circle order of their first edge.
pub fn sigma_of_loop(d: &Diagram, g: &HomologyClass) -> Result<Vec<usize>> {
    if !g.is_proper() || !is_simple(d, g) {
        return domain_err("loop must be proper and simple");
    }
    let mut cells = traverse(d, g).unwrap();
    // rotate so the traversal starts right after an arrow
    let k = cells.iter().position(|c| matches!(c, Cell::Arrow(_))).unwrap();
    cells.rotate_left(k + 1);
    let mut runs: Vec<Vec<usize>> = vec![];
    let mut cur: Vec<usize> = vec![];
    for c in &cells {
        match c {
            Cell::Edge(j) => cur.push(*j),
            Cell::Arrow(_) => {
                if !cur.is_empty() {
                    runs.push(std::mem::take(&mut cur));
                }
            }
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    let forward = g.edges[runs[0][0]] > 0;
    let first = |r: &Vec<usize>| if forward { r[0] } else { *r.last().unwrap() };
    let mut starts: Vec<usize> = runs.iter().map(first).collect();
    starts.sort();
    let label = |r: &Vec<usize>| starts.iter().position(|&s| s == first(r)).unwrap();
    let order: Vec<usize> = runs.iter().map(label).collect();
    let k = order.len();
    let mut sigma = vec![0; k];
    for i in 0..k {
        let (a, b) = (order[i], order[(i + 1) % k]);
        if forward {
            sigma[a] = b;
        } else {
            sigma[b] = a;
        }
    }
    Ok(sigma)
}

/// Number of ascents: #{i : sigma(i) > i}.
pub fn perm_torsion(sigma: &[usize]) -> i64 {
    sigma.iter().enumerate().filter(|(i, &s)| s > *i).count() as i64
}

/// All proper edge-respecting simple loops: directed simple cycles using edges
/// forwards and arrows in either direction, with at least one arrow.
pub fn proper_ers_loops(d: &Diagram) -> Vec<HomologyClass> {
    let m = d.num_positions();
    let at = arrow_at(d);
    let mut out = vec![];
    for start in 0..m {
        let mut visited = vec![false; m];
        visited[start] = true;
        let mut path: Vec<(Cell, i64)> = vec![];
        dfs(d, &at, start, start, &mut visited, &mut path, &mut out);
    }
    out
}

fn dfs(
    d: &Diagram,
    at: &[usize],
    start: usize,
    v: usize,
    visited: &mut Vec<bool>,
    path: &mut Vec<(Cell, i64)>,
    out: &mut Vec<HomologyClass>,
) {
    let a = at[v];
    let steps = [(Cell::Edge(v), 1, d.next(v)), (Cell::Arrow(a), if d.is_head(v) { -1 } else { 1 }, d.partner(v))];
    for (cell, sgn, w) in steps {
        if let Cell::Arrow(i) = cell {
            if path.iter().any(|(c, _)| *c == Cell::Arrow(i)) {
                continue;
            }
        }
        if w == start {
            path.push((cell, sgn));
            if path.iter().any(|(c, _)| matches!(c, Cell::Arrow(_))) {
                let mut g = HomologyClass::zero(d);
                for (c, s) in path.iter() {
                    match c {
                        Cell::Edge(j) => g.edges[*j] += s,
                        Cell::Arrow(i) => g.arrows[*i] += s,
                    }
                }
                out.push(g);
            }
            path.pop();
        } else if w > start && !visited[w] {
            visited[w] = true;
            path.push((cell, sgn));
            dfs(d, at, start, w, visited, path, out);
            path.pop();
            visited[w] = false;
        }
    }
}

/// Split `g + shift [K]` into proper edge-respecting simple loops, where
/// `shift = -min_e <g, e>`.
pub fn ers_decompose(d: &Diagram, g: &HomologyClass) -> Result<(i64, Vec<HomologyClass>)> {
    require_cycle(d, g)?;
    if !g.is_proper() {
        return domain_err("loop is homologous to a multiple of [K]");
    }
    let m = d.num_positions();
    let shift = -*g.edges.iter().min().unwrap();
    let mut rest = g.add(&loop_k(d).scale(shift));
    let at = arrow_at(d);
    let mut parts = vec![];
    while let Some(start) = (0..m).find(|&j| rest.edges[j] > 0) {
        // walk until a vertex repeats
        let mut seen: Vec<Option<usize>> = vec![None; m];
        let mut steps: Vec<(Cell, i64)> = vec![];
        let mut v = d.next(start);
        steps.push((Cell::Edge(start), 1));
        seen[start] = Some(0);
        loop {
            if let Some(k) = seen[v] {
                let mut part = HomologyClass::zero(d);
                for (c, s) in &steps[k..] {
                    match c {
                        Cell::Edge(j) => part.edges[*j] += s,
                        Cell::Arrow(i) => part.arrows[*i] += s,
                    }
                }
                rest = rest.sub(&part);
                parts.push(part);
                break;
            }
            seen[v] = Some(steps.len());
            let i = at[v];
            let c = rest.arrows[i];
            let along_arrow = (!d.is_head(v) && c > 0) || (d.is_head(v) && c < 0);
            if along_arrow {
                steps.push((Cell::Arrow(i), c.signum()));
                v = d.partner(v);
            } else if rest.edges[v] > 0 {
                steps.push((Cell::Edge(v), 1));
                v = d.next(v);
            } else {
                return domain_err("decomposition walk got stuck");
            }
        }
    }
    if rest.arrows.iter().any(|&x| x != 0) {
        return domain_err("decomposition left arrow coordinates behind");
    }
    Ok((shift, parts))
}

/// Value of the decorating homomorphism on a cycle.
pub fn mu_eval(grp: &WeightedGroup, ab: &AbelianDiagram, g: &HomologyClass) -> Result<Elem> {
    let d = ab.classical();
    let (c, e) = decompose(&d, g)?;
    let mut acc = grp.pow(ab.global(), e);
    for (m, k) in ab.marks().iter().zip(c) {
        acc = grp.mul(&acc, &grp.pow(m, k));
    }
    Ok(acc)
}

/// Direct evaluation on a decorated diagram: sum of edge markings with multiplicity.
pub fn edge_sum(grp: &WeightedGroup, d: &Diagram, g: &HomologyClass) -> Elem {
    let mut acc = grp.identity();
    for (x, &k) in d.edges().iter().zip(&g.edges) {
        acc = grp.mul(&acc, &grp.pow(x, k));
    }
    acc
}

/// lambda(e) = sum over arrows of <[A], e>, after reversing arrows so that
/// every arrow used by g is traversed positively.
pub fn lambda(d: &Diagram, g: &HomologyClass) -> Vec<i64> {
    let arrows = d.arrows();
    let m = d.num_positions();
    let mut out = vec![0; m];
    for (i, a) in arrows.iter().enumerate() {
        let a = if g.arrows[i] < 0 { Arrow { tail: a.head, head: a.tail, writhe: a.writhe } } else { *a };
        for j in return_arc(d, &a) {
            out[j] += 1;
        }
    }
    out
}

/// Diagram built from a cyclic permutation given as images: heads at even
/// positions 2i, tails at 2i+1, arrow i from tail 2i+1 to head 2 sigma(i).
/// Returns the rigid diagram and the loop through all arrows and even edges.
pub fn cycle_diagram(sigma: &[usize]) -> (Diagram, HomologyClass) {
    let n = sigma.len();
    let arrows: Vec<Arrow> = (0..n).map(|i| Arrow { tail: 2 * i + 1, head: 2 * sigma[i], writhe: 1 }).collect();
    let d = Diagram::from_arrows(&arrows, vec![Elem::default(); 2 * n]).unwrap();
    let mut g = HomologyClass::zero(&d);
    for i in 0..n {
        g.edges[2 * i] = 1;
    }
    for x in g.arrows.iter_mut() {
        *x = 1;
    }
    (d, g)
}

/// Images of a cycle written as a list (c0 c1 ... c_{n-1}).
pub fn cycle_to_images(cycle: &[usize]) -> Vec<usize> {
    let n = cycle.len();
    let mut s = vec![0; n];
    for i in 0..n {
        s[cycle[i]] = cycle[(i + 1) % n];
    }
    s
}

/// The three kinds of twist moves, swapping two neighbours of a cycle.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Twist {
    A,
    B,
    C,
}

/// Swaps the entries at k and k+1 of a cycle listing (a i j b) -> (a j i b).
pub fn twist(cycle: &[usize], k: usize) -> Vec<usize> {
    let n = cycle.len();
    let mut out = cycle.to_vec();
    out.swap(k % n, (k + 1) % n);
    out
}

/// Kind of the twist at k and whether it runs forward. With the circle cut
/// just after a, the move is A when b lies between i and j, B when b comes
/// last and C when b comes first; forward means i before j.
pub fn twist_type(cycle: &[usize], k: usize) -> Result<(Twist, bool)> {
    let n = cycle.len();
    if n < 3 {
        return domain_err("a twist needs a cycle of length at least 3");
    }
    let at = |o: usize| cycle[(k + n + o) % n];
    let (a, i, j, b) = (at(n - 1), at(0), at(1), at(2));
    let rank = |x: usize| (x + n - a) % n;
    let (ri, rj, rb) = (rank(i), rank(j), rank(b));
    let kind = if rb > ri.max(rj) {
        Twist::B
    } else if rb < ri.min(rj) {
        Twist::C
    } else {
        Twist::A
    };
    Ok((kind, ri < rj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_diagram;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn deg1() -> Diagram {
        Diagram::from_arrows(&[Arrow { tail: 0, head: 1, writhe: 1 }], vec![Elem::default(); 2]).unwrap()
    }

    #[test]
    fn basis_degree_one() {
        let d = deg1();
        let b = fundamental_basis(&d);
        assert_eq!(b[0].edges, vec![0, 1]);
        assert_eq!(b[0].arrows, vec![1]);
        assert_eq!(b[1].edges, vec![1, 1]);
        let d0 = Diagram::circle(&WeightedGroup::trivial(), &Elem::default());
        assert_eq!(fundamental_basis(&d0).len(), 1);
        assert_eq!(energy(&d0, &loop_k(&d0)).unwrap(), 1);
    }

    #[test]
    fn energy_examples() {
        let d = deg1();
        let k = loop_k(&d);
        let a = loop_arrow(&d, 0);
        assert_eq!(energy(&d, &k).unwrap(), 1);
        assert_eq!(energy(&d, &a).unwrap(), 0);
        assert_eq!(energy(&d, &k.scale(2).sub(&a)).unwrap(), 2);
        assert_eq!(torsion(&d, &k).unwrap(), -1);
        assert_eq!(torsion(&d, &a).unwrap(), 0);
        let mut bad = k.clone();
        bad.arrows[0] = 1;
        assert!(energy(&d, &bad).is_err());
    }

    #[test]
    fn perm_torsion_examples() {
        assert_eq!(perm_torsion(&[1, 2, 3, 0]), 3);
        assert_eq!(perm_torsion(&[0, 1, 2]), 0);
        assert_eq!(perm_torsion(&[1, 0]), 1);
        // conjugation by the rotation
        let s = vec![2, 0, 3, 1];
        let n = s.len();
        let rot: Vec<usize> = (0..n).map(|i| (s[(i + n - 1) % n] + 1) % n).collect();
        assert_eq!(perm_torsion(&s), perm_torsion(&rot));
    }

    #[test]
    fn decomposition_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grp = WeightedGroup::trivial();
        for _ in 0..200 {
            let n = rng.gen_range(0..6);
            let d = random_diagram(&mut rng, &grp, n, 0, true);
            let cs: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..4)).collect();
            let ck = rng.gen_range(-3..4);
            let g = combination(&d, &cs, ck);
            assert!(is_cycle(&d, &g));
            let (a, e) = decompose(&d, &g).unwrap();
            assert_eq!((a.clone(), e), (cs, ck));
            assert_eq!(combination(&d, &a, e), g);
        }
    }

    #[test]
    fn ers_parts_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grp = WeightedGroup::trivial();
        for _ in 0..200 {
            let n = rng.gen_range(1..6);
            let d = random_diagram(&mut rng, &grp, n, 0, true);
            let mut cs: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..3)).collect();
            if cs.iter().all(|&c| c == 0) {
                cs[0] = 1;
            }
            let g = combination(&d, &cs, rng.gen_range(-2..3));
            let (shift, parts) = ers_decompose(&d, &g).unwrap();
            let mut sum = HomologyClass::zero(&d);
            for p in &parts {
                assert!(p.is_proper() && p.is_edge_respecting() && is_simple(&d, p));
                sum = sum.add(p);
            }
            assert_eq!(sum, g.add(&loop_k(&d).scale(shift)));
            for p in &parts {
                for q in &parts {
                    assert!(p.arrows.iter().zip(&q.arrows).all(|(x, y)| x * y >= 0));
                }
            }
            let total: i64 = parts.iter().map(|p| torsion(&d, p).unwrap()).sum();
            assert_eq!(total, torsion(&d, &g).unwrap() - shift);
        }
    }

    #[test]
    fn cycle_diagram_sigma() {
        let s = cycle_to_images(&[0, 2, 1, 3]);
        let (d, g) = cycle_diagram(&s);
        assert!(is_simple(&d, &g));
        assert_eq!(sigma_of_loop(&d, &g).unwrap(), s);
    }

    #[test]
    fn torsion_counts_ascents_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let grp = WeightedGroup::trivial();
        for _ in 0..60 {
            let n = rng.gen_range(1..6);
            let d = random_diagram(&mut rng, &grp, n, 0, true);
            for g in proper_ers_loops(&d) {
                assert!(is_simple(&d, &g) && g.is_edge_respecting());
                let s = sigma_of_loop(&d, &g).unwrap();
                assert_eq!(torsion(&d, &g).unwrap(), perm_torsion(&s), "{:?} {:?} {:?}", d.arrows(), g, s);
            }
        }
    }

    #[test]
    fn lambda_on_cycles_small() {
        for cyc in [vec![0, 1, 2], vec![0, 2, 1], vec![0, 2, 1, 3], vec![0, 3, 1, 4, 2]] {
            let s = cycle_to_images(&cyc);
            let (d, g) = cycle_diagram(&s);
            let l = lambda(&d, &g);
            let t = perm_torsion(&s);
            for (j, lj) in l.iter().enumerate() {
                assert_eq!(*lj, if j % 2 == 0 { t + 1 } else { t });
            }
            assert_eq!(torsion(&d, &g).unwrap(), t);
        }
    }

    #[test]
    fn twist_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut seen = std::collections::HashSet::new();
        for n in 3..=7 {
            for _ in 0..40 {
                let mut cyc: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    cyc.swap(i, rng.gen_range(0..=i));
                }
                let k = rng.gen_range(0..n);
                let (kind, forward) = twist_type(&cyc, k).unwrap();
                let after = twist(&cyc, k);
                let (d0, g0) = cycle_diagram(&cycle_to_images(&cyc));
                let (d1, g1) = cycle_diagram(&cycle_to_images(&after));
                let (l0, l1) = (lambda(&d0, &g0), lambda(&d1, &g1));
                let dl = l1[1] - l0[1];
                assert_eq!(l1[0] - l0[0], dl);
                let dt = torsion(&d1, &g1).unwrap() - torsion(&d0, &g0).unwrap();
                let step = if kind == Twist::A { 0 } else { -1 };
                let want = if forward { step } else { -step };
                assert_eq!((dl, dt), (want, want), "{cyc:?} at {k}: {kind:?}");
                let (back, bf) = twist_type(&after, k).unwrap();
                assert_eq!((back, bf), (kind, !forward));
                seen.insert((kind, forward));
            }
        }
        assert_eq!(seen.len(), 6);
    }
}
