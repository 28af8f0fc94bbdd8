//! The acceptance suite: eleven end-to-end checks, each returning a one-line
//! summary or the first failure found.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{abelianize, Arrow, Diagram};
use crate::group::{Elem, WeightedGroup};
use crate::homology::{
    cycle_diagram, cycle_to_images, energy, energy_at, is_cycle, lambda, loop_arrow, loop_k, perm_torsion, proper_ers_loops, sigma_of_loop,
    torsion, twist, twist_type, HomologyClass, Twist,
};
use crate::invariance::{certify_series, invariant_basis, Certificate, Orbits};
use crate::invariants::{dec_count, eval_arrow, gamma_instance, gv_eval, gv_series, gv_universal, phi_gamma, phi_pairing, whitney};
use crate::linalg::SpanSolver;
use crate::moves::{apply, connect_w0, enumerate_moves, w0_shift, Move, MoveKind};
use crate::random::{random_diagram, random_sparse_diagram, random_walk};
use crate::series::{
    arrow_s, arrow_t, decorated_sites, forget_t, gen_relations, i_inv, i_map, inject_s, pairing, polyak_isomorphism, q, Chain, Coarsening,
    Family, ForgetDecorations, ForgetSigns, Series,
};

pub type Verdict = std::result::Result<String, String>;

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub run: fn(u64) -> Verdict,
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "I round trip", run: i_round_trip },
    Criterion { id: 2, name: "energy and decomposition", run: energy_decomposition },
    Criterion { id: 3, name: "torsion of proper loops", run: torsion_of_proper_loops },
    Criterion { id: 4, name: "lambda and twist moves", run: lambda_and_twists },
    Criterion { id: 5, name: "symmetry-preserving maps", run: symmetry_maps },
    Criterion { id: 6, name: "Polyak spans", run: polyak_spans },
    Criterion { id: 7, name: "A2T span", run: a2t_span },
    Criterion { id: 8, name: "invariance pipeline", run: invariance_pipeline },
    Criterion { id: 9, name: "GV invariants", run: gv_invariants },
    Criterion { id: 10, name: "Whitney pair", run: whitney_pair },
    Criterion { id: 11, name: "abelianization", run: abelianization },
];

pub fn line(c: &Criterion, r: &Verdict) -> String {
    match r {
        Ok(s) => format!("PASS {:>2} {}: {s}", c.id, c.name),
        Err(s) => format!("FAIL {:>2} {}: {s}", c.id, c.name),
    }
}

fn rng(seed: u64, id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ id)
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn z2() -> WeightedGroup {
    WeightedGroup::cyclic(2)
}

fn z2_weighted() -> WeightedGroup {
    WeightedGroup::cyclic(2).with_weights(vec![-1]).unwrap()
}

fn i_round_trip(seed: u64) -> Verdict {
    let mut rng = rng(seed, 1);
    let groups = [(WeightedGroup::free(2), 2), (z2(), 1), (z2_weighted(), 1)];
    for t in 0..500 {
        let (grp, r) = &groups[t % groups.len()];
        let g = random_diagram(&mut rng, grp, t % 6, *r, true);
        let x = Series::single(g.clone());
        ensure!(i_inv(grp, &i_map(grp, &x)) == x, "I_inv(I(G)) != G for {g:?} over {}", grp.spec());
    }
    Ok("500 diagrams".into())
}

/// A cycle built from its arrow coordinates and one edge coordinate: the
/// edge coordinate drops by a at a tail and rises by a at a head.
fn cycle_from_arrows(d: &Diagram, arrows: &[i64], e0: i64) -> HomologyClass {
    let mut g = HomologyClass::zero(d);
    g.arrows = arrows.to_vec();
    let m = d.num_positions();
    g.edges[0] = e0;
    for p in 1..m {
        let a = arrows[d.arrow_index_at(p)];
        g.edges[p] = g.edges[p - 1] + if d.is_head(p) { a } else { -a };
    }
    g
}

fn energy_decomposition(seed: u64) -> Verdict {
    let mut rng = rng(seed, 2);
    let grp = WeightedGroup::trivial();
    for t in 0..500 {
        let n = 1 + t % 6;
        let d = random_diagram(&mut rng, &grp, n, 0, true);
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let g = cycle_from_arrows(&d, &a, rng.gen_range(-3..=3));
        ensure!(is_cycle(&d, &g), "constructed class is not a cycle");
        let e = energy_at(&d, &g, 0);
        ensure!((0..d.num_positions()).all(|j| energy_at(&d, &g, j) == e), "energy depends on the edge: {g:?}");
        let mut rebuilt = loop_k(&d).scale(e);
        for (i, c) in g.arrows.iter().enumerate() {
            rebuilt = rebuilt.add(&loop_arrow(&d, i).scale(*c));
        }
        ensure!(rebuilt == g, "decomposition does not rebuild {g:?}");
    }
    Ok("500 loops".into())
}

/// The diagram with the arrows in `flip` reversed, and the same loop on it.
fn reverse_arrows(d: &Diagram, g: &HomologyClass, flip: &[bool]) -> (Diagram, HomologyClass) {
    let arrows: Vec<Arrow> =
        d.arrows().iter().zip(flip).map(|(a, &f)| if f { Arrow { tail: a.head, head: a.tail, writhe: a.writhe } } else { *a }).collect();
    let r = Diagram::from_arrows(&arrows, d.edges().to_vec()).unwrap();
    let mut h = HomologyClass::zero(&r);
    h.edges = g.edges.clone();
    for (i, a) in d.arrows().iter().enumerate() {
        h.arrows[r.arrow_index_at(a.tail)] = if flip[i] { -g.arrows[i] } else { g.arrows[i] };
    }
    (r, h)
}

fn torsion_of_proper_loops(seed: u64) -> Verdict {
    let mut rng = rng(seed, 3);
    let grp = WeightedGroup::trivial();
    let mut loops = 0;
    for t in 0..100 {
        let d = random_diagram(&mut rng, &grp, 1 + t % 7, 0, true);
        for g in proper_ers_loops(&d) {
            let s = sigma_of_loop(&d, &g).map_err(|e| e.to_string())?;
            let tg = torsion(&d, &g).map_err(|e| e.to_string())?;
            ensure!(tg == perm_torsion(&s), "T = {tg}, ascents {} on {:?}, loop {g:?}", perm_torsion(&s), d.arrows());
            loops += 1;
        }
    }
    for t in 0..300 {
        let n = 1 + t % 7;
        let d = random_diagram(&mut rng, &grp, n, 0, true);
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let g = cycle_from_arrows(&d, &a, rng.gen_range(-3..=3));
        let tg = torsion(&d, &g).map_err(|e| e.to_string())?;
        // Reversing the arrows with negative coordinate leaves only
        // nonnegative ones, where the torsion is minus the energy.
        let neg: Vec<bool> = a.iter().map(|&c| c < 0).collect();
        let (r, h) = reverse_arrows(&d, &g, &neg);
        ensure!(-energy(&r, &h).map_err(|e| e.to_string())? == tg, "T vs E identity fails on {:?}", d.arrows());
        let any: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let (r, h) = reverse_arrows(&d, &g, &any);
        ensure!(torsion(&r, &h).map_err(|e| e.to_string())? == tg, "torsion depends on orientations on {:?}", d.arrows());
    }
    Ok(format!("{loops} proper ERS loops, 300 random loops"))
}

fn cycles(n: usize) -> Vec<Vec<usize>> {
    fn perms(rest: &[usize]) -> Vec<Vec<usize>> {
        if rest.is_empty() {
            return vec![vec![]];
        }
        let mut out = vec![];
        for i in 0..rest.len() {
            let mut r = rest.to_vec();
            let x = r.remove(i);
            for mut p in perms(&r) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let rest: Vec<usize> = (1..n).collect();
    perms(&rest)
        .into_iter()
        .map(|mut p| {
            p.insert(0, 0);
            p
        })
        .collect()
}

fn lambda_and_twists(_seed: u64) -> Verdict {
    let mut count = 0;
    let mut twists = [0usize; 3];
    for n in 2..=7 {
        for cyc in cycles(n) {
            let s = cycle_to_images(&cyc);
            let (d, g) = cycle_diagram(&s);
            let l = lambda(&d, &g);
            let t = perm_torsion(&s);
            // Edges alternate: even ones lie on the loop, odd ones do not.
            for (j, lj) in l.iter().enumerate() {
                let want = if j % 2 == 0 { t + 1 } else { t };
                ensure!(*lj == want, "lambda on edge {j} of {cyc:?} is {lj}, want {want}");
            }
            ensure!(torsion(&d, &g).map_err(|e| e.to_string())? == t, "T != ascents on {cyc:?}");
            count += 1;
            if n < 3 {
                continue;
            }
            for k in 0..n {
                let (kind, forward) = twist_type(&cyc, k).map_err(|e| e.to_string())?;
                let (d1, g1) = cycle_diagram(&cycle_to_images(&twist(&cyc, k)));
                let l1 = lambda(&d1, &g1);
                let dl = l1[1] - l[1];
                let dt = torsion(&d1, &g1).map_err(|e| e.to_string())? - t;
                let step = if kind == Twist::A { 0 } else { -1 };
                let want = if forward { step } else { -step };
                ensure!(
                    l1[0] - l[0] == dl && (dl, dt) == (want, want),
                    "{kind:?} twist of {cyc:?} at {k} changes (lambda, T) by ({dl}, {dt})"
                );
                twists[kind as usize] += 1;
            }
        }
    }
    Ok(format!("{count} cyclic permutations, twists A/B/C = {}/{}/{}", twists[0], twists[1], twists[2]))
}

fn random_series<R: Rng>(rng: &mut R, grp: &WeightedGroup, n: usize, signed: bool, terms: usize) -> Series<Diagram> {
    Series::from_terms((0..terms).map(|_| (random_diagram(rng, grp, n, 1, signed), q(rng.gen_range(-5..=5)))))
}

fn positive_integral(x: &Series<Diagram>) -> bool {
    x.iter().all(|(_, c)| c.is_integer() && *c > q(0))
}

fn symmetry_maps(seed: u64) -> Verdict {
    let mut rng = rng(seed, 5);
    let triv = WeightedGroup::trivial();
    for t in 0..200 {
        let grp = if t % 2 == 0 { z2() } else { z2_weighted() };
        let n = t % 4;
        let signs = ForgetSigns { grp: grp.clone() };
        let decs = ForgetDecorations { grp: grp.clone(), ball: None };
        let chain = Chain(vec![Box::new(ForgetSigns { grp: grp.clone() }), Box::new(ForgetDecorations { grp: grp.clone(), ball: None })]);
        let x = random_series(&mut rng, &grp, n, true, 5);
        let levels: [(&dyn Coarsening, Series<Diagram>); 3] = [
            (&signs, random_series(&mut rng, &grp, n, false, 3)),
            (&decs, random_series(&mut rng, &triv, n, true, 3)),
            (&chain, random_series(&mut rng, &triv, n, false, 3)),
        ];
        for (c, y) in &levels {
            let s = inject_s(*c, y).map_err(|e| e.to_string())?;
            ensure!(pairing(&s, &x, true) == pairing(y, &forget_t(*c, &x), true), "adjointness fails at degree {n}");
            for (g, _) in y.iter() {
                ensure!(positive_integral(&inject_s(*c, &Series::single(g.clone())).unwrap()), "non-integral weight over {g:?}");
            }
        }
        let y = &levels[2].1;
        let staged = inject_s(&signs, &inject_s(&decs, y).unwrap()).unwrap();
        ensure!(inject_s(&chain, y).unwrap() == staged, "S is not functorial at degree {n}");
        ensure!(forget_t(&chain, &x) == forget_t(&decs, &forget_t(&signs, &x)), "T is not functorial at degree {n}");
        let a = random_series(&mut rng, &grp, n, false, 3);
        ensure!(pairing(&arrow_s(&grp, &a), &x, true) == pairing(&a, &arrow_t(&grp, &x), true), "twisted adjointness fails at degree {n}");
    }
    Ok("200 pairs".into())
}

fn polyak_spans(_seed: u64) -> Verdict {
    let mut parts = vec![];
    for grp in [z2(), z2_weighted()] {
        for rep in polyak_isomorphism(&grp, 3, 1) {
            ensure!(rep.ok(), "{} over {}: {rep:?}", rep.family, grp.spec());
            parts.push(format!("{}:{}", rep.family, rep.rank_polyak));
        }
    }
    Ok(format!("ranks {}", parts.join(" ")))
}

fn a2t_span(_seed: u64) -> Verdict {
    let mut total = 0;
    for grp in [z2(), z2_weighted()] {
        let mut span = SpanSolver::new(true);
        for g in gen_relations(&grp, Family::A6T, 3, 1).iter().chain(&gen_relations(&grp, Family::AP2Pair, 3, 1)) {
            span.add(g.iter());
        }
        let a2t = gen_relations(&grp, Family::A2T, 3, 1);
        ensure!(!a2t.is_empty(), "no A2T relators over {}", grp.spec());
        for r in &a2t {
            ensure!(span.decompose(r.iter()).is_some(), "A2T relator outside the span over {}: {r:?}", grp.spec());
        }
        total += a2t.len();
    }
    Ok(format!("{total} relators decomposed"))
}

/// Random diagram and single move changing the value of `x`, if found.
fn counterexample(
    rng: &mut ChaCha8Rng,
    grp: &WeightedGroup,
    x: &Series<Diagram>,
    kinds: &[MoveKind],
    tries: usize,
) -> Option<(Diagram, Move)> {
    let top = x.max_degree().unwrap_or(0);
    for i in 0..tries {
        let g = random_sparse_diagram(rng, grp, 1 + i % (top + 2), 1, 0.7, true);
        if let Some(m) = enumerate_moves(grp, &g, 1, kinds).choose(rng) {
            let h = apply(grp, &g, m).unwrap().canonical(grp);
            if eval_arrow(grp, x, &g) != eval_arrow(grp, x, &h) {
                return Some((g, m.clone()));
            }
        }
    }
    // Every decorated site of the removal kinds, one degree past the formula.
    let dec = grp.elements()?;
    for &kind in kinds.iter().filter(|k| MoveKind::DECREASING.contains(k)) {
        for n in top..=top + 1 {
            for (g, m) in decorated_sites(grp, n, &dec, kind) {
                let h = apply(grp, &g, &m).unwrap().canonical(grp);
                if eval_arrow(grp, x, &g.canonical(grp)) != eval_arrow(grp, x, &h) {
                    return Some((g, m));
                }
            }
        }
    }
    None
}

fn failing(c: &Certificate) -> Vec<&'static str> {
    let mut v = vec![];
    for (ok, name) in [(c.w_lift, "w_lift"), (c.ap1, "ap1"), (c.ap2, "ap2"), (c.triangle, "triangle")] {
        if !ok {
            v.push(name);
        }
    }
    v
}

/// A basis series that satisfies every relation family except `skip`, and
/// fails the certificate exactly at `cond`.
fn control(grp: &WeightedGroup, orb: &Orbits, n: usize, skip: Family, cond: &str) -> Option<Series<Diagram>> {
    invariant_basis(grp, n, 1, &[skip]).into_iter().find(|x| failing(&certify_series(orb, x)) == [cond])
}

fn invariance_pipeline(seed: u64) -> Verdict {
    let mut rng = rng(seed, 8);
    let mut formulas: Vec<(WeightedGroup, Series<Diagram>)> = vec![];
    for (grp, degrees) in [(WeightedGroup::trivial(), 1..=3), (z2_weighted(), 1..=2)] {
        for n in degrees {
            let basis = invariant_basis(&grp, n, 1, &[]);
            if basis.is_empty() {
                continue;
            }
            let mut x = Series::new();
            for b in &basis {
                x = x.plus(&b.scaled(&q(rng.gen_range(-2..=2))));
            }
            formulas.push((grp.clone(), x));
        }
    }
    let z3 = WeightedGroup::cyclic(3);
    let g1 = z3.generator(1).unwrap();
    formulas.push((z3.clone(), gv_series(&z3, &[g1.clone(), g1.clone(), z3.inv(&g1)], 2).map_err(|e| e.to_string())?));
    for (grp, x) in &formulas {
        let orb = Orbits::new(grp, 1);
        let c = certify_series(&orb, x);
        ensure!(c.pass(), "a formula over {} fails: {}", grp.spec(), c.report().replace('\n', " "));
        let top = x.max_degree().unwrap_or(0);
        for i in 0..200 {
            let g = random_sparse_diagram(&mut rng, grp, 1 + i % (top + 2), 1, 0.7, true);
            let (h, path) = random_walk(&mut rng, grp, &g, &MoveKind::ALL, 1, 1 + i % 6);
            ensure!(eval_arrow(grp, x, &g) == eval_arrow(grp, x, &h), "value changes along {path:?} from {g:?}");
        }
    }

    let grp = z2_weighted();
    let orb = Orbits::new(&grp, 1);
    let one = grp.identity();
    let gen = grp.generator(1).unwrap();
    let deg1 = Diagram::from_arrows(&[Arrow { tail: 0, head: 1, writhe: 0 }], vec![one, gen]).unwrap().canonical(&grp);
    let ap1 = Series::single(deg1);
    let mut w = invariant_basis(&grp, 2, 1, &[]).into_iter().next().ok_or("no degree-2 formula")?;
    let (k, _) = w.iter().next().map(|(k, c)| (k.clone(), c.clone())).unwrap();
    w.add_term(k, q(1));
    let controls = [
        ("w_lift", Some(w), vec![MoveKind::W]),
        ("ap1", Some(ap1), vec![MoveKind::R1Plus, MoveKind::R1Minus]),
        ("ap2", control(&grp, &orb, 2, Family::AP2Pair, "ap2"), vec![MoveKind::R2Plus, MoveKind::R2Minus]),
        ("triangle", control(&z2(), &Orbits::new(&z2(), 1), 3, Family::A6T, "triangle"), vec![MoveKind::R3]),
    ];
    let mut found = vec![];
    for (cond, x, kinds) in controls {
        let x = x.ok_or(format!("no control failing only {cond}"))?;
        let cgrp = if cond == "triangle" { z2() } else { grp.clone() };
        let c = certify_series(&Orbits::new(&cgrp, 1), &x);
        ensure!(!c.pass() && failing(&c).contains(&cond), "control for {cond} gives {}", c.report().replace('\n', " "));
        ensure!(counterexample(&mut rng, &cgrp, &x, &kinds, 2000).is_some(), "no move changes the {cond} control");
        found.push(cond);
    }
    Ok(format!("{} certified formulas, controls {} rejected", formulas.len(), found.join("/")))
}

fn gammas(grp: &WeightedGroup, n: usize) -> Vec<Vec<Elem>> {
    let (x1, x2) = (grp.generator(1).unwrap(), grp.generator(2).unwrap());
    let x12 = grp.mul(&x1, &x2);
    vec![
        vec![x1.clone(); n + 1],
        (0..=n).map(|i| if i % 2 == 0 { x1.clone() } else { x2.clone() }).collect(),
        (0..=n).map(|i| [&x1, &x2, &x12][i % 3].clone()).collect(),
    ]
}

fn gv_invariants(seed: u64) -> Verdict {
    let mut rng = rng(seed, 9);
    let grp = WeightedGroup::free(2);
    let mut nonzero = 0;
    let mut replays = 0;
    for n in 2..=3 {
        let gs = gammas(&grp, n);
        for t in 0..50 {
            let gamma = &gs[t % gs.len()];
            let base = if t % 2 == 0 {
                let d = gamma_instance(&mut rng, &grp, n, gamma);
                let w: Vec<i8> = (0..n).map(|_| if rng.gen() { 1 } else { -1 }).collect();
                random_walk(&mut rng, &grp, &d.with_writhes(&w), &[MoveKind::R1Plus, MoveKind::W], 1, 1).0
            } else {
                random_sparse_diagram(&mut rng, &grp, n + 1, 1, 0.6, true)
            };
            let v = gv_eval(&grp, gamma, n, &base).map_err(|e| e.to_string())?;
            nonzero += !v.is_zero() as usize;
            let (h, path) = random_walk(&mut rng, &grp, &base, &MoveKind::ALL, 1, 1 + t % 6);
            ensure!(gv_eval(&grp, gamma, n, &h).unwrap() == v, "GV changes along {path:?} from {base:?}");
            replays += 1;
        }
        for gamma in &gs {
            let phi = phi_gamma(&grp, n, gamma).map_err(|e| e.to_string())?;
            for t in 0..20 {
                let a = if t % 3 == 0 {
                    random_sparse_diagram(&mut rng, &grp, n, 1, 0.5, false)
                } else {
                    gamma_instance(&mut rng, &grp, n, gamma)
                };
                let direct = dec_count(&grp, &a, gamma).map_err(|e| e.to_string())?;
                ensure!(direct == phi_pairing(&grp, &phi, &a), "#Dec mismatch on {a:?}");
            }
        }
    }
    ensure!(nonzero >= 8, "only {nonzero} nonzero values");
    let u1 = gv_universal(1);
    ensure!(u1.len() == 1 && u1[0].stabilizer_order() == 1, "gv_universal(1) has {} classes", u1.len());
    Ok(format!("{replays} replays ({nonzero} nonzero), #Dec identity, universal(1) ok"))
}

fn non_nullhomotopic(rng: &mut ChaCha8Rng, grp: &WeightedGroup, n: usize) -> Diagram {
    loop {
        let d = random_sparse_diagram(rng, grp, n, 1, 0.5, true);
        if !grp.is_identity(&d.total_class(grp)) {
            return d;
        }
    }
}

fn whitney_pair(seed: u64) -> Verdict {
    let mut rng = rng(seed, 10);
    let grp = WeightedGroup::integers();
    let kinds = [(1, true), (-1, false), (1, false), (-1, true)];
    let want = [(0, 1), (-1, 0), (1, 0), (0, -1)];
    for n in 0..=3 {
        for _ in 0..5 {
            let g = non_nullhomotopic(&mut rng, &grp, n);
            let w0 = whitney(&grp, &g).map_err(|e| e.to_string())?;
            for edge in 0..g.num_positions() {
                for ((writhe, head_first), (dl, dr)) in kinds.iter().zip(want) {
                    let split = if n == 0 { g.edge(0).clone() } else { grp.identity() };
                    let m = Move::R1Plus { edge, split, writhe: *writhe, head_first: *head_first };
                    let w1 = whitney(&grp, &apply(&grp, &g, &m).map_err(|e| e.to_string())?).unwrap();
                    ensure!((w1.v_l - w0.v_l, w1.v_r - w0.v_r) == (dl, dr), "R1 {m:?} on {g:?}");
                }
            }
        }
    }
    let regular = [MoveKind::R2Plus, MoveKind::R2Minus, MoveKind::R3, MoveKind::W];
    for t in 0..100 {
        let g = non_nullhomotopic(&mut rng, &grp, 1 + t % 4);
        let w = whitney(&grp, &g).unwrap();
        let (h, path) = random_walk(&mut rng, &grp, &g, &regular, 1, 1 + t % 6);
        ensure!(whitney(&grp, &h).unwrap() == w, "regular moves {path:?} change (v_l, v_r) on {g:?}");
        let (h, path) = random_walk(&mut rng, &grp, &g, &MoveKind::ALL, 1, 1 + t % 6);
        let wh = whitney(&grp, &h).unwrap();
        ensure!(wh.writhe() - h.total_writhe() == w.writhe() - g.total_writhe(), "moves {path:?} change v_r + v_l - writhe on {g:?}");
    }
    Ok("R1 table, 100 regular and 100 general replays".into())
}

fn abelianization(seed: u64) -> Verdict {
    let mut rng = rng(seed, 11);
    for grp in [WeightedGroup::integers(), WeightedGroup::cyclic(4)] {
        let ball = grp.ball(2);
        for t in 0..100 {
            let n = t % 6;
            let d = random_diagram(&mut rng, &grp, n, 2, true);
            let mut d2 = d.clone();
            if n > 0 {
                for _ in 0..1 + t % 5 {
                    d2 = w0_shift(&grp, &d2, rng.gen_range(0..n), ball.choose(&mut rng).unwrap());
                }
            }
            ensure!(abelianize(&grp, &d).unwrap() == abelianize(&grp, &d2).unwrap(), "w0-moves change the abelianization of {d:?}");
            let moves = connect_w0(&grp, &d, &d2).ok_or_else(|| format!("no w0-sequence found from {d:?} to {d2:?}"))?;
            let mut cur = d.clone();
            for m in &moves {
                cur = apply(&grp, &cur, m).map_err(|e| e.to_string())?;
            }
            ensure!(cur == d2, "recovered sequence ends elsewhere");
        }
    }
    Ok("100 pairs over Z and Z/4".into())
}
