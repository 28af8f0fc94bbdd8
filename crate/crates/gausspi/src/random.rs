//! Random generation of diagrams and move sequences, seeded and deterministic.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{Arrow, Diagram};
use crate::group::{Elem, WeightedGroup};
use crate::moves::{apply, enumerate_moves, w0_shift, Move, MoveKind};

pub fn random_elem<R: Rng>(rng: &mut R, ball: &[Elem]) -> Elem {
    ball.choose(rng).unwrap().clone()
}

/// Random canonical diagram of degree `n` with decorations from `ball(r)`.
/// Writhes are random signs when `signed`, zero otherwise.
pub fn random_diagram<R: Rng>(rng: &mut R, grp: &WeightedGroup, n: usize, r: usize, signed: bool) -> Diagram {
    let ball = grp.ball(r);
    random_diagram_from(rng, grp, n, &ball, signed)
}

pub fn random_diagram_from<R: Rng>(rng: &mut R, grp: &WeightedGroup, n: usize, ball: &[Elem], signed: bool) -> Diagram {
    if n == 0 {
        return Diagram::circle(grp, &random_elem(rng, ball));
    }
    let mut pos: Vec<usize> = (0..2 * n).collect();
    pos.shuffle(rng);
    let arrows: Vec<Arrow> = pos
        .chunks(2)
        .map(|c| Arrow {
            tail: c[0],
            head: c[1],
            writhe: if signed {
                if rng.gen_bool(0.5) {
                    1
                } else {
                    -1
                }
            } else {
                0
            },
        })
        .collect();
    let edges = (0..2 * n).map(|_| random_elem(rng, ball)).collect();
    Diagram::from_arrows(&arrows, edges).unwrap().canonical(grp)
}

/// Random diagram where each edge is the identity with probability `p_one`,
/// which makes move sites common.
pub fn random_sparse_diagram<R: Rng>(rng: &mut R, grp: &WeightedGroup, n: usize, r: usize, p_one: f64, signed: bool) -> Diagram {
    let d = random_diagram(rng, grp, n, r, signed);
    if n == 0 {
        return d;
    }
    let edges = d.edges().iter().map(|g| if rng.gen_bool(p_one) { grp.identity() } else { g.clone() }).collect();
    d.with_edges(edges).canonical(grp)
}

/// Random walk of at most `len` admissible moves, canonicalizing after each.
/// Stops early at a diagram without admissible moves.
pub fn random_walk<R: Rng>(
    rng: &mut R,
    grp: &WeightedGroup,
    g: &Diagram,
    kinds: &[MoveKind],
    radius: usize,
    len: usize,
) -> (Diagram, Vec<Move>) {
    let mut cur = g.canonical(grp);
    let mut path = vec![];
    for _ in 0..len {
        let ms = enumerate_moves(grp, &cur, radius, kinds);
        let Some(m) = ms.choose(rng) else { break };
        cur = apply(grp, &cur, m).unwrap().canonical(grp);
        path.push(m.clone());
    }
    (cur, path)
}

/// One w₀-move per arrow with conjugators from `ball(radius)`.
pub fn random_w0_shifts<R: Rng>(rng: &mut R, grp: &WeightedGroup, d: &Diagram, radius: usize) -> Diagram {
    let ball = grp.ball(radius);
    let mut out = d.clone();
    for a in 0..d.degree() {
        out = w0_shift(grp, &out, a, ball.choose(rng).unwrap());
    }
    out
}
