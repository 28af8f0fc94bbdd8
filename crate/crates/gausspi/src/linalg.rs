//! Exact sparse row reduction over the rationals.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;
pub type Row = BTreeMap<usize, Q>;

fn axpy(y: &mut Row, a: &Q, x: &Row) {
    for (c, v) in x {
        let e = y.entry(*c).or_insert_with(Q::zero);
        *e += a * v;
        if e.is_zero() {
            y.remove(c);
        }
    }
}

/// Echelon basis of a growing set of sparse vectors. Each stored row has its
/// minimal column as pivot with coefficient 1. With tracking on, every row
/// also records its expression in the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<(Row, Row)>,
    pivot_row: HashMap<usize, usize>,
    inserted: usize,
    track: bool,
}

impl Echelon {
    pub fn new(track: bool) -> Echelon {
        Echelon { track, ..Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Fully reduces `v`; returns the residual and, with tracking, the
    /// combination of inserted vectors that was subtracted.
    pub fn reduce(&self, mut v: Row) -> (Row, Row) {
        let mut combo = Row::new();
        let mut cursor: Option<usize> = None;
        loop {
            let next = match cursor {
                None => v.keys().next().copied(),
                Some(c) => v.range(c + 1..).next().map(|(k, _)| *k),
            };
            let Some(c) = next else { break };
            match self.pivot_row.get(&c) {
                Some(&r) => {
                    let a = -v[&c].clone();
                    let (row, rc) = &self.rows[r];
                    axpy(&mut v, &a, row);
                    if self.track {
                        axpy(&mut combo, &a, rc);
                    }
                }
                None => cursor = Some(c),
            }
        }
        (v, combo)
    }

    /// Inserts a vector; returns true if it was independent of the previous ones.
    pub fn insert(&mut self, v: Row) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (mut res, combo) = self.reduce(v);
        if res.is_empty() {
            return false;
        }
        let (&pc, lead) = res.iter().next().unwrap();
        let inv = Q::one() / lead.clone();
        for x in res.values_mut() {
            *x *= &inv;
        }
        let mut rc = Row::new();
        if self.track {
            // row = (v - combo·inserted) * inv
            rc.insert(id, inv.clone());
            axpy(&mut rc, &inv, &combo);
        }
        self.pivot_row.insert(pc, self.rows.len());
        self.rows.push((res, rc));
        true
    }

    pub fn contains(&self, v: Row) -> bool {
        self.reduce(v).0.is_empty()
    }
}

/// Column indexing of arbitrary keys.
#[derive(Clone, Debug)]
pub struct Columns<K: Eq + Hash + Clone> {
    index: HashMap<K, usize>,
}

impl<K: Eq + Hash + Clone> Default for Columns<K> {
    fn default() -> Self {
        Columns { index: HashMap::new() }
    }
}

impl<K: Eq + Hash + Clone> Columns<K> {
    pub fn row<'a>(&mut self, terms: impl IntoIterator<Item = (&'a K, &'a Q)>) -> Row
    where
        K: 'a,
    {
        let mut r = Row::new();
        for (k, v) in terms {
            let n = self.index.len();
            let c = *self.index.entry(k.clone()).or_insert(n);
            if !v.is_zero() {
                r.insert(c, v.clone());
            }
        }
        r
    }

    /// Row for lookup only; unknown keys get fresh columns that no pivot uses.
    pub fn row_lookup<'a>(&self, terms: impl IntoIterator<Item = (&'a K, &'a Q)>) -> Row
    where
        K: 'a,
    {
        let mut r = Row::new();
        let mut fresh = usize::MAX;
        for (k, v) in terms {
            let c = match self.index.get(k) {
                Some(&c) => c,
                None => {
                    fresh -= 1;
                    fresh
                }
            };
            if !v.is_zero() {
                r.insert(c, v.clone());
            }
        }
        r
    }
}

/// Spans of keyed sparse vectors.
#[derive(Clone, Debug)]
pub struct SpanSolver<K: Eq + Hash + Clone> {
    cols: Columns<K>,
    ech: Echelon,
}

impl<K: Eq + Hash + Clone> SpanSolver<K> {
    pub fn new(track: bool) -> Self {
        SpanSolver { cols: Columns::default(), ech: Echelon::new(track) }
    }

    pub fn add<'a>(&mut self, v: impl IntoIterator<Item = (&'a K, &'a Q)>) -> bool
    where
        K: 'a,
    {
        let r = self.cols.row(v);
        self.ech.insert(r)
    }

    pub fn rank(&self) -> usize {
        self.ech.rank()
    }

    pub fn contains<'a>(&self, v: impl IntoIterator<Item = (&'a K, &'a Q)>) -> bool
    where
        K: 'a,
    {
        self.ech.contains(self.cols.row_lookup(v))
    }

    /// Coefficients over the added vectors reproducing `v`, if it lies in the span.
    pub fn decompose<'a>(&self, v: impl IntoIterator<Item = (&'a K, &'a Q)>) -> Option<Vec<Q>>
    where
        K: 'a,
    {
        assert!(self.ech.track, "decomposition needs tracking");
        let (res, combo) = self.ech.reduce(self.cols.row_lookup(v));
        if !res.is_empty() {
            return None;
        }
        let mut out = vec![Q::zero(); self.ech.inserted];
        for (i, c) in combo {
            out[i] = -c;
        }
        Some(out)
    }
}

/// Reduced row echelon form; returns the rows and their pivot columns.
pub fn rref(rows: impl IntoIterator<Item = Row>) -> Vec<(usize, Row)> {
    let mut e = Echelon::new(false);
    for r in rows {
        e.insert(r);
    }
    let mut out: Vec<(usize, Row)> = e.rows.into_iter().map(|(r, _)| (*r.keys().next().unwrap(), r)).collect();
    out.sort_by_key(|(p, _)| *p);
    for i in (0..out.len()).rev() {
        let (p, ri) = out[i].clone();
        for (_, rj) in out.iter_mut().take(i) {
            if let Some(c) = rj.get(&p).cloned() {
                axpy(rj, &-c, &ri);
            }
        }
    }
    out
}

/// Basis of the vectors on columns `0..ncols` orthogonal to every row.
pub fn nullspace(rows: impl IntoIterator<Item = Row>, ncols: usize) -> Vec<Row> {
    let red = rref(rows);
    let pivots: HashMap<usize, usize> = red.iter().enumerate().map(|(i, (p, _))| (*p, i)).collect();
    let mut out = vec![];
    for f in 0..ncols {
        if pivots.contains_key(&f) {
            continue;
        }
        let mut v = Row::new();
        v.insert(f, Q::one());
        for (p, r) in &red {
            if let Some(c) = r.get(&f) {
                v.insert(*p, -c.clone());
            }
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn decomposition_reconstructs() {
        let gens: Vec<Vec<(&str, Q)>> = vec![
            vec![("a", q(1)), ("b", q(2))],
            vec![("b", q(1)), ("c", q(-1))],
            vec![("a", q(1)), ("b", q(3)), ("c", q(-1))],
            vec![("d", q(5))],
        ];
        let mut s = SpanSolver::new(true);
        let indep: Vec<bool> = gens.iter().map(|g| s.add(g.iter().map(|(k, v)| (k, v)))).collect();
        assert_eq!(indep, vec![true, true, false, true]);
        let v = [("a", q(2)), ("b", q(7)), ("c", q(-3)), ("d", q(10))];
        let c = s.decompose(v.iter().map(|(k, v)| (k, v))).unwrap();
        let mut total: BTreeMap<&str, Q> = BTreeMap::new();
        for (g, ci) in gens.iter().zip(&c) {
            for (k, x) in g {
                *total.entry(k).or_insert_with(Q::zero) += ci * x;
            }
        }
        total.retain(|_, x| !x.is_zero());
        let want: BTreeMap<&str, Q> = v.iter().cloned().collect();
        assert_eq!(total, want);
        assert!(s.decompose([("e", q(1))].iter().map(|(k, v)| (k, v))).is_none());
        let two = [("a", q(2)), ("b", q(4))];
        let c = s.decompose(two.iter().map(|(k, v)| (k, v))).unwrap();
        assert_eq!(c, vec![q(2), q(0), q(0), q(0)]);
    }

    #[test]
    fn nullspace_is_orthogonal() {
        let rows: Vec<Row> = vec![
            [(0, q(1)), (1, q(2)), (3, q(1))].into_iter().collect(),
            [(1, q(1)), (2, q(-1))].into_iter().collect(),
            [(0, q(1)), (1, q(3)), (2, q(-1)), (3, q(1))].into_iter().collect(),
        ];
        let ns = nullspace(rows.clone(), 5);
        assert_eq!(ns.len(), 3);
        for v in &ns {
            for r in &rows {
                let dot: Q = r.iter().map(|(c, x)| x * v.get(c).cloned().unwrap_or_else(Q::zero)).sum();
                assert!(dot.is_zero());
            }
        }
    }
}
