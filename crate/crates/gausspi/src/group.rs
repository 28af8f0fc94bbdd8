//! Weighted groups: a group together with a homomorphism to {+1, -1}.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{domain_err, parse_err, Error, Result};

/// Group element in normal form. The meaning of the entries depends on the group:
/// empty for the trivial group, a coordinate vector for free abelian groups,
/// a freely reduced word of signed letters `±(i+1)` for free groups, a single
/// residue for cyclic groups and a single index for table groups.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Elem(pub SmallVec<[i64; 4]>);

impl Elem {
    pub fn from_slice(v: &[i64]) -> Elem {
        Elem(SmallVec::from_slice(v))
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct Table {
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    class_rep: Vec<usize>,
}

impl Table {
    pub fn new(mult: Vec<Vec<usize>>) -> Result<Table> {
        let n = mult.len();
        if n == 0 || mult.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return domain_err("multiplication table must be square with entries in range");
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mult[e][x] == x && mult[x][e] == x))
            .ok_or_else(|| Error::Domain("table has no identity".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return domain_err("table is not associative");
                    }
                }
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| mult[a][b] == identity).ok_or_else(|| Error::Domain(format!("element {a} has no inverse")))?;
        }
        let mut class_rep = vec![0; n];
        for a in 0..n {
            class_rep[a] = (0..n).map(|h| mult[mult[h][a]][inverse[h]]).min().unwrap();
        }
        Ok(Table { mult, identity, inverse, class_rep })
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Trivial,
    FreeAbelian(usize),
    Cyclic(i64),
    Free(usize),
    Table(Arc<Table>),
}

/// A group with its weight homomorphism. Weights are stored per generator,
/// except for table groups where they are stored per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGroup {
    kind: Kind,
    weights: Vec<i8>,
}

impl WeightedGroup {
    pub fn trivial() -> Self {
        WeightedGroup { kind: Kind::Trivial, weights: vec![] }
    }

    pub fn integers() -> Self {
        Self::free_abelian(1)
    }

    pub fn free_abelian(k: usize) -> Self {
        WeightedGroup { kind: Kind::FreeAbelian(k), weights: vec![1; k] }
    }

    pub fn cyclic(m: i64) -> Self {
        assert!(m >= 1);
        WeightedGroup { kind: Kind::Cyclic(m), weights: vec![1] }
    }

    pub fn free(k: usize) -> Self {
        WeightedGroup { kind: Kind::Free(k), weights: vec![1; k] }
    }

    pub fn table(t: Table) -> Self {
        let n = t.order();
        WeightedGroup { kind: Kind::Table(Arc::new(t)), weights: vec![1; n] }
    }

    /// Replace the weight assignment. For table groups the list runs over all
    /// elements and must define a homomorphism; otherwise it runs over generators.
    pub fn with_weights(mut self, w: Vec<i8>) -> Result<Self> {
        if w.iter().any(|&x| x != 1 && x != -1) {
            return domain_err("weights must be +1 or -1");
        }
        let expected = match &self.kind {
            Kind::Trivial => 0,
            Kind::FreeAbelian(k) | Kind::Free(k) => *k,
            Kind::Cyclic(_) => 1,
            Kind::Table(t) => t.order(),
        };
        if w.len() != expected {
            return domain_err(format!("expected {expected} weights, got {}", w.len()));
        }
        match &self.kind {
            Kind::Cyclic(m) if w[0] == -1 && m % 2 != 0 => {
                return domain_err("weight -1 on the generator of an odd cyclic group is not a homomorphism");
            }
            Kind::Table(t) => {
                let n = t.order();
                for a in 0..n {
                    for b in 0..n {
                        if w[t.mult[a][b]] != w[a] * w[b] {
                            return domain_err("weights do not define a homomorphism on the table");
                        }
                    }
                }
            }
            _ => {}
        }
        self.weights = w;
        Ok(self)
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn weights(&self) -> &[i8] {
        &self.weights
    }

    pub fn has_trivial_weight(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    pub fn is_abelian(&self) -> bool {
        match &self.kind {
            Kind::Trivial | Kind::FreeAbelian(_) | Kind::Cyclic(_) => true,
            Kind::Free(k) => *k <= 1,
            Kind::Table(t) => {
                let n = t.order();
                (0..n).all(|a| (0..n).all(|b| t.mult[a][b] == t.mult[b][a]))
            }
        }
    }

    /// All elements, when the group is finite.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        match &self.kind {
            Kind::Trivial => Some(vec![Elem::default()]),
            Kind::Cyclic(m) => Some((0..*m).map(|i| Elem::from_slice(&[i])).collect()),
            Kind::Table(t) => Some((0..t.order() as i64).map(|i| Elem::from_slice(&[i])).collect()),
            Kind::FreeAbelian(0) | Kind::Free(0) => Some(vec![self.identity()]),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.elements().is_some()
    }

    pub fn identity(&self) -> Elem {
        match &self.kind {
            Kind::Trivial | Kind::Free(_) => Elem::default(),
            Kind::FreeAbelian(k) => Elem(SmallVec::from_elem(0, *k)),
            Kind::Cyclic(_) => Elem::from_slice(&[0]),
            Kind::Table(t) => Elem::from_slice(&[t.identity as i64]),
        }
    }

    pub fn is_identity(&self, g: &Elem) -> bool {
        *g == self.identity()
    }

    pub fn validate(&self, g: &Elem) -> bool {
        let v = &g.0;
        match &self.kind {
            Kind::Trivial => v.is_empty(),
            Kind::FreeAbelian(k) => v.len() == *k,
            Kind::Cyclic(m) => v.len() == 1 && (0..*m).contains(&v[0]),
            Kind::Table(t) => v.len() == 1 && (0..t.order() as i64).contains(&v[0]),
            Kind::Free(k) => v.iter().all(|&x| x != 0 && x.unsigned_abs() as usize <= *k) && v.windows(2).all(|p| p[0] != -p[1]),
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match &self.kind {
            Kind::Trivial => Elem::default(),
            Kind::FreeAbelian(_) => Elem(a.0.iter().zip(b.0.iter()).map(|(x, y)| x + y).collect()),
            Kind::Cyclic(m) => Elem::from_slice(&[(a.0[0] + b.0[0]).rem_euclid(*m)]),
            Kind::Table(t) => Elem::from_slice(&[t.mult[a.0[0] as usize][b.0[0] as usize] as i64]),
            Kind::Free(_) => {
                let mut w: SmallVec<[i64; 4]> = a.0.clone();
                for &x in b.0.iter() {
                    if w.last() == Some(&-x) {
                        w.pop();
                    } else {
                        w.push(x);
                    }
                }
                Elem(w)
            }
        }
    }

    pub fn mul3(&self, a: &Elem, b: &Elem, c: &Elem) -> Elem {
        self.mul(&self.mul(a, b), c)
    }

    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a Elem>) -> Elem {
        items.into_iter().fold(self.identity(), |acc, x| self.mul(&acc, x))
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        match &self.kind {
            Kind::Trivial => Elem::default(),
            Kind::FreeAbelian(_) => Elem(a.0.iter().map(|x| -x).collect()),
            Kind::Cyclic(m) => Elem::from_slice(&[(-a.0[0]).rem_euclid(*m)]),
            Kind::Table(t) => Elem::from_slice(&[t.inverse[a.0[0] as usize] as i64]),
            Kind::Free(_) => Elem(a.0.iter().rev().map(|x| -x).collect()),
        }
    }

    pub fn pow(&self, a: &Elem, k: i64) -> Elem {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        (0..k.unsigned_abs()).fold(self.identity(), |acc, _| self.mul(&acc, &base))
    }

    pub fn weight(&self, a: &Elem) -> i8 {
        match &self.kind {
            Kind::Trivial => 1,
            Kind::FreeAbelian(_) => {
                a.0.iter().zip(self.weights.iter()).map(|(c, &w)| if w == -1 && c.rem_euclid(2) == 1 { -1 } else { 1 }).product()
            }
            Kind::Cyclic(_) => {
                if self.weights[0] == -1 && a.0[0] % 2 == 1 {
                    -1
                } else {
                    1
                }
            }
            Kind::Table(t) => {
                let _ = t;
                self.weights[a.0[0] as usize]
            }
            Kind::Free(_) => a.0.iter().map(|&x| self.weights[(x.unsigned_abs() - 1) as usize]).product(),
        }
    }

    /// Canonical representative of the conjugacy class.
    pub fn conj_class(&self, a: &Elem) -> Elem {
        match &self.kind {
            Kind::Trivial | Kind::FreeAbelian(_) | Kind::Cyclic(_) => a.clone(),
            Kind::Table(t) => Elem::from_slice(&[t.class_rep[a.0[0] as usize] as i64]),
            Kind::Free(_) => {
                let mut w: Vec<i64> = a.0.to_vec();
                while w.len() >= 2 && w[0] == -w[w.len() - 1] {
                    w.pop();
                    w.remove(0);
                }
                let n = w.len();
                if n == 0 {
                    return Elem::default();
                }
                let best = (0..n)
                    .map(|r| {
                        let mut v = w[r..].to_vec();
                        v.extend_from_slice(&w[..r]);
                        v
                    })
                    .min()
                    .unwrap();
                Elem::from_slice(&best)
            }
        }
    }

    pub fn conjugate(&self, g: &Elem, h: &Elem) -> Elem {
        // h g h^-1
        self.mul3(h, g, &self.inv(h))
    }

    pub fn length(&self, a: &Elem) -> i64 {
        match &self.kind {
            Kind::Trivial => 0,
            Kind::FreeAbelian(_) => a.0.iter().map(|x| x.abs()).sum(),
            Kind::Cyclic(m) => a.0[0].min(m - a.0[0]),
            Kind::Table(t) => i64::from(a.0[0] as usize != t.identity),
            Kind::Free(_) => a.0.len() as i64,
        }
    }

    /// Elements of length at most `r`, ordered by length and then
    /// lexicographically. For table groups every non-identity element has
    /// length 1, so the ball is the whole group as soon as r >= 1.
    pub fn ball(&self, r: usize) -> Vec<Elem> {
        let r = r as i64;
        let mut out: Vec<Elem> = match &self.kind {
            Kind::Trivial => vec![Elem::default()],
            Kind::Cyclic(_) | Kind::Table(_) => self.elements().unwrap(),
            Kind::FreeAbelian(k) => {
                let mut acc = vec![Vec::<i64>::new()];
                for _ in 0..*k {
                    let mut next = vec![];
                    for v in &acc {
                        let used: i64 = v.iter().map(|x: &i64| x.abs()).sum();
                        for c in -(r - used)..=(r - used) {
                            let mut w = v.clone();
                            w.push(c);
                            next.push(w);
                        }
                    }
                    acc = next;
                }
                acc.into_iter().map(|v| Elem::from_slice(&v)).collect()
            }
            Kind::Free(k) => {
                let k = *k as i64;
                let mut all = vec![Elem::default()];
                let mut frontier = vec![Elem::default()];
                for _ in 0..r {
                    let mut next = vec![];
                    for w in &frontier {
                        for l in (-k..=k).filter(|&l| l != 0) {
                            if w.0.last() != Some(&-l) {
                                let mut v = w.clone();
                                v.0.push(l);
                                next.push(v);
                            }
                        }
                    }
                    all.extend(next.iter().cloned());
                    frontier = next;
                }
                all
            }
        };
        out.retain(|g| self.length(g) <= r);
        out.sort_by(|a, b| self.length(a).cmp(&self.length(b)).then_with(|| a.cmp(b)));
        out
    }

    /// Parse a group specification: `trivial`, `Z`, `Z^k`, `Z/m`, `free k`,
    /// `table <path>`, each optionally followed by `w <signs>`.
    pub fn parse_spec(spec: &str) -> Result<WeightedGroup> {
        let (base, weights) = match spec.find(" w ") {
            Some(i) => (spec[..i].trim(), Some(spec[i + 3..].trim())),
            None => (spec.trim(), None),
        };
        let toks: Vec<&str> = base.split_whitespace().collect();
        let g = match toks.as_slice() {
            ["trivial"] => Self::trivial(),
            ["Z"] => Self::integers(),
            [z] if z.starts_with("Z^") => {
                let k = z[2..].parse().map_err(|_| Error::Parse(format!("bad rank in '{z}'")))?;
                Self::free_abelian(k)
            }
            [z] if z.starts_with("Z/") => {
                let m: i64 = z[2..].parse().map_err(|_| Error::Parse(format!("bad modulus in '{z}'")))?;
                if m < 1 {
                    return parse_err("modulus must be positive");
                }
                Self::cyclic(m)
            }
            ["free", k] => Self::free(k.parse().map_err(|_| Error::Parse(format!("bad rank '{k}'")))?),
            ["table", path] => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read table '{path}': {e}")))?;
                Self::table(parse_table(&text)?)
            }
            _ => return parse_err(format!("unknown group spec '{spec}'")),
        };
        match weights {
            None => Ok(g),
            Some(ws) => {
                let w = ws
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| match s {
                        "+1" | "1" | "+" => Ok(1),
                        "-1" | "-" => Ok(-1),
                        _ => parse_err(format!("bad weight '{s}'")),
                    })
                    .collect::<Result<Vec<i8>>>()?;
                g.with_weights(w)
            }
        }
    }

    pub fn spec(&self) -> String {
        let base = match &self.kind {
            Kind::Trivial => "trivial".to_string(),
            Kind::FreeAbelian(1) => "Z".to_string(),
            Kind::FreeAbelian(k) => format!("Z^{k}"),
            Kind::Cyclic(m) => format!("Z/{m}"),
            Kind::Free(k) => format!("free {k}"),
            Kind::Table(t) => format!("table <{} elements>", t.order()),
        };
        if self.has_trivial_weight() {
            base
        } else {
            let ws: Vec<String> = self.weights.iter().map(|w| format!("{w:+}")).collect();
            format!("{base} w {}", ws.join(" "))
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        let s = s.trim();
        if s.is_empty() {
            return parse_err("empty word");
        }
        let mut acc = self.identity();
        for tok in split_word(s) {
            let t = self.parse_token(tok.trim())?;
            acc = self.mul(&acc, &t);
        }
        Ok(acc)
    }

    fn parse_token(&self, tok: &str) -> Result<Elem> {
        if tok == "e" || tok == "1" && matches!(self.kind, Kind::Free(_) | Kind::Trivial) {
            return Ok(self.identity());
        }
        if let Some(inner) = tok.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let v = inner
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad entry '{s}'"))))
                .collect::<Result<Vec<i64>>>()?;
            return self.elem_at(&v);
        }
        if let Ok(k) = tok.parse::<i64>() {
            return self.elem_at(&[k]);
        }
        let (body, inverted) = match tok.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (tok, false),
        };
        let (body, power) = match body.split_once('^') {
            Some((b, p)) => (b, p.parse::<i64>().map_err(|_| Error::Parse(format!("bad power in '{tok}'")))?),
            None => (body, 1),
        };
        let i: usize = body.strip_prefix('x').and_then(|d| d.parse().ok()).ok_or_else(|| Error::Parse(format!("bad token '{tok}'")))?;
        let gen = self.generator(i)?;
        let g = if inverted { self.inv(&gen) } else { gen };
        Ok(self.pow(&g, power))
    }

    fn elem_at(&self, v: &[i64]) -> Result<Elem> {
        match &self.kind {
            Kind::FreeAbelian(k) if v.len() == *k => Ok(Elem::from_slice(v)),
            Kind::Cyclic(m) if v.len() == 1 => Ok(Elem::from_slice(&[v[0].rem_euclid(*m)])),
            Kind::Table(t) if v.len() == 1 && (0..t.order() as i64).contains(&v[0]) => Ok(Elem::from_slice(v)),
            Kind::Trivial if v.iter().all(|&x| x == 0) => Ok(Elem::default()),
            _ => parse_err(format!("coordinates {v:?} do not name an element of {}", self.spec())),
        }
    }

    /// The i-th generator, 1-based.
    pub fn generator(&self, i: usize) -> Result<Elem> {
        match &self.kind {
            Kind::FreeAbelian(k) if (1..=*k).contains(&i) => {
                let mut v = vec![0; *k];
                v[i - 1] = 1;
                Ok(Elem::from_slice(&v))
            }
            Kind::Free(k) if (1..=*k).contains(&i) => Ok(Elem::from_slice(&[i as i64])),
            Kind::Cyclic(_) if i == 1 => Ok(Elem::from_slice(&[1])),
            _ => parse_err(format!("no generator x{i} in {}", self.spec())),
        }
    }

    pub fn format(&self, a: &Elem) -> String {
        match &self.kind {
            Kind::Trivial => "e".into(),
            Kind::FreeAbelian(1) | Kind::Cyclic(_) | Kind::Table(_) => a.0[0].to_string(),
            Kind::FreeAbelian(_) => {
                let parts: Vec<String> = a.0.iter().map(|x| x.to_string()).collect();
                format!("[{}]", parts.join(","))
            }
            Kind::Free(_) => {
                if a.0.is_empty() {
                    return "e".into();
                }
                let parts: Vec<String> = a.0.iter().map(|&x| if x > 0 { format!("x{x}") } else { format!("x{}'", -x) }).collect();
                parts.join("*")
            }
        }
    }
}

fn split_word(s: &str) -> Vec<&str> {
    // split on '*' outside brackets
    let mut out = vec![];
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            '*' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Table file: first line the order n, then n rows of n 0-based indices.
pub fn parse_table(text: &str) -> Result<Table> {
    let mut nums = text.split_whitespace().map(|t| t.parse::<usize>());
    let n = match nums.next() {
        Some(Ok(n)) => n,
        _ => return parse_err("table file must start with its order"),
    };
    let mut mult = vec![vec![0; n]; n];
    for row in mult.iter_mut() {
        for x in row.iter_mut() {
            *x = match nums.next() {
                Some(Ok(v)) => v,
                _ => return parse_err("table file is truncated or malformed"),
            };
        }
    }
    if nums.next().is_some() {
        return parse_err("trailing data in table file");
    }
    Table::new(mult)
}

impl fmt::Display for WeightedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec())
    }
}

/// Multiplication table of the symmetric group on three letters.
pub fn s3_table() -> Table {
    let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
    let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let mult = perms.iter().map(|a| perms.iter().map(|b| idx([b[a[0]], b[a[1]], b[a[2]]])).collect()).collect();
    Table::new(mult).unwrap()
}
