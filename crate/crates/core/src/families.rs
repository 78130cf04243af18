//! Constructors for the standard example rings: finite group rings, balls
//! in free groups and integer lattices, the representation ring of SU(2)
//! and its Verlinde quotients, and products of these.
//!
//! SU(2) labels are doubled spins: `"3"` is spin 3/2.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{DimensionFunction, FusionRing, Product, StructureConstants};

/// Parameters of a ring family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `table[a][b]` is the index of `ab`.
    GroupTable {
        table: Vec<Vec<usize>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    FreeGroup {
        rank: usize,
        radius: usize,
    },
    IntegerLattice {
        rank: usize,
        window: usize,
    },
    Su2Rep {
        cutoff: usize,
    },
    VerlindeSu2 {
        level: usize,
    },
    Product {
        left: Box<FamilySpec>,
        right: Box<FamilySpec>,
    },
}

impl FamilySpec {
    /// The cyclic group `ℤ/n` with labels `"0"`, …, `"n-1"`.
    pub fn cyclic(n: usize) -> Self {
        FamilySpec::GroupTable {
            table: (0..n)
                .map(|a| (0..n).map(|b| (a + b) % n).collect())
                .collect(),
            labels: Some((0..n).map(|a| a.to_string()).collect()),
        }
    }

    /// The symmetric group on three letters, labelled by one-line notation.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let find = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| find([a[b[0]], a[b[1]], a[b[2]]]))
                    .collect()
            })
            .collect();
        let labels = perms
            .iter()
            .map(|p| format!("{}{}{}", p[0], p[1], p[2]))
            .collect();
        FamilySpec::GroupTable {
            table,
            labels: Some(labels),
        }
    }

    pub fn product(left: FamilySpec, right: FamilySpec) -> Self {
        FamilySpec::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Number of basis elements this family produces, without building it.
    pub fn basis_size(&self) -> usize {
        match self {
            FamilySpec::GroupTable { table, .. } => table.len(),
            FamilySpec::FreeGroup { rank, radius } => {
                let mut total = 1usize;
                let mut level = 2 * rank;
                for _ in 0..*radius {
                    total = total.saturating_add(level);
                    level = level.saturating_mul((2 * rank).saturating_sub(1).max(1));
                }
                total
            }
            FamilySpec::IntegerLattice { rank, window } => {
                lattice_points(*rank, *window as i64).len()
            }
            FamilySpec::Su2Rep { cutoff } => cutoff + 1,
            FamilySpec::VerlindeSu2 { level } => level + 1,
            FamilySpec::Product { left, right } => {
                left.basis_size().saturating_mul(right.basis_size())
            }
        }
    }
}

/// The finite rings used as a standard corpus: Verlinde `SU(2)_k` for
/// `k ≤ 8`, cyclic groups of order 2 to 6, `S₃`, the Klein four-group and
/// two mixed products.
pub fn finite_catalog() -> Vec<(String, FamilySpec)> {
    let mut out: Vec<(String, FamilySpec)> = (1..=8)
        .map(|k| {
            (
                format!("verlinde_su2({k})"),
                FamilySpec::VerlindeSu2 { level: k },
            )
        })
        .collect();
    out.extend((2..=6).map(|n| (format!("cyclic({n})"), FamilySpec::cyclic(n))));
    out.push(("symmetric3".into(), FamilySpec::symmetric3()));
    out.push((
        "klein4".into(),
        FamilySpec::product(FamilySpec::cyclic(2), FamilySpec::cyclic(2)),
    ));
    out.push((
        "verlinde_su2(2)×verlinde_su2(3)".into(),
        FamilySpec::product(
            FamilySpec::VerlindeSu2 { level: 2 },
            FamilySpec::VerlindeSu2 { level: 3 },
        ),
    ));
    out.push((
        "cyclic(3)×verlinde_su2(4)".into(),
        FamilySpec::product(FamilySpec::cyclic(3), FamilySpec::VerlindeSu2 { level: 4 }),
    ));
    out
}

/// Builds the ring described by `spec`.
pub fn build(spec: &FamilySpec) -> Result<FusionRing> {
    match spec {
        FamilySpec::GroupTable { table, labels } => group_table(table, labels.as_deref()),
        FamilySpec::FreeGroup { rank, radius } => free_group(*rank, *radius),
        FamilySpec::IntegerLattice { rank, window } => integer_lattice(*rank, *window),
        FamilySpec::Su2Rep { cutoff } => su2_rep(*cutoff),
        FamilySpec::VerlindeSu2 { level } => verlinde_su2(*level),
        FamilySpec::Product { left, right } => product(&build(left)?, &build(right)?),
    }
}

#[derive(Debug)]
struct GroupRule {
    table: Vec<Vec<usize>>,
}

impl StructureConstants for GroupRule {
    fn product(&self, r: usize, s: usize) -> Product {
        Product {
            terms: vec![(self.table[r][s], 1)],
            complete: true,
        }
    }
}

fn group_table(table: &[Vec<usize>], labels: Option<&[String]>) -> Result<FusionRing> {
    let n = table.len();
    if n == 0
        || table
            .iter()
            .any(|row| row.len() != n || row.iter().any(|&x| x >= n))
    {
        return Err(Error::InvalidSpec(
            "group table must be square with entries < n".into(),
        ));
    }
    let unit = (0..n)
        .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or_else(|| Error::InvalidSpec("group table has no identity".into()))?;
    let mut inverse = vec![usize::MAX; n];
    for a in 0..n {
        inverse[a] = (0..n)
            .find(|&b| table[a][b] == unit && table[b][a] == unit)
            .ok_or_else(|| Error::InvalidSpec(format!("element {a} has no inverse")))?;
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::InvalidSpec("group table is not associative".into()));
                }
            }
        }
    }
    let labels = match labels {
        Some(l) if l.len() == n => l.to_vec(),
        Some(_) => {
            return Err(Error::InvalidSpec(
                "label count differs from table size".into(),
            ))
        }
        None => (0..n).map(|i| format!("g{i}")).collect(),
    };
    FusionRing::from_rule(
        labels,
        unit,
        inverse,
        vec![true; n],
        false,
        Arc::new(GroupRule {
            table: table.to_vec(),
        }),
    )
}

/// Reduced words over generators `±1, …, ±rank`.
#[derive(Debug)]
struct FreeGroupRule {
    words: Vec<Vec<i8>>,
    index: HashMap<Vec<i8>, usize>,
}

impl StructureConstants for FreeGroupRule {
    fn product(&self, r: usize, s: usize) -> Product {
        let w = reduce_concat(&self.words[r], &self.words[s]);
        match self.index.get(&w) {
            Some(&t) => Product {
                terms: vec![(t, 1)],
                complete: true,
            },
            None => Product {
                terms: vec![],
                complete: false,
            },
        }
    }
}

fn reduce_concat(a: &[i8], b: &[i8]) -> Vec<i8> {
    let mut out = a.to_vec();
    let mut rest = b;
    while let (Some(&last), Some(&first)) = (out.last(), rest.first()) {
        if last != -first {
            break;
        }
        out.pop();
        rest = &rest[1..];
    }
    out.extend_from_slice(rest);
    out
}

fn letter_name(g: i8) -> char {
    let base = g.unsigned_abs() - 1;
    if g > 0 {
        (b'a' + base) as char
    } else {
        (b'A' + base) as char
    }
}

/// Label of a reduced free-group word: `e` for the identity, lowercase
/// letters for generators and uppercase for their inverses.
pub fn free_word_label(word: &[i8]) -> String {
    if word.is_empty() {
        "e".into()
    } else {
        word.iter().map(|&g| letter_name(g)).collect()
    }
}

/// Reduced words of length ≤ radius in breadth-first order, letters tried
/// in the order `a, A, b, B, …`.
pub(crate) fn free_group_ball(rank: usize, radius: usize) -> Vec<Vec<i8>> {
    let letters: Vec<i8> = (1..=rank as i8).flat_map(|g| [g, -g]).collect();
    let mut words = vec![Vec::new()];
    let mut frontier = 0..1;
    for _ in 0..radius {
        let start = words.len();
        for i in frontier.clone() {
            for &g in &letters {
                if words[i].last() == Some(&-g) {
                    continue;
                }
                let mut w = words[i].clone();
                w.push(g);
                words.push(w);
            }
        }
        frontier = start..words.len();
    }
    words
}

fn free_group(rank: usize, radius: usize) -> Result<FusionRing> {
    if !(1..=26).contains(&rank) || radius < 1 {
        return Err(Error::InvalidSpec(
            "free group needs 1 ≤ rank ≤ 26 and radius ≥ 1".into(),
        ));
    }
    let words = free_group_ball(rank, radius);
    let index: HashMap<Vec<i8>, usize> = words
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let labels = words.iter().map(|w| free_word_label(w)).collect();
    let dual = words
        .iter()
        .map(|w| {
            let inv: Vec<i8> = w.iter().rev().map(|&g| -g).collect();
            index[&inv]
        })
        .collect();
    let interior = words.iter().map(|w| w.len() <= radius / 2).collect();
    FusionRing::from_rule(
        labels,
        0,
        dual,
        interior,
        true,
        Arc::new(FreeGroupRule { words, index }),
    )
}

#[derive(Debug)]
struct LatticeRule {
    points: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl StructureConstants for LatticeRule {
    fn product(&self, r: usize, s: usize) -> Product {
        let sum: Vec<i64> = self.points[r]
            .iter()
            .zip(&self.points[s])
            .map(|(a, b)| a + b)
            .collect();
        match self.index.get(&sum) {
            Some(&t) => Product {
                terms: vec![(t, 1)],
                complete: true,
            },
            None => Product {
                terms: vec![],
                complete: false,
            },
        }
    }
}

// ℓ¹ ball of the given radius, ordered by norm then lexicographically.
fn lattice_points(rank: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut pts: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for p in &pts {
            let used: i64 = p.iter().map(|c| c.abs()).sum();
            for c in -(radius - used)..=(radius - used) {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        pts = next;
    }
    pts.sort_by_key(|p| (p.iter().map(|c| c.abs()).sum::<i64>(), p.clone()));
    pts
}

fn integer_lattice(rank: usize, window: usize) -> Result<FusionRing> {
    if rank < 1 || window < 1 {
        return Err(Error::InvalidSpec(
            "lattice needs rank ≥ 1 and window ≥ 1".into(),
        ));
    }
    let points = lattice_points(rank, window as i64);
    let index: HashMap<Vec<i64>, usize> = points
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let labels = points
        .iter()
        .map(|p| {
            p.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let dual = points
        .iter()
        .map(|p| index[&p.iter().map(|c| -c).collect::<Vec<_>>()])
        .collect();
    let interior = points
        .iter()
        .map(|p| p.iter().map(|c| c.abs()).sum::<i64>() <= window as i64 / 2)
        .collect();
    let unit = index[&vec![0; rank]];
    FusionRing::from_rule(
        labels,
        unit,
        dual,
        interior,
        true,
        Arc::new(LatticeRule { points, index }),
    )
}

/// Clebsch–Gordan rule on doubled spins, optionally truncated at level `k`.
#[derive(Debug)]
struct Su2Rule {
    cutoff: usize,
    level: Option<usize>,
}

impl StructureConstants for Su2Rule {
    fn product(&self, r: usize, s: usize) -> Product {
        let lo = r.abs_diff(s);
        let mut hi = r + s;
        if let Some(k) = self.level {
            hi = hi.min((2 * k).saturating_sub(r + s));
        }
        let complete = hi <= self.cutoff;
        let top = hi.min(self.cutoff);
        let terms = if lo > top {
            vec![]
        } else {
            (lo..=top).step_by(2).map(|t| (t, 1)).collect()
        };
        Product { terms, complete }
    }
}

fn su2_rep(cutoff: usize) -> Result<FusionRing> {
    if cutoff < 1 {
        return Err(Error::InvalidSpec("su2_rep needs cutoff ≥ 1".into()));
    }
    let n = cutoff + 1;
    FusionRing::from_rule(
        (0..n).map(|i| i.to_string()).collect(),
        0,
        (0..n).collect(),
        (0..n).map(|i| i <= cutoff / 2).collect(),
        true,
        Arc::new(Su2Rule {
            cutoff,
            level: None,
        }),
    )
}

fn verlinde_su2(level: usize) -> Result<FusionRing> {
    if level < 1 {
        return Err(Error::InvalidSpec("verlinde_su2 needs level ≥ 1".into()));
    }
    let n = level + 1;
    FusionRing::from_rule(
        (0..n).map(|i| i.to_string()).collect(),
        0,
        (0..n).collect(),
        vec![true; n],
        false,
        Arc::new(Su2Rule {
            cutoff: level,
            level: Some(level),
        }),
    )
}

#[derive(Debug)]
struct ProductRule {
    left: FusionRing,
    right: FusionRing,
}

impl StructureConstants for ProductRule {
    fn product(&self, r: usize, s: usize) -> Product {
        let n2 = self.right.len();
        let a = self.left.product(r / n2, s / n2);
        let b = self.right.product(r % n2, s % n2);
        let mut terms: Vec<(usize, u64)> = a
            .terms
            .iter()
            .flat_map(|&(t, m)| b.terms.iter().map(move |&(u, k)| (t * n2 + u, m * k)))
            .collect();
        terms.sort_unstable();
        Product {
            terms,
            complete: a.complete && b.complete,
        }
    }
}

fn product(left: &FusionRing, right: &FusionRing) -> Result<FusionRing> {
    let (n1, n2) = (left.len(), right.len());
    let mut labels = Vec::with_capacity(n1 * n2);
    let mut dual = Vec::with_capacity(n1 * n2);
    let mut interior = Vec::with_capacity(n1 * n2);
    for a in 0..n1 {
        for b in 0..n2 {
            labels.push(format!("({},{})", left.label(a), right.label(b)));
            dual.push(left.dual(a) * n2 + right.dual(b));
            interior.push(left.is_interior(a) && right.is_interior(b));
        }
    }
    FusionRing::from_rule(
        labels,
        left.unit() * n2 + right.unit(),
        dual,
        interior,
        left.is_truncated() || right.is_truncated(),
        Arc::new(ProductRule {
            left: left.clone(),
            right: right.clone(),
        }),
    )
}

/// `d(n) = [n+1]_q = (q^{n+1} − q^{−n−1}) / (q − q^{−1})` on doubled-spin
/// labels; `q = 1` gives the classical `n + 1`.
pub fn su2_quantum_dims(ring: &FusionRing, q: f64) -> Result<DimensionFunction> {
    let mut values = Vec::with_capacity(ring.len());
    for l in ring.labels() {
        let n: i32 = l
            .parse()
            .map_err(|_| Error::DimensionMismatch(format!("label `{l}` is not a doubled spin")))?;
        values.push(q_integer(n + 1, q));
    }
    Ok(DimensionFunction::new(values))
}

/// Quantum integer `[m]_q`.
pub fn q_integer(m: i32, q: f64) -> f64 {
    if (q - 1.0).abs() < 1e-15 {
        m as f64
    } else {
        (q.powi(m) - q.powi(-m)) / (q - q.recip())
    }
}

/// Frobenius–Perron dimensions of `verlinde_su2(k)` in closed form,
/// `d(n) = sin((n+1)π/(k+2)) / sin(π/(k+2))`.
pub fn verlinde_dims_closed_form(level: usize) -> Vec<f64> {
    let theta = std::f64::consts::PI / (level as f64 + 2.0);
    (0..=level)
        .map(|n| ((n as f64 + 1.0) * theta).sin() / theta.sin())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::{fp_dimensions, multiply, validate_ring, Combination};

    #[test]
    fn verlinde_level_one() {
        let ring = build(&FamilySpec::VerlindeSu2 { level: 1 }).unwrap();
        assert_eq!(ring.len(), 2);
        let fund = Combination::from_labels(&ring, &[("1", 1)]).unwrap();
        let sq = multiply(&ring, &fund, &fund).unwrap();
        assert_eq!(sq, Combination::from_labels(&ring, &[("0", 1)]).unwrap());
    }

    #[test]
    fn free_group_ball_is_valid() {
        let ring = build(&FamilySpec::FreeGroup { rank: 2, radius: 4 }).unwrap();
        assert_eq!(ring.len(), 161);
        assert_eq!(ring.interior_indices().len(), 17);
        assert!(validate_ring(&ring).is_empty());
    }

    #[test]
    fn klein_four() {
        let ring = build(&FamilySpec::product(
            FamilySpec::cyclic(2),
            FamilySpec::cyclic(2),
        ))
        .unwrap();
        assert_eq!(ring.len(), 4);
        assert!(validate_ring(&ring).is_empty());
        // every element is its own inverse
        for s in 0..4 {
            assert_eq!(ring.dual(s), s);
            assert_eq!(ring.product(s, s).terms, vec![(ring.unit(), 1)]);
        }
        assert_eq!(ring.label(2), "(1,0)");
    }

    #[test]
    fn su2_window_valid() {
        let ring = build(&FamilySpec::Su2Rep { cutoff: 10 }).unwrap();
        assert_eq!(ring.interior_indices(), (0..=5).collect::<Vec<_>>());
        assert!(validate_ring(&ring).is_empty());
        let half = Combination::basis(1);
        assert_eq!(
            multiply(&ring, &half, &half).unwrap(),
            Combination::from_labels(&ring, &[("0", 1), ("2", 1)]).unwrap()
        );
        assert!(multiply(&ring, &Combination::basis(6), &Combination::basis(5)).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            build(&FamilySpec::VerlindeSu2 { level: 0 }),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            build(&FamilySpec::FreeGroup { rank: 0, radius: 3 }),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            build(&FamilySpec::GroupTable {
                table: vec![vec![0, 0], vec![0, 0]],
                labels: None
            }),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn verlinde_fp_dims_match_closed_form() {
        for k in 1..=8 {
            let ring = build(&FamilySpec::VerlindeSu2 { level: k }).unwrap();
            let d = fp_dimensions(&ring).unwrap();
            for (a, b) in d.values().iter().zip(verlinde_dims_closed_form(k)) {
                assert!((a - b).abs() < 1e-9, "k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn lattice_order_is_by_norm() {
        let ring = build(&FamilySpec::IntegerLattice { rank: 1, window: 3 }).unwrap();
        assert_eq!(ring.labels(), ["0", "-1", "1", "-2", "2", "-3", "3"]);
        assert_eq!(ring.unit(), 0);
        assert!(validate_ring(&ring).is_empty());
    }

    #[test]
    fn basis_size_matches_build() {
        for spec in [
            FamilySpec::FreeGroup { rank: 2, radius: 3 },
            FamilySpec::IntegerLattice { rank: 2, window: 3 },
            FamilySpec::Su2Rep { cutoff: 7 },
            FamilySpec::product(FamilySpec::VerlindeSu2 { level: 2 }, FamilySpec::cyclic(3)),
        ] {
            assert_eq!(spec.basis_size(), build(&spec).unwrap().len());
        }
    }
}
