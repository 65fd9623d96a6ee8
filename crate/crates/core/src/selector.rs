//! The layer-1 zero-set Latin table and the color-0 selector derived from it.
//!
//! The table is stored on seven rotation-orbit representatives and extended
//! by the cyclic rule `Λ(S+k)(a+k) = Λ(S)(a) + k`. [`Selector`] is the
//! compiled form: one row per zero-set mask, ready for the hot loops.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modring::{Direction, Z5};

/// A subset of `Z_5`, stored as a 5-bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ZeroSet(u8);

impl ZeroSet {
    pub const EMPTY: ZeroSet = ZeroSet(0);
    pub const FULL: ZeroSet = ZeroSet(0b11111);

    pub const fn from_bits(bits: u8) -> Self {
        ZeroSet(bits & 0b11111)
    }

    pub fn from_indices(idx: &[u8]) -> Self {
        ZeroSet(idx.iter().fold(0, |acc, &i| acc | (1 << (i % 5))))
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: Z5) -> bool {
        self.0 & (1 << i.index()) != 0
    }

    /// Root-flat zero-sets never have exactly four elements.
    pub fn is_feasible(self) -> bool {
        self.len() != 4
    }

    /// `S + k = {i + k : i ∈ S}`.
    pub fn shift(self, k: Z5) -> ZeroSet {
        let k = k.index() as u32;
        let b = self.0 as u32;
        ZeroSet((((b << k) | (b >> (5 - k))) & 0b11111) as u8)
    }

    pub fn iter(self) -> impl Iterator<Item = Z5> {
        Z5::ALL.into_iter().filter(move |&i| self.contains(i))
    }

    /// The 27 feasible zero-sets, ordered by size and then lexicographically.
    pub fn feasible() -> Vec<ZeroSet> {
        let mut out: Vec<ZeroSet> = (0u8..32).map(ZeroSet).filter(|z| z.is_feasible()).collect();
        out.sort_by_key(|z| (z.len(), z.iter().map(Z5::value).collect::<Vec<_>>()));
        out
    }
}

impl fmt::Display for ZeroSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for ZeroSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "∅" || s == "{}" {
            return Ok(ZeroSet::EMPTY);
        }
        let inner = s
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::MalformedTable(format!("bad zero-set `{s}`")))?;
        let mut bits = 0u8;
        for part in inner.split(',') {
            let i: u8 = part
                .trim()
                .parse()
                .ok()
                .filter(|&i| i < 5)
                .ok_or_else(|| Error::MalformedTable(format!("bad index in `{s}`")))?;
            bits |= 1 << i;
        }
        Ok(ZeroSet(bits))
    }
}

impl Serialize for ZeroSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(Z5::value))
    }
}

/// A permutation of `Z_5` in row notation: `p(c) = images[c]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Perm5([Z5; 5]);

impl Perm5 {
    pub const IDENTITY: Perm5 = Perm5(Z5::ALL);

    pub fn new(images: [u8; 5]) -> Option<Self> {
        let mut seen = 0u8;
        for &v in &images {
            if v >= 5 || seen & (1 << v) != 0 {
                return None;
            }
            seen |= 1 << v;
        }
        Some(Perm5(images.map(|v| Z5::new(v as i64))))
    }

    /// The color rotation `τ_s(c) = c + s`.
    pub fn rotation(s: Z5) -> Self {
        Perm5(Z5::ALL.map(|c| c + s))
    }

    pub fn apply(&self, c: Z5) -> Z5 {
        self.0[c.index()]
    }

    pub fn images(&self) -> [u8; 5] {
        self.0.map(Z5::value)
    }

    pub fn compose(&self, other: &Perm5) -> Perm5 {
        Perm5(Z5::ALL.map(|c| self.apply(other.apply(c))))
    }
}

impl fmt::Display for Perm5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e] = self.images();
        write!(f, "({a},{b},{c},{d},{e})")
    }
}

/// Representative rows of the layer-1 Latin table, keyed by orbit
/// representatives of the feasible subsets under rotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatinTable {
    rows: Vec<(ZeroSet, [u8; 5])>,
}

const STANDARD_ROWS: [(&[u8], [u8; 5]); 7] = [
    (&[], [0, 1, 2, 3, 4]),
    (&[0], [0, 1, 3, 2, 4]),
    (&[0, 1], [4, 1, 3, 2, 0]),
    (&[0, 2], [4, 1, 3, 0, 2]),
    (&[0, 1, 2], [1, 0, 3, 4, 2]),
    (&[0, 1, 3], [4, 3, 0, 2, 1]),
    (&[0, 1, 2, 3, 4], [0, 1, 2, 3, 4]),
];

impl LatinTable {
    pub fn standard() -> Self {
        LatinTable {
            rows: STANDARD_ROWS
                .iter()
                .map(|(s, row)| (ZeroSet::from_indices(s), *row))
                .collect(),
        }
    }

    pub fn rows(&self) -> &[(ZeroSet, [u8; 5])] {
        &self.rows
    }

    /// Replaces the row stored under `key`. The new row is not validated, so
    /// this can build deliberately broken tables.
    pub fn with_row(mut self, key: ZeroSet, row: [u8; 5]) -> Self {
        match self.rows.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = row,
            None => self.rows.push((key, row)),
        }
        self
    }

    /// Every extension of `S` through a stored representative: one raw row per
    /// shift `k` with `S - k` a key.
    fn extensions(&self, set: ZeroSet) -> Vec<[u8; 5]> {
        let mut out = Vec::new();
        for k in Z5::ALL {
            let base = set.shift(-k);
            if let Some((_, row)) = self.rows.iter().find(|(key, _)| *key == base) {
                out.push(std::array::from_fn(|a| {
                    let a = Z5::new(a as i64);
                    (Z5::new(row[(a - k).index()] as i64) + k).value()
                }));
            }
        }
        out
    }

    /// The raw row `Λ_1(S)`, which need not be a permutation for a mutated
    /// table. Scans shifts `k = 0..4` and uses the first match.
    pub fn row(&self, set: ZeroSet) -> Result<[u8; 5]> {
        if !set.is_feasible() {
            return Err(Error::InfeasibleZeroSet(set));
        }
        self.extensions(set)
            .into_iter()
            .next()
            .ok_or_else(|| Error::MalformedTable(format!("no representative for {set}")))
    }

    /// `Λ_1(S)` as a permutation.
    pub fn lambda1(&self, set: ZeroSet) -> Result<Perm5> {
        let row = self.row(set)?;
        Perm5::new(row).ok_or(Error::NotAPermutation { set, row })
    }
}

/// `Λ_1` compiled over all 32 masks and indexed by the zero-set `Z` itself,
/// so that `rows[Z] = Λ_1(Z - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    by_zero_set: [[Z5; 5]; 32],
    feasible: u32,
}

static STANDARD: LazyLock<Selector> =
    LazyLock::new(|| Selector::compile(&LatinTable::standard()).expect("standard table compiles"));

impl Selector {
    pub fn standard() -> &'static Selector {
        &STANDARD
    }

    /// Compiles a table, rejecting it when two shifts of a symmetric orbit
    /// disagree. Rows are not required to be permutations.
    pub fn compile(table: &LatinTable) -> Result<Selector> {
        let mut by_zero_set = [[Z5::default(); 5]; 32];
        let mut feasible = 0u32;
        for bits in 0u8..32 {
            let z = ZeroSet(bits);
            if !z.is_feasible() {
                continue;
            }
            let s = z.shift(-Z5::new(1));
            let ext = table.extensions(s);
            let Some(first) = ext.first() else {
                return Err(Error::MalformedTable(format!("no representative for {s}")));
            };
            if ext.iter().any(|r| r != first) {
                return Err(Error::MalformedTable(format!(
                    "rows for {s} depend on the chosen shift"
                )));
            }
            by_zero_set[bits as usize] = first.map(|v| Z5::new(v as i64));
            feasible |= 1 << bits;
        }
        Ok(Selector {
            by_zero_set,
            feasible,
        })
    }

    pub fn is_feasible(&self, z: ZeroSet) -> bool {
        self.feasible & (1 << z.bits()) != 0
    }

    /// `Λ_1(Z - 1)(c)`: the direction taken by color `c` in layer 1 at a point
    /// with zero-set `Z`. Infeasible masks read as the zero row.
    #[inline]
    pub fn layer_direction(&self, z: ZeroSet, c: Z5) -> Direction {
        self.by_zero_set[z.bits() as usize][c.index()]
    }

    pub fn layer_row(&self, z: ZeroSet) -> [Z5; 5] {
        self.by_zero_set[z.bits() as usize]
    }

    /// The color-0 selector `p(Z)`, unchecked.
    #[inline]
    pub fn p(&self, z: ZeroSet) -> Direction {
        self.by_zero_set[z.bits() as usize][0]
    }

    pub fn selector_p(&self, z: ZeroSet) -> Result<Direction> {
        if self.is_feasible(z) {
            Ok(self.p(z))
        } else {
            Err(Error::InfeasibleZeroSet(z))
        }
    }

    /// The 27-row selector table in canonical order.
    pub fn selector_table(&self) -> Vec<(ZeroSet, Direction)> {
        ZeroSet::feasible()
            .into_iter()
            .map(|z| (z, self.p(z)))
            .collect()
    }

    /// Exchanges the layer-1 rows of two zero-sets. Used to build controls
    /// whose selector is wrong in exactly two entries.
    pub fn with_swapped_rows(mut self, a: ZeroSet, b: ZeroSet) -> Self {
        self.by_zero_set.swap(a.bits() as usize, b.bits() as usize);
        self
    }
}

/// `Λ_1(S)` from the standard table.
pub fn lambda1(set: ZeroSet) -> Result<Perm5> {
    LatinTable::standard().lambda1(set)
}

/// `p(Z) = Λ_1(Z - 1)(0)` from the standard table.
pub fn selector_p(z: ZeroSet) -> Result<Direction> {
    let s = z.shift(-Z5::new(1));
    Ok(lambda1(s)?.apply(Z5::new(0)))
}

/// The printed color-0 selector table, transcribed independently of the
/// representative rows.
pub const PRINTED_SELECTOR_TABLE: [(&[u8], u8); 27] = [
    (&[], 0),
    (&[0], 0),
    (&[1], 0),
    (&[2], 0),
    (&[3], 4),
    (&[4], 1),
    (&[0, 1], 0),
    (&[0, 2], 0),
    (&[0, 3], 2),
    (&[0, 4], 1),
    (&[1, 2], 4),
    (&[1, 3], 4),
    (&[1, 4], 1),
    (&[2, 3], 1),
    (&[2, 4], 3),
    (&[3, 4], 4),
    (&[0, 1, 2], 4),
    (&[0, 1, 3], 2),
    (&[0, 1, 4], 1),
    (&[0, 2, 3], 2),
    (&[0, 2, 4], 3),
    (&[0, 3, 4], 1),
    (&[1, 2, 3], 1),
    (&[1, 2, 4], 4),
    (&[1, 3, 4], 4),
    (&[2, 3, 4], 3),
    (&[0, 1, 2, 3, 4], 0),
];

pub fn printed_selector_table() -> Vec<(ZeroSet, Direction)> {
    PRINTED_SELECTOR_TABLE
        .iter()
        .map(|(z, p)| (ZeroSet::from_indices(z), Z5::new(*p as i64)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectorRow {
    pub zero_set: ZeroSet,
    pub derived: u8,
    pub printed: u8,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectorReport {
    pub rows: Vec<SelectorRow>,
    pub latin: bool,
    pub equivariant: bool,
    pub matches_printed: bool,
    pub section_sets: Vec<ZeroSet>,
    pub mismatches: Vec<String>,
    pub pass: bool,
}

/// Derives the selector from `table` and checks it against the printed
/// selector table, the Latin property, and cyclic equivariance.
pub fn check_selector(table: &LatinTable) -> SelectorReport {
    let mut mismatches = Vec::new();
    let printed = printed_selector_table();

    let mut latin = true;
    for s in ZeroSet::feasible() {
        if let Err(e) = table.lambda1(s) {
            latin = false;
            mismatches.push(e.to_string());
        }
    }

    let mut equivariant = true;
    for s in ZeroSet::feasible() {
        for k in Z5::ALL {
            let (Ok(base), Ok(moved)) = (table.row(s), table.row(s.shift(k))) else {
                equivariant = false;
                continue;
            };
            for a in Z5::ALL {
                let lhs = moved[(a + k).index()];
                let rhs = (Z5::new(base[a.index()] as i64) + k).value();
                if lhs != rhs {
                    equivariant = false;
                    mismatches.push(format!(
                        "Λ({})({}) = {lhs} ≠ Λ({s})({a}) + {k} = {rhs}",
                        s.shift(k),
                        a + k
                    ));
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(27);
    let mut matches_printed = true;
    for (z, want) in printed {
        let s = z.shift(-Z5::new(1));
        let derived = table.row(s).map(|r| r[0]).unwrap_or(u8::MAX);
        if derived != want.value() {
            matches_printed = false;
            mismatches.push(format!("p({z}) derived {derived}, printed {want}"));
        }
        rows.push(SelectorRow {
            zero_set: z,
            derived,
            printed: want.value(),
        });
    }

    let section_sets: Vec<ZeroSet> = rows
        .iter()
        .filter(|r| r.derived == 2)
        .map(|r| r.zero_set)
        .collect();
    let expected_section = [
        ZeroSet::from_indices(&[0, 3]),
        ZeroSet::from_indices(&[0, 1, 3]),
        ZeroSet::from_indices(&[0, 2, 3]),
    ];
    let section_ok = section_sets == expected_section;
    if !section_ok {
        mismatches.push(format!("p = 2 exactly on {section_sets:?}"));
    }

    let pass = latin && equivariant && matches_printed && section_ok;
    SelectorReport {
        rows,
        latin,
        equivariant,
        matches_printed,
        section_sets,
        mismatches,
        pass,
    }
}
