//! Finite certificates: the exact-cover form of the layer-1 matching, and
//! the explicit 81-cycle of `G` on `A_3`.
//!
//! Both printed tables ship as data files under `data/` with pinned SHA-256
//! digests, so a failing check can be attributed either to the derivation
//! or to the transcription.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::modring::{q, zero_set, Direction, Modulus, RootPoint, Z5};
use crate::returnmap::normalized_g;
use crate::selector::{Selector, ZeroSet};

pub const CELL_TABLE: &str = include_str!("../data/cell_signatures.txt");
pub const CELL_TABLE_SHA256: &str =
    "4fa7b13634c12090a1acf6d38fcb856122659eba28068f523a1d71fb370ca1de";

pub const M3_CYCLE_TABLE: &str = include_str!("../data/m3_cycle.txt");
pub const M3_CYCLE_TABLE_SHA256: &str =
    "a7f498e727c1a58b8381b9a11c478a3e14f3d21085cea773249d56376e234df7";

pub fn sha256_hex(data: &str) -> String {
    hex::encode(Sha256::digest(data.as_bytes()))
}

/// Digest check for each embedded table: `(name, matches)`.
pub fn embedded_checksums() -> Vec<(&'static str, bool)> {
    vec![
        (
            "cell_signatures",
            sha256_hex(CELL_TABLE) == CELL_TABLE_SHA256,
        ),
        (
            "m3_cycle",
            sha256_hex(M3_CYCLE_TABLE) == M3_CYCLE_TABLE_SHA256,
        ),
    ]
}

/// The three residues the cell signatures compare against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sym {
    Zero,
    One,
    MinusOne,
}

impl Sym {
    pub fn residue(self, m: Modulus) -> u32 {
        match self {
            Sym::Zero => 0,
            Sym::One => 1,
            Sym::MinusOne => m.get() - 1,
        }
    }

    fn parse(s: &str) -> Option<Sym> {
        match s {
            "0" => Some(Sym::Zero),
            "1" => Some(Sym::One),
            "-1" => Some(Sym::MinusOne),
            _ => None,
        }
    }

    fn class(self) -> Class {
        match self {
            Sym::Zero => Class::Zero,
            Sym::One => Class::One,
            Sym::MinusOne => Class::MinusOne,
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sym::Zero => "0",
            Sym::One => "1",
            Sym::MinusOne => "-1",
        })
    }
}

/// The image cell `C_{Z,p(Z)} = {y : Z(y - q_{p(Z)}) = Z}` as forced and
/// forbidden coordinate equalities on `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellSignature {
    pub zero_set: ZeroSet,
    pub selector: Direction,
    pub forced: Vec<(usize, Sym)>,
    pub forbidden: Vec<(usize, Sym)>,
}

impl CellSignature {
    pub fn contains(&self, y: &RootPoint, m: Modulus) -> bool {
        self.forced.iter().all(|&(j, s)| y.get(j) == s.residue(m))
            && self
                .forbidden
                .iter()
                .all(|&(j, s)| y.get(j) != s.residue(m))
    }

    /// Membership for a symbolic point. Exact because the three symbols are
    /// distinct residues for every odd `m ≥ 3`.
    pub fn contains_class(&self, cv: &ClassVector) -> bool {
        self.forced.iter().all(|&(j, s)| cv.0[j] == s.class())
            && self.forbidden.iter().all(|&(j, s)| cv.0[j] != s.class())
    }
}

impl fmt::Display for CellSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[(usize, Sym)], op: &str| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.iter()
                    .map(|(j, s)| format!("y{j}{op}{s}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        write!(
            f,
            "{} | {} | {} | {}",
            self.zero_set,
            self.selector,
            list(&self.forced, "="),
            list(&self.forbidden, "!=")
        )
    }
}

/// Derives the cell for `Z` by substituting `w = y - q_i`, `i = p(Z)`:
/// `w_i = y_i - 1`, `w_4 = y_4 + 1`, `w_j = y_j` otherwise. Conditions are
/// listed for coordinate `i`, then `4`, then the rest in order.
pub fn derive_cell_signature(sel: &Selector, z: ZeroSet) -> Result<CellSignature> {
    let i = sel.selector_p(z)?;
    let mut order: Vec<usize> = Vec::with_capacity(5);
    if i.index() < 4 {
        order.push(i.index());
        order.push(4);
    }
    let rest: Vec<usize> = (0..5).filter(|j| !order.contains(j)).collect();
    order.extend(rest);

    let mut forced = Vec::new();
    let mut forbidden = Vec::new();
    for j in order {
        // the value of y_j that makes w_j vanish
        let zero_at = if i.index() < 4 && j == i.index() {
            Sym::One
        } else if i.index() < 4 && j == 4 {
            Sym::MinusOne
        } else {
            Sym::Zero
        };
        if z.contains(Z5::new(j as i64)) {
            forced.push((j, zero_at));
        } else {
            forbidden.push((j, zero_at));
        }
    }
    Ok(CellSignature {
        zero_set: z,
        selector: i,
        forced,
        forbidden,
    })
}

/// Cell signature for `Z` under the standard selector.
pub fn cell_signature(z: ZeroSet) -> Result<CellSignature> {
    derive_cell_signature(Selector::standard(), z)
}

fn parse_conditions(s: &str, op: &str) -> Result<Vec<(usize, Sym)>> {
    if s.trim() == "none" {
        return Ok(Vec::new());
    }
    s.split_whitespace()
        .map(|tok| {
            let bad = || Error::MalformedTable(format!("bad condition `{tok}`"));
            let (lhs, rhs) = tok.split_once(op).ok_or_else(bad)?;
            let j: usize = lhs
                .strip_prefix('y')
                .and_then(|d| d.parse().ok())
                .filter(|&j| j < 5)
                .ok_or_else(bad)?;
            Ok((j, Sym::parse(rhs).ok_or_else(bad)?))
        })
        .collect()
}

/// Parses a cell table in the format of `data/cell_signatures.txt`.
pub fn parse_cell_table(text: &str) -> Result<Vec<CellSignature>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let cols: Vec<&str> = line.split('|').map(str::trim).collect();
            let [z, p, forced, forbidden] = cols[..] else {
                return Err(Error::MalformedTable(format!(
                    "expected 4 columns: `{line}`"
                )));
            };
            let p: u8 = p
                .parse()
                .ok()
                .filter(|&p| p < 5)
                .ok_or_else(|| Error::MalformedTable(format!("bad selector in `{line}`")))?;
            Ok(CellSignature {
                zero_set: z.parse()?,
                selector: Z5::new(p as i64),
                forced: parse_conditions(forced, "=")?,
                forbidden: parse_conditions(forbidden, "!=")?,
            })
        })
        .collect()
}

pub fn embedded_cell_signatures() -> Vec<CellSignature> {
    parse_cell_table(CELL_TABLE).expect("embedded cell table parses")
}

/// Coordinate classes seen by the cell signatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Class {
    Zero,
    One,
    MinusOne,
    /// Any residue outside `{0, 1, -1}`.
    Other,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::Zero, Class::One, Class::MinusOne, Class::Other];

    pub fn of(v: u32, m: Modulus) -> Class {
        match v {
            0 => Class::Zero,
            1 => Class::One,
            v if v == m.get() - 1 => Class::MinusOne,
            _ => Class::Other,
        }
    }

    fn fixed_value(self) -> Option<i64> {
        match self {
            Class::Zero => Some(0),
            Class::One => Some(1),
            Class::MinusOne => Some(-1),
            Class::Other => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassVector(pub [Class; 5]);

impl ClassVector {
    pub fn of(y: &RootPoint, m: Modulus) -> Self {
        ClassVector(std::array::from_fn(|j| Class::of(y.get(j), m)))
    }

    /// All `4^5` vectors.
    pub fn all() -> impl Iterator<Item = ClassVector> {
        (0..1024usize).map(|mut n| {
            ClassVector(std::array::from_fn(|_| {
                let c = Class::ALL[n % 4];
                n /= 4;
                c
            }))
        })
    }

    /// Whether some point of `A_m` has this class vector, for every odd
    /// `m ≥ SYMBOLIC_THRESHOLD`. With `k` coordinates of class `Other` and
    /// fixed coordinates summing to `f` over the integers: `k = 0` needs
    /// `f = 0`, `k = 1` needs `f ∉ {-1, 0, 1}`, and `k ≥ 2` always works.
    pub fn realizable(&self) -> bool {
        let k = self.0.iter().filter(|&&c| c == Class::Other).count();
        let f: i64 = self.0.iter().filter_map(|c| c.fixed_value()).sum();
        match k {
            0 => f == 0,
            1 => !(-1..=1).contains(&f),
            _ => true,
        }
    }

    /// `Z(y - q_i)`, which depends only on the classes of `y`.
    pub fn predecessor_zero_set(&self, i: Direction) -> ZeroSet {
        let mut bits = 0u8;
        for j in 0..5 {
            let vanishes = if i.index() < 4 && j == i.index() {
                self.0[j] == Class::One
            } else if i.index() < 4 && j == 4 {
                self.0[j] == Class::MinusOne
            } else {
                self.0[j] == Class::Zero
            };
            if vanishes {
                bits |= 1 << j;
            }
        }
        ZeroSet::from_bits(bits)
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|c| match c {
                Class::Zero => "0",
                Class::One => "1",
                Class::MinusOne => "-1",
                Class::Other => "*",
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Smallest modulus certified by the class-vector check.
pub const SYMBOLIC_THRESHOLD: u32 = 13;

#[derive(Clone, Debug, Serialize)]
pub struct CounterExample {
    pub point: String,
    /// Directions `i` with `p(Z(y - q_i)) = i`.
    pub valid_directions: Vec<u8>,
    /// Zero-sets of the cells containing the point.
    pub cells: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchingReport {
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub pass: bool,
    pub points_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_unrealizable: Option<usize>,
    pub cells: usize,
    pub counter_examples: Vec<CounterExample>,
}

const MAX_COUNTER_EXAMPLES: usize = 16;

/// Predecessor directions of `y` under the selector: the `i` with
/// `p(Z(y - q_i)) = i`.
pub fn valid_predecessors(sel: &Selector, m: Modulus, y: &RootPoint) -> Vec<Direction> {
    Z5::ALL
        .into_iter()
        .filter(|&i| sel.p(zero_set(&y.sub(&q(i, m), m))) == i)
        .collect()
}

/// Checks the matching condition on every point of `A_m`, together with
/// exactly-one membership in the given cells.
pub fn exact_cover_enumerate_with(
    sel: &Selector,
    cells: &[CellSignature],
    m: Modulus,
) -> MatchingReport {
    let mut counter_examples = Vec::new();
    let mut failures = 0usize;
    for y in RootPoint::all(m) {
        let dirs = valid_predecessors(sel, m, &y);
        let holding: Vec<&CellSignature> = cells.iter().filter(|c| c.contains(&y, m)).collect();
        if dirs.len() != 1 || holding.len() != 1 {
            failures += 1;
            if counter_examples.len() < MAX_COUNTER_EXAMPLES {
                counter_examples.push(CounterExample {
                    point: y.to_string(),
                    valid_directions: dirs.iter().map(|d| d.value()).collect(),
                    cells: holding.iter().map(|c| c.zero_set.to_string()).collect(),
                    note: None,
                });
            }
        }
    }
    MatchingReport {
        mode: "enumerate".into(),
        m: Some(m.get()),
        pass: failures == 0,
        points_checked: m.root_flat_size(),
        skipped_unrealizable: None,
        cells: cells.len(),
        counter_examples,
    }
}

pub fn exact_cover_enumerate(m: Modulus) -> MatchingReport {
    exact_cover_enumerate_with(Selector::standard(), &embedded_cell_signatures(), m)
}

/// Checks the matching condition on every realizable class vector. Covers
/// every odd `m ≥ SYMBOLIC_THRESHOLD`.
pub fn exact_cover_symbolic_with(sel: &Selector, cells: &[CellSignature]) -> MatchingReport {
    let mut counter_examples = Vec::new();
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut failures = 0usize;
    for cv in ClassVector::all() {
        if !cv.realizable() {
            skipped += 1;
            continue;
        }
        checked += 1;
        let mut note = None;
        let mut dirs = Vec::new();
        for i in Z5::ALL {
            let z = cv.predecessor_zero_set(i);
            if !z.is_feasible() {
                note = Some(format!("predecessor via {i} has infeasible zero-set {z}"));
            } else if sel.p(z) == i {
                dirs.push(i.value());
            }
        }
        let holding: Vec<String> = cells
            .iter()
            .filter(|c| c.contains_class(&cv))
            .map(|c| c.zero_set.to_string())
            .collect();
        if dirs.len() != 1 || holding.len() != 1 || note.is_some() {
            failures += 1;
            if counter_examples.len() < MAX_COUNTER_EXAMPLES {
                counter_examples.push(CounterExample {
                    point: cv.to_string(),
                    valid_directions: dirs,
                    cells: holding,
                    note,
                });
            }
        }
    }
    MatchingReport {
        mode: "symbolic".into(),
        m: None,
        pass: failures == 0,
        points_checked: checked,
        skipped_unrealizable: Some(skipped),
        cells: cells.len(),
        counter_examples,
    }
}

pub fn exact_cover_symbolic() -> MatchingReport {
    exact_cover_symbolic_with(Selector::standard(), &embedded_cell_signatures())
}

/// A way of certifying the layer-1 matching, selected by name.
pub trait MatchingCertifier: Send + Sync {
    fn name(&self) -> &'static str;

    fn needs_modulus(&self) -> bool;

    fn certify(
        &self,
        sel: &Selector,
        cells: &[CellSignature],
        m: Option<Modulus>,
    ) -> Result<MatchingReport>;
}

pub struct Enumerate;

impl MatchingCertifier for Enumerate {
    fn name(&self) -> &'static str {
        "enumerate"
    }

    fn needs_modulus(&self) -> bool {
        true
    }

    fn certify(
        &self,
        sel: &Selector,
        cells: &[CellSignature],
        m: Option<Modulus>,
    ) -> Result<MatchingReport> {
        let m = m.ok_or_else(|| Error::Precondition("enumerate mode needs --m".into()))?;
        Ok(exact_cover_enumerate_with(sel, cells, m))
    }
}

pub struct Symbolic;

impl MatchingCertifier for Symbolic {
    fn name(&self) -> &'static str {
        "symbolic"
    }

    fn needs_modulus(&self) -> bool {
        false
    }

    fn certify(
        &self,
        sel: &Selector,
        cells: &[CellSignature],
        _m: Option<Modulus>,
    ) -> Result<MatchingReport> {
        Ok(exact_cover_symbolic_with(sel, cells))
    }
}

pub struct CertifierRegistry {
    entries: BTreeMap<&'static str, Box<dyn MatchingCertifier>>,
}

impl Default for CertifierRegistry {
    fn default() -> Self {
        let mut reg = CertifierRegistry {
            entries: BTreeMap::new(),
        };
        reg.register(Box::new(Enumerate));
        reg.register(Box::new(Symbolic));
        reg
    }
}

impl CertifierRegistry {
    pub fn register(&mut self, c: Box<dyn MatchingCertifier>) {
        self.entries.insert(c.name(), c);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn MatchingCertifier> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "certifier mode",
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }
}

/// The printed cycle `α_0, ..., α_80` on `A_3`, stored by its first four
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M3CycleTable {
    pub entries: Vec<[u32; 4]>,
}

impl M3CycleTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let nums: Vec<u32> = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::MalformedTable(format!("bad row `{line}`")))
                })
                .collect::<Result<_>>()?;
            let [r, a, b, c, d] = nums[..] else {
                return Err(Error::MalformedTable(format!(
                    "expected 5 fields: `{line}`"
                )));
            };
            if r as usize != entries.len() {
                return Err(Error::MalformedTable(format!(
                    "row index {r} out of sequence"
                )));
            }
            entries.push([a, b, c, d]);
        }
        Ok(M3CycleTable { entries })
    }

    pub fn embedded() -> Self {
        Self::parse(M3_CYCLE_TABLE).expect("embedded m=3 table parses")
    }

    pub fn with_entry(mut self, r: usize, head: [u32; 4]) -> Self {
        self.entries[r] = head;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct M3Verdict {
    pub entries: usize,
    pub distinct: bool,
    pub on_root_flat: bool,
    pub steps_ok: bool,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Checks that the table lists 81 distinct points of `A_3` with
/// `G(α_r) = α_{r+1}` and `α_81 = α_0`.
pub fn verify_m3_certificate_with(sel: &Selector, table: &M3CycleTable) -> M3Verdict {
    let m = Modulus::new(3).expect("3 is odd");
    let mut witness: Option<String> = None;
    let note = |w: &mut Option<String>, msg: String| {
        if w.is_none() {
            *w = Some(msg);
        }
    };

    let mut seen = std::collections::HashSet::new();
    let mut distinct = table.entries.len() == 81;
    if !distinct {
        note(
            &mut witness,
            format!("{} entries, expected 81", table.entries.len()),
        );
    }
    for (r, head) in table.entries.iter().enumerate() {
        if !seen.insert(*head) {
            distinct = false;
            note(
                &mut witness,
                format!("α_{r} = {head:?} repeats an earlier entry"),
            );
        }
    }

    let mut points = Vec::with_capacity(table.entries.len());
    let mut on_root_flat = true;
    for (r, head) in table.entries.iter().enumerate() {
        match RootPoint::from_head(*head, m) {
            Ok(w) => points.push(w),
            Err(e) => {
                on_root_flat = false;
                note(&mut witness, format!("α_{r}: {e}"));
            }
        }
    }

    let mut steps_ok = on_root_flat && !points.is_empty();
    if on_root_flat {
        for r in 0..points.len() {
            let next = points[(r + 1) % points.len()];
            let image = normalized_g(sel, m, &points[r]);
            if image != next {
                steps_ok = false;
                note(
                    &mut witness,
                    format!(
                        "G(α_{r}) = G{} = {image}, table has α_{} = {next}",
                        points[r],
                        (r + 1) % points.len()
                    ),
                );
            }
        }
    }

    M3Verdict {
        entries: table.entries.len(),
        distinct,
        on_root_flat,
        steps_ok,
        pass: distinct && on_root_flat && steps_ok,
        witness,
    }
}

pub fn verify_m3_certificate() -> M3Verdict {
    verify_m3_certificate_with(Selector::standard(), &M3CycleTable::embedded())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::returnmap::cycle_structure;

    fn m(v: u32) -> Modulus {
        Modulus::new(v).unwrap()
    }

    fn zs(idx: &[u8]) -> ZeroSet {
        ZeroSet::from_indices(idx)
    }

    #[test]
    fn checksums_pinned() {
        for (name, ok) in embedded_checksums() {
            assert!(ok, "{name} digest changed");
        }
    }

    #[test]
    fn cell_signature_examples() {
        let c = cell_signature(zs(&[0, 3])).unwrap();
        assert_eq!(c.selector, Z5::new(2));
        assert_eq!(c.forced, vec![(0, Sym::Zero), (3, Sym::Zero)]);
        assert_eq!(
            c.forbidden,
            vec![(2, Sym::One), (4, Sym::MinusOne), (1, Sym::Zero)]
        );

        let c = cell_signature(ZeroSet::FULL).unwrap();
        assert_eq!(c.selector, Z5::new(0));
        assert_eq!(
            c.forced,
            vec![
                (0, Sym::One),
                (4, Sym::MinusOne),
                (1, Sym::Zero),
                (2, Sym::Zero),
                (3, Sym::Zero)
            ]
        );
        assert!(c.forbidden.is_empty());

        let c = cell_signature(zs(&[3])).unwrap();
        assert_eq!(c.selector, Z5::new(4));
        assert_eq!(c.forced, vec![(3, Sym::Zero)]);
        assert_eq!(
            c.forbidden,
            vec![
                (0, Sym::Zero),
                (1, Sym::Zero),
                (2, Sym::Zero),
                (4, Sym::Zero)
            ]
        );

        assert!(cell_signature(zs(&[0, 1, 2, 3])).is_err());
    }

    #[test]
    fn derived_cells_equal_printed_cells() {
        let printed = embedded_cell_signatures();
        assert_eq!(printed.len(), 27);
        for row in &printed {
            assert_eq!(
                &cell_signature(row.zero_set).unwrap(),
                row,
                "row {}",
                row.zero_set
            );
        }
        assert_eq!(
            printed
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .len(),
            27
        );
    }

    #[test]
    fn cell_membership_matches_definition() {
        let mm = m(7);
        let cells = embedded_cell_signatures();
        for y in RootPoint::all(mm) {
            for cell in &cells {
                let pred = y.sub(&q(cell.selector, mm), mm);
                assert_eq!(cell.contains(&y, mm), zero_set(&pred) == cell.zero_set);
            }
        }
    }

    #[test]
    fn enumerate_passes() {
        for modulus in [3, 5, 7] {
            let r = exact_cover_enumerate(m(modulus));
            assert!(r.pass, "{r:?}");
            assert_eq!(r.points_checked, (modulus as usize).pow(4));
        }
    }

    #[test]
    fn symbolic_passes() {
        let r = exact_cover_symbolic();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.points_checked + r.skipped_unrealizable.unwrap(), 1024);
    }

    #[test]
    fn symbolic_examples() {
        let zero = ClassVector([Class::Zero; 5]);
        assert!(zero.realizable());
        let holding: Vec<ZeroSet> = embedded_cell_signatures()
            .into_iter()
            .filter(|c| c.contains_class(&zero))
            .map(|c| c.zero_set)
            .collect();
        assert_eq!(holding.len(), 1);
        let four_zero = ClassVector([
            Class::Zero,
            Class::Zero,
            Class::Zero,
            Class::Zero,
            Class::Other,
        ]);
        assert!(!four_zero.realizable());
        // (0, *, *, 0, x) with x ≠ 0: the section family.
        for last in [Class::One, Class::MinusOne, Class::Other] {
            let cv = ClassVector([Class::Zero, Class::Other, Class::Other, Class::Zero, last]);
            assert!(cv.realizable());
            let cells: Vec<CellSignature> = embedded_cell_signatures()
                .into_iter()
                .filter(|c| c.contains_class(&cv))
                .collect();
            assert_eq!(cells.len(), 1);
        }
    }

    #[test]
    fn realizability_rule_matches_enumeration() {
        for modulus in [13, 15] {
            let mm = m(modulus);
            let seen: std::collections::HashSet<ClassVector> = RootPoint::all(mm)
                .map(|y| ClassVector::of(&y, mm))
                .collect();
            for cv in ClassVector::all() {
                assert_eq!(cv.realizable(), seen.contains(&cv), "m={modulus} {cv}");
            }
        }
    }

    #[test]
    fn swapped_selector_breaks_matching() {
        let sel = Selector::standard()
            .clone()
            .with_swapped_rows(zs(&[0, 3]), zs(&[3]));
        let r = exact_cover_enumerate_with(&sel, &embedded_cell_signatures(), m(5));
        assert!(!r.pass);
        assert!(r
            .counter_examples
            .iter()
            .any(|c| c.valid_directions.len() != 1));
        let s = exact_cover_symbolic_with(&sel, &embedded_cell_signatures());
        assert!(!s.pass);
    }

    #[test]
    fn registry_dispatch() {
        let reg = CertifierRegistry::default();
        assert_eq!(reg.names(), vec!["enumerate", "symbolic"]);
        let cells = embedded_cell_signatures();
        let r = reg
            .get("enumerate")
            .unwrap()
            .certify(Selector::standard(), &cells, Some(m(3)))
            .unwrap();
        assert!(r.pass);
        assert!(reg
            .get("enumerate")
            .unwrap()
            .certify(Selector::standard(), &cells, None)
            .is_err());
        assert!(reg.get("guess").is_err());
    }

    #[test]
    fn m3_certificate() {
        let v = verify_m3_certificate();
        assert!(v.pass, "{v:?}");
        let m3 = m(3);
        let t = M3CycleTable::embedded();
        let a0 = RootPoint::from_head(t.entries[0], m3).unwrap();
        let a1 = RootPoint::from_head(t.entries[1], m3).unwrap();
        let a2 = RootPoint::from_head(t.entries[2], m3).unwrap();
        assert_eq!(normalized_g(Selector::standard(), m3, &a0), a1);
        assert_eq!(a1.coords(), [1, 0, 0, 1, 1]);
        assert_eq!(a2.coords(), [1, 0, 0, 2, 0]);
        assert_eq!(zero_set(&a1), zs(&[1, 2]));
        let g = cycle_structure(m3, |w| normalized_g(Selector::standard(), m3, w)).unwrap();
        assert_eq!(g, BTreeMap::from([(81, 1)]));
    }

    #[test]
    fn corrupted_m3_entry_fails() {
        let t = M3CycleTable::embedded().with_entry(40, [2, 1, 0, 0]);
        let v = verify_m3_certificate_with(Selector::standard(), &t);
        assert!(!v.pass);
        assert!(!v.distinct);
        assert!(v.witness.is_some());
        let t = M3CycleTable::embedded().with_entry(7, [2, 2, 0, 3]);
        let v = verify_m3_certificate_with(Selector::standard(), &t);
        assert!(!v.on_root_flat);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn point() -> impl Strategy<Value = (u32, [u32; 4])> {
            prop::sample::select(vec![3u32, 5, 7, 13, 15, 21])
                .prop_flat_map(|m| (Just(m), prop::array::uniform4(0..m)))
        }

        proptest! {
            #[test]
            fn class_vector_predicts_predecessor_zero_set((modulus, head) in point(), i in 0u8..5) {
                let mm = m(modulus);
                let y = RootPoint::from_head(head, mm).unwrap();
                let i = Z5::new(i as i64);
                let actual = zero_set(&y.sub(&q(i, mm), mm));
                prop_assert_eq!(ClassVector::of(&y, mm).predecessor_zero_set(i), actual);
            }

            #[test]
            fn every_point_has_a_realizable_class_vector((modulus, head) in point()) {
                let mm = m(modulus);
                prop_assume!(modulus >= SYMBOLIC_THRESHOLD);
                let y = RootPoint::from_head(head, mm).unwrap();
                prop_assert!(ClassVector::of(&y, mm).realizable());
            }

            #[test]
            fn unique_predecessor((modulus, head) in point()) {
                let mm = m(modulus);
                let y = RootPoint::from_head(head, mm).unwrap();
                prop_assert_eq!(valid_predecessors(Selector::standard(), mm, &y).len(), 1);
            }
        }
    }
}
