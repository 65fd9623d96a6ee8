//! First returns of the normalized map `G` to the section
//! `Σ = {w(a, b) = (0, a, b, 0, -a-b) : a + b ≠ 0}`, where the color-0
//! selector equals 2.
//!
//! Every closed form here has a direct-iteration counterpart, and the tests
//! compare the two over whole domains.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modring::{Direction, Displacement, Modulus, RootPoint};
use crate::returnmap::normalized_g;
use crate::selector::Selector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SectionPoint {
    pub a: u32,
    pub b: u32,
}

impl SectionPoint {
    pub fn new(a: u32, b: u32, m: Modulus) -> Result<Self> {
        let mm = m.get();
        if a >= mm || b >= mm {
            return Err(Error::ResidueOutOfRange {
                value: a.max(b),
                m: mm,
            });
        }
        if (a + b).is_multiple_of(mm) {
            return Err(Error::NotASectionPoint { a, b });
        }
        Ok(SectionPoint { a, b })
    }

    /// `s = a + b` as its representative in `1..m`.
    pub fn s(&self, m: Modulus) -> u32 {
        (self.a + self.b) % m.get()
    }

    pub fn to_root(&self, m: Modulus) -> RootPoint {
        RootPoint::from_signed(
            [
                0,
                self.a as i64,
                self.b as i64,
                0,
                -(self.a as i64) - self.b as i64,
            ],
            m,
        )
        .expect("section points lie on the root flat")
    }

    /// Reads `(a, b) = (w_1, w_2)` off a point of `Σ`.
    pub fn from_root(w: &RootPoint) -> Option<Self> {
        in_section(w).then(|| SectionPoint {
            a: w.get(1),
            b: w.get(2),
        })
    }

    /// All `m(m-1)` section points, row by row.
    pub fn all(m: Modulus) -> Vec<SectionPoint> {
        let mm = m.get();
        (0..mm)
            .flat_map(|b| (0..mm).map(move |a| (a, b)))
            .filter(|&(a, b)| (a + b) % mm != 0)
            .map(|(a, b)| SectionPoint { a, b })
            .collect()
    }
}

impl std::fmt::Display for SectionPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReturnRecord {
    pub start: SectionPoint,
    pub end: SectionPoint,
    /// Counted in applications of `G`.
    pub length: u64,
}

/// `w_0 = 0, w_3 = 0, w_4 ≠ 0`.
pub fn in_section(w: &RootPoint) -> bool {
    w.get(0) == 0 && w.get(3) == 0 && w.get(4) != 0
}

/// Iterates `G` from `w(a, b)` until the orbit first lands in `Σ` again.
pub fn simulate_first_return(sel: &Selector, m: Modulus, p: SectionPoint) -> Result<ReturnRecord> {
    let cap = m.root_flat_size() as u64 + 1;
    let mut w = p.to_root(m);
    for step in 1..=cap {
        w = normalized_g(sel, m, &w);
        if let Some(end) = SectionPoint::from_root(&w) {
            return Ok(ReturnRecord {
                start: p,
                end,
                length: step,
            });
        }
    }
    Err(Error::StepCapExceeded {
        start: (p.a, p.b),
        cap,
    })
}

fn require_ge5(m: Modulus) -> Result<()> {
    if m.get() < 5 {
        return Err(Error::Precondition(format!("m ≥ 5 required (got {m})")));
    }
    Ok(())
}

/// The first-return table in closed form.
pub fn closed_form_first_return(m: Modulus, p: SectionPoint) -> Result<ReturnRecord> {
    require_ge5(m)?;
    let mm = m.get();
    let h = m.h();
    let p = SectionPoint::new(p.a, p.b, m)?;
    let big_m = mm as u64;
    let (end, length) = if p.b <= mm - 2 {
        let s = p.s(m);
        let a_next = if s == h { p.a } else { (p.a + h) % mm };
        let blocks = if s < h {
            h + 1
        } else if s == h {
            2 * (h + 1)
        } else {
            3 * h + 2
        };
        (
            SectionPoint {
                a: a_next,
                b: p.b + 1,
            },
            blocks as u64 * big_m,
        )
    } else if p.a == 0 {
        (
            SectionPoint { a: 1, b: 0 },
            big_m.pow(3) - (big_m - 1) * (big_m - 2),
        )
    } else {
        (SectionPoint { a: p.a, b: 0 }, big_m - 1)
    };
    Ok(ReturnRecord {
        start: p,
        end,
        length,
    })
}

/// Applies `G` `steps` times, returning the selector values used and the
/// end point.
pub fn selector_word(
    sel: &Selector,
    m: Modulus,
    w: &RootPoint,
    steps: u64,
) -> (Vec<Direction>, RootPoint) {
    let mut word = Vec::with_capacity(steps as usize);
    let mut cur = *w;
    for _ in 0..steps {
        word.push(sel.p(crate::modring::zero_set(&cur)));
        cur = normalized_g(sel, m, &cur);
    }
    (word, cur)
}

pub fn iterate_g(sel: &Selector, m: Modulus, w: &RootPoint, steps: u64) -> RootPoint {
    (0..steps).fold(*w, |acc, _| normalized_g(sel, m, &acc))
}

/// `G^m w(a, b) = (-2, a+1, b+1, 0, -s)` for a normal row `b ≤ m - 2`.
pub fn first_block(m: Modulus, p: SectionPoint) -> Result<RootPoint> {
    require_ge5(m)?;
    let p = SectionPoint::new(p.a, p.b, m)?;
    if p.b == m.get() - 1 {
        return Err(Error::Precondition("first block needs b ≤ m - 2".into()));
    }
    let s = p.s(m) as i64;
    RootPoint::from_signed([-2, p.a as i64 + 1, p.b as i64 + 1, 0, -s], m)
}

/// Net displacement of `ℓ` steps of `G` using selector value `i` exactly
/// `counts[i]` times: `(-3ℓ + N_0, N_1, N_2, ℓ + N_3, ℓ + N_4)`.
pub fn displacement_from_counts(m: Modulus, length: u64, counts: [u64; 5]) -> Result<Displacement> {
    let total: u64 = counts.iter().sum();
    if total != length {
        return Err(Error::Precondition(format!(
            "selector counts sum to {total}, not ℓ = {length}"
        )));
    }
    let l = length as i64;
    let n = counts.map(|v| v as i64);
    RootPoint::from_signed([-3 * l + n[0], n[1], n[2], l + n[3], l + n[4]], m)
}

pub fn word_counts(word: &[Direction]) -> [u64; 5] {
    let mut counts = [0u64; 5];
    for d in word {
        counts[d.index()] += 1;
    }
    counts
}

/// Block-boundary state `(x, y, B, 0, z)`; `B` stays fixed over an excursion
/// and is not stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ThetaState {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl ThetaState {
    /// The root point `(x, y, B, 0, z)`; `y` must match the root-flat
    /// relation for the given `B`.
    pub fn to_root(&self, big_b: u32, m: Modulus) -> Result<RootPoint> {
        RootPoint::new([self.x, self.y, big_b, 0, self.z], m)
    }

    pub fn from_root(w: &RootPoint) -> Self {
        ThetaState {
            x: w.get(0),
            y: w.get(1),
            z: w.get(4),
        }
    }
}

/// One block of the normal-row recurrence:
/// `(x-1, 0)` if `z = -1`; `(-1, 0)` if `x = z = 0`; else `(x-2, z+1)`.
/// `y` is unchanged on the first branch and advances by one otherwise.
pub fn theta(m: Modulus, st: ThetaState) -> Result<ThetaState> {
    let mm = m.get();
    if st.x == 0 && st.z != 0 {
        return Err(Error::Precondition(format!(
            "({}, {}) lies in the section",
            st.x, st.z
        )));
    }
    let r = |v: i64| m.reduce(v);
    let (x, z, dy) = if st.z == mm - 1 {
        (r(st.x as i64 - 1), 0, 0)
    } else if st.x == 0 && st.z == 0 {
        (mm - 1, 0, 1)
    } else {
        (r(st.x as i64 - 2), r(st.z as i64 + 1), 1)
    };
    Ok(ThetaState {
        x,
        y: r(st.y as i64 + dy),
        z,
    })
}

/// Every block-boundary state outside `Σ` with `B ≠ 0`, as `(B, state)`.
pub fn theta_domain(m: Modulus) -> Vec<(u32, ThetaState)> {
    let mm = m.get();
    let mut out = Vec::new();
    for big_b in 1..mm {
        for x in 0..mm {
            for z in 0..mm {
                if x == 0 && z != 0 {
                    continue;
                }
                let y = m.reduce(-(x as i64) - big_b as i64 - z as i64);
                out.push((big_b, ThetaState { x, y, z }));
            }
        }
    }
    out
}

/// `E(u, v) = (u, v, 0, 0, -u-v)` with `u ≠ 0` and `u + v ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EState {
    pub u: u32,
    pub v: u32,
}

impl EState {
    pub fn new(u: u32, v: u32, m: Modulus) -> Result<Self> {
        let mm = m.get();
        if u >= mm || v >= mm || u == 0 || (u + v).is_multiple_of(mm) {
            return Err(Error::Precondition(format!(
                "E({u}, {v}) needs u ≠ 0 and u + v ≠ 0"
            )));
        }
        Ok(EState { u, v })
    }

    pub fn to_root(&self, m: Modulus) -> RootPoint {
        RootPoint::from_signed(
            [
                self.u as i64,
                self.v as i64,
                0,
                0,
                -(self.u as i64) - self.v as i64,
            ],
            m,
        )
        .expect("E-states lie on the root flat")
    }

    pub fn all(m: Modulus) -> Vec<EState> {
        let mm = m.get();
        (1..mm)
            .flat_map(|u| (0..mm).map(move |v| (u, v)))
            .filter(|&(u, v)| (u + v) % mm != 0)
            .map(|(u, v)| EState { u, v })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LwNext {
    E(EState),
    Section(SectionPoint),
}

impl LwNext {
    pub fn to_root(&self, m: Modulus) -> RootPoint {
        match self {
            LwNext::E(e) => e.to_root(m),
            LwNext::Section(p) => p.to_root(m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LwMove {
    /// `v + 1 = 0`, length `m`.
    QuickSeam,
    /// Neither seam, length `m - 1`.
    Generic,
    /// `v + 1 = -u`, length `3m - 2`.
    LongSeam,
}

/// One transition inside the long-wrap family.
pub fn lw_step(m: Modulus, e: EState) -> Result<(LwNext, u64, LwMove)> {
    require_ge5(m)?;
    let e = EState::new(e.u, e.v, m)?;
    let mm = m.get();
    let big_m = mm as u64;
    let v1 = (e.v + 1) % mm;
    let minus_u = mm - e.u;
    Ok(if v1 == 0 {
        (LwNext::E(EState { u: e.u, v: 0 }), big_m, LwMove::QuickSeam)
    } else if v1 != minus_u {
        (
            LwNext::E(EState { u: e.u, v: v1 }),
            big_m - 1,
            LwMove::Generic,
        )
    } else if e.u == mm - 1 {
        (
            LwNext::Section(SectionPoint { a: 1, b: 0 }),
            3 * big_m - 2,
            LwMove::LongSeam,
        )
    } else {
        (
            LwNext::E(EState {
                u: e.u + 1,
                v: minus_u,
            }),
            3 * big_m - 2,
            LwMove::LongSeam,
        )
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LongWrap {
    pub record: ReturnRecord,
    pub initial_segment: u64,
    pub quick_seams: u64,
    pub long_seams: u64,
    pub generic: u64,
}

/// Walks `G` for `steps` steps from `from`, failing if the orbit meets `Σ`
/// before the last step or does not end at `to`.
fn follow_segment(
    sel: &Selector,
    m: Modulus,
    from: &RootPoint,
    to: &RootPoint,
    steps: u64,
    label: &str,
) -> Result<()> {
    let mut cur = *from;
    for k in 1..=steps {
        cur = normalized_g(sel, m, &cur);
        if k < steps && in_section(&cur) {
            return Err(Error::Structural(format!(
                "{label}: orbit from {from} meets the section at step {k} ({cur})"
            )));
        }
    }
    if cur != *to {
        return Err(Error::Structural(format!(
            "{label}: G^{steps}{from} = {cur}, skeleton predicts {to}"
        )));
    }
    Ok(())
}

/// The excursion from `w(0, m-1)`: an initial segment of length `2m` to
/// `E(1, 0)`, then long-wrap transitions until the section is reached. Each
/// segment is replayed by direct iteration of `G`.
pub fn long_wrap(sel: &Selector, m: Modulus) -> Result<LongWrap> {
    require_ge5(m)?;
    let mm = m.get();
    let start = SectionPoint { a: 0, b: mm - 1 };
    let initial = 2 * mm as u64;
    let first = EState { u: 1, v: 0 };
    follow_segment(
        sel,
        m,
        &start.to_root(m),
        &first.to_root(m),
        initial,
        "initial segment",
    )?;

    let mut wrap = LongWrap {
        record: ReturnRecord {
            start,
            end: start,
            length: initial,
        },
        initial_segment: initial,
        quick_seams: 0,
        long_seams: 0,
        generic: 0,
    };
    let mut e = first;
    let limit = (mm as u64 - 1).pow(2) + 1;
    for _ in 0..limit {
        let (next, steps, kind) = lw_step(m, e)?;
        follow_segment(
            sel,
            m,
            &e.to_root(m),
            &next.to_root(m),
            steps,
            &format!("E({}, {})", e.u, e.v),
        )?;
        wrap.record.length += steps;
        match kind {
            LwMove::QuickSeam => wrap.quick_seams += 1,
            LwMove::Generic => wrap.generic += 1,
            LwMove::LongSeam => wrap.long_seams += 1,
        }
        match next {
            LwNext::E(n) => e = n,
            LwNext::Section(p) => {
                wrap.record.end = p;
                return Ok(wrap);
            }
        }
    }
    Err(Error::Structural("long wrap did not close".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct InducedCycle {
    pub m: u32,
    pub cycle: Vec<SectionPoint>,
    pub covers_section: bool,
    pub row_turn_ok: bool,
    pub pass: bool,
}

/// Iterates the closed-form first-return map `Φ` from `(1, 0)`.
pub fn induced_cycle(m: Modulus) -> Result<InducedCycle> {
    require_ge5(m)?;
    let mm = m.get();
    let size = (mm * (mm - 1)) as usize;
    let phi = |p: SectionPoint| closed_form_first_return(m, p).map(|r| r.end);

    let start = SectionPoint { a: 1, b: 0 };
    let mut cycle = vec![start];
    let mut cur = phi(start)?;
    while cur != start && cycle.len() <= size {
        cycle.push(cur);
        cur = phi(cur)?;
    }
    let distinct: HashSet<SectionPoint> = cycle.iter().copied().collect();
    let covers_section = cur == start && cycle.len() == size && distinct.len() == size;

    let mut row_turn_ok = true;
    for a in 1..mm {
        let mut p = SectionPoint { a, b: 0 };
        for _ in 0..mm {
            p = phi(p)?;
        }
        let want = if a == mm - 1 { 1 } else { a + 1 };
        row_turn_ok &= p == SectionPoint { a: want, b: 0 };
    }

    Ok(InducedCycle {
        m: mm,
        cycle,
        covers_section,
        row_turn_ok,
        pass: covers_section && row_turn_ok,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcursionTotals {
    pub m: u32,
    /// Indexed by the row `b`.
    pub row_sums: Vec<u64>,
    pub total: u64,
    pub pass: bool,
}

/// Sums the closed-form return times row by row.
pub fn total_excursion(m: Modulus) -> Result<ExcursionTotals> {
    require_ge5(m)?;
    let mm = m.get();
    let mut row_sums = vec![0u64; mm as usize];
    for p in SectionPoint::all(m) {
        row_sums[p.b as usize] += closed_form_first_return(m, p)?.length;
    }
    let total = row_sums.iter().sum();
    let big_m = mm as u64;
    let pass = row_sums.iter().all(|&r| r == big_m.pow(3)) && total == big_m.pow(4);
    Ok(ExcursionTotals {
        m: mm,
        row_sums,
        total,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FirstReturnRow {
    pub start: SectionPoint,
    pub end: SectionPoint,
    pub length: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_agrees: Option<bool>,
}

/// The full `Φ`/`ℓ` table by simulation, optionally checked against the
/// closed form.
pub fn first_return_table(
    sel: &Selector,
    m: Modulus,
    check_closed_form: bool,
) -> Result<Vec<FirstReturnRow>> {
    SectionPoint::all(m)
        .into_iter()
        .map(|p| {
            let sim = simulate_first_return(sel, m, p)?;
            let closed_form_agrees = if check_closed_form {
                Some(closed_form_first_return(m, p)? == sim)
            } else {
                None
            };
            Ok(FirstReturnRow {
                start: p,
                end: sim.end,
                length: sim.length,
                closed_form_agrees,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub name: &'static str,
    pub cases: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructuralReport {
    pub m: u32,
    pub checks: Vec<OracleCheck>,
    pub pass: bool,
}

fn oracle<I, F>(name: &'static str, cases: I, mut check: F) -> OracleCheck
where
    I: IntoIterator,
    F: FnMut(I::Item) -> Result<Option<String>>,
{
    let mut n = 0;
    let mut witness = None;
    for case in cases {
        n += 1;
        let outcome = check(case).unwrap_or_else(|e| Some(e.to_string()));
        if witness.is_none() {
            witness = outcome;
        }
    }
    OracleCheck {
        name,
        cases: n,
        pass: witness.is_none(),
        witness,
    }
}

/// Compares `first_block`, `theta` and `lw_step` with direct iteration of
/// `G` on each of their full domains.
pub fn check_structural_oracles(sel: &Selector, m: Modulus) -> Result<StructuralReport> {
    require_ge5(m)?;
    let mm = m.get();
    let normal_rows = SectionPoint::all(m).into_iter().filter(|p| p.b <= mm - 2);
    let checks = vec![
        oracle("first_block", normal_rows, |p| {
            let want = first_block(m, p)?;
            let got = iterate_g(sel, m, &p.to_root(m), mm as u64);
            Ok((got != want).then(|| format!("G^m w{p} = {got}, first_block gives {want}")))
        }),
        oracle("theta", theta_domain(m), |(big_b, st)| {
            let end = iterate_g(sel, m, &st.to_root(big_b, m)?, mm as u64);
            let want = theta(m, st)?;
            let ok = end.get(2) == big_b && end.get(3) == 0 && ThetaState::from_root(&end) == want;
            Ok((!ok).then(|| format!("B={big_b} {st:?}: G^m gives {end}, theta gives {want:?}")))
        }),
        oracle("lw_step", EState::all(m), |e| {
            let (next, steps, _) = lw_step(m, e)?;
            let got = iterate_g(sel, m, &e.to_root(m), steps);
            let want = next.to_root(m);
            Ok((got != want).then(|| {
                format!(
                    "E({}, {}): G^{steps} gives {got}, lw_step gives {want}",
                    e.u, e.v
                )
            }))
        }),
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(StructuralReport {
        m: mm,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modring::{zero_set, Z5};
    use crate::selector::ZeroSet;

    fn z5(v: u8) -> Z5 {
        Z5::new(v as i64)
    }

    fn m(v: u32) -> Modulus {
        Modulus::new(v).unwrap()
    }

    fn sp(a: u32, b: u32) -> SectionPoint {
        SectionPoint { a, b }
    }

    fn sel() -> &'static Selector {
        Selector::standard()
    }

    #[test]
    fn section_membership() {
        let w = RootPoint::new([0, 1, 1, 0, 3], m(5)).unwrap();
        assert!(in_section(&w));
        assert!(!in_section(&RootPoint::ZERO));
        assert_eq!(SectionPoint::all(m(5)).len(), 20);
        assert!(SectionPoint::new(1, 4, m(5)).is_err());
    }

    #[test]
    fn section_is_where_selector_is_two() {
        for modulus in [3, 5, 7, 9] {
            let mm = m(modulus);
            let mut count = 0;
            for w in RootPoint::all(mm) {
                let by_selector = sel().p(zero_set(&w)) == z5(2);
                assert_eq!(in_section(&w), by_selector, "w={w}");
                count += by_selector as u32;
            }
            assert_eq!(count, modulus * (modulus - 1));
        }
    }

    // Frozen from the simulation oracle below before the closed form existed.
    #[test]
    fn simulated_examples() {
        let r = simulate_first_return(sel(), m(5), sp(3, 4)).unwrap();
        assert_eq!((r.end, r.length), (sp(3, 0), 4));
        let r = simulate_first_return(sel(), m(5), sp(2, 0)).unwrap();
        assert_eq!((r.end, r.length), (sp(2, 1), 30));
        let r = simulate_first_return(sel(), m(5), sp(0, 4)).unwrap();
        assert_eq!((r.end, r.length), (sp(1, 0), 113));
        let r = simulate_first_return(sel(), m(7), sp(0, 6)).unwrap();
        assert_eq!((r.end, r.length), (sp(1, 0), 313));
    }

    #[test]
    fn closed_form_examples() {
        let r = closed_form_first_return(m(5), sp(1, 0)).unwrap();
        assert_eq!((r.end, r.length), (sp(3, 1), 15));
        let r = closed_form_first_return(m(5), sp(4, 0)).unwrap();
        assert_eq!((r.end, r.length), (sp(1, 1), 40));
        let r = closed_form_first_return(m(7), sp(0, 6)).unwrap();
        assert_eq!((r.end, r.length), (sp(1, 0), 313));
        assert!(closed_form_first_return(m(5), sp(1, 4)).is_err());
        assert!(closed_form_first_return(m(3), sp(1, 0)).is_err());
    }

    #[test]
    fn closed_form_matches_simulation() {
        for modulus in [5, 7, 9] {
            for p in SectionPoint::all(m(modulus)) {
                assert_eq!(
                    closed_form_first_return(m(modulus), p).unwrap(),
                    simulate_first_return(sel(), m(modulus), p).unwrap(),
                    "m={modulus} p={p}"
                );
            }
        }
    }

    #[test]
    fn first_block_examples() {
        assert_eq!(
            first_block(m(5), sp(1, 0)).unwrap().coords(),
            [3, 2, 1, 0, 4]
        );
        assert_eq!(
            first_block(m(7), sp(2, 3)).unwrap().coords(),
            [5, 3, 4, 0, 2]
        );
        assert!(first_block(m(5), sp(0, 4)).is_err());
    }

    #[test]
    fn first_block_word() {
        for modulus in [5, 7, 9] {
            let mm = m(modulus);
            for p in SectionPoint::all(mm)
                .into_iter()
                .filter(|p| p.b <= modulus - 2)
            {
                let s = p.s(mm) as usize;
                let (word, end) = selector_word(sel(), mm, &p.to_root(mm), modulus as u64);
                let mut expected = vec![z5(2)];
                expected.extend(std::iter::repeat_n(z5(0), s - 1));
                expected.push(z5(1));
                expected.extend(std::iter::repeat_n(z5(0), modulus as usize - s - 1));
                assert_eq!(word, expected, "m={modulus} p={p}");
                assert_eq!(end, first_block(mm, p).unwrap());
                assert_eq!(word_counts(&word), [modulus as u64 - 2, 1, 1, 0, 0]);
            }
        }
    }

    #[test]
    fn displacement_examples() {
        let mm = m(5);
        assert_eq!(
            displacement_from_counts(mm, 5, [3, 1, 1, 0, 0])
                .unwrap()
                .coords(),
            [3, 1, 1, 0, 0]
        );
        assert!(displacement_from_counts(mm, 0, [0; 5]).unwrap().is_zero());
        assert!(displacement_from_counts(mm, 4, [3, 0, 0, 0, 0]).is_err());
        // Short last row: word 2, 0^{a-2}, 3, 0^{m-a-1} carries w(a,-1) to w(a,0).
        let a = 3;
        let disp = displacement_from_counts(mm, 4, [2, 0, 1, 1, 0]).unwrap();
        let start = sp(a, 4).to_root(mm);
        assert_eq!(start.add(&disp, mm), sp(a, 0).to_root(mm));
    }

    #[test]
    fn short_last_row_word() {
        for modulus in [5, 7, 9] {
            let mm = m(modulus);
            for a in 2..modulus {
                let (word, end) = selector_word(
                    sel(),
                    mm,
                    &sp(a, modulus - 1).to_root(mm),
                    modulus as u64 - 1,
                );
                let mut expected = vec![z5(2)];
                expected.extend(std::iter::repeat_n(z5(0), a as usize - 2));
                expected.push(z5(3));
                expected.extend(std::iter::repeat_n(z5(0), (modulus - a - 1) as usize));
                assert_eq!(word, expected);
                assert_eq!(end, sp(a, 0).to_root(mm));
                let disp =
                    displacement_from_counts(mm, modulus as u64 - 1, word_counts(&word)).unwrap();
                assert_eq!(sp(a, modulus - 1).to_root(mm).add(&disp, mm), end);
            }
        }
    }

    #[test]
    fn theta_examples() {
        let mm = m(7);
        let st = theta(mm, ThetaState { x: 3, y: 4, z: 6 }).unwrap();
        assert_eq!(st, ThetaState { x: 2, y: 4, z: 0 });
        let st = theta(mm, ThetaState { x: 0, y: 4, z: 0 }).unwrap();
        assert_eq!(st, ThetaState { x: 6, y: 5, z: 0 });
        let st = theta(mm, ThetaState { x: 3, y: 1, z: 2 }).unwrap();
        assert_eq!(st, ThetaState { x: 1, y: 2, z: 3 });
        assert!(theta(mm, ThetaState { x: 0, y: 0, z: 2 }).is_err());
    }

    #[test]
    fn theta_matches_block_iteration() {
        for modulus in [5, 7] {
            let mm = m(modulus);
            for (big_b, st) in theta_domain(mm) {
                let w = st.to_root(big_b, mm).unwrap();
                let end = iterate_g(sel(), mm, &w, modulus as u64);
                assert_eq!(end.get(2), big_b);
                assert_eq!(end.get(3), 0);
                assert_eq!(
                    ThetaState::from_root(&end),
                    theta(mm, st).unwrap(),
                    "m={modulus} B={big_b} {st:?}"
                );
            }
        }
    }

    #[test]
    fn lw_step_examples() {
        let mm = m(5);
        let (n, l, k) = lw_step(mm, EState { u: 2, v: 4 }).unwrap();
        assert_eq!(
            (n, l, k),
            (LwNext::E(EState { u: 2, v: 0 }), 5, LwMove::QuickSeam)
        );
        let (n, l, _) = lw_step(mm, EState { u: 1, v: 0 }).unwrap();
        assert_eq!((n, l), (LwNext::E(EState { u: 1, v: 1 }), 4));
        let (n, l, k) = lw_step(mm, EState { u: 4, v: 0 }).unwrap();
        assert_eq!((n, l, k), (LwNext::Section(sp(1, 0)), 13, LwMove::LongSeam));
        assert!(lw_step(mm, EState { u: 0, v: 1 }).is_err());
        assert!(lw_step(mm, EState { u: 2, v: 3 }).is_err());
    }

    #[test]
    fn lw_step_matches_iteration() {
        for modulus in [5, 7] {
            let mm = m(modulus);
            for e in EState::all(mm) {
                let (next, steps, _) = lw_step(mm, e).unwrap();
                assert_eq!(
                    iterate_g(sel(), mm, &e.to_root(mm), steps),
                    next.to_root(mm),
                    "m={modulus} {e:?}"
                );
            }
        }
    }

    #[test]
    fn structural_oracles_pass() {
        for modulus in [5, 7] {
            let r = check_structural_oracles(sel(), m(modulus)).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(
                r.checks[1].cases,
                ((modulus - 1) * (modulus * modulus - modulus + 1)) as usize
            );
        }
        let broken = sel()
            .clone()
            .with_swapped_rows(ZeroSet::from_indices(&[0, 3]), ZeroSet::from_indices(&[3]));
        let r = check_structural_oracles(&broken, m(5)).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn long_wrap_skeleton() {
        let w5 = long_wrap(sel(), m(5)).unwrap();
        assert_eq!((w5.record.end, w5.record.length), (sp(1, 0), 113));
        assert_eq!((w5.quick_seams, w5.long_seams, w5.generic), (3, 4, 9));
        let w7 = long_wrap(sel(), m(7)).unwrap();
        assert_eq!(w7.record.length, 313);
        assert_eq!((w7.quick_seams, w7.long_seams, w7.generic), (5, 6, 25));
        for modulus in [5, 7, 9, 11] {
            let mm = m(modulus);
            let w = long_wrap(sel(), mm).unwrap();
            assert_eq!(
                w.record,
                simulate_first_return(sel(), mm, sp(0, modulus - 1)).unwrap()
            );
        }
    }

    #[test]
    fn induced_cycle_and_totals() {
        let c5 = induced_cycle(m(5)).unwrap();
        assert!(c5.pass);
        assert_eq!(c5.cycle.len(), 20);
        let c9 = induced_cycle(m(9)).unwrap();
        assert_eq!(c9.cycle.len(), 72);
        assert!(c9.pass);

        let mut p = sp(1, 0);
        for _ in 0..5 {
            p = closed_form_first_return(m(5), p).unwrap().end;
        }
        assert_eq!(p, sp(2, 0));

        let t5 = total_excursion(m(5)).unwrap();
        assert_eq!(t5.total, 625);
        let t7 = total_excursion(m(7)).unwrap();
        assert_eq!(t7.row_sums[0], 343);
        assert_eq!(t7.row_sums[6], 343);
        assert!(t7.pass);
    }
}
