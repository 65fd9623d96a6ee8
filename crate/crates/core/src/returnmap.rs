//! m-step color returns, their normalized forms, and the rotation
//! conjugacies relating the five colors.

use std::collections::BTreeMap;
use std::sync::Arc;

use bitvec::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modring::{add_q, q, rotate, zero_set, Color, Displacement, Modulus, RootPoint, Z5};
use crate::schedule::{Schedule, ScheduleKind};
use crate::selector::Selector;

/// `B = (-3, 0, 0, 1, 1)`, the constant part of the normalized return. Its
/// coordinate sum is `-1`, so `B` alone is not in `A_m`; `B + e_p` is.
pub const B_VECTOR: [i64; 5] = [-3, 0, 0, 1, 1];

/// A map on `A_m` built from translations and the selector step
/// `P_c(w) = w + q_{Λ_1(Z(w)-1)(c)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineMap {
    Translation(Displacement),
    SelectorStep(Color),
    /// Applied in order: the first element acts first.
    Compose(Vec<AffineMap>),
}

impl AffineMap {
    pub fn translation_q(i: Color, m: Modulus) -> AffineMap {
        AffineMap::Translation(q(i, m))
    }

    pub fn eval(&self, sel: &Selector, m: Modulus, w: &RootPoint) -> RootPoint {
        match self {
            AffineMap::Translation(v) => w.add(v, m),
            AffineMap::SelectorStep(c) => add_q(w, sel.layer_direction(zero_set(w), *c), m),
            AffineMap::Compose(parts) => parts.iter().fold(*w, |acc, f| f.eval(sel, m, &acc)),
        }
    }

    /// Merges adjacent translations; the result is equal as a map.
    pub fn simplify(&self, m: Modulus) -> AffineMap {
        let mut flat = Vec::new();
        self.flatten_into(&mut flat);
        let mut out: Vec<AffineMap> = Vec::new();
        for f in flat {
            match (out.last_mut(), &f) {
                (Some(AffineMap::Translation(a)), AffineMap::Translation(b)) => *a = a.add(b, m),
                _ => out.push(f),
            }
        }
        out.retain(|f| !matches!(f, AffineMap::Translation(v) if v.is_zero()));
        match out.len() {
            0 => AffineMap::Translation(RootPoint::ZERO),
            1 => out.pop().unwrap(),
            _ => AffineMap::Compose(out),
        }
    }

    fn flatten_into(&self, out: &mut Vec<AffineMap>) {
        match self {
            AffineMap::Compose(parts) => parts.iter().for_each(|p| p.flatten_into(out)),
            other => out.push(other.clone()),
        }
    }
}

/// `R_c = P_{m-1,c} ∘ ... ∘ P_{0,c}` evaluated layer by layer.
pub fn return_r(schedule: &dyn Schedule, c: Color, w: &RootPoint) -> RootPoint {
    let m = schedule.modulus();
    (0..m.get()).fold(*w, |acc, t| add_q(&acc, schedule.direction(t, &acc, c), m))
}

/// The displayed factorization of `R_c` into translations and `P_c`.
pub fn symbolic_return(kind: ScheduleKind, m: Modulus, c: Color) -> AffineMap {
    use AffineMap::*;
    match kind {
        ScheduleKind::SchGe5 => Compose(vec![
            AffineMap::translation_q(c, m),
            SelectorStep(c),
            AffineMap::translation_q(c + 3, m),
            AffineMap::translation_q(c + 4, m),
            Translation(q(c, m).scale(m.get() as i64 - 4, m)),
        ]),
        ScheduleKind::Sch3 => Compose(vec![
            AffineMap::translation_q(c + 4, m),
            SelectorStep(c),
            AffineMap::translation_q(c + 3, m),
        ]),
    }
}

/// The translation conjugating `R_c` to `G_c`: `q_c` for `m ≥ 5`, `q_{c+4}`
/// for `m = 3`.
pub fn conjugator(kind: ScheduleKind, m: Modulus, c: Color) -> Displacement {
    match kind {
        ScheduleKind::SchGe5 => q(c, m),
        ScheduleKind::Sch3 => q(c + 4, m),
    }
}

/// `G_c = T_{-3q_c + q_{c+3} + q_{c+4}} ∘ P_c`.
pub fn normalized_gc_map(m: Modulus, c: Color) -> AffineMap {
    let shift = q(c, m)
        .scale(-3, m)
        .add(&q(c + 3, m), m)
        .add(&q(c + 4, m), m);
    AffineMap::Compose(vec![
        AffineMap::SelectorStep(c),
        AffineMap::Translation(shift),
    ])
}

pub fn normalized_gc(sel: &Selector, m: Modulus, c: Color, w: &RootPoint) -> RootPoint {
    normalized_gc_map(m, c).eval(sel, m, w)
}

/// `G(w) = w + B + e_p` with `p = p(Z(w))`.
#[inline]
pub fn normalized_g(sel: &Selector, m: Modulus, w: &RootPoint) -> RootPoint {
    let p = sel.p(zero_set(w)).index();
    let mm = m.get();
    let mut out = w.0;
    out[0] = (out[0] + 3 * mm - 3) % mm;
    out[3] = (out[3] + 1) % mm;
    out[4] = (out[4] + 1) % mm;
    out[p] = (out[p] + 1) % mm;
    RootPoint(out)
}

/// Orbit lengths of a bijection of `A_m`: length → number of cycles.
pub type CycleStructure = BTreeMap<usize, usize>;

/// Sweeps `A_m` with a visited bitmap and returns the cycle-length multiset.
/// A revisit of anything but the orbit's start proves the map is not a
/// bijection.
pub fn cycle_structure<F>(m: Modulus, f: F) -> Result<CycleStructure>
where
    F: Fn(&RootPoint) -> RootPoint,
{
    let n = m.root_flat_size();
    let mut visited = bitvec![0; n];
    let mut out = CycleStructure::new();
    for idx in 0..n {
        if visited[idx] {
            continue;
        }
        let start = RootPoint::decode(idx, m);
        visited.set(idx, true);
        let mut len = 1usize;
        let mut cur = f(&start);
        while cur != start {
            let j = cur.encode(m);
            if visited[j] {
                return Err(Error::NotBijective {
                    start,
                    revisit: cur,
                });
            }
            visited.set(j, true);
            len += 1;
            cur = f(&cur);
        }
        *out.entry(len).or_default() += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub cases: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub m: u32,
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
}

impl IdentityReport {
    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    witness: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            witness: None,
        }
    }

    fn expect_eq(&mut self, lhs: RootPoint, rhs: RootPoint, ctx: impl FnOnce() -> String) {
        self.cases += 1;
        if lhs != rhs && self.witness.is_none() {
            self.witness = Some(format!("{}: {lhs} ≠ {rhs}", ctx()));
        }
    }

    fn finish(self) -> IdentityCheck {
        IdentityCheck {
            name: self.name,
            cases: self.cases,
            pass: self.witness.is_none(),
            witness: self.witness,
        }
    }
}

pub type Rotation = dyn Fn(Color, &RootPoint) -> RootPoint + Sync;

/// Verifies the rotation and conjugacy identities over all colors and all
/// of `A_m`, using the standard coordinate rotation.
pub fn check_identities(m: Modulus, sel: &Selector) -> IdentityReport {
    check_identities_with(m, sel, &|c, w| rotate(c, w))
}

/// As [`check_identities`], with the coordinate rotation supplied by the
/// caller.
pub fn check_identities_with(m: Modulus, sel: &Selector, rho: &Rotation) -> IdentityReport {
    let kind = ScheduleKind::for_modulus(m);
    let schedule = kind
        .build(m, Arc::new(sel.clone()))
        .expect("kind chosen from m");
    let points: Vec<RootPoint> = RootPoint::all(m).collect();

    let mut rot = Tally::new("rot");
    for c in Z5::ALL {
        for i in Z5::ALL {
            let lhs = rho(c, &q(i, m));
            let rhs = q(i + c, m).sub(&q(Z5::new(4) + c, m), m);
            rot.expect_eq(lhs, rhs, || format!("c={c} i={i}"));
        }
    }

    let mut pc = Tally::new("p_c");
    let mut cg = Tally::new("cg");
    let mut conj = Tally::new("g_c_conjugate_r_c");
    let mut factor = Tally::new("r_c_factorization");
    let mut g1 = Tally::new("g_closed_form");
    let mut g2 = Tally::new("g_coordinate_deltas");

    for c in Z5::ALL {
        let p_c = AffineMap::SelectorStep(c);
        let p_0 = AffineMap::SelectorStep(Z5::new(0));
        let gc = normalized_gc_map(m, c);
        let g0 = normalized_gc_map(m, Z5::new(0));
        let sym = symbolic_return(kind, m, c);
        let t = conjugator(kind, m, c);
        for w in &points {
            let rw = rho(c, w);
            pc.expect_eq(
                p_c.eval(sel, m, &rw),
                rho(c, &p_0.eval(sel, m, w)).add(&q(Z5::new(4) + c, m), m),
                || format!("c={c} w={w}"),
            );
            cg.expect_eq(gc.eval(sel, m, &rw), rho(c, &g0.eval(sel, m, w)), || {
                format!("c={c} w={w}")
            });
            // G_c = T R_c T^{-1}
            let r = return_r(schedule.as_ref(), c, &w.sub(&t, m));
            conj.expect_eq(gc.eval(sel, m, w), r.add(&t, m), || format!("c={c} w={w}"));
            factor.expect_eq(
                return_r(schedule.as_ref(), c, w),
                sym.eval(sel, m, w),
                || format!("c={c} w={w}"),
            );
        }
    }

    for w in &points {
        let p = sel.p(zero_set(w));
        let g = normalized_g(sel, m, w);
        let mut e_p = [0i64; 5];
        e_p[p.index()] = 1;
        let expected = RootPoint(std::array::from_fn(|j| {
            m.reduce(w.0[j] as i64 + B_VECTOR[j] + e_p[j])
        }));
        g1.expect_eq(g, expected, || format!("w={w}"));
        g1.expect_eq(normalized_gc(sel, m, Z5::new(0), w), g, || {
            format!("G_0 vs G at w={w}")
        });

        let ind = |k: usize| (p.index() == k) as i64;
        let delta = [-3 + ind(0), ind(1), ind(2), 1 + ind(3), 1 + ind(4)];
        let expected = RootPoint(std::array::from_fn(|j| m.reduce(w.0[j] as i64 + delta[j])));
        g2.expect_eq(g, expected, || format!("w={w}"));
    }

    let checks: Vec<IdentityCheck> = [rot, pc, cg, conj, factor, g1, g2]
        .into_iter()
        .map(Tally::finish)
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    IdentityReport {
        m: m.get(),
        checks,
        pass,
    }
}
