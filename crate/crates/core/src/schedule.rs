//! Layer direction schedules and the vertex-level arc coloring.
//!
//! A [`Schedule`] assigns to each layer `t`, root point `w` and color `c` the
//! direction `d_t(w, c)`. Two schedules are built in: `sch3` for `m = 3` and
//! `sch-ge5` for odd `m ≥ 5`. Both are registered by name in
//! [`ScheduleRegistry`]; other implementations (for instance deliberately
//! broken ones used as negative controls) plug in through the same trait.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modring::{
    add_q, iota_unchecked, sigma, zero_set, Color, Direction, Modulus, RootPoint, TorusPoint, Z5,
};
use crate::selector::{Selector, ZeroSet};

pub trait Schedule: Send + Sync {
    fn name(&self) -> &str;

    fn modulus(&self) -> Modulus;

    /// `d_t(w, c)` for `t ∈ 0..m`.
    fn direction(&self, t: u32, w: &RootPoint, c: Color) -> Direction;

    /// Layers whose direction depends on `w`. Every other layer is a
    /// translation.
    fn varying_layers(&self) -> Vec<u32> {
        vec![1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ScheduleKind {
    Sch3,
    SchGe5,
}

impl ScheduleKind {
    pub fn for_modulus(m: Modulus) -> Self {
        if m.get() == 3 {
            ScheduleKind::Sch3
        } else {
            ScheduleKind::SchGe5
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::Sch3 => "sch3",
            ScheduleKind::SchGe5 => "sch-ge5",
        }
    }

    pub fn supports(self, m: Modulus) -> bool {
        match self {
            ScheduleKind::Sch3 => m.get() == 3,
            ScheduleKind::SchGe5 => m.get() >= 5,
        }
    }

    pub fn build(self, m: Modulus, selector: Arc<Selector>) -> Result<Box<dyn Schedule>> {
        if !self.supports(m) {
            return Err(Error::ScheduleMismatch {
                schedule: self.name().into(),
                m: m.get(),
            });
        }
        Ok(Box::new(CyclicSchedule {
            kind: self,
            m,
            selector,
        }))
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The cyclic layer schedules with a single non-constant layer `t = 1`.
struct CyclicSchedule {
    kind: ScheduleKind,
    m: Modulus,
    selector: Arc<Selector>,
}

impl Schedule for CyclicSchedule {
    fn name(&self) -> &str {
        self.kind.name()
    }

    fn modulus(&self) -> Modulus {
        self.m
    }

    #[inline]
    fn direction(&self, t: u32, w: &RootPoint, c: Color) -> Direction {
        match (self.kind, t) {
            (_, 1) => self.selector.layer_direction(zero_set(w), c),
            (_, 2) => c + 3,
            (ScheduleKind::Sch3, 0) => c + 4,
            (ScheduleKind::SchGe5, 3) => c + 4,
            _ => c,
        }
    }
}

/// The standard schedule for `m`: `sch3` when `m = 3`, otherwise `sch-ge5`.
pub fn standard_schedule(m: Modulus) -> Box<dyn Schedule> {
    ScheduleKind::for_modulus(m)
        .build(m, Arc::new(Selector::standard().clone()))
        .expect("kind chosen from m")
}

pub fn schedule_with_selector(m: Modulus, selector: Selector) -> Box<dyn Schedule> {
    ScheduleKind::for_modulus(m)
        .build(m, Arc::new(selector))
        .expect("kind chosen from m")
}

type Factory = Box<dyn Fn(Modulus, Arc<Selector>) -> Result<Box<dyn Schedule>> + Send + Sync>;

/// Schedules registered by name. `auto` picks the schedule fixed for `m`.
pub struct ScheduleRegistry {
    factories: BTreeMap<String, Factory>,
}

impl Default for ScheduleRegistry {
    fn default() -> Self {
        let mut reg = ScheduleRegistry {
            factories: BTreeMap::new(),
        };
        for kind in [ScheduleKind::Sch3, ScheduleKind::SchGe5] {
            reg.register(kind.name(), move |m, sel| kind.build(m, sel));
        }
        reg.register("auto", |m, sel| ScheduleKind::for_modulus(m).build(m, sel));
        reg
    }
}

impl ScheduleRegistry {
    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(Modulus, Arc<Selector>) -> Result<Box<dyn Schedule>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn build(
        &self,
        name: &str,
        m: Modulus,
        selector: Arc<Selector>,
    ) -> Result<Box<dyn Schedule>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "schedule",
                name: name.to_string(),
                known: self.names().join(", "),
            })?;
        factory(m, selector)
    }
}

fn check_layer(schedule: &dyn Schedule, t: u32) -> Result<()> {
    let m = schedule.modulus().get();
    if t >= m {
        return Err(Error::LayerOutOfRange { t, m });
    }
    Ok(())
}

pub fn direction(schedule: &dyn Schedule, t: u32, w: &RootPoint, c: Color) -> Result<Direction> {
    check_layer(schedule, t)?;
    Ok(schedule.direction(t, w, c))
}

/// `P_{t,c}(w) = w + q_{d_t(w,c)}`.
pub fn layer_map(schedule: &dyn Schedule, t: u32, c: Color, w: &RootPoint) -> Result<RootPoint> {
    check_layer(schedule, t)?;
    Ok(add_q(w, schedule.direction(t, w, c), schedule.modulus()))
}

/// Direction of the color-`c` arc leaving `x`.
#[inline]
pub fn arc_direction(schedule: &dyn Schedule, x: &TorusPoint, c: Color) -> Direction {
    let m = schedule.modulus();
    let t = sigma(x, m);
    let w = iota_unchecked(t, x, m);
    schedule.direction(t, &w, c)
}

/// The color-`c` out-neighbor of `x` under a given schedule.
#[inline]
pub fn successor(schedule: &dyn Schedule, x: &TorusPoint, c: Color) -> TorusPoint {
    x.step(arc_direction(schedule, x, c), schedule.modulus())
}

/// The color-`c` out-neighbor of `x` under the standard schedule for `m`.
pub fn arc_successor(m: Modulus, x: &TorusPoint, c: Color) -> TorusPoint {
    let schedule = standard_schedule(m);
    successor(schedule.as_ref(), x, c)
}

/// A root point realizing the zero-set `z`, or `None` if `z` is infeasible.
pub fn zero_set_representative(z: ZeroSet, m: Modulus) -> Option<RootPoint> {
    let free: Vec<usize> = (0..5).filter(|&j| !z.contains(Z5::new(j as i64))).collect();
    let mut coords = [0i64; 5];
    match free.len() {
        0 => {}
        1 => return None,
        k => {
            for &j in &free[..k - 1] {
                coords[j] = 1;
            }
            let last = free[k - 1];
            coords[last] = -(k as i64 - 1);
            if m.reduce(coords[last]) == 0 {
                coords[free[0]] = 2;
                coords[last] = -(k as i64);
            }
        }
    }
    let w = RootPoint::from_signed(coords, m).ok()?;
    (zero_set(&w) == z).then_some(w)
}

#[derive(Clone, Debug, Serialize)]
pub struct RowWitness {
    pub layer: u32,
    pub zero_set: ZeroSet,
    pub point: RootPoint,
    pub row: [u8; 5],
}

#[derive(Clone, Debug, Serialize)]
pub struct LatinRowVerdict {
    pub schedule: String,
    pub m: u32,
    pub rows_checked: usize,
    pub pass: bool,
    pub witness: Option<RowWitness>,
}

/// Checks that `c ↦ d_t(w, c)` is a permutation for every layer and every
/// feasible zero-set class.
pub fn latin_row_check(schedule: &dyn Schedule) -> LatinRowVerdict {
    let m = schedule.modulus();
    let reps: Vec<(ZeroSet, RootPoint)> = ZeroSet::feasible()
        .into_iter()
        .filter_map(|z| zero_set_representative(z, m).map(|w| (z, w)))
        .collect();
    let mut rows_checked = 0;
    let mut witness = None;
    'outer: for t in 0..m.get() {
        for &(z, w) in &reps {
            rows_checked += 1;
            let row = Z5::ALL.map(|c| schedule.direction(t, &w, c).value());
            let seen = row.iter().fold(0u8, |acc, &d| acc | (1 << d));
            if seen != 0b11111 {
                witness = Some(RowWitness {
                    layer: t,
                    zero_set: z,
                    point: w,
                    row,
                });
                break 'outer;
            }
        }
    }
    LatinRowVerdict {
        schedule: schedule.name().to_string(),
        m: m.get(),
        rows_checked,
        pass: witness.is_none(),
        witness,
    }
}
