//! The five color classes as arc sets of `D_5(m)`: Hamiltonicity walks,
//! the arc-partition check, the return-criterion lift, and export/import.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use bitvec::prelude::*;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modring::{sigma, Color, Direction, Modulus, TorusPoint, Z5};
use crate::returnmap::{cycle_structure, return_r, CycleStructure};
use crate::schedule::{arc_direction, successor, Schedule};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EarlyRevisit {
    pub step: u64,
    pub vertex: TorusPoint,
}

/// Outcome of walking one color class from the origin.
#[derive(Clone, Debug, Serialize)]
pub struct ColorClassWalk {
    pub color: Color,
    pub m: u32,
    pub start: TorusPoint,
    /// Steps taken before the walk closed up or failed.
    pub verified_length: u64,
    pub pass: bool,
    pub early_revisit: Option<EarlyRevisit>,
}

/// Walks the color-`c` arcs from the origin for `m^5` steps. Passes iff no
/// vertex repeats before step `m^5` and step `m^5` lands on the origin.
pub fn verify_color_hamiltonian(schedule: &dyn Schedule, c: Color) -> ColorClassWalk {
    let m = schedule.modulus();
    let n = m.torus_size();
    let start = TorusPoint::ORIGIN;
    let mut visited = bitvec![0; n];
    visited.set(start.encode(m), true);
    let mut x = start;
    let mut early_revisit = None;
    let mut steps = 0u64;
    for step in 1..=n as u64 {
        x = successor(schedule, &x, c);
        steps = step;
        let idx = x.encode(m);
        if visited[idx] {
            if step != n as u64 || x != start {
                early_revisit = Some(EarlyRevisit { step, vertex: x });
            }
            break;
        }
        visited.set(idx, true);
    }
    let pass = early_revisit.is_none() && steps == n as u64 && x == start;
    ColorClassWalk {
        color: c,
        m: m.get(),
        start,
        verified_length: steps,
        pass,
        early_revisit,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionVerdict {
    pub m: u32,
    pub arcs: usize,
    /// Every vertex sends its five colors along five distinct directions.
    pub out_rows: bool,
    /// Every vertex receives its five in-arcs in five distinct colors.
    pub in_colors: bool,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Checks that the color classes partition the `5 m^5` Cayley arcs.
pub fn verify_partition(schedule: &dyn Schedule) -> PartitionVerdict {
    let m = schedule.modulus();
    let n = m.torus_size();
    let mut in_counts = vec![0u8; n * 5];
    let mut witness = None;
    let mut out_rows = true;
    for x in TorusPoint::all(m) {
        let mut used = 0u8;
        for c in Z5::ALL {
            let d = arc_direction(schedule, &x, c);
            used |= 1 << d.index();
            in_counts[x.step(d, m).encode(m) * 5 + c.index()] += 1;
        }
        if used != 0b11111 && out_rows {
            out_rows = false;
            let row: Vec<u8> = Z5::ALL
                .iter()
                .map(|&c| arc_direction(schedule, &x, c).value())
                .collect();
            witness = Some(format!("out-directions at {x} are {row:?}"));
        }
    }
    let bad_in = in_counts.iter().position(|&k| k != 1);
    if let Some(pos) = bad_in {
        if witness.is_none() {
            witness = Some(format!(
                "vertex {} receives {} arcs of color {}",
                TorusPoint::decode(pos / 5, m),
                in_counts[pos],
                pos % 5
            ));
        }
    }
    let in_colors = bad_in.is_none();
    PartitionVerdict {
        m: m.get(),
        arcs: n * 5,
        out_rows,
        in_colors,
        pass: out_rows && in_colors,
        witness,
    }
}

/// Cycle lengths of the color-`c` successor map on the whole torus.
pub fn torus_cycle_structure(schedule: &dyn Schedule, c: Color) -> Result<CycleStructure> {
    let m = schedule.modulus();
    let n = m.torus_size();
    let mut visited = bitvec![0; n];
    let mut out = CycleStructure::new();
    for idx in 0..n {
        if visited[idx] {
            continue;
        }
        let start = TorusPoint::decode(idx, m);
        let mut x = start;
        let mut len = 0usize;
        loop {
            visited.set(x.encode(m), true);
            x = successor(schedule, &x, c);
            len += 1;
            if x == start {
                break;
            }
            if visited[x.encode(m)] {
                return Err(Error::Structural(format!(
                    "color {c} successor is not a bijection: orbit of {start} merges at {x}"
                )));
            }
        }
        *out.entry(len).or_default() += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckVerdict {
    pub m: u32,
    pub color: Color,
    pub return_cycles: CycleStructure,
    pub torus_cycles: CycleStructure,
    pub pass: bool,
}

/// Compares the cycle type of `R_c` on `A_m` with the color-`c` cycle type on
/// the torus: each return cycle of length `ℓ` must lift to one of length `mℓ`.
pub fn return_criterion_crosscheck(schedule: &dyn Schedule, c: Color) -> Result<CrosscheckVerdict> {
    let m = schedule.modulus();
    let return_cycles = cycle_structure(m, |w| return_r(schedule, c, w))?;
    let torus_cycles = torus_cycle_structure(schedule, c)?;
    let lifted: CycleStructure = return_cycles
        .iter()
        .map(|(&len, &k)| (len * m.get() as usize, k))
        .collect();
    Ok(CrosscheckVerdict {
        m: m.get(),
        color: c,
        pass: lifted == torus_cycles,
        return_cycles,
        torus_cycles,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub m: u32,
    pub schedule: String,
    pub colors: Vec<ColorClassWalk>,
    pub partition: PartitionVerdict,
    pub pass: bool,
    pub elapsed_ms: u128,
}

/// Walks the requested colors (all five by default) in parallel and checks
/// the arc partition.
pub fn verify_decomposition(
    schedule: &dyn Schedule,
    colors: Option<&[Color]>,
) -> DecompositionReport {
    let started = Instant::now();
    let colors = colors.unwrap_or(&Z5::ALL);
    let (walks, partition) = rayon::join(
        || {
            colors
                .par_iter()
                .map(|&c| verify_color_hamiltonian(schedule, c))
                .collect::<Vec<_>>()
        },
        || verify_partition(schedule),
    );
    let pass = walks.iter().all(|w| w.pass) && partition.pass;
    DecompositionReport {
        m: schedule.modulus().get(),
        schedule: schedule.name().to_string(),
        colors: walks,
        partition,
        pass,
        elapsed_ms: started.elapsed().as_millis(),
    }
}

/// Replaces one layer of an underlying schedule with a fixed direction for
/// every color. The result is never Latin; useful as a negative control.
pub struct ConstantLayerSchedule {
    pub inner: Box<dyn Schedule>,
    pub layer: u32,
    pub direction: Direction,
}

impl Schedule for ConstantLayerSchedule {
    fn name(&self) -> &str {
        "constant-layer"
    }

    fn modulus(&self) -> Modulus {
        self.inner.modulus()
    }

    fn direction(&self, t: u32, w: &crate::modring::RootPoint, c: Color) -> Direction {
        if t == self.layer {
            self.direction
        } else {
            self.inner.direction(t, w, c)
        }
    }
}

/// The five color cycles as vertex lists starting at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub m: u32,
    pub colors: Vec<Vec<[u32; 5]>>,
}

impl Decomposition {
    pub fn from_schedule(schedule: &dyn Schedule) -> Self {
        let m = schedule.modulus();
        let n = m.torus_size();
        let colors = Z5::ALL
            .par_iter()
            .map(|&c| {
                let mut x = TorusPoint::ORIGIN;
                let mut cycle = Vec::with_capacity(n);
                for _ in 0..n {
                    cycle.push(x.coords());
                    x = successor(schedule, &x, c);
                }
                cycle
            })
            .collect();
        Decomposition { m: m.get(), colors }
    }

    /// Checks the data alone: five closed walks of `m^5` distinct vertices,
    /// each step a Cayley arc `x → x + e_i` raising the grading by one, and
    /// no arc used twice.
    pub fn verify(&self) -> ImportVerdict {
        let fail = |msg: String| ImportVerdict {
            m: self.m,
            pass: false,
            witness: Some(msg),
        };
        let m = match Modulus::new(self.m) {
            Ok(m) => m,
            Err(e) => return fail(e.to_string()),
        };
        let n = m.torus_size();
        if self.colors.len() != 5 {
            return fail(format!("{} color classes, expected 5", self.colors.len()));
        }
        let mut arc_used = bitvec![0; n * 5];
        for (c, cycle) in self.colors.iter().enumerate() {
            if cycle.len() != n {
                return fail(format!(
                    "color {c} has {} vertices, expected {n}",
                    cycle.len()
                ));
            }
            let mut seen = bitvec![0; n];
            let mut points = Vec::with_capacity(n);
            for v in cycle {
                match TorusPoint::new(*v, m) {
                    Ok(x) => points.push(x),
                    Err(e) => return fail(format!("color {c}: {e}")),
                }
            }
            for (k, x) in points.iter().enumerate() {
                let idx = x.encode(m);
                if seen[idx] {
                    return fail(format!("color {c} repeats {x} at position {k}"));
                }
                seen.set(idx, true);
                let y = points[(k + 1) % n];
                let Some(d) = Z5::ALL.into_iter().find(|&d| x.step(d, m) == y) else {
                    return fail(format!("color {c}: {x} → {y} is not a Cayley arc"));
                };
                if sigma(&y, m) != (sigma(x, m) + 1) % m.get() {
                    return fail(format!("color {c}: {x} → {y} breaks the grading"));
                }
                let arc = idx * 5 + d.index();
                if arc_used[arc] {
                    return fail(format!("arc {x} → {y} appears in two colors"));
                }
                arc_used.set(arc, true);
            }
        }
        ImportVerdict {
            m: self.m,
            pass: true,
            witness: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ImportVerdict {
    pub m: u32,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Text,
    Arcs,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "text" => Ok(ExportFormat::Text),
            "arcs" => Ok(ExportFormat::Arcs),
            other => Err(Error::UnknownStrategy {
                kind: "export format",
                name: other.to_string(),
                known: "arcs, json, text".into(),
            }),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Json => "json",
            ExportFormat::Text => "text",
            ExportFormat::Arcs => "arcs",
        })
    }
}

fn join(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

/// Serializes the decomposition. Refuses unless it verifies, or `force`.
pub fn export_decomposition(
    schedule: &dyn Schedule,
    format: ExportFormat,
    force: bool,
) -> Result<String> {
    let m = schedule.modulus();
    if !force && !verify_decomposition(schedule, None).pass {
        return Err(Error::Unverified(m.get()));
    }
    Ok(match format {
        ExportFormat::Json => {
            let d = Decomposition::from_schedule(schedule);
            serde_json::to_string(&d).expect("decomposition serializes")
        }
        ExportFormat::Text => {
            let d = Decomposition::from_schedule(schedule);
            let blocks: Vec<String> = d
                .colors
                .iter()
                .map(|cycle| cycle.iter().map(|v| join(v)).collect::<Vec<_>>().join("\n"))
                .collect();
            blocks.join("\n\n") + "\n"
        }
        ExportFormat::Arcs => {
            let mut out = String::with_capacity(m.torus_size() * 24);
            for x in TorusPoint::all(m) {
                let dirs: Vec<u32> = Z5::ALL
                    .iter()
                    .map(|&c| arc_direction(schedule, &x, c).value() as u32)
                    .collect();
                out.push_str(&format!("{} : {}\n", join(&x.coords()), join(&dirs)));
            }
            out
        }
    })
}

pub fn import_json(text: &str) -> Result<Decomposition> {
    serde_json::from_str(text)
        .map_err(|e| Error::Import(format!("invalid decomposition JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{schedule_with_selector, standard_schedule};
    use crate::selector::{LatinTable, Selector, ZeroSet};
    use std::collections::BTreeMap;

    fn m(v: u32) -> Modulus {
        Modulus::new(v).unwrap()
    }

    #[test]
    fn walk_examples() {
        let s3 = standard_schedule(m(3));
        let w = verify_color_hamiltonian(s3.as_ref(), Z5::new(0));
        assert!(w.pass);
        assert_eq!(w.verified_length, 243);
        let s5 = standard_schedule(m(5));
        let w = verify_color_hamiltonian(s5.as_ref(), Z5::new(3));
        assert!(w.pass);
        assert_eq!(w.verified_length, 3125);
    }

    #[test]
    fn partition_examples() {
        for modulus in [3, 5] {
            let v = verify_partition(standard_schedule(m(modulus)).as_ref());
            assert!(v.pass, "{v:?}");
        }
        assert_eq!(
            verify_partition(standard_schedule(m(3)).as_ref()).arcs,
            1215
        );
    }

    #[test]
    fn constant_layer_fails() {
        let broken = ConstantLayerSchedule {
            inner: standard_schedule(m(5)),
            layer: 2,
            direction: Z5::new(1),
        };
        let v = verify_partition(&broken);
        assert!(!v.pass);
        assert!(!v.out_rows);
        assert!(v.witness.unwrap().contains("out-directions"));
        let r = verify_decomposition(&broken, None);
        assert!(!r.pass);
    }

    #[test]
    fn crosscheck_examples() {
        let v = return_criterion_crosscheck(standard_schedule(m(3)).as_ref(), Z5::new(0)).unwrap();
        assert!(v.pass);
        assert_eq!(v.return_cycles, BTreeMap::from([(81, 1)]));
        assert_eq!(v.torus_cycles, BTreeMap::from([(243, 1)]));
        let v = return_criterion_crosscheck(standard_schedule(m(5)).as_ref(), Z5::new(2)).unwrap();
        assert_eq!(v.return_cycles, BTreeMap::from([(625, 1)]));
        assert_eq!(v.torus_cycles, BTreeMap::from([(3125, 1)]));
    }

    #[test]
    fn lift_holds_for_translation_layers() {
        let keys: Vec<ZeroSet> = LatinTable::standard()
            .rows()
            .iter()
            .map(|(z, _)| *z)
            .collect();
        let table = keys.into_iter().fold(LatinTable::standard(), |t, z| {
            t.with_row(z, [0, 1, 2, 3, 4])
        });
        let sel = Selector::compile(&table).unwrap();
        let s = schedule_with_selector(m(5), sel);
        let v = return_criterion_crosscheck(s.as_ref(), Z5::new(0)).unwrap();
        assert!(v.pass);
        assert!(v.return_cycles.len() == 1 && !v.return_cycles.contains_key(&625));
    }

    #[test]
    fn export_formats() {
        let s = standard_schedule(m(3));
        let json = export_decomposition(s.as_ref(), ExportFormat::Json, false).unwrap();
        let d = import_json(&json).unwrap();
        assert_eq!(d.colors.len(), 5);
        assert!(d.colors.iter().all(|c| c.len() == 243 && c[0] == [0; 5]));
        assert!(d.verify().pass);

        let arcs = export_decomposition(s.as_ref(), ExportFormat::Arcs, false).unwrap();
        let rows: Vec<&str> = arcs.lines().collect();
        assert_eq!(rows.len(), 243);
        for row in rows {
            let (_, dirs) = row.split_once(" : ").unwrap();
            let mut d: Vec<u32> = dirs.split(' ').map(|t| t.parse().unwrap()).collect();
            d.sort();
            assert_eq!(d, vec![0, 1, 2, 3, 4]);
        }

        let text = export_decomposition(s.as_ref(), ExportFormat::Text, false).unwrap();
        assert_eq!(text.lines().filter(|l| !l.is_empty()).count(), 5 * 243);
        assert_eq!(text.lines().filter(|l| l.is_empty()).count(), 4);
    }

    #[test]
    fn export_refuses_unverified() {
        let broken = ConstantLayerSchedule {
            inner: standard_schedule(m(3)),
            layer: 0,
            direction: Z5::new(0),
        };
        assert_eq!(
            export_decomposition(&broken, ExportFormat::Json, false),
            Err(Error::Unverified(3))
        );
        assert!(export_decomposition(&broken, ExportFormat::Arcs, true).is_ok());
    }

    #[test]
    fn tampered_import_fails() {
        let s = standard_schedule(m(3));
        let mut d = Decomposition::from_schedule(s.as_ref());
        d.colors[2].swap(10, 11);
        let v = d.verify();
        assert!(!v.pass);
        assert!(v.witness.is_some());
        assert!(import_json("{\"m\": 3}").is_err());
    }

    #[test]
    fn swapped_selector_breaks_hamiltonicity() {
        let sel = Selector::standard()
            .clone()
            .with_swapped_rows(ZeroSet::from_indices(&[0, 3]), ZeroSet::from_indices(&[3]));
        let s = schedule_with_selector(m(5), sel);
        let r = verify_decomposition(s.as_ref(), None);
        assert!(!r.pass);
        assert!(r.colors.iter().any(|w| w.early_revisit.is_some()));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn arcs_are_graded_unit_steps(
                modulus in prop::sample::select(vec![3u32, 5, 7, 9, 11]),
                raw in prop::array::uniform5(0u32..1000),
                c in 0u8..5,
            ) {
                let mm = m(modulus);
                let x = TorusPoint::new(raw.map(|v| v % modulus), mm).unwrap();
                let s = standard_schedule(mm);
                let c = Z5::new(c as i64);
                let y = successor(s.as_ref(), &x, c);
                prop_assert_eq!(sigma(&y, mm), (sigma(&x, mm) + 1) % modulus);
                prop_assert_eq!(x.step(arc_direction(s.as_ref(), &x, c), mm), y);
            }

            #[test]
            fn out_directions_form_a_permutation(
                modulus in prop::sample::select(vec![3u32, 5, 7, 9, 11, 13, 15]),
                raw in prop::array::uniform5(0u32..1000),
            ) {
                let mm = m(modulus);
                let x = TorusPoint::new(raw.map(|v| v % modulus), mm).unwrap();
                let s = standard_schedule(mm);
                let mut dirs: Vec<u8> = Z5::ALL.iter().map(|&c| arc_direction(s.as_ref(), &x, c).value()).collect();
                dirs.sort();
                prop_assert_eq!(dirs, vec![0, 1, 2, 3, 4]);
            }
        }
    }
}
