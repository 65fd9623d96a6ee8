//! Arithmetic on `(Z_m)^5` and on the zero-sum hyperplane (the root flat).
//!
//! Residues are stored canonically in `0..m`, so `-1` is always `m - 1`.
//! Direction and color indices live in [`Z5`] and are never mixed with
//! residues mod `m`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selector::ZeroSet;

/// An element of `Z_5`: a direction or color index.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(into = "u8", try_from = "u8")]
pub struct Z5(u8);

pub type Color = Z5;
pub type Direction = Z5;

impl Z5 {
    pub const ALL: [Z5; 5] = [Z5(0), Z5(1), Z5(2), Z5(3), Z5(4)];

    /// Reduces any integer into `Z_5`.
    pub const fn new(v: i64) -> Self {
        Z5(v.rem_euclid(5) as u8)
    }

    pub const fn value(self) -> u8 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<Z5> for u8 {
    fn from(z: Z5) -> u8 {
        z.0
    }
}

impl TryFrom<u8> for Z5 {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, Self::Error> {
        if v < 5 {
            Ok(Z5(v))
        } else {
            Err(format!("{v} is not an index in Z5"))
        }
    }
}

impl Add for Z5 {
    type Output = Z5;
    fn add(self, rhs: Z5) -> Z5 {
        Z5((self.0 + rhs.0) % 5)
    }
}

impl Add<u8> for Z5 {
    type Output = Z5;
    fn add(self, rhs: u8) -> Z5 {
        Z5(((self.0 as u16 + rhs as u16) % 5) as u8)
    }
}

impl Sub for Z5 {
    type Output = Z5;
    fn sub(self, rhs: Z5) -> Z5 {
        Z5((self.0 + 5 - rhs.0) % 5)
    }
}

impl Neg for Z5 {
    type Output = Z5;
    fn neg(self) -> Z5 {
        Z5((5 - self.0) % 5)
    }
}

impl fmt::Display for Z5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An odd modulus `m = 2h + 1 ≥ 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Modulus(u32);

impl Modulus {
    pub fn new(m: u32) -> Result<Self> {
        if m >= 3 && m % 2 == 1 {
            Ok(Modulus(m))
        } else {
            Err(Error::InvalidModulus(m))
        }
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    /// The half-turn parameter `h = (m - 1) / 2`.
    pub const fn h(self) -> u32 {
        (self.0 - 1) / 2
    }

    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    /// `m^4 = |A_m|`.
    pub fn root_flat_size(self) -> usize {
        (self.0 as usize).pow(4)
    }

    /// `m^5`, the number of torus vertices.
    pub fn torus_size(self) -> usize {
        (self.0 as usize).pow(5)
    }

    fn check(self, v: u32) -> Result<u32> {
        if v < self.0 {
            Ok(v)
        } else {
            Err(Error::ResidueOutOfRange {
                value: v,
                m: self.0,
            })
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A vertex of `D5(m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TorusPoint(pub(crate) [u32; 5]);

impl TorusPoint {
    pub const ORIGIN: TorusPoint = TorusPoint([0; 5]);

    pub fn new(coords: [u32; 5], m: Modulus) -> Result<Self> {
        for &v in &coords {
            m.check(v)?;
        }
        Ok(TorusPoint(coords))
    }

    pub fn from_signed(coords: [i64; 5], m: Modulus) -> Self {
        TorusPoint(coords.map(|v| m.reduce(v)))
    }

    pub fn coords(&self) -> [u32; 5] {
        self.0
    }

    /// `x + e_i`.
    pub fn step(&self, i: Direction, m: Modulus) -> TorusPoint {
        let mut out = self.0;
        let j = i.index();
        out[j] = if out[j] + 1 == m.get() { 0 } else { out[j] + 1 };
        TorusPoint(out)
    }

    /// Mixed-radix index `Σ x_j m^j`.
    pub fn encode(&self, m: Modulus) -> usize {
        let m = m.get() as usize;
        self.0.iter().rev().fold(0, |acc, &v| acc * m + v as usize)
    }

    pub fn decode(mut idx: usize, m: Modulus) -> TorusPoint {
        let mm = m.get() as usize;
        let mut out = [0u32; 5];
        for slot in &mut out {
            *slot = (idx % mm) as u32;
            idx /= mm;
        }
        TorusPoint(out)
    }

    /// All `m^5` vertices in mixed-radix order.
    pub fn all(m: Modulus) -> impl Iterator<Item = TorusPoint> {
        (0..m.torus_size()).map(move |i| TorusPoint::decode(i, m))
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e] = self.0;
        write!(f, "({a},{b},{c},{d},{e})")
    }
}

/// A point of the root flat `A_m = {w : Σ w_i ≡ 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RootPoint(pub(crate) [u32; 5]);

/// Translation vectors are elements of `A_m` as well.
pub type Displacement = RootPoint;

impl RootPoint {
    pub const ZERO: RootPoint = RootPoint([0; 5]);

    pub fn new(coords: [u32; 5], m: Modulus) -> Result<Self> {
        for &v in &coords {
            m.check(v)?;
        }
        let sum = coords.iter().map(|&v| v as u64).sum::<u64>() % m.get() as u64;
        if sum != 0 {
            return Err(Error::NotOnRootFlat {
                coords,
                sum: sum as u32,
                m: m.get(),
            });
        }
        Ok(RootPoint(coords))
    }

    /// Reduces signed coordinates mod `m`; still rejects a non-zero sum.
    pub fn from_signed(coords: [i64; 5], m: Modulus) -> Result<Self> {
        Self::new(coords.map(|v| m.reduce(v)), m)
    }

    /// Builds the point from its first four coordinates; `w_4` is recovered
    /// from the root-flat relation.
    pub fn from_head(head: [u32; 4], m: Modulus) -> Result<Self> {
        for &v in &head {
            m.check(v)?;
        }
        let s: i64 = head.iter().map(|&v| v as i64).sum();
        Ok(RootPoint([
            head[0],
            head[1],
            head[2],
            head[3],
            m.reduce(-s),
        ]))
    }

    pub fn coords(&self) -> [u32; 5] {
        self.0
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    pub fn add(&self, v: &RootPoint, m: Modulus) -> RootPoint {
        let mm = m.get();
        RootPoint(std::array::from_fn(|j| {
            let s = self.0[j] + v.0[j];
            if s >= mm {
                s - mm
            } else {
                s
            }
        }))
    }

    pub fn sub(&self, v: &RootPoint, m: Modulus) -> RootPoint {
        self.add(&v.neg(m), m)
    }

    pub fn neg(&self, m: Modulus) -> RootPoint {
        let mm = m.get();
        RootPoint(self.0.map(|x| if x == 0 { 0 } else { mm - x }))
    }

    pub fn scale(&self, k: i64, m: Modulus) -> RootPoint {
        RootPoint(self.0.map(|x| m.reduce(x as i64 * k)))
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 5]
    }

    /// Mixed-radix index of `(w_0, w_1, w_2, w_3)`; `w_4` is implied.
    pub fn encode(&self, m: Modulus) -> usize {
        let m = m.get() as usize;
        self.0[..4]
            .iter()
            .rev()
            .fold(0, |acc, &v| acc * m + v as usize)
    }

    pub fn decode(mut idx: usize, m: Modulus) -> RootPoint {
        let mm = m.get() as usize;
        let mut head = [0u32; 4];
        for slot in &mut head {
            *slot = (idx % mm) as u32;
            idx /= mm;
        }
        let s: usize = head.iter().map(|&v| v as usize).sum();
        let w4 = ((mm - s % mm) % mm) as u32;
        RootPoint([head[0], head[1], head[2], head[3], w4])
    }

    /// All `m^4` root points in mixed-radix order.
    pub fn all(m: Modulus) -> impl Iterator<Item = RootPoint> {
        (0..m.root_flat_size()).map(move |i| RootPoint::decode(i, m))
    }
}

impl fmt::Display for RootPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e] = self.0;
        write!(f, "({a},{b},{c},{d},{e})")
    }
}

/// The grading `σ(x) = Σ x_i mod m`.
pub fn sigma(x: &TorusPoint, m: Modulus) -> u32 {
    (x.0.iter().map(|&v| v as u64).sum::<u64>() % m.get() as u64) as u32
}

/// Identifies the layer `X_t` with the root flat: `x ↦ x - t e_4`.
pub fn iota(t: u32, x: &TorusPoint, m: Modulus) -> Result<RootPoint> {
    let actual = sigma(x, m);
    if actual != t % m.get() {
        return Err(Error::GradingMismatch {
            point: *x,
            expected: t,
            actual,
        });
    }
    Ok(iota_unchecked(t, x, m))
}

pub(crate) fn iota_unchecked(t: u32, x: &TorusPoint, m: Modulus) -> RootPoint {
    let mut w = x.0;
    w[4] = m.reduce(w[4] as i64 - t as i64);
    RootPoint(w)
}

/// Inverse of [`iota`]: `w ↦ w + t e_4`.
pub fn iota_inv(t: u32, w: &RootPoint, m: Modulus) -> TorusPoint {
    let mut x = w.0;
    x[4] = m.reduce(x[4] as i64 + t as i64);
    TorusPoint(x)
}

/// `q_i = e_i - e_4` for `i < 4`, and `q_4 = 0`.
pub fn q(i: Direction, m: Modulus) -> Displacement {
    let mut v = [0u32; 5];
    if i.index() < 4 {
        v[i.index()] = 1;
        v[4] = m.get() - 1;
    }
    RootPoint(v)
}

/// Adds `q_i` in place of a full vector addition.
pub(crate) fn add_q(w: &RootPoint, i: Direction, m: Modulus) -> RootPoint {
    let j = i.index();
    if j == 4 {
        return *w;
    }
    let mm = m.get();
    let mut out = w.0;
    out[j] = if out[j] + 1 == mm { 0 } else { out[j] + 1 };
    out[4] = if out[4] == 0 { mm - 1 } else { out[4] - 1 };
    RootPoint(out)
}

/// Coordinate rotation `(ρ_c w)_j = w_{j-c}`.
pub fn rotate(c: Color, w: &RootPoint) -> RootPoint {
    RootPoint(std::array::from_fn(|j| {
        w.0[(Z5::new(j as i64) - c).index()]
    }))
}

/// The set of vanishing coordinates.
pub fn zero_set(w: &RootPoint) -> ZeroSet {
    let mut bits = 0u8;
    for (j, &v) in w.0.iter().enumerate() {
        if v == 0 {
            bits |= 1 << j;
        }
    }
    ZeroSet::from_bits(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(v: u32) -> Modulus {
        Modulus::new(v).unwrap()
    }

    fn tp(c: [u32; 5]) -> TorusPoint {
        TorusPoint(c)
    }

    fn rp(c: [u32; 5], modulus: u32) -> RootPoint {
        RootPoint::new(c, m(modulus)).unwrap()
    }

    #[test]
    fn modulus_guard() {
        assert!(Modulus::new(4).is_err());
        assert!(Modulus::new(1).is_err());
        assert_eq!(m(9).h(), 4);
        for v in (3..40).step_by(2) {
            assert_eq!(2 * m(v).h() + 1, v);
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&tp([0; 5]), m(3)), 0);
        assert_eq!(sigma(&tp([1; 5]), m(5)), 0);
        assert_eq!(sigma(&tp([1, 2, 0, 0, 0]), m(3)), 0);
    }

    #[test]
    fn iota_examples() {
        assert_eq!(iota(0, &tp([0; 5]), m(3)).unwrap(), rp([0; 5], 3));
        assert_eq!(
            iota(1, &tp([1, 0, 0, 0, 0]), m(5)).unwrap(),
            rp([1, 0, 0, 0, 4], 5)
        );
        assert_eq!(
            iota(2, &tp([1, 1, 0, 0, 0]), m(3)).unwrap(),
            rp([1, 1, 0, 0, 1], 3)
        );
        assert!(matches!(
            iota(1, &tp([0; 5]), m(3)),
            Err(Error::GradingMismatch { .. })
        ));
    }

    #[test]
    fn iota_inv_examples() {
        assert_eq!(iota_inv(0, &rp([0; 5], 3), m(3)), tp([0; 5]));
        assert_eq!(
            iota_inv(1, &rp([1, 0, 0, 0, 4], 5), m(5)),
            tp([1, 0, 0, 0, 0])
        );
        assert_eq!(
            iota_inv(2, &rp([1, 1, 0, 0, 1], 3), m(3)),
            tp([1, 1, 0, 0, 0])
        );
    }

    #[test]
    fn q_examples() {
        assert!(q(Z5::new(4), m(7)).is_zero());
        assert_eq!(q(Z5::new(0), m(5)).coords(), [1, 0, 0, 0, 4]);
        assert_eq!(q(Z5::new(2), m(3)).coords(), [0, 0, 1, 0, 2]);
        for modulus in [3, 5, 7] {
            for i in Z5::ALL {
                let w = RootPoint::from_head([1, 2, 0, 1], m(modulus)).unwrap();
                assert_eq!(
                    add_q(&w, i, m(modulus)),
                    w.add(&q(i, m(modulus)), m(modulus))
                );
            }
        }
    }

    #[test]
    fn rotate_examples() {
        let w = rp([1, 0, 0, 0, 4], 5);
        assert_eq!(rotate(Z5::new(0), &w), w);
        assert_eq!(rotate(Z5::new(1), &w).coords(), [4, 1, 0, 0, 0]);
        let m5 = m(5);
        let rhs = q(Z5::new(1), m5).sub(&q(Z5::new(0), m5), m5);
        assert_eq!(rotate(Z5::new(1), &q(Z5::new(0), m5)), rhs);
    }

    #[test]
    fn zero_set_examples() {
        assert_eq!(zero_set(&RootPoint::ZERO), ZeroSet::FULL);
        assert_eq!(
            zero_set(&rp([0, 1, 0, 0, 4], 5)),
            ZeroSet::from_indices(&[0, 2, 3])
        );
        assert_eq!(
            zero_set(&rp([0, 1, 1, 0, 3], 5)),
            ZeroSet::from_indices(&[0, 3])
        );
        assert!(RootPoint::new([0, 1, 0, 0, 3], m(5)).is_err());
    }

    #[test]
    fn rot_identity_exhaustive() {
        for modulus in [3, 5, 7, 9] {
            let mm = m(modulus);
            for c in Z5::ALL {
                for i in Z5::ALL {
                    let lhs = rotate(c, &q(i, mm));
                    let rhs = q(i + c, mm).sub(&q(Z5::new(4) + c, mm), mm);
                    assert_eq!(lhs, rhs, "m={modulus} c={c} i={i}");
                }
            }
        }
    }

    #[test]
    fn encode_roundtrip_root_flat() {
        let mm = m(5);
        for (i, w) in RootPoint::all(mm).enumerate() {
            assert_eq!(w.encode(mm), i);
            assert!(RootPoint::new(w.coords(), mm).is_ok());
        }
    }

    fn root_point(modulus: u32) -> impl Strategy<Value = RootPoint> {
        prop::array::uniform4(0..modulus)
            .prop_map(move |h| RootPoint::from_head(h, m(modulus)).unwrap())
    }

    proptest! {
        #[test]
        fn iota_roundtrip(coords in prop::array::uniform5(0u32..11)) {
            let mm = m(11);
            let x = TorusPoint::new(coords, mm).unwrap();
            let t = sigma(&x, mm);
            let w = iota(t, &x, mm).unwrap();
            prop_assert!(RootPoint::new(w.coords(), mm).is_ok());
            prop_assert_eq!(iota_inv(t, &w, mm), x);
            prop_assert_eq!(x.encode(mm), TorusPoint::decode(x.encode(mm), mm).encode(mm));
        }

        #[test]
        fn direction_step_adds_q(coords in prop::array::uniform5(0u32..7), i in 0u8..5) {
            let mm = m(7);
            let x = TorusPoint::new(coords, mm).unwrap();
            let i = Z5::new(i as i64);
            let t = sigma(&x, mm);
            let y = x.step(i, mm);
            let before = iota(t, &x, mm).unwrap();
            let after = iota((t + 1) % 7, &y, mm).unwrap();
            prop_assert_eq!(after.sub(&before, mm), q(i, mm));
        }

        #[test]
        fn rotation_respects_zero_sets(w in root_point(9), c in 0u8..5) {
            let c = Z5::new(c as i64);
            let r = rotate(c, &w);
            prop_assert!(RootPoint::new(r.coords(), m(9)).is_ok());
            prop_assert_eq!(zero_set(&r), zero_set(&w).shift(c));
        }
    }
}
