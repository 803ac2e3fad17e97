//! The torus algebra A(T²) over F2.
//!
//! Eight basis elements: two idempotents ι₀, ι₁ and six Reeb chords ρ₁, ρ₂,
//! ρ₃, ρ₁₂, ρ₂₃, ρ₁₂₃. A chord is an interval [s, e] with 0 ≤ s < e ≤ 3 on
//! the pointed matched circle whose positions 0, 2 belong to the ι₀ arc and
//! 1, 3 to the ι₁ arc. Products are chord concatenation: ρ_I · ρ_J is the
//! joined chord when I ends where J starts, zero otherwise; idempotents act
//! as units on matching sides. Everything here is derived from the interval
//! data, so the convention lives in exactly one place.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::HfError;

/// One of the two idempotents.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Idem {
    #[serde(rename = "i0")]
    I0,
    #[serde(rename = "i1")]
    I1,
}

impl Idem {
    pub fn complement(self) -> Idem {
        match self {
            Idem::I0 => Idem::I1,
            Idem::I1 => Idem::I0,
        }
    }

    /// Idempotent owning a circle position (0 and 2 are ι₀; 1 and 3 are ι₁).
    pub fn of_position(p: u8) -> Idem {
        if p % 2 == 0 {
            Idem::I0
        } else {
            Idem::I1
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Idem::I0 => "i0",
            Idem::I1 => "i1",
        }
    }
}

impl fmt::Display for Idem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A basis element of the torus algebra.
///
/// The discriminant order (idempotents first, then chords by interval) is the
/// canonical sort order used everywhere, including serialization.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "i0")]
    I0,
    #[serde(rename = "i1")]
    I1,
    #[serde(rename = "r1")]
    R1,
    #[serde(rename = "r2")]
    R2,
    #[serde(rename = "r3")]
    R3,
    #[serde(rename = "r12")]
    R12,
    #[serde(rename = "r23")]
    R23,
    #[serde(rename = "r123")]
    R123,
}

pub const BASIS: [Basis; 8] = [
    Basis::I0,
    Basis::I1,
    Basis::R1,
    Basis::R2,
    Basis::R3,
    Basis::R12,
    Basis::R23,
    Basis::R123,
];

/// The six chords, in canonical order.
pub const CHORDS: [Basis; 6] = [
    Basis::R1,
    Basis::R2,
    Basis::R3,
    Basis::R12,
    Basis::R23,
    Basis::R123,
];

impl Basis {
    /// Interval endpoints for chords; `None` for idempotents.
    pub fn interval(self) -> Option<(u8, u8)> {
        match self {
            Basis::I0 | Basis::I1 => None,
            Basis::R1 => Some((0, 1)),
            Basis::R2 => Some((1, 2)),
            Basis::R3 => Some((2, 3)),
            Basis::R12 => Some((0, 2)),
            Basis::R23 => Some((1, 3)),
            Basis::R123 => Some((0, 3)),
        }
    }

    fn of_interval(s: u8, e: u8) -> Option<Basis> {
        match (s, e) {
            (0, 1) => Some(Basis::R1),
            (1, 2) => Some(Basis::R2),
            (2, 3) => Some(Basis::R3),
            (0, 2) => Some(Basis::R12),
            (1, 3) => Some(Basis::R23),
            (0, 3) => Some(Basis::R123),
            _ => None,
        }
    }

    pub fn is_idempotent(self) -> bool {
        self.interval().is_none()
    }

    pub fn left_idem(self) -> Idem {
        match self {
            Basis::I0 => Idem::I0,
            Basis::I1 => Idem::I1,
            _ => Idem::of_position(self.interval().unwrap().0),
        }
    }

    pub fn right_idem(self) -> Idem {
        match self {
            Basis::I0 => Idem::I0,
            Basis::I1 => Idem::I1,
            _ => Idem::of_position(self.interval().unwrap().1),
        }
    }

    /// The unique (left, right) idempotent pair with left·a·right = a.
    pub fn idempotents(self) -> (Idem, Idem) {
        (self.left_idem(), self.right_idem())
    }

    /// Basis-level product; `None` is zero.
    pub fn mul(self, other: Basis) -> Option<Basis> {
        match (self.interval(), other.interval()) {
            (None, None) => {
                if self == other {
                    Some(self)
                } else {
                    None
                }
            }
            (None, Some(_)) => {
                if self.is_idem_of(other.left_idem()) {
                    Some(other)
                } else {
                    None
                }
            }
            (Some(_), None) => {
                if other.is_idem_of(self.right_idem()) {
                    Some(self)
                } else {
                    None
                }
            }
            (Some((s1, e1)), Some((s2, e2))) => {
                if e1 == s2 {
                    Basis::of_interval(s1, e2)
                } else {
                    None
                }
            }
        }
    }

    fn is_idem_of(self, idem: Idem) -> bool {
        matches!(
            (self, idem),
            (Basis::I0, Idem::I0) | (Basis::I1, Idem::I1)
        )
    }

    pub fn idem(idem: Idem) -> Basis {
        match idem {
            Idem::I0 => Basis::I0,
            Idem::I1 => Basis::I1,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Basis::I0 => "i0",
            Basis::I1 => "i1",
            Basis::R1 => "r1",
            Basis::R2 => "r2",
            Basis::R3 => "r3",
            Basis::R12 => "r12",
            Basis::R23 => "r23",
            Basis::R123 => "r123",
        }
    }

    pub fn from_token(tok: &str) -> Result<Basis, HfError> {
        BASIS
            .iter()
            .copied()
            .find(|b| b.token() == tok)
            .ok_or_else(|| HfError::Format(format!("unknown algebra token {tok:?}")))
    }

    fn bit(self) -> u8 {
        BASIS.iter().position(|&b| b == self).unwrap() as u8
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// An F2 linear combination of basis elements, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AlgebraElement(u8);

impl AlgebraElement {
    pub const ZERO: AlgebraElement = AlgebraElement(0);

    /// The two-sided unit ι₀ + ι₁.
    pub fn unit() -> AlgebraElement {
        AlgebraElement::from(Basis::I0) + AlgebraElement::from(Basis::I1)
    }

    pub fn terms(self) -> impl Iterator<Item = Basis> {
        BASIS
            .iter()
            .copied()
            .filter(move |b| self.0 >> b.bit() & 1 == 1)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, b: Basis) -> bool {
        self.0 >> b.bit() & 1 == 1
    }

    pub fn mul(self, other: AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::ZERO;
        for a in self.terms() {
            for b in other.terms() {
                if let Some(c) = a.mul(b) {
                    out += AlgebraElement::from(c);
                }
            }
        }
        out
    }
}

impl From<Basis> for AlgebraElement {
    fn from(b: Basis) -> Self {
        AlgebraElement(1 << b.bit())
    }
}

impl std::ops::Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        AlgebraElement(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for AlgebraElement {
    fn add_assign(&mut self, rhs: AlgebraElement) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for b in self.terms() {
            if !first {
                f.write_str("+")?;
            }
            f.write_str(b.token())?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Multiplication of algebra elements (bilinear extension of chord
/// concatenation).
pub fn multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement {
    a.mul(b)
}
