//! Triangular fuzzy numbers and the linguistic scales used by the House of Quality.
//!
//! A [`Tfn`] is the triplet `(a, b, c)`: smallest possible, most promising and
//! largest possible value. Arithmetic is the componentwise approximation used
//! throughout fuzzy QFD, not exact interval arithmetic. Multiplication and
//! division are only defined for nonnegative operands, which covers every value
//! the pipeline produces.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("fuzzy number components must satisfy a <= b <= c, got ({a}, {b}, {c})")]
    OrderingViolation { a: f64, b: f64, c: f64 },
    #[error("fuzzy number components must be finite, got ({a}, {b}, {c})")]
    NonFinite { a: f64, b: f64, c: f64 },
    #[error("fuzzy multiplication requires nonnegative operands, got {0}")]
    NegativeOperand(Tfn),
    #[error("fuzzy division requires a divisor with strictly positive lower bound, got {0}")]
    DivisorNotPositive(Tfn),
    #[error("scalar multiplier must be nonnegative and finite, got {0}")]
    NegativeScalar(f64),
}

impl FuzzyError {
    pub fn code(&self) -> &'static str {
        match self {
            FuzzyError::OrderingViolation { .. } => "OrderingViolation",
            FuzzyError::NonFinite { .. } => "NonFinite",
            FuzzyError::NegativeOperand(_) => "NegativeOperand",
            FuzzyError::DivisorNotPositive(_) => "DivisorNotPositive",
            FuzzyError::NegativeScalar(_) => "NegativeScalar",
        }
    }
}

/// Triangular fuzzy number `(a, b, c)` with `a <= b <= c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTfn")]
pub struct Tfn {
    a: f64,
    b: f64,
    c: f64,
}

#[derive(Deserialize)]
struct RawTfn {
    a: f64,
    b: f64,
    c: f64,
}

impl TryFrom<RawTfn> for Tfn {
    type Error = FuzzyError;

    fn try_from(raw: RawTfn) -> Result<Self, Self::Error> {
        Tfn::new(raw.a, raw.b, raw.c)
    }
}

impl Tfn {
    pub const ZERO: Tfn = Tfn { a: 0.0, b: 0.0, c: 0.0 };
    pub const ONE: Tfn = Tfn { a: 1.0, b: 1.0, c: 1.0 };

    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(FuzzyError::NonFinite { a, b, c });
        }
        if a > b || b > c {
            return Err(FuzzyError::OrderingViolation { a, b, c });
        }
        Ok(Tfn { a, b, c })
    }

    /// The crisp number `r` as the degenerate triangle `(r, r, r)`.
    pub fn crisp(r: f64) -> Result<Self, FuzzyError> {
        Tfn::new(r, r, r)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn components(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.a >= 0.0
    }

    /// Degree of membership of `x`.
    ///
    /// Zero outside `[a, c]`, one at `b`, linear ramps in between. A vertical
    /// ramp (`a == b` or `b == c`) is a step, so `x == b` always maps to one.
    pub fn membership(&self, x: f64) -> f64 {
        if x.is_nan() || x < self.a || x > self.c {
            0.0
        } else if x == self.b {
            1.0
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.c - x) / (self.c - self.b)
        }
    }

    /// Componentwise product. Both operands must be nonnegative.
    pub fn mul(&self, other: &Tfn) -> Result<Tfn, FuzzyError> {
        for t in [self, other] {
            if !t.is_nonnegative() {
                return Err(FuzzyError::NegativeOperand(*t));
            }
        }
        Ok(Tfn { a: self.a * other.a, b: self.b * other.b, c: self.c * other.c })
    }

    /// `self ⊗ 1/divisor = (a1/c2, b1/b2, c1/a2)`.
    pub fn div(&self, divisor: &Tfn) -> Result<Tfn, FuzzyError> {
        if !self.is_nonnegative() {
            return Err(FuzzyError::NegativeOperand(*self));
        }
        if divisor.a <= 0.0 {
            return Err(FuzzyError::DivisorNotPositive(*divisor));
        }
        Ok(Tfn { a: self.a / divisor.c, b: self.b / divisor.b, c: self.c / divisor.a })
    }

    pub fn scale(&self, r: f64) -> Result<Tfn, FuzzyError> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(FuzzyError::NegativeScalar(r));
        }
        Ok(Tfn { a: r * self.a, b: r * self.b, c: r * self.c })
    }

    /// Graded mean `(a + 4b + c) / 6`.
    pub fn defuzzify(&self) -> f64 {
        (self.a + 4.0 * self.b + self.c) / 6.0
    }
}

impl Add for Tfn {
    type Output = Tfn;

    fn add(self, rhs: Tfn) -> Tfn {
        Tfn { a: self.a + rhs.a, b: self.b + rhs.b, c: self.c + rhs.c }
    }
}

impl std::iter::Sum for Tfn {
    fn sum<I: Iterator<Item = Tfn>>(iter: I) -> Tfn {
        iter.fold(Tfn::ZERO, |acc, t| acc + t)
    }
}

impl fmt::Display for Tfn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "({:.p$}, {:.p$}, {:.p$})", self.a, self.b, self.c, p = p),
            None => write!(f, "({}, {}, {})", self.a, self.b, self.c),
        }
    }
}

pub fn tfn_add(m: Tfn, n: Tfn) -> Tfn {
    m + n
}

pub fn tfn_mul(m: &Tfn, n: &Tfn) -> Result<Tfn, FuzzyError> {
    m.mul(n)
}

pub fn tfn_div(m: &Tfn, n: &Tfn) -> Result<Tfn, FuzzyError> {
    m.div(n)
}

pub fn tfn_scale(r: f64, m: &Tfn) -> Result<Tfn, FuzzyError> {
    m.scale(r)
}

pub fn defuzzify(m: &Tfn) -> f64 {
    m.defuzzify()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown linguistic token {token:?}; expected one of {expected}")]
pub struct UnknownToken {
    pub token: String,
    pub expected: &'static str,
}

/// Strength of the link between a customer requirement and a technical
/// requirement. `None` is an empty cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RelationshipDegree {
    #[default]
    None,
    Weak,
    Medium,
    Strong,
}

impl RelationshipDegree {
    /// Grade ladder, weakest first.
    pub const LADDER: [RelationshipDegree; 4] =
        [RelationshipDegree::None, RelationshipDegree::Weak, RelationshipDegree::Medium, RelationshipDegree::Strong];

    pub fn tfn(self) -> Tfn {
        match self {
            RelationshipDegree::Strong => Tfn { a: 0.7, b: 1.0, c: 1.0 },
            RelationshipDegree::Medium => Tfn { a: 0.3, b: 0.5, c: 0.7 },
            RelationshipDegree::Weak => Tfn { a: 0.0, b: 0.0, c: 0.3 },
            RelationshipDegree::None => Tfn::ZERO,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            RelationshipDegree::Strong => "S",
            RelationshipDegree::Medium => "M",
            RelationshipDegree::Weak => "W",
            RelationshipDegree::None => "",
        }
    }

    pub fn grade(self) -> usize {
        self as usize
    }

    pub fn from_grade(grade: usize) -> Option<Self> {
        Self::LADDER.get(grade).copied()
    }
}

impl FromStr for RelationshipDegree {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "" => Ok(RelationshipDegree::None),
            "W" | "w" | "Weak" | "weak" => Ok(RelationshipDegree::Weak),
            "M" | "m" | "Medium" | "medium" => Ok(RelationshipDegree::Medium),
            "S" | "s" | "Strong" | "strong" => Ok(RelationshipDegree::Strong),
            other => Err(UnknownToken { token: other.to_string(), expected: "S, M, W or blank" }),
        }
    }
}

impl TryFrom<String> for RelationshipDegree {
    type Error = UnknownToken;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RelationshipDegree> for String {
    fn from(d: RelationshipDegree) -> String {
        d.token().to_string()
    }
}

/// Correlation between two technical requirements in the roof.
///
/// Both published grades map to nonnegative numbers, so a negative
/// correlation still adds to a requirement's roof-adjusted priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CorrelationDegree {
    #[default]
    None,
    Negative,
    Positive,
}

impl CorrelationDegree {
    /// Grade ladder ordered by fuzzy magnitude.
    pub const LADDER: [CorrelationDegree; 3] =
        [CorrelationDegree::None, CorrelationDegree::Negative, CorrelationDegree::Positive];

    pub fn tfn(self) -> Tfn {
        match self {
            CorrelationDegree::Positive => Tfn { a: 0.5, b: 0.7, c: 1.0 },
            CorrelationDegree::Negative => Tfn { a: 0.0, b: 0.3, c: 0.5 },
            CorrelationDegree::None => Tfn::ZERO,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            CorrelationDegree::Positive => "+",
            CorrelationDegree::Negative => "-",
            CorrelationDegree::None => "",
        }
    }

    pub fn grade(self) -> usize {
        self as usize
    }

    pub fn from_grade(grade: usize) -> Option<Self> {
        Self::LADDER.get(grade).copied()
    }
}

impl FromStr for CorrelationDegree {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "" => Ok(CorrelationDegree::None),
            "+" | "★" | "*" | "Positive" | "positive" => Ok(CorrelationDegree::Positive),
            "-" | "−" | "▲" | "Negative" | "negative" => Ok(CorrelationDegree::Negative),
            other => Err(UnknownToken { token: other.to_string(), expected: "+, - or blank" }),
        }
    }
}

impl TryFrom<String> for CorrelationDegree {
    type Error = UnknownToken;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<CorrelationDegree> for String {
    fn from(d: CorrelationDegree) -> String {
        d.token().to_string()
    }
}

pub fn relationship_to_tfn(d: RelationshipDegree) -> Tfn {
    d.tfn()
}

pub fn correlation_to_tfn(d: CorrelationDegree) -> Tfn {
    d.tfn()
}
