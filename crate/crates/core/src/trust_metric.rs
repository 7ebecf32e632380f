//! Value scales shared by both trust models.
//!
//! [`TrustTenths`] is the discrete `[0, 1]` metric with a step of `0.1`,
//! stored as an integer count of tenths so grid membership is exact.
//! [`OrdinalDegree`] is the four-level scale `vb < b < g < vg` (equivalently
//! `vu < ut < t < vt` when read as trust degrees), and [`SemanticShift`] is a
//! signed distance between two ordinal degrees.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("trust value {0} is outside [0.0, 1.0]")]
    OutOfRange(String),
    #[error("trust value {0} is not on the 0.1 step grid")]
    OffGrid(String),
    #[error("cannot parse `{0}` as a trust value (expected one decimal digit, e.g. 0.7)")]
    Malformed(String),
    #[error("unknown ordinal degree `{0}` (expected vb, b, g or vg)")]
    UnknownDegree(String),
    #[error("semantic shift {0} is outside [-3, 3]")]
    ShiftOutOfRange(i64),
    #[error("banding cut points must be strictly increasing and at least 0.1, got {0:?}")]
    InvalidBanding([u8; 3]),
}

/// A trust value on the `0.0, 0.1, ..., 1.0` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrustTenths(u8);

impl TrustTenths {
    pub const ZERO: TrustTenths = TrustTenths(0);
    pub const ONE: TrustTenths = TrustTenths(10);

    pub fn new(tenths: u8) -> Result<Self, MetricError> {
        if tenths > 10 {
            return Err(MetricError::OutOfRange(format!("{}.{}", tenths / 10, tenths % 10)));
        }
        Ok(TrustTenths(tenths))
    }

    /// Clamps any integer count of tenths onto the scale.
    pub fn saturating(tenths: i64) -> Self {
        TrustTenths(tenths.clamp(0, 10) as u8)
    }

    /// Accepts a real value only if it sits on the grid (within `1e-9`).
    pub fn from_f64(value: f64) -> Result<Self, MetricError> {
        if !value.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&value) {
            return Err(MetricError::OutOfRange(value.to_string()));
        }
        let scaled = value * 10.0;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-9 {
            return Err(MetricError::OffGrid(value.to_string()));
        }
        Ok(TrustTenths(rounded as u8))
    }

    /// Rounds a real in `[0, 1]` to the nearest tenth, ties going up.
    pub fn round_half_up(value: f64) -> Self {
        // Nudge before flooring so that values like 0.65 stored as 0.6499999... round up.
        let scaled = (value * 10.0 + 0.5 + 1e-9).floor();
        TrustTenths::saturating(scaled as i64)
    }

    pub fn tenths(self) -> u8 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 10.0
    }

    /// `1.0 - self`.
    pub fn complement(self) -> Self {
        TrustTenths(10 - self.0)
    }

    pub fn offset(self, steps: i64) -> Self {
        TrustTenths::saturating(i64::from(self.0) + steps)
    }
}

impl fmt::Display for TrustTenths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

impl FromStr for TrustTenths {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bytes = s.as_bytes();
        let well_formed = bytes.len() == 3
            && bytes[0].is_ascii_digit()
            && bytes[1] == b'.'
            && bytes[2].is_ascii_digit();
        if !well_formed {
            return Err(MetricError::Malformed(s.to_string()));
        }
        TrustTenths::new((bytes[0] - b'0') * 10 + (bytes[2] - b'0'))
            .map_err(|_| MetricError::OutOfRange(s.to_string()))
    }
}

impl Serialize for TrustTenths {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TrustTenths {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TenthsVisitor;

        impl Visitor<'_> for TenthsVisitor {
            type Value = TrustTenths;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a trust value on the 0.1 grid, as a number or a string like \"0.7\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<TrustTenths, E> {
                TrustTenths::from_f64(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<TrustTenths, E> {
                match v {
                    0 => Ok(TrustTenths::ZERO),
                    1 => Ok(TrustTenths::ONE),
                    _ => Err(E::custom(MetricError::OutOfRange(v.to_string()))),
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<TrustTenths, E> {
                if v < 0 {
                    return Err(E::custom(MetricError::OutOfRange(v.to_string())));
                }
                self.visit_u64(v as u64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<TrustTenths, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(TenthsVisitor)
    }
}

/// Four-level ordinal degree, ordered from most negative to most positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrdinalDegree {
    VeryBad = 0,
    Bad = 1,
    Good = 2,
    VeryGood = 3,
}

impl OrdinalDegree {
    /// All degrees in ascending rank order.
    pub const ALL: [OrdinalDegree; 4] = [
        OrdinalDegree::VeryBad,
        OrdinalDegree::Bad,
        OrdinalDegree::Good,
        OrdinalDegree::VeryGood,
    ];

    pub fn rank(self) -> u8 {
        self as u8
    }

    pub fn from_rank(rank: u8) -> Option<Self> {
        Self::ALL.get(usize::from(rank)).copied()
    }

    fn from_clamped_rank(rank: i64) -> Self {
        Self::ALL[rank.clamp(0, 3) as usize]
    }

    pub fn token(self) -> &'static str {
        match self {
            OrdinalDegree::VeryBad => "vb",
            OrdinalDegree::Bad => "b",
            OrdinalDegree::Good => "g",
            OrdinalDegree::VeryGood => "vg",
        }
    }

    /// Rank-inverted degree (`vg <-> vb`, `g <-> b`).
    pub fn inverted(self) -> Self {
        Self::ALL[usize::from(3 - self.rank())]
    }

    /// `true` for `g` and `vg`.
    pub fn is_trustworthy(self) -> bool {
        self >= OrdinalDegree::Good
    }
}

impl fmt::Display for OrdinalDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for OrdinalDegree {
    type Err = MetricError;

    /// Accepts the experience tokens `vb|b|g|vg` and the trust-degree aliases `vu|ut|t|vt`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "vb" | "vu" => Ok(OrdinalDegree::VeryBad),
            "b" | "ut" => Ok(OrdinalDegree::Bad),
            "g" | "t" => Ok(OrdinalDegree::Good),
            "vg" | "vt" => Ok(OrdinalDegree::VeryGood),
            other => Err(MetricError::UnknownDegree(other.to_string())),
        }
    }
}

impl Serialize for OrdinalDegree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for OrdinalDegree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        token.parse().map_err(de::Error::custom)
    }
}

/// Signed distance between two ordinal degrees, in `[-3, 3]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SemanticShift(i8);

impl SemanticShift {
    pub const ZERO: SemanticShift = SemanticShift(0);

    pub fn new(shift: i64) -> Result<Self, MetricError> {
        if !(-3..=3).contains(&shift) {
            return Err(MetricError::ShiftOutOfRange(shift));
        }
        Ok(SemanticShift(shift as i8))
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn magnitude(self) -> u8 {
        self.0.unsigned_abs()
    }
}

impl fmt::Display for SemanticShift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<'de> Deserialize<'de> for SemanticShift {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = i64::deserialize(deserializer)?;
        SemanticShift::new(raw).map_err(de::Error::custom)
    }
}

/// `d ⊕ s`: moves `d` by `s` ranks, clamping at both ends of the scale.
pub fn degree_shift(degree: OrdinalDegree, shift: SemanticShift) -> OrdinalDegree {
    OrdinalDegree::from_clamped_rank(i64::from(degree.rank()) + i64::from(shift.value()))
}

/// `rank(own) - rank(recommended)`, so that `degree_shift(recommended, result) == own`.
pub fn degree_distance(own: OrdinalDegree, recommended: OrdinalDegree) -> SemanticShift {
    SemanticShift(own.rank() as i8 - recommended.rank() as i8)
}

/// Maps tenths onto ordinal degrees.
///
/// Stored as the lowest tenths value of the `b`, `g` and `vg` bands; anything
/// below the first cut point is `vb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Banding {
    cuts: [u8; 3],
}

impl Banding {
    pub fn new(cuts: [TrustTenths; 3]) -> Result<Self, MetricError> {
        let raw = cuts.map(TrustTenths::tenths);
        if raw[0] == 0 || raw[0] >= raw[1] || raw[1] >= raw[2] {
            return Err(MetricError::InvalidBanding(raw));
        }
        Ok(Banding { cuts: raw })
    }

    pub fn cuts(&self) -> [TrustTenths; 3] {
        self.cuts.map(TrustTenths)
    }

    pub fn degree_of(&self, value: TrustTenths) -> OrdinalDegree {
        let rank = self.cuts.iter().filter(|&&cut| value.0 >= cut).count();
        OrdinalDegree::ALL[rank]
    }
}

impl Default for Banding {
    /// `0.0-0.2 -> vb`, `0.3-0.5 -> b`, `0.6-0.8 -> g`, `0.9-1.0 -> vg`.
    fn default() -> Self {
        Banding { cuts: [3, 6, 9] }
    }
}

impl Serialize for Banding {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.cuts().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Banding {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let cuts = <[TrustTenths; 3]>::deserialize(deserializer)?;
        Banding::new(cuts).map_err(de::Error::custom)
    }
}

/// Default-banded conversion from the tenths metric to the ordinal scale.
pub fn tenths_to_degree(value: TrustTenths) -> OrdinalDegree {
    Banding::default().degree_of(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use OrdinalDegree::*;

    fn t(tenths: u8) -> TrustTenths {
        TrustTenths::new(tenths).unwrap()
    }

    fn shift(s: i64) -> SemanticShift {
        SemanticShift::new(s).unwrap()
    }

    #[test]
    fn degree_shift_examples() {
        assert_eq!(degree_shift(Good, shift(1)), VeryGood);
        assert_eq!(degree_shift(Bad, shift(0)), Bad);
        assert_eq!(degree_shift(VeryGood, shift(2)), VeryGood);
        assert_eq!(degree_shift(Bad, shift(-3)), VeryBad);
    }

    #[test]
    fn degree_distance_examples() {
        assert_eq!(degree_distance(Good, Bad), shift(1));
        assert_eq!(degree_distance(VeryBad, VeryGood), shift(-3));
        assert_eq!(degree_distance(Good, Good), shift(0));
    }

    #[test]
    fn default_banding() {
        assert_eq!(tenths_to_degree(t(7)), Good);
        assert_eq!(tenths_to_degree(t(0)), VeryBad);
        assert_eq!(tenths_to_degree(t(9)), VeryGood);
        let expected = [0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3];
        for (tenths, rank) in expected.iter().enumerate() {
            assert_eq!(tenths_to_degree(t(tenths as u8)).rank(), *rank, "tenths {tenths}");
        }
    }

    #[test]
    fn banding_rejects_empty_bands() {
        assert!(Banding::new([t(0), t(5), t(8)]).is_err());
        assert!(Banding::new([t(3), t(3), t(8)]).is_err());
        assert!(Banding::new([t(3), t(8), t(5)]).is_err());
        let custom = Banding::new([t(1), t(5), t(10)]).unwrap();
        assert_eq!(custom.degree_of(t(0)), VeryBad);
        assert_eq!(custom.degree_of(t(9)), Good);
        assert_eq!(custom.degree_of(t(10)), VeryGood);
    }

    #[test]
    fn tenths_parse_and_display() {
        assert_eq!("0.7".parse::<TrustTenths>().unwrap(), t(7));
        assert_eq!(" 1.0 ".parse::<TrustTenths>().unwrap(), t(10));
        assert_eq!(t(3).to_string(), "0.3");
        assert!(matches!("1.1".parse::<TrustTenths>(), Err(MetricError::OutOfRange(_))));
        for bad in ["0.75", ".7", "7", "0,7", "-0.1", "", "1.00"] {
            assert!(bad.parse::<TrustTenths>().is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn tenths_from_f64_rejects_off_grid() {
        assert_eq!(TrustTenths::from_f64(0.3).unwrap(), t(3));
        assert_eq!(TrustTenths::from_f64(0.1 + 0.2).unwrap(), t(3));
        assert!(matches!(TrustTenths::from_f64(0.35), Err(MetricError::OffGrid(_))));
        assert!(matches!(TrustTenths::from_f64(1.1), Err(MetricError::OutOfRange(_))));
        assert!(TrustTenths::from_f64(f64::NAN).is_err());
    }

    #[test]
    fn round_half_up_goes_up_on_ties() {
        assert_eq!(TrustTenths::round_half_up(0.65), t(7));
        assert_eq!(TrustTenths::round_half_up(0.725), t(7));
        assert_eq!(TrustTenths::round_half_up(0.75), t(8));
        assert_eq!(TrustTenths::round_half_up(0.04), t(0));
        assert_eq!(TrustTenths::round_half_up(1.0), t(10));
    }

    #[test]
    fn degree_tokens_and_aliases() {
        for d in OrdinalDegree::ALL {
            assert_eq!(d.token().parse::<OrdinalDegree>().unwrap(), d);
        }
        assert_eq!("vt".parse::<OrdinalDegree>().unwrap(), VeryGood);
        assert_eq!("ut".parse::<OrdinalDegree>().unwrap(), Bad);
        assert!("x".parse::<OrdinalDegree>().is_err());
        assert_eq!(VeryGood.inverted(), VeryBad);
        assert_eq!(Bad.inverted(), Good);
    }

    #[test]
    fn serde_forms() {
        assert_eq!(serde_json::to_string(&t(7)).unwrap(), "\"0.7\"");
        assert_eq!(serde_json::from_str::<TrustTenths>("0.7").unwrap(), t(7));
        assert_eq!(serde_json::from_str::<TrustTenths>("\"0.7\"").unwrap(), t(7));
        assert_eq!(serde_json::from_str::<TrustTenths>("1").unwrap(), t(10));
        assert!(serde_json::from_str::<TrustTenths>("0.75").is_err());
        assert_eq!(serde_json::to_string(&VeryGood).unwrap(), "\"vg\"");
        assert!(serde_json::from_str::<SemanticShift>("4").is_err());
        let banding: Banding = serde_json::from_str("[0.3, 0.6, 0.9]").unwrap();
        assert_eq!(banding, Banding::default());
    }

    fn any_degree() -> impl Strategy<Value = OrdinalDegree> {
        (0u8..4).prop_map(|r| OrdinalDegree::from_rank(r).unwrap())
    }

    proptest! {
        #[test]
        fn shift_stays_on_scale(d in any_degree(), s in -3i64..=3) {
            let out = degree_shift(d, shift(s));
            prop_assert!(out.rank() <= 3);
        }

        #[test]
        fn distance_round_trips(a in any_degree(), b in any_degree()) {
            prop_assert_eq!(degree_shift(b, degree_distance(a, b)), a);
        }

        #[test]
        fn banding_is_monotone(lo in 0u8..=10, hi in 0u8..=10) {
            let (lo, hi) = (lo.min(hi), lo.max(hi));
            prop_assert!(tenths_to_degree(t(lo)) <= tenths_to_degree(t(hi)));
        }

        #[test]
        fn display_parse_round_trip(v in 0u8..=10) {
            prop_assert_eq!(t(v).to_string().parse::<TrustTenths>().unwrap(), t(v));
        }
    }
}
