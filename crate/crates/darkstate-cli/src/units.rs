//! Unit-suffixed quantities in config files ("100 meV", "5 ns", "300 K").

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

pub trait Dimension {
    const NAME: &'static str;
    /// Canonical unit written back out.
    const CANONICAL: &'static str;
    /// (suffix, factor to the canonical unit)
    const UNITS: &'static [(&'static str, f64)];
}

macro_rules! dimension {
    ($name:ident, $label:literal, $canonical:literal, [$(($suffix:literal, $factor:expr)),* $(,)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name;
        impl Dimension for $name {
            const NAME: &'static str = $label;
            const CANONICAL: &'static str = $canonical;
            const UNITS: &'static [(&'static str, f64)] = &[$(($suffix, $factor)),*];
        }
    };
}

dimension!(
    EnergyDim,
    "energy",
    "eV",
    [
        ("eV", 1.0),
        ("meV", 1e-3),
        ("ueV", 1e-6),
        ("µeV", 1e-6),
        ("μeV", 1e-6),
        ("neV", 1e-9)
    ]
);
dimension!(
    TimeDim,
    "time",
    "ns",
    [
        ("s", 1e9),
        ("ms", 1e6),
        ("us", 1e3),
        ("µs", 1e3),
        ("ns", 1.0),
        ("ps", 1e-3),
        ("fs", 1e-6)
    ]
);
dimension!(TemperatureDim, "temperature", "K", [("K", 1.0)]);
dimension!(
    AngleDim,
    "angle",
    "rad",
    [
        ("rad", 1.0),
        ("deg", std::f64::consts::PI / 180.0),
        ("pi", std::f64::consts::PI)
    ]
);

/// A value in the canonical unit of `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity<D> {
    pub value: f64,
    _dim: PhantomData<D>,
}

pub type Energy = Quantity<EnergyDim>;
pub type Time = Quantity<TimeDim>;
pub type Temperature = Quantity<TemperatureDim>;
pub type Angle = Quantity<AngleDim>;

impl<D> Quantity<D> {
    pub const fn new(value: f64) -> Self {
        Quantity {
            value,
            _dim: PhantomData,
        }
    }
}

impl<D: Dimension> Quantity<D> {
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let split = s
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
            .unwrap_or(s.len());
        // Back off an exponent marker that actually starts the unit ("1 eV" vs "1e-3 eV").
        let (mut num, mut unit) = s.split_at(split);
        while num.ends_with(['e', 'E']) {
            let cut = num.len() - 1;
            (num, unit) = s.split_at(cut);
        }
        let unit = unit.trim();
        if unit.is_empty() {
            return Err(format!(
                "{} `{s}` needs a unit suffix (one of {})",
                D::NAME,
                Self::suffixes()
            ));
        }
        let value: f64 = num
            .trim()
            .parse()
            .map_err(|_| format!("cannot read a number from {} `{s}`", D::NAME))?;
        let factor = D::UNITS
            .iter()
            .find(|(u, _)| *u == unit)
            .map(|(_, f)| *f)
            .ok_or_else(|| {
                format!(
                    "unknown {} unit `{unit}` (expected one of {})",
                    D::NAME,
                    Self::suffixes()
                )
            })?;
        if !value.is_finite() {
            return Err(format!("{} `{s}` is not finite", D::NAME));
        }
        Ok(Self::new(value * factor))
    }

    fn suffixes() -> String {
        D::UNITS.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ")
    }
}

impl<D: Dimension> fmt::Display for Quantity<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} {}", self.value, D::CANONICAL)
    }
}

impl<D: Dimension> Serialize for Quantity<D> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de, D: Dimension> Deserialize<'de> for Quantity<D> {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        struct V<D>(PhantomData<D>);
        impl<D: Dimension> Visitor<'_> for V<D> {
            type Value = Quantity<D>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(
                    f,
                    "a {} with a unit suffix such as \"{}\"",
                    D::NAME,
                    format_args!("1 {}", D::CANONICAL)
                )
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Self::Value, E> {
                Quantity::parse(s).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                Err(E::custom(format!(
                    "bare number {v} given for a {}; add a unit suffix",
                    D::NAME
                )))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }
        }
        deserializer.deserialize_any(V(PhantomData))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_suffixes() {
        assert_eq!(Energy::parse("100 meV").unwrap().value, 0.1);
        assert_eq!(Energy::parse("2.8eV").unwrap().value, 2.8);
        assert!((Energy::parse("1e2 neV").unwrap().value - 1e-7).abs() < 1e-22);
        assert_eq!(Time::parse("5 ns").unwrap().value, 5.0);
        assert_eq!(Temperature::parse("300 K").unwrap().value, 300.0);
        assert!((Angle::parse("0.5 pi").unwrap().value - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((Angle::parse("90 deg").unwrap().value - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_missing_or_wrong_units() {
        assert!(Energy::parse("2.8").is_err());
        assert!(Energy::parse("2.8 K").is_err());
        assert!(Temperature::parse("hot K").is_err());
    }

    #[test]
    fn round_trips_through_display() {
        let e = Energy::parse("37 meV").unwrap();
        assert_eq!(Energy::parse(&e.to_string()).unwrap(), e);
    }
}
