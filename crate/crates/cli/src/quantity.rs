//! Unit-annotated scalars in scenario files.
//!
//! A quantity is a bare number (already in the internal unit), a string such
//! as `"25 kHz"`, `"2pi*25 kHz"`, `"2π×25 kHz"` or `"90 deg"`, or a table
//! `{ value = 25, unit = "kHz", two_pi = true }`.
//!
//! Frequencies are stored as ordinary frequencies in kHz. A `2π` prefix only
//! marks that the written number is an angular frequency divided by 2π, so
//! `"2π×25 kHz"` and `"25 kHz"` store the same 25.0. Units in rad/s are
//! divided by 2π.

use std::f64::consts::PI;
use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    /// kHz.
    Frequency,
    /// μm.
    Length,
    /// 1/ms.
    Rate,
    /// mT.
    Field,
    /// rad.
    Angle,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Frequency => "frequency",
            Dimension::Length => "length",
            Dimension::Rate => "decay rate",
            Dimension::Field => "magnetic field",
            Dimension::Angle => "angle",
        }
    }

    /// Scale to the internal unit, and whether the unit is angular (rad/s).
    fn unit(self, unit: &str) -> Option<(f64, bool)> {
        let u = unit.trim();
        Some(match self {
            Dimension::Frequency => match u {
                "Hz" => (1e-3, false),
                "kHz" => (1.0, false),
                "MHz" => (1e3, false),
                "GHz" => (1e6, false),
                "rad/s" => (1e-3, true),
                "krad/s" => (1.0, true),
                "Mrad/s" => (1e3, true),
                _ => return None,
            },
            Dimension::Length => match u {
                "um" | "μm" | "µm" | "micron" => (1.0, false),
                "nm" => (1e-3, false),
                "mm" => (1e3, false),
                "m" => (1e6, false),
                "a0" => (5.291_772_109_03e-5, false),
                _ => return None,
            },
            Dimension::Rate => match u {
                "1/ms" | "/ms" | "ms^-1" | "kHz" => (1.0, false),
                "1/s" | "/s" | "s^-1" | "Hz" => (1e-3, false),
                "1/us" | "/us" | "us^-1" | "MHz" => (1e3, false),
                _ => return None,
            },
            Dimension::Field => match u {
                "mT" => (1.0, false),
                "T" => (1e3, false),
                "G" => (0.1, false),
                "uT" | "μT" => (1e-3, false),
                _ => return None,
            },
            Dimension::Angle => match u {
                "rad" => (1.0, false),
                "deg" | "°" => (PI / 180.0, false),
                "pi" | "π" => (PI, false),
                _ => return None,
            },
        })
    }

    fn accepts_two_pi(self) -> bool {
        self == Dimension::Frequency
    }
}

/// Strips a leading `2pi*`, `2π×`, `2 pi x` and similar.
fn strip_two_pi(s: &str) -> (bool, &str) {
    let t = s.trim_start();
    let Some(rest) = t.strip_prefix('2') else { return (false, s) };
    let rest = rest.trim_start();
    let rest = if let Some(r) = rest.strip_prefix("pi") {
        r
    } else if let Some(r) = rest.strip_prefix('π') {
        r
    } else {
        return (false, s);
    };
    let rest = rest.trim_start();
    for sep in ["*", "×", "x", "·"] {
        if let Some(r) = rest.strip_prefix(sep) {
            return (true, r.trim_start());
        }
    }
    (false, s)
}

/// Parses a quantity string into the internal unit of `dim`.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let (two_pi, rest) = strip_two_pi(text);
    let rest = rest.trim();
    let split = rest
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit() || c == '.' || c == '+' || c == '-' || ((c == 'e' || c == 'E') && i > 0))
        })
        .map(|(i, _)| i)
        .unwrap_or(rest.len());
    let (num, unit) = rest.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("cannot read a number from {} `{text}`", dim.name()))?;
    let unit = unit.trim();
    if unit.is_empty() {
        return finish(value, 1.0, false, two_pi, dim, text);
    }
    let (scale, angular) = dim
        .unit(unit)
        .ok_or_else(|| format!("unit `{unit}` is not a {} unit (in `{text}`)", dim.name()))?;
    finish(value, scale, angular, two_pi, dim, text)
}

fn finish(value: f64, scale: f64, angular: bool, two_pi: bool, dim: Dimension, text: &str) -> Result<f64, String> {
    if two_pi && !dim.accepts_two_pi() {
        return Err(format!("a 2π factor makes no sense for a {} (`{text}`)", dim.name()));
    }
    if two_pi && angular {
        return Err(format!("`{text}` combines a 2π factor with an angular unit"));
    }
    let v = value * scale;
    let v = if angular { v / (2.0 * PI) } else { v };
    if !v.is_finite() {
        return Err(format!("{} `{text}` is not finite", dim.name()));
    }
    Ok(v)
}

pub trait Dim {
    const DIM: Dimension;
}

macro_rules! dims {
    ($($name:ident => $d:ident),* $(,)?) => {
        $(
            #[derive(Clone, Copy, Debug, PartialEq)]
            pub struct $name;
            impl Dim for $name {
                const DIM: Dimension = Dimension::$d;
            }
        )*
    };
}

dims!(FrequencyDim => Frequency, LengthDim => Length, RateDim => Rate, FieldDim => Field, AngleDim => Angle);

/// A scalar read with the units of `D`, stored in the internal unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantity<D>(pub f64, PhantomData<D>);

impl<D> Quantity<D> {
    pub fn new(v: f64) -> Self {
        Quantity(v, PhantomData)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

pub type Frequency = Quantity<FrequencyDim>;
pub type Length = Quantity<LengthDim>;
pub type Rate = Quantity<RateDim>;
pub type Field = Quantity<FieldDim>;
pub type Angle = Quantity<AngleDim>;

struct QuantityVisitor<D>(PhantomData<D>);

impl<'de, D: Dim> Visitor<'de> for QuantityVisitor<D> {
    type Value = Quantity<D>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a {} as a number, a string with units, or {{ value, unit, two_pi }}", D::DIM.name())
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
        Ok(Quantity::new(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
        Ok(Quantity::new(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
        Ok(Quantity::new(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
        parse_quantity(v, D::DIM).map(Quantity::new).map_err(E::custom)
    }

    fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<Self::Value, A::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Explicit {
            value: f64,
            #[serde(default)]
            unit: Option<String>,
            #[serde(default)]
            two_pi: bool,
        }
        let e = Explicit::deserialize(de::value::MapAccessDeserializer::new(map))?;
        let (scale, angular) = match &e.unit {
            None => (1.0, false),
            Some(u) => D::DIM
                .unit(u)
                .ok_or_else(|| de::Error::custom(format!("unit `{u}` is not a {} unit", D::DIM.name())))?,
        };
        let text = format!("{} {}", e.value, e.unit.as_deref().unwrap_or(""));
        finish(e.value, scale, angular, e.two_pi, D::DIM, text.trim()).map(Quantity::new).map_err(de::Error::custom)
    }
}

impl<'de, D: Dim> Deserialize<'de> for Quantity<D> {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        deserializer.deserialize_any(QuantityVisitor(PhantomData))
    }
}

/// One quantity or a list of them.
#[derive(Clone, Debug, PartialEq)]
pub struct OneOrMany<T>(pub Vec<T>);

impl<'de, T: Deserialize<'de>> Deserialize<'de> for OneOrMany<T> {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr<T> {
            Many(Vec<T>),
            One(T),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Many(v) => Ok(OneOrMany(v)),
            Repr::One(v) => Ok(OneOrMany(vec![v])),
        }
    }
}

/// Real grid written as a list, a single number, or `"start:stop:count"`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() == 3 {
            let start: f64 = parts[0].trim().parse().map_err(|_| format!("bad grid start in `{t}`"))?;
            let stop: f64 = parts[1].trim().parse().map_err(|_| format!("bad grid stop in `{t}`"))?;
            let count: usize = parts[2].trim().parse().map_err(|_| format!("bad grid count in `{t}`"))?;
            return Ok(Grid(linspace(start, stop, count)));
        }
        t.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad grid value `{p}`")))
            .collect::<Result<Vec<_>, _>>()
            .map(Grid)
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count).map(|k| start + (stop - start) * k as f64 / (count - 1) as f64).collect(),
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            List(Vec<f64>),
            One(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::List(v) => Ok(Grid(v)),
            Repr::One(v) => Ok(Grid(vec![v])),
            Repr::Text(s) => Grid::parse(&s).map_err(de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_forms() {
        for text in ["25 kHz", "2pi*25 kHz", "2π×25 kHz", "2 pi x 25 kHz", "0.025 MHz", "25000 Hz", "25"] {
            assert!((parse_quantity(text, Dimension::Frequency).unwrap() - 25.0).abs() < 1e-12, "{text}");
        }
        let w = parse_quantity(&format!("{} krad/s", 2.0 * PI * 25.0), Dimension::Frequency).unwrap();
        assert!((w - 25.0).abs() < 1e-12);
        assert!(parse_quantity("2pi*25 krad/s", Dimension::Frequency).is_err());
        assert!(parse_quantity("25 um", Dimension::Frequency).unwrap_err().contains("not a frequency unit"));
    }

    #[test]
    fn other_dimensions() {
        assert_eq!(parse_quantity("1000 nm", Dimension::Length).unwrap(), 1.0);
        assert!((parse_quantity("90 deg", Dimension::Angle).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((parse_quantity("0.5 pi", Dimension::Angle).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(parse_quantity("2285 1/s", Dimension::Rate).unwrap(), 2.285);
        assert_eq!(parse_quantity("1 T", Dimension::Field).unwrap(), 1000.0);
        assert!(parse_quantity("2pi*1 um", Dimension::Length).is_err());
        assert_eq!(parse_quantity("-1.5e2 kHz", Dimension::Frequency).unwrap(), -150.0);
    }

    #[test]
    fn deserialize_forms() {
        #[derive(Deserialize)]
        struct Doc {
            a: Frequency,
            b: Frequency,
            c: Frequency,
            d: Length,
        }
        let doc: Doc = toml::from_str(
            "a = 25\nb = \"2π×25 kHz\"\nc = { value = 0.025, unit = \"MHz\", two_pi = true }\nd = \"1 um\"",
        )
        .unwrap();
        assert_eq!(doc.a.get(), 25.0);
        assert_eq!(doc.b.get(), 25.0);
        assert!((doc.c.get() - 25.0).abs() < 1e-12);
        assert_eq!(doc.d.get(), 1.0);
    }

    #[test]
    fn grids() {
        assert_eq!(Grid::parse("0:1:3").unwrap().0, vec![0.0, 0.5, 1.0]);
        assert_eq!(Grid::parse("0.1, 0.2").unwrap().0, vec![0.1, 0.2]);
        assert!(Grid::parse("a,b").is_err());
    }
}
