//! Quantities written as `"<number> <unit>"` strings and converted to SI.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

pub trait Dimension {
    const NAME: &'static str;
    /// SI factor of `unit`, or `None` if the unit is not of this dimension.
    fn factor(unit: &str) -> Option<f64>;
    /// Whether a bare number is accepted (as SI).
    const BARE_NUMBER: bool = false;
}

macro_rules! dimension {
    ($ty:ident, $name:expr, { $($unit:expr => $f:expr),* $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq)]
        pub struct $ty;
        impl Dimension for $ty {
            const NAME: &'static str = $name;
            fn factor(unit: &str) -> Option<f64> {
                match unit {
                    $($unit => Some($f),)*
                    _ => None,
                }
            }
        }
    };
}

dimension!(Length, "length", {
    "m" => 1.0, "km" => 1e3, "cm" => 1e-2, "mm" => 1e-3,
    "um" => 1e-6, "µm" => 1e-6, "μm" => 1e-6, "nm" => 1e-9, "pm" => 1e-12,
});
dimension!(Angle, "angle", {
    "rad" => 1.0, "mrad" => 1e-3, "urad" => 1e-6,
    "deg" => std::f64::consts::PI / 180.0, "°" => std::f64::consts::PI / 180.0,
});
dimension!(Power, "power", { "W" => 1.0, "mW" => 1e-3, "kW" => 1e3 });
dimension!(Intensity, "intensity", {
    "W/m^2" => 1.0, "W/cm^2" => 1e4, "W/mm^2" => 1e6, "kW/cm^2" => 1e7,
});
dimension!(Area, "area", { "m^2" => 1.0, "cm^2" => 1e-4, "mm^2" => 1e-6 });
dimension!(Current, "current", {
    "A" => 1.0, "mA" => 1e-3, "uA" => 1e-6, "µA" => 1e-6, "μA" => 1e-6, "nA" => 1e-9,
});
dimension!(Frequency, "frequency", {
    "Hz" => 1.0, "kHz" => 1e3, "MHz" => 1e6, "GHz" => 1e9,
});
dimension!(Resistance, "resistance", {
    "Ohm" => 1.0, "kOhm" => 1e3, "MOhm" => 1e6, "Ω" => 1.0, "kΩ" => 1e3, "MΩ" => 1e6,
});
dimension!(Temperature, "temperature", { "K" => 1.0 });
dimension!(Responsivity, "responsivity", { "A/W" => 1.0, "mA/W" => 1e-3 });
dimension!(NonlinearCoefficient, "nonlinear coefficient", { "m/V" => 1.0, "pm/V" => 1e-12 });
dimension!(Permittivity, "permittivity", { "F/m" => 1.0 });
dimension!(Speed, "speed", { "m/s" => 1.0 });

/// Parses `"<number> <unit>"` into SI.
pub fn parse_quantity<D: Dimension>(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .char_indices()
        .find(|(_, c)| !(c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')))
        .map(|(i, _)| i)
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` does not start with a number"))?;
    let unit = unit.trim();
    if unit.is_empty() {
        if D::BARE_NUMBER {
            return Ok(value);
        }
        return Err(format!("`{text}` is missing a {} unit", D::NAME));
    }
    let f = D::factor(unit).ok_or_else(|| format!("`{unit}` is not a {} unit", D::NAME))?;
    let v = value * f;
    if !v.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(v)
}

/// A quantity of dimension `D`, stored in SI.
#[derive(Clone, Copy, PartialEq)]
pub struct Q<D>(pub f64, PhantomData<D>);

impl<D> Q<D> {
    pub fn new(v: f64) -> Self {
        Q(v, PhantomData)
    }

    pub fn si(self) -> f64 {
        self.0
    }
}

impl<D> fmt::Debug for Q<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<'de, D: Dimension> Deserialize<'de> for Q<D> {
    fn deserialize<De: Deserializer<'de>>(d: De) -> Result<Self, De::Error> {
        struct V<D>(PhantomData<D>);
        impl<'de, D: Dimension> Visitor<'de> for V<D> {
            type Value = Q<D>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a {} such as \"5 m\"", D::NAME)
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Q<D>, E> {
                parse_quantity::<D>(s).map(Q::new).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q<D>, E> {
                if D::BARE_NUMBER {
                    Ok(Q::new(v))
                } else {
                    Err(E::custom(format!(
                        "{v} is missing a {} unit; write it as a string such as \"{v} <unit>\"",
                        D::NAME
                    )))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q<D>, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q<D>, E> {
                self.visit_f64(v as f64)
            }
        }
        d.deserialize_any(V::<D>(PhantomData))
    }
}

/// Dimensionless value given either as a number or a numeric string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ratio;

impl Dimension for Ratio {
    const NAME: &'static str = "ratio";
    const BARE_NUMBER: bool = true;
    fn factor(unit: &str) -> Option<f64> {
        match unit {
            "%" => Some(0.01),
            _ => None,
        }
    }
}
