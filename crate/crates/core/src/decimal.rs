//! Exact decimal constants and the high-precision reals derived from them.

use std::fmt;
use std::str::FromStr;

use dashu_float::round::mode::HalfAway;
use dashu_float::{DBig, FBig};
use dashu_int::IBig;

/// Binary precision of every derived real (log torsion, ratios).
pub const REAL_BITS: usize = 128;

/// Binary floating point at [`REAL_BITS`] precision.
pub type Real = FBig<HalfAway, 2>;

pub fn real_from_int(v: &IBig) -> Real {
    Real::from(v.clone()).with_precision(REAL_BITS).value()
}

/// Decimal rendering with `digits` significant digits.
pub fn real_to_string(x: &Real, digits: usize) -> String {
    let d: DBig = x.clone().with_base::<10>().value();
    let d = d.with_precision(digits).value();
    format_plain(&d)
}

pub fn real_to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

/// Positional notation, never scientific.
fn format_plain(d: &DBig) -> String {
    let repr = d.repr();
    let digits = repr.significand().to_string();
    let (neg, digits) = match digits.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, digits),
    };
    let exp = repr.exponent();
    let body = if digits == "0" {
        "0".to_string()
    } else if exp >= 0 {
        format!("{digits}{}", "0".repeat(exp as usize))
    } else {
        let shift = (-exp) as usize;
        if digits.len() > shift {
            let (i, f) = digits.split_at(digits.len() - shift);
            format!("{i}.{f}")
        } else {
            format!("0.{}{digits}", "0".repeat(shift - digits.len()))
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// A non-negative exact decimal `units / 10^scale`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decimal {
    units: IBig,
    scale: u32,
}

impl Decimal {
    pub fn units(&self) -> &IBig {
        &self.units
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_positive(&self) -> bool {
        self.units > IBig::ZERO
    }

    pub fn mul_int(&self, k: u64) -> Decimal {
        Decimal {
            units: &self.units * IBig::from(k),
            scale: self.scale,
        }
    }

    pub fn to_real(&self) -> Real {
        let den = IBig::from(10u8).pow(self.scale as usize);
        real_from_int(&self.units) / real_from_int(&den)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_string().parse().unwrap_or(f64::NAN)
    }
}

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> Result<Decimal, String> {
        let s = s.trim();
        let bad = || format!("not a plain decimal: {s:?}");
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty()
            || !int.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let units: IBig = format!("{int}{frac}").parse().map_err(|_| bad())?;
        Ok(Decimal {
            units,
            scale: frac.len() as u32,
        })
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.units.to_string();
        let scale = self.scale as usize;
        if scale == 0 {
            return write!(f, "{digits}");
        }
        let padded = if digits.len() <= scale {
            format!("{}{digits}", "0".repeat(scale + 1 - digits.len()))
        } else {
            digits
        };
        let (i, frac) = padded.split_at(padded.len() - scale);
        write!(f, "{i}.{frac}")
    }
}
