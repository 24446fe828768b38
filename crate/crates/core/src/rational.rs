//! Exact rationals and the textual `p/q` format used in every input and output.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form (reduced, positive denominator).
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Longest accepted rational literal. Keeps hostile inputs from allocating
/// gigantic integers.
const MAX_LITERAL_LEN: usize = 4096;

/// Parses `"p/q"`, `"p"` or `"-p/q"` with decimal integers.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if s.len() > MAX_LITERAL_LEN {
        return Err(Error::Parse("rational literal too long".into()));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num = parse_int(num)?;
    let den = match den {
        Some(d) => {
            if d.starts_with(['-', '+']) {
                return Err(Error::Parse(format!("malformed denominator in {s:?}")));
            }
            parse_int(d)?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

fn parse_int(s: &str) -> Result<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("malformed integer {s:?}")));
    }
    s.parse::<BigInt>()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Canonical text: `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Decimal rendering with `digits` significant digits (round half away from
/// zero). Cosmetic only.
pub fn to_decimal(q: &Rational, digits: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let negative = q.is_negative();
    let abs = q.abs();
    // Find exponent e with 10^e <= abs < 10^(e+1).
    let mut e: i64 = (abs.numer().bits() as i64 - abs.denom().bits() as i64) * 30103 / 100000;
    let pow = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(num_traits::pow(BigInt::from(10), k as usize))
        } else {
            Rational::new(
                BigInt::one(),
                num_traits::pow(BigInt::from(10), (-k) as usize),
            )
        }
    };
    while pow(e) > abs {
        e -= 1;
    }
    while pow(e + 1) <= abs {
        e += 1;
    }
    // Scale so the integer part has exactly `digits` digits.
    let shift = digits as i64 - 1 - e;
    let scaled = &abs * pow(shift);
    let (q_int, rem) = scaled.numer().div_rem(scaled.denom());
    let mut mantissa = q_int;
    if Rational::new(rem * 2, scaled.denom().clone()) >= Rational::one() {
        mantissa += 1;
    }
    let mut shift = shift;
    let mut text = mantissa.to_string();
    if text.len() > digits {
        // Rounding carried into a new digit.
        text.pop();
        shift -= 1;
    }
    let body = if shift <= 0 {
        let zeros = "0".repeat((-shift) as usize);
        format!("{text}{zeros}")
    } else if (shift as usize) < text.len() {
        let split = text.len() - shift as usize;
        format!("{}.{}", &text[..split], &text[split..])
    } else {
        let zeros = "0".repeat(shift as usize - text.len());
        format!("0.{zeros}{text}")
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn floor(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

pub fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

pub fn sign(q: &Rational) -> Sign {
    if q.is_zero() {
        Sign::NoSign
    } else if q.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// `n choose k` as a rational.
pub fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    Rational::from_integer(acc)
}

/// Serde adapters that write rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = RationalLiteral::deserialize(d)?;
        v.into_rational().map_err(de::Error::custom)
    }

    /// Accepts either a `"p/q"` string or a JSON integer.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RationalLiteral {
        Text(String),
        Int(i64),
    }

    impl RationalLiteral {
        pub(crate) fn into_rational(self) -> Result<Rational> {
            match self {
                RationalLiteral::Text(t) => parse_rational(&t),
                RationalLiteral::Int(i) => Ok(int(i)),
            }
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(
            v: &[Rational],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&format_rational(q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            let raw = Vec::<RationalLiteral>::deserialize(d)?;
            raw.into_iter()
                .map(|r| r.into_rational().map_err(de::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            q: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match q {
                Some(q) => s.serialize_some(&format_rational(q)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            let raw = Option::<RationalLiteral>::deserialize(d)?;
            raw.map(|r| r.into_rational().map_err(de::Error::custom))
                .transpose()
        }
    }
}
