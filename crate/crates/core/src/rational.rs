//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The coefficient field used everywhere in the crate.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `"3"`, `"-3/4"` or `" 7 / 2 "`. Returns `None` on malformed input or a zero
/// denominator.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// Canonical text form: `"3"`, `"-1/2"`.
pub fn fmt_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Formats a coefficient that precedes a monomial: drops a unit magnitude, keeps the sign
/// separate. Returns `(is_negative, magnitude_text)` where `magnitude_text` is empty for 1.
pub(crate) fn coefficient_parts(x: &Q) -> (bool, String) {
    let neg = x.is_negative();
    let mag = x.abs();
    if mag.is_one() {
        (neg, String::new())
    } else {
        (neg, fmt_rational(&mag))
    }
}

/// Joins `(coefficient, monomial_text)` pairs into `"a m1 + b m2 - m3"`; an empty list is `"0"`.
/// A monomial text of `""` denotes the unit monomial.
pub(crate) fn join_terms<'a>(terms: impl IntoIterator<Item = (&'a Q, String)>) -> String {
    let mut out = String::new();
    for (i, (c, mono)) in terms.into_iter().enumerate() {
        let (neg, mag) = coefficient_parts(c);
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        match (mag.is_empty(), mono.is_empty()) {
            (true, true) => out.push('1'),
            (true, false) => out.push_str(&mono),
            (false, true) => out.push_str(&mag),
            (false, false) => {
                out.push_str(&mag);
                out.push(' ');
                out.push_str(&mono);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-6/4"), Some(q(-3, 2)));
        assert_eq!(parse_rational(" 5 "), Some(qi(5)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(fmt_rational(&q(-3, 2)), "-3/2");
        assert_eq!(fmt_rational(&qi(4)), "4");
    }

    #[test]
    fn joins_terms() {
        let a = qi(1);
        let b = q(-1, 2);
        let s = join_terms([(&a, "x".to_string()), (&b, "y".to_string())]);
        assert_eq!(s, "x - 1/2 y");
        assert_eq!(join_terms(std::iter::empty()), "0");
    }
}
