//! Exact Gaussian rationals `a/b + (c/d)i`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An element of Q(i). Both parts are kept in lowest terms by `BigRational`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse scalar `{0}`")]
pub struct ParseScalarError(pub String);

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }

    pub fn frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Scalar {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Scalar::new(self.re.recip(), BigRational::zero()));
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Scalar::new(&self.re / &norm, -(&self.im / &norm)))
    }

    /// Real rational value as a small fraction if it fits in i64.
    pub fn as_i64_ratio(&self) -> Option<(i64, i64)> {
        use num_traits::ToPrimitive;
        if !self.is_real() {
            return None;
        }
        Some((self.re.numer().to_i64()?, self.re.denom().to_i64()?))
    }

    /// Exact square root when the value is the square of a rational.
    pub fn rational_sqrt(&self) -> Option<Scalar> {
        if !self.is_real() {
            return None;
        }
        let neg = self.re.is_negative();
        let a = self.re.abs();
        let n = a.numer().sqrt();
        let d = a.denom().sqrt();
        if &(&n * &n) != a.numer() || &(&d * &d) != a.denom() {
            return None;
        }
        let r = BigRational::new(n, d);
        if neg {
            Some(Scalar::new(BigRational::zero(), r))
        } else {
            Some(Scalar::new(r, BigRational::zero()))
        }
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_imag(r: &BigRational) -> String {
    if r.is_one() {
        "i".to_string()
    } else {
        format!("{}i", fmt_rat(r))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        if self.re.is_zero() {
            if self.im.is_negative() {
                return write!(f, "-{}", fmt_imag(&-self.im.clone()));
            }
            return write!(f, "{}", fmt_imag(&self.im));
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}", fmt_rat(&self.re), sign, fmt_imag(&self.im.abs()))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    if n.is_empty() || d.is_empty() || d.starts_with(['+', '-']) {
        return None;
    }
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

fn parse_imag_coeff(s: &str) -> Option<BigRational> {
    match s {
        "" | "+" => Some(BigRational::one()),
        "-" => Some(-BigRational::one()),
        _ => parse_rat(s),
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || ParseScalarError(text.to_string());
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        let Some(body) = s.strip_suffix('i') else {
            return parse_rat(&s).map(|re| Scalar::new(re, BigRational::zero())).ok_or_else(err);
        };
        // split at the last sign that is not the leading character
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (parse_rat(&body[..k]).ok_or_else(err)?, &body[k..]),
            None => (BigRational::zero(), body),
        };
        let im = parse_imag_coeff(im).ok_or_else(err)?;
        Ok(Scalar::new(re, im))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar::new(v, BigRational::zero())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::new(&self.re + &o.re, BigRational::zero());
        }
        Scalar::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::new(&self.re - &o.re, BigRational::zero());
        }
        Scalar::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::new(&self.re * &o.re, BigRational::zero());
        }
        Scalar::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        let inv = o.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, o: Scalar) {
        *self += &o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, o: Scalar) {
        *self -= &o;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::zero();
        for v in iter {
            acc += &v;
        }
        acc
    }
}

/// Shorthand for small integer scalars.
pub fn s(v: i64) -> Scalar {
    Scalar::from_int(v)
}

/// Shorthand for small fractions.
pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::frac(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text() {
        let cases = [
            ("-3/2+1/4i", "-3/2+1/4i"),
            ("2", "2"),
            ("-i", "-i"),
            ("i", "i"),
            ("4/6", "2/3"),
            ("0/5", "0"),
            ("1-i", "1-i"),
            ("-1/2i", "-1/2i"),
            ("3+2/4i", "3+1/2i"),
            ("+i", "i"),
        ];
        for (input, want) in cases {
            let v: Scalar = input.parse().unwrap();
            assert_eq!(v.to_string(), want, "input {input}");
        }
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "abc", "1//2", "i i", "2/-3"] {
            assert!(bad.parse::<Scalar>().is_err(), "{bad}");
        }
    }

    #[test]
    fn field_ops() {
        let a: Scalar = "1+i".parse().unwrap();
        let b: Scalar = "2-3i".parse().unwrap();
        assert_eq!((&a * &b).to_string(), "5-i");
        assert_eq!(&(&a / &b) * &b, a);
        assert_eq!(Scalar::i() * Scalar::i(), s(-1));
        assert!(Scalar::zero().inv().is_none());
    }

    #[test]
    fn sqrt_of_squares() {
        assert_eq!(q(9, 4).rational_sqrt(), Some(q(3, 2)));
        assert_eq!(s(-4).rational_sqrt(), Some("2i".parse().unwrap()));
        assert_eq!(s(2).rational_sqrt(), None);
    }
}
