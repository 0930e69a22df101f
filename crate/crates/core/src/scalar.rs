//! Gaussian rationals: the computable part of the residue field `C`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CoreError, Result};

/// Exact rational number.
pub type Rat = BigRational;

/// `p/q` from machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a rational.
pub fn rat_i(p: i64) -> Rat {
    Rat::from(BigInt::from(p))
}

/// Canonical `p/q` form with an explicit denominator, e.g. `3/1`, `-1/2`.
pub fn rat_string(x: &Rat) -> String {
    let mut s = x.numer().to_string();
    s.push('/');
    s.push_str(&x.denom().to_string());
    s
}

/// Parse `p`, `p/q`, or a decimal-free signed integer string.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| CoreError::InsufficientPrecision(String::from("bad rational numerator")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| CoreError::InsufficientPrecision(String::from("bad rational denominator")))?;
    if d.is_zero() {
        return Err(CoreError::DivisionByZero);
    }
    Ok(Rat::new(n, d))
}

/// An exact element `re + im·i` of `Q(i)`, the computable subfield of the
/// residue field `C`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    pub re: Rat,
    pub im: Rat,
}

impl Scalar {
    pub fn new(re: Rat, im: Rat) -> Self {
        Scalar { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        Scalar { re, im: Rat::zero() }
    }

    pub fn from_i64(n: i64) -> Self {
        Scalar::from_rat(rat_i(n))
    }

    /// Rational `p/q` as a scalar.
    pub fn from_frac(p: i64, q: i64) -> Self {
        Scalar::from_rat(rat(p, q))
    }

    pub fn zero() -> Self {
        Scalar::from_rat(Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::from_rat(Rat::one())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { re: Rat::zero(), im: Rat::one() }
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

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re^2 + im^2`, the field norm down to `Q`.
    pub fn norm_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        let n = self.norm_sq();
        Ok(Scalar { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// f64 approximation `(re, im)`; used only for isolation heuristics.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// Canonical textual form `(<re>/<den>+<im>/<den>i)` with explicit
    /// denominators; negative imaginary parts fold the sign, e.g. `(1/2-3/4i)`.
    pub fn canonical_string(&self) -> String {
        let mut s = String::from("(");
        s.push_str(&rat_string(&self.re));
        if self.im.is_negative() {
            s.push('-');
            s.push_str(&rat_string(&-self.im.clone()));
        } else {
            s.push('+');
            s.push_str(&rat_string(&self.im));
        }
        s.push('i');
        s.push(')');
        s
    }

    /// Parse the canonical form or relaxed forms: `3`, `-1/2`, `i`, `2i`,
    /// `(1+2i)`, `(1/2-3/4i)`.
    pub fn parse(input: &str) -> Result<Self> {
        let s = input.trim();
        let inner = if s.starts_with('(') && s.ends_with(')') { &s[1..s.len() - 1] } else { s };
        let inner = inner.trim();
        if inner.is_empty() {
            return Err(CoreError::InsufficientPrecision(String::from("empty scalar")));
        }
        // Split into real and imaginary summands at a top-level +/- that is
        // not a leading sign.
        let bytes = inner.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && bytes[k - 1] as char != '/' {
                split = Some(k);
                break;
            }
        }
        let (re_part, im_part) = match split {
            Some(k) if inner.ends_with('i') => (&inner[..k], &inner[k..inner.len() - 1]),
            _ => {
                if let Some(stripped) = inner.strip_suffix('i') {
                    ("0", stripped)
                } else {
                    (inner, "0")
                }
            }
        };
        let re = parse_rat(if re_part.is_empty() { "0" } else { re_part })?;
        let im_part = im_part.trim();
        let im = match im_part {
            "" | "+" => Rat::one(),
            "-" => -Rat::one(),
            other => parse_rat(other)?,
        };
        Ok(Scalar { re, im })
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

// Short human form: `3`, `-1/2`, `i`, `1+2i`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            if self.im.is_one() {
                return write!(f, "i");
            }
            if (-self.im.clone()).is_one() {
                return write!(f, "-i");
            }
            return write!(f, "{}i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.div(rhs).expect("scalar division by zero")
    }
}

/// Clear denominators: returns Gaussian-integer pairs `(re, im)` and the
/// common denominator, so `coeffs[k] = (re_k + im_k i) / den`.
pub fn clear_denominators(coeffs: &[Scalar]) -> (Vec<(BigInt, BigInt)>, BigInt) {
    use num_integer::Integer;
    let mut den = BigInt::one();
    for c in coeffs {
        den = den.lcm(c.re.denom());
        den = den.lcm(c.im.denom());
    }
    let cleared = coeffs
        .iter()
        .map(|c| {
            let re = c.re.numer() * (&den / c.re.denom());
            let im = c.im.numer() * (&den / c.im.denom());
            (re, im)
        })
        .collect();
    (cleared, den)
}
