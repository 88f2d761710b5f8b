//! Exact arithmetic in cyclotomic fields Q(z_n).
//!
//! An element is stored over the power basis `1, z, ..., z^(phi(n)-1)` reduced
//! modulo the n-th cyclotomic polynomial. Rational elements are always stored
//! with order 1, so they mix freely with elements of any cyclotomic field.
//! Elements of different orders are promoted to the lcm of the orders.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

/// The field Q(z_n). Order 1 is the rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub cyclotomic_order: u32,
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec { cyclotomic_order: 1 }
    }

    pub fn cyclotomic(n: u32) -> Self {
        assert!(n >= 1, "cyclotomic order must be positive");
        FieldSpec { cyclotomic_order: n }
    }

    /// Degree of the field over Q.
    pub fn degree(&self) -> usize {
        cyclotomic_poly(self.cyclotomic_order).len() - 1
    }

    /// Smallest field containing both.
    pub fn join(&self, other: &FieldSpec) -> FieldSpec {
        FieldSpec::cyclotomic(self.cyclotomic_order.lcm(&other.cyclotomic_order))
    }
}

static CYCLOTOMIC: Lazy<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Integer coefficients of Phi_n, lowest degree first. Monic.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<BigInt>> {
    if let Some(p) = CYCLOTOMIC.lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = if n == 1 {
        vec![BigInt::from(-1), BigInt::one()]
    } else {
        let mut num = vec![BigInt::zero(); n as usize + 1];
        num[0] = BigInt::from(-1);
        num[n as usize] = BigInt::one();
        for d in 1..n {
            if n % d == 0 {
                let q = cyclotomic_poly(d);
                num = exact_int_div(&num, &q);
            }
        }
        num
    };
    let p = Arc::new(p);
    CYCLOTOMIC.lock().unwrap().insert(n, p.clone());
    p
}

fn exact_int_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// An element of Q(z_n).
#[derive(Clone)]
pub struct Scalar {
    order: u32,
    coeffs: Vec<BigRational>,
}

fn trim(c: &mut Vec<BigRational>) {
    while c.last().map_or(false, |x| x.is_zero()) {
        c.pop();
    }
}

/// Reduce a polynomial modulo the monic Phi_n.
fn reduce(mut c: Vec<BigRational>, n: u32) -> Vec<BigRational> {
    let phi = cyclotomic_poly(n);
    let d = phi.len() - 1;
    while c.len() > d {
        let top = c.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = c.len() - d;
        for (i, p) in phi.iter().take(d).enumerate() {
            if !p.is_zero() {
                c[shift + i] -= &top * BigRational::from_integer(p.clone());
            }
        }
    }
    trim(&mut c);
    c
}

impl Scalar {
    fn make(order: u32, mut coeffs: Vec<BigRational>) -> Scalar {
        trim(&mut coeffs);
        let order = if coeffs.len() <= 1 { 1 } else { order };
        Scalar { order, coeffs }
    }

    pub fn zero() -> Scalar {
        Scalar { order: 1, coeffs: Vec::new() }
    }

    pub fn one() -> Scalar {
        Scalar::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Scalar {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_frac(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(r: BigRational) -> Scalar {
        Scalar::make(1, vec![r])
    }

    /// Build from power-basis coefficients in Q(z_n); reduces modulo Phi_n.
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Scalar {
        Scalar::make(order, reduce(coeffs, order))
    }

    /// z_n, a primitive n-th root of unity.
    pub fn primitive_root(spec: FieldSpec) -> Scalar {
        Scalar::root_of_unity(spec.cyclotomic_order, 1)
    }

    /// z_n^k.
    pub fn root_of_unity(n: u32, k: i64) -> Scalar {
        let k = k.rem_euclid(n as i64) as usize;
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        Scalar::from_coeffs(n, c)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn field(&self) -> FieldSpec {
        FieldSpec::cyclotomic(self.order)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficients padded to the full power basis of Q(z_n) (n a multiple of the own order).
    pub fn coeffs_in(&self, n: u32) -> Vec<BigRational> {
        let mut c = self.promote(n).coeffs;
        c.resize(FieldSpec::cyclotomic(n).degree(), BigRational::zero());
        c
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Canonical form. Values are kept canonical by every constructor, so this is a copy.
    pub fn canon(&self) -> Scalar {
        Scalar::from_coeffs(self.order, self.coeffs.clone())
    }

    /// Re-express in Q(z_m), m a multiple of the own order.
    pub fn promote(&self, m: u32) -> Scalar {
        if self.order == m || self.is_rational() {
            return self.clone();
        }
        assert!(m % self.order == 0, "cannot promote order {} to {}", self.order, m);
        let step = (m / self.order) as usize;
        let mut c = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            c[i * step] = x.clone();
        }
        Scalar::from_coeffs(m, c)
    }

    fn common(&self, other: &Scalar) -> (u32, Scalar, Scalar) {
        if self.order == other.order || other.is_rational() {
            return (self.order, self.clone(), other.clone());
        }
        if self.is_rational() {
            return (other.order, self.clone(), other.clone());
        }
        let m = self.order.lcm(&other.order);
        (m, self.promote(m), other.promote(m))
    }

    pub fn add_ref(&self, other: &Scalar) -> Scalar {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let (n, a, b) = self.common(other);
        let len = a.coeffs.len().max(b.coeffs.len());
        let mut c = a.coeffs;
        c.resize(len, BigRational::zero());
        for (x, y) in c.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        Scalar::make(n, c)
    }

    pub fn neg_ref(&self) -> Scalar {
        Scalar { order: self.order, coeffs: self.coeffs.iter().map(|x| -x).collect() }
    }

    pub fn sub_ref(&self, other: &Scalar) -> Scalar {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if other.is_rational() {
            let r = &other.coeffs[0];
            if r.is_one() {
                return self.clone();
            }
            return Scalar::make(self.order, self.coeffs.iter().map(|x| x * r).collect());
        }
        if self.is_rational() {
            return other.mul_ref(self);
        }
        let (n, a, b) = self.common(other);
        let mut c = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        Scalar::make(n, reduce(c, n))
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Scalar::from_rational(self.coeffs[0].recip()));
        }
        let n = self.order;
        let phi: Vec<BigRational> =
            cyclotomic_poly(n).iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let u = poly_inverse_mod(&self.coeffs, &phi);
        Ok(Scalar::from_coeffs(n, u))
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul_ref(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Scalar, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ref(&b);
            }
            b = b.mul_ref(&b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Deterministic total order used for tie-breaking: compares power-basis
    /// coefficients in the common field, lowest degree first.
    pub fn lex_cmp(&self, other: &Scalar) -> std::cmp::Ordering {
        let (n, _, _) = self.common(other);
        let a = self.coeffs_in(n);
        let b = other.coeffs_in(n);
        a.cmp(&b)
    }

    /// Exact field operation by name, for dispatch from text interfaces.
    pub fn arith(&self, other: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
        Ok(match op {
            ArithOp::Add => self.add_ref(other),
            ArithOp::Sub => self.sub_ref(other),
            ArithOp::Mul => self.mul_ref(other),
            ArithOp::Div => self.div(other)?,
        })
    }

    /// Parse `"c0 + c1*z + c2*z^2"` style text; `z` is z_n for the given order.
    /// `q` is accepted as a synonym of `z`.
    pub fn parse(text: &str, order: u32) -> Result<Scalar, ScalarError> {
        let err = || ScalarError::Parse(text.to_string());
        if has_zero_denominator(text) {
            return Err(ScalarError::DivisionByZero);
        }
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' && bytes[i - 1] != b'*' {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut acc = Scalar::zero();
        for t in terms {
            let (sign, body) = match t.as_bytes().first() {
                Some(b'+') => (1, &t[1..]),
                Some(b'-') => (-1, &t[1..]),
                _ => (1, t),
            };
            if body.is_empty() {
                return Err(err());
            }
            let mut coef = BigRational::one();
            let mut power: Option<i64> = None;
            for factor in body.split('*') {
                if factor.starts_with('z') || factor.starts_with('q') {
                    let e = if factor.len() == 1 {
                        1
                    } else if let Some(rest) = factor[1..].strip_prefix('^') {
                        rest.trim_start_matches('(').trim_end_matches(')').parse::<i64>().map_err(|_| err())?
                    } else {
                        return Err(err());
                    };
                    power = Some(power.unwrap_or(0) + e);
                } else {
                    coef *= parse_rational(factor).ok_or_else(err)?;
                }
            }
            if sign < 0 {
                coef = -coef;
            }
            let mut term = Scalar::from_rational(coef);
            if let Some(e) = power {
                if order == 1 && e != 0 {
                    // z_1 = 1
                } else {
                    term = term.mul_ref(&Scalar::root_of_unity(order, e));
                }
            }
            acc = acc.add_ref(&term);
        }
        Ok(acc)
    }

    /// Parse a coefficient list over the power basis of Q(z_n).
    pub fn from_coeff_strings(items: &[String], order: u32) -> Result<Scalar, ScalarError> {
        let mut c = Vec::with_capacity(items.len());
        for it in items {
            c.push(parse_rational(it.trim()).ok_or_else(|| ScalarError::Parse(it.clone()))?);
        }
        Ok(Scalar::from_coeffs(order, c))
    }
}

/// Parse `"a"` or `"a/b"`; `None` on malformed input.
fn parse_rational(s: &str) -> Option<BigRational> {
    let parse_int = |t: &str| t.parse::<BigInt>().ok();
    match s.split_once('/') {
        Some((a, b)) => {
            let d = parse_int(b)?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(parse_int(a)?, d))
        }
        None => Some(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Whether a text scalar has a zero denominator (reported separately from other parse errors).
pub fn has_zero_denominator(text: &str) -> bool {
    text.split(|c: char| c == '+' || c == '-' || c == '*').any(|t| {
        t.split_once('/').map_or(false, |(_, d)| d.trim().parse::<BigInt>().map_or(false, |d| d.is_zero()))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn poly_trim(p: &mut Vec<BigRational>) {
    trim(p)
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, y) in b.iter().enumerate() {
            r[k + i] -= &c * y;
        }
        q[k] = c;
        r.pop();
        poly_trim(&mut r);
    }
    (q, r)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    poly_trim(&mut c);
    c
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut c = a.to_vec();
    c.resize(a.len().max(b.len()), BigRational::zero());
    for (x, y) in c.iter_mut().zip(b) {
        *x -= y;
    }
    poly_trim(&mut c);
    c
}

/// u with a*u = 1 mod m, for a coprime to m (m irreducible here).
fn poly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    let (mut t0, mut t1): (Vec<BigRational>, Vec<BigRational>) = (Vec::new(), vec![BigRational::one()]);
    while r1.len() > 1 {
        let (q, r) = poly_divrem(&r0, &r1);
        let t = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t);
    }
    let c = r1[0].recip();
    let u: Vec<BigRational> = t1.iter().map(|x| x * &c).collect();
    let (_, rem) = poly_divrem(&u, m);
    rem
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        if self.order == other.order || self.is_rational() || other.is_rational() {
            return self.coeffs == other.coeffs;
        }
        let (_, a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_i64(v)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.add_ref(&o)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.add_ref(o)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self.sub_ref(&o)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.sub_ref(o)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.mul_ref(&o)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.mul_ref(o)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => "z".to_string(),
                k => format!("z^{k}"),
            };
            if i == 0 {
                out.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", fmt_rational(&a), mono));
            }
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 1 {
            write!(f, "{self}")
        } else {
            write!(f, "{self} [z={}]", self.order)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Scalar {
        Scalar::primitive_root(FieldSpec::cyclotomic(3))
    }

    #[test]
    fn cube_of_q_is_one() {
        let q = q();
        assert_eq!(&(&q * &q) * &q, Scalar::one());
        assert_ne!(q, Scalar::one());
    }

    #[test]
    fn cyclotomic_relation() {
        let q = q();
        let s = &(&Scalar::one() + &q) + &(&q * &q);
        assert!(s.is_zero());
    }

    #[test]
    fn rationals_add() {
        let s = Scalar::from_frac(1, 2) + Scalar::from_frac(1, 3);
        assert_eq!(s, Scalar::from_frac(5, 6));
    }

    #[test]
    fn primitive_roots_have_exact_order() {
        assert_eq!(Scalar::primitive_root(FieldSpec::rationals()), Scalar::one());
        for n in 1..=12u32 {
            let z = Scalar::primitive_root(FieldSpec::cyclotomic(n));
            let mut p = z.clone();
            let mut k = 1;
            while !p.is_one() {
                p = &p * &z;
                k += 1;
            }
            assert_eq!(k, n, "order of z_{n}");
        }
        let i = Scalar::primitive_root(FieldSpec::cyclotomic(4));
        assert_eq!(&i * &i, Scalar::from_i64(-1));
    }

    #[test]
    fn inverse_in_q_zeta5() {
        let z = Scalar::primitive_root(FieldSpec::cyclotomic(5));
        let a = &(&z * &z) + &Scalar::from_frac(3, 7);
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        assert_eq!(Scalar::zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn mixed_orders_promote() {
        let q = q();
        let i = Scalar::primitive_root(FieldSpec::cyclotomic(4));
        let p = &q * &i;
        assert_eq!(p.order(), 12);
        assert_eq!(p.pow(12).unwrap(), Scalar::one());
        let q12 = q.promote(12);
        assert_eq!(q12, q);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["0", "1", "-3/4", "z", "-z", "3/4*z + 1", "1 - 2*z"] {
            let s = Scalar::parse(text, 3).unwrap();
            let back = Scalar::parse(&s.to_string(), 3).unwrap();
            assert_eq!(s, back, "{text}");
        }
        assert_eq!(Scalar::parse("z^2", 3).unwrap(), &q() * &q());
        assert_eq!(Scalar::parse("z^-1", 3).unwrap(), &q() * &q());
        assert_eq!(Scalar::parse("1/0", 1), Err(ScalarError::DivisionByZero));
        assert!(has_zero_denominator("1/0"));
        assert!(Scalar::parse("abc", 1).is_err());
    }

    #[test]
    fn arith_dispatch() {
        let a = Scalar::from_i64(3);
        let b = Scalar::from_i64(2);
        assert_eq!(a.arith(&b, ArithOp::Div).unwrap(), Scalar::from_frac(3, 2));
        assert_eq!(a.arith(&Scalar::zero(), ArithOp::Div), Err(ScalarError::DivisionByZero));
    }
}
