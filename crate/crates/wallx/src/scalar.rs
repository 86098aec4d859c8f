//! Coefficient rings.
//!
//! [`LaurentScalar`] is `Z[L^{±1/2}]` with exponents stored doubled, so the
//! key `k` means `L^{k/2}`. [`RatFunc`] is `Q(t)` with `t = L^{1/2}`; it only
//! shows up where the dilogarithm or a truncated `log` needs denominators.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::WallxError;

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Commutative-or-not ring used as matrix entries and algebra coefficients.
pub trait Ring:
    Clone + PartialEq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
}

/// Integer Laurent polynomial in `L^{1/2}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LaurentScalar {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn from_int(c: i64) -> Self {
        Self::monomial(0, c)
    }

    /// `c · L^{k/2}`.
    pub fn monomial(k: i64, c: i64) -> Self {
        Self::monomial_big(k, BigInt::from(c))
    }

    pub fn monomial_big(k: i64, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Self { terms }
    }

    /// The Lefschetz class `L`.
    pub fn l() -> Self {
        Self::monomial(2, 1)
    }

    /// `L - 1`.
    pub fn l_minus_one() -> Self {
        Self::monomial(2, 1) - Self::one()
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in it {
            out.add_term(k, c);
        }
        out
    }

    fn add_term(&mut self, k: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i64) -> BigInt {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    /// Constant integer value, if this is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    /// Evaluate at `L = q`.
    pub fn specialize(&self, q: u64) -> Result<Q, WallxError> {
        if q == 0 {
            return Err(WallxError::InvalidInput("specialize needs q >= 1".into()));
        }
        let root = integer_sqrt(q);
        let has_odd = self.terms.keys().any(|k| k.rem_euclid(2) == 1);
        if has_odd && root.is_none() {
            return Err(WallxError::OddHalfPower { q });
        }
        let mut acc = Q::zero();
        for (k, c) in &self.terms {
            let (base, e) = if k.rem_euclid(2) == 0 {
                (q, k / 2)
            } else {
                (root.expect("checked"), *k)
            };
            let b = Q::from_integer(BigInt::from(base));
            let p = if e >= 0 { pow_q(&b, e as u32) } else { pow_q(&b, (-e) as u32).recip() };
            acc += p * Q::from_integer(c.clone());
        }
        Ok(acc)
    }

    /// Exact division by `L - 1`, if possible.
    pub fn div_l_minus_one(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        // Each exponent parity class is a Laurent polynomial in L; divide it synthetically.
        let mut out = Self::zero();
        for parity in 0..2i64 {
            let class: Vec<(i64, &BigInt)> =
                self.terms.iter().filter(|(k, _)| k.rem_euclid(2) == parity).map(|(k, c)| (*k, c)).collect();
            let Some(&(lo, _)) = class.first() else { continue };
            let hi = class.last().unwrap().0;
            let mut running = BigInt::zero();
            let mut k = hi;
            while k > lo {
                running += self.coeff(k);
                out.add_term(k - 2, running.clone());
                k -= 2;
            }
            if !(running + self.coeff(lo)).is_zero() {
                return None;
            }
        }
        Some(out)
    }

    pub fn to_ratfunc(&self) -> RatFunc {
        RatFunc::from_laurent(self)
    }
}

fn integer_sqrt(q: u64) -> Option<u64> {
    let r = (q as f64).sqrt().round() as u64;
    (r.saturating_sub(1)..=r + 1).find(|s| s * s == q)
}

pub fn pow_q(b: &Q, e: u32) -> Q {
    let mut acc = Q::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

impl Add for LaurentScalar {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl Sub for LaurentScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for LaurentScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl Mul for LaurentScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                out.add_term(k1 + k2, c1 * c2);
            }
        }
        out
    }
}

impl Ring for LaurentScalar {
    fn zero() -> Self {
        LaurentScalar::zero()
    }
    fn one() -> Self {
        LaurentScalar::one()
    }
    fn is_zero(&self) -> bool {
        LaurentScalar::is_zero(self)
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match *k {
                0 => String::new(),
                2 => "L".to_string(),
                k if k % 2 == 0 => format!("L^{}", k / 2),
                k => format!("L^({}/2)", k),
            };
            if mono.is_empty() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}{}", abs, mono)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Dense univariate polynomial over `Q`, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    c: Vec<Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn constant(v: Q) -> Self {
        Self::from_coeffs(vec![v])
    }

    pub fn from_coeffs(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Self { c }
    }

    /// `t^k`.
    pub fn t_pow(k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = Q::one();
        Self { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn lead(&self) -> Option<&Q> {
        self.c.last()
    }

    /// Power of `t` dividing the polynomial.
    pub fn t_valuation(&self) -> usize {
        self.c.iter().take_while(|x| x.is_zero()).count()
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn shift_down(&self, k: usize) -> Self {
        Self::from_coeffs(self.c[k.min(self.c.len())..].to_vec())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i).cloned().unwrap_or_else(Q::zero);
            let b = o.c.get(i).cloned().unwrap_or_else(Q::zero);
            c.push(a + b);
        }
        Self::from_coeffs(c)
    }

    pub fn neg(&self) -> Self {
        Self { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::from_coeffs(c)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.lead().unwrap().clone();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut qv = vec![Q::zero(); r.len() - dd];
        for i in (0..qv.len()).rev() {
            let coef = &r[i + dd] / &lead;
            if !coef.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[i + j] -= &coef * b;
                }
            }
            qv[i] = coef;
        }
        (Self::from_coeffs(qv), Self::from_coeffs(r))
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    pub fn eval(&self, t: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.c.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }
}

/// Rational function in `t = L^{1/2}`, stored reduced with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        Self { num: Poly::zero(), den: Poly::constant(Q::one()) }
    }

    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    pub fn from_q(v: Q) -> Self {
        Self { num: Poly::constant(v), den: Poly::constant(Q::one()) }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_q(q_int(v))
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let l = d.lead().unwrap().recip();
        Self { num: n.scale(&l), den: d.scale(&l) }
    }

    /// `t^k` for any integer `k`.
    pub fn t_pow(k: i64) -> Self {
        if k >= 0 {
            Self { num: Poly::t_pow(k as usize), den: Poly::constant(Q::one()) }
        } else {
            Self { num: Poly::constant(Q::one()), den: Poly::t_pow((-k) as usize) }
        }
    }

    pub fn from_laurent(x: &LaurentScalar) -> Self {
        if x.is_zero() {
            return Self::zero();
        }
        let lo = x.terms().next().unwrap().0;
        let hi = x.terms().last().unwrap().0;
        let mut c = vec![Q::zero(); (hi - lo + 1) as usize];
        for (k, v) in x.terms() {
            c[(k - lo) as usize] = Q::from_integer(v.clone());
        }
        Self::new(Poly::from_coeffs(c), Poly::constant(Q::one())).mul_t_pow(lo)
    }

    fn mul_t_pow(self, k: i64) -> Self {
        if k == 0 {
            return self;
        }
        self * Self::t_pow(k)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale_q(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(s), den: self.den.clone() }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.clone() * o.recip()
    }

    /// Constant rational value, if this is one.
    pub fn as_q(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.num.degree() == Some(0) && self.den.degree() == Some(0) {
            Some(&self.num.coeffs()[0] / &self.den.coeffs()[0])
        } else {
            None
        }
    }

    /// Back to `Z[L^{±1/2}]` when the denominator is a monomial and coefficients are integral.
    pub fn as_laurent(&self) -> Option<LaurentScalar> {
        if self.is_zero() {
            return Some(LaurentScalar::zero());
        }
        let v = self.den.t_valuation();
        if self.den.degree() != Some(v) {
            return None;
        }
        let dl = self.den.lead().unwrap();
        let mut out = LaurentScalar::zero();
        for (i, c) in self.num.coeffs().iter().enumerate() {
            let c = c / dl;
            if !c.is_integer() {
                return None;
            }
            out = out + LaurentScalar::monomial_big(i as i64 - v as i64, c.to_integer());
        }
        Some(out)
    }

    /// Evaluate at a rational value of `t`.
    pub fn eval(&self, t: &Q) -> Option<Q> {
        let d = self.den.eval(t);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(t) / d)
        }
    }

    /// Dilogarithm weight `(-1)^{k-1} / (k (t^k - t^{-k}))`.
    pub fn dilog_weight(k: i64) -> Self {
        assert!(k >= 1);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let den = (Self::t_pow(k) - Self::t_pow(-k)).scale_q(&q_int(k));
        Self::from_int(sign).div(&den)
    }
}

impl Add for RatFunc {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den);
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }
}

impl Sub for RatFunc {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for RatFunc {
    type Output = Self;
    fn neg(self) -> Self {
        Self { num: self.num.neg(), den: self.den }
    }
}

impl Mul for RatFunc {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }
}

impl Ring for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}

fn fmt_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "t".into(),
            i => format!("t^{}", i),
        };
        let cs = if mono.is_empty() {
            c.to_string()
        } else if c.is_one() {
            String::new()
        } else if *c == -Q::one() {
            "-".into()
        } else {
            format!("{}*", c)
        };
        parts.push(format!("{}{}", cs, mono));
    }
    parts.join(" + ").replace("+ -", "- ")
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.as_laurent() {
            return write!(f, "{}", l);
        }
        write!(f, "({}) / ({})", fmt_poly(&self.num), fmt_poly(&self.den))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Polynomial in a fixed number of commuting symbols with Laurent coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Vec<u32>, LaurentScalar>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: LaurentScalar) -> Self {
        Self::term(Vec::new(), c)
    }

    /// The `i`-th symbol.
    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        Self::term(e, LaurentScalar::one())
    }

    pub fn term(mut exps: Vec<u32>, c: LaurentScalar) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &LaurentScalar)> {
        self.terms.iter()
    }

    fn add_term(&mut self, e: Vec<u32>, c: LaurentScalar) {
        if c.is_zero() {
            return;
        }
        let cur = self.terms.remove(&e).unwrap_or_default();
        let s = cur + c;
        if !s.is_zero() {
            self.terms.insert(e, s);
        }
    }
}

impl Add for MultiPoly {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (e, c) in o.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for MultiPoly {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for MultiPoly {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl Mul for MultiPoly {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let n = e1.len().max(e2.len());
                let mut e: Vec<u32> = (0..n)
                    .map(|i| e1.get(i).copied().unwrap_or(0) + e2.get(i).copied().unwrap_or(0))
                    .collect();
                while e.last() == Some(&0) {
                    e.pop();
                }
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl Ring for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn one() -> Self {
        MultiPoly::constant(LaurentScalar::one())
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 4] = ["x", "y", "z", "w"];
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: String = e
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > 0)
                    .map(|(i, p)| {
                        let n = NAMES.get(i).map(|s| s.to_string()).unwrap_or(format!("s{}", i));
                        if *p == 1 {
                            n
                        } else {
                            format!("{}^{}", n, p)
                        }
                    })
                    .collect();
                match (mono.is_empty(), c.as_integer()) {
                    (true, _) => format!("{}", c),
                    (false, Some(v)) if v.is_one() => mono,
                    (false, _) => format!("({}){}", c, mono),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Exact complex number with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussianRational {
    pub re: Q,
    pub im: Q,
}

impl GaussianRational {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(q_int(re), q_int(im))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    /// `Im(conj(self) * o)`: positive when `o` is counterclockwise of `self`.
    pub fn cross(&self, o: &Self) -> Q {
        &self.re * &o.im - &self.im * &o.re
    }

    pub fn dot(&self, o: &Self) -> Q {
        &self.re * &o.re + &self.im * &o.im
    }

    pub fn norm_sqr(&self) -> Q {
        self.dot(self)
    }

    /// Same ray through the origin.
    pub fn same_direction(&self, o: &Self) -> bool {
        self.cross(o).is_zero() && self.dot(o).is_positive()
    }

    /// Argument in units of π, as a float (display only).
    pub fn arg_pi(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(0.0);
        let im = self.im.to_f64().unwrap_or(0.0);
        im.atan2(re) / std::f64::consts::PI
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

/// Parse `"3/4"`, `"-2"` or `"0.25"` into an exact rational.
pub fn parse_q(s: &str) -> Result<Q, WallxError> {
    let s = s.trim();
    let bad = || WallxError::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_abs.is_empty() { BigInt::zero() } else { ip_abs.parse().map_err(|_| bad())? };
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let frac: BigInt = if fp.is_empty() { BigInt::zero() } else { fp.parse().map_err(|_| bad())? };
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(whole * &den + frac, den);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// `gcd` of integer slices, used for primitive vectors.
pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specialize_examples() {
        assert_eq!(LaurentScalar::l_minus_one().specialize(2).unwrap(), q_int(1));
        assert_eq!(LaurentScalar::l_minus_one().specialize(1).unwrap(), q_int(0));
        assert_eq!(LaurentScalar::monomial(1, 1).specialize(4).unwrap(), q_int(2));
        assert!(matches!(LaurentScalar::monomial(1, 1).specialize(2), Err(WallxError::OddHalfPower { q: 2 })));
        assert_eq!(LaurentScalar::monomial(-2, 3).specialize(3).unwrap(), q_int(1));
    }

    #[test]
    fn display_forms() {
        assert_eq!(LaurentScalar::l_minus_one().to_string(), "L - 1");
        assert_eq!(LaurentScalar::monomial(1, 1).to_string(), "L^(1/2)");
        assert_eq!(LaurentScalar::monomial(-1, -2).to_string(), "-2L^(-1/2)");
    }

    #[test]
    fn divide_by_l_minus_one() {
        let x = LaurentScalar::l_minus_one() * LaurentScalar::l_minus_one() * LaurentScalar::monomial(1, 3);
        let y = x.div_l_minus_one().unwrap();
        assert_eq!(y, LaurentScalar::l_minus_one() * LaurentScalar::monomial(1, 3));
        assert!(LaurentScalar::l().div_l_minus_one().is_none());
        assert!((LaurentScalar::l() + LaurentScalar::one()).div_l_minus_one().is_none());
    }

    #[test]
    fn ratfunc_roundtrip() {
        let x = LaurentScalar::monomial(-3, 2) + LaurentScalar::monomial(4, -1);
        assert_eq!(x.to_ratfunc().as_laurent().unwrap(), x);
        let w = RatFunc::dilog_weight(1);
        let back = w.recip();
        assert_eq!(back.as_laurent().unwrap(), LaurentScalar::monomial(1, 1) - LaurentScalar::monomial(-1, 1));
        assert!(w.as_laurent().is_none());
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_q("3/4").unwrap(), q_frac(3, 4));
        assert_eq!(parse_q("-0.25").unwrap(), q_frac(-1, 4));
        assert_eq!(parse_q("1.2").unwrap(), q_frac(6, 5));
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn multipoly_product() {
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let p = (x.clone() + y.clone()) * (x.clone() - y.clone());
        assert_eq!(p, x.clone() * x - y.clone() * y);
    }
}
