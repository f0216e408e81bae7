//! Exact scalars over `F_p`, `F_{p^2}` and `Q`.
//!
//! Every [`Scalar`] carries enough of its field to do arithmetic on its own,
//! so matrices and vectors are plain `Vec<Scalar>`. Values are kept in
//! canonical form at all times (residues reduced, fractions normalized), which
//! makes `==` and `Hash` structural.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Description of a field of characteristic different from 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FieldSpec {
    Prime { p: u64 },
    /// `F_p[t]/(t^2 - nonsquare)`.
    PrimeSquare { p: u64, nonsquare: u64 },
    Rational,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Euler's criterion for a nonzero residue.
fn is_residue(a: u64, p: u64) -> bool {
    a % p == 0 || pow_mod(a, (p - 1) / 2, p) == 1
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidField(format!("{p} is not an odd prime")));
        }
        Ok(FieldSpec::Prime { p })
    }

    pub fn prime_square(p: u64, nonsquare: u64) -> Result<Self> {
        Self::prime(p)?;
        let n = nonsquare % p;
        if n == 0 || is_residue(n, p) {
            return Err(Error::InvalidField(format!("{nonsquare} is a square mod {p}")));
        }
        Ok(FieldSpec::PrimeSquare { p, nonsquare: n })
    }

    pub fn rational() -> Self {
        FieldSpec::Rational
    }

    /// Checks the invariants of a spec that may have come from deserialization.
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldSpec::Prime { p } => Self::prime(p).map(|_| ()),
            FieldSpec::PrimeSquare { p, nonsquare } => {
                let v = Self::prime_square(p, nonsquare)?;
                if v != *self {
                    return Err(Error::InvalidField("nonsquare not reduced".into()));
                }
                Ok(())
            }
            FieldSpec::Rational => Ok(()),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match *self {
            FieldSpec::Prime { p } | FieldSpec::PrimeSquare { p, .. } => p,
            FieldSpec::Rational => 0,
        }
    }

    /// Number of elements, `None` for `Q`.
    pub fn order(&self) -> Option<u64> {
        match *self {
            FieldSpec::Prime { p } => Some(p),
            FieldSpec::PrimeSquare { p, .. } => Some(p * p),
            FieldSpec::Rational => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            FieldSpec::Prime { p } => Scalar(Repr::Fp { v: reduce_i64(n, p), p }),
            FieldSpec::PrimeSquare { p, nonsquare } => Scalar(Repr::Fp2 {
                a: reduce_i64(n, p),
                b: 0,
                p,
                t: nonsquare,
            }),
            FieldSpec::Rational => Scalar(Repr::Q(BigRational::from_integer(BigInt::from(n)))),
        }
    }

    /// `num/den` in this field; `den` must be invertible.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        self.from_i64(num).div_checked(&self.from_i64(den))
    }

    /// `a + b t` in `F_{p^2}`.
    pub fn ext(&self, a: i64, b: i64) -> Result<Scalar> {
        match *self {
            FieldSpec::PrimeSquare { p, nonsquare } => Ok(Scalar(Repr::Fp2 {
                a: reduce_i64(a, p),
                b: reduce_i64(b, p),
                p,
                t: nonsquare,
            })),
            _ => Err(Error::UnsupportedExtension),
        }
    }

    pub fn from_rational(&self, q: BigRational) -> Result<Scalar> {
        match self {
            FieldSpec::Rational => Ok(Scalar(Repr::Q(q))),
            _ => {
                let p = BigInt::from(self.characteristic());
                let n = q.numer().mod_floor(&p);
                let d = q.denom().mod_floor(&p);
                let n: i64 = i64::try_from(n).map_err(|_| Error::FieldMismatch)?;
                let d: i64 = i64::try_from(d).map_err(|_| Error::FieldMismatch)?;
                self.from_ratio(n, d)
            }
        }
    }

    /// All elements, in a fixed order starting with 0, 1; `None` for `Q`.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match *self {
            FieldSpec::Prime { p } => Some((0..p).map(|v| Scalar(Repr::Fp { v, p })).collect()),
            FieldSpec::PrimeSquare { p, nonsquare } => {
                let mut out = Vec::with_capacity((p * p) as usize);
                for b in 0..p {
                    for a in 0..p {
                        out.push(Scalar(Repr::Fp2 { a, b, p, t: nonsquare }));
                    }
                }
                Some(out)
            }
            FieldSpec::Rational => None,
        }
    }

    /// Nonzero elements up to the ones used for sampling over `Q`.
    pub fn nonzero_elements(&self) -> Option<Vec<Scalar>> {
        self.elements().map(|v| v.into_iter().filter(|s| !s.is_zero()).collect())
    }

    /// A uniformly random element; over `Q` a small integer in `[-4, 4]`.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match *self {
            FieldSpec::Prime { p } => Scalar(Repr::Fp { v: rng.gen_range(0..p), p }),
            FieldSpec::PrimeSquare { p, nonsquare } => Scalar(Repr::Fp2 {
                a: rng.gen_range(0..p),
                b: rng.gen_range(0..p),
                p,
                t: nonsquare,
            }),
            FieldSpec::Rational => self.from_i64(rng.gen_range(-4..=4)),
        }
    }

    /// The degree-2 extension with the smallest positive non-residue.
    pub fn quadratic_extension(&self) -> Result<FieldSpec> {
        match *self {
            FieldSpec::Prime { p } => {
                let n = (2..p).find(|&a| !is_residue(a, p)).ok_or(Error::UnsupportedExtension)?;
                FieldSpec::prime_square(p, n)
            }
            _ => Err(Error::UnsupportedExtension),
        }
    }

    /// Lifts a scalar of the base prime field into this field.
    pub fn embed(&self, s: &Scalar) -> Result<Scalar> {
        match (&s.0, self) {
            (Repr::Fp { v, p }, FieldSpec::PrimeSquare { p: q, nonsquare }) if p == q => {
                Ok(Scalar(Repr::Fp2 { a: *v, b: 0, p: *p, t: *nonsquare }))
            }
            _ if s.field() == *self => Ok(s.clone()),
            _ => Err(Error::FieldMismatch),
        }
    }

    /// Parses a single scalar token from its JSON form.
    pub fn scalar_from_json(&self, v: &serde_json::Value) -> Result<Scalar> {
        match v {
            serde_json::Value::Number(n) => {
                let i = n.as_i64().ok_or_else(|| Error::Parse(format!("not an integer: {n}")))?;
                Ok(self.from_i64(i))
            }
            serde_json::Value::String(s) => self.parse_scalar(s),
            serde_json::Value::Array(a) if a.len() == 2 => {
                let x = a[0].as_i64().ok_or_else(|| Error::Parse("bad pair".into()))?;
                let y = a[1].as_i64().ok_or_else(|| Error::Parse("bad pair".into()))?;
                self.ext(x, y)
            }
            other => Err(Error::Parse(format!("bad scalar {other}"))),
        }
    }

    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad scalar {s:?}")))?;
        let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad scalar {s:?}")))?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.from_rational(BigRational::new(n, d))
    }
}

fn reduce_i64(n: i64, p: u64) -> u64 {
    n.rem_euclid(p as i64) as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Fp { v: u64, p: u64 },
    Fp2 { a: u64, b: u64, p: u64, t: u64 },
    Q(BigRational),
}

/// An exact field element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self.0 {
            Repr::Fp { p, .. } => FieldSpec::Prime { p },
            Repr::Fp2 { p, t, .. } => FieldSpec::PrimeSquare { p, nonsquare: t },
            Repr::Q(_) => FieldSpec::Rational,
        }
    }

    pub fn same_field(&self, other: &Scalar) -> bool {
        match (&self.0, &other.0) {
            (Repr::Fp { p, .. }, Repr::Fp { p: q, .. }) => p == q,
            (Repr::Fp2 { p, t, .. }, Repr::Fp2 { p: q, t: s, .. }) => p == q && t == s,
            (Repr::Q(_), Repr::Q(_)) => true,
            _ => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Fp { v, .. } => *v == 0,
            Repr::Fp2 { a, b, .. } => *a == 0 && *b == 0,
            Repr::Q(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Fp { v, .. } => *v == 1,
            Repr::Fp2 { a, b, .. } => *a == 1 && *b == 0,
            Repr::Q(q) => q.is_one(),
        }
    }

    /// The residue of an `F_p` element.
    pub fn residue(&self) -> Option<u64> {
        match self.0 {
            Repr::Fp { v, .. } => Some(v),
            _ => None,
        }
    }

    /// `(a, b)` for `a + b t` in `F_{p^2}`.
    pub fn ext_parts(&self) -> Option<(u64, u64)> {
        match self.0 {
            Repr::Fp2 { a, b, .. } => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Q(q) => Some(q),
            _ => None,
        }
    }

    /// True when the element lies in the prime subfield.
    pub fn in_base_field(&self) -> bool {
        !matches!(self.0, Repr::Fp2 { b, .. } if b != 0)
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Fp { v, p } => Scalar(Repr::Fp { v: pow_mod(*v, p - 2, *p), p: *p }),
            Repr::Fp2 { a, b, p, t } => {
                let norm = (a * a % p + p - t * (b * b % p) % p) % p;
                let ni = pow_mod(norm, p - 2, *p);
                Scalar(Repr::Fp2 { a: a * ni % p, b: (p - b * ni % p) % p, p: *p, t: *t })
            }
            Repr::Q(q) => Scalar(Repr::Q(q.recip())),
        })
    }

    pub fn div_checked(&self, other: &Scalar) -> Result<Scalar> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Whether this element is a square in its own field.
    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        match &self.0 {
            Repr::Q(q) => q.is_positive() && perfect_sqrt(q.numer()).is_some() && perfect_sqrt(q.denom()).is_some(),
            _ => {
                let q = self.field().order().unwrap();
                self.pow((q - 1) / 2).is_one()
            }
        }
    }

    /// A square root in the same field, if one exists.
    pub fn sqrt(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if let Repr::Q(q) = &self.0 {
            if !q.is_positive() {
                return None;
            }
            let n = perfect_sqrt(q.numer())?;
            let d = perfect_sqrt(q.denom())?;
            return Some(Scalar(Repr::Q(BigRational::new(n, d))));
        }
        if !self.is_square() {
            return None;
        }
        // Tonelli-Shanks in the cyclic group of order q - 1.
        let field = self.field();
        let q = field.order().unwrap();
        let mut s = 0;
        let mut odd = q - 1;
        while odd % 2 == 0 {
            odd /= 2;
            s += 1;
        }
        let z = field.elements().unwrap().into_iter().find(|e| !e.is_zero() && !e.is_square())?;
        let mut m = s;
        let mut c = z.pow(odd);
        let mut t = self.pow(odd);
        let mut r = self.pow((odd + 1) / 2);
        while !t.is_one() {
            let mut i = 0;
            let mut tt = t.clone();
            while !tt.is_one() {
                tt = &tt * &tt;
                i += 1;
            }
            let b = c.pow(1 << (m - i - 1));
            m = i;
            c = &b * &b;
            t = &t * &c;
            r = &r * &b;
        }
        Some(r)
    }

    /// JSON form: integers for `F_p`, `[a, b]` for `F_{p^2}`, `"num/den"` for `Q`.
    pub fn to_json(&self) -> serde_json::Value {
        match &self.0 {
            Repr::Fp { v, .. } => serde_json::Value::from(*v),
            Repr::Fp2 { a, b, .. } => serde_json::json!([a, b]),
            Repr::Q(q) => serde_json::Value::from(format_rational(q)),
        }
    }

    fn add_impl(&self, o: &Scalar) -> Scalar {
        match (&self.0, &o.0) {
            (Repr::Fp { v, p }, Repr::Fp { v: w, p: q }) if p == q => {
                Scalar(Repr::Fp { v: (v + w) % p, p: *p })
            }
            (Repr::Fp2 { a, b, p, t }, Repr::Fp2 { a: c, b: d, p: q, t: s }) if p == q && t == s => {
                Scalar(Repr::Fp2 { a: (a + c) % p, b: (b + d) % p, p: *p, t: *t })
            }
            (Repr::Q(x), Repr::Q(y)) => Scalar(Repr::Q(x + y)),
            _ => panic!("field mismatch in scalar addition"),
        }
    }

    fn mul_impl(&self, o: &Scalar) -> Scalar {
        match (&self.0, &o.0) {
            (Repr::Fp { v, p }, Repr::Fp { v: w, p: q }) if p == q => {
                Scalar(Repr::Fp { v: v * w % p, p: *p })
            }
            (Repr::Fp2 { a, b, p, t }, Repr::Fp2 { a: c, b: d, p: q, t: s }) if p == q && t == s => {
                let re = (a * c % p + (b * d % p) * t % p) % p;
                let im = (a * d % p + b * c % p) % p;
                Scalar(Repr::Fp2 { a: re, b: im, p: *p, t: *t })
            }
            (Repr::Q(x), Repr::Q(y)) => Scalar(Repr::Q(x * y)),
            _ => panic!("field mismatch in scalar multiplication"),
        }
    }

    fn neg_impl(&self) -> Scalar {
        match &self.0 {
            Repr::Fp { v, p } => Scalar(Repr::Fp { v: (p - v) % p, p: *p }),
            Repr::Fp2 { a, b, p, t } => Scalar(Repr::Fp2 { a: (p - a) % p, b: (p - b) % p, p: *p, t: *t }),
            Repr::Q(q) => Scalar(Repr::Q(-q)),
        }
    }
}

fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Fp { v, .. } => write!(f, "{v}"),
            Repr::Fp2 { a, b, .. } => {
                if *b == 0 {
                    write!(f, "{a}")
                } else {
                    write!(f, "{a}+{b}t")
                }
            }
            Repr::Q(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                $body(self, o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                $body(&self, &o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                $body(&self, o)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                $body(self, &o)
            }
        }
    };
}

binop!(Add, add, |a: &Scalar, b: &Scalar| a.add_impl(b));
binop!(Sub, sub, |a: &Scalar, b: &Scalar| a.add_impl(&b.neg_impl()));
binop!(Mul, mul, |a: &Scalar, b: &Scalar| a.mul_impl(b));
binop!(Div, div, |a: &Scalar, b: &Scalar| a
    .div_checked(b)
    .expect("division by zero or field mismatch"));

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_impl()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_impl()
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = self.add_impl(o);
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = self.add_impl(&o.neg_impl());
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = self.mul_impl(o);
    }
}

/// Which field a root of [`solve_quadratic`] lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootField {
    BaseField,
    QuadraticExtension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub value: Scalar,
    pub field: RootField,
}

/// All roots of `a x^2 + b x + c`.
///
/// Roots come back in the base field when the discriminant is a square there.
/// Otherwise prime fields report the two conjugate roots in the quadratic
/// extension and `Q` reports [`Error::IrrationalDiscriminant`]. A double root
/// is listed once.
pub fn solve_quadratic(a: &Scalar, b: &Scalar, c: &Scalar) -> Result<Vec<Root>> {
    if !a.same_field(b) || !a.same_field(c) {
        return Err(Error::FieldMismatch);
    }
    let field = a.field();
    let base = |value: Scalar| Root { value, field: RootField::BaseField };
    if a.is_zero() {
        if b.is_zero() {
            if c.is_zero() {
                return Err(Error::Inconsistent("all coefficients zero".into()));
            }
            return Err(Error::NoRoot);
        }
        return Ok(vec![base(-(c / b))]);
    }
    let two = field.from_i64(2);
    let disc = b * b - field.from_i64(4) * a * c;
    let denom = &two * a;
    if let Some(r) = disc.sqrt() {
        let x1 = (-b + &r) / &denom;
        let x2 = (-b - &r) / &denom;
        if x1 == x2 {
            return Ok(vec![base(x1)]);
        }
        return Ok(vec![base(x1), base(x2)]);
    }
    match field {
        FieldSpec::Prime { .. } => {
            let ext = field.quadratic_extension()?;
            let (a, b, disc) = (ext.embed(a)?, ext.embed(b)?, ext.embed(&disc)?);
            let r = disc.sqrt().ok_or(Error::Inconsistent("no square root in extension".into()))?;
            let denom = ext.from_i64(2) * &a;
            let x1 = (-&b + &r) / &denom;
            let x2 = (-&b - &r) / &denom;
            Ok(vec![
                Root { value: x1, field: RootField::QuadraticExtension },
                Root { value: x2, field: RootField::QuadraticExtension },
            ])
        }
        FieldSpec::Rational => Err(Error::IrrationalDiscriminant),
        FieldSpec::PrimeSquare { .. } => Err(Error::UnsupportedExtension),
    }
}
