//! Wigner 3j symbols and the dipole-dipole angular matrix.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::Matrix3;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer};

use crate::error::{Error, Result};

/// An integer or half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `Some(n)` when the value is the integer `n`.
    pub const fn as_integer(self) -> Option<i32> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Projections `-j, -j+1, ..., j` for `self = j`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let j = self.0.max(-1);
        (0..=j).filter(move |_| j >= 0).map(move |k| HalfInt(-j + 2 * k))
    }

    /// Multiplicity `2j + 1`.
    pub fn multiplicity(self) -> usize {
        usize::try_from(self.0 + 1).unwrap_or(0)
    }
}

impl From<i32> for HalfInt {
    fn from(n: i32) -> Self {
        HalfInt::integer(n)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3"`, `"-2"`, `"3/2"`, `"-1/2"` and decimal halves like `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("not an integer or half-integer: {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "2" => Ok(HalfInt(num)),
                "1" => Ok(HalfInt::integer(num)),
                _ => Err(bad()),
            };
        }
        if let Ok(n) = s.parse::<i32>() {
            return Ok(HalfInt::integer(n));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        HalfInt::try_from(x).map_err(|_| bad())
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = Error;

    fn try_from(x: f64) -> Result<Self> {
        let t = 2.0 * x;
        if t.is_finite() && t.fract() == 0.0 && t.abs() < f64::from(i32::MAX) {
            Ok(HalfInt(t as i32))
        } else {
            Err(Error::invalid(format!("not an integer or half-integer: {x}")))
        }
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Float(f64),
            Text(String),
        }
        let parsed = match Repr::deserialize(deserializer)? {
            Repr::Int(n) => i32::try_from(n)
                .map(HalfInt::integer)
                .map_err(|_| Error::invalid(format!("out of range: {n}"))),
            Repr::Float(x) => HalfInt::try_from(x),
            Repr::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Largest `2j` evaluated in exact arithmetic.
pub const EXACT_TWICE_J_LIMIT: i32 = 40;

/// A 3j symbol in the form `sign * sqrt(square)` with rational `square`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exact3j {
    pub sign: i8,
    pub square: BigRational,
}

impl Exact3j {
    pub fn zero() -> Self {
        Exact3j { sign: 0, square: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let sq = self.square.to_f64().unwrap_or(f64::NAN);
        f64::from(self.sign) * sq.sqrt()
    }
}

/// Integer arguments of the Racah sum, all in units of 1 (not doubled).
struct RacahArgs {
    /// Triangle factorial arguments and the `J + 1` denominator.
    tri: [i64; 3],
    total_plus_one: i64,
    /// `(j ± m)!` arguments.
    jm: [i64; 6],
    k_min: i64,
    k_max: i64,
    /// Offsets for the six denominator factorials in the summand.
    offsets: [(i64, i64); 5],
    phase_odd: bool,
}

fn validate(js: [HalfInt; 3], ms: [HalfInt; 3]) -> Result<Option<RacahArgs>> {
    for (j, m) in js.iter().zip(ms.iter()) {
        if j.0 < 0 {
            return Err(Error::invalid(format!("negative angular momentum j = {j}")));
        }
        if (j.0 - m.0).rem_euclid(2) != 0 {
            return Err(Error::invalid(format!("j - m must be an integer (j = {j}, m = {m})")));
        }
    }
    for (j, m) in js.iter().zip(ms.iter()) {
        if m.0.abs() > j.0 {
            return Ok(None);
        }
    }
    if ms[0].0 + ms[1].0 + ms[2].0 != 0 {
        return Ok(None);
    }
    let [a, b, c] = js.map(|j| i64::from(j.0));
    if c > a + b || c < (a - b).abs() {
        return Ok(None);
    }
    if (a + b + c) % 2 != 0 {
        return Ok(None);
    }
    let [m1, m2, m3] = ms.map(|m| i64::from(m.0));
    let h = |x: i64| x / 2;
    let tri = [h(a + b - c), h(a - b + c), h(-a + b + c)];
    let total_plus_one = h(a + b + c) + 1;
    let jm = [h(a + m1), h(a - m1), h(b + m2), h(b - m2), h(c + m3), h(c - m3)];
    // k! (j3-j2+k+m1)! (j3-j1+k-m2)! (j1+j2-j3-k)! (j1-k-m1)! (j2-k+m2)!
    let offsets = [
        (1, h(c - b + m1)),
        (1, h(c - a - m2)),
        (-1, h(a + b - c)),
        (-1, h(a - m1)),
        (-1, h(b + m2)),
    ];
    let k_min = 0.max(-offsets[0].1).max(-offsets[1].1);
    let k_max = offsets[2].1.min(offsets[3].1).min(offsets[4].1);
    let phase_odd = h(a - b - m3).rem_euclid(2) == 1;
    Ok(Some(RacahArgs { tri, total_plus_one, jm, k_min, k_max, offsets, phase_odd }))
}

fn factorials() -> &'static Vec<BigUint> {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n_max = (3 * EXACT_TWICE_J_LIMIT as usize) / 2 + 2;
        let mut v = Vec::with_capacity(n_max + 1);
        v.push(BigUint::one());
        for n in 1..=n_max {
            let next = &v[n - 1] * BigUint::from(n);
            v.push(next);
        }
        v
    })
}

fn fact(n: i64) -> BigInt {
    BigInt::from(factorials()[usize::try_from(n).expect("negative factorial")].clone())
}

fn ln_fact(n: i64) -> f64 {
    // ln Γ(n+1) via Stirling with enough terms for n ≥ 10; small n summed directly.
    if n < 10 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
        - 1.0 / (1680.0 * x.powi(7))
}

fn racah_exact(args: &RacahArgs) -> Exact3j {
    let mut sum = BigRational::zero();
    for k in args.k_min..=args.k_max {
        let mut den = fact(k);
        for &(s, off) in &args.offsets {
            den *= fact(off + s * k);
        }
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Exact3j::zero();
    }
    let mut prefactor = BigRational::new(
        args.tri.iter().map(|&n| fact(n)).product(),
        fact(args.total_plus_one),
    );
    prefactor *= BigRational::from_integer(args.jm.iter().map(|&n| fact(n)).product());
    let mut sign: i8 = if sum.is_negative() { -1 } else { 1 };
    if args.phase_odd {
        sign = -sign;
    }
    Exact3j { sign, square: &sum * &sum * prefactor }
}

fn racah_float(args: &RacahArgs) -> f64 {
    let ln_pre = 0.5
        * (args.tri.iter().map(|&n| ln_fact(n)).sum::<f64>() - ln_fact(args.total_plus_one)
            + args.jm.iter().map(|&n| ln_fact(n)).sum::<f64>());
    let mut sum = 0.0;
    for k in args.k_min..=args.k_max {
        let ln_den = ln_fact(k) + args.offsets.iter().map(|&(s, off)| ln_fact(off + s * k)).sum::<f64>();
        let term = (ln_pre - ln_den).exp();
        sum += if k % 2 == 0 { term } else { -term };
    }
    if args.phase_odd {
        -sum
    } else {
        sum
    }
}

/// Exact Wigner 3j symbol, available when every `2j` is at most [`EXACT_TWICE_J_LIMIT`].
///
/// Returns exact zero when selection rules fail.
pub fn wigner_3j_exact(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<Exact3j> {
    if j1.0.max(j2.0).max(j3.0) > EXACT_TWICE_J_LIMIT {
        return Err(Error::invalid(format!(
            "exact 3j limited to 2j <= {EXACT_TWICE_J_LIMIT}"
        )));
    }
    Ok(match validate([j1, j2, j3], [m1, m2, m3])? {
        Some(args) => racah_exact(&args),
        None => Exact3j::zero(),
    })
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`.
///
/// Exact arithmetic is used up to `2j = 40`, log-factorial floating point above.
/// Returns exactly zero when the triangle rule fails, `|m| > j`, or `Σm ≠ 0`.
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> Result<f64> {
    let Some(args) = validate([j1, j2, j3], [m1, m2, m3])? else {
        return Ok(0.0);
    };
    if j1.0.max(j2.0).max(j3.0) <= EXACT_TWICE_J_LIMIT {
        Ok(racah_exact(&args).to_f64())
    } else {
        Ok(racah_float(&args))
    }
}

/// Convenience wrapper taking doubled values, panicking on malformed input.
pub(crate) fn w3j_twice(t: [i32; 6]) -> f64 {
    wigner_3j(
        HalfInt(t[0]),
        HalfInt(t[1]),
        HalfInt(t[2]),
        HalfInt(t[3]),
        HalfInt(t[4]),
        HalfInt(t[5]),
    )
    .expect("internally generated 3j arguments are well formed")
}

/// Angular part of the dipole-dipole interaction in spherical components.
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleAngularMatrix {
    /// Rows and columns ordered `q = -1, 0, +1`.
    pub entries: Matrix3<Complex64>,
    pub theta: f64,
    pub phi: f64,
}

impl DipoleAngularMatrix {
    /// Entry for spherical components `q, q'` in `{-1, 0, 1}`.
    pub fn get(&self, q: i32, qp: i32) -> Complex64 {
        assert!(q.abs() <= 1 && qp.abs() <= 1, "spherical index out of range");
        self.entries[((q + 1) as usize, (qp + 1) as usize)]
    }
}

pub fn dipole_angular_matrix(theta: f64, phi: f64) -> DipoleAngularMatrix {
    let (s, c) = theta.sin_cos();
    let e1 = Complex64::from_polar(1.0, phi);
    let e2 = Complex64::from_polar(1.0, 2.0 * phi);
    let off = 3.0 / std::f64::consts::SQRT_2 * c * s;
    let p2 = 1.0 - 3.0 * c * c;
    let r = |x: f64| Complex64::new(x, 0.0);
    let entries = Matrix3::new(
        e2 * (-1.5 * s * s),
        e1 * (-off),
        r(p2 / 2.0),
        e1 * (-off),
        r(p2),
        e1.conj() * off,
        r(p2 / 2.0),
        e1.conj() * off,
        e2.conj() * (-1.5 * s * s),
    );
    DipoleAngularMatrix { entries, theta, phi }
}
