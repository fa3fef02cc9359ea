//! The growth constant `C` with `c_n ~ C^{2^n}`, and exact checks of the
//! inequalities behind it.
//!
//! Real quantities are [`HPReal`] values: a fixed-point midpoint together with
//! a radius that bounds the distance to the true value. Every operation widens
//! the radius enough to cover its own rounding, so a printed bound is a proof
//! obligation discharged by construction rather than an estimate.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::BigCount;

/// Extra decimal digits carried beyond the requested output precision.
pub const GUARD_DIGITS: usize = 10;

/// Binary precision for `digits` decimal digits.
pub fn bits_for_digits(digits: usize) -> u64 {
    // log2(10) < 3.33
    (digits as u64 * 333).div_ceil(100) + 8
}

/// Midpoint `mid / 2^prec` with radius `rad / 2^prec`: the true value lies in
/// `[mid - rad, mid + rad]` (in ulps).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPReal {
    mid: BigInt,
    rad: BigUint,
    prec: u64,
}

impl HPReal {
    pub fn zero(prec: u64) -> Self {
        HPReal {
            mid: BigInt::zero(),
            rad: BigUint::zero(),
            prec,
        }
    }

    pub fn one(prec: u64) -> Self {
        Self::from_int(&BigInt::one(), prec)
    }

    pub fn from_int(v: &BigInt, prec: u64) -> Self {
        HPReal {
            mid: v << prec,
            rad: BigUint::zero(),
            prec,
        }
    }

    pub fn from_uint(v: &BigUint, prec: u64) -> Self {
        Self::from_int(&BigInt::from(v.clone()), prec)
    }

    /// `num / den`, rounded, radius one ulp.
    pub fn from_ratio(num: &BigInt, den: &BigUint, prec: u64) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mid = (num << prec).div_floor(&BigInt::from(den.clone()));
        HPReal {
            mid,
            rad: BigUint::one(),
            prec,
        }
    }

    /// `10^-e` for `e ≥ 0`.
    pub fn pow10_neg(e: u32, prec: u64) -> Self {
        Self::from_ratio(&BigInt::one(), &BigUint::from(10u32).pow(e), prec)
    }

    pub fn prec(&self) -> u64 {
        self.prec
    }

    pub fn mid_ulps(&self) -> &BigInt {
        &self.mid
    }

    pub fn radius_ulps(&self) -> &BigUint {
        &self.rad
    }

    /// The radius as an exact value.
    pub fn radius(&self) -> HPReal {
        HPReal {
            mid: BigInt::from(self.rad.clone()),
            rad: BigUint::zero(),
            prec: self.prec,
        }
    }

    /// Upper bound on `|x|` in ulps.
    fn abs_upper(&self) -> BigUint {
        self.mid.magnitude() + &self.rad
    }

    /// Lower end of the enclosure, in ulps.
    pub fn lower_ulps(&self) -> BigInt {
        &self.mid - BigInt::from(self.rad.clone())
    }

    /// Upper end of the enclosure, in ulps.
    pub fn upper_ulps(&self) -> BigInt {
        &self.mid + BigInt::from(self.rad.clone())
    }

    /// True when every value in `self` is below every value in `other`.
    pub fn certainly_lt(&self, other: &HPReal) -> bool {
        self.same_prec(other);
        self.upper_ulps() < other.lower_ulps()
    }

    /// True when every value in `self` is at least zero.
    pub fn certainly_nonneg(&self) -> bool {
        self.lower_ulps() >= BigInt::zero()
    }

    /// True when the enclosure contains `other`'s midpoint or overlaps it.
    pub fn overlaps(&self, other: &HPReal) -> bool {
        self.same_prec(other);
        self.lower_ulps() <= other.upper_ulps() && other.lower_ulps() <= self.upper_ulps()
    }

    fn same_prec(&self, other: &HPReal) {
        assert_eq!(self.prec, other.prec, "mixed precisions");
    }

    pub fn add(&self, other: &HPReal) -> HPReal {
        self.same_prec(other);
        HPReal {
            mid: &self.mid + &other.mid,
            rad: &self.rad + &other.rad,
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &HPReal) -> HPReal {
        self.same_prec(other);
        HPReal {
            mid: &self.mid - &other.mid,
            rad: &self.rad + &other.rad,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> HPReal {
        HPReal {
            mid: -&self.mid,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> HPReal {
        HPReal {
            mid: self.mid.abs(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &HPReal) -> HPReal {
        self.same_prec(other);
        let p = self.prec;
        let mid = (&self.mid * &other.mid) >> p;
        let spread = self.mid.magnitude() * &other.rad + other.mid.magnitude() * &self.rad + &self.rad * &other.rad;
        HPReal {
            mid,
            rad: ceil_shr(&spread, p) + 1u32,
            prec: p,
        }
    }

    pub fn square(&self) -> HPReal {
        self.mul(self)
    }

    pub fn div(&self, other: &HPReal) -> Result<HPReal> {
        self.same_prec(other);
        let p = self.prec;
        let d = other.mid.magnitude();
        if *d <= other.rad {
            return Err(Error::Insufficient("divisor enclosure contains zero".into()));
        }
        let mid = (&self.mid << p).div_floor(&other.mid);
        // |x/y - x'/y'| ≤ (rx·|y'| + |x'|·ry) / (|y'|·(|y'| - ry))
        let num = (&self.rad * d + self.mid.magnitude() * &other.rad) << p;
        let den = d * (d - &other.rad);
        let rad = num.div_ceil(&den) + 1u32;
        Ok(HPReal { mid, rad, prec: p })
    }

    pub fn div_small(&self, d: u64) -> HPReal {
        assert!(d > 0);
        let mid = self.mid.div_floor(&BigInt::from(d));
        HPReal {
            mid,
            rad: self.rad.div_ceil(&BigUint::from(d)) + 1u32,
            prec: self.prec,
        }
    }

    pub fn mul_small(&self, k: u64) -> HPReal {
        HPReal {
            mid: &self.mid * k,
            rad: &self.rad * k,
            prec: self.prec,
        }
    }

    /// `x · 2^-k`.
    pub fn shr(&self, k: u64) -> HPReal {
        if k == 0 {
            return self.clone();
        }
        HPReal {
            mid: &self.mid >> k,
            rad: ceil_shr(&self.rad, k) + 1u32,
            prec: self.prec,
        }
    }

    /// The same enclosure at another precision.
    pub fn rescale(&self, prec: u64) -> HPReal {
        if prec >= self.prec {
            HPReal {
                mid: &self.mid << (prec - self.prec),
                rad: &self.rad << (prec - self.prec),
                prec,
            }
        } else {
            let k = self.prec - prec;
            HPReal {
                mid: &self.mid >> k,
                rad: ceil_shr(&self.rad, k) + 1u32,
                prec,
            }
        }
    }

    /// `x · 2^k`.
    pub fn shl(&self, k: u64) -> HPReal {
        HPReal {
            mid: &self.mid << k,
            rad: &self.rad << k,
            prec: self.prec,
        }
    }

    /// Natural logarithm; the enclosure must lie in `(0, ∞)`.
    pub fn ln(&self) -> Result<HPReal> {
        if self.mid.sign() != Sign::Plus || *self.mid.magnitude() <= self.rad {
            return Err(Error::Insufficient("logarithm of a non-positive enclosure".into()));
        }
        let p = self.prec;
        // x = 2^k · m with m ∈ [1, 2)
        let k = self.mid.bits() as i64 - 1 - p as i64;
        let m = if k >= 0 {
            self.shr(k as u64)
        } else {
            self.shl((-k) as u64)
        };
        let one = HPReal::one(p);
        let z = m.sub(&one).div(&m.add(&one))?;
        let mut out = atanh_series(&z).mul_small(2);
        if k != 0 {
            let ln2 = ln2(p);
            let scaled = ln2.mul_small(k.unsigned_abs());
            out = if k > 0 { out.add(&scaled) } else { out.sub(&scaled) };
        }
        Ok(out)
    }

    /// `e^x`.
    pub fn exp(&self) -> HPReal {
        let p = self.prec;
        // reduce to |y| < 2^-8, then square back
        let int_bits = (self.abs_upper() >> p).bits();
        let s = int_bits + 8;
        let y = self.shr(s);
        let mut sum = HPReal::one(p);
        let mut term = HPReal::one(p);
        let mut k = 1u64;
        loop {
            term = term.mul(&y).div_small(k);
            sum = sum.add(&term);
            if term.mid.magnitude() <= &BigUint::one() {
                break;
            }
            k += 1;
        }
        // remaining terms are below the last one in total
        sum.rad += term.abs_upper();
        for _ in 0..s {
            sum = sum.square();
        }
        sum
    }

    /// `x^(2^n)` by `n` squarings.
    pub fn pow2n(&self, n: u32) -> HPReal {
        let mut v = self.clone();
        for _ in 0..n {
            v = v.square();
        }
        v
    }

    /// Midpoint rounded to `digits` decimals.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let num = &self.mid * scale;
        let half = BigInt::one() << self.prec.saturating_sub(1);
        let q: BigInt = if self.prec == 0 { num } else { (num + half) >> self.prec };
        let neg = q.is_negative();
        let s = q.magnitude().to_str_radix(10);
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (ip, fp) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{ip}")
        } else {
            format!("{sign}{ip}.{fp}")
        }
    }

    /// An upper bound on `|x|` (midpoint magnitude plus radius) in scientific
    /// notation with `sig` significant digits, rounded up.
    pub fn upper_sci(&self, sig: usize) -> String {
        sci_upper(&self.abs_upper(), self.prec, sig.max(1))
    }

    /// The radius in scientific notation, rounded up.
    pub fn radius_sci(&self, sig: usize) -> String {
        sci_upper(&self.rad, self.prec, sig.max(1))
    }
}

impl fmt::Display for HPReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec as f64) * std::f64::consts::LOG10_2).floor() as usize;
        write!(f, "{} ± {}", self.to_decimal(digits.min(60)), self.radius_sci(3))
    }
}

fn ceil_shr(v: &BigUint, k: u64) -> BigUint {
    let q = v >> k;
    if (&q << k) == *v {
        q
    } else {
        q + 1u32
    }
}

fn sci_upper(num: &BigUint, prec: u64, sig: usize) -> String {
    if num.is_zero() {
        return "0".into();
    }
    let den = BigUint::one() << prec;
    let ten = BigUint::from(10u32);
    // x = num / den; find e with 10^e ≤ x < 10^(e+1)
    let mut e = ((num.bits() as f64 - prec as f64) * std::f64::consts::LOG10_2).floor() as i64 - 1;
    let ge_pow = |e: i64| -> bool {
        if e >= 0 {
            *num >= &den * ten.pow(e as u32)
        } else {
            num * ten.pow((-e) as u32) >= den
        }
    };
    while ge_pow(e + 1) {
        e += 1;
    }
    while !ge_pow(e) {
        e -= 1;
    }
    let shift = sig as i64 - 1 - e;
    let (n, d) = if shift >= 0 {
        (num * ten.pow(shift as u32), den)
    } else {
        (num.clone(), den * ten.pow((-shift) as u32))
    };
    let mut q = n.div_ceil(&d);
    if q >= ten.pow(sig as u32) {
        q = q.div_ceil(&ten);
        e += 1;
    }
    let s = q.to_str_radix(10);
    let (head, tail) = s.split_at(1);
    if tail.is_empty() {
        format!("{head}e{e}")
    } else {
        format!("{head}.{tail}e{e}")
    }
}

/// `Σ z^(2i+1) / (2i+1)` for `|z| ≤ 1/3`.
fn atanh_series(z: &HPReal) -> HPReal {
    let z2 = z.square();
    let mut power = z.clone();
    let mut sum = z.clone();
    let mut i = 1u64;
    loop {
        power = power.mul(&z2);
        let term = power.div_small(2 * i + 1);
        sum = sum.add(&term);
        if power.mid.magnitude() <= &BigUint::one() {
            break;
        }
        i += 1;
    }
    // the tail is at most an eighth of the last power
    sum.rad += power.abs_upper();
    sum
}

/// `ln 2 = 2·atanh(1/3)`.
pub fn ln2(prec: u64) -> HPReal {
    let third = HPReal::from_ratio(&BigInt::one(), &BigUint::from(3u32), prec);
    atanh_series(&third).mul_small(2)
}

/// `ln x` for `x ≥ 1` with radius below `10^-digits`.
pub fn log_big(x: &BigCount, digits: usize) -> Result<HPReal> {
    if x.is_zero() {
        return Err(Error::OutOfRange("logarithm of zero".into()));
    }
    let prec = bits_for_digits(digits + GUARD_DIGITS) + x.bits().max(1).ilog2() as u64;
    HPReal::from_uint(x, prec).ln()
}

/// Working precision for series truncated at `n_terms`.
fn working_prec(digits: usize, n_terms: usize) -> u64 {
    let extra = ((n_terms as f64) * std::f64::consts::LOG10_2).ceil() as usize;
    bits_for_digits(digits + GUARD_DIGITS + extra)
}

fn residuals_at(c: &[BigCount], prec: u64) -> Result<Vec<HPReal>> {
    if c.len() < 3 {
        return Err(Error::Insufficient(format!(
            "need c_0..c_2 at least, got {} terms",
            c.len()
        )));
    }
    let u: Vec<HPReal> = c
        .iter()
        .map(|v| {
            if v.is_zero() {
                return Err(Error::OutOfRange("c_n = 0".into()));
            }
            HPReal::from_uint(v, prec).ln()
        })
        .collect::<Result<_>>()?;
    let mut r = vec![HPReal::zero(prec), HPReal::zero(prec)];
    for n in 2..c.len() {
        r.push(u[n].sub(&u[n - 1].mul_small(2)));
    }
    Ok(r)
}

/// `r_n = ln c_n - 2·ln c_{n-1}` for `2 ≤ n < c.len()`; entries 0 and 1 are
/// zero placeholders.
pub fn residuals(c: &[BigCount], digits: usize) -> Result<Vec<HPReal>> {
    residuals_at(c, working_prec(digits, c.len()))
}

/// `ln(c_n / c_{n-1}^2)` computed from the exact ratio, an independent route
/// to the residuals.
pub fn residuals_by_ratio(c: &[BigCount], digits: usize) -> Result<Vec<HPReal>> {
    let prec = working_prec(digits, c.len());
    let mut r = vec![HPReal::zero(prec), HPReal::zero(prec)];
    for n in 2..c.len() {
        let den = &c[n - 1] * &c[n - 1];
        let q = HPReal::from_ratio(&BigInt::from(c[n].clone()), &den, prec);
        r.push(q.ln()?);
    }
    Ok(r)
}

/// Certified upper bound on `2^-n · 4 / c` as an enclosure; it also bounds
/// `2^-n · ln(1 + 4/c)`.
fn tail_bound(c: &BigCount, n: usize, prec: u64) -> HPReal {
    let den = c << n;
    HPReal::from_ratio(&BigInt::from(4u32), &den, prec)
}

#[derive(Clone, Debug)]
pub struct ConstantEstimate {
    /// `exp(Σ_{k=2}^N 2^-k r_k)`.
    pub c_value: HPReal,
    /// The truncation index `N`.
    pub terms_used: usize,
    /// Bound on the omitted exponent tail `Σ_{k>N} 2^-k r_k`.
    pub truncation_bound: HPReal,
    /// Certified bound on `|C - c_value|`: rounding radius plus truncation.
    pub error_bound: HPReal,
    pub digits: usize,
}

impl ConstantEstimate {
    /// Upper end of `error_bound`, for comparisons against `10^-e`.
    pub fn error_below_pow10(&self, e: u32) -> bool {
        self.error_bound
            .certainly_lt(&HPReal::pow10_neg(e, self.error_bound.prec()))
    }
}

/// `C = exp(Σ_{k=2}^N 2^-k r_k)` with `N = c.len() - 1`.
pub fn constant_c(c: &[BigCount], digits: usize) -> Result<ConstantEstimate> {
    if c.len() < 4 {
        return Err(Error::Insufficient(format!(
            "need c_0..c_3 at least, got {} terms",
            c.len()
        )));
    }
    let n = c.len() - 1;
    let prec = working_prec(digits, c.len());
    let r = residuals_at(c, prec)?;
    let mut s = HPReal::zero(prec);
    for (k, rk) in r.iter().enumerate().skip(2) {
        s = s.add(&rk.shr(k as u64));
    }
    let c_value = s.exp();
    let truncation_bound = tail_bound(&c[n - 1], n, prec);
    // C < 3/2 and e^t - 1 ≤ 2t for t ≤ 1/2, so the tail moves C by at most 3t
    let tail_upper = HPReal {
        mid: truncation_bound.upper_ulps(),
        rad: BigUint::zero(),
        prec,
    };
    let error_bound = c_value.radius().add(&tail_upper.mul_small(3));
    Ok(ConstantEstimate {
        c_value,
        terms_used: n,
        truncation_bound,
        error_bound,
        digits,
    })
}

/// `|a_n · C^(-2^n) - 1|`, evaluated as `|a_n / C^(2^n) - 1|`.
pub fn ratio_check(a: &[BigCount], est: &ConstantEstimate, n: usize) -> Result<HPReal> {
    let an = a
        .get(n)
        .ok_or_else(|| Error::OutOfRange(format!("a_{n} not available ({} terms)", a.len())))?;
    let prec = est.c_value.prec();
    // widen C by the truncation error so the result covers the true constant
    let c = HPReal {
        mid: est.c_value.mid_ulps().clone(),
        rad: est.error_bound.upper_ulps().magnitude().clone(),
        prec,
    };
    let power = c.pow2n(n as u32);
    let q = HPReal::from_uint(an, prec)
        .div(&power)
        .map_err(|_| Error::Insufficient(format!("precision too low for C^(2^{n})")))?;
    let dev = q.sub(&HPReal::one(prec)).abs();
    if dev.rad > (BigUint::one() << prec) {
        return Err(Error::Insufficient(format!(
            "precision too low for C^(2^{n}): radius exceeds 1 at {} digits",
            est.digits
        )));
    }
    Ok(dev)
}

/// One row of the exact check `c_{n-1}^2 ≤ c_n ≤ c_{n-1}^2 (1 + 4/c_{n-2})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SandwichRow {
    pub n: usize,
    /// `c_n - c_{n-1}^2`.
    pub lower_margin: BigInt,
    /// `c_{n-1}^2 (c_{n-2} + 4) - c_n c_{n-2}`.
    pub upper_margin: BigInt,
}

impl SandwichRow {
    pub fn ok(&self) -> bool {
        !self.lower_margin.is_negative() && !self.upper_margin.is_negative()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
}

impl SandwichReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(SandwichRow::ok)
    }
}

/// Exact integer check of both sandwich bounds for `2 ≤ n < c.len()`.
pub fn sandwich_check(c: &[BigCount]) -> SandwichReport {
    let int = |v: &BigCount| BigInt::from(v.clone());
    let rows = (2..c.len())
        .map(|n| {
            let sq = &c[n - 1] * &c[n - 1];
            let lower_margin = int(&c[n]) - int(&sq);
            let upper_margin = int(&(&sq * (&c[n - 2] + 4u32))) - int(&(&c[n] * &c[n - 2]));
            SandwichRow {
                n,
                lower_margin,
                upper_margin,
            }
        })
        .collect();
    SandwichReport { rows }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl InequalityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact checks of the growth inequalities used alongside the sandwich:
/// `c_{n-k}^(2^k) ≤ c_n`, `2^k c_{n-k} ≤ c_n` and
/// `c_{n-1} ≥ c_{n-2} · Σ_{k≤n-2} c_k`.
pub fn auxiliary_checks(c: &[BigCount]) -> Vec<InequalityReport> {
    let mut power = InequalityReport {
        name: "c_{n-k}^(2^k) <= c_n",
        checked: 0,
        failures: vec![],
    };
    for n in 0..c.len() {
        for k in 1..=n {
            // c_{n-k}^(2^k) by k squarings, stopping once it exceeds c_n
            let mut p = c[n - k].clone();
            for _ in 0..k {
                if p.is_one() {
                    break;
                }
                p = &p * &p;
                if p > c[n] {
                    break;
                }
            }
            power.checked += 1;
            if p > c[n] {
                power.failures.push(format!("n={n} k={k}"));
            }
        }
    }
    let mut doubling = InequalityReport {
        name: "2^k c_{n-k} <= c_n",
        checked: 0,
        failures: vec![],
    };
    for n in 2..c.len() {
        for k in 0..n {
            doubling.checked += 1;
            if (&c[n - k] << k) > c[n] {
                doubling.failures.push(format!("n={n} k={k}"));
            }
        }
    }
    let mut sums = InequalityReport {
        name: "c_{n-1} >= c_{n-2} * sum_{k<=n-2} c_k",
        checked: 0,
        failures: vec![],
    };
    let mut prefix = BigCount::zero();
    for n in 2..c.len() {
        prefix += &c[n - 2];
        sums.checked += 1;
        if &c[n - 2] * &prefix > c[n - 1] {
            sums.failures.push(format!("n={n}"));
        }
    }
    vec![power, doubling, sums]
}
