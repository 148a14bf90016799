//! Continued fractions, convergents, closest-return lengths and rigid
//! rotation partitions.
//!
//! Indexing: `q_0 = 1`, `q_1 = a_1`, `q_{n+1} = a_{n+1} q_n + q_{n-1}`, and
//! likewise `p_0 = 0`, `p_1 = 1`. Rotation numbers live in `(0, 1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{build_partition, AtomLabel, DynamicalPartition};
use crate::precision::{two_prod, ulp, DoubleDouble, PRECISION_CUTOFF};

const GOLDEN_DECIMAL: &str = "0.6180339887498948482045868343656381177203091798057628621354486227";
const SILVER_DECIMAL: &str = "0.4142135623730950488016887242096980785696718753769480731766797380";

/// Number of coefficients the named constants expand to.
pub const NAMED_CF_LENGTH: usize = 48;

/// Largest `|k|` accepted by [`rotation_orbit_point`].
pub const MAX_ORBIT_INDEX: i64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    coefficients: Vec<u64>,
    constant_type_bound: Option<u64>,
}

impl ContinuedFraction {
    pub fn new(coefficients: Vec<u64>, constant_type_bound: Option<u64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidContinuedFraction("no coefficients".into()));
        }
        if let Some(i) = coefficients.iter().position(|&a| a == 0) {
            return Err(Error::InvalidContinuedFraction(format!(
                "coefficient a_{} is zero",
                i + 1
            )));
        }
        if let Some(bound) = constant_type_bound {
            if bound == 0 {
                return Err(Error::InvalidContinuedFraction("bound must be positive".into()));
            }
            if let Some(i) = coefficients.iter().position(|&a| a > bound) {
                return Err(Error::InvalidContinuedFraction(format!(
                    "coefficient a_{} = {} exceeds the constant-type bound {}",
                    i + 1,
                    coefficients[i],
                    bound
                )));
            }
        }
        Ok(Self { coefficients, constant_type_bound })
    }

    pub fn from_coefficients(coefficients: Vec<u64>) -> Result<Self> {
        Self::new(coefficients, None)
    }

    pub fn golden(len: usize) -> Self {
        Self { coefficients: vec![1; len.max(1)], constant_type_bound: Some(1) }
    }

    pub fn silver(len: usize) -> Self {
        Self { coefficients: vec![2; len.max(1)], constant_type_bound: Some(2) }
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    /// `a_n` for `n >= 1`.
    pub fn a(&self, n: usize) -> u64 {
        self.coefficients[n - 1]
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn constant_type_bound(&self) -> Option<u64> {
        self.constant_type_bound
    }

    pub fn prefix(&self, n: usize) -> &[u64] {
        &self.coefficients[..n.min(self.coefficients.len())]
    }
}

/// The convergent `p_n / q_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub p: u64,
    pub q: u64,
    pub level: usize,
}

fn convergent_table(cf: &ContinuedFraction, n: usize) -> Result<(Vec<u64>, Vec<u64>)> {
    if n > cf.len() {
        return Err(Error::InsufficientDepth { requested: n, available: cf.len() });
    }
    let mut p = vec![0u64, 1];
    let mut q = vec![1u64, cf.a(1)];
    for level in 2..=n {
        let a = cf.a(level);
        let next = |v: &[u64]| {
            a.checked_mul(v[level - 1])
                .and_then(|x| x.checked_add(v[level - 2]))
                .ok_or(Error::ConvergentOverflow { level })
        };
        let pn = next(&p)?;
        let qn = next(&q)?;
        p.push(pn);
        q.push(qn);
    }
    p.truncate(n + 1);
    q.truncate(n + 1);
    Ok((p, q))
}

/// Convergents for levels `1..=n`.
pub fn convergents(cf: &ContinuedFraction, n: usize) -> Result<Vec<Convergent>> {
    let (p, q) = convergent_table(cf, n)?;
    Ok((1..=n).map(|level| Convergent { p: p[level], q: q[level], level }).collect())
}

/// A rotation number held both exactly (as a rational) and as a double-double.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationNumber {
    exact: BigRational,
    value: DoubleDouble,
}

impl RotationNumber {
    fn from_exact(exact: BigRational) -> Result<Self> {
        if !exact.is_positive() || exact >= BigRational::one() {
            return Err(Error::InvalidArgument("rotation number must lie in (0, 1)".into()));
        }
        let hi = exact.to_f64().unwrap_or(f64::NAN);
        let rest = &exact - BigRational::from_float(hi).expect("finite");
        let lo = rest.to_f64().unwrap_or(0.0);
        Ok(Self { exact, value: DoubleDouble::new(hi, lo) })
    }

    /// Parses a decimal literal such as `"0.6180339887..."`.
    pub fn from_decimal(s: &str) -> Result<Self> {
        let s = s.trim();
        let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
        let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
        if (int_part.is_empty() && frac_part.is_empty()) || !digits_ok(int_part) || !digits_ok(frac_part)
        {
            return Err(Error::InvalidDecimal(s.to_string()));
        }
        let all: String = format!("{int_part}{frac_part}");
        let numer: BigInt = all.parse().map_err(|_| Error::InvalidDecimal(s.to_string()))?;
        let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
        Self::from_exact(BigRational::new(numer, denom))
    }

    /// The rational `[0; a_1, ..., a_N]` by the backward recurrence.
    pub fn from_cf(cf: &ContinuedFraction) -> Result<Self> {
        let mut x = BigRational::zero();
        for &a in cf.coefficients().iter().rev() {
            x = (BigRational::from_integer(BigInt::from(a)) + x).recip();
        }
        Self::from_exact(x)
    }

    pub fn golden() -> Self {
        Self::from_decimal(GOLDEN_DECIMAL).expect("valid literal")
    }

    pub fn silver() -> Self {
        Self::from_decimal(SILVER_DECIMAL).expect("valid literal")
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn value(&self) -> DoubleDouble {
        self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.hi
    }

    /// `q rho - p`, exactly, rounded once.
    fn offset(&self, p: u64, q: u64) -> BigRational {
        &self.exact * BigRational::from_integer(BigInt::from(q)) - BigRational::from_integer(BigInt::from(p))
    }
}

/// Closest-return lengths `theta_n = |q_n rho - p_n|`, indexed from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnLengths {
    theta: Vec<f64>,
}

impl ReturnLengths {
    pub fn theta(&self, n: usize) -> f64 {
        self.theta[n]
    }

    /// Values for levels `1..=N`.
    pub fn levels(&self) -> &[f64] {
        &self.theta[1..]
    }

    pub fn depth(&self) -> usize {
        self.theta.len() - 1
    }

    /// Largest `|theta_{n+1} - (theta_{n-1} - a_{n+1} theta_n)|` in units of
    /// `ulp(theta_{n-1})`.
    pub fn recurrence_residual_ulps(&self, cf: &ContinuedFraction) -> f64 {
        (1..self.depth())
            .map(|n| {
                let a = cf.a(n + 1) as f64;
                let pred = self.theta[n - 1] - a * self.theta[n];
                (self.theta[n + 1] - pred).abs() / ulp(self.theta[n - 1])
            })
            .fold(0.0, f64::max)
    }
}

/// Checks that `rho` lies in the closed cylinder of `[a_1, ..., a_n]`.
fn check_consistent(rho: &RotationNumber, p: &[u64], q: &[u64], n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    let r = |a: u64, b: u64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let end = r(p[n], q[n]);
    let other = if n >= 1 { r(p[n] + p[n - 1], q[n] + q[n - 1]) } else { r(1, 1) };
    let (lo, hi) = if end <= other { (end, other) } else { (other, end) };
    if rho.exact() < &lo || rho.exact() > &hi {
        // find the first level that disagrees for the message
        let level = (1..=n)
            .find(|&m| {
                let e = r(p[m], q[m]);
                let o = r(p[m] + p[m - 1], q[m] + q[m - 1]);
                let (l, h) = if e <= o { (e, o) } else { (o, e) };
                rho.exact() < &l || rho.exact() > &h
            })
            .unwrap_or(n);
        return Err(Error::InconsistentRotation { level });
    }
    Ok(())
}

/// `theta_0..=theta_n` for `rho`, checked against the prefix of `cf`.
pub fn return_lengths(cf: &ContinuedFraction, rho: &RotationNumber, n: usize) -> Result<ReturnLengths> {
    let (p, q) = convergent_table(cf, n)?;
    check_consistent(rho, &p, &q, n)?;
    let mut theta = Vec::with_capacity(n + 1);
    for level in 0..=n {
        let off = rho.offset(p[level], q[level]);
        if off.is_zero() {
            return Err(Error::RationalRotation { level });
        }
        let t = off.abs().to_f64().unwrap_or(0.0);
        if t < PRECISION_CUTOFF {
            return Err(Error::DepthExceedsPrecision { level, length: t });
        }
        theta.push(t);
    }
    Ok(ReturnLengths { theta })
}

/// The fractional part `{k rho}` in `[0, 1)`.
pub fn rotation_orbit_point(rho: &RotationNumber, k: i64) -> Result<f64> {
    if k.abs() > MAX_ORBIT_INDEX {
        return Err(Error::PrecisionBudget { index: k });
    }
    if k == 0 {
        return Ok(0.0);
    }
    let v = rho.value();
    let kf = k as f64;
    let (p, e) = two_prod(kf, v.hi);
    let head = p - p.floor();
    let r = head + (e + kf * v.lo);
    let mut r = r - r.floor();
    if r >= 1.0 {
        r = 0.0;
    }
    Ok(r)
}

/// Combinatorial data of a target rotation number to a fixed depth: the
/// continued fraction, the exact rotation number, the convergents and the
/// closest-return lengths.
#[derive(Debug, Clone)]
pub struct RotationTarget {
    cf: ContinuedFraction,
    rho: RotationNumber,
    p: Vec<u64>,
    q: Vec<u64>,
    theta: ReturnLengths,
}

impl RotationTarget {
    pub fn new(cf: ContinuedFraction, rho: RotationNumber, depth: usize) -> Result<Self> {
        let (p, q) = convergent_table(&cf, depth)?;
        let theta = return_lengths(&cf, &rho, depth)?;
        Ok(Self { cf, rho, p, q, theta })
    }

    /// Uses as many levels as the precision allows, up to `max_depth`.
    pub fn deepest(cf: ContinuedFraction, rho: RotationNumber, max_depth: usize) -> Result<Self> {
        let mut depth = max_depth.min(cf.len());
        loop {
            match Self::new(cf.clone(), rho.clone(), depth) {
                Ok(t) => return Ok(t),
                Err(Error::DepthExceedsPrecision { level, .. } | Error::RationalRotation { level })
                    if level >= 2 && level <= depth =>
                {
                    depth = level - 1;
                }
                Err(e) => return Err(e),
            }
        }
    }

    pub fn golden(depth: usize) -> Result<Self> {
        Self::new(ContinuedFraction::golden(NAMED_CF_LENGTH), RotationNumber::golden(), depth)
    }

    pub fn silver(depth: usize) -> Result<Self> {
        Self::new(ContinuedFraction::silver(NAMED_CF_LENGTH), RotationNumber::silver(), depth)
    }

    pub fn cf(&self) -> &ContinuedFraction {
        &self.cf
    }

    pub fn rho(&self) -> &RotationNumber {
        &self.rho
    }

    pub fn depth(&self) -> usize {
        self.q.len() - 1
    }

    pub fn p(&self, n: usize) -> u64 {
        self.p[n]
    }

    pub fn q(&self, n: usize) -> u64 {
        self.q[n]
    }

    pub fn theta(&self, n: usize) -> f64 {
        self.theta.theta(n)
    }

    pub fn return_lengths(&self) -> &ReturnLengths {
        &self.theta
    }

    pub(crate) fn require(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.depth() {
            return Err(Error::InsufficientDepth { requested: n, available: self.depth() });
        }
        Ok(())
    }
}

/// The level-`n` dynamical partition of the rigid rotation by `rho`, with
/// endpoints `{k rho}` and exact closest-return lengths.
pub fn rotation_partition(target: &RotationTarget, n: usize) -> Result<DynamicalPartition> {
    target.require(n)?;
    let (q_prev, q) = (target.q(n - 1), target.q(n));
    let count = (q + q_prev) as usize;
    let positions = (0..count)
        .map(|k| rotation_orbit_point(target.rho(), k as i64))
        .collect::<Result<Vec<_>>>()?;
    let (short, lengthy) = (target.theta(n), target.theta(n - 1));
    build_partition(n, q_prev, q, &positions, |label, _| match label {
        AtomLabel::Short => short,
        AtomLabel::Lengthy => lengthy,
    })
}
