use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::sturm::SturmSequence;
use super::Poly;
use crate::error::{Error, Result};
use crate::number::{self, int, Interval, Rational};

const LEAD_BITS: u64 = 48;

/// A real algebraic number given by a square-free polynomial and an
/// isolating interval `(lo, hi]` containing exactly one of its roots.
#[derive(Clone, Debug)]
pub struct IsolatedRoot {
    sturm: Arc<SturmSequence>,
    lo: Rational,
    hi: Rational,
    exact: Option<Rational>,
    // leading coefficient of the primitive integer form: rational roots are k / lead
    lead: Option<BigInt>,
}

impl IsolatedRoot {
    pub fn rational(x: Rational) -> Self {
        let p = Poly::new(vec![-x.clone(), Rational::one()]);
        IsolatedRoot {
            sturm: Arc::new(SturmSequence::of_square_free(p)),
            lo: &x - Rational::one(),
            hi: x.clone(),
            exact: Some(x),
            lead: Some(BigInt::one()),
        }
    }

    /// The largest real root of `p`.
    pub fn largest(p: &Poly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let sf = p.square_free()?;
        if sf.degree() == Some(0) {
            return Err(Error::NoRealRoot);
        }
        let bound = Rational::one()
            + sf.coeffs()
                .iter()
                .map(|c| c.abs())
                .max()
                .unwrap_or_else(Rational::zero);
        let ints = sf.primitive_integer();
        let lead = ints.last().cloned();
        let sturm = Arc::new(SturmSequence::of_square_free(sf));
        let zero = Rational::zero();
        let (mut lo, hi) = if sturm.count_above(&zero) > 0 {
            (zero, bound.clone())
        } else {
            (-bound.clone(), bound.clone())
        };
        if sturm.count_above(&lo) == 0 {
            return Err(Error::NoRealRoot);
        }
        let mut root = IsolatedRoot {
            sturm,
            lo: lo.clone(),
            hi,
            exact: None,
            lead,
        };
        // Bisect until only the largest root remains in (lo, hi].
        while root.sturm.count_between(&root.lo, &root.hi) > 1 {
            let mid = (&root.lo + &root.hi) / int(2);
            if root.sturm.count_between(&mid, &root.hi) > 0 {
                lo = mid;
                root.lo = lo.clone();
            } else {
                root.hi = mid;
            }
        }
        root.detect_exact();
        // Narrow far enough that any rational root is recognised.
        if let Some(lead) = root.lead.clone().filter(|l| l.bits() <= LEAD_BITS) {
            let lead_q = Rational::from_integer(lead);
            while root.exact.is_none() && root.width() * &lead_q >= Rational::one() {
                root.refine();
            }
        }
        Ok(root)
    }

    pub fn poly(&self) -> &Poly {
        self.sturm.base()
    }

    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn lo(&self) -> &Rational {
        self.exact.as_ref().unwrap_or(&self.lo)
    }

    pub fn hi(&self) -> &Rational {
        self.exact.as_ref().unwrap_or(&self.hi)
    }

    pub fn interval(&self) -> Interval {
        match &self.exact {
            Some(x) => Interval::exact(x.clone()),
            None => Interval::new(self.lo.clone(), self.hi.clone()),
        }
    }

    /// Float value, refined on a copy to about 1e-15 relative width.
    pub fn approx(&self) -> f64 {
        if let Some(x) = &self.exact {
            return number::to_f64(x);
        }
        let mut r = self.clone();
        let scale = r.hi.abs().max(r.lo.abs()).max(Rational::one());
        r.refine_to(&(scale * number::ratio(1, 1 << 52)));
        r.interval().midpoint_f64()
    }

    fn detect_exact(&mut self) {
        if self.exact.is_some() {
            return;
        }
        if self.poly().eval(&self.hi).is_zero() {
            self.exact = Some(self.hi.clone());
            return;
        }
        let Some(lead) = &self.lead else { return };
        if lead.bits() > LEAD_BITS {
            return;
        }
        let lead_q = Rational::from_integer(lead.clone());
        // Once the interval is shorter than 1/lead it holds at most one k/lead.
        if self.width() * &lead_q < Rational::one() {
            let k = number::floor(&(&self.hi * &lead_q));
            let c = Rational::new(k, lead.clone());
            if c > self.lo && self.poly().eval(&c).is_zero() {
                self.exact = Some(c);
            }
        }
    }

    fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// One bisection step.
    pub fn refine(&mut self) {
        if self.exact.is_some() {
            return;
        }
        let mid = (&self.lo + &self.hi) / int(2);
        if self.sturm.count_between(&self.lo, &mid) > 0 {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
        self.detect_exact();
    }

    /// Refines until the interval width is at most `tol` (or the root is exact).
    pub fn refine_to(&mut self, tol: &Rational) {
        while self.exact.is_none() && &self.width() > tol {
            self.refine();
        }
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        if let Some(v) = &self.exact {
            return v.cmp(x);
        }
        if x <= &self.lo {
            return Ordering::Greater;
        }
        if x > &self.hi {
            return Ordering::Less;
        }
        if self.poly().eval(x).is_zero() {
            return Ordering::Equal;
        }
        if self.sturm.count_between(&self.lo, x) > 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// Exact comparison of two algebraic numbers.
    pub fn cmp_root(&self, other: &IsolatedRoot) -> Ordering {
        if let Some(x) = &other.exact {
            return self.cmp_rational(x);
        }
        if let Some(x) = &self.exact {
            return other.cmp_rational(x).reverse();
        }
        let mut a = self.clone();
        let mut b = other.clone();
        let g = a.poly().gcd(b.poly());
        let common = (g.degree().unwrap_or(0) > 0).then(|| SturmSequence::of_square_free(g));
        loop {
            if let (Some(x), _) | (_, Some(x)) = (a.exact.clone(), b.exact.clone()) {
                return if a.exact.is_some() {
                    b.cmp_rational(&x).reverse()
                } else {
                    a.cmp_rational(&x)
                };
            }
            if a.hi <= b.lo {
                return Ordering::Less;
            }
            if b.hi <= a.lo {
                return Ordering::Greater;
            }
            if let Some(c) = &common {
                let lo = (&a.lo).max(&b.lo);
                let hi = (&a.hi).min(&b.hi);
                // A common root in the overlap is the unique root of both intervals.
                if c.count_between(lo, hi) > 0 {
                    return Ordering::Equal;
                }
            }
            a.refine();
            b.refine();
        }
    }
}

impl PartialEq for IsolatedRoot {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_root(other) == Ordering::Equal
    }
}

impl fmt::Display for IsolatedRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.interval())
    }
}

/// Isolating interval around the largest real root, width at most `tol`.
pub fn largest_real_root(p: &Poly, tol: &Rational) -> Result<Interval> {
    let mut root = IsolatedRoot::largest(p)?;
    root.refine_to(tol);
    Ok(root.interval())
}

/// A critical density `1 - 1/s` with `s > 0` algebraic (in practice `s = λ²`).
#[derive(Clone, Debug)]
pub struct CriticalDensity {
    s: IsolatedRoot,
}

impl CriticalDensity {
    pub fn from_s(s: IsolatedRoot) -> Self {
        debug_assert!(s.cmp_rational(&Rational::zero()) == Ordering::Greater);
        CriticalDensity { s }
    }

    pub fn exact(d: Rational) -> Self {
        assert!(d < Rational::one());
        CriticalDensity {
            s: IsolatedRoot::rational((Rational::one() - d).recip()),
        }
    }

    pub fn s(&self) -> &IsolatedRoot {
        &self.s
    }

    pub fn exact_value(&self) -> Option<Rational> {
        self.s.exact().map(|s| Rational::one() - s.recip())
    }

    /// Compares `1 - 1/s` with `d`.
    pub fn cmp_rational(&self, d: &Rational) -> Ordering {
        if d >= &Rational::one() {
            return Ordering::Less;
        }
        // 1 - 1/s is increasing in s > 0.
        self.s.cmp_rational(&(Rational::one() - d).recip())
    }

    pub fn cmp_density(&self, other: &CriticalDensity) -> Ordering {
        self.s.cmp_root(&other.s)
    }

    /// Rational enclosure of `1 - 1/s` of width at most `tol`.
    pub fn interval(&self, tol: &Rational) -> Interval {
        if let Some(d) = self.exact_value() {
            return Interval::exact(d);
        }
        let mut s = self.s.clone();
        while s.exact().is_none() && !s.lo().is_positive() {
            s.refine();
        }
        loop {
            if let Some(x) = s.exact() {
                return Interval::exact(Rational::one() - x.recip());
            }
            let lo = Rational::one() - s.lo().recip();
            let hi = Rational::one() - s.hi().recip();
            if &(&hi - &lo) <= tol {
                return Interval::new(lo, hi);
            }
            s.refine();
        }
    }

    pub fn approx(&self) -> f64 {
        1.0 - 1.0 / self.s.approx()
    }
}

impl fmt::Display for CriticalDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.interval(&number::ratio(1, 1_000_000_000_000)))
    }
}
