use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::Poly;
use crate::error::{Error, Result};
use crate::number::Rational;

/// Sturm chain of a square-free polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    chain: Vec<Poly>,
}

fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

impl SturmSequence {
    /// Builds the chain of the square-free part of `p`.
    pub fn new(p: &Poly) -> Result<Self> {
        let p0 = p.square_free()?;
        Ok(Self::of_square_free(p0))
    }

    /// Builds the chain assuming `p` is already square-free and nonzero.
    pub(crate) fn of_square_free(p: Poly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().unwrap().is_zero() {
            let k = chain.len();
            let r = chain[k - 2].rem(&chain[k - 1]);
            // Positive rescaling keeps the sign pattern and the numbers small.
            let r = match r.leading() {
                Some(lc) => r.scale(&lc.abs().recip()),
                None => r,
            };
            chain.push(-&r);
        }
        chain.pop();
        SturmSequence { chain }
    }

    pub fn base(&self) -> &Poly {
        &self.chain[0]
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        variations(self.chain.iter().map(|p| {
            let lc = sign(p.leading().expect("chain entries are nonzero"));
            let odd = p.degree().unwrap() % 2 == 1;
            if positive || !odd {
                lc
            } else {
                -lc
            }
        }))
    }

    /// Distinct real roots in the half-open interval `(a, b]`.
    pub fn count_between(&self, a: &Rational, b: &Rational) -> usize {
        match a.cmp(b) {
            Ordering::Less => self.variations_at(a) - self.variations_at(b),
            _ => 0,
        }
    }

    /// Distinct real roots in `(a, +inf)`.
    pub fn count_above(&self, a: &Rational) -> usize {
        self.variations_at(a) - self.variations_at_infinity(true)
    }

    pub fn count_real(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

/// Number of distinct real roots of `p` in the closed interval `[0, 1]`.
pub fn count_roots_in_unit_interval(p: &Poly) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let seq = SturmSequence::new(p)?;
    let zero = Rational::zero();
    let at_zero = usize::from(p.eval(&zero).is_zero());
    Ok(at_zero + seq.count_between(&zero, &Rational::one()))
}

/// Whether `p(t) > 0` for every `t` in `[0, 1]`.
pub fn positive_on_unit_interval(p: &Poly) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(p.eval(&Rational::zero()).is_positive() && count_roots_in_unit_interval(p)? == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::ratio;

    #[test]
    fn unit_interval_counts() {
        assert_eq!(count_roots_in_unit_interval(&Poly::from_ints(&[1, -2])).unwrap(), 1);
        assert_eq!(count_roots_in_unit_interval(&Poly::from_ints(&[1, -1])).unwrap(), 1);
        assert_eq!(count_roots_in_unit_interval(&Poly::from_ints(&[0, 1])).unwrap(), 1);
        assert_eq!(
            count_roots_in_unit_interval(&Poly::from_ints(&[1, 0, -3, 0, 1])).unwrap(),
            1
        );
        // (t - 1/2)^2 (t - 1/3): double root counted once
        let p = &(&Poly::new(vec![ratio(-1, 2), ratio(1, 1)]) * &Poly::new(vec![ratio(-1, 2), ratio(1, 1)]))
            * &Poly::new(vec![ratio(-1, 3), ratio(1, 1)]);
        assert_eq!(count_roots_in_unit_interval(&p).unwrap(), 2);
        assert_eq!(
            count_roots_in_unit_interval(&Poly::zero()),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn positivity() {
        assert!(positive_on_unit_interval(&Poly::new(vec![ratio(1, 1), ratio(-4, 5)])).unwrap());
        assert!(!positive_on_unit_interval(&Poly::from_ints(&[1, -1])).unwrap());
        assert!(positive_on_unit_interval(&Poly::one()).unwrap());
        assert!(!positive_on_unit_interval(&Poly::from_ints(&[-1])).unwrap());
        // touches zero at 1/2 without a sign change
        let sq = Poly::from_ints(&[1, -4, 4]);
        assert!(!positive_on_unit_interval(&sq).unwrap());
    }

    #[test]
    fn total_counts() {
        let p = Poly::from_ints(&[0, -3, 0, 1]);
        let s = SturmSequence::new(&p).unwrap();
        assert_eq!(s.count_real(), 3);
        assert_eq!(s.count_above(&Rational::zero()), 1);
        assert_eq!(SturmSequence::new(&Poly::from_ints(&[1, 0, 1])).unwrap().count_real(), 0);
    }
}
