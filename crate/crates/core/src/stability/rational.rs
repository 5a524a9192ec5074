//! Exact fractions over arbitrary-precision integers.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    /// # Panics
    /// If `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(v: i64) -> Self {
        ExactRational(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// The exact value of a finite double.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(ExactRational)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// # Panics
    /// If `self` is zero.
    pub fn recip(&self) -> Self {
        ExactRational(self.0.recip())
    }

    /// Nearest double.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! forward_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for &ExactRational {
            type Output = ExactRational;
            fn $m(self, o: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&o.0))
            }
        }

        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, o: ExactRational) -> ExactRational {
                ExactRational(self.0.$m(o.0))
            }
        }
    )*};
}
forward_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}
