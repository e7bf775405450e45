//! Double-double arithmetic: unevaluated sums of two f64s giving roughly
//! 106 bits of significand.
//!
//! Nearest-plane walks over randomized bases amplify rounding error
//! multiplicatively in the walk depth, which overwhelms plain f64 near
//! dimension 300; the orthogonalization and the walk's inner products
//! therefore run in this representation.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact for |x| < 2^106.
    #[inline]
    pub fn from_i128(x: i128) -> Self {
        let hi = x as f64;
        let lo = (x - hi as i128) as f64;
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_i64(x: i64) -> Self {
        Self::from_i128(x as i128)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn sqrt_f64(self) -> f64 {
        self.to_f64().max(0.0).sqrt()
    }

    /// Nearest integer (as i128) and the fractional remainder. The lo part
    /// can carry whole units at large magnitudes, so it is rounded in a
    /// second step rather than assumed fractional.
    pub fn round_split(self) -> (i128, f64) {
        let r1 = self.hi.round();
        let rem = (self.hi - r1) + self.lo;
        let r2 = rem.round();
        let mut int = r1 as i128 + r2 as i128;
        let mut frac = rem - r2;
        if frac > 0.5 {
            int += 1;
            frac -= 1.0;
        } else if frac < -0.5 {
            int -= 1;
            frac += 1.0;
        }
        (int, frac)
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;

    #[inline]
    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;

    #[inline]
    fn sub(self, other: Dd) -> Dd {
        self + Dd {
            hi: -other.hi,
            lo: -other.lo,
        }
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;

    #[inline]
    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;

    #[inline]
    fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self - other * Dd::from_f64(q1);
        let q2 = r.hi / other.hi;
        let r2 = r - other * Dd::from_f64(q2);
        let q3 = r2.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        let (hi, lo2) = quick_two_sum(hi, lo + q3);
        Dd { hi, lo: lo2 }
    }
}
