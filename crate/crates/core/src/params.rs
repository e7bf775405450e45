//! Public parameter sets: dimensions, the Gaussian ladder, norm bounds, and
//! every consistency check the rest of the scheme relies on.
//!
//! The ladder is kept in exact rationals (denominator 16) so the delegation
//! quality chain `s_{i+1} >= s_i * sqrt((i+2) m) * slack` can be verified by
//! integer arithmetic alone. The decryption margin
//! `q > 4 (B + m B ceil(s_ell log2 m))` is a hard load-time invariant: a
//! parameter set that fails it cannot open honestly generated signatures
//! and is rejected outright.

use crate::error::{Error, Result};
use crate::zq::Modulus;
use num_rational::Ratio;

/// Slack factor standing in for the unfixed super-constant in the sampler
/// quality preconditions.
pub const QUALITY_SLACK: i64 = 2;

/// Recorded constant for the trapdoor construction: generated bases must
/// satisfy `gs_norm <= C * sqrt(n log2 q)` (measured, with headroom).
pub const TRAPGEN_C: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    pub n: usize,
    pub q: Modulus,
    pub m: usize,
    pub ell: usize,
    pub d: usize,
    pub k: usize,
    pub kappa: usize,
    /// Gaussian ladder s_ell ..= s_k, exact rationals.
    ladder: Vec<Ratio<i64>>,
    pub beta: i64,
    pub b_noise: i64,
    pub slack: i64,
}

impl Params {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        q: u64,
        m: usize,
        ell: usize,
        d: usize,
        kappa: usize,
        s_ell: Ratio<i64>,
        b_noise: i64,
    ) -> Result<Self> {
        let q = Modulus::new(q)?;
        if !n.is_power_of_two() {
            return Err(Error::ParamViolation(format!(
                "n = {n} must be a power of two so log2 n is exact"
            )));
        }
        if ell == 0 || d == 0 || ell > 32 || d > 32 {
            return Err(Error::ParamViolation(format!(
                "tree depths ell={ell}, d={d} unusable"
            )));
        }
        if kappa == 0 {
            return Err(Error::ParamViolation("kappa must be positive".into()));
        }
        let kq = crate::trapdoor::gadget_len(q.get());
        if m < 2 * n * kq {
            return Err(Error::ParamViolation(format!(
                "m = {m} below 2 n ceil(log2 q) = {}",
                2 * n * kq
            )));
        }
        if b_noise < 1 {
            return Err(Error::ParamViolation(
                "noise bound B must be at least 1".into(),
            ));
        }
        if s_ell <= Ratio::from_integer(0) {
            return Err(Error::ParamViolation("s_ell must be positive".into()));
        }
        let k = ell + d;

        // Ladder: s_{i+1} = s_i * ceil16(slack * sqrt((i+2) m)), so the
        // quality chain holds with exact equality margin.
        let mut ladder = Vec::with_capacity(d + 1);
        ladder.push(s_ell);
        for i in ell..k {
            let mult = ladder_multiplier(i, m);
            let next = ladder.last().unwrap() * mult;
            ladder.push(next);
        }
        // Chain re-check in exact arithmetic.
        for (idx, i) in (ell..k).enumerate() {
            let lhs = ladder[idx + 1] / (ladder[idx] * Ratio::from_integer(QUALITY_SLACK));
            let need = Ratio::from_integer(((i + 2) * m) as i64);
            if lhs * lhs < need {
                return Err(Error::ParamViolation(format!(
                    "ladder step s_{} -> s_{} below the delegation quality chain",
                    i,
                    i + 1
                )));
            }
        }

        let log2n = n.trailing_zeros() as i64;
        let s_k = *ladder.last().unwrap();
        let beta = (s_k * Ratio::from_integer(log2n)).ceil().to_integer();
        if beta < 1 {
            return Err(Error::ParamViolation(
                "beta must be positive (n >= 4)".into(),
            ));
        }

        let params = Self {
            n,
            q,
            m,
            ell,
            d,
            k,
            kappa,
            ladder,
            beta,
            b_noise,
            slack: QUALITY_SLACK,
        };

        // Decryption margin, the hard correctness invariant.
        let margin = params.analytic_error_bound();
        if q.get() as i128 <= 4 * margin as i128 {
            return Err(Error::ParamViolation(format!(
                "q = {} does not clear the decryption margin 4 (B + m B ceil(s_ell log2 m)) = {}",
                q.get(),
                4 * margin as i128
            )));
        }
        Ok(params)
    }

    /// Gaussian parameter for level i (ell <= i <= k).
    pub fn s(&self, i: usize) -> Ratio<i64> {
        assert!(
            i >= self.ell && i <= self.k,
            "ladder index {i} outside {}..={}",
            self.ell,
            self.k
        );
        self.ladder[i - self.ell]
    }

    pub fn s_f64(&self, i: usize) -> f64 {
        let r = self.s(i);
        *r.numer() as f64 / *r.denom() as f64
    }

    pub fn slack_f64(&self) -> f64 {
        self.slack as f64
    }

    pub fn periods(&self) -> u64 {
        1u64 << self.d
    }

    pub fn users(&self) -> u64 {
        1u64 << self.ell
    }

    pub fn log2_n(&self) -> u32 {
        self.n.trailing_zeros()
    }

    /// Cap on identity-key column entries: ceil(s_ell * log2 m).
    pub fn extract_norm_cap(&self) -> i64 {
        let s_ell = self.s_f64(self.ell);
        (s_ell * (self.m as f64).log2()).ceil() as i64
    }

    /// The worst-case opening error bound `B + m B ceil(s_ell log2 m)`.
    pub fn analytic_error_bound(&self) -> i64 {
        self.b_noise + (self.m as i64) * self.b_noise * self.extract_norm_cap()
    }

    /// Decomposition width for the signature bound beta.
    pub fn p_beta(&self) -> usize {
        (63 - (self.beta as u64).leading_zeros()) as usize + 1
    }

    /// Decomposition width for the noise bound B.
    pub fn p_b(&self) -> usize {
        (63 - (self.b_noise as u64).leading_zeros()) as usize + 1
    }

    /// Toy preset: N = 4 users, T = 4 periods.
    ///
    /// q is the largest 19-bit prime and m the matching gadget width; the
    /// extraction parameter 100 covers measured trapdoor quality (worst
    /// gs ~ 49 over seeds) times the slack, and the decryption margin
    /// invariant holds with room to spare.
    pub fn small() -> Self {
        Self::new(4, 524287, 152, 2, 2, 16, Ratio::from_integer(100), 1).expect("small preset")
    }

    /// Deeper preset: N = 8 users, T = 8 periods, same arithmetic shape.
    pub fn medium() -> Self {
        Self::new(4, 524287, 152, 3, 3, 16, Ratio::from_integer(100), 1).expect("medium preset")
    }

    /// Report presets at fixed n, q with k in {4, 6, 8} (d fixed at 2 so the
    /// ladder length, and hence the decomposition width, stays put).
    pub fn report_preset(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::ParamViolation("report preset needs k >= 3".into()));
        }
        Self::new(4, 524287, 152, k - 2, 2, 16, Ratio::from_integer(100), 1)
    }
}

/// Smallest rational with denominator 16 at or above `slack * sqrt((i+2) m)`:
/// numerator is the integer square root ceiling of `16^2 slack^2 (i+2) m`.
fn ladder_multiplier(i: usize, m: usize) -> Ratio<i64> {
    let target = (QUALITY_SLACK * QUALITY_SLACK) as i128 * 256 * ((i + 2) * m) as i128;
    let mut lo: i128 = 1;
    let mut hi: i128 = 1 << 40;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if mid * mid >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ratio::new(lo as i64, 16)
}

/// Exact ceiling helper for rationals scaled by integers, used in tests.
pub fn ceil_ratio(r: Ratio<i64>) -> i64 {
    r.ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_load() {
        let p = Params::small();
        assert_eq!(p.periods(), 4);
        assert_eq!(p.users(), 4);
        assert_eq!(p.k, 4);
        let p = Params::medium();
        assert_eq!(p.periods(), 8);
        assert_eq!(p.users(), 8);
    }

    #[test]
    fn ladder_chain_holds_exactly() {
        let p = Params::small();
        for i in p.ell..p.k {
            let ratio = p.s(i + 1) / (p.s(i) * Ratio::from_integer(QUALITY_SLACK));
            assert!(ratio * ratio >= Ratio::from_integer(((i + 2) * p.m) as i64));
        }
    }

    #[test]
    fn beta_matches_ladder_top() {
        let p = Params::small();
        let expect = ceil_ratio(p.s(p.k) * Ratio::from_integer(p.log2_n() as i64));
        assert_eq!(p.beta, expect);
    }

    #[test]
    fn margin_invariant_rejects_small_q() {
        // q = 257 with its matching m = 80 can never clear the margin.
        let r = Params::new(4, 257, 80, 2, 2, 16, Ratio::from_integer(3), 1);
        assert!(matches!(r, Err(Error::ParamViolation(_))));
    }

    #[test]
    fn margin_invariant_holds_for_presets() {
        let p = Params::small();
        assert!((p.q.get() as i128) > 4 * p.analytic_error_bound() as i128);
    }

    #[test]
    fn rejects_m_below_gadget_threshold() {
        assert!(Params::new(4, 524287, 100, 2, 2, 16, Ratio::from_integer(100), 1).is_err());
    }

    // Every sigma the scheme draws at keeps its mass inside
    // ceil(sigma * log2 n) at well under the 1% rate.
    #[test]
    fn ladder_sigmas_have_bounded_tails() {
        use rand::SeedableRng;
        let p = Params::small();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(77);
        for i in p.ell..=p.k {
            let sigma = p.s_f64(i);
            let bound = (sigma * p.log2_n() as f64).ceil();
            let gp = crate::gauss::GaussianParam::centered(sigma).unwrap();
            let n = 10_000;
            let over = (0..n)
                .filter(|_| {
                    crate::gauss::sample_gaussian_z(&gp, &mut rng)
                        .unwrap()
                        .abs() as f64
                        > bound
                })
                .count();
            assert!(over * 100 < n, "level {i}: tail {over}/{n}");
        }
    }

    #[test]
    fn report_presets_share_shape() {
        for k in [4usize, 6, 8] {
            let p = Params::report_preset(k).unwrap();
            assert_eq!(p.k, k);
            assert_eq!(p.q.get(), 524287);
            assert_eq!(p.m, 152);
            assert_eq!(p.d, 2);
        }
    }
}
