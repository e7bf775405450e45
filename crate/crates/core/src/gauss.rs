//! Discrete Gaussian sampling: the 1-dimensional integer sampler and the
//! randomized nearest-plane sampler over an integer lattice basis.
//!
//! The width convention matches `rho_sigma(x) = exp(-pi x^2 / sigma^2)`, so
//! the standard deviation is `sigma / sqrt(2 pi)`.
//!
//! Nearest-plane residuals are tracked in exact 128-bit integers and the
//! projection coefficients in double-double precision: on randomized bases
//! the walk's intermediate centers grow multiplicatively with depth, far
//! beyond what f64 alone can resolve.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::mat::{gso, Gso, IntMatrix, IntVector};
use rand::Rng;

/// Width of the rejection window in units of sigma. Mass outside is below
/// exp(-pi * 144), far under any statistical test here.
const TAIL_CUT: f64 = 12.0;

/// Retry budget for the rejection loop.
pub const REJECTION_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
pub struct GaussianParam {
    pub sigma: f64,
    pub center: f64,
}

impl GaussianParam {
    pub fn new(sigma: f64, center: f64) -> Result<Self> {
        if sigma <= 0.0 || !sigma.is_finite() {
            return Err(Error::ParamViolation(format!(
                "sigma {sigma} must be positive"
            )));
        }
        Ok(Self { sigma, center })
    }

    pub fn centered(sigma: f64) -> Result<Self> {
        Self::new(sigma, 0.0)
    }
}

/// Sample from the discrete Gaussian over Z by rejection against the
/// continuous envelope restricted to a 12-sigma window.
pub fn sample_gaussian_z<R: Rng + ?Sized>(p: &GaussianParam, rng: &mut R) -> Result<i64> {
    if !p.center.is_finite() || p.center.abs() > 1e15 {
        return Err(Error::OutOfRange(
            "gaussian center out of sampling range".into(),
        ));
    }
    let lo = (p.center - TAIL_CUT * p.sigma).ceil() as i64;
    let hi = (p.center + TAIL_CUT * p.sigma).floor() as i64;
    let (lo, hi) = if lo > hi {
        let r = p.center.round() as i64;
        (r, r)
    } else {
        (lo, hi)
    };
    let inv_sigma_sq = std::f64::consts::PI / (p.sigma * p.sigma);
    for _ in 0..REJECTION_BUDGET {
        let x = rng.gen_range(lo..=hi);
        let d = x as f64 - p.center;
        let accept = (-inv_sigma_sq * d * d).exp();
        if rng.gen::<f64>() < accept {
            return Ok(x);
        }
    }
    Err(Error::RetryBudget("discrete gaussian rejection"))
}

/// Randomized nearest-plane sampler over the lattice spanned by the columns
/// of a basis (full rank, possibly fewer columns than rows).
///
/// One instance holds the basis and its orthogonalization; each sample is a
/// backward pass of 1-dimensional draws. The returned point is assembled in
/// exact integer arithmetic from the drawn coefficients, so lattice
/// membership is exact regardless of floating point behavior.
pub struct KleinSampler {
    basis: IntMatrix,
    gso: Gso,
    pub s: f64,
}

impl KleinSampler {
    /// Checks the quality precondition `s >= gs_norm(basis) * slack`.
    pub fn new(basis: IntMatrix, s: f64, slack: f64) -> Result<Self> {
        let sampler = Self::new_unchecked(basis, s)?;
        let threshold = sampler.gso.max_norm() * slack;
        if s < threshold {
            return Err(Error::QualityTooLow { s, threshold });
        }
        Ok(sampler)
    }

    /// Skips the quality check; the sample is still a correct lattice point,
    /// only its distribution guarantee weakens.
    pub fn new_unchecked(basis: IntMatrix, s: f64) -> Result<Self> {
        if s <= 0.0 || !s.is_finite() {
            return Err(Error::ParamViolation(format!(
                "gaussian parameter {s} must be positive"
            )));
        }
        let g = gso(&basis)?;
        Ok(Self { basis, gso: g, s })
    }

    /// Sampler for an extension basis `[[core, W], [0, I]]` assembled from
    /// the core's orthogonalization: the appended columns orthogonalize to
    /// exact unit vectors (the core block spans the whole top space), so no
    /// full-dimension recomputation is needed.
    pub fn for_extension(ext_basis: IntMatrix, core_gso: &Gso, s: f64, slack: f64) -> Result<Self> {
        if s <= 0.0 || !s.is_finite() {
            return Err(Error::ParamViolation(format!(
                "gaussian parameter {s} must be positive"
            )));
        }
        let g = core_gso.extend_for_identity_tail(ext_basis.rows());
        if g.len() != ext_basis.cols() {
            return Err(Error::DimensionMismatch("extension sampler shape".into()));
        }
        let threshold = g.max_norm() * slack;
        if s < threshold {
            return Err(Error::QualityTooLow { s, threshold });
        }
        Ok(Self {
            basis: ext_basis,
            gso: g,
            s,
        })
    }

    pub fn gs_norm(&self) -> f64 {
        self.gso.max_norm()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn gso(&self) -> &Gso {
        &self.gso
    }

    /// Draw a lattice point close to `center` (Gaussian of parameter `s`
    /// around it), returning the coefficient vector and the point.
    pub fn sample_near<R: Rng + ?Sized>(
        &self,
        center: &[i64],
        rng: &mut R,
    ) -> Result<(Vec<i128>, IntVector)> {
        let t: Vec<i128> = center.iter().map(|&x| x as i128).collect();
        let coeff = klein_walk(&self.basis, &self.gso, self.s, t, rng)?;
        let point = assemble_point(&self.basis, &coeff)?;
        Ok((coeff, point))
    }

    /// Centered lattice Gaussian.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<i128>, IntVector)> {
        self.sample_near(&vec![0i64; self.basis.rows()], rng)
    }
}

/// Backward nearest-plane walk. `basis` may have fewer columns than rows
/// (sampling over a sublattice); `gso` must match its columns.
pub(crate) fn klein_walk<R: Rng + ?Sized>(
    basis: &IntMatrix,
    g: &Gso,
    s: f64,
    mut t: Vec<i128>,
    rng: &mut R,
) -> Result<Vec<i128>> {
    let dim = basis.rows();
    if t.len() != dim {
        return Err(Error::DimensionMismatch("klein center".into()));
    }
    let k = g.len();
    let mut coeff = vec![0i128; k];
    for i in (0..k).rev() {
        let bt = &g.btilde[i];
        let mut dot = Dd::ZERO;
        for (w, b) in t.iter().zip(bt) {
            dot = dot + Dd::from_i128(*w) * *b;
        }
        let c_i = dot / g.norms_sq[i];
        let (c_int, frac) = c_i.round_split();
        let sigma_i = s / g.norms_sq[i].sqrt_f64();
        let off = sample_gaussian_z(&GaussianParam::new(sigma_i, frac)?, rng)?;
        let z = c_int + off as i128;
        coeff[i] = z;
        if z != 0 {
            for (r, slot) in t.iter_mut().enumerate() {
                let sub = z
                    .checked_mul(basis.get(r, i) as i128)
                    .ok_or_else(|| Error::OutOfRange("nearest-plane residual overflow".into()))?;
                *slot = slot
                    .checked_sub(sub)
                    .ok_or_else(|| Error::OutOfRange("nearest-plane residual overflow".into()))?;
            }
        }
    }
    Ok(coeff)
}

pub(crate) fn assemble_point(basis: &IntMatrix, coeff: &[i128]) -> Result<IntVector> {
    let dim = basis.rows();
    let mut point = vec![0i128; dim];
    for (i, &z) in coeff.iter().enumerate() {
        if z != 0 {
            for (r, slot) in point.iter_mut().enumerate() {
                let add = z
                    .checked_mul(basis.get(r, i) as i128)
                    .ok_or_else(|| Error::OutOfRange("point assembly overflow".into()))?;
                *slot = slot
                    .checked_add(add)
                    .ok_or_else(|| Error::OutOfRange("point assembly overflow".into()))?;
            }
        }
    }
    let data: Vec<i64> = point
        .into_iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::OutOfRange("sampled point overflow".into())))
        .collect::<Result<_>>()?;
    Ok(IntVector::new(data))
}
