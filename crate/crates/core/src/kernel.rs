//! Radial convolution kernels and their autocorrelations.
//!
//! A field is synthesized as white noise convolved with a radial filter
//! `q`; the resulting covariance between two points at distance `r` is
//! the autocorrelation `kappa(r) = (q * q)(r)`. The built-in filter is
//! the Gaussian `q(r) = sqrt(2/pi) exp(-r^2)`, whose autocorrelation is
//! `kappa(r) = exp(-r^2 / 2)` with unit variance `kappa(0) = 1`.

use crate::error::Error;
use crate::Result;

/// Default truncation radius for the built-in Gaussian filter. The
/// filter mass beyond radius 5 is below 1e-21 of the total, far under
/// the 1e-12 budget the synthesis step assumes.
pub const DEFAULT_TRUNCATION: f64 = 5.0;

/// Relative mass of `q^2` allowed beyond the truncation radius.
const TAIL_MASS_BUDGET: f64 = 1e-12;

/// The radial profile of the white-noise filter.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// `q(r) = sqrt(2/pi) exp(-r^2)`, autocorrelation `exp(-r^2/2)`.
    BargmannFock,
    /// A tabulated radial profile: `profile[i]` is `q(i * dr)`,
    /// linearly interpolated in between and zero past the table end.
    CustomRadial { dr: f64, profile: Vec<f64> },
}

/// A validated kernel description.
///
/// `regularity_m` and `decay_beta` document the smoothness class and
/// polynomial decay rate the profile is assumed to satisfy; they gate
/// how many level-set length moments a campaign may request.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub regularity_m: u32,
    pub decay_beta: f64,
    pub truncation_radius: f64,
}

impl KernelSpec {
    /// The built-in Gaussian filter with default metadata.
    pub fn bargmann_fock() -> Self {
        KernelSpec {
            kind: KernelKind::BargmannFock,
            regularity_m: 5,
            decay_beta: 2.5,
            truncation_radius: DEFAULT_TRUNCATION,
        }
    }

    /// A tabulated radial filter. The truncation radius is the table end.
    pub fn custom_radial(
        dr: f64,
        profile: Vec<f64>,
        regularity_m: u32,
        decay_beta: f64,
    ) -> Result<Self> {
        if !(dr.is_finite() && dr > 0.0) {
            return Err(Error::Config(format!("profile spacing must be positive, got {dr}")));
        }
        if profile.len() < 2 {
            return Err(Error::Config("profile needs at least two samples".into()));
        }
        if profile.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("profile values must be finite and nonnegative".into()));
        }
        let spec = KernelSpec {
            truncation_radius: dr * (profile.len() - 1) as f64,
            kind: KernelKind::CustomRadial { dr, profile },
            regularity_m,
            decay_beta,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the structural invariants shared by both kinds.
    pub fn validate(&self) -> Result<()> {
        if self.regularity_m < 3 {
            return Err(Error::Config(format!(
                "regularity_m must be at least 3, got {}",
                self.regularity_m
            )));
        }
        if !(self.decay_beta.is_finite() && self.decay_beta > 0.0) {
            return Err(Error::Config(format!(
                "decay_beta must be positive, got {}",
                self.decay_beta
            )));
        }
        if !(self.truncation_radius.is_finite() && self.truncation_radius > 0.0) {
            return Err(Error::Config(format!(
                "truncation_radius must be positive, got {}",
                self.truncation_radius
            )));
        }
        match &self.kind {
            KernelKind::BargmannFock => {
                // Tail mass of q^2 beyond T is exp(-2 T^2) of the total.
                let tail = (-2.0 * self.truncation_radius * self.truncation_radius).exp();
                if tail >= TAIL_MASS_BUDGET {
                    return Err(Error::Config(format!(
                        "truncation_radius {} keeps {:.2e} of the filter mass outside \
                         the stencil (budget {TAIL_MASS_BUDGET:.0e})",
                        self.truncation_radius, tail
                    )));
                }
            }
            KernelKind::CustomRadial { dr, profile } => {
                let table_end = dr * (profile.len() - 1) as f64;
                if (table_end - self.truncation_radius).abs() > 1e-9 * table_end.max(1.0) {
                    return Err(Error::Config(
                        "truncation_radius must equal the profile table end".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Filter value `q(r)` at radial distance `r` (sign ignored).
///
/// Beyond the truncation radius the Gaussian profile is still reported
/// exactly (its mass there is negligible by `validate`); a tabulated
/// profile is zero past its table end.
pub fn eval_q(kernel: &KernelSpec, r: f64) -> f64 {
    let r = r.abs();
    match &kernel.kind {
        KernelKind::BargmannFock => (2.0 / std::f64::consts::PI).sqrt() * (-r * r).exp(),
        KernelKind::CustomRadial { dr, profile } => {
            let pos = r / dr;
            let i = pos.floor() as usize;
            if i + 1 >= profile.len() {
                if i == profile.len() - 1 && (pos - i as f64) == 0.0 {
                    profile[i]
                } else {
                    0.0
                }
            } else {
                let t = pos - i as f64;
                profile[i] * (1.0 - t) + profile[i + 1] * t
            }
        }
    }
}

/// Autocorrelation `kappa(r) = (q * q)(r)`, the covariance of the
/// synthesized field between points at distance `r`.
///
/// The Gaussian filter has the closed form `exp(-r^2/2)`; tabulated
/// profiles are integrated by planar Simpson quadrature with an
/// internal convergence check.
pub fn eval_kernel(kernel: &KernelSpec, r: f64) -> Result<f64> {
    let r = r.abs();
    match &kernel.kind {
        KernelKind::BargmannFock => Ok((-r * r / 2.0).exp()),
        KernelKind::CustomRadial { .. } => autocorrelation_quadrature(kernel, r),
    }
}

/// Planar Simpson quadrature of `int q(|y|) q(|x - y|) dy` for `x = (r, 0)`.
/// Both factors vanish outside the ball of radius `T`, so the domain
/// `[-T, T] x [-T, T]` captures the full integrand.
fn autocorrelation_quadrature(kernel: &KernelSpec, r: f64) -> Result<f64> {
    let t = kernel.truncation_radius;
    // Tabulated profiles are only piecewise smooth, so convergence is
    // judged on the scale of the variance kappa(0), not per value.
    let mut prev = simpson2d(kernel, r, t, 128);
    for n in [256usize, 512, 1024] {
        let cur = simpson2d(kernel, r, t, n);
        if (cur - prev).abs() <= 1e-6 * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "autocorrelation at r = {r} did not stabilize at 1024x1024 panels"
    )))
}

fn simpson2d(kernel: &KernelSpec, r: f64, t: f64, n: usize) -> f64 {
    debug_assert!(n % 2 == 0);
    let h = 2.0 * t / n as f64;
    let w1 = |i: usize| -> f64 {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut sum = 0.0;
    for iy in 0..=n {
        let y = -t + iy as f64 * h;
        let wy = w1(iy);
        let mut row = 0.0;
        for ix in 0..=n {
            let x = -t + ix as f64 * h;
            let qa = eval_q(kernel, x.hypot(y));
            if qa == 0.0 {
                continue;
            }
            let qb = eval_q(kernel, (x - r).hypot(y));
            if qb == 0.0 {
                continue;
            }
            row += w1(ix) * qa * qb;
        }
        sum += wy * row;
    }
    sum * h * h / 9.0
}

/// Second spectral moment along an axis, `lambda_2 = -kappa''(0)`.
///
/// For the Gaussian filter this is exactly 1. Tabulated profiles are
/// differentiated numerically with Richardson extrapolation; estimates
/// that disagree across step sizes reject the profile as too rough.
pub fn second_spectral_moment(kernel: &KernelSpec) -> Result<f64> {
    match &kernel.kind {
        KernelKind::BargmannFock => Ok(1.0),
        KernelKind::CustomRadial { .. } => {
            let k0 = eval_kernel(kernel, 0.0)?;
            // kappa is even, so kappa''(0) ~ 2 (kappa(s) - kappa(0)) / s^2.
            let second = |s: f64| -> Result<f64> {
                Ok(2.0 * (eval_kernel(kernel, s)? - k0) / (s * s))
            };
            let richardson = |s: f64| -> Result<f64> {
                Ok((4.0 * second(s / 2.0)? - second(s)?) / 3.0)
            };
            // Steps well above typical table spacings keep the 1/s^2
            // amplification of quadrature noise below the tolerance.
            let a = richardson(0.4)?;
            let b = richardson(0.2)?;
            let scale = b.abs().max(k0.abs()).max(1e-9);
            if (a - b).abs() > 5e-3 * scale {
                return Err(Error::Differentiation(format!(
                    "curvature estimates at the origin disagree ({a} vs {b}); \
                     the profile is too rough for a second spectral moment"
                )));
            }
            let lambda2 = -b;
            if !(lambda2.is_finite() && lambda2 > 0.0) {
                return Err(Error::Differentiation(format!(
                    "second spectral moment must be positive, got {lambda2}"
                )));
            }
            Ok(lambda2)
        }
    }
}

/// Expected length of the level set `{f = -level}` per unit area, for
/// the stationary field synthesized from `kernel`:
/// `sqrt(lambda_2) exp(-level^2 / (2 sigma^2)) / (2 sigma)` with
/// `sigma^2 = kappa(0)`.
pub fn kac_rice_expected_length(kernel: &KernelSpec, level: f64) -> Result<f64> {
    if !level.is_finite() {
        return Err(Error::Config(format!("level must be finite, got {level}")));
    }
    let var = eval_kernel(kernel, 0.0)?;
    if !(var.is_finite() && var > 0.0) {
        return Err(Error::Config(format!("kernel variance kappa(0) = {var} must be positive")));
    }
    let lambda2 = second_spectral_moment(kernel)?;
    let sigma = var.sqrt();
    Ok(lambda2.sqrt() * (-level * level / (2.0 * var)).exp() / (2.0 * sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent radial quadrature of `int q^2` = `2 pi int q(r)^2 r dr`.
    fn radial_mass(kernel: &KernelSpec, n: usize) -> f64 {
        let t = kernel.truncation_radius;
        let h = t / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let q = eval_q(kernel, r);
            sum += w * q * q * r;
        }
        2.0 * std::f64::consts::PI * sum * h / 3.0
    }

    #[test]
    fn gaussian_profile_values() {
        let k = KernelSpec::bargmann_fock();
        assert_abs_diff_eq!(eval_q(&k, 0.0), (2.0 / std::f64::consts::PI).sqrt(), epsilon = 1e-15);
        // Radial symmetry: the profile depends only on |r|.
        assert_eq!(eval_q(&k, 1.3), eval_q(&k, -1.3));
        assert!(eval_q(&k, 6.0) < 1e-15);
    }

    #[test]
    fn gaussian_filter_has_unit_mass() {
        let k = KernelSpec::bargmann_fock();
        assert_abs_diff_eq!(radial_mass(&k, 2000), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn gaussian_autocorrelation_closed_form() {
        let k = KernelSpec::bargmann_fock();
        assert_abs_diff_eq!(eval_kernel(&k, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        let half = (2.0_f64 * (2.0_f64).ln()).sqrt();
        assert_abs_diff_eq!(eval_kernel(&k, half).unwrap(), 0.5, epsilon = 1e-12);
        assert!(eval_kernel(&k, 4.0).unwrap() < eval_kernel(&k, 3.0).unwrap());
    }

    #[test]
    fn tabulated_gaussian_matches_closed_form() {
        let dr = 0.01;
        let n = (DEFAULT_TRUNCATION / dr) as usize;
        let profile: Vec<f64> = (0..=n)
            .map(|i| (2.0 / std::f64::consts::PI).sqrt() * (-(i as f64 * dr).powi(2)).exp())
            .collect();
        let k = KernelSpec::custom_radial(dr, profile, 4, 2.5).unwrap();
        for r in [0.0, 0.5, 1.0, 2.0] {
            assert_abs_diff_eq!(
                eval_kernel(&k, r).unwrap(),
                (-r * r / 2.0_f64).exp(),
                epsilon = 2e-4
            );
        }
        assert_abs_diff_eq!(second_spectral_moment(&k).unwrap(), 1.0, epsilon = 1e-2);
    }

    #[test]
    fn rough_profile_rejects_differentiation() {
        // Alternating slabs make kappa wildly non-quadratic at the origin.
        let profile: Vec<f64> = (0..=8).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let k = KernelSpec::custom_radial(0.25, profile, 3, 1.0).unwrap();
        let err = second_spectral_moment(&k);
        assert!(err.is_err(), "expected differentiation failure, got {err:?}");
    }

    #[test]
    fn custom_profile_validation() {
        assert!(KernelSpec::custom_radial(0.1, vec![1.0, -0.1], 3, 1.0).is_err());
        assert!(KernelSpec::custom_radial(0.0, vec![1.0, 0.5], 3, 1.0).is_err());
        assert!(KernelSpec::custom_radial(0.1, vec![1.0, 0.5], 2, 1.0).is_err());
        assert!(KernelSpec::custom_radial(0.1, vec![1.0, 0.5], 3, 0.0).is_err());
        let mut k = KernelSpec::bargmann_fock();
        k.truncation_radius = 2.0; // keeps 3e-4 of the mass outside
        assert!(k.validate().is_err());
    }

    #[test]
    fn expected_length_closed_form() {
        let k = KernelSpec::bargmann_fock();
        assert_abs_diff_eq!(kac_rice_expected_length(&k, 0.0).unwrap(), 0.5, epsilon = 1e-12);
        // Level sign is immaterial and larger |level| shortens the set.
        let up = kac_rice_expected_length(&k, 1.0).unwrap();
        let down = kac_rice_expected_length(&k, -1.0).unwrap();
        assert_abs_diff_eq!(up, down, epsilon = 1e-15);
        assert!(up < 0.5);
        assert_abs_diff_eq!(up, 0.5 * (-0.5_f64).exp(), epsilon = 1e-12);
    }
}
