//! Laser and probe pulses defined through their vector potentials.
//!
//! A(t) = -A_max cos²(u/T) sin(ω u) with u = t - t_center, compactly
//! supported on |u| < πT/2, and E(t) = -A'(t) evaluated analytically.
//! A_max = E_max/ω, so E_max is the peak of the electric-field envelope.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    /// Peak of the electric-field envelope (atomic units).
    pub e_max: f64,
    /// Carrier angular frequency (atomic units).
    pub omega: f64,
    /// Envelope parameter T (atomic units); support is t_center ± πT/2.
    pub t_env: f64,
    /// Center time (atomic units).
    pub t_center: f64,
}

impl PulseParams {
    pub fn new(e_max: f64, omega: f64, t_env: f64, t_center: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::Config(format!("pulse omega must be > 0, got {omega}")));
        }
        if !(t_env > 0.0) {
            return Err(Error::Config(format!(
                "pulse envelope T must be > 0 (empty support), got {t_env}"
            )));
        }
        if e_max < 0.0 {
            return Err(Error::Config(format!("pulse e_max must be >= 0, got {e_max}")));
        }
        Ok(Self {
            e_max,
            omega,
            t_env,
            t_center,
        })
    }

    pub fn a_max(&self) -> f64 {
        self.e_max / self.omega
    }

    /// (start, end) of the compact support.
    pub fn support(&self) -> (f64, f64) {
        let half = 0.5 * std::f64::consts::PI * self.t_env;
        (self.t_center - half, self.t_center + half)
    }

    pub fn vector_potential(&self, t: f64) -> f64 {
        let u = t - self.t_center;
        if u.abs() >= 0.5 * std::f64::consts::PI * self.t_env {
            return 0.0;
        }
        let env = (u / self.t_env).cos();
        -self.a_max() * env * env * (self.omega * u).sin()
    }

    /// E(t) = -A'(t), exact derivative of the envelope-carrier product.
    pub fn electric_field(&self, t: f64) -> f64 {
        let u = t - self.t_center;
        if u.abs() >= 0.5 * std::f64::consts::PI * self.t_env {
            return 0.0;
        }
        let env = (u / self.t_env).cos();
        self.a_max()
            * (self.omega * env * env * (self.omega * u).cos()
                - (2.0 * u / self.t_env).sin() * (self.omega * u).sin() / self.t_env)
    }
}

/// Envelope parameter from the intensity FWHM: T = FWHM / (2 arccos 2^{-1/4}).
pub fn fwhm_to_envelope_t(fwhm: f64) -> Result<f64> {
    if !(fwhm > 0.0) {
        return Err(Error::Config(format!("FWHM must be > 0, got {fwhm}")));
    }
    Ok(fwhm / (2.0 * (2.0f64.powf(-0.25)).acos()))
}

/// Intensity FWHM of the cos² envelope for a given T.
pub fn envelope_t_to_fwhm(t_env: f64) -> f64 {
    2.0 * (2.0f64.powf(-0.25)).acos() * t_env
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laser() -> PulseParams {
        PulseParams::new(0.02, 0.06, 126.78, 0.0).unwrap()
    }

    #[test]
    fn vector_potential_zeros() {
        let p = laser();
        assert_eq!(p.vector_potential(0.0), 0.0);
        let (lo, hi) = p.support();
        assert_eq!(p.vector_potential(lo), 0.0);
        assert_eq!(p.vector_potential(hi), 0.0);
        assert_eq!(p.vector_potential(hi + 50.0), 0.0);
        assert!((p.a_max() - 0.02 / 0.06).abs() < 1e-15);
    }

    #[test]
    fn field_peak_at_center() {
        let p = laser();
        assert!((p.electric_field(0.0) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn field_is_exactly_zero_outside_support() {
        let p = laser();
        let (lo, hi) = p.support();
        for t in [lo, hi, lo - 1.0, hi + 1.0, hi + 1e4] {
            assert_eq!(p.electric_field(t).to_bits(), 0.0f64.to_bits());
            assert_eq!(p.vector_potential(t).to_bits(), 0.0f64.to_bits());
        }
    }

    #[test]
    fn field_integrates_to_zero() {
        // trapezoid of E over the support must return A(start) - A(end) = 0
        let p = laser();
        let (lo, hi) = p.support();
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let mut acc = 0.5 * (p.electric_field(lo) + p.electric_field(hi));
        for k in 1..n {
            acc += p.electric_field(lo + k as f64 * h);
        }
        assert!((acc * h).abs() < 1e-8);
    }

    #[test]
    fn field_matches_finite_difference_of_a() {
        let p = laser();
        let (lo, hi) = p.support();
        let h = 1e-6;
        for k in 0..1000 {
            // deterministic quasi-random interior times
            let x = ((k as f64 * 0.618_033_988_749_895) % 1.0) * 0.98 + 0.01;
            let t = lo + x * (hi - lo);
            let fd = -(p.vector_potential(t + h) - p.vector_potential(t - h)) / (2.0 * h);
            assert!(
                (p.electric_field(t) - fd).abs() < 1e-8,
                "t = {t}: analytic {} vs fd {fd}",
                p.electric_field(t)
            );
        }
    }

    #[test]
    fn fwhm_relation() {
        assert!((fwhm_to_envelope_t(144.9).unwrap() - 126.78).abs() < 0.1);
        assert!((fwhm_to_envelope_t(12.39).unwrap() - 10.84).abs() < 0.01);
        // linear in the argument
        let t1 = fwhm_to_envelope_t(37.0).unwrap();
        let t2 = fwhm_to_envelope_t(74.0).unwrap();
        assert!((t2 - 2.0 * t1).abs() < 1e-12);
        // laser FWHM is about 3.5 fs
        let fwhm = envelope_t_to_fwhm(126.78);
        assert!((fwhm - 144.9).abs() < 0.2);
        assert!((fwhm / 41.341 - 3.5).abs() < 0.01);
    }

    #[test]
    fn support_interval() {
        let p = laser();
        let (lo, hi) = p.support();
        assert!((lo + PI * 126.78 / 2.0).abs() < 1e-12);
        assert!((hi - PI * 126.78 / 2.0).abs() < 1e-12);
        let probe = PulseParams::new(1e-3, 1.34, 10.84, 42.0).unwrap();
        let (plo, phi) = probe.support();
        assert!(((plo + phi) / 2.0 - 42.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_envelope_rejected() {
        assert!(PulseParams::new(0.02, 0.06, 0.0, 0.0).is_err());
        assert!(PulseParams::new(0.02, 0.06, -3.0, 0.0).is_err());
        assert!(PulseParams::new(0.02, 0.0, 10.0, 0.0).is_err());
    }
}
