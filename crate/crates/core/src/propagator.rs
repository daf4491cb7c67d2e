//! Crank-Nicolson propagation of the full grid TDSE in the length gauge,
//! i dψ/dt = (H0 + z·ΣE_i(t)) ψ, with the field evaluated at the half
//! step. The scheme is a Cayley transform of the tridiagonal Hamiltonian,
//! so each step costs one tridiagonal solve and conserves the norm to
//! machine precision.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{Potential, Wavefunction};
use crate::pulses::PulseParams;
use crate::spectrum::BoundBasis;

/// Maximum tolerated |norm² - 1| over a run with the absorber off.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct PropagationPlan {
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub fields: Vec<PulseParams>,
    pub sample_stride: usize,
    pub absorber_enabled: bool,
    pub absorber_width: f64,
}

impl PropagationPlan {
    pub fn new(dt: f64, t_start: f64, t_end: f64, fields: Vec<PulseParams>) -> Result<Self> {
        let plan = Self {
            dt,
            t_start,
            t_end,
            fields,
            sample_stride: 5,
            absorber_enabled: false,
            absorber_width: 0.0,
        };
        plan.check()?;
        Ok(plan)
    }

    /// Window covering the union of the pulse supports, padded by 1 a.u.
    /// on each side and rounded up to a whole number of sample strides.
    pub fn covering(fields: &[PulseParams], dt: f64, sample_stride: usize) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::Config("no fields given".into()));
        }
        let lo = fields
            .iter()
            .map(|f| f.support().0)
            .fold(f64::INFINITY, f64::min)
            - 1.0;
        let hi = fields
            .iter()
            .map(|f| f.support().1)
            .fold(f64::NEG_INFINITY, f64::max)
            + 1.0;
        Self::covering_window(fields, dt, sample_stride, lo, hi)
    }

    /// Like [`covering`](Self::covering) but with an explicit window, which
    /// is extended so that (t_end - t_start)/dt is a multiple of the stride.
    pub fn covering_window(
        fields: &[PulseParams],
        dt: f64,
        sample_stride: usize,
        t_start: f64,
        t_end: f64,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {dt}")));
        }
        if sample_stride == 0 {
            return Err(Error::Config("sample_stride must be positive".into()));
        }
        let raw = ((t_end - t_start) / dt - 1e-9).ceil() as usize;
        let n_steps = raw.div_ceil(sample_stride) * sample_stride;
        let plan = Self {
            dt,
            t_start,
            t_end: t_start + n_steps as f64 * dt,
            fields: fields.to_vec(),
            sample_stride,
            absorber_enabled: false,
            absorber_width: 0.0,
        };
        plan.check()?;
        Ok(plan)
    }

    pub fn with_absorber(mut self, width: f64) -> Self {
        self.absorber_enabled = true;
        self.absorber_width = width;
        self
    }

    pub fn with_sample_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.t_end <= self.t_start {
            return Err(Error::Config(format!(
                "t_end {} must exceed t_start {}",
                self.t_end, self.t_start
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::Config("sample_stride must be positive".into()));
        }
        let steps = (self.t_end - self.t_start) / self.dt;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "(t_end - t_start)/dt = {steps} is not an integer"
            )));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt).round() as usize
    }

    /// Total field at time t.
    pub fn field_at(&self, t: f64) -> f64 {
        self.fields.iter().map(|f| f.electric_field(t)).sum()
    }

    /// Instants at which snapshots are taken (both endpoints included).
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.n_steps();
        let mut times: Vec<f64> = (0..=n)
            .step_by(self.sample_stride)
            .map(|k| self.t_start + k as f64 * self.dt)
            .collect();
        if n % self.sample_stride != 0 {
            times.push(self.t_end);
        }
        times
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Wavefunction>,
}

/// Bound-subspace record of one full propagation: the projections
/// <n|ψ(t)> at every sample instant plus the final grid state.
#[derive(Debug, Clone)]
pub struct BoundProjections {
    pub times: Vec<f64>,
    /// Row per sample instant, column per bound state.
    pub coeffs: Array2<C64>,
    pub final_state: Wavefunction,
}

/// Absorbing mask: 1 in the interior, cos^(1/8) ramp to 0 over the outer
/// `width` at each edge.
pub fn absorber_mask(grid: &crate::grid::Grid, width: f64) -> Result<Array1<f64>> {
    if width > grid.box_length() / 4.0 {
        return Err(Error::Config(format!(
            "absorber width {width} exceeds a quarter of the box {}",
            grid.box_length()
        )));
    }
    let z_max = grid.z(grid.n_points - 1);
    let mask = Array1::from_iter((0..grid.n_points).map(|k| {
        let z = grid.z(k);
        let depth = (grid.z_min + width - z).max(z - (z_max - width)).max(0.0);
        let s = (depth / width).min(1.0);
        (std::f64::consts::FRAC_PI_2 * s).cos().powf(0.125)
    }));
    Ok(mask)
}

/// Apply the absorbing mask of `plan` to `psi` once.
pub fn apply_absorber(psi: &Wavefunction, plan: &PropagationPlan) -> Result<Wavefunction> {
    if !plan.absorber_enabled {
        return Err(Error::Config("absorber is not enabled in this plan".into()));
    }
    let mask = absorber_mask(&psi.grid, plan.absorber_width)?;
    let mut out = psi.clone();
    for (a, m) in out.amplitudes.iter_mut().zip(mask.iter()) {
        *a *= *m;
    }
    Ok(out)
}

/// Core Crank-Nicolson loop. Calls `observe(sample_index, t, psi)` at
/// t_start, every `sample_stride` steps, and at t_end.
pub fn propagate_observe<F>(
    psi0: &Wavefunction,
    pot: &Potential,
    plan: &PropagationPlan,
    mut observe: F,
) -> Result<Wavefunction>
where
    F: FnMut(usize, f64, &Wavefunction) -> Result<()>,
{
    if psi0.grid != pot.grid {
        return Err(Error::GridMismatch("propagate: psi0 vs potential".into()));
    }
    plan.check()?;
    let grid = pot.grid;
    let n = grid.n_points;
    let n_steps = plan.n_steps();
    let dt = plan.dt;

    if plan.fields.iter().any(|f| f.e_max > 0.04) && !plan.absorber_enabled {
        eprintln!(
            "warning: e_max > 0.04 with the absorber off; ejected amplitude may reach the box edge"
        );
    }

    let mask = if plan.absorber_enabled {
        Some(absorber_mask(&grid, plan.absorber_width)?)
    } else {
        None
    };

    let inv_dz2 = 1.0 / (grid.dz * grid.dz);
    let beta = -0.5 * inv_dz2;
    let diag0: Vec<f64> = (0..n).map(|k| inv_dz2 + pot.values[k]).collect();
    let zs: Vec<f64> = (0..n).map(|k| grid.z(k)).collect();
    let coef = C64::new(0.0, 0.5 * dt);
    let off = coef * beta;

    let mut psi: Vec<C64> = psi0.amplitudes.to_vec();
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    let mut a_diag = vec![C64::new(0.0, 0.0); n];
    let mut scratch = vec![C64::new(0.0, 0.0); n];

    let mut sample_index = 0usize;
    let mut emit = |idx: usize, t: f64, data: &[C64]| -> Result<()> {
        let wf = Wavefunction::new(grid, Array1::from_vec(data.to_vec()));
        let nn = wf.norm_squared();
        if !nn.is_finite() {
            return Err(Error::Stability(format!(
                "non-finite norm at t = {t} (step {})",
                ((t - plan.t_start) / dt).round()
            )));
        }
        if mask.is_none() && (nn - 1.0).abs() > NORM_DRIFT_LIMIT {
            return Err(Error::Stability(format!(
                "norm drift |norm^2 - 1| = {:.3e} at t = {t}",
                (nn - 1.0).abs()
            )));
        }
        observe(idx, t, &wf)
    };

    emit(sample_index, plan.t_start, &psi)?;
    sample_index += 1;

    for step in 0..n_steps {
        let t_half = plan.t_start + (step as f64 + 0.5) * dt;
        let e_tot = plan.field_at(t_half);
        // rhs = (1 - i dt/2 H) psi,  A = 1 + i dt/2 H
        for k in 0..n {
            let h_k = diag0[k] + zs[k] * e_tot;
            let mut acc = psi[k] - coef * (h_k * psi[k]);
            if k > 0 {
                acc -= off * psi[k - 1];
            }
            if k + 1 < n {
                acc -= off * psi[k + 1];
            }
            rhs[k] = acc;
            a_diag[k] = C64::new(1.0, 0.0) + coef * h_k;
        }
        crate::linalg::thomas_const_off(&a_diag, off, &mut rhs, &mut scratch);
        std::mem::swap(&mut psi, &mut rhs);
        if let Some(m) = &mask {
            for (a, mk) in psi.iter_mut().zip(m.iter()) {
                *a *= *mk;
            }
        }
        let at_sample = (step + 1) % plan.sample_stride == 0 || step + 1 == n_steps;
        if at_sample {
            let t = plan.t_start + (step + 1) as f64 * dt;
            emit(sample_index, t, &psi)?;
            sample_index += 1;
        }
    }
    Ok(Wavefunction::new(grid, Array1::from_vec(psi)))
}

/// Propagate and keep full snapshots at every sample instant.
pub fn propagate(
    psi0: &Wavefunction,
    pot: &Potential,
    plan: &PropagationPlan,
) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    propagate_observe(psi0, pot, plan, |_, t, wf| {
        times.push(t);
        states.push(wf.clone());
        Ok(())
    })?;
    Ok(Trajectory { times, states })
}

/// Propagate while recording only the bound-subspace projections.
pub fn propagate_projected(
    psi0: &Wavefunction,
    pot: &Potential,
    plan: &PropagationPlan,
    basis: &BoundBasis,
) -> Result<BoundProjections> {
    let nb = basis.len();
    let n_samples = plan.sample_times().len();
    let mut coeffs = Array2::<C64>::zeros((n_samples, nb));
    let mut times = Vec::with_capacity(n_samples);
    let final_state = propagate_observe(psi0, pot, plan, |idx, t, wf| {
        times.push(t);
        let row = basis.project(wf)?;
        coeffs.row_mut(idx).assign(&row);
        Ok(())
    })?;
    Ok(BoundProjections {
        times,
        coeffs,
        final_state,
    })
}

/// Propagate and return only the final state.
pub fn propagate_final(
    psi0: &Wavefunction,
    pot: &Potential,
    plan: &PropagationPlan,
) -> Result<Wavefunction> {
    propagate_observe(psi0, pot, plan, |_, _, _| Ok(()))
}

/// 1 - Σ_n |<n|ψ>|² over the basis states, clamped to [0, 1].
pub fn ionization_probability(psi: &Wavefunction, basis: &BoundBasis) -> Result<f64> {
    let proj = basis.project(psi)?;
    let bound: f64 = proj.iter().map(|c| c.norm_sqr()).sum();
    Ok((1.0 - bound).clamp(0.0, 1.0))
}
