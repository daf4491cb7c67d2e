//! The four families of laser-dressed bound states, built as time series
//! of coefficient matrices over the field-free bound basis:
//!
//! * `u` - unperturbed: the field-free states themselves,
//! * `a` - adiabatic: instantaneous eigenstates of the bound-subspace
//!   Hamiltonian, tracked across samples by maximum overlap,
//! * `d` - dynamic: the bound-subspace TDSE integrated with RK4,
//! * `p` - projected: full grid solutions projected onto the bound basis
//!   and Gram-Schmidt orthonormalized in ascending state order.
//!
//! Every family starts from the identity (each dressed state coincides
//! with its field-free partner before the pulse) and stays orthonormal.
//! The depletion amplitude a_n(t) is the overlap of dressed state n with
//! the full laser-driven solution started from |n>.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Potential;
use crate::linalg::jacobi_eigh;
use crate::propagator::{propagate_projected, BoundProjections, PropagationPlan};
use crate::pulses::PulseParams;
use crate::spectrum::BoundBasis;

/// Internal RK4 step used by [`dynamic_family`] when none is given;
/// small enough to hold orthonormality to 1e-10 over a full pulse.
pub const DYNAMIC_DEFAULT_DT: f64 = 0.002;

/// Orthonormality drift allowed for the RK4-integrated family.
pub const DYNAMIC_ORTHONORMALITY_LIMIT: f64 = 1e-8;

/// Residual norm below which a projected column counts as fully depleted.
pub const PROJECTED_NORM_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Unperturbed,
    Adiabatic,
    Dynamic,
    Projected,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Unperturbed,
        Family::Adiabatic,
        Family::Dynamic,
        Family::Projected,
    ];

    pub fn code(&self) -> char {
        match self {
            Family::Unperturbed => 'u',
            Family::Adiabatic => 'a',
            Family::Dynamic => 'd',
            Family::Projected => 'p',
        }
    }

    pub fn from_code(c: char) -> Result<Self> {
        match c {
            'u' => Ok(Family::Unperturbed),
            'a' => Ok(Family::Adiabatic),
            'd' => Ok(Family::Dynamic),
            'p' => Ok(Family::Projected),
            other => Err(Error::Config(format!(
                "unknown dressed family '{other}' (expected u, a, d or p)"
            ))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.code())
    }
}

#[derive(Debug, Clone)]
pub struct DressedTrajectory {
    pub family: Family,
    pub times: Vec<f64>,
    /// One N_b x N_b matrix per sample; column n holds <m|φ_n(t)>.
    pub coeffs: Vec<Array2<C64>>,
    /// a_n(t), one row per sample, once attached.
    pub amplitudes: Option<Array2<C64>>,
    /// Instantaneous subspace energies (adiabatic family only).
    pub energies: Option<Array2<f64>>,
}

impl DressedTrajectory {
    pub fn n_states(&self) -> usize {
        self.coeffs.first().map_or(0, |c| c.nrows())
    }

    pub fn amplitudes(&self) -> Result<&Array2<C64>> {
        self.amplitudes.as_ref().ok_or_else(|| {
            Error::SamplingMismatch(format!(
                "family {} has no depletion amplitudes attached",
                self.family
            ))
        })
    }

    pub fn with_amplitudes(mut self, amps: Array2<C64>) -> Self {
        self.amplitudes = Some(amps);
        self
    }

    /// max over samples of max|C†C - I|.
    pub fn orthonormality_error(&self) -> f64 {
        let nb = self.n_states();
        let mut worst = 0.0f64;
        for c in &self.coeffs {
            for i in 0..nb {
                for j in 0..nb {
                    let mut acc = C64::new(0.0, 0.0);
                    for m in 0..nb {
                        acc += c[[m, i]].conj() * c[[m, j]];
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((acc - want).norm());
                }
            }
        }
        worst
    }

    /// Index of the sample instant closest to `t`.
    pub fn sample_index(&self, t: f64) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (k, &tk) in self.times.iter().enumerate() {
            let d = (tk - t).abs();
            if d < dist {
                dist = d;
                best = k;
            }
        }
        best
    }
}

/// Bound-subspace Hamiltonian diag(ε) + E_L(t) Z0.
fn subspace_hamiltonian(basis: &BoundBasis, e_field: f64) -> Array2<f64> {
    let mut h = basis.dipole.mapv(|z| e_field * z);
    for n in 0..basis.len() {
        h[[n, n]] += basis.energies[n];
    }
    h
}

/// Family u: the coefficients are the identity at every instant.
pub fn unperturbed_family(basis: &BoundBasis, times: &[f64]) -> DressedTrajectory {
    let eye = Array2::<C64>::eye(basis.len());
    DressedTrajectory {
        family: Family::Unperturbed,
        times: times.to_vec(),
        coeffs: vec![eye; times.len()],
        amplitudes: None,
        energies: None,
    }
}

/// Family a: instantaneous eigenstates of the subspace Hamiltonian,
/// ordered by energy at the first sample and by maximum overlap with the
/// previous sample afterwards. Column signs follow the previous sample.
pub fn adiabatic_family(
    basis: &BoundBasis,
    laser: &PulseParams,
    times: &[f64],
) -> Result<DressedTrajectory> {
    let nb = basis.len();
    let mut coeffs = Vec::with_capacity(times.len());
    let mut energies = Array2::<f64>::zeros((times.len(), nb));
    let mut prev: Option<Array2<f64>> = None;
    for (k, &t) in times.iter().enumerate() {
        let (w, v) = jacobi_eigh(&subspace_hamiltonian(basis, laser.electric_field(t)));
        let (ordered, en) = match &prev {
            None => (v, w), // ascending energies at t0
            Some(p) => match_by_overlap(p, &v, &w, t)?,
        };
        for n in 0..nb {
            energies[[k, n]] = en[n];
        }
        coeffs.push(ordered.mapv(|x| C64::new(x, 0.0)));
        prev = Some(ordered);
    }
    Ok(DressedTrajectory {
        family: Family::Adiabatic,
        times: times.to_vec(),
        coeffs,
        amplitudes: None,
        energies: Some(energies),
    })
}

/// Assign eigenvector columns to the previous sample's states by largest
/// |overlap|, fixing signs so that overlaps are positive.
fn match_by_overlap(
    prev: &Array2<f64>,
    v: &Array2<f64>,
    w: &Array1<f64>,
    t: f64,
) -> Result<(Array2<f64>, Array1<f64>)> {
    let nb = prev.ncols();
    let overlap = prev.t().dot(v);
    let mut used = vec![false; nb];
    let mut ordered = Array2::<f64>::zeros((nb, nb));
    let mut energies = Array1::<f64>::zeros(nb);
    for n in 0..nb {
        let mut best = usize::MAX;
        let mut best_val = -1.0;
        let mut second_val = -1.0;
        for j in 0..nb {
            if used[j] {
                continue;
            }
            let o = overlap[[n, j]].abs();
            if o > best_val {
                second_val = best_val;
                best_val = o;
                best = j;
            } else if o > second_val {
                second_val = o;
            }
        }
        if second_val >= 0.0 && (best_val - second_val).abs() < 1e-6 {
            return Err(Error::Continuity(format!(
                "state {n} at t = {t}: top overlaps {best_val:.9} and {second_val:.9} are indistinguishable"
            )));
        }
        used[best] = true;
        let sign = if overlap[[n, best]] < 0.0 { -1.0 } else { 1.0 };
        for m in 0..nb {
            ordered[[m, n]] = sign * v[[m, best]];
        }
        energies[n] = w[best];
    }
    Ok((ordered, energies))
}

/// Family d: integrate i dC/dt = H_sub(t) C with classical RK4 using an
/// internal step that divides each sampling interval.
pub fn dynamic_family(
    basis: &BoundBasis,
    laser: &PulseParams,
    times: &[f64],
    dt: f64,
) -> Result<DressedTrajectory> {
    if !(dt > 0.0) {
        return Err(Error::Config(format!("RK4 dt must be > 0, got {dt}")));
    }
    let nb = basis.len();
    let mut c = Array2::<C64>::eye(nb);
    let mut coeffs = Vec::with_capacity(times.len());
    coeffs.push(c.clone());
    for k in 0..times.len() - 1 {
        let (t0, t1) = (times[k], times[k + 1]);
        let span = t1 - t0;
        let m = (span / dt).round().max(1.0);
        if (span / dt - m).abs() > 1e-6 {
            return Err(Error::SamplingMismatch(format!(
                "RK4 dt {dt} does not divide the sampling interval {span}"
            )));
        }
        let h = span / m;
        for s in 0..m as usize {
            let t = t0 + s as f64 * h;
            c = rk4_step(basis, laser, &c, t, h);
        }
        coeffs.push(c.clone());
    }
    let traj = DressedTrajectory {
        family: Family::Dynamic,
        times: times.to_vec(),
        coeffs,
        amplitudes: None,
        energies: None,
    };
    let drift = traj.orthonormality_error();
    if drift > DYNAMIC_ORTHONORMALITY_LIMIT {
        return Err(Error::IntegrationAccuracy(format!(
            "orthonormality drift {drift:.3e} exceeds {DYNAMIC_ORTHONORMALITY_LIMIT:.1e}; reduce the RK4 step"
        )));
    }
    Ok(traj)
}

fn rk4_step(
    basis: &BoundBasis,
    laser: &PulseParams,
    c: &Array2<C64>,
    t: f64,
    h: f64,
) -> Array2<C64> {
    let deriv = |tt: f64, cc: &Array2<C64>| -> Array2<C64> {
        let hm = subspace_hamiltonian(basis, laser.electric_field(tt));
        let nb = cc.nrows();
        let mut out = Array2::<C64>::zeros((nb, nb));
        for i in 0..nb {
            for j in 0..nb {
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..nb {
                    acc += cc[[m, j]] * hm[[i, m]];
                }
                out[[i, j]] = C64::new(0.0, -1.0) * acc;
            }
        }
        out
    };
    let k1 = deriv(t, c);
    let k2 = deriv(t + 0.5 * h, &(c + &(&k1 * C64::new(0.5 * h, 0.0))));
    let k3 = deriv(t + 0.5 * h, &(c + &(&k2 * C64::new(0.5 * h, 0.0))));
    let k4 = deriv(t + h, &(c + &(&k3 * C64::new(h, 0.0))));
    c + &((k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0))
}

/// One laser-only propagation per bound state, run concurrently.
pub fn laser_runs(
    basis: &BoundBasis,
    pot: &Potential,
    plan: &PropagationPlan,
) -> Result<Vec<BoundProjections>> {
    (0..basis.len())
        .into_par_iter()
        .map(|n| propagate_projected(&basis.states[n], pot, plan, basis))
        .collect()
}

/// Family p: Gram-Schmidt in ascending state order on the projected
/// full solutions. State 0 is only normalized; state n is orthogonalized
/// against states 0..n-1 and then normalized.
pub fn projected_family(
    basis: &BoundBasis,
    runs: &[BoundProjections],
) -> Result<DressedTrajectory> {
    let nb = basis.len();
    if runs.len() != nb {
        return Err(Error::SamplingMismatch(format!(
            "expected {nb} laser runs, got {}",
            runs.len()
        )));
    }
    let times = runs[0].times.clone();
    for (n, r) in runs.iter().enumerate() {
        if r.times.len() != times.len()
            || r.times
                .iter()
                .zip(times.iter())
                .any(|(a, b)| (a - b).abs() > 1e-9)
        {
            return Err(Error::SamplingMismatch(format!(
                "laser run {n} is sampled on a different time grid"
            )));
        }
    }
    let mut coeffs = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let mut c = Array2::<C64>::zeros((nb, nb));
        for n in 0..nb {
            let mut col: Vec<C64> = (0..nb).map(|m| runs[n].coeffs[[k, m]]).collect();
            // modified Gram-Schmidt, second pass for orthogonality to 1e-12
            for _ in 0..2 {
                for l in 0..n {
                    let mut dot = C64::new(0.0, 0.0);
                    for m in 0..nb {
                        dot += c[[m, l]].conj() * col[m];
                    }
                    for m in 0..nb {
                        let delta = c[[m, l]] * dot;
                        col[m] -= delta;
                    }
                }
            }
            let norm = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < PROJECTED_NORM_FLOOR {
                return Err(Error::Degenerate { state: n, t, norm });
            }
            for m in 0..nb {
                c[[m, n]] = col[m] / norm;
            }
        }
        coeffs.push(c);
    }
    Ok(DressedTrajectory {
        family: Family::Projected,
        times,
        coeffs,
        amplitudes: None,
        energies: None,
    })
}

/// a_n(t) = <φ_n(t)|ψ_L^{(n)}(t)>: the dressed bra, expanded in the bound
/// basis, applied to the projected coefficients of the matching full run.
pub fn depletion_amplitudes(
    traj: &DressedTrajectory,
    runs: &[BoundProjections],
) -> Result<Array2<C64>> {
    let nb = traj.n_states();
    if runs.len() != nb {
        return Err(Error::SamplingMismatch(format!(
            "expected {nb} laser runs, got {}",
            runs.len()
        )));
    }
    for r in runs {
        if r.times.len() != traj.times.len()
            || r.times
                .iter()
                .zip(traj.times.iter())
                .any(|(a, b)| (a - b).abs() > 1e-9)
        {
            return Err(Error::SamplingMismatch(
                "laser runs and dressed trajectory use different sample instants".into(),
            ));
        }
    }
    let mut amps = Array2::<C64>::zeros((traj.times.len(), nb));
    for k in 0..traj.times.len() {
        let c = &traj.coeffs[k];
        for n in 0..nb {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..nb {
                acc += c[[m, n]].conj() * runs[n].coeffs[[k, m]];
            }
            amps[[k, n]] = acc;
        }
    }
    Ok(amps)
}

/// Dressed dipole matrices Z(t) = C(t)† Z0 C(t), one per sample.
pub fn dressed_dipole(traj: &DressedTrajectory, basis: &BoundBasis) -> Vec<Array2<C64>> {
    let nb = traj.n_states();
    let z0 = &basis.dipole;
    traj.coeffs
        .iter()
        .map(|c| {
            let mut out = Array2::<C64>::zeros((nb, nb));
            for i in 0..nb {
                for j in 0..nb {
                    let mut acc = C64::new(0.0, 0.0);
                    for m in 0..nb {
                        for n in 0..nb {
                            acc += c[[m, i]].conj() * z0[[m, n]] * c[[n, j]];
                        }
                    }
                    out[[i, j]] = acc;
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, soft_core_potential};
    use crate::spectrum::bound_states;

    fn small_setup() -> (Potential, BoundBasis) {
        let grid = build_grid(0.1, 204.8).unwrap();
        let pot = soft_core_potential(grid, 0.3).unwrap();
        let basis = bound_states(&pot, 5).unwrap();
        (pot, basis)
    }

    fn zero_field() -> PulseParams {
        PulseParams::new(0.0, 0.06, 126.78, 0.0).unwrap()
    }

    #[test]
    fn unperturbed_is_identity() {
        let (_, basis) = small_setup();
        let times: Vec<f64> = (0..20).map(|k| k as f64 * 0.1).collect();
        let traj = unperturbed_family(&basis, &times);
        assert_eq!(traj.orthonormality_error(), 0.0);
        for c in &traj.coeffs {
            for i in 0..5 {
                for j in 0..5 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_eq!(c[[i, j]], C64::new(want, 0.0));
                }
            }
        }
        // dressed dipole equals the static one at all times
        let zt = dressed_dipole(&traj, &basis);
        for z in &zt {
            for i in 0..5 {
                for j in 0..5 {
                    assert!((z[[i, j]].re - basis.dipole[[i, j]]).abs() < 1e-14);
                    assert!(z[[i, j]].im.abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn adiabatic_reduces_to_identity_without_field() {
        let (_, basis) = small_setup();
        let times: Vec<f64> = (0..30).map(|k| k as f64 * 0.1).collect();
        let traj = adiabatic_family(&basis, &zero_field(), &times).unwrap();
        for (k, c) in traj.coeffs.iter().enumerate() {
            for i in 0..5 {
                for j in 0..5 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((c[[i, j]] - C64::new(want, 0.0)).norm() < 1e-12);
                }
            }
            let en = traj.energies.as_ref().unwrap();
            for n in 0..5 {
                assert!((en[[k, n]] - basis.energies[n]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adiabatic_ground_energy_shift_is_quadratic() {
        let (_, basis) = small_setup();
        let laser = PulseParams::new(0.005, 0.06, 126.78, 0.0).unwrap();
        // first sample outside the support (zero field), second at the crest
        let times = vec![-250.0, 0.0];
        let traj = adiabatic_family(&basis, &laser, &times).unwrap();
        let en = traj.energies.unwrap();
        let shift_full = en[[1, 0]] - basis.energies[0];
        assert!(shift_full <= 0.0, "ground state shifts down");
        let laser_half = PulseParams::new(0.0025, 0.06, 126.78, 0.0).unwrap();
        let traj_half = adiabatic_family(&basis, &laser_half, &times).unwrap();
        let shift_half = traj_half.energies.unwrap()[[1, 0]] - basis.energies[0];
        assert!(
            (shift_full / shift_half / 4.0 - 1.0).abs() < 0.01,
            "ratio {}",
            shift_full / shift_half
        );
    }

    #[test]
    fn dynamic_field_free_phases() {
        let (_, basis) = small_setup();
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
        let traj = dynamic_family(&basis, &zero_field(), &times, 0.002).unwrap();
        for (k, c) in traj.coeffs.iter().enumerate() {
            let t = times[k];
            for n in 0..5 {
                let want = C64::new(0.0, -basis.energies[n] * t).exp();
                assert!((c[[n, n]] - want).norm() < 1e-9, "state {n} at t={t}");
            }
        }
        assert!(traj.orthonormality_error() < 1e-12);
    }

    #[test]
    fn dynamic_self_convergence_on_dt() {
        let (_, basis) = small_setup();
        let laser = PulseParams::new(0.04, 0.06, 126.78, 0.0).unwrap();
        let times: Vec<f64> = (0..=50).map(|k| -2.5 + k as f64 * 0.1).collect();
        let a = dynamic_family(&basis, &laser, &times, 0.002).unwrap();
        let b = dynamic_family(&basis, &laser, &times, 0.001).unwrap();
        let mut worst = 0.0f64;
        let (ca, cb) = (a.coeffs.last().unwrap(), b.coeffs.last().unwrap());
        for i in 0..5 {
            for j in 0..5 {
                worst = worst.max((ca[[i, j]] - cb[[i, j]]).norm());
            }
        }
        assert!(worst < 1e-8, "dt-halving changed C(t_f) by {worst:.2e}");
    }

    #[test]
    fn projected_field_free_phases_and_orthonormality() {
        let (pot, basis) = small_setup();
        let plan = PropagationPlan::new(0.001, 0.0, 2.0, vec![])
            .unwrap()
            .with_sample_stride(100);
        let runs = laser_runs(&basis, &pot, &plan).unwrap();
        let traj = projected_family(&basis, &runs).unwrap();
        assert!(traj.orthonormality_error() < 1e-12);
        for (k, c) in traj.coeffs.iter().enumerate() {
            let t = traj.times[k];
            for n in 0..5 {
                let want = C64::new(0.0, -basis.energies[n] * t).exp();
                assert!(
                    (c[[n, n]] - want).norm() < 1e-6,
                    "state {n} at t={t}: {} vs {want}",
                    c[[n, n]]
                );
            }
        }
        // laser off: |a_n(t)| stays 1
        let amps = depletion_amplitudes(&traj, &runs).unwrap();
        for k in 0..traj.times.len() {
            for n in 0..5 {
                assert!((amps[[k, n]].norm() - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn depletion_amplitudes_reject_mismatched_sampling() {
        let (pot, basis) = small_setup();
        let plan = PropagationPlan::new(0.01, 0.0, 1.0, vec![]).unwrap();
        let runs = laser_runs(&basis, &pot, &plan).unwrap();
        let times: Vec<f64> = (0..5).map(|k| k as f64 * 0.3).collect();
        let traj = unperturbed_family(&basis, &times);
        assert!(matches!(
            depletion_amplitudes(&traj, &runs),
            Err(Error::SamplingMismatch(_))
        ));
    }

    #[test]
    fn family_codes_round_trip() {
        for f in Family::ALL {
            assert_eq!(Family::from_code(f.code()).unwrap(), f);
        }
        assert!(Family::from_code('x').is_err());
    }
}
