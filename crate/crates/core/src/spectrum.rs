//! Lowest bound eigenpairs of the field-free Hamiltonian and the
//! bound-subspace dipole matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection on the tridiagonal H0,
//! eigenvectors from inverse iteration with a fixed-seed start vector.
//! Sign convention: the first component above noise level, scanning from
//! z_min, is positive.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::grid::{dipole_expectation, Potential, Wavefunction};
use crate::linalg;

#[derive(Debug, Clone)]
pub struct BoundBasis {
    /// Ascending bound-state energies (hartree), all negative.
    pub energies: Vec<f64>,
    /// Orthonormal real eigenstates, one per energy.
    pub states: Vec<Wavefunction>,
    /// Dipole matrix Z0[m, n] = <m|z|n>.
    pub dipole: Array2<f64>,
}

impl BoundBasis {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Project `psi` onto the basis: returns <n|psi> for each state.
    pub fn project(&self, psi: &Wavefunction) -> Result<Array1<num_complex::Complex64>> {
        let mut out = Array1::zeros(self.len());
        for (n, state) in self.states.iter().enumerate() {
            out[n] = crate::grid::inner_product(state, psi)?;
        }
        Ok(out)
    }
}

/// Hamiltonian bands for the 3-point discretization of H0.
pub(crate) fn h0_bands(pot: &Potential) -> (Vec<f64>, Vec<f64>) {
    let n = pot.grid.n_points;
    let inv_dz2 = 1.0 / (pot.grid.dz * pot.grid.dz);
    let diag: Vec<f64> = (0..n).map(|k| inv_dz2 + pot.values[k]).collect();
    let off = vec![-0.5 * inv_dz2; n - 1];
    (diag, off)
}

/// Compute the `n_states` lowest eigenpairs of the discrete H0.
pub fn bound_states(pot: &Potential, n_states: usize) -> Result<BoundBasis> {
    if n_states < 1 {
        return Err(Error::Config(format!(
            "n_states must be >= 1, got {n_states}"
        )));
    }
    let (diag, off) = h0_bands(pot);
    let negative = linalg::sturm_count_below(&diag, &off, 0.0);
    if negative < n_states {
        return Err(Error::Spectrum(format!(
            "requested {n_states} bound states but the discrete spectrum has only {negative} negative eigenvalues"
        )));
    }
    let mut energies = Vec::with_capacity(n_states);
    let mut vectors: Vec<Array1<f64>> = Vec::with_capacity(n_states);
    for k in 0..n_states {
        let lambda = linalg::bisect_eigenvalue(&diag, &off, k);
        let mut v = linalg::inverse_iteration(&diag, &off, lambda, &vectors)?;
        fix_sign(&mut v);
        energies.push(lambda);
        vectors.push(v);
    }
    let states: Vec<Wavefunction> = vectors
        .iter()
        .map(|v| {
            // unit 2-norm -> unit L2(dz) norm
            let scaled = v.mapv(|x| x / pot.grid.dz.sqrt());
            Wavefunction::from_real(pot.grid, &scaled)
        })
        .collect();
    let dipole = dipole_matrix(&states)?;
    Ok(BoundBasis {
        energies,
        states,
        dipole,
    })
}

/// Z0[m, n] = <m|z|n> over the basis states.
pub fn dipole_matrix(states: &[Wavefunction]) -> Result<Array2<f64>> {
    let nb = states.len();
    let mut z = Array2::<f64>::zeros((nb, nb));
    for m in 0..nb {
        for n in 0..nb {
            z[[m, n]] = dipole_expectation(&states[m], &states[n])?.re;
        }
    }
    Ok(z)
}

fn fix_sign(v: &mut Array1<f64>) {
    let max_abs = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * max_abs) {
        if *first < 0.0 {
            v.mapv_inplace(|x| -x);
        }
    }
}
