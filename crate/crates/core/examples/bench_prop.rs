use pumpprobe::*;
use pumpprobe::propagator::*;
fn main() {
    let grid = build_grid(0.1, 819.2).unwrap();
    let pot = soft_core_potential(grid, 0.3).unwrap();
    let t0 = std::time::Instant::now();
    let basis = bound_states(&pot, 5).unwrap();
    println!("bound_states: {:?}", t0.elapsed());
    for (i, e) in basis.energies.iter().enumerate() { println!("  eps{} = {:.12}", i, e); }
    let laser = PulseParams::new(0.02, 0.06, 126.78, 0.0).unwrap();
    let plan = PropagationPlan::covering(&[laser], 0.02, 5).unwrap();
    println!("steps: {}", plan.n_steps());
    let t0 = std::time::Instant::now();
    let runs = propagate_projected(&basis.states[1], &pot, &plan, &basis).unwrap();
    let dt = t0.elapsed();
    let pops: Vec<f64> = (0..5).map(|n| runs.coeffs.row(runs.coeffs.nrows()-1)[n].norm_sqr()).collect();
    let ion = ionization_probability(&runs.final_state, &basis).unwrap();
    println!("propagation: {:?}  ({:.1} us/step)", dt, dt.as_micros() as f64 / plan.n_steps() as f64);
    println!("pops: {:?}", pops);
    println!("ionized: {:.8}", ion);
    println!("norm: {:.14}", runs.final_state.norm_squared());
}
