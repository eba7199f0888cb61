//! Coherent-state variance matrix, the map to commuting variables, and
//! symplectic eigenvalues.

use ncqm::moments::{coherent_variance_matrix, symplectic_eigenvalues, SymplecticForm};

fn main() -> ncqm::Result<()> {
    let theta = 0.1;
    let cv = coherent_variance_matrix(theta)?;
    println!("measured V (order {:?}):\n{:.6}", cv.numeric.ordering, cv.numeric.entries);
    println!("tabulated V:\n{:.6}", cv.analytic.entries);
    println!("largest entrywise deviation {:.3}", cv.max_deviation);
    println!("det measured {:.6}, det tabulated {:.6}", cv.numeric.det(), cv.analytic.det());

    let omega = SymplecticForm::canonical(0.0);
    for (name, v) in [("measured", &cv.numeric), ("tabulated", &cv.analytic)] {
        let v0 = v.to_commuting();
        let nu = symplectic_eigenvalues(&v0, &omega)?;
        println!("{name:>9}: det M V M^T = {:.6}, nu = [{:.6}, {:.6}]", v0.det(), nu[0], nu[1]);
    }
    println!("\ncommutator form of the coherent state:\n{:.4}", cv.numeric_form.entries);
    Ok(())
}
