//! Lennard-Jones split at its minimum into a repulsive core and a bounded
//! attractive tail, and the cell-list search that handles the core.

use rbm::kernels::{lj_potential, lj_split, Kernel};
use rbm::neighbor::CellList;
use rbm::rng::RngStream;
use rbm::state::{box_from_density, lattice_init, uniform_init};

fn main() -> rbm::Result<()> {
    let s = lj_split();
    println!("r0 = {:.6}", s.r0);
    println!("{:>6} {:>12} {:>12} {:>12}", "r", "phi1", "phi2", "phi");
    for k in 0..12 {
        let r = 0.9 + 0.1 * k as f64;
        let (p1, p2) = (s.short_range.potential(r).unwrap_or(0.0), s.long_range.potential(r).unwrap_or(0.0));
        println!("{r:>6.2} {p1:>12.5} {p2:>12.5} {:>12.5}", lj_potential(r)?);
    }

    let n = 1000;
    let geom = box_from_density(n, 0.7)?;
    let mut x = lattice_init(n, &geom);
    let jitter = uniform_init(n, 3, 0.1, &RngStream::new(1))?;
    for (p, d) in x.iter_mut().zip(&jitter) {
        *p = geom.wrap([p[0] + d[0], p[1] + d[1], p[2] + d[2]]);
    }
    let cells = CellList::build(&x, &geom, s.r0)?;
    let pairs = cells.pairs_within(&x, s.r0)?;
    println!(
        "{n} particles, {} cells per side, {} pairs inside r0",
        cells.cells_per_side(),
        pairs.len()
    );
    Ok(())
}
