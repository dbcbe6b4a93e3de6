//! Thread-pool versions of the exponential routes.
//!
//! Work is split by index range (spin configurations) or by start site
//! (closed walks); partial results are merged with exact integer
//! arithmetic, so the outcome does not depend on scheduling.

use kacward_core::hightemp::{self, EnumerationBudget};
use kacward_core::onsager::{self, FreeEnergyOptions, ThermoPoint};
use kacward_core::paths::{self, ClassEntry, ClassTally, IdentityReport};
use kacward_core::{Lattice, Result};
use rayon::prelude::*;

/// Configurations per work item of the brute-force sweep.
const CHUNK: u64 = 1 << 16;

/// Aligned-bond histogram over all `2^{N²}` configurations.
pub fn aligned_histogram(lattice: &Lattice, max_side: usize) -> Result<Vec<u64>> {
    hightemp::check_brute_size(lattice, max_side)?;
    let range = lattice.config_range()?;
    let chunks = range.end.div_ceil(CHUNK);
    let zero = || vec![0u64; lattice.bond_count() + 1];
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| hightemp::aligned_histogram(lattice, c * CHUNK..((c + 1) * CHUNK).min(range.end)))
        .reduce(zero, |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        }))
}

/// `Z_N(K)` by summing every spin configuration.
pub fn partition_brute_force(lattice: &Lattice, coupling: f64, max_side: usize) -> Result<f64> {
    let hist = aligned_histogram(lattice, max_side)?;
    Ok(hightemp::partition_from_histogram(lattice, &hist, coupling))
}

/// Nonperiodic closed-path classes of length `≤ max_len`, one start site
/// per work item.
pub fn enumerate_closed_classes(lattice: &Lattice, max_len: usize) -> Result<Vec<ClassEntry>> {
    ClassTally::new(max_len)?;
    let sites: Vec<_> = lattice.sites().collect();
    let tallies = sites
        .par_iter()
        .map(|&site| {
            let mut t = ClassTally::new(max_len)?;
            t.record_walks_from(lattice, site)?;
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = ClassTally::new(max_len)?;
    for t in tallies {
        total.merge(t)?;
    }
    total.finish()
}

/// Both sides of the graph/path identity up to `u^max_order`.
pub fn feynman_identity_check(lattice: &Lattice, max_order: usize, budget: EnumerationBudget) -> Result<IdentityReport> {
    let graphs = hightemp::graph_generating_polynomial(lattice, Default::default(), budget)?;
    let classes = enumerate_closed_classes(lattice, max_order)?;
    IdentityReport::from_parts(lattice.side(), max_order, &graphs, &classes)
}

/// `2^{N²} cosh^x K ∏ (1 + W_p)` over classes of length `≤ max_len`.
pub fn partition_product_truncated(lattice: &Lattice, coupling: f64, max_len: usize) -> Result<f64> {
    let classes = enumerate_closed_classes(lattice, max_len)?;
    Ok(hightemp::high_temperature_prefactor(lattice, coupling) * paths::class_product_value(&classes, coupling.tanh()))
}

/// One [`ThermoPoint`] per coupling, in input order.
pub fn thermo_sweep(couplings: &[f64], options: &FreeEnergyOptions) -> Result<Vec<ThermoPoint>> {
    couplings.par_iter().map(|&k| onsager::thermo_point(k, options)).collect()
}
