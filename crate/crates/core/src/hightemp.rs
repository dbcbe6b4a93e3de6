//! Exact partition function by direct spin enumeration and by the
//! even-subgraph (high-temperature) expansion
//! `Z = 2^V cosh^x(K) · (1 + Σ_G u^{L(G)})`, `u = tanh K`.
//!
//! `K` is the dimensionless coupling `J / k_B T` throughout.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::lattice::{BondMasks, Lattice};
use crate::math::{self, CompensatedSum};
use crate::poly::IntPolynomial;
use crate::{Error, Result};

/// Default largest side for the `2^{N²}` spin sum.
pub const DEFAULT_BRUTE_MAX_SIDE: usize = 5;

/// Histogram of aligned-bond counts over a range of spin configurations.
///
/// Entry `a` counts configurations with exactly `a` aligned pairs. Ranges
/// can be processed independently and summed.
pub fn aligned_histogram(lattice: &Lattice, configs: Range<u64>) -> Vec<u64> {
    let masks = BondMasks::new(lattice.side());
    let mut hist = vec![0u64; lattice.bond_count() + 1];
    for bits in configs {
        hist[masks.aligned(bits) as usize] += 1;
    }
    hist
}

/// `Σ_a hist[a] · exp(K (2a - x))`, compensated.
pub fn partition_from_histogram(lattice: &Lattice, hist: &[u64], coupling: f64) -> f64 {
    let x = lattice.bond_count() as f64;
    hist.iter()
        .enumerate()
        .filter(|(_, &count)| count > 0)
        .map(|(a, &count)| count as f64 * math::exp(coupling * (2.0 * a as f64 - x)))
        .collect::<CompensatedSum>()
        .value()
}

pub fn check_brute_size(lattice: &Lattice, max_side: usize) -> Result<()> {
    let limit = max_side.min(crate::lattice::MAX_SPIN_SIDE);
    if lattice.side() > limit {
        return Err(Error::Intractable { what: "brute-force lattice side", limit: limit as u64 });
    }
    Ok(())
}

/// `Z(K) = Σ_σ exp(K Σ_{<ij>} σ_i σ_j)` over all `2^{N²}` configurations.
pub fn partition_brute_force(lattice: &Lattice, coupling: f64, max_side: usize) -> Result<f64> {
    check_brute_size(lattice, max_side)?;
    let hist = aligned_histogram(lattice, lattice.config_range()?);
    Ok(partition_from_histogram(lattice, &hist, coupling))
}

/// A nonempty bond subset in which every site has even valence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvenSubgraph {
    bonds: u128,
}

impl EvenSubgraph {
    pub fn from_mask(lattice: &Lattice, bonds: u128) -> Option<Self> {
        (bonds != 0 && is_even_mask(lattice, bonds)).then_some(Self { bonds })
    }

    pub fn mask(&self) -> u128 {
        self.bonds
    }

    /// Bond count `L`.
    pub fn len(&self) -> usize {
        self.bonds.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bonds == 0
    }

    pub fn contains(&self, bond: usize) -> bool {
        bond < 128 && self.bonds >> bond & 1 == 1
    }

    /// `I_G(u) = u^L`.
    pub fn weight(&self, u: f64) -> f64 {
        math::powi(u, self.len() as u32)
    }
}

fn is_even_mask(lattice: &Lattice, mask: u128) -> bool {
    let mut parity = vec![false; lattice.site_count()];
    for b in lattice.bonds().iter().filter(|b| mask >> b.id & 1 == 1) {
        parity[lattice.site_index(b.tail)] ^= true;
        parity[lattice.site_index(b.head)] ^= true;
    }
    let x = lattice.bond_count();
    let in_range = x >= 128 || mask >> x == 0;
    in_range && parity.iter().all(|odd| !odd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumerationStrategy {
    /// Subset scan while `x` fits the scan budget, face cycles beyond.
    #[default]
    Auto,
    /// Depth-first scan over all bond subsets with parity pruning.
    SubsetScan,
    /// XOR combinations of the `(N-1)²` unit-square cycles.
    FaceCycles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_scan_bonds: usize,
    pub max_faces: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self { max_scan_bonds: 24, max_faces: 20 }
    }
}

fn face_cycles(lattice: &Lattice) -> Vec<u128> {
    let n = lattice.side();
    let h = lattice.horizontal_bond_count();
    let mut faces = Vec::with_capacity((n - 1) * (n - 1));
    for y in 0..n - 1 {
        for x in 0..n - 1 {
            let bottom = y * (n - 1) + x;
            let top = (y + 1) * (n - 1) + x;
            let left = h + y * n + x;
            faces.push(1u128 << bottom | 1 << top | 1 << left | 1 << (left + 1));
        }
    }
    faces
}

/// Visit the bond mask of every nonempty even subgraph exactly once.
pub fn for_each_even_subgraph(
    lattice: &Lattice,
    strategy: EnumerationStrategy,
    budget: EnumerationBudget,
    mut visit: impl FnMut(u128),
) -> Result<()> {
    let x = lattice.bond_count();
    if x > 128 {
        return Err(Error::Intractable { what: "bond mask width", limit: 128 });
    }
    let faces = (lattice.side() - 1) * (lattice.side() - 1);
    let use_scan = match strategy {
        EnumerationStrategy::SubsetScan => true,
        EnumerationStrategy::FaceCycles => false,
        EnumerationStrategy::Auto => x <= budget.max_scan_bonds,
    };
    if use_scan {
        if x > budget.max_scan_bonds {
            return Err(Error::Intractable { what: "subset-scan bond count", limit: budget.max_scan_bonds as u64 });
        }
        SubsetScan::new(lattice).run(&mut visit);
    } else {
        if faces > budget.max_faces {
            return Err(Error::Intractable { what: "face-cycle count", limit: budget.max_faces as u64 });
        }
        let basis = face_cycles(lattice);
        let mut mask = 0u128;
        for i in 1u64..1 << faces {
            mask ^= basis[i.trailing_zeros() as usize];
            visit(mask);
        }
    }
    Ok(())
}

struct SubsetScan {
    sites: usize,
    endpoints: Vec<(usize, usize)>,
    /// For each bond, sites whose last incident bond it is.
    closes: Vec<Vec<usize>>,
}

impl SubsetScan {
    fn new(lattice: &Lattice) -> Self {
        let mut last = vec![None; lattice.site_count()];
        let endpoints: Vec<_> = lattice
            .bonds()
            .iter()
            .map(|b| (lattice.site_index(b.tail), lattice.site_index(b.head)))
            .collect();
        for (id, &(a, b)) in endpoints.iter().enumerate() {
            last[a] = Some(id);
            last[b] = Some(id);
        }
        let mut closes = vec![Vec::new(); endpoints.len()];
        for (site, id) in last.iter().enumerate() {
            if let Some(id) = id {
                closes[*id].push(site);
            }
        }
        Self { sites: lattice.site_count(), endpoints, closes }
    }

    fn run(&self, visit: &mut impl FnMut(u128)) {
        let mut parity = vec![false; self.sites];
        self.descend(0, 0, &mut parity, visit);
    }

    fn descend(&self, bond: usize, mask: u128, parity: &mut [bool], visit: &mut impl FnMut(u128)) {
        if bond == self.endpoints.len() {
            if mask != 0 {
                visit(mask);
            }
            return;
        }
        let (a, b) = self.endpoints[bond];
        for take in [false, true] {
            if take {
                parity[a] ^= true;
                parity[b] ^= true;
            }
            if self.closes[bond].iter().all(|&s| !parity[s]) {
                let next = if take { mask | 1 << bond } else { mask };
                self.descend(bond + 1, next, parity, visit);
            }
            if take {
                parity[a] ^= true;
                parity[b] ^= true;
            }
        }
    }
}

/// All nonempty even subgraphs, sorted by bond mask.
pub fn enumerate_even_subgraphs(
    lattice: &Lattice,
    strategy: EnumerationStrategy,
    budget: EnumerationBudget,
) -> Result<Vec<EvenSubgraph>> {
    let mut out = Vec::new();
    for_each_even_subgraph(lattice, strategy, budget, |bonds| out.push(EvenSubgraph { bonds }))?;
    out.sort_unstable();
    Ok(out)
}

/// `1 + Σ_G u^{L(G)}`: the coefficient of `u^m` counts even subgraphs with
/// `m` bonds.
pub fn graph_generating_polynomial(
    lattice: &Lattice,
    strategy: EnumerationStrategy,
    budget: EnumerationBudget,
) -> Result<IntPolynomial> {
    let mut counts = vec![0i128; lattice.bond_count() + 1];
    counts[0] = 1;
    for_each_even_subgraph(lattice, strategy, budget, |bonds| counts[bonds.count_ones() as usize] += 1)?;
    Ok(IntPolynomial::from_coeffs(counts))
}

/// Prefactor `2^V cosh^x(K)` shared by the graph and path forms.
pub fn high_temperature_prefactor(lattice: &Lattice, coupling: f64) -> f64 {
    math::powi(2.0, lattice.site_count() as u32) * math::powi(math::cosh(coupling), lattice.bond_count() as u32)
}

/// `Z = 2^V (1-u²)^{-N(N-1)} (1 + Σ_G u^L)`.
pub fn partition_from_polynomial(lattice: &Lattice, polynomial: &IntPolynomial, coupling: f64) -> f64 {
    high_temperature_prefactor(lattice, coupling) * polynomial.eval(math::tanh(coupling))
}

pub fn partition_from_graphs(lattice: &Lattice, coupling: f64, budget: EnumerationBudget) -> Result<f64> {
    let poly = graph_generating_polynomial(lattice, EnumerationStrategy::Auto, budget)?;
    Ok(partition_from_polynomial(lattice, &poly, coupling))
}
