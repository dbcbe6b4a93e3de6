//! The colored N×N planar square lattice.
//!
//! Bonds are numbered densely: the `N(N-1)` horizontal bonds first in
//! row-major order (`id = y·(N-1) + x`, oriented `+x`), then the vertical
//! bonds (`id = N(N-1) + y·N + x`, oriented `+y`). Site `k` is `(k mod N,
//! k div N)`; in a [`SpinConfig`] bit `k` set means `σ_k = +1`.

use alloc::vec::Vec;
use core::ops::Range;

use crate::{Error, Result};

/// Largest side length a [`SpinConfig`] bit word can hold.
pub const MAX_SPIN_SIDE: usize = 8;

pub type BondId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub x: usize,
    pub y: usize,
}

impl Site {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// Direction of motion along a step.
///
/// The numeric index follows the step-matrix convention: 1 = moving up,
/// 2 = moving down, 3 = moving rightward (arriving "from the left"),
/// 4 = moving leftward (arriving "from the right").
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Up,
    Down,
    Right,
    Left,
}

/// How the next step relates to the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Turn {
    Straight,
    /// Counterclockwise quarter turn.
    Left,
    /// Clockwise quarter turn.
    Right,
    Reverse,
}

impl Turn {
    /// Signed quarter turns: +1 counterclockwise, -1 clockwise.
    pub fn quarter_turns(self) -> Option<i64> {
        match self {
            Turn::Straight => Some(0),
            Turn::Left => Some(1),
            Turn::Right => Some(-1),
            Turn::Reverse => None,
        }
    }
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Right, Direction::Left];

    /// 1-based step-matrix index.
    pub fn index(self) -> usize {
        match self {
            Direction::Up => 1,
            Direction::Down => 2,
            Direction::Right => 3,
            Direction::Left => 4,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(Direction::Up),
            2 => Some(Direction::Down),
            3 => Some(Direction::Right),
            4 => Some(Direction::Left),
            _ => None,
        }
    }

    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::Up => (0, 1),
            Direction::Down => (0, -1),
            Direction::Right => (1, 0),
            Direction::Left => (-1, 0),
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }

    pub fn rotate_ccw(self) -> Self {
        match self {
            Direction::Up => Direction::Left,
            Direction::Left => Direction::Down,
            Direction::Down => Direction::Right,
            Direction::Right => Direction::Up,
        }
    }

    pub fn turn_to(self, next: Direction) -> Turn {
        if next == self {
            Turn::Straight
        } else if next == self.reverse() {
            Turn::Reverse
        } else if next == self.rotate_ccw() {
            Turn::Left
        } else {
            Turn::Right
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::Right | Direction::Left)
    }
}

/// Traversal sense of a bond relative to its fixed orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sense {
    Along,
    Against,
}

impl Sense {
    pub fn flip(self) -> Self {
        match self {
            Sense::Along => Sense::Against,
            Sense::Against => Sense::Along,
        }
    }

    /// The exponent `e = ±1` of a word letter.
    pub fn exponent(self) -> i8 {
        match self {
            Sense::Along => 1,
            Sense::Against => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub id: BondId,
    /// Start of the oriented bond.
    pub tail: Site,
    /// End of the oriented bond.
    pub head: Site,
}

impl Bond {
    pub fn is_horizontal(&self) -> bool {
        self.tail.y == self.head.y
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    side: usize,
    bonds: Vec<Bond>,
}

impl Lattice {
    pub fn new(side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::InvalidSize(side));
        }
        let n = side;
        let mut bonds = Vec::with_capacity(2 * n * (n - 1));
        for y in 0..n {
            for x in 0..n - 1 {
                bonds.push(Bond { id: bonds.len(), tail: Site::new(x, y), head: Site::new(x + 1, y) });
            }
        }
        for y in 0..n - 1 {
            for x in 0..n {
                bonds.push(Bond { id: bonds.len(), tail: Site::new(x, y), head: Site::new(x, y + 1) });
            }
        }
        Ok(Self { side, bonds })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// `V = N²`.
    pub fn site_count(&self) -> usize {
        self.side * self.side
    }

    /// `x = 2N(N-1)`.
    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn horizontal_bond_count(&self) -> usize {
        self.side * (self.side - 1)
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, id: BondId) -> Option<&Bond> {
        self.bonds.get(id)
    }

    pub fn site_index(&self, site: Site) -> usize {
        site.y * self.side + site.x
    }

    pub fn site_at(&self, index: usize) -> Site {
        Site::new(index % self.side, index / self.side)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.site_count()).map(|k| self.site_at(k))
    }

    pub fn contains(&self, site: Site) -> bool {
        site.x < self.side && site.y < self.side
    }

    /// Neighbouring site one step away, if it is inside the lattice.
    pub fn step(&self, site: Site, dir: Direction) -> Option<Site> {
        let (dx, dy) = dir.delta();
        let x = site.x.checked_add_signed(dx as isize)?;
        let y = site.y.checked_add_signed(dy as isize)?;
        let next = Site::new(x, y);
        self.contains(next).then_some(next)
    }

    /// The bond left through when moving from `site` in direction `dir`.
    pub fn bond_towards(&self, site: Site, dir: Direction) -> Option<(BondId, Sense)> {
        self.step(site, dir)?;
        let n = self.side;
        let h = self.horizontal_bond_count();
        Some(match dir {
            Direction::Right => (site.y * (n - 1) + site.x, Sense::Along),
            Direction::Left => (site.y * (n - 1) + site.x - 1, Sense::Against),
            Direction::Up => (h + site.y * n + site.x, Sense::Along),
            Direction::Down => (h + (site.y - 1) * n + site.x, Sense::Against),
        })
    }

    /// Direction of motion when a bond is crossed in the given sense.
    pub fn traversal_direction(&self, id: BondId, sense: Sense) -> Option<Direction> {
        let bond = self.bond(id)?;
        let along = if bond.is_horizontal() { Direction::Right } else { Direction::Up };
        Some(match sense {
            Sense::Along => along,
            Sense::Against => along.reverse(),
        })
    }

    pub fn valence(&self, site: Site) -> usize {
        Direction::ALL.iter().filter(|&&d| self.step(site, d).is_some()).count()
    }

    /// Number of aligned nearest-neighbour pairs in a configuration.
    pub fn aligned_bonds(&self, config: SpinConfig) -> u32 {
        let masks = BondMasks::new(self.side);
        masks.aligned(config.bits)
    }

    /// `E = -J Σ σ_i σ_j` over all bonds.
    pub fn config_energy(&self, sigma: SpinConfig, coupling_j: f64) -> Result<f64> {
        if sigma.sites != self.site_count() {
            return Err(Error::SizeMismatch { expected: self.site_count(), got: sigma.sites });
        }
        let aligned = self.aligned_bonds(sigma) as i64;
        let pair_sum = 2 * aligned - self.bond_count() as i64;
        Ok(-coupling_j * pair_sum as f64)
    }

    /// All `2^V` configurations, in increasing bit order.
    pub fn configs(&self) -> Result<impl Iterator<Item = SpinConfig>> {
        let range = self.config_range()?;
        let sites = self.site_count();
        Ok(range.map(move |bits| SpinConfig { bits, sites }))
    }

    pub fn config_range(&self) -> Result<Range<u64>> {
        if self.side > MAX_SPIN_SIDE {
            return Err(Error::Intractable { what: "spin configuration width", limit: MAX_SPIN_SIDE as u64 });
        }
        let sites = self.site_count() as u32;
        let end = if sites == 64 { u64::MAX } else { 1u64 << sites };
        Ok(0..end)
    }
}

/// Precomputed masks for counting aligned pairs with bit operations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BondMasks {
    side: u32,
    horizontal: u64,
    vertical: u64,
}

impl BondMasks {
    pub(crate) fn new(side: usize) -> Self {
        let mut horizontal = 0u64;
        let mut vertical = 0u64;
        for y in 0..side {
            for x in 0..side {
                let k = y * side + x;
                if x + 1 < side {
                    horizontal |= 1 << k;
                }
                if y + 1 < side {
                    vertical |= 1 << k;
                }
            }
        }
        Self { side: side as u32, horizontal, vertical }
    }

    pub(crate) fn aligned(&self, bits: u64) -> u32 {
        let h = !(bits ^ (bits >> 1)) & self.horizontal;
        let v = if self.side >= 64 { 0 } else { !(bits ^ (bits >> self.side)) & self.vertical };
        h.count_ones() + v.count_ones()
    }
}

/// A spin assignment packed into a bit word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    bits: u64,
    sites: usize,
}

impl SpinConfig {
    pub fn from_bits(bits: u64, sites: usize) -> Result<Self> {
        if sites > 64 || (sites < 64 && bits >> sites != 0) {
            return Err(Error::SizeMismatch { expected: sites, got: 64 - bits.leading_zeros() as usize });
        }
        Ok(Self { bits, sites })
    }

    /// Build from explicit `±1` spins; any positive value counts as `+1`.
    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        if spins.len() > 64 {
            return Err(Error::SizeMismatch { expected: 64, got: spins.len() });
        }
        let bits = spins.iter().enumerate().filter(|(_, &s)| s > 0).fold(0u64, |acc, (k, _)| acc | 1 << k);
        Ok(Self { bits, sites: spins.len() })
    }

    pub fn all_up(sites: usize) -> Self {
        let bits = if sites == 64 { u64::MAX } else { (1u64 << sites) - 1 };
        Self { bits, sites }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn spin(&self, k: usize) -> i8 {
        if self.bits >> k & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn flipped(&self) -> Self {
        Self { bits: !self.bits & Self::all_up(self.sites).bits, sites: self.sites }
    }

    pub fn with_flip(&self, k: usize) -> Self {
        Self { bits: self.bits ^ (1 << k), sites: self.sites }
    }
}
