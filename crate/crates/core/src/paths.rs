//! Closed non-backtracking lattice paths.
//!
//! A path is a cyclic word of `(bond, ±1)` letters. Two words are the same
//! class when one is a rotation of the other or of its inversion. Each
//! class carries the sign `(-1)^{1+t}` where `t` is the tangent winding
//! number, tracked here as a power of `α = e^{iπ/4}` (one factor per
//! counterclockwise turn, `ᾱ` per clockwise turn) so the result is exact.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::hightemp::{self, EnumerationBudget, EnumerationStrategy};
use crate::lattice::{BondId, Direction, Lattice, Sense, Site};
use crate::math;
use crate::poly::IntPolynomial;
use crate::{Error, Result};

/// Longest closed path the depth-first enumerator accepts.
pub const MAX_ENUMERATION_LENGTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub bond: BondId,
    pub sense: Sense,
}

impl Step {
    pub fn new(bond: BondId, sense: Sense) -> Self {
        Self { bond, sense }
    }

    pub fn inverse(self) -> Self {
        Self { bond: self.bond, sense: self.sense.flip() }
    }

    fn code(self) -> u32 {
        (self.bond as u32) << 1 | matches!(self.sense, Sense::Against) as u32
    }

    fn from_code(code: u32) -> Self {
        let sense = if code & 1 == 1 { Sense::Against } else { Sense::Along };
        Self { bond: (code >> 1) as BondId, sense }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Sign of a closed move sequence. The wrap-around turn from the last move
/// back to the first is included.
pub fn winding_sign(moves: &[Direction]) -> Result<Sign> {
    let quarter_turns = total_quarter_turns(moves)?;
    // α^T is real only for T ≡ 0 or 4 (mod 8); the final factor -1 gives s(p).
    match quarter_turns.rem_euclid(8) {
        0 => Ok(Sign::Minus),
        4 => Ok(Sign::Plus),
        _ => Err(Error::PhaseNotReal { quarter_turns }),
    }
}

/// Net counterclockwise quarter turns around a closed move sequence.
pub fn total_quarter_turns(moves: &[Direction]) -> Result<i64> {
    if moves.is_empty() {
        return Err(Error::InvalidPath("empty word"));
    }
    let mut total = 0i64;
    for (i, &m) in moves.iter().enumerate() {
        let next = moves[(i + 1) % moves.len()];
        total += m.turn_to(next).quarter_turns().ok_or(Error::InvalidPath("backtracking step"))?;
    }
    Ok(total)
}

/// Integer winding number `t` of the tangent vector.
pub fn turning_number(moves: &[Direction]) -> Result<i64> {
    let q = total_quarter_turns(moves)?;
    if q % 4 != 0 {
        return Err(Error::PhaseNotReal { quarter_turns: q });
    }
    Ok(q / 4)
}

/// `W_p(u) = s(p) · u^l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedAmplitude {
    pub sign: Sign,
    pub power: usize,
}

impl SignedAmplitude {
    pub fn eval(&self, u: f64) -> f64 {
        self.sign.value() as f64 * math::powi(u, self.power as u32)
    }
}

/// A validated closed non-backtracking word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathWord {
    steps: Vec<Step>,
}

impl PathWord {
    pub fn new(lattice: &Lattice, steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidPath("empty word"));
        }
        let ends = steps
            .iter()
            .map(|s| endpoints(lattice, *s))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::InvalidPath("unknown bond"))?;
        for i in 0..steps.len() {
            let j = (i + 1) % steps.len();
            if ends[i].1 != ends[j].0 {
                return Err(Error::InvalidPath(if j == 0 { "word is not closed" } else { "steps do not chain" }));
            }
            if steps[j] == steps[i].inverse() {
                return Err(Error::InvalidPath("backtracking step"));
            }
        }
        Ok(Self { steps })
    }

    /// Word traced by `moves` from `start`.
    pub fn from_moves(lattice: &Lattice, start: Site, moves: &[Direction]) -> Result<Self> {
        let mut site = start;
        let mut steps = Vec::with_capacity(moves.len());
        for &m in moves {
            let (bond, sense) = lattice.bond_towards(site, m).ok_or(Error::InvalidPath("step leaves the lattice"))?;
            steps.push(Step { bond, sense });
            site = lattice.step(site, m).ok_or(Error::InvalidPath("step leaves the lattice"))?;
        }
        Self::new(lattice, steps)
    }

    fn from_codes_unchecked(codes: &[u32]) -> Self {
        Self { steps: codes.iter().map(|&c| Step::from_code(c)).collect() }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rotated(&self, by: usize) -> Self {
        let mut steps = self.steps.clone();
        steps.rotate_left(by % self.steps.len());
        Self { steps }
    }

    /// `p^{-1}`: reversed order, every exponent flipped.
    pub fn inverse(&self) -> Self {
        Self { steps: self.steps.iter().rev().map(|s| s.inverse()).collect() }
    }

    /// Repeated `w` times.
    pub fn repeated(&self, w: usize) -> Self {
        Self { steps: self.steps.iter().copied().cycle().take(self.steps.len() * w).collect() }
    }

    pub fn moves(&self, lattice: &Lattice) -> Vec<Direction> {
        self.steps
            .iter()
            .map(|s| lattice.traversal_direction(s.bond, s.sense).expect("validated word"))
            .collect()
    }

    pub fn start(&self, lattice: &Lattice) -> Site {
        endpoints(lattice, self.steps[0]).expect("validated word").0
    }

    /// Largest `w` with the word a `w`-fold repetition.
    pub fn period(&self) -> usize {
        let codes: Vec<u32> = self.steps.iter().map(|s| s.code()).collect();
        period_of(&codes)
    }

    pub fn sign(&self, lattice: &Lattice) -> Result<Sign> {
        winding_sign(&self.moves(lattice))
    }

    pub fn amplitude(&self, lattice: &Lattice) -> Result<SignedAmplitude> {
        Ok(SignedAmplitude { sign: self.sign(lattice)?, power: self.len() })
    }

    pub fn canonicalize(&self) -> PathClass {
        let codes: Vec<u32> = self.steps.iter().map(|s| s.code()).collect();
        PathClass { canonical: Self::from_codes_unchecked(&canonical_codes(&codes)), period: period_of(&codes) }
    }
}

fn endpoints(lattice: &Lattice, step: Step) -> Option<(Site, Site)> {
    let b = lattice.bond(step.bond)?;
    Some(match step.sense {
        Sense::Along => (b.tail, b.head),
        Sense::Against => (b.head, b.tail),
    })
}

fn period_of(codes: &[u32]) -> usize {
    let l = codes.len();
    (1..=l)
        .filter(|d| l.is_multiple_of(*d))
        .find(|&d| (d..l).all(|i| codes[i] == codes[i - d]))
        .map_or(1, |d| l / d)
}

fn inverse_codes(codes: &[u32]) -> Vec<u32> {
    codes.iter().rev().map(|c| c ^ 1).collect()
}

/// Lexicographic minimum over all rotations of the word and its inversion.
fn canonical_codes(codes: &[u32]) -> Vec<u32> {
    let inv = inverse_codes(codes);
    let l = codes.len();
    let mut best: Option<(usize, bool)> = None;
    let at = |which: bool, r: usize, i: usize| if which { inv[(r + i) % l] } else { codes[(r + i) % l] };
    for which in [false, true] {
        for r in 0..l {
            let better = match best {
                None => true,
                Some((br, bw)) => (0..l).map(|i| at(which, r, i)).lt((0..l).map(|i| at(bw, br, i))),
            };
            if better {
                best = Some((r, which));
            }
        }
    }
    let (r, which) = best.expect("nonempty word");
    (0..l).map(|i| at(which, r, i)).collect()
}

/// An equivalence class under rotation and inversion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathClass {
    pub canonical: PathWord,
    pub period: usize,
}

impl PathClass {
    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.period > 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntry {
    pub class: PathClass,
    pub amplitude: SignedAmplitude,
}

#[derive(Debug, Clone, Copy)]
struct Tally {
    hits: u64,
    period: usize,
    sign: Sign,
}

/// Accumulates rooted directed closed walks keyed by canonical class.
///
/// Walks can be recorded per start site independently and merged; every
/// class of length `l` and period `w` must end up with `2l/w` hits.
#[derive(Debug, Clone, Default)]
pub struct ClassTally {
    max_len: usize,
    entries: BTreeMap<Vec<u32>, Tally>,
    walks: u64,
}

impl ClassTally {
    pub fn new(max_len: usize) -> Result<Self> {
        if max_len > MAX_ENUMERATION_LENGTH {
            return Err(Error::Intractable { what: "closed path length", limit: MAX_ENUMERATION_LENGTH as u64 });
        }
        Ok(Self { max_len, ..Self::default() })
    }

    /// Number of rooted directed walks recorded so far.
    pub fn walks(&self) -> u64 {
        self.walks
    }

    pub fn record_walks_from(&mut self, lattice: &Lattice, start: Site) -> Result<()> {
        let mut moves = Vec::with_capacity(self.max_len);
        let mut found = Vec::new();
        walk_dfs(lattice, start, start, self.max_len, &mut moves, &mut |m| found.push(m.to_vec()));
        for m in found {
            let word = PathWord::from_moves(lattice, start, &m)?;
            let codes: Vec<u32> = word.steps.iter().map(|s| s.code()).collect();
            let sign = winding_sign(&m)?;
            let period = period_of(&codes);
            let key = canonical_codes(&codes);
            self.walks += 1;
            let entry = self.entries.entry(key).or_insert(Tally { hits: 0, period, sign });
            entry.hits += 1;
            if entry.sign != sign || entry.period != period {
                return Err(Error::InvalidPath("sign or period differs within a class"));
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: ClassTally) -> Result<()> {
        self.walks += other.walks;
        for (key, t) in other.entries {
            let entry = self.entries.entry(key).or_insert(Tally { hits: 0, ..t });
            if entry.sign != t.sign || entry.period != t.period {
                return Err(Error::InvalidPath("sign or period differs within a class"));
            }
            entry.hits += t.hits;
        }
        Ok(())
    }

    /// Nonperiodic classes, ordered by length then canonical word.
    pub fn finish(self) -> Result<Vec<ClassEntry>> {
        let mut out = Vec::new();
        for (codes, t) in self.entries {
            let l = codes.len();
            if t.hits != (2 * l / t.period) as u64 {
                return Err(Error::InvalidPath("rooted-walk multiplicity does not match class length"));
            }
            if t.period > 1 {
                continue;
            }
            out.push(ClassEntry {
                class: PathClass { canonical: PathWord::from_codes_unchecked(&codes), period: 1 },
                amplitude: SignedAmplitude { sign: t.sign, power: l },
            });
        }
        out.sort_by(|a, b| a.class.len().cmp(&b.class.len()).then_with(|| a.class.cmp(&b.class)));
        Ok(out)
    }
}

/// Depth-first search over non-backtracking walks returning to `origin`.
///
/// `emit` receives the move list of every closed walk whose wrap-around
/// turn is also non-backtracking.
fn walk_dfs(
    lattice: &Lattice,
    origin: Site,
    at: Site,
    max_len: usize,
    moves: &mut Vec<Direction>,
    emit: &mut impl FnMut(&[Direction]),
) {
    let depth = moves.len();
    if depth > 0 && at == origin && moves[depth - 1] != moves[0].reverse() {
        emit(moves);
    }
    if depth == max_len {
        return;
    }
    let remaining = max_len - depth - 1;
    for d in Direction::ALL {
        if depth > 0 && d == moves[depth - 1].reverse() {
            continue;
        }
        let Some(next) = lattice.step(at, d) else { continue };
        if next.x.abs_diff(origin.x) + next.y.abs_diff(origin.y) > remaining {
            continue;
        }
        moves.push(d);
        walk_dfs(lattice, origin, next, max_len, moves, emit);
        moves.pop();
    }
}

/// Every nonperiodic closed-path class of length `≤ max_len`, with its
/// signed amplitude.
pub fn enumerate_closed_classes(lattice: &Lattice, max_len: usize) -> Result<Vec<ClassEntry>> {
    let mut tally = ClassTally::new(max_len)?;
    for site in lattice.sites() {
        tally.record_walks_from(lattice, site)?;
    }
    tally.finish()
}

/// Signed walk counts for closed walks through a fixed point of the
/// unbounded square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasePointSum {
    pub length: usize,
    /// Rooted directed closed non-backtracking walks.
    pub walks: u64,
    /// `Σ α^T` over those walks (always an integer).
    pub phase_sum: i64,
}

impl BasePointSum {
    /// `Σ_{p(n,P₁)} W_p(u)`: the sign is `-α^T` and each undirected walk is
    /// counted once, hence `-phase_sum / 2`.
    pub fn amplitude(&self, u: f64) -> f64 {
        (-self.phase_sum) as f64 / 2.0 * math::powi(u, self.length as u32)
    }
}

pub fn free_plane_base_point_sum(length: usize) -> Result<BasePointSum> {
    if length > MAX_ENUMERATION_LENGTH {
        return Err(Error::Intractable { what: "closed path length", limit: MAX_ENUMERATION_LENGTH as u64 });
    }
    // A centred lattice wide enough that no walk can reach the border.
    let side = 2 * length + 1;
    let plane = Lattice::new(side)?;
    let origin = Site::new(length, length);
    let mut sum = BasePointSum { length, walks: 0, phase_sum: 0 };
    let mut moves = Vec::with_capacity(length);
    let mut failure = None;
    walk_dfs(&plane, origin, origin, length, &mut moves, &mut |m| {
        if m.len() != length {
            return;
        }
        match winding_sign(m) {
            Ok(sign) => {
                sum.walks += 1;
                sum.phase_sum -= sign.value() as i64;
            }
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(sum),
    }
}

/// `∏ (1 + W_p)` over the given classes, expanded exactly and truncated at
/// `u^max_order`.
pub fn product_polynomial(classes: &[ClassEntry], max_order: usize) -> Result<IntPolynomial> {
    let mut poly = IntPolynomial::one();
    for c in classes.iter().filter(|c| c.amplitude.power <= max_order) {
        poly.mul_binomial_truncated(c.amplitude.sign.value(), c.amplitude.power, max_order)?;
    }
    Ok(poly)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderComparison {
    pub order: usize,
    pub graphs: i128,
    pub paths: i128,
}

impl OrderComparison {
    pub fn matches(&self) -> bool {
        self.graphs == self.paths
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub side: usize,
    pub max_order: usize,
    pub classes: usize,
    pub orders: Vec<OrderComparison>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.orders.iter().all(OrderComparison::matches)
    }

    pub fn from_parts(side: usize, max_order: usize, graphs: &IntPolynomial, classes: &[ClassEntry]) -> Result<Self> {
        let paths = product_polynomial(classes, max_order)?;
        let orders = (0..=max_order)
            .map(|order| OrderComparison { order, graphs: graphs.coeff(order), paths: paths.coeff(order) })
            .collect();
        Ok(Self { side, max_order, classes: classes.len(), orders })
    }
}

/// Compare `1 + Σ_G u^L` with `∏_{[p]} (1 + W_p)` coefficient by
/// coefficient up to `u^max_order`. A mismatch is reported, not raised.
pub fn feynman_identity_check(lattice: &Lattice, max_order: usize, budget: EnumerationBudget) -> Result<IdentityReport> {
    let graphs = hightemp::graph_generating_polynomial(lattice, EnumerationStrategy::Auto, budget)?;
    let classes = enumerate_closed_classes(lattice, max_order)?;
    IdentityReport::from_parts(lattice.side(), max_order, &graphs.truncated(max_order), &classes)
}

/// `∏ (1 + W_p(u))` as a float over the given classes.
pub fn class_product_value(classes: &[ClassEntry], u: f64) -> f64 {
    classes.iter().fold(1.0, |acc, c| acc * (1.0 + c.amplitude.eval(u)))
}

/// `Z ≈ 2^V cosh^x(K) ∏_{l(p) ≤ max_len} (1 + W_p(u))`. Exact when every
/// class fits within `max_len`; otherwise an approximation that improves
/// with `max_len` for small `u`.
pub fn partition_product_truncated(lattice: &Lattice, coupling: f64, max_len: usize) -> Result<f64> {
    let classes = enumerate_closed_classes(lattice, max_len)?;
    Ok(hightemp::high_temperature_prefactor(lattice, coupling) * class_product_value(&classes, math::tanh(coupling)))
}
