//! Finite dynamics of the Henon map on residue balls of the unit ball.
//!
//! For parameters with `max(|a|, |b|) <= 1` the map is nonexpanding on
//! `B_1(0,0)`, so it induces a well-defined self-map of the `p^(2k)` balls of
//! radius `p^-k`, i.e. of `(Z/p^k)^2` with the coefficients reduced mod `p^k`.
//! Everything here is exact u64 residue arithmetic: integral coefficients mean
//! no precision is ever lost.
//!
//! The cycle census of that functional graph (every node feeds exactly one
//! cycle) drives the attractor analysis: maximal cycle lengths per level,
//! periodic-ball containment trees, membership tests for the filled Julia
//! set, attracting-cycle convergence, and orbit equidistribution statistics.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::henon::{HenonParams, PlanePoint, RegionTag};
use crate::localfield::{mul_mod, HalfLogNorm, NormBound};
use crate::periodic;

/// The ball of radius `p^-level` with center residues `(cx, cy)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BallId {
    pub level: u32,
    pub cx: u64,
    pub cy: u64,
}

/// Enumeration limits: `max_states` is the hard cap on enumerated states;
/// dense successor tables are materialized up to `table_threshold` states and
/// the sparse lifted-census path is used beyond that.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DynamicsBudget {
    pub max_states: u128,
    pub table_threshold: u64,
}

impl Default for DynamicsBudget {
    fn default() -> Self {
        DynamicsBudget { max_states: 1 << 34, table_threshold: 1 << 28 }
    }
}

impl DynamicsBudget {
    pub fn with_max_states(max_states: u128) -> Self {
        DynamicsBudget { max_states, ..Default::default() }
    }
}

/// The reduction of the map to `(Z/p^k)^2`, as a total self-map.  Holds a
/// materialized successor table when the state count is within the table
/// threshold, and stays in closure form otherwise.
#[derive(Debug, Clone)]
pub struct ReducedMap {
    p: u64,
    level: u32,
    modulus: u64,
    a_mod: u64,
    b_mod: u64,
    table: Option<Vec<u32>>,
}

fn require_integral_region(params: &HenonParams) -> Result<()> {
    match params.classify_region() {
        RegionTag::I | RegionTag::IIplus => Ok(()),
        other => Err(Error::WrongRegion {
            expected: "I or II+".to_string(),
            found: other.to_string(),
        }),
    }
}

fn pow_u64(p: u64, k: u32) -> u64 {
    p.checked_pow(k).expect("p^k fits u64")
}

/// State indices are `x + y * p^k`, so `p^(2k)` must fit u64 arithmetic.
fn check_level_fits(p: u64, k: u32, budget: &DynamicsBudget) -> Result<()> {
    let bits = 64 - p.leading_zeros() as u64;
    if 2 * k as u64 * bits >= 63 {
        return Err(Error::BudgetExceeded { states: u128::MAX, budget: budget.max_states });
    }
    Ok(())
}

/// Exact residue of an integral rational modulo `p^k`.
fn reduce_rational_mod(
    r: &num_rational::BigRational,
    p: u64,
    k: u32,
) -> Result<u64> {
    crate::localfield::PadicNumber::from_rational(r, p, k.max(1))?.reduce_mod(k)
}

impl ReducedMap {
    /// Reduce the map modulo `p^k`.  Requires parameters in region I or II+
    /// (equivalently integral coefficients, which make the ball map
    /// well-defined).
    pub fn new(params: &HenonParams, k: u32, budget: &DynamicsBudget) -> Result<Self> {
        require_integral_region(params)?;
        if k < 1 {
            return Err(Error::Parse("level k must be >= 1".into()));
        }
        let p = params.prime();
        check_level_fits(p, k, budget)?;
        let modulus = pow_u64(p, k);
        let states = (modulus as u128) * (modulus as u128);
        if states > budget.max_states {
            return Err(Error::BudgetExceeded { states, budget: budget.max_states });
        }
        let a_mod = reduce_rational_mod(params.a_rational(), p, k)?;
        let b_mod = reduce_rational_mod(params.b_rational(), p, k)?;
        let mut map = ReducedMap { p, level: k, modulus, a_mod, b_mod, table: None };
        if states <= budget.table_threshold as u128 {
            let n = states as usize;
            let table = (0..n as u64)
                .map(|idx| map.index_of_state(map.step(map.state_of_index(idx))) as u32)
                .collect();
            map.table = Some(table);
        }
        Ok(map)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn state_count(&self) -> u128 {
        (self.modulus as u128) * (self.modulus as u128)
    }

    pub fn is_materialized(&self) -> bool {
        self.table.is_some()
    }

    /// One step of the reduced map: `(x, y) -> (a + b*y - x^2 mod p^k, x)`.
    pub fn step(&self, (x, y): (u64, u64)) -> (u64, u64) {
        let m = self.modulus;
        let by = mul_mod(self.b_mod, y, m);
        let x2 = mul_mod(x, x, m);
        ((self.a_mod + by + (m - x2)) % m, x)
    }

    pub fn index_of_state(&self, (x, y): (u64, u64)) -> u64 {
        x + y * self.modulus
    }

    pub fn state_of_index(&self, idx: u64) -> (u64, u64) {
        (idx % self.modulus, idx / self.modulus)
    }

    fn step_index(&self, idx: u64) -> u64 {
        match &self.table {
            Some(t) => t[idx as usize] as u64,
            None => self.index_of_state(self.step(self.state_of_index(idx))),
        }
    }
}

/// Cycle census of the reduced map at one level.
#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    pub level: u32,
    /// `(cycle length, number of cycles of that length)`, ascending length.
    pub histogram: Vec<(u64, u64)>,
    /// The largest minimal period among periodic balls.
    pub max_period: u64,
    /// Total number of periodic balls (sum of cycle lengths).
    pub periodic_balls: u64,
    /// Total number of balls at this level, `p^(2k)`.
    pub total_balls: u128,
}

impl CycleReport {
    /// The `P_k` and cycle-composition cells of a CSV row; the histogram is
    /// rendered as `len:count` pairs joined by `;`.
    pub fn csv_cells(&self) -> (String, String) {
        let cycles = self
            .histogram
            .iter()
            .map(|(len, count)| format!("{len}:{count}"))
            .collect::<Vec<_>>()
            .join(";");
        (self.max_period.to_string(), cycles)
    }
}

/// CSV header for cycle-report tables.
pub const CSV_HEADER: &str = "p,a,b,k,P_k,cycles";

/// Full decomposition of one level: the cycles with members, and periodic
/// membership with periods.
#[derive(Debug, Clone)]
pub struct LevelDynamics {
    map: ReducedMap,
    /// Each cycle as the list of member state indices, in orbit order.
    cycles: Vec<Vec<u64>>,
    /// Period of each periodic state.
    period_by_state: HashMap<u64, u64>,
}

impl LevelDynamics {
    /// Decompose level `k`.  Within the table threshold this is a dense
    /// functional-graph walk over all `p^(2k)` states.  Beyond it, only the
    /// lifts of the previous level's periodic balls are enumerated: every
    /// periodic ball at level `k` lies over a periodic ball at level `k-1`,
    /// and that candidate set is closed under the map, so the sparse walk
    /// census is complete for cycles.
    pub fn compute(params: &HenonParams, k: u32, budget: &DynamicsBudget) -> Result<Self> {
        Self::compute_with_prev(params, k, budget, None)
    }

    pub fn compute_with_prev(
        params: &HenonParams,
        k: u32,
        budget: &DynamicsBudget,
        prev: Option<&LevelDynamics>,
    ) -> Result<Self> {
        require_integral_region(params)?;
        if k < 1 {
            return Err(Error::Parse("level k must be >= 1".into()));
        }
        let p = params.prime();
        check_level_fits(p, k, budget)?;
        let states = (pow_u64(p, k) as u128).pow(2);
        if states > budget.max_states {
            return Err(Error::BudgetExceeded { states, budget: budget.max_states });
        }
        // level 1 is always a dense walk over the p^2 residue pairs
        if k == 1 || states <= budget.table_threshold as u128 {
            let map = ReducedMap::new(params, k, budget)?;
            Ok(Self::decompose_dense(map))
        } else {
            let prev_owned;
            let prev_ref = match prev {
                Some(ld) if ld.map.level == k - 1 => ld,
                _ => {
                    prev_owned = Self::compute(params, k - 1, budget)?;
                    &prev_owned
                }
            };
            let candidates: u128 =
                (prev_ref.period_by_state.len() as u128) * (p as u128) * (p as u128);
            if candidates > budget.max_states {
                return Err(Error::BudgetExceeded {
                    states: candidates,
                    budget: budget.max_states,
                });
            }
            let map = ReducedMap {
                p,
                level: k,
                modulus: pow_u64(p, k),
                a_mod: reduce_rational_mod(params.a_rational(), p, k)?,
                b_mod: reduce_rational_mod(params.b_rational(), p, k)?,
                table: None,
            };
            Ok(Self::decompose_sparse(map, prev_ref))
        }
    }

    fn decompose_dense(map: ReducedMap) -> Self {
        let n = map.state_count() as usize;
        // 0 = unvisited, 1 = on the current walk, 2 = settled
        let mut color = vec![0u8; n];
        let mut cycles = Vec::new();
        let mut period_by_state = HashMap::new();
        let mut path = Vec::new();
        for start in 0..n as u64 {
            if color[start as usize] != 0 {
                continue;
            }
            path.clear();
            let mut cur = start;
            while color[cur as usize] == 0 {
                color[cur as usize] = 1;
                path.push(cur);
                cur = map.step_index(cur);
            }
            if color[cur as usize] == 1 {
                let pos = path.iter().position(|&s| s == cur).unwrap();
                let cycle: Vec<u64> = path[pos..].to_vec();
                for &s in &cycle {
                    period_by_state.insert(s, cycle.len() as u64);
                }
                cycles.push(cycle);
            }
            for &s in &path {
                color[s as usize] = 2;
            }
        }
        cycles.sort_by_key(|c| (c.len(), c[0]));
        LevelDynamics { map, cycles, period_by_state }
    }

    fn decompose_sparse(map: ReducedMap, prev: &LevelDynamics) -> Self {
        let p = map.p;
        let prev_mod = prev.map.modulus;
        let mut candidates: Vec<u64> = Vec::new();
        for &prev_idx in prev.period_by_state.keys() {
            let (px, py) = prev.map.state_of_index(prev_idx);
            for i in 0..p {
                for j in 0..p {
                    let s = (px + i * prev_mod, py + j * prev_mod);
                    candidates.push(map.index_of_state(s));
                }
            }
        }
        candidates.sort_unstable();
        let mut color: HashMap<u64, u8> = HashMap::with_capacity(candidates.len());
        let mut cycles = Vec::new();
        let mut period_by_state = HashMap::new();
        let mut path = Vec::new();
        for &start in &candidates {
            if color.get(&start).copied().unwrap_or(0) != 0 {
                continue;
            }
            path.clear();
            let mut cur = start;
            while color.get(&cur).copied().unwrap_or(0) == 0 {
                color.insert(cur, 1);
                path.push(cur);
                cur = map.step_index(cur);
            }
            if color.get(&cur).copied() == Some(1) {
                let pos = path.iter().position(|&s| s == cur).unwrap();
                let cycle: Vec<u64> = path[pos..].to_vec();
                for &s in &cycle {
                    period_by_state.insert(s, cycle.len() as u64);
                }
                cycles.push(cycle);
            }
            for &s in &path {
                color.insert(s, 2);
            }
        }
        cycles.sort_by_key(|c| (c.len(), c[0]));
        LevelDynamics { map, cycles, period_by_state }
    }

    pub fn map(&self) -> &ReducedMap {
        &self.map
    }

    pub fn is_periodic_state(&self, state: (u64, u64)) -> bool {
        self.period_by_state.contains_key(&self.map.index_of_state(state))
    }

    pub fn period_of_state(&self, state: (u64, u64)) -> Option<u64> {
        self.period_by_state.get(&self.map.index_of_state(state)).copied()
    }

    pub fn cycles(&self) -> &[Vec<u64>] {
        &self.cycles
    }

    /// Periodic balls at this level, sorted by `(cx, cy)`.
    pub fn periodic_balls(&self) -> Vec<(BallId, u64)> {
        let mut out: Vec<(BallId, u64)> = self
            .period_by_state
            .iter()
            .map(|(&idx, &period)| {
                let (cx, cy) = self.map.state_of_index(idx);
                (BallId { level: self.map.level, cx, cy }, period)
            })
            .collect();
        out.sort_by_key(|(b, _)| (b.cx, b.cy));
        out
    }

    pub fn report(&self) -> CycleReport {
        let mut hist: HashMap<u64, u64> = HashMap::new();
        for c in &self.cycles {
            *hist.entry(c.len() as u64).or_insert(0) += 1;
        }
        let mut histogram: Vec<(u64, u64)> = hist.into_iter().collect();
        histogram.sort_unstable();
        let max_period = histogram.iter().map(|&(l, _)| l).max().unwrap_or(0);
        let periodic_balls = histogram.iter().map(|&(l, c)| l * c).sum();
        CycleReport {
            level: self.map.level,
            histogram,
            max_period,
            periodic_balls,
            total_balls: self.map.state_count(),
        }
    }
}

/// Build the reduced map at level `k` (see [`ReducedMap::new`]).
pub fn reduce_map(params: &HenonParams, k: u32, budget: &DynamicsBudget) -> Result<ReducedMap> {
    ReducedMap::new(params, k, budget)
}

/// Complete cycle census of the reduced map at level `k`.
pub fn cycle_structure(
    params: &HenonParams,
    k: u32,
    budget: &DynamicsBudget,
) -> Result<CycleReport> {
    Ok(LevelDynamics::compute(params, k, budget)?.report())
}

/// Is the reduced map at level `k` a bijection of `(Z/p^k)^2`?  Equivalent to
/// good reduction (region I) at every level.
pub fn good_reduction_check(
    params: &HenonParams,
    k: u32,
    budget: &DynamicsBudget,
) -> Result<bool> {
    require_integral_region(params)?;
    let map = ReducedMap::new(params, k, budget)?;
    let n = map.state_count();
    if n > budget.table_threshold as u128 {
        return Err(Error::BudgetExceeded { states: n, budget: budget.table_threshold as u128 });
    }
    let n = n as usize;
    let mut hit = vec![false; n];
    let mut covered = 0usize;
    for idx in 0..n as u64 {
        let img = map.step_index(idx) as usize;
        if !hit[img] {
            hit[img] = true;
            covered += 1;
        }
    }
    Ok(covered == n)
}

// ---------------------------------------------------------------------------
// periodic-ball tree
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicBallNode {
    pub ball: BallId,
    pub period: u64,
    /// Index of the containing ball in the previous level's node list.
    pub parent: Option<usize>,
    /// Number of periodic children one level down (0 at the deepest level).
    pub periodic_children: u32,
}

/// Tree of periodic balls for levels `1..=kmax`; parent-child is ball
/// containment.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicBallTree {
    pub levels: Vec<Vec<PeriodicBallNode>>,
}

pub fn periodic_ball_tree(
    params: &HenonParams,
    kmax: u32,
    budget: &DynamicsBudget,
) -> Result<PeriodicBallTree> {
    require_integral_region(params)?;
    let p = params.prime();
    let mut levels: Vec<Vec<PeriodicBallNode>> = Vec::new();
    let mut prev_ld: Option<LevelDynamics> = None;
    let mut prev_index: HashMap<(u64, u64), usize> = HashMap::new();
    for k in 1..=kmax {
        let ld = LevelDynamics::compute_with_prev(params, k, budget, prev_ld.as_ref())?;
        let balls = ld.periodic_balls();
        let mut nodes = Vec::with_capacity(balls.len());
        let mut index = HashMap::with_capacity(balls.len());
        let prev_mod = pow_u64(p, k - 1);
        for (ball, period) in balls {
            let parent = if k == 1 {
                None
            } else {
                let key = (ball.cx % prev_mod, ball.cy % prev_mod);
                let parent_pos = *prev_index
                    .get(&key)
                    .expect("containing ball of a periodic ball is periodic");
                let parent_period = levels[k as usize - 2][parent_pos].period;
                assert!(
                    period % parent_period == 0,
                    "child period {period} not a multiple of parent period {parent_period}"
                );
                levels[k as usize - 2][parent_pos].periodic_children += 1;
                Some(parent_pos)
            };
            index.insert((ball.cx, ball.cy), nodes.len());
            nodes.push(PeriodicBallNode { ball, period, parent, periodic_children: 0 });
        }
        levels.push(nodes);
        prev_index = index;
        prev_ld = Some(ld);
    }
    Ok(PeriodicBallTree { levels })
}

// ---------------------------------------------------------------------------
// filled-Julia membership
// ---------------------------------------------------------------------------

/// Outcome of the ball-periodicity membership test: membership is only ever a
/// semi-decision, while a strictly preperiodic containing ball is a definitive
/// witness of non-membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JuliaMembership {
    MemberUpTo(u32),
    NonMemberWitness(u32),
}

/// Brent cycle detection on a successor function: returns
/// `(cycle_length, tail_length)` for the rho shape reached from `start`.
pub fn brent_cycle<S, F>(start: S, f: F) -> (u64, u64)
where
    S: Clone + PartialEq,
    F: Fn(&S) -> S,
{
    let mut power: u64 = 1;
    let mut lam: u64 = 1;
    let mut tortoise = start.clone();
    let mut hare = f(&start);
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = f(&hare);
        lam += 1;
    }
    let mut tortoise = start.clone();
    let mut hare = start;
    for _ in 0..lam {
        hare = f(&hare);
    }
    let mut mu: u64 = 0;
    while tortoise != hare {
        tortoise = f(&tortoise);
        hare = f(&hare);
        mu += 1;
    }
    (lam, mu)
}

/// Test whether every ball around `pt` up to level `kmax` is periodic.
///
/// A strictly preperiodic ball at some level `k` is a definitive witness that
/// `pt` is not in the filled Julia set; if all tested balls are periodic, the
/// point is a member as far as `kmax` can see.
pub fn is_julia_member(
    params: &HenonParams,
    pt: &PlanePoint,
    kmax: u32,
    budget: &DynamicsBudget,
) -> Result<JuliaMembership> {
    require_integral_region(params)?;
    let p = params.prime();
    for k in 1..=kmax {
        let state = (pt.x.reduce_mod(k)?, pt.y.reduce_mod(k)?);
        let states = (pow_u64(p, k) as u128).pow(2);
        let periodic = if states <= budget.table_threshold as u128 {
            let ld = LevelDynamics::compute(params, k, budget)?;
            ld.is_periodic_state(state)
        } else {
            // single-ball query: walk the rho shape from the ball itself
            check_level_fits(p, k, budget)?;
            let map = ReducedMap {
                p,
                level: k,
                modulus: pow_u64(p, k),
                a_mod: reduce_rational_mod(params.a_rational(), p, k)?,
                b_mod: reduce_rational_mod(params.b_rational(), p, k)?,
                table: None,
            };
            let (_lam, mu) = brent_cycle(state, |s| map.step(*s));
            mu == 0
        };
        if !periodic {
            return Ok(JuliaMembership::NonMemberWitness(k));
        }
    }
    Ok(JuliaMembership::MemberUpTo(kmax))
}

// ---------------------------------------------------------------------------
// attractor profile
// ---------------------------------------------------------------------------

/// Heuristic finiteness verdict from the `P_k` sequence: the attractor is
/// finite iff the periods are bounded over all levels, which no finite
/// computation can decide; the verdict just reports whether the tail has
/// stabilized at `kmax`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AttractorVerdict {
    FiniteCandidate(u64),
    InfiniteCandidate,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttractorProfile {
    pub max_periods: Vec<u64>,
    pub verdict: AttractorVerdict,
}

pub fn attractor_profile(
    params: &HenonParams,
    kmax: u32,
    budget: &DynamicsBudget,
) -> Result<AttractorProfile> {
    if params.classify_region() != RegionTag::IIplus {
        return Err(Error::WrongRegion {
            expected: "II+".to_string(),
            found: params.classify_region().to_string(),
        });
    }
    let mut max_periods = Vec::with_capacity(kmax as usize);
    let mut prev: Option<LevelDynamics> = None;
    for k in 1..=kmax {
        let ld = LevelDynamics::compute_with_prev(params, k, budget, prev.as_ref())?;
        max_periods.push(ld.report().max_period);
        prev = Some(ld);
    }
    // P_0 = 1: the unit ball itself is invariant
    let last = *max_periods.last().unwrap_or(&1);
    let before_last = if max_periods.len() >= 2 {
        max_periods[max_periods.len() - 2]
    } else {
        1
    };
    let verdict = if last == before_last {
        AttractorVerdict::FiniteCandidate(last)
    } else {
        AttractorVerdict::InfiniteCandidate
    };
    Ok(AttractorProfile { max_periods, verdict })
}

// ---------------------------------------------------------------------------
// attracting-cycle convergence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SampleConvergence {
    /// Start point residues mod p^depth.
    pub start: (u64, u64),
    /// First step at which the orbit is within 1/p of either phase point.
    pub entered_cycle_balls: Option<u32>,
    /// First step at which the orbit is within 1/p of the oriented phase
    /// point (small-norm coordinate first) where the double-step contraction
    /// estimate applies.
    pub entered_oriented_ball: Option<u32>,
    /// All resolvable double-step ratios toward the oriented phase point
    /// after entering were at most 1/p.
    pub ratios_contract: bool,
    /// Upper bound on the distance to the cycle after the final step.
    pub final_distance_upper: HalfLogNorm,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub samples: Vec<SampleConvergence>,
    pub all_entered: bool,
    pub all_contract: bool,
}

/// Iterate random starts in `B_1(0,0)` toward the attracting 2-cycle and
/// record per-double-step contraction.  Requires region II+ and an existing
/// 2-cycle.  Sampling is deterministic in `seed`.
///
/// Contraction is measured around the phase point whose first coordinate is
/// the smaller-norm root: linearizing the double step there leaves every
/// coefficient of norm at most 1/p, which is not true around the other phase.
pub fn attracting_cycle_check(
    params: &HenonParams,
    samples: u32,
    iters: u32,
    seed: u64,
) -> Result<ConvergenceReport> {
    use rand::{Rng, SeedableRng};
    if params.classify_region() != RegionTag::IIplus {
        return Err(Error::WrongRegion {
            expected: "II+".to_string(),
            found: params.classify_region().to_string(),
        });
    }
    let (first, second) = periodic::two_cycle(params)?.ok_or(Error::NoTwoCycle)?;
    let oriented = if first.x.norm() <= second.x.norm() { first.clone() } else { second.clone() };
    let other = if oriented.agrees_with(&first) { &second } else { &first };
    let p = params.prime();
    let depth = params.precision().min(12);
    let span = pow_u64(p, depth);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let one_over_p = HalfLogNorm::integer_power(-1);

    let mut out = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let sx = rng.random_range(0..span);
        let sy = rng.random_range(0..span);
        let mut cur = PlanePoint::from_integers(sx as i64, sy as i64, p, params.precision())?;
        let mut to_oriented: Vec<NormBound> = Vec::with_capacity(iters as usize + 1);
        let mut entered_union: Option<u32> = None;
        for step in 0..=iters {
            let d_oriented = cur.distance(&oriented)?;
            let d_other = cur.distance(other)?;
            if entered_union.is_none()
                && d_oriented.upper().min(d_other.upper()) <= one_over_p
            {
                entered_union = Some(step);
            }
            to_oriented.push(d_oriented);
            if step < iters {
                cur = params.forward(&cur)?;
            }
        }
        let entered_oriented = to_oriented
            .iter()
            .position(|d| d.upper() <= one_over_p)
            .map(|j| j as u32);
        let mut ratios_contract = true;
        if let Some(e) = entered_oriented {
            let mut j = e as usize;
            while j + 2 < to_oriented.len() {
                if let (NormBound::Exactly(a), NormBound::Exactly(b)) =
                    (to_oriented[j], to_oriented[j + 2])
                {
                    if !(b <= a * one_over_p) {
                        ratios_contract = false;
                    }
                }
                j += 2;
            }
        }
        let final_min = {
            let d_oriented = to_oriented.last().unwrap().upper();
            let d_other = cur.distance(other)?.upper();
            d_oriented.min(d_other)
        };
        out.push(SampleConvergence {
            start: (sx, sy),
            entered_cycle_balls: entered_union,
            entered_oriented_ball: entered_oriented,
            ratios_contract,
            final_distance_upper: final_min,
        });
    }
    let all_entered = out
        .iter()
        .all(|s| s.entered_cycle_balls.is_some() && s.entered_oriented_ball.is_some());
    let all_contract = out.iter().all(|s| s.ratios_contract);
    Ok(ConvergenceReport { samples: out, all_entered, all_contract })
}

// ---------------------------------------------------------------------------
// empirical measure
// ---------------------------------------------------------------------------

/// Orbit-frequency weights over the level-`k` periodic balls.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalMeasure {
    pub level: u32,
    /// `(ball, visit count, weight)` for visited periodic balls, sorted by
    /// center.
    pub weights: Vec<(BallId, u64, f64)>,
    pub steps: u64,
    pub periodic_ball_count: u64,
    /// Fraction of orbit steps spent in non-periodic balls.
    pub transient_mass: f64,
    /// Total-variation distance between the orbit distribution and the
    /// uniform distribution on the periodic balls.
    pub tv_to_uniform: f64,
}

/// Frequency of the partial orbit `step 1..=n` of `start` among the level-`k`
/// balls, with the total-variation distance to uniform-on-periodic-balls.
/// Orbit arithmetic is exact modulo `p^k`.
pub fn empirical_measure(
    params: &HenonParams,
    start: &PlanePoint,
    n: u64,
    k: u32,
    budget: &DynamicsBudget,
) -> Result<EmpiricalMeasure> {
    if params.classify_region() != RegionTag::IIplus {
        return Err(Error::WrongRegion {
            expected: "II+".to_string(),
            found: params.classify_region().to_string(),
        });
    }
    if n == 0 {
        return Err(Error::Parse("orbit length n must be >= 1".into()));
    }
    let ld = LevelDynamics::compute(params, k, budget)?;
    let map = ld.map();
    let mut state = (start.x.reduce_mod(k)?, start.y.reduce_mod(k)?);
    let mut counts: HashMap<(u64, u64), u64> = HashMap::new();
    for _ in 0..n {
        state = map.step(state);
        *counts.entry(state).or_insert(0) += 1;
    }
    let report = ld.report();
    let m = report.periodic_balls;
    let uniform = 1.0 / m as f64;
    let mut weights = Vec::new();
    let mut transient: u64 = 0;
    let mut tv = 0.0f64;
    let mut visited_periodic: u64 = 0;
    let mut entries: Vec<((u64, u64), u64)> = counts.into_iter().collect();
    entries.sort_unstable();
    for ((cx, cy), count) in entries {
        if ld.is_periodic_state((cx, cy)) {
            let w = count as f64 / n as f64;
            tv += (w - uniform).abs();
            visited_periodic += 1;
            weights.push((BallId { level: k, cx, cy }, count, w));
        } else {
            transient += count;
        }
    }
    let transient_mass = transient as f64 / n as f64;
    tv += (m - visited_periodic) as f64 * uniform + transient_mass;
    Ok(EmpiricalMeasure {
        level: k,
        weights,
        steps: n,
        periodic_ball_count: m,
        transient_mass,
        tv_to_uniform: tv / 2.0,
    })
}
