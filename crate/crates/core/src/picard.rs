//! Multidegrees on nodal curves: twister lattices, degree class groups,
//! the basic inequality and the balanced/semibalanced/stably balanced
//! hierarchy, d-generality, the class bijections induced by blow-ups, and
//! counting of compactified Picard models.
//!
//! All bound computations are exact rationals (denominators divide
//! `2(2g-2)`); boundary cases where a bound is attained are semantically
//! decisive, so floating point is never used.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::Error;
use crate::graph::{BlowUpContext, CurveClass, DualGraph, Subcurve};
use crate::lattice::{to_bigint_vec, FiniteAbelianGroup, IntegerMatrix, Lattice};
use crate::Result;

/// Integer vector indexed by the components of a curve.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multidegree(Vec<i64>);

impl Multidegree {
    pub fn new(values: Vec<i64>) -> Self {
        Multidegree(values)
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Restriction to a subcurve: the sum of the entries over it.
    pub fn restrict(&self, z: &Subcurve) -> i64 {
        z.indices().iter().map(|&v| self.0[v]).sum()
    }
}

impl std::fmt::Display for Multidegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<i64>> for Multidegree {
    fn from(v: Vec<i64>) -> Self {
        Multidegree(v)
    }
}

/// Symmetric intersection matrix of a connected curve: off-diagonal
/// entries count the non-loop edges between two components, diagonal
/// entries make every row sum to zero.
pub fn intersection_matrix(curve: &DualGraph) -> IntegerMatrix {
    let n = curve.vertex_count();
    let mut counts = vec![vec![0i64; n]; n];
    for &(u, v) in curve.edges() {
        if u != v {
            counts[u][v] += 1;
            counts[v][u] += 1;
        }
    }
    let mut m = IntegerMatrix::zeros(n, n);
    for i in 0..n {
        let mut row_sum = 0i64;
        for j in 0..n {
            if i != j {
                m.set(i, j, BigInt::from(counts[i][j]));
                row_sum += counts[i][j];
            }
        }
        m.set(i, i, BigInt::from(-row_sum));
    }
    m
}

/// Multidegree of the twister with the given component coefficients:
/// the intersection matrix applied to them.
pub fn twister_multidegree(curve: &DualGraph, coeffs: &[i64]) -> Result<Multidegree> {
    if coeffs.len() != curve.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: curve.vertex_count(),
            got: coeffs.len(),
        });
    }
    let m = intersection_matrix(curve);
    let out = m.mul_vec(&to_bigint_vec(coeffs));
    Ok(Multidegree(
        out.into_iter()
            .map(|x| i64::try_from(x).expect("twister multidegree fits in i64"))
            .collect(),
    ))
}

/// The lattice of twister multidegrees: the span of the intersection
/// matrix columns, or of user-supplied zero-sum generators.
#[derive(Debug, Clone)]
pub struct TwisterLattice {
    lattice: Lattice,
    custom: bool,
}

impl TwisterLattice {
    pub fn from_curve(curve: &DualGraph) -> Result<Self> {
        if !curve.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        let m = intersection_matrix(curve);
        Ok(TwisterLattice {
            lattice: Lattice::new(m),
            custom: false,
        })
    }

    pub fn with_generators(curve: &DualGraph, generators: &[Vec<i64>]) -> Result<Self> {
        if !curve.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != curve.vertex_count() {
                return Err(Error::DimensionMismatch {
                    expected: curve.vertex_count(),
                    got: g.len(),
                });
            }
            if g.iter().sum::<i64>() != 0 {
                return Err(Error::NonZeroSumGenerator(i));
            }
        }
        let m = IntegerMatrix::from_columns(curve.vertex_count(), generators);
        Ok(TwisterLattice {
            lattice: Lattice::new(m),
            custom: true,
        })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn is_custom(&self) -> bool {
        self.custom
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        self.lattice.contains(&to_bigint_vec(v))
    }
}

/// Machine-integer mirror of the Smith data, used to reduce multidegrees
/// without big-integer arithmetic when everything fits; the result is
/// identical to the exact path.
#[derive(Debug, Clone)]
struct FastReduce {
    gamma: usize,
    rank: usize,
    diag: Vec<i64>,
    u: Vec<i64>,
    u_inv: Vec<i64>,
}

impl FastReduce {
    const INPUT_LIMIT: i64 = 1 << 40;

    fn try_build(lattice: &Lattice) -> Option<FastReduce> {
        let snf = lattice.smith();
        let gamma = lattice.ambient_dim();
        let small = |m: &IntegerMatrix| -> Option<Vec<i64>> {
            let mut out = Vec::with_capacity(gamma * gamma);
            for i in 0..gamma {
                for j in 0..gamma {
                    out.push(i64::try_from(m.get(i, j).clone()).ok()?);
                }
            }
            Some(out)
        };
        let diag = snf
            .diagonal()
            .iter()
            .map(|d| i64::try_from(d.clone()).ok())
            .collect::<Option<Vec<i64>>>()?;
        Some(FastReduce {
            gamma,
            rank: snf.rank(),
            diag,
            u: small(&snf.u)?,
            u_inv: small(snf.u_inverse())?,
        })
    }

    fn in_range(&self, v: &[i64]) -> bool {
        v.iter().all(|x| x.abs() < Self::INPUT_LIMIT)
    }

    fn mul(&self, m: &[i64], v: &[i128]) -> Vec<i128> {
        let n = self.gamma;
        (0..n)
            .map(|i| (0..n).map(|j| m[i * n + j] as i128 * v[j]).sum())
            .collect()
    }

    fn label(&self, v: &[i64]) -> Option<Vec<i64>> {
        if !self.in_range(v) {
            return None;
        }
        let v128: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        let mut w = self.mul(&self.u, &v128);
        for i in 0..self.rank {
            w[i] = w[i].rem_euclid(self.diag[i] as i128);
        }
        let out = self.mul(&self.u_inv, &w);
        out.into_iter()
            .map(|x| i64::try_from(x).ok())
            .collect::<Option<Vec<i64>>>()
    }

    fn contains(&self, v: &[i64]) -> Option<bool> {
        if !self.in_range(v) {
            return None;
        }
        let v128: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        let w = self.mul(&self.u, &v128);
        for (i, wi) in w.iter().enumerate() {
            if i < self.rank {
                if wi % self.diag[i] as i128 != 0 {
                    return Some(false);
                }
            } else if *wi != 0 {
                return Some(false);
            }
        }
        Some(true)
    }
}

/// The degree class group of a curve: zero-sum multidegrees modulo the
/// twister lattice, with canonical labels for the degree-d class sets.
#[derive(Debug, Clone)]
pub struct DegreeClassGroup {
    gamma: usize,
    twisters: TwisterLattice,
    structure: FiniteAbelianGroup,
    /// Canonical representatives of the degree-0 classes; `None` when the
    /// group is infinite (degenerate custom generators).
    zero_classes: Option<Vec<Vec<i64>>>,
    fast: Option<FastReduce>,
}

impl DegreeClassGroup {
    pub fn new(curve: &DualGraph) -> Result<Self> {
        Self::from_twisters(curve, TwisterLattice::from_curve(curve)?)
    }

    pub fn with_generators(curve: &DualGraph, generators: &[Vec<i64>]) -> Result<Self> {
        Self::from_twisters(curve, TwisterLattice::with_generators(curve, generators)?)
    }

    fn from_twisters(curve: &DualGraph, twisters: TwisterLattice) -> Result<Self> {
        let gamma = curve.vertex_count();
        let rank = twisters.rank();
        let coker = twisters.lattice().cokernel_structure();
        // zero-sum vectors form a corank-1 sublattice; the class group is
        // the torsion of the full cokernel plus whatever free rank is left
        let structure = FiniteAbelianGroup {
            invariant_factors: coker.invariant_factors.clone(),
            free_rank: (gamma - 1) - rank,
        };
        let zero_classes = if structure.free_rank == 0 {
            Some(Self::enumerate_zero_classes(&twisters))
        } else {
            None
        };
        let fast = FastReduce::try_build(twisters.lattice());
        Ok(DegreeClassGroup {
            gamma,
            twisters,
            structure,
            zero_classes,
            fast,
        })
    }

    /// Canonical representatives of the degree-0 classes, from the Smith
    /// basis: one vector per residue tuple of the invariant factors.
    fn enumerate_zero_classes(twisters: &TwisterLattice) -> Vec<Vec<i64>> {
        let snf = twisters.lattice().smith();
        let gamma = twisters.lattice().ambient_dim();
        let diag = snf.diagonal();
        let mut residues = vec![BigInt::zero(); gamma];
        let mut out = Vec::new();
        loop {
            let vec = snf.u_inverse().mul_vec(&residues);
            let as_i64: Vec<i64> = vec
                .iter()
                .map(|x| i64::try_from(x.clone()).expect("class label fits in i64"))
                .collect();
            debug_assert_eq!(as_i64.iter().sum::<i64>(), 0);
            out.push(as_i64);
            // next residue tuple, mixed radix over the invariant factors
            let mut i = 0;
            loop {
                if i == diag.len() {
                    out.sort();
                    return out;
                }
                residues[i] += 1;
                if residues[i] < diag[i] {
                    break;
                }
                residues[i] = BigInt::zero();
                i += 1;
            }
        }
    }

    pub fn component_count(&self) -> usize {
        self.gamma
    }

    pub fn twisters(&self) -> &TwisterLattice {
        &self.twisters
    }

    /// Group structure of the degree class group.
    pub fn structure(&self) -> &FiniteAbelianGroup {
        &self.structure
    }

    pub fn order(&self) -> Option<BigInt> {
        self.structure.order()
    }

    fn check(&self, d: &Multidegree) -> Result<()> {
        if d.len() != self.gamma {
            return Err(Error::CurveMismatch);
        }
        Ok(())
    }

    /// Whether two multidegrees of equal total degree differ by a twister.
    pub fn are_equivalent(&self, d1: &Multidegree, d2: &Multidegree) -> Result<bool> {
        self.check(d1)?;
        self.check(d2)?;
        if d1.total() != d2.total() {
            return Err(Error::TotalMismatch {
                left: d1.total(),
                right: d2.total(),
            });
        }
        let diff: Vec<i64> = d1
            .values()
            .iter()
            .zip(d2.values())
            .map(|(a, b)| a - b)
            .collect();
        if let Some(answer) = self.fast.as_ref().and_then(|f| f.contains(&diff)) {
            return Ok(answer);
        }
        self.twisters.contains(&diff)
    }

    /// Canonical label of the class of `d`: equal labels exactly for
    /// equivalent multidegrees.
    pub fn class_label(&self, d: &Multidegree) -> Result<Multidegree> {
        self.check(d)?;
        if let Some(label) = self.fast.as_ref().and_then(|f| f.label(d.values())) {
            return Ok(Multidegree(label));
        }
        let r = self.twisters.lattice().reduce(&to_bigint_vec(d.values()))?;
        Ok(Multidegree(
            r.into_iter()
                .map(|x| i64::try_from(x).expect("class label fits in i64"))
                .collect(),
        ))
    }

    /// Canonical labels of all classes of total degree `d`, obtained by
    /// translating the degree-0 classes by the base multidegree
    /// `(d, 0, ..., 0)`.
    pub fn classes_of_degree(&self, d: i64) -> Result<Vec<Multidegree>> {
        let zero = self
            .zero_classes
            .as_ref()
            .ok_or(Error::InfiniteClassGroup)?;
        let mut out = Vec::with_capacity(zero.len());
        for rep in zero {
            let mut v = rep.clone();
            v[0] += d;
            out.push(self.class_label(&Multidegree(v))?);
        }
        out.sort();
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Basic inequality and the balanced hierarchy

/// Lower and upper bound of the basic inequality for a subcurve, as exact
/// rationals: `m = d*w_Z/(2g-2) - k_Z/2` and `M = m + k_Z`.
pub fn basic_bounds(curve: &DualGraph, d: i64, z: &Subcurve) -> Result<(Rational64, Rational64)> {
    let g = curve.genus();
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    let stats = curve.subcurve_stats(z)?;
    let m = Rational64::new(d * stats.w, 2 * g - 2) - Rational64::new(stats.k, 2);
    let cap = m + Rational64::from_integer(stats.k);
    Ok((m, cap))
}

/// How balanced a multidegree is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BalanceLevel {
    NotSemibalanced,
    Semibalanced,
    Balanced,
    StablyBalanced,
}

impl std::fmt::Display for BalanceLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BalanceLevel::NotSemibalanced => "not_semibalanced",
            BalanceLevel::Semibalanced => "semibalanced",
            BalanceLevel::Balanced => "balanced",
            BalanceLevel::StablyBalanced => "stably_balanced",
        };
        write!(f, "{s}")
    }
}

/// Why a multidegree failed to reach the next level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BalanceWitness {
    /// Basic inequality violated on this subcurve.
    BoundViolation {
        subcurve: Vec<usize>,
        lower: Rational64,
        degree: i64,
        upper: Rational64,
    },
    /// Exceptional component whose degree is outside the allowed range
    /// (for semibalanced: 0..=1, for balanced: exactly 1).
    ExceptionalDegree { vertex: usize, degree: i64 },
    /// Subcurve at the lower extreme of the inequality whose complement is
    /// not a union of exceptional components.
    LowerBoundEquality {
        subcurve: Vec<usize>,
        bound: Rational64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedReport {
    pub multidegree: Multidegree,
    pub level: BalanceLevel,
    pub witness: Option<BalanceWitness>,
}

/// Precomputed per-subset data for one curve: `w` and `k` for every
/// vertex-subset bitmask plus the list of connected masks.
struct SubsetTables {
    gamma: usize,
    genus: i64,
    w_of: Vec<i64>,
    k_of: Vec<i64>,
    connected: Vec<u64>,
    exceptional_mask: u64,
}

impl SubsetTables {
    fn build(curve: &DualGraph) -> SubsetTables {
        let gamma = curve.vertex_count();
        assert!(gamma <= 20, "curve too large for subset enumeration");
        let size = 1usize << gamma;
        // per-vertex dualizing degree; w is additive over components
        let mut w_vertex = vec![0i64; gamma];
        for v in 0..gamma {
            let z = Subcurve::new([v]).unwrap();
            w_vertex[v] = curve.subcurve_stats(&z).unwrap().w;
        }
        let mut w_of = vec![0i64; size];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            w_of[mask] = w_of[mask & (mask - 1)] + w_vertex[low];
        }
        let mut k_of = vec![0i64; size];
        for (u, v) in curve.edges().iter().copied() {
            if u == v {
                continue;
            }
            for (mask, k) in k_of.iter_mut().enumerate() {
                let inu = (mask >> u) & 1;
                let inv = (mask >> v) & 1;
                if inu != inv {
                    *k += 1;
                }
            }
        }
        let mut exceptional_mask = 0u64;
        for v in curve.exceptional_components() {
            exceptional_mask |= 1 << v;
        }
        SubsetTables {
            gamma,
            genus: curve.genus(),
            w_of,
            k_of,
            connected: curve.connected_subset_masks(),
            exceptional_mask,
        }
    }

    fn full_mask(&self) -> u64 {
        (1u64 << self.gamma) - 1
    }

    /// `2(2g-2) * m_Z`, an integer.
    fn scaled_lower(&self, d: i64, mask: usize) -> i64 {
        2 * d * self.w_of[mask] - (2 * self.genus - 2) * self.k_of[mask]
    }

    /// `2(2g-2) * M_Z`, an integer.
    fn scaled_upper(&self, d: i64, mask: usize) -> i64 {
        2 * d * self.w_of[mask] + (2 * self.genus - 2) * self.k_of[mask]
    }

    fn bounds_rational(&self, d: i64, mask: usize) -> (Rational64, Rational64) {
        let denom = 2 * (2 * self.genus - 2);
        (
            Rational64::new(self.scaled_lower(d, mask), denom),
            Rational64::new(self.scaled_upper(d, mask), denom),
        )
    }

    fn mask_sum(values: &[i64], mask: u64) -> i64 {
        let mut s = 0;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            s += values[v];
        }
        s
    }

    fn mask_vertices(mask: u64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut m = mask;
        while m != 0 {
            out.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        out
    }
}

fn require_semistable(curve: &DualGraph) -> Result<CurveClass> {
    let (class, _) = curve.classify();
    if class < CurveClass::Semistable {
        return Err(Error::NotSemistableCurve);
    }
    Ok(class)
}

/// Classifies a multidegree on a semistable curve, with a recomputable
/// witness for the highest level it fails.
pub fn classify_multidegree(curve: &DualGraph, d: &Multidegree) -> Result<BalancedReport> {
    require_semistable(curve)?;
    if d.len() != curve.vertex_count() {
        return Err(Error::CurveMismatch);
    }
    let tables = SubsetTables::build(curve);
    let total = d.total();
    let scaled_deg = |mask: u64| 2 * (2 * tables.genus - 2) * SubsetTables::mask_sum(d.values(), mask);

    // basic inequality on all connected subcurves; this is equivalent to
    // all subcurves since both sides are additive over disjoint pieces
    for &mask in &tables.connected {
        let s = scaled_deg(mask);
        if s < tables.scaled_lower(total, mask as usize) || s > tables.scaled_upper(total, mask as usize) {
            let (lower, upper) = tables.bounds_rational(total, mask as usize);
            return Ok(BalancedReport {
                multidegree: d.clone(),
                level: BalanceLevel::NotSemibalanced,
                witness: Some(BalanceWitness::BoundViolation {
                    subcurve: SubsetTables::mask_vertices(mask),
                    lower,
                    degree: SubsetTables::mask_sum(d.values(), mask),
                    upper,
                }),
            });
        }
    }
    for v in SubsetTables::mask_vertices(tables.exceptional_mask) {
        let deg = d.values()[v];
        if !(0..=1).contains(&deg) {
            return Ok(BalancedReport {
                multidegree: d.clone(),
                level: BalanceLevel::NotSemibalanced,
                witness: Some(BalanceWitness::ExceptionalDegree { vertex: v, degree: deg }),
            });
        }
    }
    // semibalanced; balanced needs degree exactly 1 on exceptionals
    for v in SubsetTables::mask_vertices(tables.exceptional_mask) {
        if d.values()[v] != 1 {
            return Ok(BalancedReport {
                multidegree: d.clone(),
                level: BalanceLevel::Semibalanced,
                witness: Some(BalanceWitness::ExceptionalDegree {
                    vertex: v,
                    degree: d.values()[v],
                }),
            });
        }
    }
    // stably balanced: every proper subcurve at the lower extreme must
    // have all-exceptional complement; all subsets, not just connected
    if let Some(mask) = stably_balanced_offender(&tables, d) {
        let (lower, _) = tables.bounds_rational(total, mask as usize);
        return Ok(BalancedReport {
            multidegree: d.clone(),
            level: BalanceLevel::Balanced,
            witness: Some(BalanceWitness::LowerBoundEquality {
                subcurve: SubsetTables::mask_vertices(mask),
                bound: lower,
            }),
        });
    }
    Ok(BalancedReport {
        multidegree: d.clone(),
        level: BalanceLevel::StablyBalanced,
        witness: None,
    })
}

/// First proper subcurve (in mask order) meeting the lower bound whose
/// complement is not a union of exceptional components.
fn stably_balanced_offender(tables: &SubsetTables, d: &Multidegree) -> Option<u64> {
    let full = tables.full_mask();
    let factor = 2 * (2 * tables.genus - 2);
    for mask in 1..full {
        let s = factor * SubsetTables::mask_sum(d.values(), mask);
        if s == tables.scaled_lower(d.total(), mask as usize) {
            let complement = full & !mask;
            if complement & !tables.exceptional_mask != 0 {
                return Some(mask);
            }
        }
    }
    None
}

/// Basic-inequality check quantified over all subcurves (not only the
/// connected ones); used as an oracle against the connected-only path.
pub fn satisfies_basic_inequality_all_subsets(curve: &DualGraph, d: &Multidegree) -> Result<bool> {
    let g = curve.genus();
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    if d.len() != curve.vertex_count() {
        return Err(Error::CurveMismatch);
    }
    let tables = SubsetTables::build(curve);
    let total = d.total();
    let factor = 2 * (2 * g - 2);
    for mask in 1..=tables.full_mask() {
        let s = factor * SubsetTables::mask_sum(d.values(), mask);
        if s < tables.scaled_lower(total, mask as usize) || s > tables.scaled_upper(total, mask as usize) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All multidegrees of total degree `d` at the requested level, in
/// lexicographic order. Integer points of the translated basic polytope:
/// a bounding box from the single-component inequalities, filtered by all
/// connected subcurves and the exceptional-degree constraints.
pub fn enumerate_balanced(
    curve: &DualGraph,
    d: i64,
    level: BalanceLevel,
) -> Result<Vec<Multidegree>> {
    require_semistable(curve)?;
    let tables = SubsetTables::build(curve);
    let gamma = tables.gamma;
    let denom = 2 * (2 * tables.genus - 2);

    let mut ranges = Vec::with_capacity(gamma);
    for v in 0..gamma {
        let mask = 1usize << v;
        let lo = Rational64::new(tables.scaled_lower(d, mask), denom).ceil().to_integer();
        let hi = Rational64::new(tables.scaled_upper(d, mask), denom).floor().to_integer();
        let (lo, hi) = if tables.exceptional_mask >> v & 1 == 1 {
            match level {
                BalanceLevel::NotSemibalanced | BalanceLevel::Semibalanced => {
                    (lo.max(0), hi.min(1))
                }
                BalanceLevel::Balanced | BalanceLevel::StablyBalanced => (lo.max(1), hi.min(1)),
            }
        } else {
            (lo, hi)
        };
        if lo > hi {
            return Ok(Vec::new());
        }
        ranges.push((lo, hi));
    }

    // connected proper subcurves with at least two components; singletons
    // are the box, the full curve is the total-degree constraint
    let full = tables.full_mask();
    let subset_bounds: Vec<(Vec<usize>, i64, i64)> = tables
        .connected
        .iter()
        .filter(|&&mask| mask != full && mask.count_ones() >= 2)
        .map(|&mask| {
            let lo = Rational64::new(tables.scaled_lower(d, mask as usize), denom)
                .ceil()
                .to_integer();
            let hi = Rational64::new(tables.scaled_upper(d, mask as usize), denom)
                .floor()
                .to_integer();
            (SubsetTables::mask_vertices(mask), lo, hi)
        })
        .collect();

    let mut suffix_min = vec![0i64; gamma + 1];
    let mut suffix_max = vec![0i64; gamma + 1];
    for i in (0..gamma).rev() {
        suffix_min[i] = suffix_min[i + 1] + ranges[i].0;
        suffix_max[i] = suffix_max[i + 1] + ranges[i].1;
    }

    let mut out = Vec::new();
    let mut cur = vec![0i64; gamma];
    dfs_enumerate(
        0,
        0,
        d,
        &ranges,
        &suffix_min,
        &suffix_max,
        &subset_bounds,
        &mut cur,
        &mut out,
    );

    if level == BalanceLevel::StablyBalanced {
        out.retain(|m| stably_balanced_offender(&tables, m).is_none());
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs_enumerate(
    depth: usize,
    running: i64,
    total: i64,
    ranges: &[(i64, i64)],
    suffix_min: &[i64],
    suffix_max: &[i64],
    subset_bounds: &[(Vec<usize>, i64, i64)],
    cur: &mut Vec<i64>,
    out: &mut Vec<Multidegree>,
) {
    if depth == ranges.len() {
        if running == total {
            let ok = subset_bounds.iter().all(|(verts, lo, hi)| {
                let s: i64 = verts.iter().map(|&v| cur[v]).sum();
                *lo <= s && s <= *hi
            });
            if ok {
                out.push(Multidegree(cur.clone()));
            }
        }
        return;
    }
    let need = total - running;
    let lo = ranges[depth].0.max(need - suffix_max[depth + 1]);
    let hi = ranges[depth].1.min(need - suffix_min[depth + 1]);
    for v in lo..=hi {
        cur[depth] = v;
        dfs_enumerate(
            depth + 1,
            running + v,
            total,
            ranges,
            suffix_min,
            suffix_max,
            subset_bounds,
            cur,
            out,
        );
    }
}

fn require_quasistable(curve: &DualGraph) -> Result<()> {
    let (class, _) = curve.classify();
    if class < CurveClass::Semistable {
        return Err(Error::NotSemistableCurve);
    }
    if class < CurveClass::Quasistable {
        return Err(Error::NotQuasistableCurve);
    }
    Ok(())
}

/// All semibalanced multidegrees equivalent to `seed` on a quasistable
/// curve. Non-empty by the existence theorem for semibalanced
/// representatives; an empty result signals an implementation bug.
pub fn semibalanced_representatives(
    curve: &DualGraph,
    seed: &Multidegree,
) -> Result<Vec<Multidegree>> {
    require_quasistable(curve)?;
    let dcg = DegreeClassGroup::new(curve)?;
    let all = enumerate_balanced(curve, seed.total(), BalanceLevel::Semibalanced)?;
    let mut out = Vec::new();
    for m in all {
        if dcg.are_equivalent(&m, seed)? {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyResult);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DGeneralCertificate {
    /// Balanced multidegrees biject with classes and all are stably
    /// balanced.
    Confirmed,
    /// A balanced multidegree that is not stably balanced.
    NotStablyBalanced(Multidegree),
    /// Two equivalent balanced multidegrees.
    EquivalentPair(Multidegree, Multidegree),
}

#[derive(Debug, Clone)]
pub struct DGeneralReport {
    pub general: bool,
    pub balanced_count: usize,
    pub class_count: BigInt,
    pub certificate: DGeneralCertificate,
}

/// Whether the balanced multidegrees of total degree `d` biject with the
/// degree-d classes on a stable curve.
pub fn is_d_general(curve: &DualGraph, d: i64) -> Result<DGeneralReport> {
    let (class, _) = curve.classify();
    if class < CurveClass::Stable {
        return Err(Error::NotStableCurve);
    }
    let dcg = DegreeClassGroup::new(curve)?;
    let balanced = enumerate_balanced(curve, d, BalanceLevel::Balanced)?;
    let class_count = dcg.order().expect("connected curve has finite class group");

    let mut seen: BTreeMap<Multidegree, Multidegree> = BTreeMap::new();
    let mut pair = None;
    for m in &balanced {
        let label = dcg.class_label(m)?;
        if let Some(prev) = seen.get(&label) {
            pair = Some((prev.clone(), m.clone()));
            break;
        }
        seen.insert(label, m.clone());
    }
    let not_stable = if pair.is_none() {
        let mut found = None;
        for m in &balanced {
            let report = classify_multidegree(curve, m)?;
            if report.level < BalanceLevel::StablyBalanced {
                found = Some(m.clone());
                break;
            }
        }
        found
    } else {
        None
    };

    let bijective =
        pair.is_none() && BigInt::from(balanced.len()) == class_count;
    let certificate = if let Some((a, b)) = pair {
        DGeneralCertificate::EquivalentPair(a, b)
    } else if let Some(m) = not_stable {
        DGeneralCertificate::NotStablyBalanced(m)
    } else {
        DGeneralCertificate::Confirmed
    };
    if bijective && !matches!(certificate, DGeneralCertificate::Confirmed) {
        return Err(Error::InvariantViolated(
            "balanced classes biject but a balanced multidegree is not stably balanced".into(),
        ));
    }
    Ok(DGeneralReport {
        general: bijective,
        balanced_count: balanced.len(),
        class_count,
        certificate,
    })
}

/// The uniform d-generality condition `gcd(d - g + 1, 2g - 2) = 1`.
pub fn coprimality(d: i64, g: i64) -> Result<bool> {
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    Ok((d - g + 1).gcd(&(2 * g - 2)) == 1)
}

/// One row of a blow-up class bijection table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoPair {
    /// The unique balanced representative on the blow-up, degree 1 on
    /// every exceptional component.
    pub balanced_on_blowup: Multidegree,
    pub class_on_blowup: Multidegree,
    /// Class of the restriction to the partial normalization.
    pub class_on_normalization: Multidegree,
}

/// Verified bijection between the balanced classes on a blow-up and all
/// classes of total degree `d - |S|` on the partial normalization.
#[derive(Debug, Clone)]
pub struct RhoTable {
    pub node_set: Vec<usize>,
    pub degree: i64,
    pub pairs: Vec<RhoPair>,
}

pub fn rho_map(ctx: &BlowUpContext, d: i64) -> Result<RhoTable> {
    if !is_d_general(ctx.base(), d)?.general {
        return Err(Error::NotDGeneral);
    }
    BlowUpClasses::new(ctx)?.table(d)
}

/// As [`rho_map`] but trusting the caller's d-generality check.
pub(crate) fn rho_map_unchecked(ctx: &BlowUpContext, d: i64) -> Result<RhoTable> {
    BlowUpClasses::new(ctx)?.table(d)
}

/// Class groups of a blow-up and of its partial normalization, computed
/// once so that tables for several degrees share the Smith data.
pub struct BlowUpClasses<'a> {
    ctx: &'a BlowUpContext,
    dcg_blown: DegreeClassGroup,
    dcg_norm: DegreeClassGroup,
}

impl<'a> BlowUpClasses<'a> {
    pub fn new(ctx: &'a BlowUpContext) -> Result<Self> {
        if !ctx.normalized().is_connected() {
            return Err(Error::DisconnectedNormalization);
        }
        Ok(BlowUpClasses {
            ctx,
            dcg_blown: DegreeClassGroup::new(ctx.blown())?,
            dcg_norm: DegreeClassGroup::new(ctx.normalized())?,
        })
    }

    pub fn blown_classes(&self) -> &DegreeClassGroup {
        &self.dcg_blown
    }

    pub fn normalization_classes(&self) -> &DegreeClassGroup {
        &self.dcg_norm
    }

    /// The verified restriction bijection at total degree `d`.
    pub fn table(&self, d: i64) -> Result<RhoTable> {
        let ctx = self.ctx;
        let base_count = ctx.base().vertex_count();
        let balanced = enumerate_balanced(ctx.blown(), d, BalanceLevel::Balanced)?;
        let mut pairs = Vec::with_capacity(balanced.len());
        let mut labels_blown = std::collections::BTreeSet::new();
        let mut labels_norm = std::collections::BTreeSet::new();
        for m in balanced {
            let class_on_blowup = self.dcg_blown.class_label(&m)?;
            if !labels_blown.insert(class_on_blowup.clone()) {
                return Err(Error::InvariantViolated(
                    "two equivalent balanced multidegrees on a blow-up of a d-general curve"
                        .into(),
                ));
            }
            let restriction = Multidegree(m.values()[..base_count].to_vec());
            let class_on_normalization = self.dcg_norm.class_label(&restriction)?;
            if !labels_norm.insert(class_on_normalization.clone()) {
                return Err(Error::InvariantViolated(
                    "restriction map on blow-up classes is not injective".into(),
                ));
            }
            pairs.push(RhoPair {
                balanced_on_blowup: m,
                class_on_blowup,
                class_on_normalization,
            });
        }
        // surjectivity: every degree-(d-s) class on the normalization is hit
        let expected = self
            .dcg_norm
            .classes_of_degree(d - ctx.node_set().len() as i64)?;
        if expected.len() != pairs.len() {
            return Err(Error::InvariantViolated(format!(
                "restriction map hits {} of {} classes on the normalization",
                pairs.len(),
                expected.len()
            )));
        }
        for label in &expected {
            if !labels_norm.contains(label) {
                return Err(Error::InvariantViolated(
                    "restriction map on blow-up classes is not surjective".into(),
                ));
            }
        }
        Ok(RhoTable {
            node_set: ctx.node_set().to_vec(),
            degree: d,
            pairs,
        })
    }
}

/// Partition of the degree-d classes of the blow-up at all nodes by the
/// support of the exceptional degrees of their unique semibalanced
/// representative. Keys are node sets whose normalization is connected;
/// empty groups are omitted.
pub fn partition_by_support(
    curve: &DualGraph,
    d: i64,
) -> Result<BTreeMap<Vec<usize>, Vec<Multidegree>>> {
    let (class, _) = curve.classify();
    if class < CurveClass::Stable {
        return Err(Error::NotStableCurve);
    }
    let all_nodes: Vec<usize> = (0..curve.edge_count()).collect();
    let ctx = curve.blow_up(&all_nodes)?;
    let blown = ctx.blown();
    let dcg = DegreeClassGroup::new(blown)?;
    let semibalanced = enumerate_balanced(blown, d, BalanceLevel::Semibalanced)?;

    let class_count = dcg.order().expect("blow-up is connected");
    let mut seen = std::collections::BTreeSet::new();
    for m in &semibalanced {
        if !seen.insert(dcg.class_label(m)?) {
            return Err(Error::NotDGeneral);
        }
    }
    if BigInt::from(semibalanced.len()) != class_count {
        // all labels distinct, so fewer labels means a class with no
        // semibalanced representative, contradicting the existence theorem
        return Err(Error::InvariantViolated(format!(
            "{} semibalanced representatives for {} classes",
            semibalanced.len(),
            class_count
        )));
    }

    let mut out: BTreeMap<Vec<usize>, Vec<Multidegree>> = BTreeMap::new();
    for m in &semibalanced {
        let mut support = Vec::new();
        for e in 0..curve.edge_count() {
            let x = ctx.exceptional_vertex(e).expect("all nodes blown up");
            match m.values()[x] {
                1 => support.push(e),
                0 => {}
                other => {
                    return Err(Error::InvariantViolated(format!(
                        "semibalanced representative has exceptional degree {other}"
                    )))
                }
            }
        }
        if !curve.partial_normalization(&support)?.is_connected() {
            return Err(Error::InvariantViolated(
                "support of a semibalanced representative disconnects the curve".into(),
            ));
        }
        out.entry(support).or_default().push(dcg.class_label(m)?);
    }
    for group in out.values_mut() {
        group.sort();
    }
    Ok(out)
}

/// Contracts every exceptional component of degree 0 and restricts the
/// multidegree; the result is balanced on the contracted curve.
pub fn balanced_model(curve: &DualGraph, d: &Multidegree) -> Result<(DualGraph, Multidegree)> {
    require_quasistable(curve)?;
    let report = classify_multidegree(curve, d)?;
    if report.level < BalanceLevel::Semibalanced {
        return Err(Error::NotSemibalanced);
    }
    let remove: Vec<usize> = curve
        .exceptional_components()
        .into_iter()
        .filter(|&v| d.values()[v] == 0)
        .collect();
    if remove.is_empty() {
        return Ok((curve.clone(), d.clone()));
    }
    let contracted = curve.contract_vertices(&remove)?;
    let values: Vec<i64> = d
        .values()
        .iter()
        .enumerate()
        .filter(|(v, _)| remove.binary_search(v).is_err())
        .map(|(_, &x)| x)
        .collect();
    Ok((contracted, Multidegree(values)))
}

/// Euler totient by trial division.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Number of non-isomorphic degree-d compactified Picard models with
/// `gcd(d-g+1, 2g-2) = 1`, by direct enumeration of admissible degrees
/// modulo `d ↦ 2g-2-d`; the totient formula is checked as an assertion.
pub fn count_picard_models(g: i64) -> Result<(u64, Vec<i64>)> {
    if g < 3 {
        return Err(Error::GenusTooSmall(g));
    }
    let n = 2 * g - 2;
    let mut reps = Vec::new();
    for d in 0..n {
        if !coprimality(d, g)? {
            continue;
        }
        let mirror = (n - d) % n;
        if d <= mirror {
            reps.push(d);
        }
    }
    let count = reps.len() as u64;
    let phi = euler_phi((g - 1) as u64);
    let expected = if g % 2 == 1 { phi } else { phi / 2 };
    if count != expected {
        return Err(Error::InvariantViolated(format!(
            "model count {count} disagrees with totient formula {expected} at genus {g}"
        )));
    }
    Ok((count, reps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vine(k: usize, g1: u32, g2: u32) -> DualGraph {
        DualGraph::build(vec![("C1".into(), g1), ("C2".into(), g2)], vec![(0, 1); k]).unwrap()
    }

    fn v3() -> DualGraph {
        vine(3, 1, 1)
    }

    fn triangle() -> DualGraph {
        DualGraph::build(
            vec![("A".into(), 1), ("B".into(), 1), ("C".into(), 1)],
            vec![(0, 1), (1, 2), (0, 2)],
        )
        .unwrap()
    }

    fn md(values: &[i64]) -> Multidegree {
        Multidegree::new(values.to_vec())
    }

    #[test]
    fn intersection_matrix_examples() {
        let m = intersection_matrix(&v3());
        assert_eq!(m, IntegerMatrix::from_rows(&[vec![-3, 3], vec![3, -3]]));

        let single = DualGraph::build(vec![("C".into(), 2)], vec![(0, 0), (0, 0)]).unwrap();
        assert_eq!(intersection_matrix(&single), IntegerMatrix::from_rows(&[vec![0]]));

        let t = intersection_matrix(&triangle());
        assert_eq!(
            t,
            IntegerMatrix::from_rows(&[vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -2]])
        );
    }

    #[test]
    fn twister_multidegree_examples() {
        assert_eq!(twister_multidegree(&v3(), &[5, 5]).unwrap(), md(&[0, 0]));
        assert_eq!(twister_multidegree(&v3(), &[1, 0]).unwrap(), md(&[-3, 3]));
        assert_eq!(
            twister_multidegree(&triangle(), &[1, 0, 0]).unwrap(),
            md(&[-2, 1, 1])
        );
        assert!(matches!(
            twister_multidegree(&v3(), &[1, 0, 0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn twister_lattice_rank() {
        for curve in [v3(), triangle(), vine(2, 1, 1)] {
            let tw = TwisterLattice::from_curve(&curve).unwrap();
            assert_eq!(tw.rank(), curve.vertex_count() - 1);
        }
    }

    #[test]
    fn degree_class_group_examples() {
        let dcg = DegreeClassGroup::new(&v3()).unwrap();
        assert_eq!(dcg.structure().invariant_factors, vec![BigInt::from(3)]);
        assert_eq!(dcg.order(), Some(BigInt::from(3)));

        let dcg2 = DegreeClassGroup::new(&vine(2, 1, 1)).unwrap();
        assert_eq!(dcg2.order(), Some(BigInt::from(2)));

        // custom generator modeling a non-regular total space
        let custom = DegreeClassGroup::with_generators(&vine(3, 1, 1), &[vec![-5, 5]]).unwrap();
        assert_eq!(custom.order(), Some(BigInt::from(5)));

        assert!(matches!(
            DegreeClassGroup::with_generators(&v3(), &[vec![1, 2]]),
            Err(Error::NonZeroSumGenerator(0))
        ));
    }

    #[test]
    fn class_group_order_is_complexity() {
        for curve in [v3(), triangle(), vine(5, 0, 2)] {
            let dcg = DegreeClassGroup::new(&curve).unwrap();
            assert_eq!(dcg.order().unwrap(), curve.spanning_tree_count());
        }
    }

    #[test]
    fn are_equivalent_examples() {
        let dcg = DegreeClassGroup::new(&vine(2, 1, 1)).unwrap();
        assert!(dcg.are_equivalent(&md(&[1, -1]), &md(&[1, -1])).unwrap());
        assert!(dcg.are_equivalent(&md(&[1, -1]), &md(&[-1, 1])).unwrap());

        let dcg3 = DegreeClassGroup::new(&v3()).unwrap();
        assert!(!dcg3.are_equivalent(&md(&[1, -1]), &md(&[0, 0])).unwrap());
        assert!(matches!(
            dcg3.are_equivalent(&md(&[1, 0]), &md(&[0, 0])),
            Err(Error::TotalMismatch { .. })
        ));
        assert!(matches!(
            dcg3.are_equivalent(&md(&[1, 0, -1]), &md(&[0, 0, 0])),
            Err(Error::CurveMismatch)
        ));
    }

    #[test]
    fn classes_of_degree_translation() {
        let dcg = DegreeClassGroup::new(&v3()).unwrap();
        for d in [-2, 0, 3] {
            let classes = dcg.classes_of_degree(d).unwrap();
            assert_eq!(classes.len(), 3);
            for c in &classes {
                assert_eq!(c.total(), d);
            }
            // pairwise inequivalent
            for i in 0..classes.len() {
                for j in i + 1..classes.len() {
                    assert!(!dcg.are_equivalent(&classes[i], &classes[j]).unwrap());
                }
            }
        }
    }

    #[test]
    fn basic_bounds_examples() {
        let g = v3();
        let z = Subcurve::new([0]).unwrap();
        let (m, cap) = basic_bounds(&g, 0, &z).unwrap();
        assert_eq!(m, Rational64::new(-3, 2));
        assert_eq!(cap, Rational64::new(3, 2));

        let full = Subcurve::new([0, 1]).unwrap();
        let (m, cap) = basic_bounds(&g, 7, &full).unwrap();
        assert_eq!(m, Rational64::from_integer(7));
        assert_eq!(cap, Rational64::from_integer(7));

        // d = 2g-2 centers the window at w_Z
        let d = 2 * g.genus() - 2;
        let (m, _) = basic_bounds(&g, d, &z).unwrap();
        let stats = g.subcurve_stats(&z).unwrap();
        assert_eq!(
            m,
            Rational64::from_integer(stats.w) - Rational64::new(stats.k, 2)
        );

        let small = DualGraph::build(vec![("A".into(), 1)], vec![]).unwrap();
        assert!(matches!(
            basic_bounds(&small, 0, &Subcurve::new([0]).unwrap()),
            Err(Error::GenusTooSmall(1))
        ));
    }

    #[test]
    fn classify_multidegree_examples() {
        let g = v3();
        let r = classify_multidegree(&g, &md(&[0, 0])).unwrap();
        assert_eq!(r.level, BalanceLevel::StablyBalanced);
        assert!(r.witness.is_none());

        let r = classify_multidegree(&g, &md(&[2, -2])).unwrap();
        assert_eq!(r.level, BalanceLevel::NotSemibalanced);
        match r.witness.unwrap() {
            BalanceWitness::BoundViolation {
                subcurve,
                degree,
                upper,
                ..
            } => {
                assert_eq!(subcurve, vec![0]);
                assert_eq!(degree, 2);
                assert_eq!(upper, Rational64::new(3, 2));
            }
            other => panic!("unexpected witness {other:?}"),
        }

        // two balanced representatives of the same class on an even vine
        let v2 = vine(2, 1, 1);
        let r = classify_multidegree(&v2, &md(&[1, -1])).unwrap();
        assert_eq!(r.level, BalanceLevel::Balanced);
        match r.witness.unwrap() {
            BalanceWitness::LowerBoundEquality { subcurve, .. } => {
                assert_eq!(subcurve, vec![1]);
            }
            other => panic!("unexpected witness {other:?}"),
        }

        let not_semistable = DualGraph::build(vec![("A".into(), 1)], vec![]).unwrap();
        assert!(matches!(
            classify_multidegree(&not_semistable, &md(&[0])),
            Err(Error::NotSemistableCurve)
        ));
    }

    #[test]
    fn classify_exceptional_degrees() {
        let ctx = v3().blow_up(&[0]).unwrap();
        let y = ctx.blown();
        // balanced on the blow-up: degree 1 on the exceptional component
        let r = classify_multidegree(y, &md(&[0, 1, 1])).unwrap();
        assert_eq!(r.level, BalanceLevel::StablyBalanced);
        // degree 0 there is semibalanced but not balanced
        let r = classify_multidegree(y, &md(&[1, 1, 0])).unwrap();
        assert_eq!(r.level, BalanceLevel::Semibalanced);
        assert!(matches!(
            r.witness,
            Some(BalanceWitness::ExceptionalDegree { vertex: 2, degree: 0 })
        ));
        // degree -1 satisfies the inequality but not the exceptional range
        let r = classify_multidegree(y, &md(&[2, 1, -1])).unwrap();
        assert_eq!(r.level, BalanceLevel::NotSemibalanced);
        assert!(matches!(
            r.witness,
            Some(BalanceWitness::ExceptionalDegree { vertex: 2, degree: -1 })
        ));
    }

    #[test]
    fn enumerate_balanced_examples() {
        let g = v3();
        let list = enumerate_balanced(&g, 0, BalanceLevel::Balanced).unwrap();
        assert_eq!(list, vec![md(&[-1, 1]), md(&[0, 0]), md(&[1, -1])]);

        let list = enumerate_balanced(&g, 6, BalanceLevel::Balanced).unwrap();
        assert_eq!(list, vec![md(&[2, 4]), md(&[3, 3]), md(&[4, 2])]);

        let single = DualGraph::build(vec![("C".into(), 2)], vec![]).unwrap();
        for d in [-5, 0, 3] {
            let list = enumerate_balanced(&single, d, BalanceLevel::Balanced).unwrap();
            assert_eq!(list, vec![md(&[d])]);
        }
    }

    #[test]
    fn enumerate_balanced_on_blowup() {
        let ctx = v3().blow_up(&[0]).unwrap();
        let list = enumerate_balanced(ctx.blown(), 2, BalanceLevel::Balanced).unwrap();
        assert_eq!(list, vec![md(&[0, 1, 1]), md(&[1, 0, 1])]);
    }

    #[test]
    fn enumerate_levels_nest() {
        let v2 = vine(2, 1, 1);
        let semi = enumerate_balanced(&v2, 0, BalanceLevel::Semibalanced).unwrap();
        let bal = enumerate_balanced(&v2, 0, BalanceLevel::Balanced).unwrap();
        let stable = enumerate_balanced(&v2, 0, BalanceLevel::StablyBalanced).unwrap();
        assert_eq!(semi, bal); // stable curve: no exceptional components
        assert_eq!(bal, vec![md(&[-1, 1]), md(&[0, 0]), md(&[1, -1])]);
        assert_eq!(stable, vec![md(&[0, 0])]);
    }

    #[test]
    fn semibalanced_representative_examples() {
        let g = v3();
        let reps = semibalanced_representatives(&g, &md(&[3, -3])).unwrap();
        assert_eq!(reps, vec![md(&[0, 0])]);

        let v2 = vine(2, 1, 1);
        let reps = semibalanced_representatives(&v2, &md(&[1, -1])).unwrap();
        assert_eq!(reps, vec![md(&[-1, 1]), md(&[1, -1])]);

        let reps = semibalanced_representatives(&g, &md(&[0, 0])).unwrap();
        assert_eq!(reps, vec![md(&[0, 0])]);
    }

    #[test]
    fn d_general_examples() {
        let r = is_d_general(&v3(), 0).unwrap();
        assert!(r.general);
        assert_eq!(r.balanced_count, 3);
        assert_eq!(r.certificate, DGeneralCertificate::Confirmed);

        let r = is_d_general(&vine(2, 1, 1), 0).unwrap();
        assert!(!r.general);
        match r.certificate {
            DGeneralCertificate::EquivalentPair(a, b) => {
                assert_eq!((a, b), (md(&[-1, 1]), md(&[1, -1])));
            }
            other => panic!("unexpected certificate {other:?}"),
        }

        let not_stable = v3().blow_up(&[0]).unwrap();
        assert!(matches!(
            is_d_general(not_stable.blown(), 0),
            Err(Error::NotStableCurve)
        ));
    }

    #[test]
    fn coprimality_examples() {
        assert!(coprimality(2, 4).unwrap());
        assert!(!coprimality(0, 4).unwrap());
        assert!(!coprimality(2, 3).unwrap()); // d = g-1 is degenerate
        assert!(!coprimality(-3, 4).unwrap()); // gcd(-6,6) = 6
        assert!(coprimality(-2, 4).unwrap()); // gcd(-5,6) = 1
        assert!(matches!(coprimality(0, 1), Err(Error::GenusTooSmall(1))));
    }

    #[test]
    fn rho_map_examples() {
        let g = v3();
        let ctx = g.blow_up(&[0]).unwrap();
        let table = rho_map(&ctx, 2).unwrap();
        assert_eq!(table.pairs.len(), 2);
        let reps: Vec<&Multidegree> =
            table.pairs.iter().map(|p| &p.balanced_on_blowup).collect();
        assert_eq!(reps, vec![&md(&[0, 1, 1]), &md(&[1, 0, 1])]);

        let empty = g.blow_up(&[]).unwrap();
        let table = rho_map(&empty, 2).unwrap();
        assert_eq!(table.pairs.len(), 3);
        for p in &table.pairs {
            assert_eq!(p.class_on_blowup, p.class_on_normalization);
        }

        let two = g.blow_up(&[0, 1]).unwrap();
        let table = rho_map(&two, 2).unwrap();
        assert_eq!(table.pairs.len(), 1);

        let all = g.blow_up(&[0, 1, 2]).unwrap();
        assert!(matches!(
            rho_map(&all, 2),
            Err(Error::DisconnectedNormalization)
        ));
    }

    #[test]
    fn rho_map_requires_d_general() {
        let v2 = vine(2, 1, 1);
        let ctx = v2.blow_up(&[0]).unwrap();
        assert!(matches!(rho_map(&ctx, 0), Err(Error::NotDGeneral)));
    }

    #[test]
    fn partition_by_support_examples() {
        let g = v3();
        let parts = partition_by_support(&g, 2).unwrap();
        let total: usize = parts.values().map(|v| v.len()).sum();
        assert_eq!(total, 12);
        assert_eq!(parts[&vec![]].len(), 3);
        for e in 0..3 {
            assert_eq!(parts[&vec![e]].len(), 2);
        }
        for s in [vec![0, 1], vec![0, 2], vec![1, 2]] {
            assert_eq!(parts[&s].len(), 1);
        }
        assert!(!parts.contains_key(&vec![0, 1, 2]));

        // block sizes match the rho tables
        for (s, group) in &parts {
            let ctx = g.blow_up(s).unwrap();
            let table = rho_map(&ctx, 2).unwrap();
            assert_eq!(group.len(), table.pairs.len());
        }

        // compact type: single key, the empty set
        let tree = DualGraph::build(
            vec![("A".into(), 2), ("B".into(), 2)],
            vec![(0, 1)],
        )
        .unwrap();
        let parts = partition_by_support(&tree, 2).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[&vec![]].len(), 1);
    }

    #[test]
    fn balanced_model_examples() {
        let g = v3();
        // balanced input comes back unchanged
        let (curve, deg) = balanced_model(&g, &md(&[0, 0])).unwrap();
        assert_eq!(curve, g);
        assert_eq!(deg, md(&[0, 0]));

        // one exceptional of degree 0 contracts to the smaller blow-up
        let ctx = g.blow_up(&[0, 1]).unwrap();
        let (curve, deg) = balanced_model(ctx.blown(), &md(&[0, 1, 1, 0])).unwrap();
        let expected = g.blow_up(&[0]).unwrap();
        assert_eq!(&curve, expected.blown());
        assert_eq!(deg, md(&[0, 1, 1]));
        let check = classify_multidegree(&curve, &deg).unwrap();
        assert!(check.level >= BalanceLevel::Balanced);

        // full blow-up, all exceptional degrees 0: back to the base curve
        let all = g.blow_up(&[0, 1, 2]).unwrap();
        let (curve, deg) = balanced_model(all.blown(), &md(&[0, 0, 0, 0, 0])).unwrap();
        assert_eq!(curve, g);
        assert_eq!(deg, md(&[0, 0]));

        assert!(matches!(
            balanced_model(&g, &md(&[3, -3])),
            Err(Error::NotSemibalanced)
        ));
    }

    #[test]
    fn count_picard_models_examples() {
        assert_eq!(count_picard_models(3).unwrap(), (1, vec![1]));
        assert_eq!(count_picard_models(4).unwrap(), (1, vec![2]));
        assert_eq!(count_picard_models(5).unwrap(), (2, vec![1, 3]));
        assert!(matches!(count_picard_models(2), Err(Error::GenusTooSmall(2))));
    }

    #[test]
    fn euler_phi_small_values() {
        let expected = [1u64, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4, 12, 6, 8];
        for (i, &phi) in expected.iter().enumerate() {
            assert_eq!(euler_phi(i as u64 + 1), phi);
        }
    }

    #[test]
    fn fast_labels_agree_with_exact_path() {
        for curve in [v3(), triangle(), vine(4, 0, 2)] {
            let dcg = DegreeClassGroup::new(&curve).unwrap();
            assert!(dcg.fast.is_some());
            let gamma = curve.vertex_count();
            for seed in 0..200i64 {
                let values: Vec<i64> = (0..gamma)
                    .map(|i| ((seed * 31 + i as i64 * 17) % 21) - 10)
                    .collect();
                let m = Multidegree::new(values.clone());
                let fast = dcg.fast.as_ref().unwrap().label(&values).unwrap();
                let exact = dcg
                    .twisters
                    .lattice()
                    .reduce(&to_bigint_vec(&values))
                    .unwrap();
                let exact: Vec<i64> = exact.into_iter().map(|x| i64::try_from(x).unwrap()).collect();
                assert_eq!(fast, exact);
                assert_eq!(dcg.class_label(&m).unwrap().values(), &exact[..]);
            }
        }
    }

    #[test]
    fn bound_identities() {
        // d = m_Z + M_{Z'} and the decomposition identity for M
        let g = v3();
        let d = 5;
        for verts in [vec![0], vec![1], vec![0, 1]] {
            let z = Subcurve::new(verts.clone()).unwrap();
            let (m, _) = basic_bounds(&g, d, &z).unwrap();
            if let Some(zc) = g.complement(&z) {
                let (_, cap) = basic_bounds(&g, d, &zc).unwrap();
                assert_eq!(Rational64::from_integer(d), m + cap);
            }
        }

        let t = triangle();
        let a = Subcurve::new([0]).unwrap();
        let b = Subcurve::new([1]).unwrap();
        let z = Subcurve::new([0, 1]).unwrap();
        let (_, m_z) = basic_bounds(&t, 4, &z).unwrap();
        let (_, m_a) = basic_bounds(&t, 4, &a).unwrap();
        let (_, m_b) = basic_bounds(&t, 4, &b).unwrap();
        // A and B meet in one node
        assert_eq!(m_z, m_a + m_b - Rational64::from_integer(1));
    }

    #[test]
    fn connected_filter_matches_all_subsets() {
        let curves = [v3(), triangle(), vine(4, 1, 0)];
        for curve in curves {
            let g = curve.genus();
            for d in 0..=(2 * g - 2) {
                for m in enumerate_balanced(&curve, d, BalanceLevel::Semibalanced).unwrap() {
                    assert!(satisfies_basic_inequality_all_subsets(&curve, &m).unwrap());
                }
            }
        }
    }

    #[test]
    fn nonzero_twisters_exceed_attachment_somewhere() {
        // every nonzero twister multidegree dominates k_Z on some subcurve
        let curve = v3();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                let t = twister_multidegree(&curve, &[a, b]).unwrap();
                if t.values().iter().all(|&x| x == 0) {
                    continue;
                }
                let masks = [vec![0], vec![1]];
                let found = masks.iter().any(|verts| {
                    let z = Subcurve::new(verts.clone()).unwrap();
                    let stats = curve.subcurve_stats(&z).unwrap();
                    t.restrict(&z) >= stats.k
                });
                assert!(found, "no subcurve with t_Z >= k_Z for {t}");
            }
        }
    }
}
