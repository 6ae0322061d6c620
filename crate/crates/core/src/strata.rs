//! Stratification of the compactified Néron model of a d-general stable
//! curve: one stratum per non-disconnecting node set, carrying the classes
//! of the corresponding partial normalization.

use num_bigint::BigInt;

use crate::error::Error;
use crate::graph::{CurveClass, DualGraph};
use crate::picard::{is_d_general, rho_map_unchecked, DegreeClassGroup, Multidegree};
use crate::Result;

/// One stratum: the node set `S`, its dimension `g - |S|`, and the classes
/// of total degree `d - |S|` on the normalization, together with their
/// balanced representatives on the blow-up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub node_set: Vec<usize>,
    pub dimension: i64,
    pub codimension: usize,
    /// Canonical class labels on the partial normalization; one per
    /// irreducible component of the stratum.
    pub component_classes: Vec<Multidegree>,
    /// The matching balanced multidegrees on the blow-up.
    pub balanced_reps: Vec<Multidegree>,
    pub irreducible: bool,
    /// Whether the partial normalization is of compact type.
    pub compact_type: bool,
    /// Dimension of the torus fibers over this stratum in the quotient
    /// description: always `|S|`.
    pub torus_fiber_dim: usize,
}

impl Stratum {
    pub fn component_count(&self) -> usize {
        self.component_classes.len()
    }
}

#[derive(Debug, Clone)]
pub struct Stratification {
    curve: DualGraph,
    degree: i64,
    strata: Vec<Stratum>,
}

/// Assertion summary produced alongside the minimal strata.
#[derive(Debug, Clone)]
pub struct MinimalStrataReport {
    pub count: usize,
    pub complexity: BigInt,
    pub class_group_order: BigInt,
    pub minimal_dimension: i64,
    pub count_matches: bool,
    pub all_irreducible_compact: bool,
    pub dimension_bound_holds: bool,
}

impl MinimalStrataReport {
    pub fn all_hold(&self) -> bool {
        self.count_matches && self.all_irreducible_compact && self.dimension_bound_holds
    }
}

/// Builds the stratification for a d-general stable curve: one stratum per
/// node set that keeps the curve connected, in size-then-lex order.
pub fn stratification(curve: &DualGraph, d: i64) -> Result<Stratification> {
    let (class, _) = curve.classify();
    if class < CurveClass::Stable {
        return Err(Error::NotStableCurve);
    }
    if !is_d_general(curve, d)?.general {
        return Err(Error::NotDGeneral);
    }
    let g = curve.genus();
    let mut strata = Vec::new();
    for s in curve.nondisconnecting_sets() {
        let ctx = curve.blow_up(&s)?;
        let table = rho_map_unchecked(&ctx, d)?;
        let mut component_classes: Vec<Multidegree> = table
            .pairs
            .iter()
            .map(|p| p.class_on_normalization.clone())
            .collect();
        component_classes.sort();
        let balanced_reps: Vec<Multidegree> = table
            .pairs
            .iter()
            .map(|p| p.balanced_on_blowup.clone())
            .collect();
        let irreducible = component_classes.len() == 1;
        strata.push(Stratum {
            dimension: g - s.len() as i64,
            codimension: s.len(),
            component_classes,
            balanced_reps,
            irreducible,
            compact_type: ctx.normalized().is_compact_type(),
            torus_fiber_dim: s.len(),
            node_set: s,
        });
    }
    Ok(Stratification {
        curve: curve.clone(),
        degree: d,
        strata,
    })
}

impl Stratification {
    pub fn curve(&self) -> &DualGraph {
        &self.curve
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum(&self, node_set: &[usize]) -> Option<&Stratum> {
        let mut key = node_set.to_vec();
        key.sort_unstable();
        key.dedup();
        self.strata.iter().find(|s| s.node_set == key)
    }

    fn member(&self, s: &Stratum) -> bool {
        self.strata.iter().any(|t| t == s)
    }

    /// Whether `a` lies in the closure of `b`: true exactly when
    /// `b.node_set ⊆ a.node_set`.
    pub fn closure_order(&self, a: &Stratum, b: &Stratum) -> Result<bool> {
        if !self.member(a) || !self.member(b) {
            return Err(Error::MixedStratifications);
        }
        Ok(b.node_set.iter().all(|e| a.node_set.contains(e)))
    }

    /// Strata of minimal dimension (the sum of the geometric genera),
    /// with the assertion report comparing their number against the
    /// complexity and the class-group order.
    pub fn minimal_strata(&self) -> (Vec<&Stratum>, MinimalStrataReport) {
        let genus_sum: i64 = self.curve.vertices().iter().map(|v| v.genus as i64).sum();
        let minimal: Vec<&Stratum> = self
            .strata
            .iter()
            .filter(|s| s.dimension == genus_sum)
            .collect();
        let complexity = self.curve.spanning_tree_count();
        let class_group_order = DegreeClassGroup::new(&self.curve)
            .expect("stable curve is connected")
            .order()
            .expect("connected curve has finite class group");
        let report = MinimalStrataReport {
            count: minimal.len(),
            count_matches: BigInt::from(minimal.len()) == complexity
                && complexity == class_group_order,
            complexity,
            class_group_order,
            minimal_dimension: genus_sum,
            all_irreducible_compact: minimal.iter().all(|s| s.irreducible && s.compact_type),
            dimension_bound_holds: self.strata.iter().all(|s| s.dimension >= genus_sum),
        };
        (minimal, report)
    }

    /// Total number of irreducible components over all strata.
    pub fn total_component_count(&self) -> usize {
        self.strata.iter().map(|s| s.component_count()).sum()
    }
}
