//! Dual graphs of nodal curves.
//!
//! A curve is modeled by a genus-labeled multigraph: one vertex per
//! irreducible component carrying its geometric genus, one edge per node,
//! with loops for nodes lying on a single component. Component order is
//! declaration order and fixes the coordinates of every multidegree.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::Error;
use crate::lattice::{FiniteAbelianGroup, IntegerMatrix, Lattice};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub genus: u32,
}

/// Genus-labeled multigraph of a nodal curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    exceptional: Vec<bool>,
    connected: bool,
}

/// Non-empty set of component indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subcurve {
    indices: Vec<usize>,
}

impl Subcurve {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::EmptySubcurve);
        }
        Ok(Subcurve { indices: v })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, v: usize) -> bool {
        self.indices.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Invariants of a subcurve `Z`: attaching number `k_Z`, genus `g_Z`, and
/// the degree `w_Z` of the dualizing sheaf restricted to `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubcurveStats {
    pub k: i64,
    pub genus: i64,
    pub w: i64,
    pub connected: bool,
    pub components: usize,
}

/// Stability classification of a connected nodal curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurveClass {
    NodalOnly,
    Semistable,
    Quasistable,
    Stable,
}

impl std::fmt::Display for CurveClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CurveClass::NodalOnly => "nodal_only",
            CurveClass::Semistable => "semistable",
            CurveClass::Quasistable => "quasistable",
            CurveClass::Stable => "stable",
        };
        write!(f, "{s}")
    }
}

impl DualGraph {
    /// Builds a connected dual graph. Vertex order is preserved and fixes
    /// multidegree coordinates.
    pub fn build(vertices: Vec<(String, u32)>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = Self::build_relaxed(vertices, edges)?;
        if !g.connected {
            return Err(Error::DisconnectedGraph);
        }
        Ok(g)
    }

    /// Same as [`DualGraph::build`] but allows a disconnected result; used
    /// for partial normalizations.
    pub(crate) fn build_relaxed(
        vertices: Vec<(String, u32)>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::DisconnectedGraph);
        }
        let mut seen = std::collections::HashSet::new();
        for (id, _) in &vertices {
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateVertexId(id.clone()));
            }
        }
        let n = vertices.len();
        for &(u, v) in &edges {
            if u >= n {
                return Err(Error::BadVertexIndex(u));
            }
            if v >= n {
                return Err(Error::BadVertexIndex(v));
            }
        }
        let exceptional = vec![false; n];
        let vertices = vertices
            .into_iter()
            .map(|(id, genus)| Vertex { id, genus })
            .collect();
        let mut g = DualGraph {
            vertices,
            edges,
            exceptional,
            connected: false,
        };
        g.connected = g.component_count_all() == 1;
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn is_exceptional_flagged(&self, v: usize) -> bool {
        self.exceptional[v]
    }

    /// Number of connected components of the whole graph.
    fn component_count_all(&self) -> usize {
        let all: Vec<usize> = (0..self.vertex_count()).collect();
        self.component_count(&all, None)
    }

    /// Connected components of the subgraph induced by `verts`, optionally
    /// skipping the edges listed in `removed`.
    fn component_count(&self, verts: &[usize], removed: Option<&[usize]>) -> usize {
        if verts.is_empty() {
            return 0;
        }
        let n = self.vertex_count();
        let mut in_set = vec![false; n];
        for &v in verts {
            in_set[v] = true;
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if let Some(rm) = removed {
                if rm.binary_search(&e).is_ok() {
                    continue;
                }
            }
            if in_set[u] && in_set[v] {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut seen = vec![false; n];
        let mut count = 0;
        for &start in verts {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        count
    }

    /// First Betti number `edge_count - vertex_count + 1`.
    pub fn betti(&self) -> i64 {
        self.edge_count() as i64 - self.vertex_count() as i64 + 1
    }

    /// Arithmetic genus: sum of geometric genera plus the Betti number.
    pub fn genus(&self) -> i64 {
        self.vertices.iter().map(|v| v.genus as i64).sum::<i64>() + self.betti()
    }

    pub fn is_compact_type(&self) -> bool {
        self.betti() == 0
    }

    /// Degree of the dualizing sheaf on a single component.
    fn vertex_w(&self, v: usize) -> i64 {
        let mut loops = 0i64;
        let mut ends = 0i64;
        for &(a, b) in &self.edges {
            if a == v && b == v {
                loops += 1;
            } else if a == v || b == v {
                ends += 1;
            }
        }
        2 * self.vertices[v].genus as i64 - 2 + 2 * loops + ends
    }

    /// `k_Z`, `g_Z`, `w_Z` and connectivity for a subcurve.
    ///
    /// `w_Z` is the degree of the dualizing sheaf on `Z`, additive over the
    /// components of `Z`; for connected `Z` it equals `2 g_Z - 2 + k_Z`.
    pub fn subcurve_stats(&self, z: &Subcurve) -> Result<SubcurveStats> {
        let n = self.vertex_count();
        for &v in z.indices() {
            if v >= n {
                return Err(Error::BadVertexIndex(v));
            }
        }
        let mut in_z = vec![false; n];
        for &v in z.indices() {
            in_z[v] = true;
        }
        let mut k = 0i64;
        let mut internal = 0i64;
        for &(u, v) in &self.edges {
            match (in_z[u], in_z[v]) {
                (true, true) => internal += 1,
                (true, false) | (false, true) => k += 1,
                _ => {}
            }
        }
        let components = self.component_count(z.indices(), None);
        let genus_sum: i64 = z.indices().iter().map(|&v| self.vertices[v].genus as i64).sum();
        let genus = genus_sum + internal - z.len() as i64 + components as i64;
        let w = 2 * genus - 2 * components as i64 + k;
        Ok(SubcurveStats {
            k,
            genus,
            w,
            connected: components == 1,
            components,
        })
    }

    pub fn complement(&self, z: &Subcurve) -> Option<Subcurve> {
        let rest: Vec<usize> = (0..self.vertex_count()).filter(|v| !z.contains(*v)).collect();
        Subcurve::new(rest).ok()
    }

    /// Components that are smooth rational with exactly two attaching nodes.
    pub fn exceptional_components(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| self.is_exceptional_component(v))
            .collect()
    }

    pub fn is_exceptional_component(&self, v: usize) -> bool {
        if self.vertices[v].genus != 0 {
            return false;
        }
        let mut loops = 0;
        let mut ends = 0;
        for &(a, b) in &self.edges {
            if a == v && b == v {
                loops += 1;
            } else if a == v || b == v {
                ends += 1;
            }
        }
        loops == 0 && ends == 2
    }

    /// Stability classification, together with the exceptional components.
    pub fn classify(&self) -> (CurveClass, Vec<usize>) {
        let exceptional = self.exceptional_components();
        let g = self.genus();
        if g < 2 {
            return (CurveClass::NodalOnly, exceptional);
        }
        let ws: Vec<i64> = (0..self.vertex_count()).map(|v| self.vertex_w(v)).collect();
        if ws.iter().any(|&w| w < 0) {
            return (CurveClass::NodalOnly, exceptional);
        }
        if ws.iter().all(|&w| w > 0) {
            return (CurveClass::Stable, exceptional);
        }
        // semistable; quasistable iff no two exceptional components meet
        let is_exc = |v: usize| exceptional.binary_search(&v).is_ok();
        let adjacent_exceptionals = self
            .edges
            .iter()
            .any(|&(u, v)| u != v && is_exc(u) && is_exc(v));
        if adjacent_exceptionals {
            (CurveClass::Semistable, exceptional)
        } else {
            (CurveClass::Quasistable, exceptional)
        }
    }

    /// Normalization of the curve at the nodes in `s`: deletes those edges.
    /// The result may be disconnected; query [`DualGraph::is_connected`].
    pub fn partial_normalization(&self, s: &[usize]) -> Result<DualGraph> {
        let s = canonical_set(s, self.edge_count())?;
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(e, _)| s.binary_search(e).is_err())
            .map(|(_, &uv)| uv)
            .collect();
        let vertices = self
            .vertices
            .iter()
            .map(|v| (v.id.clone(), v.genus))
            .collect();
        let mut g = DualGraph::build_relaxed(vertices, edges)?;
        g.exceptional = self.exceptional.clone();
        Ok(g)
    }

    /// Blow-up at the nodes in `s`: each selected edge is replaced by a
    /// length-two path through a new genus-0 exceptional vertex.
    pub fn blow_up(&self, s: &[usize]) -> Result<BlowUpContext> {
        let s = canonical_set(s, self.edge_count())?;
        let mut vertices: Vec<(String, u32)> = self
            .vertices
            .iter()
            .map(|v| (v.id.clone(), v.genus))
            .collect();
        let mut exceptional_vertex = BTreeMap::new();
        for &e in &s {
            let idx = vertices.len();
            vertices.push((format!("E@{e}"), 0));
            exceptional_vertex.insert(e, idx);
        }
        let mut edges = Vec::with_capacity(self.edge_count() + s.len());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            match exceptional_vertex.get(&e) {
                Some(&x) => {
                    edges.push((u, x));
                    edges.push((x, v));
                }
                None => edges.push((u, v)),
            }
        }
        let mut blown = DualGraph::build_relaxed(vertices, edges)?;
        blown.connected = self.connected;
        for &x in exceptional_vertex.values() {
            blown.exceptional[x] = true;
        }
        for (v, &f) in self.exceptional.iter().enumerate() {
            blown.exceptional[v] = f;
        }
        let normalized = self.partial_normalization(&s)?;
        Ok(BlowUpContext {
            base: self.clone(),
            node_set: s,
            blown,
            normalized,
            exceptional_vertex,
        })
    }

    /// Contracts the given vertices, each of which must be loop-free with
    /// exactly two edge-endpoints; the two edges are merged into one.
    pub fn contract_vertices(&self, remove: &[usize]) -> Result<DualGraph> {
        let remove = canonical_set(remove, self.vertex_count())?;
        let is_removed = |v: usize| remove.binary_search(&v).is_ok();
        for &x in &remove {
            if !self.is_exceptional_component(x) {
                return Err(Error::InvariantViolated(format!(
                    "vertex {x} is not contractible (needs genus 0, two attaching nodes)"
                )));
            }
        }
        // map old vertex index -> new
        let mut new_index = vec![usize::MAX; self.vertex_count()];
        let mut vertices = Vec::new();
        for (v, vert) in self.vertices.iter().enumerate() {
            if !is_removed(v) {
                new_index[v] = vertices.len();
                vertices.push((vert.id.clone(), vert.genus));
            }
        }
        // merge the two edges of each removed vertex at the slot of the
        // first one; neighbors of removed vertices must not be removed
        let mut partner: BTreeMap<usize, (usize, Option<usize>)> = BTreeMap::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            for (x, other) in [(u, v), (v, u)] {
                if is_removed(x) {
                    if is_removed(other) && other != x {
                        return Err(Error::InvariantViolated(
                            "cannot contract adjacent exceptional components".into(),
                        ));
                    }
                    let entry = partner.entry(x).or_insert((e, None));
                    if entry.0 != e {
                        entry.1 = Some(e);
                    }
                }
            }
        }
        let mut edges = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if is_removed(u) || is_removed(v) {
                let x = if is_removed(u) { u } else { v };
                let (first, second) = partner[&x];
                let second = second.expect("contractible vertex has two edges");
                if e == first {
                    // endpoints of the merged edge: the non-removed ends
                    let (a1, b1) = self.edges[first];
                    let (a2, b2) = self.edges[second];
                    let p = if a1 == x { b1 } else { a1 };
                    let q = if a2 == x { b2 } else { a2 };
                    edges.push((new_index[p], new_index[q]));
                }
            } else {
                edges.push((new_index[u], new_index[v]));
            }
        }
        let mut g = DualGraph::build_relaxed(vertices, edges)?;
        for (v, &f) in self.exceptional.iter().enumerate() {
            if new_index[v] != usize::MAX {
                g.exceptional[new_index[v]] = f;
            }
        }
        g.connected = self.connected;
        Ok(g)
    }

    /// All node sets `S` (including the empty set) whose removal keeps the
    /// curve connected, in size-then-lexicographic order.
    pub fn nondisconnecting_sets(&self) -> Vec<Vec<usize>> {
        let max = self.betti().max(0) as usize;
        let m = self.edge_count();
        let mut out = Vec::new();
        for size in 0..=max.min(m) {
            let mut combo: Vec<usize> = (0..size).collect();
            loop {
                let all: Vec<usize> = (0..self.vertex_count()).collect();
                if self.component_count(&all, Some(&combo)) == 1 {
                    out.push(combo.clone());
                }
                if !next_combination(&mut combo, m) {
                    break;
                }
            }
        }
        out
    }

    /// Number of spanning trees (the complexity), by the determinant of a
    /// reduced Laplacian in exact integer arithmetic. Loops are ignored.
    pub fn spanning_tree_count(&self) -> BigInt {
        let n = self.vertex_count();
        if n == 1 {
            return BigInt::from(1);
        }
        let mut lap = IntegerMatrix::zeros(n - 1, n - 1);
        for &(u, v) in &self.edges {
            if u == v {
                continue;
            }
            for x in [u, v] {
                if x < n - 1 {
                    let t = lap.get(x, x) + 1;
                    lap.set(x, x, t);
                }
            }
            if u < n - 1 && v < n - 1 {
                let t = lap.get(u, v) - 1;
                lap.set(u, v, t);
                let t = lap.get(v, u) - 1;
                lap.set(v, u, t);
            }
        }
        lap.determinant()
    }

    /// The complexity group `im ∂ / im (∂∘δ)` of the graph, for the
    /// homology operators of a fixed orientation. Its order equals the
    /// number of spanning trees.
    pub fn homology_complexity_group(&self) -> FiniteAbelianGroup {
        let n = self.vertex_count();
        let m = self.edge_count();
        // boundary: an edge u -> v maps to u - v; loops map to zero
        let mut boundary = IntegerMatrix::zeros(n, m);
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if u == v {
                continue;
            }
            boundary.set(u, e, BigInt::from(1));
            boundary.set(v, e, BigInt::from(-1));
        }
        let composed = boundary.mul(&boundary.transpose());
        Lattice::new(boundary)
            .quotient_by(&composed)
            .expect("im(∂∘δ) is contained in im(∂)")
    }

    /// Connected non-empty vertex subsets, as bitmasks over vertex indices.
    pub(crate) fn connected_subset_masks(&self) -> Vec<u64> {
        let n = self.vertex_count();
        assert!(n <= 60, "graph too large for subset enumeration");
        let mut adj = vec![0u64; n];
        for &(u, v) in &self.edges {
            if u != v {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        let mut out = Vec::new();
        for mask in 1u64..(1 << n) {
            let start = mask.trailing_zeros() as usize;
            let mut seen = 1u64 << start;
            let mut frontier = seen;
            while frontier != 0 {
                let mut next = 0u64;
                let mut f = frontier;
                while f != 0 {
                    let v = f.trailing_zeros() as usize;
                    f &= f - 1;
                    next |= adj[v] & mask & !seen;
                }
                seen |= next;
                frontier = next;
            }
            if seen == mask {
                out.push(mask);
            }
        }
        out
    }
}

/// Blow-up of a curve at a set of nodes, together with the partial
/// normalization at the same nodes and the bookkeeping relating them.
#[derive(Debug, Clone)]
pub struct BlowUpContext {
    base: DualGraph,
    node_set: Vec<usize>,
    blown: DualGraph,
    normalized: DualGraph,
    exceptional_vertex: BTreeMap<usize, usize>,
}

impl BlowUpContext {
    pub fn base(&self) -> &DualGraph {
        &self.base
    }

    pub fn node_set(&self) -> &[usize] {
        &self.node_set
    }

    /// The blown-up curve `Y_S`; base vertices keep their indices and the
    /// exceptional vertices follow in node order.
    pub fn blown(&self) -> &DualGraph {
        &self.blown
    }

    /// The partial normalization `X_S^ν` (possibly disconnected).
    pub fn normalized(&self) -> &DualGraph {
        &self.normalized
    }

    /// Index in the blown-up curve of the exceptional vertex over a node.
    pub fn exceptional_vertex(&self, edge: usize) -> Option<usize> {
        self.exceptional_vertex.get(&edge).copied()
    }

    pub fn exceptional_indices(&self) -> Vec<usize> {
        self.exceptional_vertex.values().copied().collect()
    }

    /// Number of points where `z` (a subcurve of the normalization) meets
    /// the exceptional components of the blow-up.
    pub fn e_z(&self, z: &Subcurve) -> Result<i64> {
        self.check_base_subcurve(z)?;
        let exc: Vec<usize> = self.exceptional_indices();
        let mut count = 0;
        for &(u, v) in self.blown.edges() {
            let u_exc = exc.binary_search(&u).is_ok();
            let v_exc = exc.binary_search(&v).is_ok();
            if (u_exc && !v_exc && z.contains(v)) || (v_exc && !u_exc && z.contains(u)) {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Attaching number of `z` inside the partial normalization.
    pub fn k_z_s(&self, z: &Subcurve) -> Result<i64> {
        self.check_base_subcurve(z)?;
        Ok(self.normalized.subcurve_stats(z)?.k)
    }

    /// Attaching number of `z` inside the blown-up curve; always equals
    /// `e_z + k_z_s`.
    pub fn k_z_blown(&self, z: &Subcurve) -> Result<i64> {
        self.check_base_subcurve(z)?;
        Ok(self.blown.subcurve_stats(z)?.k)
    }

    /// Number of exceptional components not in `z` (a subcurve of the
    /// blown-up curve) meeting `z` in two points.
    pub fn t_z(&self, z: &Subcurve) -> Result<i64> {
        let mut count = 0;
        for &x in self.exceptional_vertex.values() {
            if z.contains(x) {
                continue;
            }
            let mut meets = 0;
            for &(u, v) in self.blown.edges() {
                if u == x && z.contains(v) {
                    meets += 1;
                }
                if v == x && z.contains(u) {
                    meets += 1;
                }
            }
            if meets == 2 {
                count += 1;
            }
        }
        Ok(count)
    }

    fn check_base_subcurve(&self, z: &Subcurve) -> Result<()> {
        match z.indices().iter().find(|&&v| v >= self.base.vertex_count()) {
            Some(&v) => Err(Error::BadVertexIndex(v)),
            None => Ok(()),
        }
    }
}

/// Sorts, dedups and bounds-checks a set of indices.
fn canonical_set(s: &[usize], limit: usize) -> Result<Vec<usize>> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&e| e >= limit) {
        return Err(Error::BadEdgeIndex(bad));
    }
    Ok(v)
}

/// Advances `combo` to the next k-combination of `0..m` in lexicographic
/// order; returns false after the last one.
fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let k = combo.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < m - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vine(k: usize, g1: u32, g2: u32) -> DualGraph {
        DualGraph::build(
            vec![("C1".into(), g1), ("C2".into(), g2)],
            vec![(0, 1); k],
        )
        .unwrap()
    }

    fn v3() -> DualGraph {
        vine(3, 1, 1)
    }

    fn triangle(g: u32) -> DualGraph {
        DualGraph::build(
            vec![("A".into(), g), ("B".into(), g), ("C".into(), g)],
            vec![(0, 1), (1, 2), (0, 2)],
        )
        .unwrap()
    }

    /// Brute-force spanning tree count: try all (γ-1)-subsets of non-loop
    /// edges and keep those that connect all vertices without a cycle.
    fn spanning_trees_brute(g: &DualGraph) -> u64 {
        let n = g.vertex_count();
        if n == 1 {
            return 1;
        }
        let edges: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| u != v)
            .collect();
        let m = edges.len();
        if m < n - 1 {
            return 0;
        }
        let mut count = 0;
        let mut combo: Vec<usize> = (0..n - 1).collect();
        loop {
            // union-find over the chosen edges
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            let mut acyclic = true;
            for &e in &combo {
                let (u, v) = edges[e];
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru == rv {
                    acyclic = false;
                    break;
                }
                parent[ru] = rv;
            }
            if acyclic {
                count += 1;
            }
            if !next_combination(&mut combo, m) {
                break;
            }
        }
        count
    }

    #[test]
    fn build_valid_and_invalid() {
        let single = DualGraph::build(vec![("C".into(), 3)], vec![]).unwrap();
        assert_eq!(single.vertex_count(), 1);
        assert!(v3().is_connected());
        let err = DualGraph::build(
            vec![("A".into(), 1), ("B".into(), 1)],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, Error::DisconnectedGraph);
        let err = DualGraph::build(
            vec![("A".into(), 1), ("A".into(), 2)],
            vec![(0, 1)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateVertexId(_)));
        let err = DualGraph::build(vec![("A".into(), 1)], vec![(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::BadVertexIndex(1)));
    }

    #[test]
    fn genus_examples() {
        assert_eq!(v3().genus(), 4);
        let loop_curve =
            DualGraph::build(vec![("C".into(), 2)], vec![(0, 0)]).unwrap();
        assert_eq!(loop_curve.genus(), 3);
        let tree = DualGraph::build(
            vec![("A".into(), 0), ("B".into(), 0), ("C".into(), 0)],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        assert_eq!(tree.genus(), 0);
    }

    #[test]
    fn betti_examples() {
        assert_eq!(v3().betti(), 2);
        let tree = DualGraph::build(
            vec![("A".into(), 1), ("B".into(), 1)],
            vec![(0, 1)],
        )
        .unwrap();
        assert_eq!(tree.betti(), 0);
        assert!(tree.is_compact_type());
        assert_eq!(triangle(1).betti(), 1);
        assert!(!v3().is_compact_type());
        let loop_curve = DualGraph::build(vec![("C".into(), 1)], vec![(0, 0)]).unwrap();
        assert!(!loop_curve.is_compact_type());
    }

    #[test]
    fn subcurve_stats_examples() {
        let g = v3();
        let z = Subcurve::new([0]).unwrap();
        let s = g.subcurve_stats(&z).unwrap();
        assert_eq!((s.k, s.genus, s.w), (3, 1, 3));
        assert!(s.connected);

        let full = Subcurve::new([0, 1]).unwrap();
        let s = g.subcurve_stats(&full).unwrap();
        assert_eq!((s.k, s.genus, s.w), (0, g.genus(), 2 * g.genus() - 2));

        let t = triangle(1);
        let z = Subcurve::new([0, 1]).unwrap();
        let s = t.subcurve_stats(&z).unwrap();
        // 2 genus + 1 internal edge - 2 vertices + 1 component
        assert_eq!((s.k, s.genus, s.w), (2, 2, 4));

        assert_eq!(Subcurve::new([]).unwrap_err(), Error::EmptySubcurve);
    }

    #[test]
    fn subcurve_complement_symmetry_and_additivity() {
        // path A-B-C with a disconnected subcurve {A, C}
        let path = DualGraph::build(
            vec![("A".into(), 1), ("B".into(), 2), ("C".into(), 1)],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        let z = Subcurve::new([0, 2]).unwrap();
        let s = path.subcurve_stats(&z).unwrap();
        assert!(!s.connected);
        assert_eq!(s.components, 2);
        let zc = path.complement(&z).unwrap();
        let sc = path.subcurve_stats(&zc).unwrap();
        assert_eq!(s.k, sc.k);
        assert_eq!(s.w + sc.w, 2 * path.genus() - 2);
        // additivity over the two pieces
        let a = path.subcurve_stats(&Subcurve::new([0]).unwrap()).unwrap();
        let c = path.subcurve_stats(&Subcurve::new([2]).unwrap()).unwrap();
        assert_eq!(s.k, a.k + c.k);
        assert_eq!(s.genus, a.genus + c.genus);
        assert_eq!(s.w, a.w + c.w);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(v3().classify().0, CurveClass::Stable);

        let blown = v3().blow_up(&[0]).unwrap();
        let (class, exc) = blown.blown().classify();
        assert_eq!(class, CurveClass::Quasistable);
        assert_eq!(exc, vec![2]);

        // chain C1 - E1 - E2 - C2 with adjacent exceptional components
        let chain = DualGraph::build(
            vec![
                ("C1".into(), 1),
                ("E1".into(), 0),
                ("E2".into(), 0),
                ("C2".into(), 1),
            ],
            vec![(0, 1), (1, 2), (2, 3)],
        )
        .unwrap();
        let (class, exc) = chain.classify();
        assert_eq!(class, CurveClass::Semistable);
        assert_eq!(exc, vec![1, 2]);

        let tiny = DualGraph::build(vec![("A".into(), 0)], vec![]).unwrap();
        assert_eq!(tiny.classify().0, CurveClass::NodalOnly);
    }

    #[test]
    fn partial_normalization_examples() {
        let g = v3();
        let one = g.partial_normalization(&[0]).unwrap();
        assert_eq!(one.edge_count(), 2);
        assert!(one.is_connected());
        let all = g.partial_normalization(&[0, 1, 2]).unwrap();
        assert!(!all.is_connected());
        let loop_curve = DualGraph::build(vec![("C".into(), 2)], vec![(0, 0)]).unwrap();
        let n = loop_curve.partial_normalization(&[0]).unwrap();
        assert_eq!(n.vertex_count(), 1);
        assert_eq!(n.genus(), 2);
        assert!(matches!(
            g.partial_normalization(&[7]),
            Err(Error::BadEdgeIndex(7))
        ));
    }

    #[test]
    fn blow_up_examples() {
        let g = v3();
        let empty = g.blow_up(&[]).unwrap();
        assert_eq!(empty.blown(), &g);

        let ctx = g.blow_up(&[0]).unwrap();
        assert_eq!(ctx.blown().vertex_count(), 3);
        assert_eq!(ctx.blown().edge_count(), 4);
        assert_eq!(ctx.exceptional_indices(), vec![2]);
        assert!(ctx.blown().is_exceptional_flagged(2));
        assert_eq!(ctx.blown().genus(), g.genus());

        // blowing up a loop: two parallel edges to the new vertex
        let loop_curve = DualGraph::build(vec![("C".into(), 2)], vec![(0, 0)]).unwrap();
        let ctx = loop_curve.blow_up(&[0]).unwrap();
        assert_eq!(ctx.blown().vertex_count(), 2);
        assert_eq!(ctx.blown().edges(), &[(0, 1), (1, 0)]);
        assert_eq!(ctx.blown().genus(), 3);
    }

    #[test]
    fn blow_up_then_contract_is_identity() {
        for s in [vec![], vec![1], vec![0, 2], vec![0, 1, 2]] {
            let g = v3();
            let ctx = g.blow_up(&s).unwrap();
            let back = ctx
                .blown()
                .contract_vertices(&ctx.exceptional_indices())
                .unwrap();
            assert_eq!(back, g);
        }
        let loop_curve = DualGraph::build(vec![("C".into(), 2)], vec![(0, 0)]).unwrap();
        let ctx = loop_curve.blow_up(&[0]).unwrap();
        let back = ctx
            .blown()
            .contract_vertices(&ctx.exceptional_indices())
            .unwrap();
        assert_eq!(back, loop_curve);
    }

    #[test]
    fn blow_up_bookkeeping() {
        let g = v3();
        let ctx = g.blow_up(&[0, 1]).unwrap();
        for z in [Subcurve::new([0]).unwrap(), Subcurve::new([1]).unwrap(), Subcurve::new([0, 1]).unwrap()] {
            let e = ctx.e_z(&z).unwrap();
            let ks = ctx.k_z_s(&z).unwrap();
            let k = ctx.k_z_blown(&z).unwrap();
            assert_eq!(e + ks, k);
        }
        // exceptional vertex not in z, meeting z twice
        let z = Subcurve::new([0, 1]).unwrap();
        assert_eq!(ctx.t_z(&z).unwrap(), 2);
        let z = Subcurve::new([0]).unwrap();
        assert_eq!(ctx.t_z(&z).unwrap(), 0);
    }

    #[test]
    fn nondisconnecting_sets_examples() {
        let sets = v3().nondisconnecting_sets();
        assert_eq!(sets.len(), 7);
        assert_eq!(sets[0], Vec::<usize>::new());
        assert!(sets.iter().all(|s| s.len() <= 2));
        // size-then-lex order
        assert_eq!(
            sets,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2]
            ]
        );

        let tree = DualGraph::build(
            vec![("A".into(), 1), ("B".into(), 1)],
            vec![(0, 1)],
        )
        .unwrap();
        assert_eq!(tree.nondisconnecting_sets(), vec![Vec::<usize>::new()]);

        let loop_curve = DualGraph::build(vec![("C".into(), 2)], vec![(0, 0)]).unwrap();
        assert_eq!(
            loop_curve.nondisconnecting_sets(),
            vec![vec![], vec![0]]
        );
    }

    #[test]
    fn max_nondisconnecting_size_is_betti() {
        for g in [v3(), triangle(1), vine(5, 1, 0)] {
            let sets = g.nondisconnecting_sets();
            let max = sets.iter().map(|s| s.len()).max().unwrap() as i64;
            assert_eq!(max, g.betti());
        }
    }

    #[test]
    fn spanning_tree_examples() {
        assert_eq!(v3().spanning_tree_count(), BigInt::from(3));
        assert_eq!(triangle(0).spanning_tree_count(), BigInt::from(3));
        let tree = DualGraph::build(
            vec![("A".into(), 1), ("B".into(), 1), ("C".into(), 0)],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        assert_eq!(tree.spanning_tree_count(), BigInt::from(1));
        let single = DualGraph::build(vec![("C".into(), 2)], vec![(0, 0)]).unwrap();
        assert_eq!(single.spanning_tree_count(), BigInt::from(1));
    }

    #[test]
    fn spanning_trees_match_brute_force() {
        let samples = vec![
            v3(),
            triangle(1),
            vine(4, 1, 1),
            DualGraph::build(
                vec![("A".into(), 0), ("B".into(), 1), ("C".into(), 0), ("D".into(), 2)],
                vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 1)],
            )
            .unwrap(),
        ];
        for g in samples {
            assert_eq!(
                g.spanning_tree_count(),
                BigInt::from(spanning_trees_brute(&g))
            );
        }
    }

    #[test]
    fn complexity_group_examples() {
        let g = v3().homology_complexity_group();
        assert_eq!(g.invariant_factors, vec![BigInt::from(3)]);
        assert_eq!(g.free_rank, 0);

        let tree = DualGraph::build(
            vec![("A".into(), 1), ("B".into(), 1)],
            vec![(0, 1)],
        )
        .unwrap();
        assert!(tree.homology_complexity_group().is_trivial());

        let tri = triangle(0).homology_complexity_group();
        assert_eq!(tri.invariant_factors, vec![BigInt::from(3)]);
    }

    #[test]
    fn complexity_group_order_equals_tree_count() {
        let samples = vec![
            v3(),
            vine(6, 0, 2),
            triangle(2),
            DualGraph::build(
                vec![("A".into(), 0), ("B".into(), 0), ("C".into(), 1), ("D".into(), 0)],
                vec![(0, 1), (0, 1), (1, 2), (2, 3), (3, 0), (1, 3), (2, 2)],
            )
            .unwrap(),
        ];
        for g in samples {
            assert_eq!(
                g.homology_complexity_group().order().unwrap(),
                g.spanning_tree_count()
            );
        }
    }

    #[test]
    fn connected_subset_masks_small() {
        let g = v3();
        assert_eq!(g.connected_subset_masks(), vec![0b01, 0b10, 0b11]);
        let tri = triangle(0);
        assert_eq!(tri.connected_subset_masks().len(), 7);
    }
}
