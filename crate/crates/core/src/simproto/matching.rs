//! Decoders for graph-like check matrices.
//!
//! Every check is a node, every column of weight two is an edge between its
//! checks, and every column of weight one is an edge to a shared virtual
//! boundary node. Weight-zero columns are ignored.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2la::{BitMatrix, BitVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("column {column} has weight {weight}; matching needs weight ≤ 2")]
    NotGraphLike { column: usize, weight: usize },
    #[error("syndrome has length {found}, expected {expected}")]
    SyndromeLength { expected: usize, found: usize },
    #[error("defects cannot be paired: odd parity in a component without boundary")]
    Unmatchable,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    /// Minimum-weight pairing, falling back to union-find above
    /// [`EXACT_DEFECT_LIMIT`] defects.
    #[default]
    Exact,
    UnionFind,
}

impl std::str::FromStr for DecoderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Self::Exact),
            "union-find" | "uf" => Ok(Self::UnionFind),
            _ => Err(format!("unknown decoder '{s}' (expected exact or union-find)")),
        }
    }
}

/// Largest defect count handled by the exact pairing DP.
pub const EXACT_DEFECT_LIMIT: usize = 16;

#[derive(Clone, Debug)]
pub struct Decoding {
    pub correction: BitVec,
    /// The exact decoder gave up and used union-find.
    pub fell_back: bool,
}

#[derive(Clone, Debug)]
pub struct DecodingGraph {
    checks: usize,
    columns: usize,
    /// `(a, b, column)`; node `checks` is the boundary.
    edges: Vec<(usize, usize, usize)>,
    /// Incident edge indices per node.
    incident: Vec<Vec<usize>>,
    has_boundary: bool,
    h: BitMatrix,
}

impl DecodingGraph {
    pub fn new(h: &BitMatrix) -> Result<Self, DecodeError> {
        let checks = h.rows();
        let ht = h.transpose();
        let mut edges = Vec::new();
        let mut incident = vec![Vec::new(); checks + 1];
        let mut has_boundary = false;
        for q in 0..h.cols() {
            let ends: Vec<usize> = ht.row(q).support().collect();
            let (a, b) = match ends.len() {
                0 => continue,
                1 => {
                    has_boundary = true;
                    (ends[0], checks)
                }
                2 => (ends[0], ends[1]),
                w => return Err(DecodeError::NotGraphLike { column: q, weight: w }),
            };
            incident[a].push(edges.len());
            incident[b].push(edges.len());
            edges.push((a, b, q));
        }
        Ok(Self {
            checks,
            columns: h.cols(),
            edges,
            incident,
            has_boundary,
            h: h.clone(),
        })
    }

    pub fn checks(&self) -> usize {
        self.checks
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn has_boundary(&self) -> bool {
        self.has_boundary
    }

    fn boundary(&self) -> usize {
        self.checks
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let (a, b, _) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Decodes and checks that the correction reproduces the syndrome.
    pub fn decode(&self, syndrome: &BitVec, kind: DecoderKind) -> Result<Decoding, DecodeError> {
        if syndrome.len() != self.checks {
            return Err(DecodeError::SyndromeLength {
                expected: self.checks,
                found: syndrome.len(),
            });
        }
        let defects: Vec<usize> = syndrome.support().collect();
        let out = match kind {
            DecoderKind::Exact if defects.len() <= EXACT_DEFECT_LIMIT => Decoding {
                correction: self.exact(&defects)?,
                fell_back: false,
            },
            DecoderKind::Exact => Decoding {
                correction: self.union_find(&defects)?,
                fell_back: true,
            },
            DecoderKind::UnionFind => Decoding {
                correction: self.union_find(&defects)?,
                fell_back: false,
            },
        };
        let check = self
            .h
            .mul_vec(&out.correction)
            .expect("correction has one bit per column");
        assert_eq!(
            &check, syndrome,
            "decoder produced a correction with the wrong syndrome"
        );
        Ok(out)
    }

    /// BFS tree from `src`: distance and parent edge per node.
    fn bfs(&self, src: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.checks + 1;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::from([src]);
        dist[src] = 0;
        while let Some(v) = queue.pop_front() {
            for &e in &self.incident[v] {
                let u = self.other(e, v);
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    parent[u] = e;
                    queue.push_back(u);
                }
            }
        }
        (dist, parent)
    }

    fn trace(&self, parent: &[usize], src: usize, mut dst: usize, out: &mut BitVec) {
        while dst != src {
            let e = parent[dst];
            out.flip(self.edges[e].2);
            dst = self.other(e, dst);
        }
    }

    /// Minimum-weight pairing of defects (each may also pair with the
    /// boundary) by DP over subsets.
    fn exact(&self, defects: &[usize]) -> Result<BitVec, DecodeError> {
        let mut out = BitVec::zeros(self.columns);
        let t = defects.len();
        if t == 0 {
            return Ok(out);
        }
        let trees: Vec<(Vec<usize>, Vec<usize>)> = defects.iter().map(|&d| self.bfs(d)).collect();
        let bnd = self.boundary();
        let to_boundary: Vec<usize> = trees
            .iter()
            .map(|(dist, _)| if self.has_boundary { dist[bnd] } else { usize::MAX })
            .collect();

        const INF: usize = usize::MAX / 4;
        let cost = |d: usize| if d == usize::MAX { INF } else { d };
        let full = (1usize << t) - 1;
        let mut dp = vec![INF; 1 << t];
        // Choice per mask: partner index, or t for the boundary.
        let mut choice = vec![usize::MAX; 1 << t];
        dp[0] = 0;
        for mask in 1..=full {
            let i = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << i);
            let via_b = dp[rest].saturating_add(cost(to_boundary[i]));
            if via_b < dp[mask] {
                dp[mask] = via_b;
                choice[mask] = t;
            }
            let mut others = rest;
            while others != 0 {
                let j = others.trailing_zeros() as usize;
                others &= others - 1;
                let c = dp[rest & !(1 << j)].saturating_add(cost(trees[i].0[defects[j]]));
                if c < dp[mask] {
                    dp[mask] = c;
                    choice[mask] = j;
                }
            }
        }
        if dp[full] >= INF {
            return Err(DecodeError::Unmatchable);
        }
        let mut mask = full;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            let j = choice[mask];
            if j == t {
                self.trace(&trees[i].1, defects[i], bnd, &mut out);
                mask &= !(1 << i);
            } else {
                self.trace(&trees[i].1, defects[i], defects[j], &mut out);
                mask &= !(1 << i) & !(1 << j);
            }
        }
        Ok(out)
    }

    /// Cluster growth by half-edges, then peeling of a spanning forest.
    fn union_find(&self, defects: &[usize]) -> Result<BitVec, DecodeError> {
        let n = self.checks + 1;
        let bnd = self.boundary();
        let mut defect = vec![false; n];
        for &d in defects {
            defect[d] = true;
        }
        let mut uf = Clusters::new(n, &defect, bnd);
        let mut grown = vec![0u8; self.edges.len()];
        loop {
            let active = |uf: &mut Clusters, v: usize| {
                let r = uf.find(v);
                uf.odd[r] && !uf.boundary[r]
            };
            let mut any_active = false;
            let mut newly_full = Vec::new();
            for (e, &(a, b, _)) in self.edges.iter().enumerate() {
                if grown[e] >= 2 {
                    continue;
                }
                let inc = active(&mut uf, a) as u8 + active(&mut uf, b) as u8;
                if inc > 0 {
                    any_active = true;
                    grown[e] = (grown[e] + inc).min(2);
                    if grown[e] == 2 {
                        newly_full.push(e);
                    }
                }
            }
            if !any_active {
                let stuck = (0..n).any(|v| active(&mut uf, v));
                if stuck {
                    return Err(DecodeError::Unmatchable);
                }
                break;
            }
            for e in newly_full {
                let (a, b, _) = self.edges[e];
                uf.union(a, b);
            }
        }

        // Spanning forest of fully grown edges, rooted at the boundary first.
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let roots = std::iter::once(bnd).chain(0..self.checks);
        for root in roots {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &e in &self.incident[v] {
                    if grown[e] < 2 {
                        continue;
                    }
                    let u = self.other(e, v);
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = e;
                        queue.push_back(u);
                    }
                }
            }
        }
        let mut out = BitVec::zeros(self.columns);
        for &v in order.iter().rev() {
            if parent[v] == usize::MAX {
                if defect[v] && v != bnd {
                    return Err(DecodeError::Unmatchable);
                }
                continue;
            }
            if defect[v] {
                let e = parent[v];
                out.flip(self.edges[e].2);
                defect[v] = false;
                let u = self.other(e, v);
                defect[u] = !defect[u];
            }
        }
        Ok(out)
    }
}

struct Clusters {
    parent: Vec<usize>,
    odd: Vec<bool>,
    boundary: Vec<bool>,
}

impl Clusters {
    fn new(n: usize, defect: &[bool], bnd: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            odd: defect.to_vec(),
            boundary: (0..n).map(|v| v == bnd).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        self.parent[rb] = ra;
        self.odd[ra] ^= self.odd[rb];
        self.boundary[ra] |= self.boundary[rb];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell2::{build_cylinder, build_torus, css_of_complex};
    use proptest::prelude::*;

    fn weight_le_two_oracle(h: &BitMatrix, syndrome: &BitVec) -> Option<usize> {
        let n = h.cols();
        let matches = |v: &BitVec| &h.mul_vec(v).unwrap() == syndrome;
        if matches(&BitVec::zeros(n)) {
            return Some(0);
        }
        for a in 0..n {
            if matches(&BitVec::from_support(n, [a])) {
                return Some(1);
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if matches(&BitVec::from_support(n, [a, b])) {
                    return Some(2);
                }
            }
        }
        None
    }

    #[test]
    fn empty_syndrome_empty_correction() {
        let h = css_of_complex(&build_torus(3).unwrap()).h_x().clone();
        let g = DecodingGraph::new(&h).unwrap();
        for kind in [DecoderKind::Exact, DecoderKind::UnionFind] {
            assert!(g.decode(&BitVec::zeros(h.rows()), kind).unwrap().correction.is_zero());
        }
    }

    #[test]
    fn boundary_defect_uses_one_edge() {
        let code = css_of_complex(&build_cylinder(3, 3).unwrap());
        let h = code.h_z().clone();
        let g = DecodingGraph::new(&h).unwrap();
        assert!(g.has_boundary());
        let col = (0..h.cols()).find(|&q| h.column(q).weight() == 1).unwrap();
        let syn = h.mul_vec(&BitVec::from_support(h.cols(), [col])).unwrap();
        let c = g.decode(&syn, DecoderKind::Exact).unwrap().correction;
        assert_eq!(c.weight(), 1);
        assert_eq!(weight_le_two_oracle(&h, &syn), Some(1));
    }

    #[test]
    fn two_step_pair_is_minimal() {
        let h = css_of_complex(&build_torus(5).unwrap()).h_x().clone();
        let g = DecodingGraph::new(&h).unwrap();
        let n = h.cols();
        // Two edges meeting at a vertex: defects at distance two.
        let e = BitVec::from_support(n, [0, 25]);
        let syn = h.mul_vec(&e).unwrap();
        assert_eq!(syn.weight(), 2);
        let c = g.decode(&syn, DecoderKind::Exact).unwrap().correction;
        assert_eq!(Some(c.weight()), weight_le_two_oracle(&h, &syn));
        assert_eq!(c.weight(), 2);
    }

    #[test]
    fn odd_parity_without_boundary_fails() {
        let h = css_of_complex(&build_torus(3).unwrap()).h_x().clone();
        let g = DecodingGraph::new(&h).unwrap();
        let syn = BitVec::from_support(h.rows(), [0]);
        assert_eq!(
            g.decode(&syn, DecoderKind::Exact).unwrap_err(),
            DecodeError::Unmatchable
        );
        assert_eq!(
            g.decode(&syn, DecoderKind::UnionFind).unwrap_err(),
            DecodeError::Unmatchable
        );
    }

    #[test]
    fn hyperedges_rejected() {
        let h = BitMatrix::from_row_strings(1, &["1", "1", "1"]).unwrap();
        assert!(matches!(DecodingGraph::new(&h), Err(DecodeError::NotGraphLike { .. })));
    }

    proptest! {
        #[test]
        fn exact_never_heavier_than_union_find(
            d in 3usize..6,
            cyl in any::<bool>(),
            errs in proptest::collection::vec(0usize..1000, 0..8),
        ) {
            let code = if cyl {
                css_of_complex(&build_cylinder(d, d).unwrap())
            } else {
                css_of_complex(&build_torus(d).unwrap())
            };
            for h in [code.h_x(), code.h_z()] {
                let n = h.cols();
                let e = BitVec::from_support(n, errs.iter().map(|&i| i % n).collect::<std::collections::BTreeSet<_>>());
                let syn = h.mul_vec(&e).unwrap();
                let g = DecodingGraph::new(h).unwrap();
                let ex = g.decode(&syn, DecoderKind::Exact).unwrap().correction;
                let uf = g.decode(&syn, DecoderKind::UnionFind).unwrap().correction;
                prop_assert_eq!(h.mul_vec(&ex).unwrap(), syn.clone());
                prop_assert_eq!(h.mul_vec(&uf).unwrap(), syn.clone());
                prop_assert!(ex.weight() <= uf.weight());
                prop_assert!(ex.weight() <= e.weight());
            }
        }
    }
}
