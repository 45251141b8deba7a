//! Homomorphic measurement gadgets.
//!
//! A gadget is a data code `(H_X, H_Z)` on `n` qubits, an ancilla code
//! `(H_X′, H_Z′)` on `m` qubits, and an `n × m` gate matrix `Γ` where
//! `Γ_ij = 1` means a CNOT from data qubit `i` to ancilla qubit `j`. The
//! CNOTs preserve the joint stabilizer group exactly when
//!
//! * Z-check condition: `rs(H_Z′ Γᵀ) ⊆ rs(H_Z)`, and
//! * X-check condition: `rs(H_X Γ) ⊆ rs(H_X′)`.
//!
//! Measuring the ancilla in the Z basis then reads out the data operators
//! `Γv` for `v ∈ ker H_X′`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell2::{code_graph_distance, css_of_complex, Cell2Error};
use crate::cover::{gate_matrix, verify_cellmap, CellMap, CellMapError};
use crate::csscode::{CodeFile, CssCode, CssError, DistanceEstimate};
use crate::f2la::{first_row_outside, BitMatrix, BitVec, F2Error, RowSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("gate matrix is {found:?}, expected {expected:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("Z-check condition fails: ancilla Z-check {ancilla_check} pulls back to {witness}, outside rs(H_Z)")]
    ZCheckCondition { ancilla_check: usize, witness: BitVec },
    #[error("X-check condition fails: data X-check {data_check} pushes forward to {witness}, outside rs(H_X′)")]
    XCheckCondition { data_check: usize, witness: BitVec },
    #[error("stabilizer group changes: {direction} (row {row})")]
    Preservation { direction: &'static str, row: usize },
    #[error("support is not a Z-type operator of the data code (X-check {check} is violated)")]
    NotAZOperator { check: usize },
    #[error("support is empty")]
    EmptySupport,
    #[error(
        "effective X-distance {value} is below min(d_data, d_ancilla) = {bound}; \
         data edges {data_qubits:?} trigger an ancilla X-logical"
    )]
    EffectiveDistanceBelowBound {
        value: usize,
        bound: usize,
        data_qubits: Vec<usize>,
    },
    #[error("distance of the {which} code is unknown: {estimate}")]
    UnknownDistance {
        which: &'static str,
        estimate: DistanceEstimate,
    },
    #[error(transparent)]
    CellMap(#[from] CellMapError),
    #[error(transparent)]
    Code(#[from] CssError),
    #[error(transparent)]
    Complex(#[from] Cell2Error),
    #[error(transparent)]
    Linear(#[from] F2Error),
}

#[derive(Clone, Debug)]
pub struct HomGadget {
    pub data: CssCode,
    pub ancilla: CssCode,
    pub gamma: BitMatrix,
    pub origin: Option<CellMap>,
}

/// Checks both gadget conditions and returns the validated gadget.
pub fn validate(data: CssCode, ancilla: CssCode, gamma: BitMatrix) -> Result<HomGadget, GadgetError> {
    check_conditions(&data, &ancilla, &gamma)?;
    Ok(HomGadget {
        data,
        ancilla,
        gamma,
        origin: None,
    })
}

fn check_shape(data: &CssCode, ancilla: &CssCode, gamma: &BitMatrix) -> Result<(), GadgetError> {
    let expected = (data.n(), ancilla.n());
    if gamma.shape() != expected {
        return Err(GadgetError::Shape {
            expected,
            found: gamma.shape(),
        });
    }
    Ok(())
}

/// The two subspace inclusions, with a witness row on failure.
pub fn check_conditions(data: &CssCode, ancilla: &CssCode, gamma: &BitMatrix) -> Result<(), GadgetError> {
    check_shape(data, ancilla, gamma)?;
    let pulled = ancilla.h_z().mul(&gamma.transpose())?;
    if let Some((row, witness)) = first_row_outside(&pulled, data.h_z())? {
        return Err(GadgetError::ZCheckCondition {
            ancilla_check: row,
            witness,
        });
    }
    let pushed = data.h_x().mul(gamma)?;
    if let Some((row, witness)) = first_row_outside(&pushed, ancilla.h_x())? {
        return Err(GadgetError::XCheckCondition {
            data_check: row,
            witness,
        });
    }
    Ok(())
}

/// Joint stabilizer generators on `n + m` qubits before and after the CNOTs.
#[derive(Clone, Debug)]
pub struct PreservationCertificate {
    /// `[[H_Z, 0], [0, H_Z′]]`.
    pub t_z: BitMatrix,
    /// `[[H_Z, 0], [H_Z′Γᵀ, H_Z′]]`.
    pub t_z_after: BitMatrix,
    /// `[[H_X, 0], [0, H_X′]]`.
    pub t_x: BitMatrix,
    /// `[[H_X, H_XΓ], [0, H_X′]]`.
    pub t_x_after: BitMatrix,
}

/// Builds the joint stabilizer blocks and checks that the CNOTs map each
/// group onto itself, in both directions.
pub fn stabilizer_preservation_check(g: &HomGadget) -> Result<PreservationCertificate, GadgetError> {
    stabilizer_preservation_raw(&g.data, &g.ancilla, &g.gamma)
}

/// [`stabilizer_preservation_check`] on unvalidated inputs.
pub fn stabilizer_preservation_raw(
    data: &CssCode,
    ancilla: &CssCode,
    gamma: &BitMatrix,
) -> Result<PreservationCertificate, GadgetError> {
    check_shape(data, ancilla, gamma)?;
    let (n, m) = gamma.shape();
    let (hz, hzp, hx, hxp) = (data.h_z(), ancilla.h_z(), data.h_x(), ancilla.h_x());
    let zero = |r: usize, c: usize| BitMatrix::zeros(r, c);
    let t_z = BitMatrix::block(hz, &zero(hz.rows(), m), &zero(hzp.rows(), n), hzp)?;
    let t_z_after = BitMatrix::block(hz, &zero(hz.rows(), m), &hzp.mul(&gamma.transpose())?, hzp)?;
    let t_x = BitMatrix::block(hx, &zero(hx.rows(), m), &zero(hxp.rows(), n), hxp)?;
    let t_x_after = BitMatrix::block(hx, &hx.mul(gamma)?, &zero(hxp.rows(), n), hxp)?;
    let checks: [(&BitMatrix, &BitMatrix, &'static str); 4] = [
        (&t_z_after, &t_z, "Z stabilizers after ⊄ before"),
        (&t_z, &t_z_after, "Z stabilizers before ⊄ after"),
        (&t_x_after, &t_x, "X stabilizers after ⊄ before"),
        (&t_x, &t_x_after, "X stabilizers before ⊄ after"),
    ];
    for (a, b, direction) in checks {
        if let Some((row, _)) = first_row_outside(a, b)? {
            return Err(GadgetError::Preservation { direction, row });
        }
    }
    Ok(PreservationCertificate {
        t_z,
        t_z_after,
        t_x,
        t_x_after,
    })
}

/// Data Z-logicals read out by a gadget.
#[derive(Clone, Debug)]
pub struct MeasuredGroup {
    /// Rows `Γv`, independent modulo `rs(H_Z)`.
    pub basis: BitMatrix,
    /// The ancilla operators `v ∈ ker H_X′` with `Γv` the matching basis row.
    pub ancilla_reps: Vec<BitVec>,
}

impl MeasuredGroup {
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }
}

/// `Γ(ker H_X′)` modulo `rs(H_Z)`. Images that are stabilizers are dropped.
pub fn measured_group(g: &HomGadget) -> MeasuredGroup {
    let ker = g.ancilla.h_x().kernel_basis();
    let mut space = RowSpace::new(g.data.h_z());
    let mut rows = Vec::new();
    let mut reps = Vec::new();
    for r in 0..ker.rows() {
        let v = ker.row(r);
        let image = g.gamma.mul_vec(&v).expect("validated shape");
        if space.insert(&image) {
            rows.push(image);
            reps.push(v);
        }
    }
    MeasuredGroup {
        basis: BitMatrix::from_rows(g.data.n(), &rows),
        ancilla_reps: reps,
    }
}

/// Whether `a ⊕ b ∈ rs(H_Z)`.
pub fn z_equivalent(code: &CssCode, a: &BitVec, b: &BitVec) -> bool {
    RowSpace::new(code.h_z()).contains(&a.xor(b))
}

/// Names the coset of `op` as a sum of `named` operators, if possible.
///
/// Returns the names used, in order; an empty list means `op` is a
/// stabilizer. `None` if no combination matches.
pub fn name_coset<'a>(code: &CssCode, op: &BitVec, named: &[(&'a str, BitVec)]) -> Option<Vec<&'a str>> {
    let target = code.z_logical_coords(op)?;
    let coords: Vec<BitVec> = named
        .iter()
        .map(|(_, v)| code.z_logical_coords(v))
        .collect::<Option<_>>()?;
    (0u64..1 << named.len()).find_map(|mask| {
        let mut acc = BitVec::zeros(target.len());
        for (i, c) in coords.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc.xor_assign(c);
            }
        }
        (acc == target).then(|| {
            named
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, (n, _))| *n)
                .collect()
        })
    })
}

/// Shape of a cat-state ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CatShape {
    /// `w` two-body X-checks around a circle.
    Circle,
    /// `w − 1` two-body X-checks along a path.
    Path,
}

/// The repetition code on `w` qubits: weight-2 X-checks, no Z-checks.
pub fn repetition_code(w: usize, shape: CatShape) -> CssCode {
    let pairs: Vec<(usize, usize)> = match shape {
        CatShape::Circle if w >= 2 => (0..w).map(|i| (i, (i + 1) % w)).collect(),
        _ => (0..w.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
    };
    let mut h_x = BitMatrix::zeros(pairs.len(), w);
    for (r, &(a, b)) in pairs.iter().enumerate() {
        h_x.flip(r, a);
        h_x.flip(r, b);
    }
    CssCode::new(h_x, BitMatrix::zeros(0, w)).expect("a code without Z-checks always commutes")
}

/// Cat-state measurement of the Z-type operator with the given support.
///
/// Ancilla qubit `j` is wired to the `j`-th data qubit of the support.
pub fn shor_gadget(data: &CssCode, support: &BitVec, shape: CatShape) -> Result<HomGadget, GadgetError> {
    if support.is_zero() {
        return Err(GadgetError::EmptySupport);
    }
    let syndrome = data.h_x().mul_vec(support)?;
    if let Some(check) = syndrome.support().next() {
        return Err(GadgetError::NotAZOperator { check });
    }
    let qubits: Vec<usize> = support.support().collect();
    let gamma = BitMatrix::from_row_indices(data.n(), &qubits).transpose();
    validate(data.clone(), repetition_code(qubits.len(), shape), gamma)
}

/// Transversal measurement with an ancilla block in the data code.
pub fn steane_gadget(data: &CssCode) -> Result<HomGadget, GadgetError> {
    validate(data.clone(), data.clone(), BitMatrix::identity(data.n()))
}

/// The gadget induced by a chain map from the ancilla complex to the data
/// complex. The map is verified first.
pub fn from_cellmap(map: CellMap) -> Result<HomGadget, GadgetError> {
    verify_cellmap(&map)?;
    let data = css_of_complex(&map.target);
    let ancilla = css_of_complex(&map.source);
    let gamma = gate_matrix(&map);
    let mut g = validate(data, ancilla, gamma)?;
    g.origin = Some(map);
    Ok(g)
}

/// Exact `(d_z, d_x)` of a code: by graph search when the checks are
/// graph-like, otherwise by enumeration with the given weight budget.
pub fn code_distances(code: &CssCode, budget: usize) -> Result<(DistanceEstimate, DistanceEstimate), GadgetError> {
    match code_graph_distance(code) {
        Ok((z, x)) => Ok((DistanceEstimate::exact(z), DistanceEstimate::exact(x))),
        Err(Cell2Error::NotGraphLike { .. }) => Ok((code.min_distance_z(budget)?, code.min_distance_x(budget)?)),
        Err(e) => Err(e.into()),
    }
}

fn exact_min(code: &CssCode, which: &'static str) -> Result<usize, GadgetError> {
    let (z, x) = code_distances(code, code.n())?;
    let d = DistanceEstimate {
        lower: z.lower.min(x.lower),
        upper: z.upper.min(x.upper),
    };
    d.value().ok_or(GadgetError::UnknownDistance { which, estimate: d })
}

/// Result of [`effective_x_distance`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveDistance {
    /// Smallest number of data X errors found that spread to an ancilla
    /// X-logical. `None` if nothing was found within the search limit.
    pub value: Option<usize>,
    /// Every smaller set was searched: the true value is at least this.
    pub lower_bound: usize,
    /// `min(d_data, d_ancilla)`.
    pub bound: usize,
    pub d_data: usize,
    pub d_ancilla: usize,
    /// Data qubits of a minimal triggering set.
    pub witness: Option<Vec<usize>>,
}

impl EffectiveDistance {
    /// True when the search reached a definite value.
    pub fn is_exact(&self) -> bool {
        self.value.is_some()
    }
}

/// Fewest data X errors whose forward spread `Γᵀ` covers an ancilla X-logical.
///
/// A data set `S` can trigger a logical iff some `x ∈ ker H_Z′` supported on
/// `Γ`-preimages of `S` anticommutes with an ancilla Z-logical, i.e. iff an
/// ancilla Z-logical restricted to the preimage leaves the restricted row
/// space of `H_Z′`. With a geometric origin only face-connected `S` are
/// searched, which loses nothing because every logical has a connected
/// component that is itself a logical and maps onto a connected set.
/// Otherwise all subsets of the image of `Γ` are tried.
///
/// The search covers sizes up to `limit` (default `d_data + 2`). Fails if a
/// triggering set smaller than `min(d_data, d_ancilla)` exists.
pub fn effective_x_distance(g: &HomGadget, limit: Option<usize>) -> Result<EffectiveDistance, GadgetError> {
    let d_data = exact_min(&g.data, "data")?;
    let d_ancilla = exact_min(&g.ancilla, "ancilla")?;
    let bound = d_data.min(d_ancilla);
    let limit = limit.unwrap_or(d_data + 2);

    let search = TriggerSearch::new(g);
    let adjacency = g.origin.as_ref().map(|_| data_face_adjacency(&g.data, &search.image));
    let hit = search.run(limit, adjacency.as_deref());

    let out = match hit {
        Some(set) => EffectiveDistance {
            value: Some(set.len()),
            lower_bound: set.len(),
            bound,
            d_data,
            d_ancilla,
            witness: Some(set),
        },
        None => EffectiveDistance {
            value: None,
            lower_bound: limit + 1,
            bound,
            d_data,
            d_ancilla,
            witness: None,
        },
    };
    if let (Some(value), Some(w)) = (out.value, &out.witness) {
        if value < bound {
            return Err(GadgetError::EffectiveDistanceBelowBound {
                value,
                bound,
                data_qubits: w.clone(),
            });
        }
    }
    Ok(out)
}

/// Precomputed data for testing candidate data sets.
struct TriggerSearch {
    /// Data qubits hit by some column of `Γ`, ascending.
    image: Vec<usize>,
    /// Ancilla qubits over each image qubit.
    preimage: Vec<Vec<usize>>,
    /// `H_Z′` rows as supports.
    z_rows: Vec<Vec<usize>>,
    /// `H_Z′` rows through each ancilla qubit.
    rows_of: Vec<Vec<usize>>,
    /// Ancilla Z-logical representatives.
    logicals: Vec<BitVec>,
}

impl TriggerSearch {
    fn new(g: &HomGadget) -> Self {
        let image: Vec<usize> = (0..g.gamma.rows()).filter(|&i| g.gamma.row_weight(i) > 0).collect();
        let preimage = image.iter().map(|&i| g.gamma.row(i).support().collect()).collect();
        let hzp = g.ancilla.h_z();
        let z_rows: Vec<Vec<usize>> = (0..hzp.rows()).map(|r| hzp.row(r).support().collect()).collect();
        let mut rows_of = vec![Vec::new(); g.ancilla.n()];
        for (r, row) in z_rows.iter().enumerate() {
            for &q in row {
                rows_of[q].push(r);
            }
        }
        Self {
            image,
            preimage,
            z_rows,
            rows_of,
            logicals: g.ancilla.logicals().z.clone(),
        }
    }

    /// Whether the image-qubit positions in `set` trigger a logical.
    fn triggers(&self, set: &[usize]) -> bool {
        let cols: Vec<usize> = set.iter().flat_map(|&i| self.preimage[i].iter().copied()).collect();
        if cols.len() <= 64 {
            self.triggers_small(&cols)
        } else {
            self.triggers_general(&cols)
        }
    }

    fn triggers_small(&self, cols: &[usize]) -> bool {
        let local = |q: usize| cols.iter().position(|&c| c == q);
        let mut rows: Vec<usize> = cols.iter().flat_map(|&q| self.rows_of[q].iter().copied()).collect();
        rows.sort_unstable();
        rows.dedup();
        let mut basis: Vec<u64> = Vec::new();
        for r in rows {
            let mut mask = self.z_rows[r]
                .iter()
                .filter_map(|&q| local(q))
                .fold(0u64, |acc, i| acc | 1 << i);
            for &b in &basis {
                mask = mask.min(mask ^ b);
            }
            if mask != 0 {
                basis.push(mask);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        self.logicals.iter().any(|l| {
            let mut mask = cols
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &q)| acc | (l.get(q) as u64) << i);
            for &b in &basis {
                mask = mask.min(mask ^ b);
            }
            mask != 0
        })
    }

    fn triggers_general(&self, cols: &[usize]) -> bool {
        let restrict = |support: &[usize]| {
            BitVec::from_support(
                cols.len(),
                cols.iter()
                    .enumerate()
                    .filter(|(_, q)| support.contains(q))
                    .map(|(i, _)| i),
            )
        };
        let mut space = RowSpace::empty(cols.len());
        for r in 0..self.z_rows.len() {
            space.insert(&restrict(&self.z_rows[r]));
        }
        self.logicals.iter().any(|l| {
            let sup: Vec<usize> = l.support().filter(|q| cols.contains(q)).collect();
            !space.contains(&restrict(&sup))
        })
    }

    /// Smallest triggering set of image positions of size ≤ `limit`, as data qubits.
    fn run(&self, limit: usize, adjacency: Option<&[Vec<usize>]>) -> Option<Vec<usize>> {
        let roots: Vec<usize> = (0..self.image.len()).collect();
        let best = roots
            .par_iter()
            .filter_map(|&root| {
                let mut found: Option<Vec<usize>> = None;
                let mut cap = limit;
                match adjacency {
                    Some(adj) => {
                        let ext: Vec<usize> = adj[root].iter().copied().filter(|&u| u > root).collect();
                        let mut set = vec![root];
                        self.esu(adj, root, &mut set, ext, &mut cap, &mut found);
                    }
                    None => {
                        let mut set = vec![root];
                        self.combos(&mut set, &mut cap, &mut found);
                    }
                }
                found.map(|f| (f.len(), root, f))
            })
            .min();
        best.map(|(_, _, set)| {
            let mut out: Vec<usize> = set.iter().map(|&i| self.image[i]).collect();
            out.sort_unstable();
            out
        })
    }

    fn record(&self, set: &[usize], cap: &mut usize, found: &mut Option<Vec<usize>>) -> bool {
        if self.triggers(set) {
            *found = Some(set.to_vec());
            *cap = set.len() - 1;
            true
        } else {
            false
        }
    }

    /// Connected sets containing `root` as their least element (ESU order).
    fn esu(
        &self,
        adj: &[Vec<usize>],
        root: usize,
        set: &mut Vec<usize>,
        ext: Vec<usize>,
        cap: &mut usize,
        found: &mut Option<Vec<usize>>,
    ) {
        if set.len() > *cap || self.record(set, cap, found) {
            return;
        }
        if set.len() == *cap {
            return;
        }
        let mut ext = ext;
        while let Some(w) = ext.pop() {
            // Extension: w's neighbours beyond root that are not in or adjacent to the set.
            let mut next = ext.clone();
            for &u in &adj[w] {
                if u > root && !set.contains(&u) && !next.contains(&u) && !set.iter().any(|&s| adj[s].contains(&u)) {
                    next.push(u);
                }
            }
            set.push(w);
            self.esu(adj, root, set, next, cap, found);
            set.pop();
            if set.len() >= *cap {
                return;
            }
        }
    }

    /// All sets extending `set` by larger elements, in lexicographic order.
    fn combos(&self, set: &mut Vec<usize>, cap: &mut usize, found: &mut Option<Vec<usize>>) {
        if set.len() > *cap || self.record(set, cap, found) || set.len() == *cap {
            return;
        }
        let last = *set.last().expect("nonempty");
        for next in last + 1..self.image.len() {
            set.push(next);
            self.combos(set, cap, found);
            set.pop();
            if set.len() >= *cap {
                return;
            }
        }
    }
}

/// Image positions sharing a data Z-check.
fn data_face_adjacency(data: &CssCode, image: &[usize]) -> Vec<Vec<usize>> {
    let mut pos = vec![usize::MAX; data.n()];
    for (i, &q) in image.iter().enumerate() {
        pos[q] = i;
    }
    let mut adj = vec![Vec::new(); image.len()];
    let hz = data.h_z();
    for r in 0..hz.rows() {
        let members: Vec<usize> = hz
            .row(r)
            .support()
            .map(|q| pos[q])
            .filter(|&p| p != usize::MAX)
            .collect();
        for &a in &members {
            for &b in &members {
                if a != b && !adj[a].contains(&b) {
                    adj[a].push(b);
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Serialized gadget: both codes, `Γ` as row strings, and the optional map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetBundle {
    pub data: CodeFile,
    pub ancilla: CodeFile,
    pub gamma: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_map: Option<CellMap>,
}

impl GadgetBundle {
    pub fn from_gadget(g: &HomGadget) -> Self {
        Self {
            data: g.data.to_file(),
            ancilla: g.ancilla.to_file(),
            gamma: g.gamma.to_row_strings(),
            cell_map: g.origin.clone(),
        }
    }

    /// Rebuilds and re-validates the gadget.
    pub fn to_gadget(&self) -> Result<HomGadget, GadgetError> {
        let data = CssCode::from_file(&self.data)?;
        let ancilla = CssCode::from_file(&self.ancilla)?;
        let gamma = BitMatrix::from_row_strings(ancilla.n(), &self.gamma)?;
        if gamma.rows() != data.n() {
            return Err(GadgetError::Shape {
                expected: (data.n(), ancilla.n()),
                found: gamma.shape(),
            });
        }
        let mut g = validate(data, ancilla, gamma)?;
        if let Some(map) = &self.cell_map {
            verify_cellmap(map)?;
            if gate_matrix(map) != g.gamma {
                return Err(GadgetError::Shape {
                    expected: g.gamma.shape(),
                    found: gate_matrix(map).shape(),
                });
            }
            g.origin = Some(map.clone());
        }
        Ok(g)
    }
}

/// Inputs for an X-type measurement, expressed as a Z-type one. Conjugating
/// every qubit by Hadamard swaps the check types and reverses each CNOT, so
/// `Γ` is unchanged.
pub fn dualize(data: &CssCode, ancilla: &CssCode, gamma: &BitMatrix) -> (CssCode, CssCode, BitMatrix) {
    (data.dual(), ancilla.dual(), gamma.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell2::{build_torus, torus_row_loop, TorusLoop};
    use crate::cover::{build_covering_ancilla, PeriodicComplex, WidthPolicy};

    fn toric(d: usize) -> CssCode {
        css_of_complex(&build_torus(d).unwrap())
    }

    fn fig2(d: usize) -> HomGadget {
        let t = PeriodicComplex::torus(d).unwrap();
        let out = build_covering_ancilla(&t, &TorusLoop::Z1.walk(d), WidthPolicy::Auto).unwrap();
        from_cellmap(out.map).unwrap()
    }

    #[test]
    fn fig2_gadget_is_valid() {
        let g = fig2(3);
        let cert = stabilizer_preservation_check(&g).unwrap();
        assert_eq!(cert.t_z.rank(), cert.t_z_after.rank());
        let mg = measured_group(&g);
        assert_eq!(mg.rank(), 1);
        let z1 = torus_row_loop(3, 0).edge_vector(18);
        assert!(z_equivalent(&g.data, &mg.basis.row(0), &z1));
    }

    #[test]
    fn steane_gadget_measures_everything() {
        let g = steane_gadget(&toric(3)).unwrap();
        stabilizer_preservation_check(&g).unwrap();
        assert_eq!(measured_group(&g).rank(), 2);
    }

    #[test]
    fn shor_gadgets() {
        let code = toric(3);
        let z1 = torus_row_loop(3, 0).edge_vector(18);
        for shape in [CatShape::Circle, CatShape::Path] {
            let g = shor_gadget(&code, &z1, shape).unwrap();
            assert_eq!(g.ancilla.n(), 3);
            assert_eq!(g.ancilla.k(), 1);
            stabilizer_preservation_check(&g).unwrap();
            let mg = measured_group(&g);
            assert_eq!(mg.rank(), 1);
            assert!(z_equivalent(&code, &mg.basis.row(0), &z1));
            let eff = effective_x_distance(&g, None).unwrap();
            assert_eq!(eff.value, Some(1));
        }
        let stab = code.h_z().row(0);
        let g = shor_gadget(&code, &stab, CatShape::Circle).unwrap();
        assert_eq!(measured_group(&g).rank(), 0);
        assert!(matches!(
            shor_gadget(&code, &BitVec::from_support(18, [0]), CatShape::Circle),
            Err(GadgetError::NotAZOperator { .. })
        ));

        let trivial = CssCode::new(BitMatrix::zeros(0, 2), BitMatrix::zeros(0, 2)).unwrap();
        let g = shor_gadget(&trivial, &BitVec::from_support(2, [1]), CatShape::Circle).unwrap();
        assert_eq!(g.ancilla.n(), 1);
        assert_eq!(measured_group(&g).rank(), 1);
    }

    #[test]
    fn random_dense_gamma_is_rejected_with_witness() {
        use rand::{Rng, SeedableRng};
        let code = toric(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut gamma = BitMatrix::zeros(18, 18);
        for i in 0..18 {
            for j in 0..18 {
                gamma.set(i, j, rng.gen_bool(0.5));
            }
        }
        match validate(code.clone(), code.clone(), gamma.clone()) {
            Err(GadgetError::ZCheckCondition { ancilla_check, witness }) => {
                let row = code.h_z().mul(&gamma.transpose()).unwrap().row(ancilla_check);
                assert_eq!(row, witness);
                assert!(!RowSpace::new(code.h_z()).contains(&witness));
            }
            Err(GadgetError::XCheckCondition { data_check, witness }) => {
                let row = code.h_x().mul(&gamma).unwrap().row(data_check);
                assert_eq!(row, witness);
                assert!(!RowSpace::new(code.h_x()).contains(&witness));
            }
            other => panic!("dense gamma accepted: {other:?}"),
        }
    }

    #[test]
    fn extra_cnot_breaks_preservation() {
        let g = fig2(3);
        let mut gamma = g.gamma.clone();
        let row = (0..18).find(|&r| gamma.row_weight(r) == 0).unwrap();
        gamma.flip(row, 0);
        assert!(validate(g.data.clone(), g.ancilla.clone(), gamma.clone()).is_err());
        assert!(stabilizer_preservation_raw(&g.data, &g.ancilla, &gamma).is_err());
    }

    #[test]
    fn effective_distance_of_ribbons() {
        let g = fig2(3);
        let eff = effective_x_distance(&g, None).unwrap();
        assert_eq!(eff.bound, 3);
        assert_eq!(eff.value, Some(3));
    }

    /// Minimum over every ancilla X-logical of the number of distinct data
    /// qubits feeding it, by enumerating all of ker H_Z′.
    fn brute_effective(g: &HomGadget) -> usize {
        let ker = g.ancilla.h_z().kernel_basis();
        let zl = &g.ancilla.logicals().z;
        let mut best = usize::MAX;
        let mut x = BitVec::zeros(g.ancilla.n());
        for step in 1u64..1 << ker.rows() {
            x.xor_assign(&ker.row(step.trailing_zeros() as usize));
            if !zl.iter().any(|l| l.dot(&x)) {
                continue;
            }
            let fed = (0..g.gamma.rows())
                .filter(|&i| !g.gamma.row(i).and(&x).is_zero())
                .count();
            best = best.min(fed);
        }
        best
    }

    #[test]
    fn effective_distance_matches_brute_force() {
        let t = PeriodicComplex::torus(3).unwrap();
        for preset in TorusLoop::ALL {
            let out = build_covering_ancilla(&t, &preset.walk(3), WidthPolicy::Auto).unwrap();
            let g = from_cellmap(out.map).unwrap();
            let eff = effective_x_distance(&g, Some(8)).unwrap();
            assert_eq!(eff.value, Some(brute_effective(&g)), "{preset:?}");
        }
    }

    #[test]
    fn single_bit_mutations_are_consistent() {
        use rand::{Rng, SeedableRng};
        let g = fig2(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let mut gamma = g.gamma.clone();
            gamma.flip(rng.gen_range(0..18), rng.gen_range(0..15));
            let conditions = check_conditions(&g.data, &g.ancilla, &gamma).is_ok();
            let preserved = stabilizer_preservation_raw(&g.data, &g.ancilla, &gamma).is_ok();
            assert_eq!(conditions, preserved);
        }
    }

    #[test]
    fn measured_operator_depends_only_on_the_coset() {
        let code = toric(3);
        let z1 = torus_row_loop(3, 0).edge_vector(18);
        let shifted = z1.xor(&code.h_z().row(4));
        let a = measured_group(&shor_gadget(&code, &z1, CatShape::Circle).unwrap());
        let b = measured_group(&shor_gadget(&code, &shifted, CatShape::Path).unwrap());
        assert!(z_equivalent(&code, &a.basis.row(0), &b.basis.row(0)));
        assert!(!z_equivalent(
            &code,
            &a.basis.row(0),
            &TorusLoop::Z2.walk(3).edge_vector(18)
        ));
    }

    #[test]
    fn naming_cosets() {
        let code = toric(3);
        let z1 = TorusLoop::Z1.walk(3).edge_vector(18);
        let z2 = TorusLoop::Z2.walk(3).edge_vector(18);
        let diag = TorusLoop::Z1Z2.walk(3).edge_vector(18);
        let named = [("Z1", z1.clone()), ("Z2", z2)];
        assert_eq!(name_coset(&code, &diag, &named), Some(vec!["Z1", "Z2"]));
        assert_eq!(name_coset(&code, &z1, &named), Some(vec!["Z1"]));
        assert_eq!(name_coset(&code, &code.h_z().row(2), &named), Some(vec![]));
    }

    #[test]
    fn bundle_round_trip() {
        let g = fig2(3);
        let b = GadgetBundle::from_gadget(&g);
        let json = serde_json::to_string(&b).unwrap();
        let back: GadgetBundle = serde_json::from_str(&json).unwrap();
        let g2 = back.to_gadget().unwrap();
        assert_eq!(g2.gamma, g.gamma);
        assert!(g2.origin.is_some());
    }
}
