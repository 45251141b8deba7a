//! Covering-space construction of ancilla codes.
//!
//! A periodic complex is a finite cellulation whose edges carry voltages in a
//! deck group `G`: walking an edge forward multiplies the current sheet by its
//! voltage. The universal cover has cells `(base cell, g)` for `g ∈ G`; the
//! intermediate cover `U/⟨h⟩` keeps `g` only up to the coset `g⟨h⟩`.
//!
//! To measure a loop, lift it and read off its deck element `h`. The lift
//! closes up in `U/⟨h⟩`, which is a cylinder for the torus. Cells of that
//! cylinder are generated lazily around the lifted loop, and only a finite
//! ribbon is kept. Projecting the ribbon back down gives the [`CellMap`]
//! whose edge part is the gate matrix.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell2::{
    build_torus, code_graph_distance, css_of_complex, surface_distance, BoundaryKind, BoundarySegment, Cell2Error,
    CellComplex2, EdgePath, Step, TorusIndex,
};
use crate::f2la::{BitMatrix, BitVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("the loop is contractible; its lift closes on the same sheet")]
    Contractible,
    #[error("width must be at least 1")]
    ZeroWidth,
    #[error("no width up to {max} reached ancilla distance {target} with one logical qubit")]
    WidthLimit { max: usize, target: usize },
    #[error("voltage list has {found} entries for {edges} edges")]
    VoltageCount { edges: usize, found: usize },
    #[error(transparent)]
    Complex(#[from] Cell2Error),
}

/// A group acting on the universal cover by deck transformations.
pub trait DeckGroup {
    type Elem: Copy + Eq + Ord + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn compose(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inverse(&self, a: Self::Elem) -> Self::Elem;
    /// A canonical representative of the coset `a⟨h⟩`.
    fn coset_rep(&self, h: Self::Elem, a: Self::Elem) -> Self::Elem;
}

/// The translation `t_{r,s}`, moving `(x, y)` to `(x + d·r, y + d·s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Deck {
    pub r: i64,
    pub s: i64,
}

impl Deck {
    pub const IDENTITY: Deck = Deck { r: 0, s: 0 };

    /// Whether `t_{r,s}` is not a proper power of another translation.
    pub fn is_primitive(&self) -> bool {
        gcd(self.r.unsigned_abs(), self.s.unsigned_abs()) == 1
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl std::fmt::Display for Deck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "t({},{})", self.r, self.s)
    }
}

/// The deck group `ℤ²` of the square torus.
#[derive(Clone, Copy, Debug, Default)]
pub struct ToricTranslations;

impl DeckGroup for ToricTranslations {
    type Elem = Deck;

    fn identity(&self) -> Deck {
        Deck::IDENTITY
    }

    fn compose(&self, a: Deck, b: Deck) -> Deck {
        Deck {
            r: a.r + b.r,
            s: a.s + b.s,
        }
    }

    fn inverse(&self, a: Deck) -> Deck {
        Deck { r: -a.r, s: -a.s }
    }

    fn coset_rep(&self, h: Deck, a: Deck) -> Deck {
        // Shift a by a multiple of h so the first nonzero coordinate of h
        // lands in [0, |h_i|).
        let q = if h.r != 0 {
            a.r.div_euclid(h.r)
        } else if h.s != 0 {
            a.s.div_euclid(h.s)
        } else {
            0
        };
        Deck {
            r: a.r - q * h.r,
            s: a.s - q * h.s,
        }
    }
}

/// A cellulation with an edge voltage for each edge.
#[derive(Clone, Debug)]
pub struct PeriodicComplex<G: DeckGroup> {
    pub complex: CellComplex2,
    pub voltages: Vec<G::Elem>,
    pub group: G,
}

impl PeriodicComplex<ToricTranslations> {
    /// The `d × d` torus. Edges that wrap around carry a unit translation.
    pub fn torus(d: usize) -> Result<Self, CoverError> {
        let complex = build_torus(d)?;
        let t = TorusIndex { d };
        let mut voltages = vec![Deck::IDENTITY; complex.num_edges()];
        for y in 0..d {
            voltages[t.h(d - 1, y)] = Deck { r: 1, s: 0 };
        }
        for x in 0..d {
            voltages[t.v(x, d - 1)] = Deck { r: 0, s: 1 };
        }
        Ok(Self {
            complex,
            voltages,
            group: ToricTranslations,
        })
    }
}

impl<G: DeckGroup> PeriodicComplex<G> {
    pub fn new(complex: CellComplex2, voltages: Vec<G::Elem>, group: G) -> Result<Self, CoverError> {
        if voltages.len() != complex.num_edges() {
            return Err(CoverError::VoltageCount {
                edges: complex.num_edges(),
                found: voltages.len(),
            });
        }
        Ok(Self {
            complex,
            voltages,
            group,
        })
    }

    fn step_voltage(&self, s: &Step) -> G::Elem {
        let v = self.voltages[s.edge];
        if s.forward {
            v
        } else {
            self.group.inverse(v)
        }
    }

    /// Product of voltages along a walk.
    pub fn walk_voltage(&self, path: &EdgePath) -> G::Elem {
        path.steps.iter().fold(self.group.identity(), |acc, s| {
            self.group.compose(acc, self.step_voltage(s))
        })
    }

    /// Deck element `g` with the lift of `path` from sheet `e` ending on sheet `g`.
    pub fn lift_deck(&self, path: &EdgePath) -> Result<G::Elem, CoverError> {
        path.check(&self.complex)?;
        if !path.is_closed(&self.complex) {
            return Err(Cell2Error::NotClosed.into());
        }
        Ok(self.walk_voltage(path))
    }
}

/// `lift_deck` on the square torus.
pub fn lift_deck(torus: &PeriodicComplex<ToricTranslations>, path: &EdgePath) -> Result<Deck, CoverError> {
    torus.lift_deck(path)
}

/// A structure-preserving map from `source` to `target`, cell by cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMap {
    pub source: CellComplex2,
    pub target: CellComplex2,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub face_map: Vec<usize>,
}

impl CellMap {
    pub fn identity(c: &CellComplex2) -> Self {
        Self::same_cells(c.clone(), c.clone())
    }

    /// Maps every cell to the cell with the same index. Used when the two
    /// complexes differ only in boundary annotations.
    pub fn same_cells(source: CellComplex2, target: CellComplex2) -> Self {
        Self {
            vertex_map: (0..source.num_vertices()).collect(),
            edge_map: (0..source.num_edges()).collect(),
            face_map: (0..source.num_faces()).collect(),
            source,
            target,
        }
    }

    /// `γ0` restricted to checked vertices: target checks × source checks.
    pub fn gamma0(&self) -> BitMatrix {
        let tc = self.target.vertex_to_check();
        let src = self.source.checked_vertices();
        let mut m = BitMatrix::zeros(self.target.checked_vertices().len(), src.len());
        for (j, &v) in src.iter().enumerate() {
            if let Some(i) = self.vertex_map.get(v).and_then(|&t| tc.get(t).copied().flatten()) {
                m.flip(i, j);
            }
        }
        m
    }

    /// `γ1` restricted to qubit edges: target qubits × source qubits.
    pub fn gamma1(&self) -> BitMatrix {
        let tq = self.target.edge_to_qubit();
        let src = self.source.qubit_edges();
        let mut m = BitMatrix::zeros(self.target.qubit_edges().len(), src.len());
        for (j, &e) in src.iter().enumerate() {
            if let Some(i) = self.edge_map.get(e).and_then(|&t| tq.get(t).copied().flatten()) {
                m.flip(i, j);
            }
        }
        m
    }

    /// `γ2`: target faces × source faces.
    pub fn gamma2(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.target.num_faces(), self.source.num_faces());
        for (j, &f) in self.face_map.iter().enumerate() {
            if f < self.target.num_faces() {
                m.flip(f, j);
            }
        }
        m
    }
}

/// Proof that a [`CellMap`] is a chain map: both residuals are zero.
#[derive(Clone, Debug)]
pub struct CellMapCertificate {
    /// `∂2 γ2 − γ1 ∂2′`, target qubits × source faces.
    pub residual_faces: BitMatrix,
    /// `γ0 ∂1′ − ∂1 γ1`, target checks × source qubits.
    pub residual_edges: BitMatrix,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CellMapError {
    #[error("{what} map has {found} entries for {expected} cells")]
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what} map sends cell {cell} to {image}, out of range")]
    OutOfRange {
        what: &'static str,
        cell: usize,
        image: usize,
    },
    #[error(
        "not a chain map: source faces {faces:?}, source edges {edges:?}, \
         target edges {target_edges:?}, target vertices {target_vertices:?}"
    )]
    Violation {
        faces: Vec<usize>,
        edges: Vec<usize>,
        target_edges: Vec<usize>,
        target_vertices: Vec<usize>,
    },
}

/// Checks `∂2 γ2 = γ1 ∂2′` and `γ0 ∂1′ = ∂1 γ1` exactly, and that each
/// source edge and face walk maps onto the corresponding target cell.
pub fn verify_cellmap(map: &CellMap) -> Result<CellMapCertificate, CellMapError> {
    let (s, t) = (&map.source, &map.target);
    for (what, arr, expected, bound) in [
        ("vertex", &map.vertex_map, s.num_vertices(), t.num_vertices()),
        ("edge", &map.edge_map, s.num_edges(), t.num_edges()),
        ("face", &map.face_map, s.num_faces(), t.num_faces()),
    ] {
        if arr.len() != expected {
            return Err(CellMapError::Length {
                what,
                expected,
                found: arr.len(),
            });
        }
        if let Some((cell, &image)) = arr.iter().enumerate().find(|(_, &i)| i >= bound) {
            return Err(CellMapError::OutOfRange { what, cell, image });
        }
    }

    let g0 = map.gamma0();
    let g1 = map.gamma1();
    let g2 = map.gamma2();
    let d1s = s.boundary_1();
    let d2s = s.boundary_2();
    let d1t = t.boundary_1();
    let d2t = t.boundary_2();
    let residual_faces = xor(&d2t.mul(&g2).expect("shapes"), &g1.mul(&d2s).expect("shapes"));
    let residual_edges = xor(&g0.mul(&d1s).expect("shapes"), &d1t.mul(&g1).expect("shapes"));

    let src_qubits = s.qubit_edges();
    let tgt_qubits = t.qubit_edges();
    let tgt_checks = t.checked_vertices();
    let mut faces: BTreeSet<usize> = nonzero_cols(&residual_faces).into_iter().collect();
    let mut edges: BTreeSet<usize> = nonzero_cols(&residual_edges)
        .into_iter()
        .map(|q| src_qubits[q])
        .collect();
    let target_edges: BTreeSet<usize> = nonzero_rows(&residual_faces)
        .into_iter()
        .map(|q| tgt_qubits[q])
        .collect();
    let target_vertices: BTreeSet<usize> = nonzero_rows(&residual_edges)
        .into_iter()
        .map(|c| tgt_checks[c])
        .collect();

    for (e, &[a, b]) in s.edges().iter().enumerate() {
        let mut img = [map.vertex_map[a], map.vertex_map[b]];
        let mut want = t.edges()[map.edge_map[e]];
        img.sort_unstable();
        want.sort_unstable();
        if img != want {
            edges.insert(e);
        }
    }
    for (f, list) in s.faces().iter().enumerate() {
        let img: Vec<usize> = list.iter().map(|&e| map.edge_map[e]).collect();
        if !is_cyclic_match(&img, &t.faces()[map.face_map[f]]) {
            faces.insert(f);
        }
    }

    if faces.is_empty() && edges.is_empty() && target_edges.is_empty() && target_vertices.is_empty() {
        Ok(CellMapCertificate {
            residual_faces,
            residual_edges,
        })
    } else {
        Err(CellMapError::Violation {
            faces: faces.into_iter().collect(),
            edges: edges.into_iter().collect(),
            target_edges: target_edges.into_iter().collect(),
            target_vertices: target_vertices.into_iter().collect(),
        })
    }
}

fn xor(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let mut out = a.clone();
    for (r, c) in b.nonzero_entries() {
        out.flip(r, c);
    }
    out
}

fn nonzero_cols(m: &BitMatrix) -> Vec<usize> {
    let mut cols: Vec<usize> = m.nonzero_entries().into_iter().map(|(_, c)| c).collect();
    cols.sort_unstable();
    cols.dedup();
    cols
}

fn nonzero_rows(m: &BitMatrix) -> Vec<usize> {
    (0..m.rows()).filter(|&r| m.row_weight(r) > 0).collect()
}

/// Whether `a` equals `b` up to rotation and reversal.
fn is_cyclic_match(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let n = a.len();
    let rev: Vec<usize> = b.iter().rev().copied().collect();
    (0..n).any(|k| (0..n).all(|i| a[i] == b[(i + k) % n]) || (0..n).all(|i| a[i] == rev[(i + k) % n]))
}

/// The gate matrix `Γ` (target qubits × source qubits) of a map.
pub fn gate_matrix(map: &CellMap) -> BitMatrix {
    map.gamma1()
}

/// How wide a ribbon to carve around the lifted loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WidthPolicy {
    /// Start at [`default_width`] and grow until the ancilla distance
    /// reaches the data distance with exactly one logical qubit.
    Auto,
    /// Exactly this width.
    Fixed(usize),
}

/// `⌈(d−1)/2⌉ + 1`: the loop plus `⌈(d−1)/2⌉` layers of faces on each side.
pub fn default_width(d: usize) -> usize {
    d.saturating_sub(1).div_ceil(2) + 1
}

/// Output of [`build_covering_ancilla`].
#[derive(Clone, Debug)]
pub struct CoveringAncilla<E> {
    pub ancilla: CellComplex2,
    pub map: CellMap,
    /// The lifted loop, as a walk on `ancilla`.
    pub lifted_loop: EdgePath,
    pub deck: E,
    pub width: usize,
    pub warnings: Vec<String>,
}

struct FaceSlot<E> {
    face: usize,
    /// The face's start sheet is the edge's sheet times this element.
    offset: E,
}

/// A face's start vertex and its steps with voltage prefixes.
type FaceWalk<E> = (usize, Vec<(Step, E)>);

/// Cells of `U/⟨h⟩`, generated on demand.
struct LazyCover<'a, G: DeckGroup> {
    base: &'a PeriodicComplex<G>,
    h: G::Elem,
    /// For each base face, its start vertex and step voltage prefixes.
    walks: Vec<FaceWalk<G::Elem>>,
    /// For each base edge, the faces it borders.
    slots: Vec<Vec<FaceSlot<G::Elem>>>,
}

impl<'a, G: DeckGroup> LazyCover<'a, G> {
    fn new(base: &'a PeriodicComplex<G>, h: G::Elem) -> Self {
        let grp = &base.group;
        let c = &base.complex;
        let mut walks = Vec::with_capacity(c.num_faces());
        let mut slots: Vec<Vec<FaceSlot<G::Elem>>> = (0..c.num_edges()).map(|_| Vec::new()).collect();
        for f in 0..c.num_faces() {
            let walk = c.face_walk(f).expect("validated complexes have closed face walks");
            let mut prefix = grp.identity();
            let mut steps = Vec::with_capacity(walk.len());
            for s in &walk.steps {
                // Sheet of the edge's own tail, relative to the face's start.
                let edge_sheet = if s.forward {
                    prefix
                } else {
                    grp.compose(prefix, base.step_voltage(s))
                };
                slots[s.edge].push(FaceSlot {
                    face: f,
                    offset: grp.inverse(edge_sheet),
                });
                steps.push((*s, prefix));
                prefix = grp.compose(prefix, base.step_voltage(s));
            }
            walks.push((walk.start, steps));
        }
        Self { base, h, walks, slots }
    }

    fn canon(&self, g: G::Elem) -> G::Elem {
        self.base.group.coset_rep(self.h, g)
    }

    /// Cover edges of cover face `(f, sheet)`, in walk order.
    fn face_edges(&self, f: usize, sheet: G::Elem) -> Vec<(usize, G::Elem)> {
        let grp = &self.base.group;
        self.walks[f]
            .1
            .iter()
            .map(|(s, prefix)| {
                let at = grp.compose(sheet, *prefix);
                let tail = if s.forward {
                    at
                } else {
                    grp.compose(at, self.base.step_voltage(s))
                };
                (s.edge, self.canon(tail))
            })
            .collect()
    }

    /// Cover faces bordering cover edge `(e, sheet)`.
    fn edge_faces(&self, e: usize, sheet: G::Elem) -> Vec<(usize, G::Elem)> {
        self.slots[e]
            .iter()
            .map(|slot| (slot.face, self.canon(self.base.group.compose(sheet, slot.offset))))
            .collect()
    }

    fn edge_ends(&self, e: usize, sheet: G::Elem) -> [(usize, G::Elem); 2] {
        let [a, b] = self.base.complex.edges()[e];
        let head = self.base.group.compose(sheet, self.base.voltages[e]);
        [(a, self.canon(sheet)), (b, self.canon(head))]
    }
}

/// Carves a ribbon of the given width around the lift of `path` in
/// `U/⟨h⟩`, where `h` is the deck element of `path`.
///
/// Width 1 keeps only the lifted loop (a repetition-code ancilla); each
/// further unit adds one layer of faces sharing an edge with the ribbon.
pub fn build_ribbon<G: DeckGroup>(
    base: &PeriodicComplex<G>,
    path: &EdgePath,
    width: usize,
) -> Result<CoveringAncilla<G::Elem>, CoverError> {
    if width == 0 {
        return Err(CoverError::ZeroWidth);
    }
    let h = base.lift_deck(path)?;
    let grp = &base.group;
    if h == grp.identity() {
        return Err(CoverError::Contractible);
    }
    let cover = LazyCover::new(base, h);

    let mut sheet = grp.identity();
    let mut loop_edges = Vec::with_capacity(path.len());
    for s in &path.steps {
        let next = grp.compose(sheet, base.step_voltage(s));
        let tail = if s.forward { sheet } else { next };
        loop_edges.push((s.edge, cover.canon(tail)));
        sheet = next;
    }

    let mut edges: BTreeSet<(usize, G::Elem)> = loop_edges.iter().copied().collect();
    let mut faces: BTreeSet<(usize, G::Elem)> = BTreeSet::new();
    for _ in 1..width {
        let fresh: BTreeSet<(usize, G::Elem)> = edges
            .iter()
            .flat_map(|&(e, g)| cover.edge_faces(e, g))
            .filter(|f| !faces.contains(f))
            .collect();
        for &(f, g) in &fresh {
            edges.extend(cover.face_edges(f, g));
        }
        faces.extend(fresh);
    }

    let vertices: BTreeSet<(usize, G::Elem)> = edges.iter().flat_map(|&(e, g)| cover.edge_ends(e, g)).collect();
    let v_index: BTreeMap<(usize, G::Elem), usize> = vertices.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let e_index: BTreeMap<(usize, G::Elem), usize> = edges.iter().enumerate().map(|(i, &k)| (k, i)).collect();

    let anc_edges: Vec<[usize; 2]> = edges
        .iter()
        .map(|&(e, g)| cover.edge_ends(e, g).map(|k| v_index[&k]))
        .collect();
    let anc_faces: Vec<Vec<usize>> = faces
        .iter()
        .map(|&(f, g)| cover.face_edges(f, g).iter().map(|k| e_index[k]).collect())
        .collect();
    let mut border_count = vec![0usize; anc_edges.len()];
    for list in &anc_faces {
        for &e in list {
            border_count[e] += 1;
        }
    }
    let boundary = if anc_faces.is_empty() {
        Vec::new()
    } else {
        vec![BoundarySegment {
            name: "boundary".into(),
            kind: BoundaryKind::Smooth,
            edges: (0..anc_edges.len()).filter(|&e| border_count[e] == 1).collect(),
        }]
    };
    let ancilla = CellComplex2::new(vertices.len(), anc_edges, anc_faces, boundary)?;

    let map = CellMap {
        target: base.complex.clone(),
        vertex_map: vertices.iter().map(|&(v, _)| v).collect(),
        edge_map: edges.iter().map(|&(e, _)| e).collect(),
        face_map: faces.iter().map(|&(f, _)| f).collect(),
        source: ancilla.clone(),
    };

    let start = v_index[&(path.start, cover.canon(grp.identity()))];
    let lifted_edges: Vec<usize> = loop_edges.iter().map(|k| e_index[k]).collect();
    let lifted_loop = EdgePath::from_edges(&ancilla, start, &lifted_edges)?;

    let mut warnings = Vec::new();
    if width == 1 {
        warnings.push("width 1 keeps only the loop: the ancilla is a repetition code with X-distance 1".to_string());
    }
    Ok(CoveringAncilla {
        ancilla,
        map,
        lifted_loop,
        deck: h,
        width,
        warnings,
    })
}

/// Covering ancilla for a loop on the square torus.
///
/// With [`WidthPolicy::Auto`] the width starts at [`default_width`] and grows
/// until the ancilla has one logical qubit and distance at least the data
/// distance; every intermediate candidate is checked exactly.
pub fn build_covering_ancilla(
    torus: &PeriodicComplex<ToricTranslations>,
    path: &EdgePath,
    width: WidthPolicy,
) -> Result<CoveringAncilla<Deck>, CoverError> {
    let mut out = match width {
        WidthPolicy::Fixed(w) => build_ribbon(torus, path, w)?,
        WidthPolicy::Auto => {
            let (dz, dx) = surface_distance(&torus.complex)?;
            let target = dz.min(dx);
            let start = default_width(target);
            let max = start + 4 * target;
            let mut found = None;
            for w in start..=max {
                let cand = build_ribbon(torus, path, w)?;
                let code = css_of_complex(&cand.ancilla);
                if code.k() == 1 {
                    let (az, ax) = code_graph_distance(&code)?;
                    if az.min(ax) >= target {
                        found = Some(cand);
                        break;
                    }
                }
            }
            found.ok_or(CoverError::WidthLimit { max, target })?
        }
    };
    if !out.deck.is_primitive() {
        out.warnings.push(format!(
            "deck element {} is not primitive: the loop is a power of a smaller logical",
            out.deck
        ));
    }
    Ok(out)
}

/// Pushes a source edge vector down through `γ1`, over target edges.
pub fn project_edges(map: &CellMap, source_edges: &BitVec) -> BitVec {
    BitVec::from_support(map.target.num_edges(), source_edges.support().map(|e| map.edge_map[e]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell2::{build_cylinder, TorusLoop};

    fn torus(d: usize) -> PeriodicComplex<ToricTranslations> {
        PeriodicComplex::torus(d).unwrap()
    }

    #[test]
    fn deck_of_presets() {
        for d in [2, 3, 5] {
            let t = torus(d);
            assert_eq!(lift_deck(&t, &TorusLoop::Z1.walk(d)).unwrap(), Deck { r: 1, s: 0 });
            assert_eq!(lift_deck(&t, &TorusLoop::Z2.walk(d)).unwrap(), Deck { r: 0, s: 1 });
            assert_eq!(lift_deck(&t, &TorusLoop::Z1Z2.walk(d)).unwrap(), Deck { r: 1, s: 1 });
            assert_eq!(
                lift_deck(&t, &TorusLoop::Z1Z2Figure8.walk(d)).unwrap(),
                Deck { r: 1, s: 1 }
            );
            let face = t.complex.face_walk(d + 1).unwrap();
            assert_eq!(lift_deck(&t, &face).unwrap(), Deck::IDENTITY);
        }
        let t = torus(3);
        let open = EdgePath::from_edges(&t.complex, 0, &[0]).unwrap();
        assert!(matches!(
            lift_deck(&t, &open),
            Err(CoverError::Complex(Cell2Error::NotClosed))
        ));
    }

    #[test]
    fn coset_reps() {
        let g = ToricTranslations;
        let h = Deck { r: 1, s: 1 };
        assert_eq!(g.coset_rep(h, Deck { r: 3, s: 5 }), Deck { r: 0, s: 2 });
        assert_eq!(g.coset_rep(h, Deck { r: -2, s: 0 }), Deck { r: 0, s: 2 });
        let h = Deck { r: 0, s: 2 };
        assert_eq!(g.coset_rep(h, Deck { r: 4, s: -3 }), Deck { r: 4, s: 1 });
        assert!(!Deck { r: 2, s: 0 }.is_primitive());
        assert!(Deck { r: 2, s: 3 }.is_primitive());
    }

    #[test]
    fn z1_ribbon_is_the_cylinder() {
        let t = torus(3);
        let out = build_covering_ancilla(&t, &TorusLoop::Z1.walk(3), WidthPolicy::Auto).unwrap();
        assert_eq!(out.width, 2);
        let cyl = build_cylinder(3, 3).unwrap();
        let a = &out.ancilla;
        assert_eq!((a.num_vertices(), a.num_edges(), a.num_faces()), (9, 15, 6));
        assert_eq!(a.euler_characteristic(), cyl.euler_characteristic());
        let code = css_of_complex(a);
        assert_eq!((code.n(), code.k()), (15, 1));
        assert_eq!(surface_distance(a).unwrap(), (3, 3));
        verify_cellmap(&out.map).unwrap();

        let gamma = gate_matrix(&out.map);
        assert_eq!(gamma.shape(), (18, 15));
        let rows: Vec<usize> = (0..18).map(|r| gamma.row_weight(r)).collect();
        assert!(rows.iter().all(|&w| w <= 1));
        assert_eq!(rows.iter().filter(|&&w| w == 0).count(), 3);
        assert!(gamma.transpose().row_vecs().iter().all(|c| c.weight() == 1));
    }

    #[test]
    fn lifted_loop_projects_to_input() {
        for d in [3, 5] {
            let t = torus(d);
            for preset in TorusLoop::ALL {
                let walk = preset.walk(d);
                let out = build_covering_ancilla(&t, &walk, WidthPolicy::Auto).unwrap();
                assert!(out.lifted_loop.is_closed(&out.ancilla));
                let lifted = out.lifted_loop.edge_vector(out.ancilla.num_edges());
                assert_eq!(
                    project_edges(&out.map, &lifted),
                    walk.edge_vector(t.complex.num_edges()),
                    "{preset:?} d={d}"
                );
            }
        }
    }

    #[test]
    fn width_one_is_a_repetition_code() {
        let t = torus(3);
        let out = build_covering_ancilla(&t, &TorusLoop::Z1.walk(3), WidthPolicy::Fixed(1)).unwrap();
        assert_eq!(out.ancilla.num_faces(), 0);
        assert_eq!(out.ancilla.num_edges(), 3);
        assert_eq!(surface_distance(&out.ancilla).unwrap(), (3, 1));
        assert!(!out.warnings.is_empty());
        verify_cellmap(&out.map).unwrap();
        assert!(matches!(
            build_covering_ancilla(&t, &TorusLoop::Z1.walk(3), WidthPolicy::Fixed(0)),
            Err(CoverError::ZeroWidth)
        ));
    }

    #[test]
    fn contractible_loop_is_rejected() {
        let t = torus(3);
        let face = t.complex.face_walk(0).unwrap();
        assert!(matches!(
            build_covering_ancilla(&t, &face, WidthPolicy::Fixed(2)),
            Err(CoverError::Contractible)
        ));
    }

    #[test]
    fn doubled_loop_warns() {
        let t = torus(3);
        let mut w = TorusLoop::Z1.walk(3);
        w.steps.extend(w.steps.clone());
        let out = build_covering_ancilla(&t, &w, WidthPolicy::Fixed(2)).unwrap();
        assert_eq!(out.deck, Deck { r: 2, s: 0 });
        assert!(out.warnings.iter().any(|m| m.contains("not primitive")));
        verify_cellmap(&out.map).unwrap();
    }

    #[test]
    fn identity_and_corrupted_maps() {
        let t = build_torus(3).unwrap();
        let id = CellMap::identity(&t);
        let cert = verify_cellmap(&id).unwrap();
        assert!(cert.residual_faces.is_zero() && cert.residual_edges.is_zero());
        assert_eq!(gate_matrix(&id), BitMatrix::identity(18));

        let out = build_covering_ancilla(&torus(3), &TorusLoop::Z1.walk(3), WidthPolicy::Auto).unwrap();
        let mut bad = out.map.clone();
        bad.edge_map[4] = (bad.edge_map[4] + 1) % 18;
        match verify_cellmap(&bad) {
            Err(CellMapError::Violation { faces, edges, .. }) => {
                assert!(edges.contains(&4) || !faces.is_empty());
            }
            other => panic!("corruption not detected: {other:?}"),
        }
    }

    #[test]
    fn width_monotonicity() {
        for d in [3, 5] {
            let t = torus(d);
            for preset in [TorusLoop::Z1, TorusLoop::Z2, TorusLoop::Z1Z2] {
                let mut prev = 0;
                for w in 1..=default_width(d) + 1 {
                    let out = build_covering_ancilla(&t, &preset.walk(d), WidthPolicy::Fixed(w)).unwrap();
                    let (az, ax) = surface_distance(&out.ancilla).unwrap();
                    let da = az.min(ax);
                    assert!(da >= prev, "{preset:?} d={d} w={w}");
                    prev = da;
                }
                assert!(prev >= d);
            }
        }
    }
}
