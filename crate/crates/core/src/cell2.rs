//! Finite 2D cellulations and the surface codes they define.
//!
//! Vertices are X-checks, edges are qubits and faces are Z-checks. A rough
//! boundary segment is handled as a relative complex: its edges carry no
//! qubit and its vertices carry no X-check, so Z-strings may end there.
//! Smooth boundary edges stay qubits and simply border one face.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csscode::{CssCode, CssError};
use crate::f2la::{BitMatrix, BitVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Cell2Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("edge {edge} references vertex {vertex}, but there are {count} vertices")]
    VertexOutOfRange { edge: usize, vertex: usize, count: usize },
    #[error("face {face} references edge {edge}, but there are {count} edges")]
    EdgeOutOfRange { face: usize, edge: usize, count: usize },
    #[error("face {face} does not bound a closed walk")]
    OpenFace { face: usize },
    #[error("edge {edge} borders {faces} faces")]
    TooManyFaces { edge: usize, faces: usize },
    #[error("rough edge {edge} is interior (borders two faces)")]
    RoughInterior { edge: usize },
    #[error("unknown boundary segment {0:?}")]
    UnknownSegment(String),
    #[error("edge sequence is not a walk at step {step}")]
    NotAWalk { step: usize },
    #[error("walk is not closed")]
    NotClosed,
    #[error("vertex {vertex} is not on the loop")]
    NotOnLoop { vertex: usize },
    #[error("the two loops lie in different connected components")]
    Disconnected,
    #[error("check matrix column {column} has weight {weight}; the code is not graph-like")]
    NotGraphLike { column: usize, weight: usize },
    #[error(transparent)]
    Code(#[from] CssError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Smooth,
    Rough,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySegment {
    pub name: String,
    pub kind: BoundaryKind,
    pub edges: Vec<usize>,
}

/// A 2D cellulation with optional boundary annotations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexFile", into = "ComplexFile")]
pub struct CellComplex2 {
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    faces: Vec<Vec<usize>>,
    boundary: Vec<BoundarySegment>,
}

/// Serialized layout of a complex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<Vec<usize>>,
    #[serde(default)]
    pub boundary: Vec<BoundarySegment>,
}

impl TryFrom<ComplexFile> for CellComplex2 {
    type Error = Cell2Error;

    fn try_from(f: ComplexFile) -> Result<Self, Self::Error> {
        CellComplex2::new(f.vertices, f.edges, f.faces, f.boundary)
    }
}

impl From<CellComplex2> for ComplexFile {
    fn from(c: CellComplex2) -> Self {
        ComplexFile {
            vertices: c.num_vertices,
            edges: c.edges,
            faces: c.faces,
            boundary: c.boundary,
        }
    }
}

/// One traversal step: an edge and whether it is walked from `edges[e][0]`
/// to `edges[e][1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

/// An oriented walk along edges. A loop is a walk whose end is its start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgePath {
    pub start: usize,
    pub steps: Vec<Step>,
}

impl EdgePath {
    pub fn empty(at: usize) -> Self {
        Self {
            start: at,
            steps: Vec::new(),
        }
    }

    /// Orients `edges` into a walk from `start`.
    pub fn from_edges(complex: &CellComplex2, start: usize, edges: &[usize]) -> Result<Self, Cell2Error> {
        let mut at = start;
        let mut steps = Vec::with_capacity(edges.len());
        for (i, &e) in edges.iter().enumerate() {
            let [a, b] = *complex.edges.get(e).ok_or(Cell2Error::NotAWalk { step: i })?;
            let forward = if a == at {
                true
            } else if b == at {
                false
            } else {
                return Err(Cell2Error::NotAWalk { step: i });
            };
            at = if forward { b } else { a };
            steps.push(Step { edge: e, forward });
        }
        Ok(Self { start, steps })
    }

    /// Visited vertices, starting with `start` and ending with the end vertex.
    pub fn vertices(&self, complex: &CellComplex2) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut at = self.start;
        out.push(at);
        for s in &self.steps {
            at = complex.step_target(s);
            out.push(at);
        }
        out
    }

    pub fn end(&self, complex: &CellComplex2) -> usize {
        self.steps.last().map_or(self.start, |s| complex.step_target(s))
    }

    pub fn is_closed(&self, complex: &CellComplex2) -> bool {
        self.end(complex) == self.start
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn reversed(&self, complex: &CellComplex2) -> EdgePath {
        EdgePath {
            start: self.end(complex),
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| Step {
                    edge: s.edge,
                    forward: !s.forward,
                })
                .collect(),
        }
    }

    /// The mod-2 edge indicator over all edges of the complex.
    pub fn edge_vector(&self, num_edges: usize) -> BitVec {
        BitVec::from_support(num_edges, self.steps.iter().map(|s| s.edge))
    }

    /// Validates every step against `complex`.
    pub fn check(&self, complex: &CellComplex2) -> Result<(), Cell2Error> {
        let edges: Vec<usize> = self.steps.iter().map(|s| s.edge).collect();
        let again = EdgePath::from_edges(complex, self.start, &edges)?;
        if again.steps != self.steps {
            // An orientation flag disagrees with the walk; only possible on
            // parallel edges whose flags were set by hand.
            let bad = again
                .steps
                .iter()
                .zip(&self.steps)
                .position(|(a, b)| a != b)
                .unwrap_or(0);
            return Err(Cell2Error::NotAWalk { step: bad });
        }
        Ok(())
    }

    /// The same closed loop read from the `pos`-th visited vertex.
    fn rotated(&self, pos: usize, complex: &CellComplex2) -> EdgePath {
        let verts = self.vertices(complex);
        let mut steps = self.steps[pos..].to_vec();
        steps.extend_from_slice(&self.steps[..pos]);
        EdgePath {
            start: verts[pos],
            steps,
        }
    }
}

impl CellComplex2 {
    pub fn new(
        num_vertices: usize,
        edges: Vec<[usize; 2]>,
        faces: Vec<Vec<usize>>,
        boundary: Vec<BoundarySegment>,
    ) -> Result<Self, Cell2Error> {
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                if v >= num_vertices {
                    return Err(Cell2Error::VertexOutOfRange {
                        edge: i,
                        vertex: v,
                        count: num_vertices,
                    });
                }
            }
        }
        let mut incidence = vec![0usize; edges.len()];
        for (f, list) in faces.iter().enumerate() {
            for &e in list {
                if e >= edges.len() {
                    return Err(Cell2Error::EdgeOutOfRange {
                        face: f,
                        edge: e,
                        count: edges.len(),
                    });
                }
                incidence[e] += 1;
            }
        }
        if let Some((edge, &faces)) = incidence.iter().enumerate().find(|(_, &c)| c > 2) {
            return Err(Cell2Error::TooManyFaces { edge, faces });
        }
        for seg in &boundary {
            for &e in &seg.edges {
                if e >= edges.len() {
                    return Err(Cell2Error::EdgeOutOfRange {
                        face: usize::MAX,
                        edge: e,
                        count: edges.len(),
                    });
                }
                if seg.kind == BoundaryKind::Rough && incidence[e] == 2 {
                    return Err(Cell2Error::RoughInterior { edge: e });
                }
            }
        }
        let complex = Self {
            num_vertices,
            edges,
            faces,
            boundary,
        };
        for f in 0..complex.faces.len() {
            if complex.face_walk(f).is_none() {
                return Err(Cell2Error::OpenFace { face: f });
            }
        }
        Ok(complex)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn boundary(&self) -> &[BoundarySegment] {
        &self.boundary
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    fn step_target(&self, s: &Step) -> usize {
        let [a, b] = self.edges[s.edge];
        if s.forward {
            b
        } else {
            a
        }
    }

    /// The boundary walk of face `f`: a start vertex and oriented steps.
    pub fn face_walk(&self, f: usize) -> Option<EdgePath> {
        let list = &self.faces[f];
        let first = *list.first()?;
        for start in self.edges[first] {
            if let Ok(path) = EdgePath::from_edges(self, start, list) {
                if path.is_closed(self) {
                    return Some(path);
                }
            }
        }
        None
    }

    fn rough_edges(&self) -> BTreeSet<usize> {
        self.boundary
            .iter()
            .filter(|s| s.kind == BoundaryKind::Rough)
            .flat_map(|s| s.edges.iter().copied())
            .collect()
    }

    /// Edges that carry a qubit, ascending. Qubit `i` is edge `qubit_edges()[i]`.
    pub fn qubit_edges(&self) -> Vec<usize> {
        let rough = self.rough_edges();
        (0..self.edges.len()).filter(|e| !rough.contains(e)).collect()
    }

    /// Vertices that carry an X-check, ascending.
    pub fn checked_vertices(&self) -> Vec<usize> {
        let rough: HashSet<usize> = self.rough_edges().iter().flat_map(|&e| self.edges[e]).collect();
        (0..self.num_vertices).filter(|v| !rough.contains(v)).collect()
    }

    /// Map from edge index to qubit index.
    pub fn edge_to_qubit(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.edges.len()];
        for (q, e) in self.qubit_edges().into_iter().enumerate() {
            out[e] = Some(q);
        }
        out
    }

    pub fn vertex_to_check(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.num_vertices];
        for (c, v) in self.checked_vertices().into_iter().enumerate() {
            out[v] = Some(c);
        }
        out
    }

    /// Relative `∂1`: checked vertices × qubit edges. This is `H_X`.
    pub fn boundary_1(&self) -> BitMatrix {
        let v2c = self.vertex_to_check();
        let qubits = self.qubit_edges();
        let mut m = BitMatrix::zeros(self.checked_vertices().len(), qubits.len());
        for (q, &e) in qubits.iter().enumerate() {
            for v in self.edges[e] {
                if let Some(c) = v2c[v] {
                    m.flip(c, q);
                }
            }
        }
        m
    }

    /// Relative `∂2`: qubit edges × faces. Its transpose is `H_Z`.
    pub fn boundary_2(&self) -> BitMatrix {
        let e2q = self.edge_to_qubit();
        let mut m = BitMatrix::zeros(self.qubit_edges().len(), self.faces.len());
        for (f, list) in self.faces.iter().enumerate() {
            for &e in list {
                if let Some(q) = e2q[e] {
                    m.flip(q, f);
                }
            }
        }
        m
    }

    /// Restricts an edge vector to qubit coordinates.
    pub fn edges_to_qubits(&self, edges: &BitVec) -> BitVec {
        let qubits = self.qubit_edges();
        BitVec::from_support(qubits.len(), (0..qubits.len()).filter(|&q| edges.get(qubits[q])))
    }

    /// Expands a qubit vector to edge coordinates.
    pub fn qubits_to_edges(&self, qubits: &BitVec) -> BitVec {
        let list = self.qubit_edges();
        BitVec::from_support(self.edges.len(), qubits.support().map(|q| list[q]))
    }

    pub fn segment(&self, name: &str) -> Option<&BoundarySegment> {
        self.boundary.iter().find(|s| s.name == name)
    }

    /// Faces bordering each edge.
    pub fn faces_of_edge(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.edges.len()];
        for (f, list) in self.faces.iter().enumerate() {
            for &e in list {
                if !out[e].contains(&f) {
                    out[e].push(f);
                }
            }
        }
        out
    }
}

/// The surface code of a cellulation.
pub fn css_of_complex(m: &CellComplex2) -> CssCode {
    CssCode::new(m.boundary_1(), m.boundary_2().transpose()).expect("∂1∂2 = 0 holds for every closed face walk")
}

fn smooth(name: &str, edges: Vec<usize>) -> BoundarySegment {
    BoundarySegment {
        name: name.to_string(),
        kind: BoundaryKind::Smooth,
        edges,
    }
}

fn rough(name: &str, edges: Vec<usize>) -> BoundarySegment {
    BoundarySegment {
        name: name.to_string(),
        kind: BoundaryKind::Rough,
        edges,
    }
}

/// Index helpers for the `d × d` square torus.
///
/// Vertex `(x, y)` is `y·d + x`. Horizontal edge `h(x, y)` runs from `(x, y)`
/// to `(x+1, y)`; vertical edge `v(x, y)` from `(x, y)` to `(x, y+1)`. Face
/// `(x, y)` has lower-left corner `(x, y)`.
#[derive(Clone, Copy, Debug)]
pub struct TorusIndex {
    pub d: usize,
}

impl TorusIndex {
    pub fn vertex(&self, x: usize, y: usize) -> usize {
        (y % self.d) * self.d + x % self.d
    }

    pub fn h(&self, x: usize, y: usize) -> usize {
        self.vertex(x, y)
    }

    pub fn v(&self, x: usize, y: usize) -> usize {
        self.d * self.d + self.vertex(x, y)
    }

    pub fn face(&self, x: usize, y: usize) -> usize {
        self.vertex(x, y)
    }

    pub fn coords(&self, vertex: usize) -> (usize, usize) {
        (vertex % self.d, vertex / self.d)
    }
}

/// The `d × d` square cellulation of the torus.
pub fn build_torus(d: usize) -> Result<CellComplex2, Cell2Error> {
    if d < 2 {
        return Err(Cell2Error::InvalidSize(format!("torus needs d ≥ 2, got {d}")));
    }
    let t = TorusIndex { d };
    let mut edges = vec![[0, 0]; 2 * d * d];
    let mut faces = Vec::with_capacity(d * d);
    for y in 0..d {
        for x in 0..d {
            edges[t.h(x, y)] = [t.vertex(x, y), t.vertex(x + 1, y)];
            edges[t.v(x, y)] = [t.vertex(x, y), t.vertex(x, y + 1)];
        }
    }
    for y in 0..d {
        for x in 0..d {
            faces.push(vec![t.h(x, y), t.v(x + 1, y), t.h(x, y + 1), t.v(x, y)]);
        }
    }
    CellComplex2::new(d * d, edges, faces, Vec::new())
}

/// A cylinder: a circle of `c` edges times a segment with `h` vertex rows.
///
/// Vertex `(x, y)` is `y·c + x`; horizontal edges come first (`y·c + x`),
/// then vertical edges (`c·h + y·c + x`). Both boundary circles are smooth.
pub fn build_cylinder(c: usize, h: usize) -> Result<CellComplex2, Cell2Error> {
    if c < 2 || h < 1 {
        return Err(Cell2Error::InvalidSize(format!(
            "cylinder needs c ≥ 2 and h ≥ 1, got c={c}, h={h}"
        )));
    }
    let vid = |x: usize, y: usize| y * c + x % c;
    let hid = |x: usize, y: usize| y * c + x % c;
    let vtid = |x: usize, y: usize| c * h + y * c + x % c;
    let mut edges = Vec::with_capacity(c * h + c * (h - 1));
    for y in 0..h {
        for x in 0..c {
            edges.push([vid(x, y), vid(x + 1, y)]);
        }
    }
    for y in 0..h - 1 {
        for x in 0..c {
            edges.push([vid(x, y), vid(x, y + 1)]);
        }
    }
    let faces = (0..h - 1)
        .flat_map(|y| (0..c).map(move |x| vec![hid(x, y), vtid(x + 1, y), hid(x, y + 1), vtid(x, y)]))
        .collect();
    let boundary = if h >= 2 {
        vec![
            smooth("bottom", (0..c).map(|x| hid(x, 0)).collect()),
            smooth("top", (0..c).map(|x| hid(x, h - 1)).collect()),
        ]
    } else {
        Vec::new()
    };
    CellComplex2::new(c * h, edges, faces, boundary)
}

/// A rectangular grid with `w` face columns and `h` face rows, no annotations.
struct Grid {
    w: usize,
    h: usize,
}

impl Grid {
    fn vertex(&self, x: usize, y: usize) -> usize {
        y * (self.w + 1) + x
    }

    fn hor(&self, x: usize, y: usize) -> usize {
        y * self.w + x
    }

    fn ver(&self, x: usize, y: usize) -> usize {
        self.w * (self.h + 1) + y * (self.w + 1) + x
    }

    fn build(&self, boundary: Vec<BoundarySegment>) -> Result<CellComplex2, Cell2Error> {
        let mut edges = Vec::new();
        for y in 0..=self.h {
            for x in 0..self.w {
                edges.push([self.vertex(x, y), self.vertex(x + 1, y)]);
            }
        }
        for y in 0..self.h {
            for x in 0..=self.w {
                edges.push([self.vertex(x, y), self.vertex(x, y + 1)]);
            }
        }
        let mut faces = Vec::new();
        for y in 0..self.h {
            for x in 0..self.w {
                faces.push(vec![
                    self.hor(x, y),
                    self.ver(x + 1, y),
                    self.hor(x, y + 1),
                    self.ver(x, y),
                ]);
            }
        }
        CellComplex2::new((self.w + 1) * (self.h + 1), edges, faces, boundary)
    }
}

/// A single square face. Its code encodes nothing.
pub fn build_square() -> CellComplex2 {
    Grid { w: 1, h: 1 }.build(Vec::new()).expect("unit square is valid")
}

/// Planar patch with one rough west side and two rough segments on the east
/// side separated by a smooth gap, encoding two logical qubits at distance `d`.
///
/// `Z̄1` runs from "west" to "east-south" and `Z̄2` from "west" to
/// "east-north". The patch is `d` faces wide and `3d − 4` faces tall; each
/// east rough segment has `d − 2` edges and the gap between them has `d`.
pub fn build_planar_fig5(d: usize) -> Result<CellComplex2, Cell2Error> {
    if d < 3 {
        return Err(Cell2Error::InvalidSize(format!("planar patch needs d ≥ 3, got {d}")));
    }
    let a = d - 2;
    let g = Grid { w: d, h: 2 * a + d };
    let (w, h) = (g.w, g.h);
    let boundary = vec![
        rough("west", (0..h).map(|y| g.ver(0, y)).collect()),
        rough("east-south", (0..a).map(|y| g.ver(w, y)).collect()),
        smooth("east-gap", (a..h - a).map(|y| g.ver(w, y)).collect()),
        rough("east-north", (h - a..h).map(|y| g.ver(w, y)).collect()),
        smooth("south", (0..w).map(|x| g.hor(x, 0)).collect()),
        smooth("north", (0..w).map(|x| g.hor(x, h)).collect()),
    ];
    g.build(boundary)
}

/// Turns every rough segment not named in `keep` into a smooth one, adding
/// its edges as qubits and its vertices as X-checks.
pub fn close_rough_boundaries(m: &CellComplex2, keep: &[&str]) -> Result<CellComplex2, Cell2Error> {
    for name in keep {
        match m.segment(name) {
            Some(s) if s.kind == BoundaryKind::Rough => {}
            _ => return Err(Cell2Error::UnknownSegment(name.to_string())),
        }
    }
    let mut out = m.clone();
    for seg in &mut out.boundary {
        if seg.kind == BoundaryKind::Rough && !keep.contains(&seg.name.as_str()) {
            seg.kind = BoundaryKind::Smooth;
        }
    }
    Ok(out)
}

/// Builds the based loop `ℓ1 · p · ℓ2 · p̄`.
///
/// `p` must start on `l1` and end on `l2`; each loop is first rotated to
/// begin at the corresponding endpoint of `p`.
pub fn compose_loops(
    complex: &CellComplex2,
    l1: &EdgePath,
    p: &EdgePath,
    l2: &EdgePath,
) -> Result<EdgePath, Cell2Error> {
    for path in [l1, p, l2] {
        path.check(complex)?;
    }
    if !l1.is_closed(complex) || !l2.is_closed(complex) {
        return Err(Cell2Error::NotClosed);
    }
    let v1 = p.start;
    let v2 = p.end(complex);
    let pos1 = l1
        .vertices(complex)
        .iter()
        .position(|&v| v == v1)
        .ok_or(Cell2Error::NotOnLoop { vertex: v1 })?;
    let pos2 = l2
        .vertices(complex)
        .iter()
        .position(|&v| v == v2)
        .ok_or(Cell2Error::NotOnLoop { vertex: v2 })?;
    let r1 = l1.rotated(pos1.min(l1.len()), complex);
    let r2 = l2.rotated(pos2.min(l2.len()), complex);
    let mut steps = r1.steps;
    steps.extend_from_slice(&p.steps);
    steps.extend_from_slice(&r2.steps);
    steps.extend(p.reversed(complex).steps);
    Ok(EdgePath { start: v1, steps })
}

/// [`compose_loops`] with `p` a shortest path between the two loops.
pub fn compose_loops_auto(complex: &CellComplex2, l1: &EdgePath, l2: &EdgePath) -> Result<EdgePath, Cell2Error> {
    let sources: Vec<usize> = l1.vertices(complex);
    let targets: HashSet<usize> = l2.vertices(complex).into_iter().collect();
    let mut adj = vec![Vec::new(); complex.num_vertices];
    for (e, &[a, b]) in complex.edges.iter().enumerate() {
        adj[a].push((e, true, b));
        adj[b].push((e, false, a));
    }
    let mut prev: Vec<Option<(usize, Step)>> = vec![None; complex.num_vertices];
    let mut seen = vec![false; complex.num_vertices];
    let mut queue = VecDeque::new();
    for &s in &sources {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        if targets.contains(&u) {
            let mut steps = Vec::new();
            let mut at = u;
            while let Some((from, step)) = prev[at] {
                steps.push(step);
                at = from;
            }
            steps.reverse();
            let p = EdgePath { start: at, steps };
            return compose_loops(complex, l1, &p, l2);
        }
        for &(e, forward, w) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((u, Step { edge: e, forward }));
                queue.push_back(w);
            }
        }
    }
    Err(Cell2Error::Disconnected)
}

/// Named logical loops on the square torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TorusLoop {
    /// Horizontal loop along row 0.
    Z1,
    /// Vertical loop along column 0.
    Z2,
    /// Staircase from `(0,0)` to `(d,d)`, alternating right and up steps.
    Z1Z2,
    /// Row 0 followed by column 0, crossing itself at the origin.
    Z1Z2Figure8,
}

impl TorusLoop {
    pub const ALL: [TorusLoop; 4] = [TorusLoop::Z1, TorusLoop::Z2, TorusLoop::Z1Z2, TorusLoop::Z1Z2Figure8];

    pub fn name(&self) -> &'static str {
        match self {
            TorusLoop::Z1 => "Z1",
            TorusLoop::Z2 => "Z2",
            TorusLoop::Z1Z2 => "Z1Z2",
            TorusLoop::Z1Z2Figure8 => "Z1Z2-fig8",
        }
    }

    pub fn parse(s: &str) -> Option<TorusLoop> {
        Self::ALL.into_iter().find(|l| l.name().eq_ignore_ascii_case(s))
    }

    /// Logical class as `(Z̄1, Z̄2)` bits.
    pub fn class(&self) -> (bool, bool) {
        match self {
            TorusLoop::Z1 => (true, false),
            TorusLoop::Z2 => (false, true),
            TorusLoop::Z1Z2 | TorusLoop::Z1Z2Figure8 => (true, true),
        }
    }

    pub fn walk(&self, d: usize) -> EdgePath {
        let t = TorusIndex { d };
        let fwd = |edge| Step { edge, forward: true };
        let steps = match self {
            TorusLoop::Z1 => (0..d).map(|x| fwd(t.h(x, 0))).collect(),
            TorusLoop::Z2 => (0..d).map(|y| fwd(t.v(0, y))).collect(),
            TorusLoop::Z1Z2 => (0..d).flat_map(|i| [fwd(t.h(i, i)), fwd(t.v(i + 1, i))]).collect(),
            TorusLoop::Z1Z2Figure8 => (0..d)
                .map(|x| fwd(t.h(x, 0)))
                .chain((0..d).map(|y| fwd(t.v(0, y))))
                .collect(),
        };
        EdgePath { start: 0, steps }
    }
}

/// Horizontal loop along row `y` of the torus.
pub fn torus_row_loop(d: usize, y: usize) -> EdgePath {
    let t = TorusIndex { d };
    EdgePath {
        start: t.vertex(0, y),
        steps: (0..d)
            .map(|x| Step {
                edge: t.h(x, y),
                forward: true,
            })
            .collect(),
    }
}

/// Vertical loop along column `x` of the torus.
pub fn torus_column_loop(d: usize, x: usize) -> EdgePath {
    let t = TorusIndex { d };
    EdgePath {
        start: t.vertex(x, 0),
        steps: (0..d)
            .map(|y| Step {
                edge: t.v(x, y),
                forward: true,
            })
            .collect(),
    }
}

/// Exact `(d_z, d_x)` of the surface code on `m`.
pub fn surface_distance(m: &CellComplex2) -> Result<(usize, usize), Cell2Error> {
    code_graph_distance(&css_of_complex(m))
}

/// Exact `(d_z, d_x)` for a code whose check matrices both have column
/// weight at most 2.
///
/// Each check matrix is read as a graph: checks are nodes, qubits are edges,
/// and a weight-1 column is an edge to a shared virtual boundary node (a
/// weight-0 column is a loop there). `ker H_X` is then the cycle space, and a
/// cycle is a logical iff it pairs nontrivially with some partner logical.
/// A breadth-first search over `(node, pairing signature)` states finds the
/// shortest closed walk with nonzero signature, which has the length of the
/// lightest logical.
pub fn code_graph_distance(code: &CssCode) -> Result<(usize, usize), Cell2Error> {
    if code.k() == 0 {
        return Err(CssError::KIsZero.into());
    }
    let l = code.logicals();
    let d_z = shortest_nontrivial_cycle(code.h_x(), &l.x)?;
    let d_x = shortest_nontrivial_cycle(code.h_z(), &l.z)?;
    Ok((d_z, d_x))
}

fn shortest_nontrivial_cycle(checks: &BitMatrix, partners: &[BitVec]) -> Result<usize, Cell2Error> {
    let k = partners.len();
    assert!(k <= 20, "signature space 2^{k} is too large for graph search");
    let nodes = checks.rows() + 1;
    let boundary = checks.rows();
    let ht = checks.transpose();
    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); nodes];
    for q in 0..checks.cols() {
        let ends: Vec<usize> = ht.row(q).support().collect();
        let sig = partners
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, p)| acc | (p.get(q) as u32) << i);
        let (a, b) = match ends[..] {
            [] => (boundary, boundary),
            [a] => (a, boundary),
            [a, b] => (a, b),
            _ => {
                return Err(Cell2Error::NotGraphLike {
                    column: q,
                    weight: ends.len(),
                })
            }
        };
        adj[a].push((b, sig));
        if a != b {
            adj[b].push((a, sig));
        }
    }
    let states = 1usize << k;
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; nodes * states];
    let mut queue = VecDeque::new();
    for src in 0..nodes {
        if adj[src].is_empty() {
            continue;
        }
        dist.fill(usize::MAX);
        queue.clear();
        dist[src * states] = 0;
        queue.push_back((src, 0u32));
        while let Some((u, s)) = queue.pop_front() {
            let du = dist[u * states + s as usize];
            if du + 1 >= best {
                break;
            }
            for &(w, sig) in &adj[u] {
                let t = s ^ sig;
                let idx = w * states + t as usize;
                if dist[idx] == usize::MAX {
                    dist[idx] = du + 1;
                    if w == src && t != 0 {
                        best = best.min(du + 1);
                    }
                    queue.push_back((w, t));
                }
            }
        }
    }
    Ok(best)
}
