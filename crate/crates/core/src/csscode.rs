//! CSS codes given by a commuting pair of check matrices.
//!
//! A code stores `H_X` and `H_Z`, the number of logical qubits `k` (computed
//! once at construction) and lazily computed distances. The same data read
//! as a length-3 chain complex has `∂2 = H_Zᵀ` and `∂1 = H_X`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2la::{BitMatrix, BitVec, F2Error, RowSpace};

/// Kernel dimensions up to this size are enumerated exhaustively.
pub const EXHAUSTIVE_KERNEL_DIM: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CssError {
    #[error("check matrices have {x_cols} and {z_cols} columns")]
    DimensionMismatch { x_cols: usize, z_cols: usize },
    #[error("X-check {x_row} anticommutes with Z-check {z_row}")]
    CommutationViolation { x_row: usize, z_row: usize },
    #[error("the code encodes no logical qubits")]
    KIsZero,
    #[error(transparent)]
    Linear(#[from] F2Error),
}

/// Pauli type of an operator or check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Z,
}

/// Result of a distance computation.
///
/// `lower == upper` means the distance is exact. Otherwise `lower` is a
/// proven lower bound (nothing lighter exists) and `upper` is the weight of
/// an explicit logical operator that was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub lower: usize,
    pub upper: usize,
}

impl DistanceEstimate {
    pub fn exact(d: usize) -> Self {
        Self { lower: d, upper: d }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// The exact value, if known.
    pub fn value(&self) -> Option<usize> {
        self.is_exact().then_some(self.lower)
    }
}

impl std::fmt::Display for DistanceEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lower)
        } else {
            write!(f, "{}..={} (upper bound only)", self.lower, self.upper)
        }
    }
}

#[derive(Clone, Debug)]
pub struct CssCode {
    h_x: BitMatrix,
    h_z: BitMatrix,
    n: usize,
    k: usize,
    rank_x: usize,
    rank_z: usize,
    logicals: OnceLock<LogicalBasis>,
    dist_x: OnceLock<DistanceEstimate>,
    dist_z: OnceLock<DistanceEstimate>,
}

impl PartialEq for CssCode {
    fn eq(&self, other: &Self) -> bool {
        self.h_x == other.h_x && self.h_z == other.h_z
    }
}

impl Eq for CssCode {}

/// Paired logical representatives with `x[i] · z[j] = δ_ij`.
#[derive(Clone, Debug)]
pub struct LogicalBasis {
    pub x: Vec<BitVec>,
    pub z: Vec<BitVec>,
}

/// Validates `H_X · H_Zᵀ = 0` and builds the code.
pub fn css_from_checks(h_x: BitMatrix, h_z: BitMatrix) -> Result<CssCode, CssError> {
    CssCode::new(h_x, h_z)
}

impl CssCode {
    pub fn new(h_x: BitMatrix, h_z: BitMatrix) -> Result<Self, CssError> {
        if h_x.cols() != h_z.cols() {
            return Err(CssError::DimensionMismatch {
                x_cols: h_x.cols(),
                z_cols: h_z.cols(),
            });
        }
        let prod = h_x.mul(&h_z.transpose())?;
        if let Some(&(x_row, z_row)) = prod.nonzero_entries().first() {
            return Err(CssError::CommutationViolation { x_row, z_row });
        }
        let n = h_x.cols();
        let rank_x = h_x.rank();
        let rank_z = h_z.rank();
        Ok(Self {
            k: n - rank_x - rank_z,
            h_x,
            h_z,
            n,
            rank_x,
            rank_z,
            logicals: OnceLock::new(),
            dist_x: OnceLock::new(),
            dist_z: OnceLock::new(),
        })
    }

    /// Records distances that are known exactly from elsewhere, such as a
    /// geometric shortest-cycle computation.
    pub fn with_known_distances(self, d_x: usize, d_z: usize) -> Self {
        let _ = self.dist_x.set(DistanceEstimate::exact(d_x));
        let _ = self.dist_z.set(DistanceEstimate::exact(d_z));
        self
    }

    pub fn h_x(&self) -> &BitMatrix {
        &self.h_x
    }

    pub fn h_z(&self) -> &BitMatrix {
        &self.h_z
    }

    pub fn h(&self, kind: Pauli) -> &BitMatrix {
        match kind {
            Pauli::X => &self.h_x,
            Pauli::Z => &self.h_z,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank_x(&self) -> usize {
        self.rank_x
    }

    pub fn rank_z(&self) -> usize {
        self.rank_z
    }

    /// The code with X and Z exchanged.
    pub fn dual(&self) -> CssCode {
        let mut dual = CssCode::new(self.h_z.clone(), self.h_x.clone()).expect("dual of a valid code is valid");
        if let Some(&d) = self.dist_x.get() {
            let _ = dual.dist_z.set(d);
        }
        if let Some(&d) = self.dist_z.get() {
            let _ = dual.dist_x.set(d);
        }
        if let Some(l) = self.logicals.get() {
            dual.logicals = OnceLock::from(LogicalBasis {
                x: l.z.clone(),
                z: l.x.clone(),
            });
        }
        dual
    }

    pub fn logicals(&self) -> &LogicalBasis {
        self.logicals.get_or_init(|| {
            let z = extend_to_quotient(&self.h_x, &self.h_z);
            let x = extend_to_quotient(&self.h_z, &self.h_x);
            LogicalBasis {
                x: pair_with(&x, &z),
                z,
            }
        })
    }

    /// Coordinates of a Z-type operator in the paired logical basis: bit `i`
    /// says whether `Z̄_i` appears. `None` if `v` is not in `ker(H_X)`.
    pub fn z_logical_coords(&self, v: &BitVec) -> Option<BitVec> {
        assert_eq!(v.len(), self.n, "operator length differs from n");
        if !self.h_x.mul_vec(v).ok()?.is_zero() {
            return None;
        }
        let l = self.logicals();
        Some(BitVec::from_bools(&l.x.iter().map(|x| x.dot(v)).collect::<Vec<_>>()))
    }

    /// Mirror of [`CssCode::z_logical_coords`] for X-type operators.
    pub fn x_logical_coords(&self, v: &BitVec) -> Option<BitVec> {
        assert_eq!(v.len(), self.n, "operator length differs from n");
        if !self.h_z.mul_vec(v).ok()?.is_zero() {
            return None;
        }
        let l = self.logicals();
        Some(BitVec::from_bools(&l.z.iter().map(|z| z.dot(v)).collect::<Vec<_>>()))
    }

    /// Minimum weight of a vector in `ker(H_X) \ rs(H_Z)`.
    ///
    /// Exhaustive when `dim ker(H_X) ≤ 24`; otherwise searches all supports
    /// up to `budget` and, failing that, reports a bounded estimate.
    pub fn min_distance_z(&self, budget: usize) -> Result<DistanceEstimate, CssError> {
        if self.k == 0 {
            return Err(CssError::KIsZero);
        }
        if let Some(&d) = self.dist_z.get() {
            return Ok(d);
        }
        let l = self.logicals();
        let d = min_logical_weight(&self.h_x, &self.h_z, &l.z, &l.x, budget);
        if d.is_exact() {
            let _ = self.dist_z.set(d);
        }
        Ok(d)
    }

    /// Minimum weight of a vector in `ker(H_Z) \ rs(H_X)`.
    pub fn min_distance_x(&self, budget: usize) -> Result<DistanceEstimate, CssError> {
        if self.k == 0 {
            return Err(CssError::KIsZero);
        }
        if let Some(&d) = self.dist_x.get() {
            return Ok(d);
        }
        let l = self.logicals();
        let d = min_logical_weight(&self.h_z, &self.h_x, &l.x, &l.z, budget);
        if d.is_exact() {
            let _ = self.dist_x.set(d);
        }
        Ok(d)
    }

    pub fn min_distance(&self, kind: Pauli, budget: usize) -> Result<DistanceEstimate, CssError> {
        match kind {
            Pauli::X => self.min_distance_x(budget),
            Pauli::Z => self.min_distance_z(budget),
        }
    }

    pub fn to_chain(&self) -> ChainComplex3 {
        ChainComplex3 {
            d2: self.h_z.transpose(),
            d1: self.h_x.clone(),
        }
    }

    pub fn from_chain(chain: &ChainComplex3) -> Result<CssCode, CssError> {
        CssCode::new(chain.d1.clone(), chain.d2.transpose())
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            n: self.n,
            h_x: self.h_x.to_row_strings(),
            h_z: self.h_z.to_row_strings(),
        }
    }

    pub fn from_file(file: &CodeFile) -> Result<CssCode, CssError> {
        let h_x = BitMatrix::from_row_strings(file.n, &file.h_x)?;
        let h_z = BitMatrix::from_row_strings(file.n, &file.h_z)?;
        CssCode::new(h_x, h_z)
    }
}

/// `C2 --∂2--> C1 --∂1--> C0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex3 {
    pub d2: BitMatrix,
    pub d1: BitMatrix,
}

impl ChainComplex3 {
    pub fn new(d2: BitMatrix, d1: BitMatrix) -> Result<Self, CssError> {
        let prod = d1.mul(&d2)?;
        if let Some(&(x_row, z_row)) = prod.nonzero_entries().first() {
            return Err(CssError::CommutationViolation { x_row, z_row });
        }
        Ok(Self { d2, d1 })
    }
}

/// Serialized form of a code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub h_x: Vec<String>,
    pub h_z: Vec<String>,
}

/// Representatives of `ker(kernel_of) / rs(modulo)`, one per quotient dimension.
fn extend_to_quotient(kernel_of: &BitMatrix, modulo: &BitMatrix) -> Vec<BitVec> {
    let mut space = RowSpace::new(modulo);
    let ker = kernel_of.kernel_basis();
    let mut reps = Vec::new();
    for r in 0..ker.rows() {
        let row = ker.row(r);
        if space.insert(&row) {
            reps.push(row);
        }
    }
    reps
}

/// Re-combines `x` so that `x[i] · z[j] = δ_ij`.
fn pair_with(x: &[BitVec], z: &[BitVec]) -> Vec<BitVec> {
    let k = z.len();
    assert_eq!(x.len(), k, "logical counts disagree");
    if k == 0 {
        return Vec::new();
    }
    // Invert the Gram matrix M_ij = x_i·z_j by reducing [M | I].
    let mut aug = BitMatrix::zeros(k, 2 * k);
    for (i, xi) in x.iter().enumerate() {
        for (j, zj) in z.iter().enumerate() {
            aug.set(i, j, xi.dot(zj));
        }
        aug.set(i, k + i, true);
    }
    let rref = aug.rref();
    assert_eq!(
        rref.pivot_cols,
        (0..k).collect::<Vec<_>>(),
        "logical pairing is degenerate"
    );
    let n = x[0].len();
    (0..k)
        .map(|i| {
            let mut acc = BitVec::zeros(n);
            for (j, xj) in x.iter().enumerate() {
                if rref.reduced.get(i, k + j) {
                    acc.xor_assign(xj);
                }
            }
            acc
        })
        .collect()
}

/// Minimum weight over `ker(checks) \ rs(stabs)`.
///
/// `logicals` are representatives of the nontrivial classes and `partners`
/// the dual representatives: a kernel vector is a stabilizer iff it commutes
/// with every partner.
fn min_logical_weight(
    checks: &BitMatrix,
    stabs: &BitMatrix,
    logicals: &[BitVec],
    partners: &[BitVec],
    budget: usize,
) -> DistanceEstimate {
    let n = checks.cols();
    let stab_basis = stabs.rowspace_basis();
    let dim = stab_basis.rows() + logicals.len();
    if dim <= EXHAUSTIVE_KERNEL_DIM {
        let mut basis = stab_basis.row_vecs();
        let first_logical = basis.len();
        basis.extend(logicals.iter().cloned());
        let d = gray_code_min(n, &basis, first_logical);
        return DistanceEstimate::exact(d);
    }
    if let Some(d) = weight_search(checks, partners, budget) {
        return DistanceEstimate::exact(d);
    }
    DistanceEstimate {
        lower: budget + 1,
        upper: greedy_upper_bound(stabs, logicals).max(budget + 1),
    }
}

/// Walks every combination of `basis` in Gray-code order and returns the
/// least weight among those using at least one row at index `≥ first_logical`.
fn gray_code_min(n: usize, basis: &[BitVec], first_logical: usize) -> usize {
    let dim = basis.len();
    let logical_mask: u64 = if dim == first_logical {
        0
    } else {
        (u64::MAX >> (64 - (dim - first_logical))) << first_logical
    };
    let mut acc = BitVec::zeros(n);
    let mut used: u64 = 0;
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << dim) {
        let bit = i.trailing_zeros() as usize;
        acc.xor_assign(&basis[bit]);
        used ^= 1 << bit;
        if used & logical_mask != 0 {
            best = best.min(acc.weight());
        }
    }
    best
}

/// Smallest `w ≤ budget` with a weight-`w` vector in `ker(checks)` that
/// anticommutes with some partner.
fn weight_search(checks: &BitMatrix, partners: &[BitVec], budget: usize) -> Option<usize> {
    let n = checks.cols();
    let cols: Vec<BitVec> = (0..n).map(|c| checks.column(c)).collect();
    // Per qubit, which partners it anticommutes with.
    let pair_bits: Vec<BitVec> = (0..n)
        .map(|q| BitVec::from_bools(&partners.iter().map(|p| p.get(q)).collect::<Vec<_>>()))
        .collect();
    let k = partners.len();
    (1..=budget.min(n)).find(|&w| search_rec(&cols, &pair_bits, w, 0, BitVec::zeros(checks.rows()), BitVec::zeros(k)))
}

fn search_rec(
    cols: &[BitVec],
    pair_bits: &[BitVec],
    remaining: usize,
    start: usize,
    syndrome: BitVec,
    pairing: BitVec,
) -> bool {
    if remaining == 0 {
        return syndrome.is_zero() && !pairing.is_zero();
    }
    (start..=cols.len() - remaining).any(|q| {
        search_rec(
            cols,
            pair_bits,
            remaining - 1,
            q + 1,
            syndrome.xor(&cols[q]),
            pairing.xor(&pair_bits[q]),
        )
    })
}

/// Weight of the lightest logical found by greedily adding stabilizers.
fn greedy_upper_bound(stabs: &BitMatrix, logicals: &[BitVec]) -> usize {
    let rows = stabs.row_vecs();
    logicals
        .iter()
        .map(|l| {
            let mut cur = l.clone();
            loop {
                let better = rows
                    .iter()
                    .map(|s| cur.xor(s))
                    .min_by_key(|c| c.weight())
                    .filter(|c| c.weight() < cur.weight());
                match better {
                    Some(c) => cur = c,
                    None => break cur.weight(),
                }
            }
        })
        .min()
        .unwrap_or(usize::MAX)
}
