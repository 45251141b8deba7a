//! Library results against exhaustive enumeration on small random inputs.

use std::collections::HashSet;

use hommeas::csscode::CssCode;
use hommeas::f2la::{subspace_leq, BitMatrix, BitVec, RowSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, rng.gen_bool(0.4));
        }
    }
    m
}

fn as_mask(v: &BitVec) -> u32 {
    v.support().fold(0, |acc, i| acc | 1 << i)
}

/// Every vector in the row space, as bitmasks.
fn span(m: &BitMatrix) -> HashSet<u32> {
    let rows: Vec<u32> = (0..m.rows()).map(|r| as_mask(&m.row(r))).collect();
    (0u32..1 << rows.len())
        .map(|sel| {
            rows.iter()
                .enumerate()
                .filter(|(i, _)| sel >> i & 1 == 1)
                .fold(0, |acc, (_, r)| acc ^ r)
        })
        .collect()
}

fn syndrome_zero(h: &BitMatrix, v: u32) -> bool {
    (0..h.rows()).all(|r| (as_mask(&h.row(r)) & v).count_ones().is_multiple_of(2))
}

fn random_code(rng: &mut ChaCha8Rng) -> Option<CssCode> {
    let n = rng.gen_range(3..=12);
    let rows = rng.gen_range(0..n / 2 + 1);
    let h_x = random_matrix(rng, rows, n);
    let ker = h_x.kernel_basis();
    let z_rows = rng.gen_range(0..=ker.rows().min(5));
    let rows: Vec<BitVec> = (0..z_rows)
        .map(|_| {
            let mut v = BitVec::zeros(n);
            for r in 0..ker.rows() {
                if rng.gen_bool(0.5) {
                    v.xor_assign(&ker.row(r));
                }
            }
            v
        })
        .collect();
    let code = CssCode::new(h_x, BitMatrix::from_rows(n, &rows)).ok()?;
    (code.k() > 0).then_some(code)
}

#[test]
fn distances_match_full_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 50 {
        let Some(code) = random_code(&mut rng) else { continue };
        let n = code.n();
        let stabs = span(code.h_z());
        let brute_z = (1u32..1 << n)
            .filter(|&v| syndrome_zero(code.h_x(), v) && !stabs.contains(&v))
            .map(|v| v.count_ones() as usize)
            .min()
            .expect("k > 0");
        let est = code.min_distance_z(n).unwrap();
        assert_eq!(est.value(), Some(brute_z), "code {checked}: {:?}", code.to_file());

        let x_stabs = span(code.h_x());
        let brute_x = (1u32..1 << n)
            .filter(|&v| syndrome_zero(code.h_z(), v) && !x_stabs.contains(&v))
            .map(|v| v.count_ones() as usize)
            .min()
            .unwrap();
        assert_eq!(code.min_distance_x(n).unwrap().value(), Some(brute_x));

        let rank_x = x_stabs.len().trailing_zeros() as usize;
        let rank_z = stabs.len().trailing_zeros() as usize;
        assert_eq!(code.k(), n - rank_x - rank_z);
        checked += 1;
    }
}

#[test]
fn subspace_operations_match_spans() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let cols = rng.gen_range(1..=12);
        let (ra, rb) = (rng.gen_range(0..6), rng.gen_range(0..6));
        let a = random_matrix(&mut rng, ra, cols);
        let b = random_matrix(&mut rng, rb, cols);
        let (sa, sb) = (span(&a), span(&b));
        assert_eq!(1usize << a.rank(), sa.len());
        assert_eq!(subspace_leq(&a, &b).unwrap(), sa.is_subset(&sb));
        let space = RowSpace::new(&b);
        for v in 0u32..1 << cols {
            let bv = BitVec::from_support(cols, (0..cols).filter(|i| v >> i & 1 == 1));
            assert_eq!(space.contains(&bv), sb.contains(&v));
        }
        let ker = a.kernel_basis();
        let kernel_size = (0u32..1 << cols).filter(|&v| syndrome_zero(&a, v)).count();
        assert_eq!(1usize << ker.rows(), kernel_size);
    }
}
