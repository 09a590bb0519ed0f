//! Shared helpers for the integration suites: an exact rational rank
//! oracle for integer matrices and seeded random test-case generators.

#![allow(dead_code)]
// The elimination inner loop reads the pivot row while writing another.
#![allow(clippy::needless_range_loop)]

use lumpsys::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reduced fraction over i128. The matrices fed to the oracle have small
/// integer entries, so elimination stays far from overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction {
    num: i128,
    den: i128,
}

impl Fraction {
    pub fn new(num: i128, den: i128) -> Self {
        assert_ne!(den, 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i128;
        Fraction {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Fraction {
            num: n as i128,
            den: 1,
        }
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn sub(self, other: Fraction) -> Fraction {
        Fraction::new(
            self.num * other.den - other.num * self.den,
            self.den * other.den,
        )
    }

    pub fn mul(self, other: Fraction) -> Fraction {
        Fraction::new(self.num * other.num, self.den * other.den)
    }

    pub fn div(self, other: Fraction) -> Fraction {
        assert!(!other.is_zero(), "division by zero");
        Fraction::new(self.num * other.den, self.den * other.num)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact rank of an integer matrix by fraction-free-in-spirit Gaussian
/// elimination over the rationals. No tolerances anywhere.
pub fn rational_rank(rows: usize, cols: usize, entries: &[i64]) -> usize {
    assert_eq!(entries.len(), rows * cols);
    let mut m: Vec<Vec<Fraction>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| Fraction::from_int(entries[i * cols + j]))
                .collect()
        })
        .collect();

    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot_row) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let pivot = m[rank][col];
        for r in rank + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(pivot);
            for c in col..cols {
                m[r][c] = m[r][c].sub(factor.mul(m[rank][c]));
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer matrix with entries drawn uniformly from `[lo, hi]`.
pub fn random_int_entries(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..rows * cols).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Product of random `rows x rank` and `rank x cols` integer factors, so the
/// rank is at most `rank` by construction.
pub fn random_low_rank_entries(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    rank: usize,
) -> Vec<i64> {
    let left = random_int_entries(rng, rows, rank, -3, 3);
    let right = random_int_entries(rng, rank, cols, -3, 3);
    let mut out = vec![0i64; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            out[i * cols + j] = (0..rank)
                .map(|k| left[i * rank + k] * right[k * cols + j])
                .sum();
        }
    }
    out
}

pub fn int_matrix(rows: usize, cols: usize, entries: &[i64]) -> Matrix {
    Matrix::new(
        rows,
        cols,
        entries.iter().map(|&x| x as f64).collect(),
    )
    .unwrap()
}

/// Random symmetric generator with nonnegative off-diagonal exchange
/// weights and column sums exactly zero, the structure the lumping and
/// M-matrix machinery is aimed at.
pub fn random_symmetric_compartmental(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            // Leave some pairs unconnected, but keep the chain backbone so
            // the graph stays connected.
            let w = if j == i + 1 || rng.gen_bool(0.4) {
                rng.gen_range(1..=5) as f64 * 0.25
            } else {
                0.0
            };
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
    }
    for j in 0..n {
        let off: f64 = (0..n).filter(|&i| i != j).map(|i| a[(i, j)]).sum();
        a[(j, j)] = -off;
    }
    a
}

/// Random nonsingular integer mixing matrix, validated by the exact oracle.
pub fn random_mix(rng: &mut ChaCha8Rng, l: usize) -> Matrix {
    loop {
        let entries = random_int_entries(rng, l, l, -3, 3);
        if rational_rank(l, l, &entries) == l {
            return int_matrix(l, l, &entries);
        }
    }
}

#[cfg(test)]
mod self_tests {
    use super::*;

    #[test]
    fn fractions_reduce() {
        assert_eq!(Fraction::new(2, 4), Fraction::new(1, 2));
        assert_eq!(Fraction::new(1, -2), Fraction::new(-1, 2));
        assert_eq!(Fraction::new(-3, -6), Fraction::new(1, 2));
        assert!(Fraction::new(0, 7).is_zero());
    }

    #[test]
    fn oracle_on_hand_matrices() {
        assert_eq!(rational_rank(2, 2, &[1, 0, 0, 1]), 2);
        assert_eq!(rational_rank(2, 2, &[1, 2, 2, 4]), 1);
        assert_eq!(rational_rank(3, 3, &[0; 9]), 0);
        assert_eq!(rational_rank(2, 3, &[1, 2, 3, 4, 5, 6]), 2);
        // Rank 2 by a dependency only fractions catch exactly:
        // row3 = row1/3 + row2/3.
        assert_eq!(rational_rank(3, 3, &[1, 2, 0, 2, 1, 0, 1, 1, 0]), 2);
    }

    #[test]
    fn low_rank_products_respect_the_bound() {
        let mut rng = seeded_rng(7);
        for _ in 0..50 {
            let r = rng.gen_range(0..=3);
            let e = random_low_rank_entries(&mut rng, 5, 4, r);
            assert!(rational_rank(5, 4, &e) <= r);
        }
    }
}
