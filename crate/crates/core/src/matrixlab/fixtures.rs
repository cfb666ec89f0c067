use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::TruncatedMatrix;
use crate::error::{Error, Result};

/// The `n×n` section of the one-sided unitary shift: column 0 is
/// `(1/√2, 1/√2, 0, …)` and column `j ≥ 1` has a 1 in row `j + 1`.
///
/// Indices are 0-based here; entry `(UU*)₁₁` in 1-based notation is
/// `row_inner(0, 0)`. The last column loses its entry to the truncation and
/// is the only non-interior column; every row is complete.
pub fn shift_fixture(n: usize) -> Result<TruncatedMatrix> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "shift fixture needs n >= 3, got {n}"
        )));
    }
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut columns = vec![vec![(0, h), (1, h)]];
    for j in 1..n {
        columns.push(if j + 1 < n {
            vec![(j + 1, one)]
        } else {
            Vec::new()
        });
    }
    let mut m = TruncatedMatrix::from_columns(n, columns)?;
    m.interior_cols = (0..n - 1).collect();
    Ok(m)
}

/// Square matrix with random complex entries on the band `|r - c| <= bandwidth`.
pub fn random_banded(n: usize, bandwidth: usize, seed: u64) -> TruncatedMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = (0..n)
        .map(|c| {
            let lo = c.saturating_sub(bandwidth);
            let hi = (c + bandwidth + 1).min(n);
            (lo..hi)
                .map(|r| {
                    (
                        r,
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )
                })
                .collect()
        })
        .collect();
    TruncatedMatrix::from_columns(n, columns).expect("band stays in range")
}

/// How a generated banded unitary is turned into a column isometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsometryShape {
    /// The square unitary itself.
    Unitary,
    /// `k` zero rows spliced in at random positions; rows keep norm 0 or 1.
    ZeroRows(usize),
    /// `k` random columns removed; some rows end up with norm strictly
    /// between 0 and 1.
    DroppedColumns(usize),
}

fn random_two_by_two(rng: &mut ChaCha8Rng) -> [[Complex64; 2]; 2] {
    let theta: f64 = rng.gen_range(0.1..PI / 2.0 - 0.1);
    let (phi, psi, chi): (f64, f64, f64) = (
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(0.0..2.0 * PI),
    );
    let g = Complex64::from_polar(1.0, chi);
    [
        [
            g * Complex64::from_polar(theta.cos(), phi),
            g * Complex64::from_polar(theta.sin(), psi),
        ],
        [
            -g * Complex64::from_polar(theta.sin(), -psi),
            g * Complex64::from_polar(theta.cos(), -phi),
        ],
    ]
}

/// Brickwork of `layers` random 2×2 unitaries on neighbouring rows of an
/// `n×n` identity, reshaped according to `shape`. Bandwidth is at most
/// `layers`.
pub fn random_banded_isometry(
    n: usize,
    layers: usize,
    shape: IsometryShape,
    seed: u64,
) -> Result<TruncatedMatrix> {
    if n < 2 {
        return Err(Error::Precondition(
            "isometry generator needs n >= 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = Complex64::default();
    let mut u: Vec<Vec<Complex64>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    if r == c {
                        Complex64::new(1.0, 0.0)
                    } else {
                        zero
                    }
                })
                .collect()
        })
        .collect();
    for layer in 0..layers {
        let mut i = layer % 2;
        while i + 1 < n {
            let g = random_two_by_two(&mut rng);
            let (top, bottom) = u.split_at_mut(i + 1);
            for (x, y) in top[i].iter_mut().zip(bottom[0].iter_mut()) {
                let (a, b) = (*x, *y);
                *x = g[0][0] * a + g[0][1] * b;
                *y = g[1][0] * a + g[1][1] * b;
            }
            i += 2;
        }
    }
    let dense = match shape {
        IsometryShape::Unitary => u,
        IsometryShape::ZeroRows(k) => {
            let total = n + k;
            let zeros = sample(&mut rng, total, k).into_vec();
            let mut rows = u.into_iter();
            (0..total)
                .map(|r| {
                    if zeros.contains(&r) {
                        vec![zero; n]
                    } else {
                        rows.next().expect("n rows remain")
                    }
                })
                .collect()
        }
        IsometryShape::DroppedColumns(k) => {
            if k >= n {
                return Err(Error::Precondition(format!(
                    "cannot drop {k} of {n} columns"
                )));
            }
            let drop = sample(&mut rng, n, k).into_vec();
            u.into_iter()
                .map(|row| {
                    row.into_iter()
                        .enumerate()
                        .filter(|(c, _)| !drop.contains(c))
                        .map(|(_, v)| v)
                        .collect()
                })
                .collect()
        }
    };
    TruncatedMatrix::from_dense(&dense)
}
