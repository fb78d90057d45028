//! Matrix permanents.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Largest matrix accepted by [`permanent`].
pub const PERMANENT_CAP: usize = 16;

/// Ryser's formula, visiting column subsets in Gray-code order so that each
/// step updates the row sums by a single column.
pub fn permanent(a: &CMatrix) -> Result<Complex64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    if n > PERMANENT_CAP {
        return Err(Error::ScaleCap {
            what: "permanent size",
            cap: PERMANENT_CAP,
            got: n,
        });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray = 0u32;
    for step in 1u32..(1 << n) {
        let next = step ^ (step >> 1);
        let changed = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << changed) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += a[(i, changed)];
            } else {
                *s -= a[(i, changed)];
            }
        }
        gray = next;
        let product: Complex64 = row_sums.iter().product();
        // (-1)^{n - |S|}
        if (n - next.count_ones() as usize).is_multiple_of(2) {
            total += product;
        } else {
            total -= product;
        }
    }
    Ok(total)
}

/// Sum over all permutations; a reference for small matrices.
pub fn permanent_brute_force(a: &CMatrix) -> Complex64 {
    fn recurse(a: &CMatrix, row: usize, used: &mut [bool], acc: Complex64) -> Complex64 {
        if row == a.nrows() {
            return acc;
        }
        let mut total = Complex64::new(0.0, 0.0);
        for col in 0..a.ncols() {
            if !used[col] {
                used[col] = true;
                total += recurse(a, row + 1, used, acc * a[(row, col)]);
                used[col] = false;
            }
        }
        total
    }
    let mut used = vec![false; a.ncols()];
    recurse(a, 0, &mut used, Complex64::new(1.0, 0.0))
}
