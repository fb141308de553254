//! Dense 3×3 complex linear solves.

use num_complex::Complex64;

pub type Matrix3 = [[Complex64; 3]; 3];

/// LU factorization with partial pivoting of a 3×3 complex matrix.
#[derive(Debug, Clone)]
pub struct Lu3 {
    lu: Matrix3,
    perm: [usize; 3],
}

impl Lu3 {
    /// Returns `None` when a pivot is exactly zero.
    pub fn factor(mut a: Matrix3) -> Option<Self> {
        let mut perm = [0, 1, 2];
        for k in 0..3 {
            let pivot = (k..3)
                .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
                .unwrap_or(k);
            if a[pivot][k].norm() == 0.0 {
                return None;
            }
            if pivot != k {
                a.swap(pivot, k);
                perm.swap(pivot, k);
            }
            let pivot_row = a[k];
            for row in a.iter_mut().skip(k + 1) {
                let factor = row[k] / pivot_row[k];
                row[k] = factor;
                for (x, p) in row.iter_mut().zip(pivot_row.iter()).skip(k + 1) {
                    *x -= factor * p;
                }
            }
        }
        Some(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[Complex64; 3]) -> [Complex64; 3] {
        let lu = &self.lu;
        let mut y = [Complex64::new(0.0, 0.0); 3];
        for i in 0..3 {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= lu[i][j] * y[j];
            }
            y[i] = s;
        }
        let mut x = [Complex64::new(0.0, 0.0); 3];
        for i in (0..3).rev() {
            let mut s = y[i];
            for j in i + 1..3 {
                s -= lu[i][j] * x[j];
            }
            x[i] = s / lu[i][i];
        }
        x
    }

    /// Explicit inverse, column by column.
    pub fn inverse(&self) -> Matrix3 {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut inv = [[zero; 3]; 3];
        for col in 0..3 {
            let mut e = [zero; 3];
            e[col] = one;
            let x = self.solve(&e);
            for row in 0..3 {
                inv[row][col] = x[row];
            }
        }
        inv
    }
}

/// Maximum absolute column sum.
pub fn norm1(a: &Matrix3) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// 1-norm condition number computed from the explicit inverse. Infinite for
/// an exactly singular matrix.
pub fn condition_1(a: &Matrix3) -> f64 {
    match Lu3::factor(*a) {
        Some(lu) => norm1(a) * norm1(&lu.inverse()),
        None => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_permuted_system() {
        // First column has a zero on the diagonal, forcing a row swap.
        let a = [
            [c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)],
            [c(3.0, -1.0), c(0.0, 2.0), c(1.0, 0.0)],
            [c(1.0, 0.0), c(1.0, 0.0), c(0.0, -4.0)],
        ];
        let x_true = [c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -1.0)];
        let mut b = [c(0.0, 0.0); 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += a[i][j] * x_true[j];
            }
        }
        let x = Lu3::factor(a).unwrap().solve(&b);
        for k in 0..3 {
            assert!((x[k] - x_true[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = [
            [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
            [c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ];
        assert!(Lu3::factor(a).is_none());
        assert!(condition_1(&a).is_infinite());
    }

    #[test]
    fn identity_condition_is_one() {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let a = [[o, z, z], [z, o, z], [z, z, o]];
        assert_eq!(condition_1(&a), 1.0);
    }
}
