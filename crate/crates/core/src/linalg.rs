//! Fixed-size 4×4 complex matrices.
//!
//! Every matrix in this crate acts on `(ĉ, ĉ†, â, â†)`, so a plain
//! array-backed type is all we need.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

pub const N: usize = 4;

pub type Vec4 = [C64; N];

/// Index permutation exchanging each operator with its adjoint
/// (`ĉ ↔ ĉ†`, `â ↔ â†`).
pub const ADJOINT_SWAP: [usize; N] = [1, 0, 3, 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[C64; N]; N]);

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[C64::new(0.0, 0.0); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m[(i, j)] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    pub fn diag(d: Vec4) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m[(i, i)] = d[i];
        }
        m
    }

    /// Builds a matrix whose `k`-th column is `cols[k]`.
    pub fn from_columns(cols: &[Vec4; N]) -> Self {
        let mut m = Self::zeros();
        for (k, col) in cols.iter().enumerate() {
            for i in 0..N {
                m[(i, k)] = col[i];
            }
        }
        m
    }

    pub fn column(&self, k: usize) -> Vec4 {
        std::array::from_fn(|i| self[(i, k)])
    }

    pub fn transpose(&self) -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self[(j, i)])))
    }

    pub fn conj(&self) -> Self {
        Mat4(self.0.map(|row| row.map(|z| z.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat4(self.0.map(|row| row.map(|z| z * s)))
    }

    /// `S·A·S` with `S` the adjoint-swap permutation.
    pub fn swap_adjoint(&self) -> Self {
        let p = ADJOINT_SWAP;
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self[(p[i], p[j])])))
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &Vec4) -> Vec4 {
        std::array::from_fn(|i| (0..N).map(|j| self[(i, j)] * v[j]).sum())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..N)
            .map(|j| (0..N).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let mut a = self.0;
        let mut det = C64::new(1.0, 0.0);
        for k in 0..N {
            let p = (k..N)
                .max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))
                .unwrap();
            if a[p][k].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for i in k + 1..N {
                let f = a[i][k] / a[k][k];
                for j in k..N {
                    let t = a[k][j];
                    a[i][j] -= f * t;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting. `None` if
    /// a pivot vanishes exactly.
    pub fn inverse(&self) -> Option<Mat4> {
        let mut a = self.0;
        let mut inv = Mat4::identity().0;
        for k in 0..N {
            let p = (k..N)
                .max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))
                .unwrap();
            if a[p][k].norm() == 0.0 {
                return None;
            }
            a.swap(p, k);
            inv.swap(p, k);
            let piv = a[k][k].inv();
            for j in 0..N {
                a[k][j] *= piv;
                inv[k][j] *= piv;
            }
            for i in 0..N {
                if i == k {
                    continue;
                }
                let f = a[i][k];
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..N {
                    let (akj, ikj) = (a[k][j], inv[k][j]);
                    a[i][j] -= f * akj;
                    inv[i][j] -= f * ikj;
                }
            }
        }
        Some(Mat4(inv))
    }

    /// A vector spanning (approximately) the null space of a rank-3 matrix,
    /// from elimination with complete pivoting. The smallest pivot is left
    /// for last and its variable set to one.
    pub fn null_vector(&self) -> Vec4 {
        let mut a = self.0;
        let mut cols: [usize; N] = [0, 1, 2, 3];
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        // rank actually found before the remaining block is negligible
        let mut rank = N - 1;
        for k in 0..N - 1 {
            let (mut pi, mut pj, mut best) = (k, k, -1.0);
            for i in k..N {
                for j in k..N {
                    let v = a[i][j].norm();
                    if v > best {
                        (pi, pj, best) = (i, j, v);
                    }
                }
            }
            if best <= scale * 1e-14 {
                rank = k;
                break;
            }
            a.swap(pi, k);
            if pj != k {
                for row in a.iter_mut() {
                    row.swap(pj, k);
                }
                cols.swap(pj, k);
            }
            for i in k + 1..N {
                let f = a[i][k] / a[k][k];
                for j in k..N {
                    let t = a[k][j];
                    a[i][j] -= f * t;
                }
            }
        }

        // free variables beyond the rank: last one set to 1, the rest 0
        let mut y = [C64::new(0.0, 0.0); N];
        y[N - 1] = C64::new(1.0, 0.0);
        for k in (0..rank).rev() {
            let s: C64 = (k + 1..N).map(|j| a[k][j] * y[j]).sum();
            y[k] = -s / a[k][k];
        }
        let mut v = [C64::new(0.0, 0.0); N];
        for (k, &c) in cols.iter().enumerate() {
            v[c] = y[k];
        }
        v
    }
}

pub fn vec_norm(v: &Vec4) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl Index<(usize, usize)> for Mat4 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..N).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
        }))
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self[(i, j)] + rhs[(i, j)])))
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self[(i, j)] - rhs[(i, j)])))
    }
}
