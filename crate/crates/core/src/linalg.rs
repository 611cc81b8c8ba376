//! Dense linear algebra for small dimensions.
//!
//! Everything here targets `n <= 8`-ish matrices that appear in polytope
//! geometry: determinants for simplex volumes, inverses for frame solves,
//! Householder QR for orthogonal sampling, and Newton's polar iteration for
//! snapping near-rotations back onto the orthogonal group.

use crate::scalar::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

pub fn norm<T: Real>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

pub fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `a += s * b` in place.
pub fn axpy<T: Real>(a: &mut [T], s: T, b: &[T]) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x += s * y;
    }
}

pub fn normalized<T: Real>(a: &[T]) -> Option<Vec<T>> {
    let n = norm(a);
    if n <= T::epsilon().sqrt() * T::of(1e-3) {
        return None;
    }
    Some(scale(a, T::one() / n))
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for i in 0..r {
                m.data[i * c + j] = col[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `self^T * v` without materializing the transpose.
    pub fn tr_matvec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j] += self.at(i, j) * v[i];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.at(i, j);
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, s: T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * s).collect() }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix<T>) -> T {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Determinant by LU with partial pivoting. Square only.
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = T::one();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in (k + 1)..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == T::zero() {
                return T::zero();
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                if f == T::zero() {
                    continue;
                }
                for j in k..n {
                    let v = a[k * n + j];
                    a[i * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan with partial pivoting; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix<T>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Matrix::<T>::identity(n).data;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in (k + 1)..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best <= T::of(1e-300) {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                    inv.swap(k * n + j, piv * n + j);
                }
            }
            let pivot = a[k * n + k];
            let inv_pivot = T::one() / pivot;
            for j in 0..n {
                a[k * n + j] *= inv_pivot;
                inv[k * n + j] *= inv_pivot;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i * n + k];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let av = a[k * n + j];
                    let iv = inv[k * n + j];
                    a[i * n + j] -= f * av;
                    inv[i * n + j] -= f * iv;
                }
            }
        }
        Some(Matrix { rows: n, cols: n, data: inv })
    }

    /// Solves `self * x = b` for square systems; `None` when singular.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        self.inverse().map(|inv| inv.matvec(b))
    }

    /// Householder QR of a square matrix: returns `(q, r)` with `q`
    /// orthogonal, `r` upper triangular, and `q * r == self`.
    pub fn qr(&self) -> (Matrix<T>, Matrix<T>) {
        assert!(self.is_square());
        let n = self.rows;
        let mut r = self.clone();
        let mut q = Matrix::<T>::identity(n);
        for k in 0..n.saturating_sub(1) {
            let mut v: Vec<T> = (k..n).map(|i| r.at(i, k)).collect();
            let alpha = norm(&v);
            if alpha <= T::of(1e-300) {
                continue;
            }
            let sign = if v[0] >= T::zero() { T::one() } else { -T::one() };
            v[0] += sign * alpha;
            let vnorm = norm(&v);
            if vnorm <= T::of(1e-300) {
                continue;
            }
            for x in v.iter_mut() {
                *x /= vnorm;
            }
            // r <- (I - 2 v v^T) r, applied to the trailing block
            for j in k..n {
                let mut s = T::zero();
                for i in k..n {
                    s += v[i - k] * r.at(i, j);
                }
                let s2 = s + s;
                for i in k..n {
                    let newv = r.at(i, j) - s2 * v[i - k];
                    r.set(i, j, newv);
                }
            }
            // q <- q (I - 2 v v^T)
            for i in 0..n {
                let mut s = T::zero();
                for j in k..n {
                    s += q.at(i, j) * v[j - k];
                }
                let s2 = s + s;
                for j in k..n {
                    let newv = q.at(i, j) - s2 * v[j - k];
                    q.set(i, j, newv);
                }
            }
        }
        (q, r)
    }

    /// `max |Q^T Q - I|`; zero for exactly orthogonal matrices.
    pub fn orthogonality_residual(&self) -> T {
        assert!(self.is_square());
        let gram = self.transpose().matmul(self);
        gram.max_abs_diff(&Matrix::identity(self.rows))
    }

    /// Nearest orthogonal matrix (polar factor) via Newton iteration
    /// `Q <- (Q + Q^{-T}) / 2`; `None` when the input is singular.
    pub fn polar_orthogonal(&self) -> Option<Matrix<T>> {
        assert!(self.is_square());
        let mut q = self.clone();
        let half = T::of(0.5);
        for _ in 0..60 {
            let inv_t = q.inverse()?.transpose();
            let next = q.add(&inv_t).scaled(half);
            let step = next.max_abs_diff(&q);
            q = next;
            if step <= T::epsilon() * T::of(4.0) {
                break;
            }
        }
        Some(q)
    }

    /// Rotation by `angle` in the `(i, j)` coordinate plane.
    pub fn plane_rotation(n: usize, i: usize, j: usize, angle: T) -> Matrix<T> {
        assert!(i < n && j < n && i != j);
        let mut m = Matrix::<T>::identity(n);
        let (s, c) = angle.sin_cos();
        m.set(i, i, c);
        m.set(j, j, c);
        m.set(i, j, -s);
        m.set(j, i, s);
        m
    }
}

/// Gram-Schmidt orthonormalization with rank detection.
///
/// Returns an orthonormal basis of the span; vectors whose residual after
/// projection falls below `tol` are discarded.
pub fn orthonormalize<T: Real>(vectors: &[Vec<T>], tol: T) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        // re-orthogonalize twice for numerical hygiene
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&r, b);
                axpy(&mut r, -c, b);
            }
        }
        let n = norm(&r);
        if n > tol {
            basis.push(scale(&r, T::one() / n));
        }
    }
    basis
}

/// A unit vector orthogonal to every vector of `basis` (which must be
/// orthonormal with `basis.len() == dim - 1`).
pub fn orthogonal_complement_unit<T: Real>(basis: &[Vec<T>], dim: usize) -> Option<Vec<T>> {
    debug_assert!(basis.len() + 1 == dim);
    let mut best: Option<Vec<T>> = None;
    let mut best_norm = T::zero();
    for k in 0..dim {
        let mut e = vec![T::zero(); dim];
        e[k] = T::one();
        for _ in 0..2 {
            for b in basis {
                let c = dot(&e, b);
                axpy(&mut e, -c, b);
            }
        }
        let n = norm(&e);
        if n > best_norm {
            best_norm = n;
            best = Some(scale(&e, T::one() / n));
        }
    }
    // Some coordinate axis always has residual >= 1/sqrt(dim) against an
    // (dim-1)-dimensional subspace, so this only fails on broken input.
    if best_norm > T::of(1e-8) {
        best
    } else {
        None
    }
}
