//! Dense complex linear algebra: matrices, vectors, LU solves, Hermitian
//! eigendecomposition and a small Householder least-squares solver.

use crate::error::{Error, Result};
use crate::scalar::{abs1, cast_c, cre, Real, C};

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

/// Complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector<T> {
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![C::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = cre(T::one());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("matrix must have dim >= 1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        let m = CMatrix { dim, data };
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(m)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| cre(T::of(x))).collect())
                .collect(),
        )
    }

    pub fn diag(entries: &[C<T>]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn real_diag(entries: &[T]) -> Self {
        let e: Vec<C<T>> = entries.iter().map(|&x| cre(x)).collect();
        Self::diag(&e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn mul_vec(&self, v: &CVector<T>) -> CVector<T> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        let data = (0..self.dim)
            .map(|i| {
                let mut acc = cre(T::zero());
                for (a, x) in self.row(i).iter().zip(v.as_slice()) {
                    acc += *a * *x;
                }
                acc
            })
            .collect();
        CVector { data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        Self::from_fn(n, |i, j| {
            let mut acc = cre(T::zero());
            for k in 0..n {
                acc += self[(i, k)] * other[(k, j)];
            }
            acc
        })
    }

    pub fn scale(&self, s: C<T>) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn norm_max(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn norm_fro(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt()
    }

    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| cast_c(z)).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> CVector<T> {
    pub fn zeros(dim: usize) -> Self {
        CVector {
            data: vec![cre(T::zero()); dim],
        }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[i] = cre(T::one());
        v
    }

    pub fn from_vec(data: Vec<C<T>>) -> Self {
        CVector { data }
    }

    pub fn from_real(values: &[f64]) -> Self {
        CVector {
            data: values.iter().map(|&x| cre(T::of(x))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `⟨self, other⟩ = Σ self_i · conj(other_i)`, summed in ascending index order.
    pub fn dot(&self, other: &Self) -> C<T> {
        assert_eq!(self.len(), other.len(), "vector dimension mismatch");
        let mut acc = cre(T::zero());
        for (x, y) in self.data.iter().zip(&other.data) {
            acc += *x * y.conj();
        }
        acc
    }

    pub fn norm_sqr(&self) -> T {
        self.data.iter().fold(T::zero(), |s, z| s + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn norm_max(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        CVector {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "vector dimension mismatch");
        CVector {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "vector dimension mismatch");
        CVector {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        CVector {
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> CVector<U> {
        CVector {
            data: self.data.iter().map(|&z| cast_c(z)).collect(),
        }
    }
}

impl<T> std::ops::Index<usize> for CVector<T> {
    type Output = C<T>;
    fn index(&self, i: usize) -> &C<T> {
        &self.data[i]
    }
}

impl<T> std::ops::IndexMut<usize> for CVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut C<T> {
        &mut self.data[i]
    }
}

/// LU factorization with partial pivoting, `P·M = L·U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(m: &CMatrix<T>) -> Result<Self> {
        let n = m.dim();
        let scale = m.norm_max();
        let threshold = T::of_usize(n) * T::epsilon() * scale;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut p = col;
            let mut best = abs1(lu[(col, col)]);
            for r in col + 1..n {
                let v = abs1(lu[(r, col)]);
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= threshold || best == T::zero() {
                return Err(Error::SingularMatrix {
                    column: col,
                    pivot: best.to_f64_lossy(),
                    threshold: threshold.to_f64_lossy(),
                });
            }
            if p != col {
                for j in 0..n {
                    lu.data.swap(col * n + j, p * n + j);
                }
                perm.swap(col, p);
            }
            let pivot = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / pivot;
                if factor == cre(T::zero()) {
                    continue;
                }
                lu[(r, col)] = factor;
                for j in col + 1..n {
                    let u = lu[(col, j)];
                    lu[(r, j)] -= factor * u;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, rhs: &CVector<T>) -> CVector<T> {
        let n = self.lu.dim();
        assert_eq!(rhs.len(), n, "rhs dimension mismatch");
        let mut x: Vec<C<T>> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        CVector::from_vec(x)
    }
}

/// Solves `M x = rhs` by partial-pivot Gaussian elimination.
pub fn solve_shifted<T: Real>(m: &CMatrix<T>, rhs: &CVector<T>) -> Result<CVector<T>> {
    if m.dim() != rhs.len() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: rhs.len(),
        });
    }
    Ok(Lu::factor(m)?.solve(rhs))
}

/// `max_ij |M_ij − conj(M_ji)|`.
pub fn hermitian_defect<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.dim();
    let mut d = T::zero();
    for i in 0..n {
        for j in i..n {
            d = d.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    d
}

pub fn tol_herm<T: Real>(m: &CMatrix<T>) -> T {
    T::of(1e-12) * (T::one() + m.norm_max())
}

/// Spectral decomposition `M = V diag(values) V*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Eigenvectors as columns.
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V diag(g(λ)) V*` for a scalar function of the eigenvalues.
    pub fn apply_fn(&self, g: impl Fn(T) -> C<T>) -> CMatrix<T> {
        let n = self.values.len();
        let gv: Vec<C<T>> = self.values.iter().map(|&l| g(l)).collect();
        CMatrix::from_fn(n, |i, j| {
            let mut acc = cre(T::zero());
            for k in 0..n {
                acc += self.vectors[(i, k)] * gv[k] * self.vectors[(j, k)].conj();
            }
            acc
        })
    }
}

/// Cyclic complex Jacobi eigensolver.
pub fn eig_hermitian<T: Real>(m: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    let defect = hermitian_defect(m);
    let tol = tol_herm(m);
    if defect > tol {
        return Err(Error::NotHermitian {
            defect: defect.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }
    let n = m.dim();
    let half = T::of(0.5);
    // symmetrize so that rounding-level defects do not leak into the rotations
    let mut a = CMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * half);
    let mut v = CMatrix::identity(n);
    let total = a.norm_fro();
    let stop = T::epsilon() * total;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let e = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (mag + mag);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = t * cs;
                let ce = cre(cs);
                let se = e * sn;
                let sec = e.conj() * sn;
                // columns: A ← A G with G = [[c, s e], [−s ē, c]]
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * ce - akq * sec;
                    a[(k, q)] = akp * se + akq * ce;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * ce - vkq * sec;
                    v[(k, q)] = vkp * se + vkq * ce;
                }
                // rows: A ← G* A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * ce - aqk * se;
                    a[(q, k)] = apk * sec + aqk * ce;
                }
                a[(p, q)] = cre(T::zero());
                a[(q, p)] = cre(T::zero());
                a[(p, p)] = cre(a[(p, p)].re);
                a[(q, q)] = cre(a[(q, q)].re);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |r, k| v[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn spectral_norm_hermitian<T: Real>(m: &CMatrix<T>) -> Result<T> {
    let e = eig_hermitian(m)?;
    Ok(e.values.iter().fold(T::zero(), |acc, l| acc.max(l.abs())))
}

/// Solution of a dense least-squares problem `min ‖A X − B‖_F`.
#[derive(Clone, Debug)]
pub(crate) struct LeastSquares<T> {
    /// `cols × nrhs`, row-major.
    pub x: Vec<C<T>>,
    pub rank: usize,
    /// Ratio of extreme diagonal entries of R, a cheap condition estimate.
    pub condition: T,
}

/// Householder QR least squares. `a` is `rows × cols`, `b` is `rows × nrhs`,
/// both row-major. Columns are scaled to unit norm before factoring.
pub(crate) fn least_squares<T: Real>(
    a: &[C<T>],
    rows: usize,
    cols: usize,
    b: &[C<T>],
    nrhs: usize,
) -> LeastSquares<T> {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows * nrhs);
    let mut q = a.to_vec();
    let mut rhs = b.to_vec();
    let mut colscale = vec![T::one(); cols];
    for (j, sc) in colscale.iter_mut().enumerate() {
        let nrm = (0..rows)
            .fold(T::zero(), |s, i| s + q[i * cols + j].norm_sqr())
            .sqrt();
        if nrm > T::zero() {
            *sc = nrm;
            for i in 0..rows {
                q[i * cols + j] /= nrm;
            }
        }
    }
    let steps = cols.min(rows);
    for j in 0..steps {
        let norm_x = (j..rows)
            .fold(T::zero(), |s, i| s + q[i * cols + j].norm_sqr())
            .sqrt();
        if norm_x == T::zero() {
            continue;
        }
        let x0 = q[j * cols + j];
        let phase = if x0.norm() == T::zero() {
            cre(T::one())
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;
        let mut v: Vec<C<T>> = (j..rows).map(|i| q[i * cols + j]).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::of(2.0);
        for jj in j..cols {
            let mut d = cre(T::zero());
            for (off, vi) in v.iter().enumerate() {
                d += vi.conj() * q[(j + off) * cols + jj];
            }
            let f = d * two / vnorm2;
            for (off, vi) in v.iter().enumerate() {
                q[(j + off) * cols + jj] -= *vi * f;
            }
        }
        for c in 0..nrhs {
            let mut d = cre(T::zero());
            for (off, vi) in v.iter().enumerate() {
                d += vi.conj() * rhs[(j + off) * nrhs + c];
            }
            let f = d * two / vnorm2;
            for (off, vi) in v.iter().enumerate() {
                rhs[(j + off) * nrhs + c] -= *vi * f;
            }
        }
    }
    let diag: Vec<T> = (0..steps).map(|j| q[j * cols + j].norm()).collect();
    let dmax = diag.iter().fold(T::zero(), |m, &d| m.max(d));
    let dmin = diag.iter().fold(T::infinity(), |m, &d| m.min(d));
    let rank_tol = dmax * T::of_usize(rows.max(cols) * 100) * T::epsilon();
    let rank = diag.iter().filter(|&&d| d > rank_tol).count();
    let mut x = vec![cre(T::zero()); cols * nrhs];
    if rank == cols {
        for c in 0..nrhs {
            for i in (0..cols).rev() {
                let mut acc = rhs[i * nrhs + c];
                for j in i + 1..cols {
                    acc -= q[i * cols + j] * x[j * nrhs + c];
                }
                x[i * nrhs + c] = acc / q[i * cols + i];
            }
        }
        for (i, sc) in colscale.iter().enumerate() {
            for c in 0..nrhs {
                x[i * nrhs + c] /= *sc;
            }
        }
    }
    LeastSquares {
        x,
        rank,
        condition: if dmin > T::zero() {
            dmax / dmin
        } else {
            T::infinity()
        },
    }
}
