//! Vector moments `R_k(b) = (b_Y⁻¹A)^{k−1} b_Y⁻¹α`, the auxiliary vectors
//! `β_k = X_b^k b_Y^{−1/2}α` and scalar moments `r_k(b)`.

use crate::error::{Error, Result};
use crate::numkernel::{CMatrix, CVector, Lu};
use crate::representation::{z_weighted, ComplexDirection, Direction, PickFunction, TypeIRep};
use crate::scalar::{cre, i_pow, Real, C};

pub const TOL_REAL: f64 = 1e-10;
pub const TOL_TEL: f64 = 1e-9;

fn check_order(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("moment order k must be >= 1".into()));
    }
    Ok(())
}

/// `b_Y = Y b1 + (I − Y) b2`.
pub fn b_y<T: Real>(rep: &TypeIRep<T>, b: &ComplexDirection<T>) -> CMatrix<T> {
    z_weighted(rep, b.b1, b.b2)
}

pub fn weighted_inverse_apply<T: Real>(
    rep: &TypeIRep<T>,
    b: &Direction<T>,
    v: &CVector<T>,
) -> Result<CVector<T>> {
    let by = b_y(rep, &(*b).into());
    Ok(Lu::factor(&by)?.solve(v))
}

/// `R_1(b), …, R_kmax(b)` for a direction with entries in the right half-plane.
/// For non-real `b` this is the holomorphic extension of the real moments.
pub fn vector_moments_at<T: Real>(
    rep: &TypeIRep<T>,
    b: &ComplexDirection<T>,
    kmax: usize,
) -> Result<Vec<CVector<T>>> {
    vector_moments_raw(rep, b.b1, b.b2, kmax)
}

/// `z_Y⁻¹(A z_Y⁻¹)^{k−1}α` for `k = 1..=kmax` at any `z` with `z_Y` invertible.
pub fn vector_moments_raw<T: Real>(
    rep: &TypeIRep<T>,
    z1: C<T>,
    z2: C<T>,
    kmax: usize,
) -> Result<Vec<CVector<T>>> {
    let lu = Lu::factor(&z_weighted(rep, z1, z2))?;
    let mut out = Vec::with_capacity(kmax);
    if kmax == 0 {
        return Ok(out);
    }
    out.push(lu.solve(rep.alpha()));
    for k in 1..kmax {
        let next = lu.solve(&rep.a().mul_vec(&out[k - 1]));
        out.push(next);
    }
    Ok(out)
}

pub fn vector_moment_at<T: Real>(
    rep: &TypeIRep<T>,
    b: &ComplexDirection<T>,
    k: usize,
) -> Result<CVector<T>> {
    check_order(k)?;
    Ok(vector_moments_at(rep, b, k)?.pop().unwrap())
}

pub fn vector_moment<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>, k: usize) -> Result<CVector<T>> {
    vector_moment_at(rep, &(*b).into(), k)
}

/// `r_1(b), …, r_kmax(b)` with `r_k(b) = ⟨R_⌈k/2⌉(b), A R_⌊k/2⌋(b̄)⟩` and
/// `A R_0 := α`. For real `b` these are the scalar moments.
pub fn scalar_moments_at<T: Real>(
    rep: &TypeIRep<T>,
    b: &ComplexDirection<T>,
    kmax: usize,
) -> Result<Vec<C<T>>> {
    let top = kmax.div_ceil(2);
    let r = vector_moments_at(rep, b, top)?;
    let rbar = if b.is_real() {
        r.clone()
    } else {
        vector_moments_at(rep, &b.conj(), kmax / 2)?
    };
    let ar: Vec<CVector<T>> = rbar.iter().map(|v| rep.a().mul_vec(v)).collect();
    Ok((1..=kmax)
        .map(|k| {
            let lo = k / 2;
            let right = if lo == 0 { rep.alpha() } else { &ar[lo - 1] };
            r[k.div_ceil(2) - 1].dot(right)
        })
        .collect())
}

pub fn scalar_moment_at<T: Real>(rep: &TypeIRep<T>, b: &ComplexDirection<T>, k: usize) -> Result<C<T>> {
    check_order(k)?;
    Ok(scalar_moments_at(rep, b, k)?[k - 1])
}

fn real_part_checked<T: Real>(k: usize, v: C<T>) -> Result<T> {
    if v.im.abs() > T::of(TOL_REAL) * (T::one() + v.re.abs()) {
        return Err(Error::NotReal {
            k,
            re: v.re.to_f64_lossy(),
            im: v.im.to_f64_lossy(),
        });
    }
    Ok(v.re)
}

pub fn scalar_moments<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>, kmax: usize) -> Result<Vec<T>> {
    scalar_moments_at(rep, &(*b).into(), kmax)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| real_part_checked(i + 1, v))
        .collect()
}

pub fn scalar_moment<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>, k: usize) -> Result<T> {
    check_order(k)?;
    Ok(scalar_moments(rep, b, k)?[k - 1])
}

/// `b_Y^{−1/2}` from the spectral decomposition of `Y`, with the eigenvalues
/// of `b_Y` floored at `min(b1, b2)·(1 − 1e−12)`.
pub fn weighted_inverse_sqrt<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>) -> CMatrix<T> {
    let floor = b.min() * (T::one() - T::of(1e-12));
    rep.y_eigen().apply_fn(|y| {
        let w = (b.b1 * y + b.b2 * (T::one() - y)).max(floor);
        cre(T::one() / w.sqrt())
    })
}

/// `X_b = b_Y^{−1/2} A b_Y^{−1/2}`.
pub fn x_b<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>) -> CMatrix<T> {
    let s = weighted_inverse_sqrt(rep, b);
    s.matmul(rep.a()).matmul(&s)
}

/// `β_k(b)` together with its index and direction.
#[derive(Clone, Debug)]
pub struct BetaVector<T> {
    pub k: usize,
    pub value: CVector<T>,
    pub b: Direction<T>,
}

/// `β_0, …, β_kmax`.
pub fn beta_sequence<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>, kmax: usize) -> Vec<CVector<T>> {
    let x = x_b(rep, b);
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(weighted_inverse_sqrt(rep, b).mul_vec(rep.alpha()));
    for k in 0..kmax {
        let next = x.mul_vec(&out[k]);
        out.push(next);
    }
    out
}

pub fn beta<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>, k: usize) -> BetaVector<T> {
    BetaVector {
        k,
        value: beta_sequence(rep, b, k).pop().unwrap(),
        b: *b,
    }
}

/// `r_k(b)` through the β-vectors: `‖β_{j−1}‖²` for `k = 2j − 1` and
/// `⟨β_{j−1}, X_b β_{j−1}⟩` for `k = 2j`.
pub fn scalar_moment_via_beta<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>, k: usize) -> Result<T> {
    check_order(k)?;
    let j = k.div_ceil(2);
    let betas = beta_sequence(rep, b, j);
    let v = if k % 2 == 1 {
        cre(betas[j - 1].norm_sqr())
    } else {
        betas[j - 1].dot(&betas[j])
    };
    real_part_checked(k, v)
}

/// Both sides of the telescoping identity at `z = isb`.
#[derive(Clone, Copy, Debug)]
pub struct TelescopeCheck<T> {
    /// `h(isb) + Σ_{k ≤ 2N−1} r_k(isb)`.
    pub lhs: C<T>,
    /// `(is)^{−2(N−1)} ⟨[(X_b − is)⁻¹ + (is)⁻¹] β_{N−1}, β_{N−1}⟩`.
    pub rhs: C<T>,
    pub residual: T,
    /// Residual over `|h| + Σ |r_k(isb)| + |rhs|`.
    pub relative: T,
}

pub fn telescope<T: Real>(
    rep: &TypeIRep<T>,
    b: &Direction<T>,
    s: T,
    n: usize,
) -> Result<TelescopeCheck<T>> {
    check_order(n)?;
    if !(s > T::zero()) {
        return Err(Error::InvalidInput(format!("scale s = {s} must be positive")));
    }
    let is = C::new(T::zero(), s);
    let h = rep.value(is * b.b1, is * b.b2)?;
    let moments = scalar_moments(rep, b, 2 * n - 1)?;
    let mut lhs = h;
    let mut scale = h.norm();
    let mut pow = cre(T::one());
    for r in &moments {
        pow /= is;
        let term = pow * *r;
        lhs += term;
        scale += term.norm();
    }
    let betas = beta_sequence(rep, b, n - 1);
    let top = &betas[n - 1];
    let shifted = x_b(rep, b).sub(&CMatrix::identity(rep.dim()).scale(is));
    let resolved = Lu::factor(&shifted)?.solve(top);
    let inner = resolved.dot(top) + cre(top.norm_sqr()) / is;
    let k = 2 * (n as i64 - 1);
    let rhs = inner * i_pow::<T>(-k) / s.powi(k as i32);
    let residual = (lhs - rhs).norm();
    scale += rhs.norm();
    let relative = if scale > T::zero() {
        residual / scale
    } else {
        T::zero()
    };
    Ok(TelescopeCheck {
        lhs,
        rhs,
        residual,
        relative,
    })
}

/// `|LHS − RHS|` of the telescoping identity.
pub fn telescope_residual<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>, s: T, n: usize) -> Result<T> {
    Ok(telescope(rep, b, s, n)?.residual)
}
