//! Homogeneous Laurent polynomials in `1/z1, 1/z2`: evaluation, least-squares
//! fitting and the polynomiality verdict for moments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{scalar_moments_at, vector_moments_at, vector_moments_raw};
use crate::numkernel::{least_squares, CVector};
use crate::representation::{ComplexDirection, Direction, TypeIRep};
use crate::scalar::{cast_c, cre, Real, C};

/// Fits with relative residual at or below this are polynomial.
pub const TOL_POLY: f64 = 1e-8;
/// Fits with relative residual at or above this are not polynomial.
pub const NOT_POLY: f64 = 1e-3;
/// Samples smaller than this fraction of the largest are weighted as if they
/// had this size.
const REL_FLOOR: f64 = 1e-12;
/// Largest rotation of the complex fitting directions away from the real axis.
const PANEL_ANGLE: f64 = 0.45;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex {
    pub n1: usize,
    pub n2: usize,
}

impl MultiIndex {
    pub fn new(n1: usize, n2: usize) -> Self {
        MultiIndex { n1, n2 }
    }

    pub fn degree(&self) -> usize {
        self.n1 + self.n2
    }
}

/// `Σ_{|n| = k} c_n z1^{−n1} z2^{−n2}` with scalar coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousLaurent<T> {
    degree: usize,
    // indexed by n1
    coeffs: Vec<C<T>>,
}

impl<T: Real> HomogeneousLaurent<T> {
    pub fn zero(degree: usize) -> Self {
        HomogeneousLaurent {
            degree,
            coeffs: vec![cre(T::zero()); degree + 1],
        }
    }

    pub fn from_terms(degree: usize, terms: &[(MultiIndex, C<T>)]) -> Result<Self> {
        let mut l = Self::zero(degree);
        for (n, v) in terms {
            if n.degree() != degree {
                return Err(Error::InvalidInput(format!(
                    "multi-index ({}, {}) does not have degree {degree}",
                    n.n1, n.n2
                )));
            }
            l.coeffs[n.n1] += *v;
        }
        Ok(l)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, n: MultiIndex) -> C<T> {
        if n.degree() != self.degree {
            return cre(T::zero());
        }
        self.coeffs[n.n1]
    }

    /// `(n, c_n)` in increasing `n1`.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, C<T>)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(n1, &v)| (MultiIndex::new(n1, self.degree - n1), v))
    }

    pub fn neg(&self) -> Self {
        HomogeneousLaurent {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&v| -v).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn max_imag(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, v| m.max(v.im.abs()))
    }

    pub fn cast<U: Real>(&self) -> HomogeneousLaurent<U> {
        HomogeneousLaurent {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&v| cast_c(v)).collect(),
        }
    }
}

/// Homogeneous layer with vector coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorLaurent<T> {
    degree: usize,
    coeffs: Vec<CVector<T>>,
}

impl<T: Real> VectorLaurent<T> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, n: MultiIndex) -> Option<&CVector<T>> {
        if n.degree() != self.degree {
            return None;
        }
        self.coeffs.get(n.n1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &CVector<T>)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(n1, v)| (MultiIndex::new(n1, self.degree - n1), v))
    }
}

fn monomials<T: Real>(k: usize, z1: C<T>, z2: C<T>) -> Vec<C<T>> {
    let (w1, w2) = (z1.inv(), z2.inv());
    let mut p2 = vec![cre(T::one()); k + 1];
    for j in 1..=k {
        p2[j] = p2[j - 1] * w2;
    }
    let mut out = Vec::with_capacity(k + 1);
    let mut p1 = cre(T::one());
    for n1 in 0..=k {
        out.push(p1 * p2[k - n1]);
        p1 *= w1;
    }
    out
}

fn check_nonzero<T: Real>(z1: C<T>, z2: C<T>) -> Result<()> {
    if z1.norm() == T::zero() || z2.norm() == T::zero() {
        return Err(Error::InvalidInput("Laurent evaluation needs z1 != 0 and z2 != 0".into()));
    }
    Ok(())
}

pub fn eval_laurent<T: Real>(l: &HomogeneousLaurent<T>, z1: C<T>, z2: C<T>) -> Result<C<T>> {
    check_nonzero(z1, z2)?;
    let m = monomials(l.degree, z1, z2);
    Ok(l.coeffs.iter().zip(&m).fold(cre(T::zero()), |acc, (c, p)| acc + *c * *p))
}

pub fn eval_vector_laurent<T: Real>(l: &VectorLaurent<T>, z1: C<T>, z2: C<T>) -> Result<CVector<T>> {
    check_nonzero(z1, z2)?;
    let m = monomials(l.degree, z1, z2);
    let dim = l.coeffs.first().map_or(0, |v| v.len());
    let mut acc = CVector::zeros(dim);
    for (c, p) in l.coeffs.iter().zip(&m) {
        acc = acc.add(&c.scale(*p));
    }
    Ok(acc)
}

/// Outcome of a homogeneous least-squares fit.
#[derive(Clone, Debug)]
pub struct FitResult<T, L> {
    pub coeffs: L,
    /// Root mean square over samples of `|misfit_i| / max(|value_i|, floor_i)`.
    pub relative_residual: T,
    pub sample_count: usize,
    /// Condition estimate of the weighted, column-scaled design.
    pub condition: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PolyVerdict {
    Polynomial,
    NotPolynomial,
    Indeterminate,
}

pub fn is_polynomial<T: Real, L>(fit: &FitResult<T, L>, tol_poly: T) -> bool {
    fit.relative_residual <= tol_poly
}

/// Three-way verdict with a guard band between `tol_poly` and [`NOT_POLY`].
pub fn poly_verdict<T: Real>(relative_residual: T, tol_poly: T) -> PolyVerdict {
    if relative_residual <= tol_poly {
        PolyVerdict::Polynomial
    } else if relative_residual >= T::of(NOT_POLY) {
        PolyVerdict::NotPolynomial
    } else {
        PolyVerdict::Indeterminate
    }
}

struct RawFit<T> {
    // (k+1) × nrhs, row-major
    coeffs: Vec<C<T>>,
    residual: T,
    condition: T,
}

// Relative least squares: each sample row is divided by the size of its value
// (with a floor), so the fit measures relative rather than absolute misfit.
fn fit_core<T: Real>(
    dirs: &[ComplexDirection<T>],
    values: &[C<T>],
    nrhs: usize,
    k: usize,
    floors: Option<&[T]>,
) -> Result<RawFit<T>> {
    let m = dirs.len();
    let cols = k + 1;
    if m < cols {
        return Err(Error::InvalidInput(format!(
            "{m} samples cannot determine the {cols} coefficients of degree {k}"
        )));
    }
    let mags: Vec<T> = (0..m)
        .map(|i| {
            values[i * nrhs..(i + 1) * nrhs]
                .iter()
                .fold(T::zero(), |s, v| s + v.norm_sqr())
                .sqrt()
        })
        .collect();
    let vmax = mags.iter().fold(T::zero(), |a, &b| a.max(b));
    let denom: Vec<T> = (0..m)
        .map(|i| {
            let f = floors.map_or(T::zero(), |f| f[i]);
            mags[i].max(f).max(vmax * T::of(REL_FLOOR))
        })
        .collect();
    if denom.iter().all(|&d| d == T::zero()) {
        return Ok(RawFit {
            coeffs: vec![cre(T::zero()); cols * nrhs],
            residual: T::zero(),
            condition: T::one(),
        });
    }
    let mut design = Vec::with_capacity(m * cols);
    let mut rhs = Vec::with_capacity(m * nrhs);
    let mut raw_rows = Vec::with_capacity(m);
    for i in 0..m {
        let row = monomials(k, dirs[i].b1, dirs[i].b2);
        let w = T::one() / denom[i];
        design.extend(row.iter().map(|&p| p * w));
        rhs.extend(values[i * nrhs..(i + 1) * nrhs].iter().map(|&v| v * w));
        raw_rows.push(row);
    }
    let ls = least_squares(&design, m, cols, &rhs, nrhs);
    if ls.rank < cols {
        return Err(Error::DegenerateDesign {
            rank: ls.rank,
            needed: cols,
            degree: k,
        });
    }
    let mut acc = T::zero();
    for i in 0..m {
        let mut mis = T::zero();
        for c in 0..nrhs {
            let mut fitted = cre(T::zero());
            for (j, p) in raw_rows[i].iter().enumerate() {
                fitted += *p * ls.x[j * nrhs + c];
            }
            mis += (fitted - values[i * nrhs + c]).norm_sqr();
        }
        let r = mis.sqrt() / denom[i];
        acc += r * r;
    }
    Ok(RawFit {
        coeffs: ls.x,
        residual: (acc / T::of_usize(m)).sqrt(),
        condition: ls.condition,
    })
}

/// Least-squares fit of a degree-`k` homogeneous layer to scalar samples.
pub fn fit_homogeneous<T: Real, D>(
    samples: &[(D, C<T>)],
    k: usize,
) -> Result<FitResult<T, HomogeneousLaurent<T>>>
where
    D: Copy + Into<ComplexDirection<T>>,
{
    fit_homogeneous_with_floor(samples, k, None)
}

/// As [`fit_homogeneous`], with a per-sample noise floor below which values
/// are treated as having the floor's size.
pub fn fit_homogeneous_with_floor<T: Real, D>(
    samples: &[(D, C<T>)],
    k: usize,
    floors: Option<&[T]>,
) -> Result<FitResult<T, HomogeneousLaurent<T>>>
where
    D: Copy + Into<ComplexDirection<T>>,
{
    let dirs: Vec<ComplexDirection<T>> = samples.iter().map(|s| s.0.into()).collect();
    let values: Vec<C<T>> = samples.iter().map(|s| s.1).collect();
    let raw = fit_core(&dirs, &values, 1, k, floors)?;
    Ok(FitResult {
        coeffs: HomogeneousLaurent {
            degree: k,
            coeffs: raw.coeffs,
        },
        relative_residual: raw.residual,
        sample_count: samples.len(),
        condition: raw.condition,
    })
}

/// Vector-valued fit sharing one design across components.
pub fn fit_vector_homogeneous<T: Real, D>(
    samples: &[(D, CVector<T>)],
    k: usize,
) -> Result<FitResult<T, VectorLaurent<T>>>
where
    D: Copy + Into<ComplexDirection<T>>,
{
    let dim = samples.first().map_or(0, |s| s.1.len());
    if samples.iter().any(|s| s.1.len() != dim) {
        return Err(Error::InvalidInput("vector samples must share one dimension".into()));
    }
    let dirs: Vec<ComplexDirection<T>> = samples.iter().map(|s| s.0.into()).collect();
    let values: Vec<C<T>> = samples.iter().flat_map(|s| s.1.as_slice().to_vec()).collect();
    let raw = fit_core(&dirs, &values, dim, k, None)?;
    let coeffs = (0..=k)
        .map(|j| CVector::from_vec(raw.coeffs[j * dim..(j + 1) * dim].to_vec()))
        .collect();
    Ok(FitResult {
        coeffs: VectorLaurent { degree: k, coeffs },
        relative_residual: raw.residual,
        sample_count: samples.len(),
        condition: raw.condition,
    })
}

fn chebyshev_u<T: Real>(count: usize) -> Vec<T> {
    let half = T::of(0.5);
    let spread = T::of(0.45);
    (0..count)
        .map(|i| {
            let x = T::PI() * T::of_usize(2 * i + 1) / T::of_usize(2 * count);
            half + spread * x.cos()
        })
        .collect()
}

/// `b = (u, 1 − u)` at Chebyshev-spaced `u ∈ (0.05, 0.95)`.
pub fn chebyshev_directions<T: Real>(count: usize) -> Vec<Direction<T>> {
    chebyshev_u::<T>(count)
        .into_iter()
        .map(|u| Direction {
            b1: u,
            b2: T::one() - u,
        })
        .collect()
}

/// Fitting panel for degree `k`: `2(k+1)` Chebyshev values of `u`, each at the
/// five rotations `ψ ∈ {0, ±0.3375π, ±0.45π}` of `b = (u e^{iψ}, (1−u) e^{−iψ})`.
pub fn fit_panel<T: Real>(k: usize) -> Vec<ComplexDirection<T>> {
    let top = T::of(PANEL_ANGLE) * T::PI();
    let mid = top * T::of(0.75);
    let angles = [T::zero(), top, -top, mid, -mid];
    let mut out = Vec::with_capacity(10 * (k + 1));
    for u in chebyshev_u::<T>(2 * (k + 1)) {
        for &psi in &angles {
            out.push(ComplexDirection::from_angle(u, psi).expect("panel directions lie in the right half-plane"));
        }
    }
    out
}

/// Fit of `r_k` over [`fit_panel`].
pub fn scalar_moment_fit<T: Real>(
    rep: &TypeIRep<T>,
    k: usize,
) -> Result<FitResult<T, HomogeneousLaurent<T>>> {
    let samples = fit_panel::<T>(k)
        .into_iter()
        .map(|b| Ok((b, scalar_moments_at(rep, &b, k)?[k - 1])))
        .collect::<Result<Vec<_>>>()?;
    fit_homogeneous(&samples, k)
}

/// Fit of `R_k` over [`fit_panel`].
pub fn vector_moment_fit<T: Real>(rep: &TypeIRep<T>, k: usize) -> Result<FitResult<T, VectorLaurent<T>>> {
    let samples = fit_panel::<T>(k)
        .into_iter()
        .map(|b| Ok((b, vector_moments_at(rep, &b, k)?.pop().unwrap())))
        .collect::<Result<Vec<_>>>()?;
    fit_vector_homogeneous(&samples, k)
}

/// Largest relative deviation between a fitted vector layer and the direct
/// `z_Y⁻¹(A z_Y⁻¹)^{k−1}α` at complex points with `z1/z2 ∉ (−∞, 0]`.
pub fn complex_extension_check<T: Real>(
    fit: &FitResult<T, VectorLaurent<T>>,
    rep: &TypeIRep<T>,
    k: usize,
    points: &[(C<T>, C<T>)],
) -> Result<T> {
    if fit.coeffs.degree != k {
        return Err(Error::InvalidInput(format!(
            "fit has degree {} but k = {k}",
            fit.coeffs.degree
        )));
    }
    let mut worst = T::zero();
    for &(z1, z2) in points {
        check_nonzero(z1, z2)?;
        let q = z1 / z2;
        if q.im == T::zero() && q.re <= T::zero() {
            return Err(Error::InvalidInput(format!(
                "z1/z2 = {q} lies on the cut (−∞, 0]"
            )));
        }
        let direct = vector_moments_raw(rep, z1, z2, k)?.pop().unwrap();
        let fitted = eval_vector_laurent(&fit.coeffs, z1, z2)?;
        let dev = fitted.sub(&direct).norm() / direct.norm().max(T::min_positive_value());
        worst = worst.max(dev);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{cycle_counterexample, CounterexampleSpec};
    use crate::moments::scalar_moment;
    use crate::representation::diagonal_rep;
    use crate::scalar::c;

    fn real_samples(count: usize, f: impl Fn(f64, f64) -> f64) -> Vec<(Direction<f64>, C<f64>)> {
        chebyshev_directions::<f64>(count)
            .into_iter()
            .map(|b| (b, c(f(b.b1, b.b2), 0.0)))
            .collect()
    }

    #[test]
    fn eval_examples() {
        let l = HomogeneousLaurent::from_terms(1, &[(MultiIndex::new(1, 0), c(1.0, 0.0))]).unwrap();
        let v = eval_laurent(&l, c(0.0, 2.0), c(5.0, 0.0)).unwrap();
        assert!((v - c(0.0, -0.5)).norm() < 1e-16);
        let l = HomogeneousLaurent::from_terms(
            3,
            &[(MultiIndex::new(2, 1), c(3.0, 0.0)), (MultiIndex::new(0, 3), c(-1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(eval_laurent(&l, c(1.0, 0.0), c(1.0, 0.0)).unwrap(), c(2.0, 0.0));
        assert!(HomogeneousLaurent::<f64>::from_terms(2, &[(MultiIndex::new(2, 1), c(1.0, 0.0))]).is_err());
        assert!(eval_laurent(&l, c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn exact_monomials_fit() {
        let fit = fit_homogeneous(&real_samples(12, |b1, _| 2.0 / b1.powi(3)), 3).unwrap();
        assert!(fit.relative_residual <= 1e-12);
        assert!((fit.coeffs.coeff(MultiIndex::new(3, 0)) - c(2.0, 0.0)).norm() < 1e-10);
        for n1 in 0..3 {
            assert!(fit.coeffs.coeff(MultiIndex::new(n1, 3 - n1)).norm() < 1e-9);
        }
        let fit = fit_homogeneous(&real_samples(12, |b1, b2| 1.0 / (b1 * b2)), 2).unwrap();
        assert!(fit.relative_residual <= 1e-12);
        assert!((fit.coeffs.coeff(MultiIndex::new(1, 1)) - c(1.0, 0.0)).norm() < 1e-10);
        assert!(is_polynomial(&fit, TOL_POLY));
    }

    #[test]
    fn wrong_degree_is_rejected() {
        for (k, kk) in [(3, 2), (3, 4), (1, 2), (4, 1)] {
            let samples: Vec<_> = fit_panel::<f64>(kk.max(k))
                .into_iter()
                .map(|b| (b, (b.b1.powi(k as i32 - 1) * b.b2).inv()))
                .collect();
            let fit = fit_homogeneous(&samples, kk).unwrap();
            assert!(fit.relative_residual >= 0.1, "k={k} fitted at {kk}: {}", fit.relative_residual);
        }
    }

    #[test]
    fn identically_zero_data_is_polynomial() {
        let fit = fit_homogeneous(&real_samples(8, |_, _| 0.0), 3).unwrap();
        assert_eq!(fit.relative_residual, 0.0);
        assert_eq!(fit.coeffs.max_abs(), 0.0);
    }

    #[test]
    fn duplicate_directions_are_degenerate() {
        let b = Direction::new(0.3, 0.7).unwrap();
        let samples = vec![(b, c(1.0, 0.0)); 6];
        assert!(matches!(
            fit_homogeneous(&samples, 2),
            Err(Error::DegenerateDesign { .. })
        ));
    }

    #[test]
    fn counterexample_r3_fit_and_eval() {
        let rep = cycle_counterexample::<f64>(&CounterexampleSpec::new(3, 0.5).unwrap());
        let fit = scalar_moment_fit(&rep, 3).unwrap();
        assert!(fit.relative_residual < 1e-12);
        for u in [0.2, 0.5, 0.8] {
            let v = eval_laurent(&fit.coeffs, c(u, 0.0), c(1.0 - u, 0.0)).unwrap();
            assert!((v - c(2.0 / u.powi(3), 0.0)).norm() < 1e-10 * v.norm());
            let r3 = scalar_moment(&rep, &Direction::new(u, 1.0 - u).unwrap(), 3).unwrap();
            assert!((v.re - r3).abs() < 1e-10 * r3);
        }
    }

    #[test]
    fn counterexample_top_moments_are_not_polynomial() {
        let rep = cycle_counterexample::<f64>(&CounterexampleSpec::new(3, 0.5).unwrap());
        let r5 = scalar_moment_fit(&rep, 5).unwrap();
        assert!(r5.relative_residual >= 1e-2, "{}", r5.relative_residual);
        let r3 = vector_moment_fit(&rep, 3).unwrap();
        assert!(r3.relative_residual >= 1e-2, "{}", r3.relative_residual);
        let r2 = vector_moment_fit(&rep, 2).unwrap();
        assert!(r2.relative_residual <= 1e-12);
        let e = r2.coeffs.coeff(MultiIndex::new(2, 0)).unwrap();
        assert!(e.sub(&CVector::from_real(&[0.0, 1.0, 0.0, 1.0])).norm() < 1e-10);
    }

    #[test]
    fn first_failures_for_n4() {
        let rep = cycle_counterexample::<f64>(&CounterexampleSpec::new(4, 0.5).unwrap());
        for k in 1..=6 {
            let fit = scalar_moment_fit(&rep, k).unwrap();
            assert!(is_polynomial(&fit, TOL_POLY), "k={k}: {}", fit.relative_residual);
        }
        let fit = scalar_moment_fit(&rep, 7).unwrap();
        assert_eq!(poly_verdict(fit.relative_residual, TOL_POLY), PolyVerdict::NotPolynomial);
    }

    #[test]
    fn projection_r1_is_exact_degree_one() {
        let rep = diagonal_rep::<f64>(&[0.3, -1.0], &[1.0, 0.0], &[0.6, 0.8]).unwrap();
        let fit = vector_moment_fit(&rep, 1).unwrap();
        assert!(fit.relative_residual <= 1e-10);
        let e1 = fit.coeffs.coeff(MultiIndex::new(1, 0)).unwrap();
        let e2 = fit.coeffs.coeff(MultiIndex::new(0, 1)).unwrap();
        assert!(e1.sub(&CVector::from_real(&[0.6, 0.0])).norm() < 1e-12);
        assert!(e2.sub(&CVector::from_real(&[0.0, 0.8])).norm() < 1e-12);
        let dev = complex_extension_check(&fit, &rep, 1, &[(c(0.0, 1.0), c(1.0, 1.0))]).unwrap();
        assert!(dev <= 1e-12);
    }

    #[test]
    fn complex_extension_examples() {
        let rep = cycle_counterexample::<f64>(&CounterexampleSpec::new(3, 0.5).unwrap());
        let fit = vector_moment_fit(&rep, 2).unwrap();
        let dev = complex_extension_check(&fit, &rep, 2, &[(c(1.0, 2.0), c(3.0, -1.0))]).unwrap();
        assert!(dev <= 1e-9, "{dev}");

        let rep = diagonal_rep::<f64>(&[0.7], &[1.0], &[1.0]).unwrap();
        for k in 1..4 {
            let fit = vector_moment_fit(&rep, k).unwrap();
            let pts = [(c(0.3, -2.0), c(1.0, 1.0)), (c(-1.0, 0.5), c(2.0, 0.0))];
            assert!(complex_extension_check(&fit, &rep, k, &pts).unwrap() <= 1e-12);
        }
        assert!(complex_extension_check(&fit, &rep, 1, &[(c(-1.0, 0.0), c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn real_data_gives_real_coefficients() {
        let fit = fit_homogeneous(&real_samples(16, |b1, b2| 3.0 / b1.powi(2) - 0.5 / (b1 * b2) + 1.0 / (b1 + b2)), 2).unwrap();
        assert!(fit.coeffs.max_imag() <= 1e-12);
    }
}
