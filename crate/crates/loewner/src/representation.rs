//! Type I representations `h(z) = ⟨(A − z_Y)⁻¹α, α⟩` and the one-variable
//! measure form `h(z) = Σ w_j / (t_j − z)`.

use crate::error::{Error, Result};
use crate::numkernel::{
    eig_hermitian, hermitian_defect, solve_shifted, spectral_norm_hermitian, tol_herm, CMatrix,
    CVector, HermitianEigen,
};
use crate::scalar::{cast_c, cast_r, cre, Real, C};

/// Tolerance on the spectrum of `Y` lying in `[0, 1]`.
pub const TOL_EIG: f64 = 1e-10;
/// Allowed negative imaginary part of `h` on `Π²`.
pub const TOL_PICK: f64 = 1e-10;

/// A point of the bi-upper-half-plane `Π²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlanePoint2<T> {
    pub z1: C<T>,
    pub z2: C<T>,
}

impl<T: Real> HalfPlanePoint2<T> {
    pub fn new(z1: C<T>, z2: C<T>) -> Result<Self> {
        if !(z1.im > T::zero() && z2.im > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "point ({z1}, {z2}) is not in the bi-upper-half-plane (Im z1 > 0 and Im z2 > 0)"
            )));
        }
        Ok(HalfPlanePoint2 { z1, z2 })
    }
}

/// A direction `b ∈ (ℝ⁺)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction<T> {
    pub b1: T,
    pub b2: T,
}

impl<T: Real> Direction<T> {
    pub fn new(b1: T, b2: T) -> Result<Self> {
        if !(b1 > T::zero() && b2 > T::zero() && b1.is_finite() && b2.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "direction ({b1}, {b2}) must have b1 > 0 and b2 > 0"
            )));
        }
        Ok(Direction { b1, b2 })
    }

    /// Rescaled so that `b1 + b2 = 1`.
    pub fn normalized(&self) -> Self {
        let s = self.b1 + self.b2;
        Direction {
            b1: self.b1 / s,
            b2: self.b2 / s,
        }
    }

    pub fn min(&self) -> T {
        self.b1.min(self.b2)
    }

    pub fn norm(&self) -> T {
        self.b1.hypot(self.b2)
    }

    pub fn cast<U: Real>(&self) -> Direction<U> {
        Direction {
            b1: cast_r(self.b1),
            b2: cast_r(self.b2),
        }
    }
}

/// A direction with complex entries in the open right half-plane. Rays `isb`
/// along such `b` stay inside `Π²` and approach infinity nontangentially.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexDirection<T> {
    pub b1: C<T>,
    pub b2: C<T>,
}

impl<T: Real> ComplexDirection<T> {
    pub fn new(b1: C<T>, b2: C<T>) -> Result<Self> {
        if !(b1.re > T::zero() && b2.re > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "complex direction ({b1}, {b2}) must have Re b1 > 0 and Re b2 > 0"
            )));
        }
        Ok(ComplexDirection { b1, b2 })
    }

    /// `b1 = u·e^{iψ}`, `b2 = (1−u)·e^{−iψ}` with `|ψ| < π/2`.
    pub fn from_angle(u: T, psi: T) -> Result<Self> {
        let e = C::from_polar(T::one(), psi);
        Self::new(e * u, e.conj() * (T::one() - u))
    }

    pub fn conj(&self) -> Self {
        ComplexDirection {
            b1: self.b1.conj(),
            b2: self.b2.conj(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.b1.im == T::zero() && self.b2.im == T::zero()
    }

    pub fn norm(&self) -> T {
        (self.b1.norm_sqr() + self.b2.norm_sqr()).sqrt()
    }

    pub fn cast<U: Real>(&self) -> ComplexDirection<U> {
        ComplexDirection {
            b1: cast_c(self.b1),
            b2: cast_c(self.b2),
        }
    }
}

impl<T: Real> From<Direction<T>> for ComplexDirection<T> {
    fn from(b: Direction<T>) -> Self {
        ComplexDirection {
            b1: cre(b.b1),
            b2: cre(b.b2),
        }
    }
}

/// Aperture `c` of the cone `‖z‖ ≤ c·min(Im z1, Im z2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NontangentialAperture<T> {
    pub c: T,
}

impl<T: Real> NontangentialAperture<T> {
    pub fn new(c: T) -> Result<Self> {
        if !(c >= T::one()) {
            return Err(Error::InvalidInput(format!("aperture {c} must be >= 1")));
        }
        Ok(NontangentialAperture { c })
    }

    /// Smallest aperture containing the ray `isb`.
    pub fn of_direction(b: &ComplexDirection<T>) -> Self {
        NontangentialAperture {
            c: (b.norm() / b.b1.re.min(b.b2.re)).max(T::one()),
        }
    }

    pub fn contains(&self, z1: C<T>, z2: C<T>) -> bool {
        let norm = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
        norm <= self.c * z1.im.min(z2.im) * (T::one() + T::of(1e-12))
    }
}

/// Anything that can be evaluated on `Π²` and sampled along rays.
pub trait PickFunction<T: Real> {
    fn value(&self, z1: C<T>, z2: C<T>) -> Result<C<T>>;

    /// A scale `σ(b)` such that the expansion at infinity along `isb`
    /// converges for `s > σ(b)`.
    fn ray_scale(&self, b: &ComplexDirection<T>) -> T;
}

/// A finite-dimensional type I representation `(A, Y, α)`.
#[derive(Clone, Debug)]
pub struct TypeIRep<T> {
    a: CMatrix<T>,
    y: CMatrix<T>,
    alpha: CVector<T>,
    y_eigen: HermitianEigen<T>,
    a_norm: T,
}

impl<T: Real> TypeIRep<T> {
    /// Validates `A` Hermitian, `Y` a positive contraction and `α` finite.
    pub fn new(a: CMatrix<T>, y: CMatrix<T>, alpha: CVector<T>) -> Result<Self> {
        let dim = a.dim();
        if dim == 0 {
            return Err(Error::InvalidRep("dim must be positive".into()));
        }
        if y.dim() != dim || alpha.len() != dim {
            return Err(Error::InvalidRep(format!(
                "A is {dim}x{dim} but Y is {0}x{0} and alpha has {1} entries",
                y.dim(),
                alpha.len()
            )));
        }
        if !a.is_finite() || !y.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidRep("entries must be finite".into()));
        }
        let da = hermitian_defect(&a);
        if da > tol_herm(&a) {
            return Err(Error::InvalidRep(format!(
                "A must be Hermitian (defect {:e})", da.to_f64_lossy()
            )));
        }
        let dy = hermitian_defect(&y);
        if dy > tol_herm(&y) {
            return Err(Error::InvalidRep(format!(
                "Y must be Hermitian (defect {:e})", dy.to_f64_lossy()
            )));
        }
        let mut y_eigen = eig_hermitian(&y)?;
        let tol = T::of(TOL_EIG);
        let (lo, hi) = (y_eigen.values[0], y_eigen.values[dim - 1]);
        if lo < -tol || hi > T::one() + tol {
            return Err(Error::InvalidRep(format!(
                "Y must be a positive contraction: spectrum [{lo}, {hi}] is not inside [0, 1]"
            )));
        }
        for v in y_eigen.values.iter_mut() {
            *v = v.max(T::zero()).min(T::one());
        }
        let a_norm = spectral_norm_hermitian(&a)?;
        Ok(TypeIRep {
            a,
            y,
            alpha,
            y_eigen,
            a_norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &CMatrix<T> {
        &self.a
    }

    pub fn y(&self) -> &CMatrix<T> {
        &self.y
    }

    pub fn alpha(&self) -> &CVector<T> {
        &self.alpha
    }

    /// Spectral decomposition of `Y`, eigenvalues clamped to `[0, 1]`.
    pub fn y_eigen(&self) -> &HermitianEigen<T> {
        &self.y_eigen
    }

    /// `‖A‖₂`.
    pub fn a_norm(&self) -> T {
        self.a_norm
    }

    /// Smallest `|y b1 + (1 − y) b2|` over the spectrum of `Y`, i.e. `1/‖b_Y⁻¹‖`.
    pub fn min_weight(&self, b: &ComplexDirection<T>) -> T {
        self.y_eigen
            .values
            .iter()
            .map(|&y| (b.b1 * y + b.b2 * (T::one() - y)).norm())
            .fold(T::infinity(), T::min)
    }

    pub fn cast<U: Real>(&self) -> TypeIRep<U> {
        TypeIRep::new(self.a.cast(), self.y.cast(), self.alpha.cast())
            .expect("a valid representation stays valid under a change of scalar")
    }
}

/// `z_Y = Y z1 + (I − Y) z2`.
pub fn z_weighted<T: Real>(rep: &TypeIRep<T>, z1: C<T>, z2: C<T>) -> CMatrix<T> {
    let y = rep.y();
    CMatrix::from_fn(rep.dim(), |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        y[(i, j)] * z1 + (cre(id) - y[(i, j)]) * z2
    })
}

/// `⟨(A − z_Y)⁻¹α, α⟩` at any `z` where `A − z_Y` is invertible. This is the
/// rational continuation of `h`; [`evaluate`] restricts to `Π²`.
pub fn resolvent_pairing<T: Real>(rep: &TypeIRep<T>, z1: C<T>, z2: C<T>) -> Result<C<T>> {
    let m = rep.a().sub(&z_weighted(rep, z1, z2));
    let x = solve_shifted(&m, rep.alpha())?;
    Ok(x.dot(rep.alpha()))
}

pub fn evaluate<T: Real>(rep: &TypeIRep<T>, z: &HalfPlanePoint2<T>) -> Result<C<T>> {
    resolvent_pairing(rep, z.z1, z.z2)
}

/// Minimal `Im h` over the samples (`+∞` for an empty sample set).
pub fn pick_certificate<T: Real>(rep: &TypeIRep<T>, samples: &[HalfPlanePoint2<T>]) -> Result<T> {
    let mut m = T::infinity();
    for z in samples {
        m = m.min(evaluate(rep, z)?.im);
    }
    Ok(m)
}

impl<T: Real> PickFunction<T> for TypeIRep<T> {
    fn value(&self, z1: C<T>, z2: C<T>) -> Result<C<T>> {
        resolvent_pairing(self, z1, z2)
    }

    fn ray_scale(&self, b: &ComplexDirection<T>) -> T {
        self.a_norm / self.min_weight(b)
    }
}

/// Finite positive measure `Σ w_j δ_{t_j}` on the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<T> {
    atoms: Vec<(T, T)>,
}

impl<T: Real> DiscreteMeasure<T> {
    pub fn new(atoms: Vec<(T, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidRep("measure needs at least one atom".into()));
        }
        for &(t, w) in &atoms {
            if !t.is_finite() || !w.is_finite() || !(w > T::zero()) {
                return Err(Error::InvalidRep(format!(
                    "atom ({t}, {w}) must be finite with positive weight"
                )));
            }
        }
        let mut ts: Vec<T> = atoms.iter().map(|a| a.0).collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if ts.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::InvalidRep("atom locations must be pairwise distinct".into()));
        }
        Ok(DiscreteMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    /// `Σ w_j / (t_j − z)`, summed in atom order.
    pub fn stieltjes(&self, z: C<T>) -> C<T> {
        let mut acc = cre(T::zero());
        for &(t, w) in &self.atoms {
            acc += cre(w) / (cre(t) - z);
        }
        acc
    }

    /// Partial sums `S_J = Σ_{j ≤ J} w_j t_j^k` at the requested prefix lengths.
    pub fn power_sums(&self, k: i32, prefixes: &[usize]) -> Vec<T> {
        let mut out = Vec::with_capacity(prefixes.len());
        let mut acc = T::zero();
        let mut next = 0;
        for (j, &(t, w)) in self.atoms.iter().enumerate() {
            acc += w * t.powi(k);
            while next < prefixes.len() && prefixes[next] == j + 1 {
                out.push(acc);
                next += 1;
            }
        }
        while out.len() < prefixes.len() {
            out.push(acc);
        }
        out
    }

    pub fn power_sum(&self, k: i32) -> T {
        self.power_sums(k, &[self.atoms.len()])[0]
    }

    pub fn cast<U: Real>(&self) -> DiscreteMeasure<U> {
        DiscreteMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|&(t, w)| (cast_r(t), cast_r(w)))
                .collect(),
        }
    }
}

impl<T: Real> PickFunction<T> for DiscreteMeasure<T> {
    fn value(&self, z1: C<T>, _z2: C<T>) -> Result<C<T>> {
        Ok(self.stieltjes(z1))
    }

    fn ray_scale(&self, b: &ComplexDirection<T>) -> T {
        let tmax = self.atoms.iter().fold(T::zero(), |m, a| m.max(a.0.abs()));
        tmax / b.b1.norm()
    }
}

/// `A = diag(t_j)`, `Y = I`, `α_j = √w_j`.
pub fn from_discrete_measure<T: Real>(m: &DiscreteMeasure<T>) -> TypeIRep<T> {
    let ts: Vec<T> = m.atoms.iter().map(|a| a.0).collect();
    let alpha = m.atoms.iter().map(|a| cre(a.1.sqrt())).collect();
    TypeIRep::new(
        CMatrix::real_diag(&ts),
        CMatrix::identity(ts.len()),
        CVector::from_vec(alpha),
    )
    .expect("diagonal measure representation is valid")
}

/// Builds a representation from real diagonal data; handy for oracles.
pub fn diagonal_rep<T: Real>(a: &[f64], y: &[f64], alpha: &[f64]) -> Result<TypeIRep<T>> {
    let conv = |v: &[f64]| v.iter().map(|&x| T::of(x)).collect::<Vec<T>>();
    TypeIRep::new(
        CMatrix::real_diag(&conv(a)),
        CMatrix::real_diag(&conv(y)),
        CVector::from_real(alpha),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn scalar_rep(a: f64) -> TypeIRep<f64> {
        diagonal_rep(&[a], &[1.0], &[1.0]).unwrap()
    }

    #[test]
    fn z_weighted_examples() {
        let rep = diagonal_rep::<f64>(&[0.0; 4], &[1.0, 1.0, 0.3, 1.0], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let (z1, z2) = (c(0.0, 3.0), c(0.0, 7.0));
        let zy = z_weighted(&rep, z1, z2);
        assert_eq!(zy[(0, 0)], z1);
        assert!((zy[(2, 2)] - (z1 * 0.3 + z2 * 0.7)).norm() < 1e-15);
        assert_eq!(zy[(0, 1)], c(0.0, 0.0));

        let zero_y = diagonal_rep::<f64>(&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]).unwrap();
        let zy = z_weighted(&zero_y, z1, z2);
        assert_eq!(zy[(1, 1)], z2);
    }

    #[test]
    fn scalar_evaluations() {
        let z = HalfPlanePoint2::new(c(0.0, 1.0), c(0.0, 2.0)).unwrap();
        assert!((evaluate(&scalar_rep(0.0), &z).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        let z = HalfPlanePoint2::new(c(0.0, 2.0), c(0.0, 1.0)).unwrap();
        assert!((evaluate(&scalar_rep(1.0), &z).unwrap() - c(0.2, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn rejects_invalid_reps() {
        let err = diagonal_rep::<f64>(&[0.0, 0.0], &[1.5, 0.0], &[1.0, 0.0]).unwrap_err();
        assert!(err.to_string().contains("positive contraction"));
        let a = CMatrix::<f64>::from_fn(2, |i, j| if i == j { c(0.0, 0.0) } else { c(0.0, 1.0) });
        let err = TypeIRep::new(a, CMatrix::identity(2), CVector::basis(2, 0)).unwrap_err();
        assert!(err.to_string().contains("Hermitian"));
        assert!(HalfPlanePoint2::new(c(0.0, 1.0), c(1.0, 0.0)).is_err());
        assert!(Direction::new(1.0, 0.0).is_err());
        assert!(DiscreteMeasure::new(vec![(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(DiscreteMeasure::new(vec![(1.0, -1.0)]).is_err());
    }

    #[test]
    fn measure_examples() {
        let m = DiscreteMeasure::new(vec![(0.0, 1.0)]).unwrap();
        let rep = from_discrete_measure(&m);
        let z = c(0.3, 2.0);
        assert!((rep.value(z, c(5.0, 1.0)).unwrap() + c(1.0, 0.0) / z).norm() < 1e-15);

        let m = DiscreteMeasure::new(vec![(1.0, 1.0), (-1.0, 1.0)]).unwrap();
        assert!((m.stieltjes(c(0.0, 1.0)) - c(0.0, 1.0)).norm() < 1e-15);
        let rep = from_discrete_measure(&m);
        let h = evaluate(&rep, &HalfPlanePoint2::new(c(0.0, 1.0), c(0.0, 1.0)).unwrap()).unwrap();
        assert!((h - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn pick_certificate_examples() {
        let z = HalfPlanePoint2::new(c(0.0, 1.0), c(0.0, 1.0)).unwrap();
        assert!((pick_certificate(&scalar_rep(0.0), &[z]).unwrap() - 1.0).abs() < 1e-15);
        let zero = diagonal_rep::<f64>(&[1.0, 2.0], &[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(pick_certificate(&zero, &[z]).unwrap(), 0.0);
    }

    #[test]
    fn aperture_contains_its_ray() {
        let b: ComplexDirection<f64> = Direction::new(1.0, 3.0).unwrap().into();
        let ap = NontangentialAperture::of_direction(&b);
        assert!((ap.c - 10f64.sqrt()).abs() < 1e-14);
        for s in [1.0, 10.0, 1e4] {
            assert!(ap.contains(c(0.0, s), c(0.0, 3.0 * s)));
        }
        let tilted = ComplexDirection::from_angle(0.3, 0.4).unwrap();
        let ap = NontangentialAperture::of_direction(&tilted);
        let (z1, z2) = (c(0.0, 5.0) * tilted.b1, c(0.0, 5.0) * tilted.b2);
        assert!(ap.contains(z1, z2) && z1.im > 0.0 && z2.im > 0.0);
    }

    #[test]
    fn cast_to_binary128_preserves_values() {
        use f128::f128;
        let rep = diagonal_rep::<f64>(&[1.0, -2.0], &[0.25, 1.0], &[0.6, 0.8]).unwrap();
        let wide: TypeIRep<f128> = rep.cast();
        let z = (c(0.5, 1.5), c(-0.25, 2.0));
        let narrow = rep.value(z.0, z.1).unwrap();
        let widened: C<f64> = cast_c(wide.value(cast_c(z.0), cast_c(z.1)).unwrap());
        assert!((narrow - widened).norm() < 1e-15);
    }
}
