//! Example representations: the cyclic-walk counterexample family, heavy-tailed
//! measures, seeded random representations and quasi-random sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numkernel::{CMatrix, CVector};
use crate::representation::{DiscreteMeasure, Direction, HalfPlanePoint2, TypeIRep};
use crate::scalar::{c, cre, Real, C};

/// Parameters of the counterexample on `ℓ²(ℤ_{2(n−1)})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexampleSpec {
    pub n: usize,
    pub t: f64,
}

impl CounterexampleSpec {
    pub fn new(n: usize, t: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("n = {n} must be >= 2")));
        }
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidInput(format!("t = {t} must lie in (0, 1]")));
        }
        Ok(CounterexampleSpec { n, t })
    }

    pub fn dim(&self) -> usize {
        2 * (self.n - 1)
    }
}

/// `A = π(1) + π(−1)` on the cycle of length `2(n−1)`, `Y = I` except
/// `Y e_{n−1} = t e_{n−1}`, `α = e_0`.
pub fn cycle_counterexample<T: Real>(spec: &CounterexampleSpec) -> TypeIRep<T> {
    let m = spec.dim();
    let mut a = CMatrix::zeros(m);
    for i in 0..m {
        a[((i + 1) % m, i)] += cre(T::one());
        a[((i + m - 1) % m, i)] += cre(T::one());
    }
    let mut y = vec![T::one(); m];
    y[spec.n - 1] = T::of(spec.t);
    TypeIRep::new(a, CMatrix::real_diag(&y), CVector::basis(m, 0))
        .expect("counterexample is a valid representation")
}

/// `b1^{−k} Σ_l C(k−1, l) e_{−(k−1)+2l}`, valid for `1 ≤ k < n`.
#[allow(non_snake_case)]
pub fn counterexample_R_closed_form<T: Real>(
    spec: &CounterexampleSpec,
    k: usize,
    b: &Direction<T>,
) -> Result<CVector<T>> {
    if k == 0 {
        return Err(Error::InvalidInput("moment order k must be >= 1".into()));
    }
    if k >= spec.n {
        return Err(Error::OrderTooHigh { k, n: spec.n });
    }
    let m = spec.dim() as i64;
    let mut v = CVector::zeros(spec.dim());
    let mut binom = T::one();
    for l in 0..k {
        let idx = (-(k as i64 - 1) + 2 * l as i64).rem_euclid(m) as usize;
        v[idx] += cre(binom);
        binom = binom * T::of_usize(k - 1 - l) / T::of_usize(l + 1);
    }
    Ok(v.scale(cre(T::one() / b.b1.powi(k as i32))))
}

/// Atoms `(j, j^{−p})` for `j = 1..=cutoff`.
pub fn heavy_tail_measure<T: Real>(p: f64, cutoff: usize) -> Result<DiscreteMeasure<T>> {
    if !(p > 1.0) || cutoff == 0 {
        return Err(Error::InvalidInput(format!(
            "heavy tail needs p > 1 and a positive cutoff (got p = {p}, cutoff = {cutoff})"
        )));
    }
    DiscreteMeasure::new(
        (1..=cutoff)
            .map(|j| {
                let t = T::of_usize(j);
                (t, t.powf(T::of(-p)))
            })
            .collect(),
    )
}

/// `A = (G + G*)/2` with `G` complex Gaussian, `Y` diagonal with uniform
/// entries in `[0, 1]`, `α` Gaussian with `‖α‖ = 1`. Deterministic per seed.
pub fn random_rep(dim: usize, seed: u64) -> Result<TypeIRep<f64>> {
    if dim == 0 {
        return Err(Error::InvalidInput("dim must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let g: Vec<C<f64>> = (0..dim * dim).map(|_| c(normal(), normal())).collect();
    let a = CMatrix::from_fn(dim, |i, j| (g[i * dim + j] + g[j * dim + i].conj()) * 0.5);
    let mut alpha: Vec<C<f64>> = (0..dim).map(|_| c(normal(), normal())).collect();
    let norm = alpha.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in alpha.iter_mut() {
        *z /= norm;
    }
    let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..=1.0)).collect();
    TypeIRep::new(a, CMatrix::real_diag(&y), CVector::from_vec(alpha))
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points in `Π²`: real parts spread over `[−10, 10]`, imaginary parts
/// log-uniform over `[10⁻², 10²]`.
pub fn halton_points(count: usize) -> Vec<HalfPlanePoint2<f64>> {
    (1..=count as u64)
        .map(|i| {
            let re1 = 20.0 * radical_inverse(i, 2) - 10.0;
            let im1 = 10f64.powf(4.0 * radical_inverse(i, 3) - 2.0);
            let re2 = 20.0 * radical_inverse(i, 5) - 10.0;
            let im2 = 10f64.powf(4.0 * radical_inverse(i, 7) - 2.0);
            HalfPlanePoint2::new(c(re1, im1), c(re2, im2)).expect("imaginary parts are positive")
        })
        .collect()
}
