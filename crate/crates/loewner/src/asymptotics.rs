//! Behaviour along nontangential rays `z = isb`: sampling, limits by
//! extrapolation, growth exponents and the order-by-order residue ladder.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{eval_laurent, fit_homogeneous_with_floor, fit_panel, HomogeneousLaurent, TOL_POLY};
use crate::moments::scalar_moments;
use crate::representation::{ComplexDirection, Direction, NontangentialAperture, PickFunction, TypeIRep};
use crate::scalar::{c, cre, i_pow, Real, C};

pub const TOL_LIMIT: f64 = 1e-6;
/// Slopes at or below this are bounded.
pub const SLOPE_BOUNDED: f64 = 0.1;
/// Slopes at or above this are unbounded.
pub const SLOPE_UNBOUNDED: f64 = 0.4;

pub const DEFAULT_S0: f64 = 10.0;
pub const DEFAULT_RATIO: f64 = 2.0;
pub const DEFAULT_LEVELS: usize = 20;

/// Highest Neville column consulted by [`estimate_limit`].
const MAX_EXTRAPOLATION_ORDER: usize = 10;
/// Ray-scaled grids start at this multiple of [`PickFunction::ray_scale`].
const LADDER_X0: f64 = 3.0;
const LADDER_RATIO: f64 = 1.5;
const LADDER_LEVELS: usize = 24;
/// Ladder fits treat limit values as uncertain up to this multiple of their
/// extrapolation error plus one ulp of the layer's natural size.
const LIMIT_FLOOR_FACTOR: f64 = 1e10;
/// Rounding in the remainder functional is taken to be at most this many ulps
/// of the largest term.
const NOISE_ULPS: f64 = 1e3;
const O_NOISE_ULPS: f64 = 4.0;

/// Geometric grid `s_j = s0·r^j`, `j = 0..=J`, along the ray `isb`.
#[derive(Clone, Debug)]
pub struct RayGrid<T> {
    b: ComplexDirection<T>,
    s0: T,
    ratio: T,
    levels: usize,
}

impl<T: Real> RayGrid<T> {
    pub fn new(b: impl Into<ComplexDirection<T>>, s0: T, ratio: T, levels: usize) -> Result<Self> {
        if !(s0 > T::zero()) || !s0.is_finite() {
            return Err(Error::InvalidInput(format!("grid start s0 = {s0} must be positive")));
        }
        if !(ratio > T::one()) || !ratio.is_finite() {
            return Err(Error::InvalidInput(format!("grid ratio {ratio} must exceed 1")));
        }
        if levels < 4 {
            return Err(Error::InvalidInput(format!("grid needs J >= 4 levels, got {levels}")));
        }
        Ok(RayGrid {
            b: b.into(),
            s0,
            ratio,
            levels,
        })
    }

    /// `s0 = 10`, `r = 2`, `J = 20`.
    pub fn standard(b: impl Into<ComplexDirection<T>>) -> Self {
        Self::new(b, T::of(DEFAULT_S0), T::of(DEFAULT_RATIO), DEFAULT_LEVELS).expect("defaults are valid")
    }

    /// Grid from `s_min` to `s_max` inclusive with `levels + 1` points.
    pub fn window(b: impl Into<ComplexDirection<T>>, s_min: T, s_max: T, levels: usize) -> Result<Self> {
        if !(s_max > s_min) {
            return Err(Error::InvalidInput(format!("window [{s_min}, {s_max}] is empty")));
        }
        let ratio = (s_max / s_min).powf(T::one() / T::of_usize(levels.max(1)));
        Self::new(b, s_min, ratio, levels)
    }

    /// Grid starting at `x0` times the ray scale of `f` along `b`, so that the
    /// expansion at infinity converges on every node.
    pub fn scaled<F: PickFunction<T> + ?Sized>(
        f: &F,
        b: impl Into<ComplexDirection<T>>,
        x0: T,
        ratio: T,
        levels: usize,
    ) -> Result<Self> {
        let b = b.into();
        Self::new(b, x0 * natural_scale(f, &b), ratio, levels)
    }

    pub fn b(&self) -> &ComplexDirection<T> {
        &self.b
    }

    pub fn s0(&self) -> T {
        self.s0
    }

    pub fn ratio(&self) -> T {
        self.ratio
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn s_values(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.levels + 1);
        let mut s = self.s0;
        for _ in 0..=self.levels {
            out.push(s);
            s *= self.ratio;
        }
        out
    }

    /// `(i s b1, i s b2)`.
    pub fn point(&self, s: T) -> (C<T>, C<T>) {
        let is = c(T::zero(), s);
        (is * self.b.b1, is * self.b.b2)
    }

    pub fn aperture(&self) -> NontangentialAperture<T> {
        NontangentialAperture::of_direction(&self.b)
    }
}

fn natural_scale<T: Real, F: PickFunction<T> + ?Sized>(f: &F, b: &ComplexDirection<T>) -> T {
    let s = f.ray_scale(b);
    if s > T::zero() && s.is_finite() {
        s
    } else {
        T::one() / b.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitEstimate<T> {
    pub value: C<T>,
    pub error_bound: T,
    pub converged: bool,
}

pub fn sample_ray<T: Real, F: PickFunction<T> + ?Sized>(f: &F, grid: &RayGrid<T>) -> Result<Vec<C<T>>> {
    grid.s_values()
        .into_iter()
        .map(|s| {
            let (z1, z2) = grid.point(s);
            f.value(z1, z2)
        })
        .collect()
}

/// Limit as `s → ∞`, tolerance [`TOL_LIMIT`] relative to `1 + |value|`.
pub fn estimate_limit<T: Real>(grid: &RayGrid<T>, values: &[C<T>]) -> LimitEstimate<T> {
    estimate_limit_scaled(grid, values, T::of(TOL_LIMIT), T::one())
}

/// Neville extrapolation to `1/s = 0`. Every tableau entry of order `k ≥ 1`
/// gets the error estimate `max` of its distances to its two parents; the
/// entry with the smallest estimate wins. Converged iff that estimate is at
/// most `tol·(reference + |value|)`.
pub fn estimate_limit_scaled<T: Real>(
    grid: &RayGrid<T>,
    values: &[C<T>],
    tol: T,
    reference: T,
) -> LimitEstimate<T> {
    let n = values.len().min(grid.levels + 1);
    let not_converged = |v: C<T>| LimitEstimate {
        value: v,
        error_bound: T::infinity(),
        converged: false,
    };
    if n < 2 || values[..n].iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return not_converged(values.last().copied().unwrap_or(cre(T::nan())));
    }
    let w: Vec<T> = grid.s_values().into_iter().take(n).map(|s| T::one() / s).collect();
    let mut prev: Vec<C<T>> = values[..n].to_vec();
    let mut best = (values[n - 1], T::infinity());
    for k in 1..n.min(MAX_EXTRAPOLATION_ORDER + 1) {
        let mut cur = Vec::with_capacity(n - k);
        for j in k..n {
            // prev[j - (k-1) - ...] holds P_{j-k+1..j} at index j-(k-1)
            let upper = prev[j - k + 1];
            let lower = prev[j - k];
            let v = (upper * w[j - k] - lower * w[j]) / (w[j - k] - w[j]);
            let err = (v - upper).norm().max((v - lower).norm());
            if err <= best.1 {
                best = (v, err);
            }
            cur.push(v);
        }
        prev = cur;
    }
    let (value, err) = best;
    LimitEstimate {
        value,
        error_bound: err,
        converged: err <= tol * (reference + value.norm()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundVerdict {
    Bounded,
    Unbounded,
    Indeterminate,
}

pub fn bound_verdict<T: Real>(slope: T) -> BoundVerdict {
    if slope <= T::of(SLOPE_BOUNDED) {
        BoundVerdict::Bounded
    } else if slope >= T::of(SLOPE_UNBOUNDED) {
        BoundVerdict::Unbounded
    } else {
        BoundVerdict::Indeterminate
    }
}

/// Least-squares slope of `log|v_j|` against `log s_j` over the top half of
/// the grid; `−∞` if any of those values vanishes.
pub fn growth_exponent<T: Real>(grid: &RayGrid<T>, values: &[T]) -> T {
    growth_exponent_above(grid, values, &vec![T::zero(); values.len()])
}

/// As [`growth_exponent`], skipping samples with `|v_j| ≤ floor_j`. Fewer
/// than two usable samples in the top half gives `−∞`.
pub fn growth_exponent_above<T: Real>(grid: &RayGrid<T>, values: &[T], floors: &[T]) -> T {
    let s = grid.s_values();
    let n = values.len().min(s.len());
    let start = n / 2;
    let mut pts = Vec::new();
    for j in start..n {
        let v = values[j].abs();
        if v == T::zero() && floors[j] == T::zero() {
            return T::neg_infinity();
        }
        if v > floors[j] {
            pts.push((s[j].ln(), v.ln()));
        }
    }
    if pts.len() < 2 {
        return T::neg_infinity();
    }
    let m = T::of_usize(pts.len());
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / m;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / m;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (x, y) in &pts {
        sxy += (*x - mx) * (*y - my);
        sxx += (*x - mx) * (*x - mx);
    }
    sxy / sxx
}

/// Settings for [`residue_ladder`].
#[derive(Clone, Copy, Debug)]
pub struct LadderConfig {
    /// Grid start as a multiple of the ray scale.
    pub x0: f64,
    /// Absolute grid start; overrides `x0` when set.
    pub s0: Option<f64>,
    pub ratio: f64,
    pub levels: usize,
    pub tol_limit: f64,
    pub tol_poly: f64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            x0: LADDER_X0,
            s0: None,
            ratio: LADDER_RATIO,
            levels: LADDER_LEVELS,
            tol_limit: TOL_LIMIT,
            tol_poly: TOL_POLY,
        }
    }
}

impl LadderConfig {
    pub fn grid<T: Real, F: PickFunction<T> + ?Sized>(
        &self,
        f: &F,
        b: impl Into<ComplexDirection<T>>,
    ) -> Result<RayGrid<T>> {
        match self.s0 {
            Some(s0) => RayGrid::new(b, T::of(s0), T::of(self.ratio), self.levels),
            None => RayGrid::scaled(f, b, T::of(self.x0), T::of(self.ratio), self.levels),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "order")]
pub enum LadderStatus {
    Complete,
    NotConverged(usize),
    NotPolynomialLayer(usize),
}

/// Per-direction diagnostics of one layer.
#[derive(Clone, Debug)]
pub struct DirectionLimit<T> {
    pub b: ComplexDirection<T>,
    pub limit: LimitEstimate<T>,
}

#[derive(Clone, Debug)]
pub struct LadderLayer<T> {
    pub order: usize,
    pub coeffs: HomogeneousLaurent<T>,
    pub fit_residual: T,
    /// Largest extrapolation error relative to the layer's size, plus the fit
    /// residual.
    pub uncertainty: T,
    pub limits_converged: bool,
    pub directions: Vec<DirectionLimit<T>>,
}

/// Residue layers `ρ_n`, `|n| = 1..=depth`, with the reason the ladder stopped.
#[derive(Clone, Debug)]
pub struct ResidueLadder<T> {
    pub layers: Vec<LadderLayer<T>>,
    pub status: LadderStatus,
    /// The layer that stopped the ladder, when one did.
    pub rejected: Option<LadderLayer<T>>,
}

impl<T: Real> ResidueLadder<T> {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Exact layers, e.g. from known moments. Depth is `layers.len()`.
    pub fn from_layers(layers: Vec<HomogeneousLaurent<T>>) -> Result<Self> {
        let mut out = Vec::with_capacity(layers.len());
        for (i, l) in layers.into_iter().enumerate() {
            if l.degree() != i + 1 {
                return Err(Error::InvalidInput(format!(
                    "layer {} has degree {}",
                    i + 1,
                    l.degree()
                )));
            }
            out.push(LadderLayer {
                order: i + 1,
                coeffs: l,
                fit_residual: T::zero(),
                uncertainty: T::zero(),
                limits_converged: true,
                directions: Vec::new(),
            });
        }
        Ok(ResidueLadder {
            layers: out,
            status: LadderStatus::Complete,
            rejected: None,
        })
    }

    /// `Σ_{|n| ≤ upto} ρ_n z^{−n}`.
    pub fn partial_sum(&self, upto: usize, z1: C<T>, z2: C<T>) -> Result<C<T>> {
        let mut acc = cre(T::zero());
        for l in self.layers.iter().take(upto) {
            acc += eval_laurent(&l.coeffs, z1, z2)?;
        }
        Ok(acc)
    }

    /// Whether the limits of layer `m` converged, for accepted and rejected layers alike.
    pub fn limits_converged_at(&self, m: usize) -> Option<bool> {
        if m >= 1 && m <= self.layers.len() {
            return Some(self.layers[m - 1].limits_converged);
        }
        match &self.rejected {
            Some(l) if l.order == m => Some(l.limits_converged),
            _ => None,
        }
    }
}

/// Builds layers `1..=max_order` one at a time. Layer `m` is
/// `L_m(b) = lim (is)^m [f(isb) − Σ_{|n|<m} ρ_n/(isb)^n]`, estimated along the
/// complex directions of [`fit_panel`] and fitted by a degree-`m` layer.
pub fn residue_ladder<T: Real, F: PickFunction<T> + ?Sized>(
    f: &F,
    max_order: usize,
    cfg: &LadderConfig,
) -> Result<ResidueLadder<T>> {
    let mut ladder = ResidueLadder {
        layers: Vec::new(),
        status: LadderStatus::Complete,
        rejected: None,
    };
    let tol = T::of(cfg.tol_limit);
    for m in 1..=max_order {
        let mut samples = Vec::new();
        let mut floors = Vec::new();
        let mut directions = Vec::new();
        let mut all_converged = true;
        let mut worst = T::zero();
        for b in fit_panel::<T>(m) {
            let grid = cfg.grid(f, b)?;
            let fv = sample_ray(f, &grid)?;
            let s = grid.s_values();
            let x0 = (grid.s0() / natural_scale(f, &b)).max(T::one());
            let reference = fv[0].norm() * s[0].powi(m as i32) / x0.powi(m as i32 - 1);
            let mut v = Vec::with_capacity(s.len());
            for (j, &sj) in s.iter().enumerate() {
                let (z1, z2) = grid.point(sj);
                let rem = fv[j] - ladder.partial_sum(m - 1, z1, z2)?;
                v.push(rem * c(T::zero(), sj).powi(m as i32));
            }
            let est = estimate_limit_scaled(&grid, &v, tol, reference);
            all_converged &= est.converged;
            worst = worst.max(est.error_bound / (est.value.norm() + reference));
            samples.push((b, est.value));
            floors.push((est.error_bound + T::epsilon() * reference) * T::of(LIMIT_FLOOR_FACTOR));
            directions.push(DirectionLimit { b, limit: est });
        }
        let fit = fit_homogeneous_with_floor(&samples, m, Some(&floors))?;
        let layer = LadderLayer {
            order: m,
            coeffs: fit.coeffs,
            fit_residual: fit.relative_residual,
            uncertainty: worst + fit.relative_residual,
            limits_converged: all_converged,
            directions,
        };
        if !all_converged {
            ladder.status = LadderStatus::NotConverged(m);
            ladder.rejected = Some(layer);
            break;
        }
        if !(fit.relative_residual <= T::of(cfg.tol_poly)) {
            ladder.status = LadderStatus::NotPolynomialLayer(m);
            ladder.rejected = Some(layer);
            break;
        }
        ladder.layers.push(layer);
    }
    Ok(ladder)
}

/// `J(s_j)` with an estimate of its rounding and truncation noise.
#[derive(Clone, Debug)]
pub struct RemainderSamples<T> {
    pub s: Vec<T>,
    pub values: Vec<T>,
    pub noise: Vec<T>,
}

/// `J_b(s) = s^{2N−1}·Im[f(isb) − Σ_{|n|≤2N−3} ρ_n/(isb)^n]` on the grid,
/// with a per-sample noise estimate from rounding and the layers' uncertainty.
pub fn imag_remainder_samples<T: Real, F: PickFunction<T> + ?Sized>(
    f: &F,
    expansion: &ResidueLadder<T>,
    n: usize,
    grid: &RayGrid<T>,
) -> Result<RemainderSamples<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be >= 1".into()));
    }
    let upto = 2 * n - 2;
    let upto = upto.saturating_sub(1);
    if expansion.depth() < upto {
        return Err(Error::InvalidInput(format!(
            "N = {n} needs {upto} residue layers, the expansion has {}",
            expansion.depth()
        )));
    }
    let s = grid.s_values();
    let fv = sample_ray(f, grid)?;
    let eps = T::epsilon() * T::of(NOISE_ULPS);
    let mut values = Vec::with_capacity(s.len());
    let mut noise = Vec::with_capacity(s.len());
    for (j, &sj) in s.iter().enumerate() {
        let (z1, z2) = grid.point(sj);
        let mut rem = fv[j];
        let mut size = fv[j].norm();
        let mut uncertain = T::zero();
        for l in expansion.layers.iter().take(upto) {
            let term = eval_laurent(&l.coeffs, z1, z2)?;
            rem -= term;
            size += term.norm();
            uncertain += l.uncertainty * term.norm();
        }
        let power = sj.powi(2 * n as i32 - 1);
        values.push(power * rem.im);
        noise.push(power * (eps * size + uncertain));
    }
    Ok(RemainderSamples { s, values, noise })
}

pub fn imag_remainder_functional<T: Real, F: PickFunction<T> + ?Sized>(
    f: &F,
    expansion: &ResidueLadder<T>,
    b: &Direction<T>,
    n: usize,
    grid: &RayGrid<T>,
) -> Result<Vec<T>> {
    let grid = RayGrid::new(*b, grid.s0, grid.ratio, grid.levels)?;
    Ok(imag_remainder_samples(f, expansion, n, &grid)?.values)
}

/// Growth verdict for `J_b` over the grid.
#[derive(Clone, Copy, Debug)]
pub struct Boundedness<T> {
    pub slope: T,
    pub verdict: BoundVerdict,
}

pub fn remainder_boundedness<T: Real, F: PickFunction<T> + ?Sized>(
    f: &F,
    expansion: &ResidueLadder<T>,
    n: usize,
    grid: &RayGrid<T>,
) -> Result<Boundedness<T>> {
    let r = imag_remainder_samples(f, expansion, n, grid)?;
    let slope = growth_exponent_above(grid, &r.values, &r.noise);
    Ok(Boundedness {
        slope,
        verdict: bound_verdict(slope),
    })
}

/// Limit of `J_b(s)`. For a finite representation it tends to
/// `(−1)^{N−1} r_{2N−1}(b)`: the value keeps the sign the functional
/// produces, `magnitude` is comparable with `‖β_{N−1}(b)‖²`, and `phase`
/// records the factor `i^{2N−1}` separating `s^{2N−1}` from `(is)^{2N−1}`.
#[derive(Clone, Copy, Debug)]
pub struct DirectionalMoment<T> {
    pub limit: LimitEstimate<T>,
    pub magnitude: T,
    pub sign: i8,
    /// `(−1)^{N−1}`, the sign expected for a finite representation.
    pub expected_sign: i8,
    pub phase: C<T>,
}

pub fn directional_scalar_moment<T: Real, F: PickFunction<T> + ?Sized>(
    f: &F,
    expansion: &ResidueLadder<T>,
    b: &Direction<T>,
    n: usize,
    grid: &RayGrid<T>,
) -> Result<DirectionalMoment<T>> {
    let values = imag_remainder_functional(f, expansion, b, n, grid)?;
    let grid = RayGrid::new(*b, grid.s0, grid.ratio, grid.levels)?;
    let vals: Vec<C<T>> = values.into_iter().map(cre).collect();
    let limit = estimate_limit(&grid, &vals);
    let v = limit.value.re;
    Ok(DirectionalMoment {
        limit,
        magnitude: v.abs(),
        sign: if v > T::zero() {
            1
        } else if v < T::zero() {
            -1
        } else {
            0
        },
        expected_sign: if n % 2 == 1 { 1 } else { -1 },
        phase: i_pow(2 * n as i64 - 1),
    })
}

/// `T(s) = s^{2N−1}·[h(isb) + Σ_{k≤2N−1} r_k(isb)]` on a grid.
#[derive(Clone, Debug)]
pub struct OSmallness<T> {
    pub s: Vec<T>,
    pub values: Vec<T>,
    /// Rounding floor of each value.
    pub noise: Vec<T>,
    /// Last sample before the values first reach their rounding floor.
    pub top: usize,
    /// `|T(s_top)| / r_{2N−1}(b)` (over the largest value when that moment vanishes).
    pub relative_top: T,
}

/// The remainder after the moments through order `2N−1`, computed directly
/// (no telescoping) from `h` and `r_k(isb) = r_k(b)/(is)^k`.
pub fn o_smallness<T: Real>(rep: &TypeIRep<T>, b: &Direction<T>, n: usize, grid: &RayGrid<T>) -> Result<OSmallness<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be >= 1".into()));
    }
    let grid = RayGrid::new(*b, grid.s0, grid.ratio, grid.levels)?;
    let r = scalar_moments(rep, b, 2 * n - 1)?;
    let fv = sample_ray(rep, &grid)?;
    let s = grid.s_values();
    let eps = T::epsilon() * T::of(O_NOISE_ULPS);
    let mut values = Vec::with_capacity(s.len());
    let mut noise = Vec::with_capacity(s.len());
    for (j, &sj) in s.iter().enumerate() {
        let is = c(T::zero(), sj);
        let mut acc = fv[j];
        let mut size = fv[j].norm();
        let mut p = is.inv();
        for rk in &r {
            acc += p * *rk;
            size += (p * *rk).norm();
            p /= is;
        }
        let power = sj.powi(2 * n as i32 - 1);
        values.push(acc.norm() * power);
        noise.push(eps * size * power);
    }
    let top = match (0..values.len()).find(|&j| values[j] <= noise[j]) {
        Some(j) => j.saturating_sub(1),
        None => values.len() - 1,
    };
    let peak = values.iter().fold(T::zero(), |a, &v| a.max(v));
    let scale = if r[2 * n - 2].abs() > T::zero() { r[2 * n - 2].abs() } else { peak };
    Ok(OSmallness {
        s,
        relative_top: if scale > T::zero() { values[top] / scale } else { T::zero() },
        values,
        noise,
        top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{cycle_counterexample, heavy_tail_measure, CounterexampleSpec};
    use crate::laurent::{scalar_moment_fit, MultiIndex};
    use crate::representation::{diagonal_rep, DiscreteMeasure};
    use f128::f128;

    struct MinusInvZ1;

    impl<T: Real> PickFunction<T> for MinusInvZ1 {
        fn value(&self, z1: C<T>, _z2: C<T>) -> Result<C<T>> {
            Ok(-z1.inv())
        }

        fn ray_scale(&self, _b: &ComplexDirection<T>) -> T {
            T::zero()
        }
    }

    struct ConstI;

    impl PickFunction<f64> for ConstI {
        fn value(&self, _z1: C<f64>, _z2: C<f64>) -> Result<C<f64>> {
            Ok(c(0.0, 1.0))
        }

        fn ray_scale(&self, _b: &ComplexDirection<f64>) -> f64 {
            0.0
        }
    }

    fn one_one() -> Direction<f64> {
        Direction::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(RayGrid::new(one_one(), 0.0, 2.0, 10).is_err());
        assert!(RayGrid::new(one_one(), 1.0, 1.0, 10).is_err());
        assert!(RayGrid::new(one_one(), 1.0, 2.0, 3).is_err());
        let g = RayGrid::new(one_one(), 1.0, 2.0, 4).unwrap();
        assert_eq!(g.s_values(), vec![1.0, 2.0, 4.0, 8.0, 16.0]);
        let g = RayGrid::window(one_one(), 10.0, 1e4, 15).unwrap();
        assert!((g.s_values()[15] - 1e4).abs() < 1e-8);
    }

    #[test]
    fn grid_points_stay_in_the_aperture() {
        let b = Direction::<f64>::new(0.2, 3.0).unwrap();
        let g = RayGrid::standard(b);
        let ap = g.aperture();
        assert!((ap.c - b.norm() / 0.2).abs() < 1e-12);
        for s in g.s_values() {
            let (z1, z2) = g.point(s);
            assert!(ap.contains(z1, z2));
        }
    }

    #[test]
    fn sample_ray_examples() {
        let g = RayGrid::new(one_one(), 1.0, 2.0, 4).unwrap();
        let v = sample_ray::<f64, _>(&MinusInvZ1, &g).unwrap();
        for (got, want) in v.iter().zip([1.0, 0.5, 0.25]) {
            assert!((got - c(0.0, want)).norm() < 1e-16);
        }
        assert!(sample_ray(&ConstI, &g).unwrap().iter().all(|v| *v == c(0.0, 1.0)));

        let rep = cycle_counterexample::<f64>(&CounterexampleSpec::new(3, 0.5).unwrap());
        let v = sample_ray(&rep, &g).unwrap();
        let direct = rep.value(c(0.0, 1.0), c(0.0, 1.0)).unwrap();
        assert_eq!(v[0], direct);
    }

    #[test]
    fn limit_examples() {
        let g = RayGrid::new(one_one(), 10.0, 2.0, 10).unwrap();
        let v: Vec<C<f64>> = g.s_values().iter().map(|s| cre(1.0 + 1.0 / s)).collect();
        let e = estimate_limit(&g, &v);
        assert!(e.converged && (e.value.re - 1.0).abs() < 1e-12);

        let v: Vec<C<f64>> = g.s_values().iter().map(|&s| cre(s)).collect();
        assert!(!estimate_limit(&g, &v).converged);

        let v: Vec<C<f64>> = g.s_values().iter().map(|s| cre(s * s / (1.0 + s * s))).collect();
        let e = estimate_limit(&g, &v);
        assert!(e.converged && (e.value.re - 1.0).abs() < 1e-9, "{e:?}");
        assert!(e.error_bound <= TOL_LIMIT * 2.0);
    }

    #[test]
    fn growth_examples() {
        let g = RayGrid::standard(one_one());
        let s = g.s_values();
        let seven = vec![7.0; s.len()];
        assert!(growth_exponent(&g, &seven).abs() < 1e-12);
        let root: Vec<f64> = s.iter().map(|s| s.sqrt()).collect();
        let slope = growth_exponent(&g, &root);
        assert!((slope - 0.5).abs() < 1e-12);
        assert_eq!(bound_verdict(slope), BoundVerdict::Unbounded);
        assert_eq!(bound_verdict(0.0), BoundVerdict::Bounded);
        assert_eq!(bound_verdict(0.2), BoundVerdict::Indeterminate);
        let zeros = vec![0.0; s.len()];
        assert_eq!(growth_exponent(&g, &zeros), f64::NEG_INFINITY);
    }

    #[test]
    fn functional_examples() {
        let m = DiscreteMeasure::new(vec![(1.0, 1.0)]).unwrap();
        let empty = ResidueLadder::<f64>::from_layers(vec![]).unwrap();
        let g = RayGrid::new(one_one(), 10.0, 2.0, 10).unwrap();
        let j = imag_remainder_functional(&m, &empty, &one_one(), 1, &g).unwrap();
        for (v, s) in j.iter().zip(g.s_values()) {
            assert!((v - s * s / (1.0 + s * s)).abs() < 1e-14);
        }
        let j = imag_remainder_functional::<f64, _>(&MinusInvZ1, &empty, &one_one(), 1, &g).unwrap();
        assert!(j.iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert!(imag_remainder_functional(&m, &empty, &one_one(), 2, &g).is_err());
    }

    #[test]
    fn directional_moment_of_scalar_rep() {
        let rep = diagonal_rep::<f64>(&[1.0], &[1.0], &[1.0]).unwrap();
        let empty = ResidueLadder::from_layers(vec![]).unwrap();
        let g = RayGrid::standard(one_one());
        let d = directional_scalar_moment(&rep, &empty, &one_one(), 1, &g).unwrap();
        assert!(d.limit.converged);
        assert!((d.magnitude - 1.0).abs() < 1e-6);
        assert_eq!(d.sign, 1);
        assert_eq!(d.phase, c(0.0, 1.0));
    }

    #[test]
    fn ladder_of_minus_inverse_z1() {
        let ladder = residue_ladder::<f64, _>(&MinusInvZ1, 4, &LadderConfig::default()).unwrap();
        assert_eq!(ladder.status, LadderStatus::Complete);
        assert_eq!(ladder.depth(), 4);
        let first = &ladder.layers[0].coeffs;
        assert!((first.coeff(MultiIndex::new(1, 0)) - cre(-1.0)).norm() < 1e-10);
        assert!(first.coeff(MultiIndex::new(0, 1)).norm() < 1e-10);
        for l in &ladder.layers[1..] {
            assert!(l.coeffs.max_abs() < 1e-8, "{:?}", l.coeffs);
        }
    }

    #[test]
    fn ladder_of_scalar_rep_is_geometric() {
        let lam = 0.6;
        let rep = diagonal_rep::<f128>(&[lam], &[1.0], &[1.0]).unwrap();
        let ladder = residue_ladder(&rep, 6, &LadderConfig::default()).unwrap();
        assert_eq!(ladder.status, LadderStatus::Complete);
        for (i, l) in ladder.layers.iter().enumerate() {
            let m = i + 1;
            let want = -lam.powi(m as i32 - 1);
            let got = l.coeffs.coeff(MultiIndex::new(m, 0)).re.to_f64_lossy();
            assert!((got - want).abs() < 1e-12, "m={m}: {got} vs {want}");
            assert!(l.coeffs.max_abs().to_f64_lossy() - got.abs() < 1e-12);
        }
    }

    #[test]
    fn ladder_on_counterexample_matches_moments() {
        let spec = CounterexampleSpec::new(3, 0.5).unwrap();
        let rep = cycle_counterexample::<f128>(&spec);
        let ladder = residue_ladder(&rep, 5, &LadderConfig::default()).unwrap();
        assert_eq!(ladder.depth(), 4);
        assert_eq!(ladder.status, LadderStatus::NotPolynomialLayer(5));
        assert_eq!(ladder.limits_converged_at(5), Some(true));
        let rep64 = cycle_counterexample::<f64>(&spec);
        for l in &ladder.layers {
            let fit = scalar_moment_fit(&rep64, l.order).unwrap();
            for (n, rho) in l.coeffs.terms() {
                let r = fit.coeffs.coeff(n);
                let rho = c(rho.re.to_f64_lossy(), rho.im.to_f64_lossy());
                assert!((rho + r).norm() < 1e-6, "order {} {n:?}: {rho} vs {r}", l.order);
            }
        }
    }

    #[test]
    fn directional_moments_on_counterexample() {
        let rep = cycle_counterexample::<f128>(&CounterexampleSpec::new(3, 0.5).unwrap());
        let ladder = residue_ladder(&rep, 3, &LadderConfig::default()).unwrap();
        let b = Direction::new(f128::from(1.0), f128::from(1.0)).unwrap();
        let grid = LadderConfig::default().grid(&rep, b).unwrap();
        let d2 = directional_scalar_moment(&rep, &ladder, &b, 2, &grid).unwrap();
        assert!(d2.limit.converged);
        assert!((d2.magnitude.to_f64_lossy() - 2.0).abs() < 1e-8);
        assert_eq!((d2.sign, d2.expected_sign), (-1, -1));
        let d3 = directional_scalar_moment(&rep, &ladder, &b, 3, &grid).unwrap();
        assert!((d3.magnitude.to_f64_lossy() - 8.0).abs() < 1e-8);
        assert_eq!((d3.sign, d3.expected_sign), (1, 1));
        let bd = remainder_boundedness(&rep, &ladder, 3, &RayGrid::new(b, grid.s0(), grid.ratio(), grid.levels()).unwrap()).unwrap();
        assert_eq!(bd.verdict, BoundVerdict::Bounded);
    }

    #[test]
    fn o_smallness_on_counterexample() {
        let rep = cycle_counterexample::<f128>(&CounterexampleSpec::new(3, 0.5).unwrap());
        let b = Direction::new(f128::from(0.4), f128::from(0.6)).unwrap();
        let grid = LadderConfig::default().grid(&rep, b).unwrap();
        for n in 1..=3 {
            let o = o_smallness(&rep, &b, n, &grid).unwrap();
            assert!(o.relative_top.to_f64_lossy() <= 1e-6, "N={n}: {}", o.relative_top);
        }
    }

    #[test]
    fn heavy_tail_slopes() {
        let m = heavy_tail_measure::<f64>(4.0, 100_000).unwrap();
        let mut layers = Vec::new();
        for k in 1..=3 {
            let mk = m.power_sum(k as i32 - 1);
            layers.push(HomogeneousLaurent::from_terms(k, &[(MultiIndex::new(k, 0), cre(-mk))]).unwrap());
        }
        let ladder = ResidueLadder::from_layers(layers).unwrap();
        let g = RayGrid::window(one_one(), 10.0, 1e4, 15).unwrap();
        let slopes: Vec<f64> = (1..=3)
            .map(|n| remainder_boundedness(&m, &ladder, n, &g).unwrap().slope)
            .collect();
        assert!(slopes[0] <= SLOPE_BOUNDED && slopes[1] <= SLOPE_BOUNDED, "{slopes:?}");
        assert!((slopes[2] - 1.0).abs() < 0.2, "{slopes:?}");
    }
}
