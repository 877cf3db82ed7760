//! Löwner-class membership per level `N`, decided independently from the
//! moments (operator route), the residue ladder (function route) and the
//! growth of the imaginary remainder (boundedness route), then cross-checked.

use f128::f128;
use serde::Serialize;

use crate::asymptotics::{
    bound_verdict, growth_exponent_above, imag_remainder_samples, residue_ladder, BoundVerdict, LadderConfig,
    LadderStatus, RayGrid, ResidueLadder,
};
use crate::error::{Error, Result};
use crate::laurent::{
    poly_verdict, scalar_moment_fit, vector_moment_fit, HomogeneousLaurent, MultiIndex, PolyVerdict, NOT_POLY,
    TOL_POLY,
};
use crate::representation::{DiscreteMeasure, Direction, PickFunction, TypeIRep};
use crate::scalar::{cre, Real};

/// A layer is real when `max|Im ρ_n| ≤ REAL_LAYER_TOL·(1 + max|ρ_n|)`.
pub const REAL_LAYER_TOL: f64 = 1e-8;
/// Partial sums whose last decade moves them by at most this much converge.
pub const SERIES_CONVERGED: f64 = 1e-3;
/// Partial sums whose last decade moves them by at least this much diverge.
pub const SERIES_DIVERGED: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    In,
    Out,
    Indeterminate,
}

/// Where a chain of per-order checks stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "order")]
pub enum Stop {
    /// Every order up to the tested maximum passed.
    Passed(usize),
    /// First order that is missing or not polynomial.
    Failed(usize),
    /// First order whose verdict fell in the guard band.
    Indeterminate(usize),
}

impl Stop {
    /// Membership of "every order `≤ k` passes".
    pub fn through(self, k: usize) -> Membership {
        match self {
            Stop::Failed(f) | Stop::Indeterminate(f) if f > k => Membership::In,
            Stop::Failed(_) => Membership::Out,
            Stop::Indeterminate(_) => Membership::Indeterminate,
            Stop::Passed(top) if top >= k => Membership::In,
            Stop::Passed(_) => Membership::Indeterminate,
        }
    }

    pub fn first_failure(self) -> Option<usize> {
        match self {
            Stop::Failed(k) => Some(k),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderVerdict {
    pub k: usize,
    pub exists: bool,
    pub residual: f64,
    pub verdict: PolyVerdict,
}

/// Per-order existence and polynomiality of `r_k` and `R_k`. Each chain stops
/// at its first failure, so no success is recorded past a failure.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub k_max: usize,
    pub scalar: Vec<OrderVerdict>,
    pub scalar_stop: Stop,
    pub vector: Vec<OrderVerdict>,
    pub vector_stop: Stop,
}

fn run_chain(top: usize, mut check: impl FnMut(usize) -> Result<OrderVerdict>) -> Result<(Vec<OrderVerdict>, Stop)> {
    let mut out = Vec::new();
    for k in 1..=top {
        let v = check(k)?;
        let stop = match (v.exists, v.verdict) {
            (false, _) | (true, PolyVerdict::NotPolynomial) => Some(Stop::Failed(k)),
            (true, PolyVerdict::Indeterminate) => Some(Stop::Indeterminate(k)),
            (true, PolyVerdict::Polynomial) => None,
        };
        out.push(v);
        if let Some(s) = stop {
            return Ok((out, s));
        }
    }
    Ok((out, Stop::Passed(top)))
}

/// Fits `r_k` for `k ≤ k_max` and `R_k` for `k ≤ ⌈k_max/2⌉`.
pub fn moment_orders(rep: &TypeIRep<f64>, k_max: usize) -> Result<MomentReport> {
    moment_orders_tol(rep, k_max, TOL_POLY)
}

pub fn moment_orders_tol(rep: &TypeIRep<f64>, k_max: usize, tol_poly: f64) -> Result<MomentReport> {
    if k_max == 0 {
        return Err(Error::InvalidInput("K_max must be >= 1".into()));
    }
    let verdict = |k: usize, residual: f64| OrderVerdict {
        k,
        exists: true,
        residual,
        verdict: poly_verdict(residual, tol_poly),
    };
    let (scalar, scalar_stop) = run_chain(k_max, |k| Ok(verdict(k, scalar_moment_fit(rep, k)?.relative_residual)))?;
    let (vector, vector_stop) = run_chain(k_max.div_ceil(2), |k| {
        Ok(verdict(k, vector_moment_fit(rep, k)?.relative_residual))
    })?;
    Ok(MomentReport {
        k_max,
        scalar,
        scalar_stop,
        vector,
        vector_stop,
    })
}

/// Convergence of a series from its partial sums at `J/10` and `J`.
pub fn series_verdict(partial_tenth: f64, partial_full: f64) -> Membership {
    let rel = (partial_full - partial_tenth).abs() / partial_full.abs().max(f64::MIN_POSITIVE);
    if rel <= SERIES_CONVERGED {
        Membership::In
    } else if rel >= SERIES_DIVERGED {
        Membership::Out
    } else {
        Membership::Indeterminate
    }
}

/// Moments of the untruncated measure that a truncation stands in for:
/// `r_k(b) = m_{k−1}/b1^k` exists iff `m_{k−1}` converges, `‖R_k‖² = m_{2k−2}`.
/// Existing moments are monomials in `1/b1`.
pub fn measure_moment_orders(m: &DiscreteMeasure<f64>, k_max: usize) -> Result<MomentReport> {
    if k_max == 0 {
        return Err(Error::InvalidInput("K_max must be >= 1".into()));
    }
    let total = m.atoms().len();
    let tenth = (total / 10).max(1);
    let exists = |power: i32| {
        let s = m.power_sums(power, &[tenth, total]);
        series_verdict(s[0], s[1])
    };
    let check = |power: i32, k: usize| {
        let e = exists(power);
        Ok(OrderVerdict {
            k,
            exists: e != Membership::Out,
            residual: 0.0,
            verdict: if e == Membership::Indeterminate {
                PolyVerdict::Indeterminate
            } else {
                PolyVerdict::Polynomial
            },
        })
    };
    let (scalar, scalar_stop) = run_chain(k_max, |k| check(k as i32 - 1, k))?;
    let (vector, vector_stop) = run_chain(k_max.div_ceil(2), |k| check(2 * k as i32 - 2, k))?;
    Ok(MomentReport {
        k_max,
        scalar,
        scalar_stop,
        vector,
        vector_stop,
    })
}

/// Thresholds relating first-failure indices to the level `N`: a route
/// holds at `N` iff every order `≤ mul·N + add` passes. Calibrated on the
/// cyclic counterexample family and frozen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Offset {
    pub mul: usize,
    pub add: i64,
}

impl Offset {
    pub fn order(&self, n: usize) -> usize {
        (self.mul as i64 * n as i64 + self.add).max(0) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OffsetTable {
    /// `r_k` polynomial for `k ≤ 2N − 1`.
    pub scalar_l: Offset,
    /// `r_k` polynomial for `k ≤ 2N − 2`.
    pub scalar_l_minus: Offset,
    /// `R_k` polynomial for `k ≤ N`.
    pub vector_l: Offset,
    /// Residue layers through `2N − 1`.
    pub ladder_l: Offset,
}

pub const OFFSETS: OffsetTable = OffsetTable {
    scalar_l: Offset { mul: 2, add: -1 },
    scalar_l_minus: Offset { mul: 2, add: -2 },
    vector_l: Offset { mul: 1, add: 0 },
    ladder_l: Offset { mul: 2, add: -1 },
};

#[derive(Clone, Debug, Serialize)]
pub struct LayerSummary {
    pub order: usize,
    pub fit_residual: f64,
    pub uncertainty: f64,
    pub max_abs: f64,
    pub max_imag: f64,
    pub real: bool,
    pub limits_converged: bool,
    /// `(n1, n2, re, im)` per coefficient.
    pub coeffs: Vec<(usize, usize, f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderSummary {
    pub depth: usize,
    pub status: LadderStatus,
    pub layers: Vec<LayerSummary>,
    pub rejected: Option<LayerSummary>,
}

impl LadderSummary {
    pub fn of<T: Real>(ladder: &ResidueLadder<T>) -> Self {
        let sum = |l: &crate::asymptotics::LadderLayer<T>| {
            let max_abs = l.coeffs.max_abs().to_f64_lossy();
            let max_imag = l.coeffs.max_imag().to_f64_lossy();
            LayerSummary {
                order: l.order,
                fit_residual: l.fit_residual.to_f64_lossy(),
                uncertainty: l.uncertainty.to_f64_lossy(),
                max_abs,
                max_imag,
                real: max_imag <= REAL_LAYER_TOL * (1.0 + max_abs),
                limits_converged: l.limits_converged,
                coeffs: l
                    .coeffs
                    .terms()
                    .map(|(n, v)| (n.n1, n.n2, v.re.to_f64_lossy(), v.im.to_f64_lossy()))
                    .collect(),
            }
        };
        LadderSummary {
            depth: ladder.depth(),
            status: ladder.status,
            layers: ladder.layers.iter().map(sum).collect(),
            rejected: ladder.rejected.as_ref().map(sum),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub n: usize,
    /// `𝓛^N` from `r_k`, `k ≤ 2N − 1`.
    pub operator_scalar: Membership,
    /// `𝓛^N` from `R_k`, `k ≤ N`.
    pub operator_vector: Membership,
    /// `𝓛^N` from the residue ladder.
    pub function: Membership,
    /// `𝓛^{N−}` from `r_k`, `k ≤ 2N − 2`.
    pub operator_minus: Membership,
    /// `𝓛^{N−}` from `𝓛^{N−1}` and boundedness of `s^{2N−1} Im[…]`.
    pub boundedness: Membership,
    /// Largest growth exponent over the direction panel, when computed.
    pub boundedness_slope: Option<f64>,
}

impl LevelReport {
    pub fn l_routes(&self) -> [(&'static str, Membership); 3] {
        [
            ("operator_scalar", self.operator_scalar),
            ("operator_vector", self.operator_vector),
            ("function", self.function),
        ]
    }

    pub fn l_minus_routes(&self) -> [(&'static str, Membership); 2] {
        [("operator_minus", self.operator_minus), ("boundedness", self.boundedness)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub n: usize,
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub subject: String,
    pub n_max: usize,
    pub offsets: OffsetTable,
    pub moments: MomentReport,
    pub ladder: Option<LadderSummary>,
    pub levels: Vec<LevelReport>,
    pub discrepancies: Vec<Discrepancy>,
}

impl ClassificationReport {
    pub fn level(&self, n: usize) -> Option<&LevelReport> {
        self.levels.iter().find(|l| l.n == n)
    }

    pub fn has_indeterminate(&self) -> bool {
        self.levels.iter().any(|l| {
            l.l_routes()
                .iter()
                .chain(l.l_minus_routes().iter())
                .any(|r| r.1 == Membership::Indeterminate)
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProfileConfig {
    pub tol_poly: f64,
    pub ladder: LadderConfig,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            tol_poly: TOL_POLY,
            ladder: LadderConfig::default(),
        }
    }
}

/// `b = (u, 1 − u)` for `u = 0.1, …, 0.9`.
pub fn direction_panel<T: Real>() -> Vec<Direction<T>> {
    (1..10)
        .map(|i| {
            let u = T::of(i as f64 / 10.0);
            Direction::new(u, T::one() - u).expect("panel directions are positive")
        })
        .collect()
}

fn combine(verdicts: impl IntoIterator<Item = BoundVerdict>) -> Membership {
    let mut out = Membership::In;
    for v in verdicts {
        match v {
            BoundVerdict::Unbounded => return Membership::Out,
            BoundVerdict::Indeterminate => out = Membership::Indeterminate,
            BoundVerdict::Bounded => {}
        }
    }
    out
}

/// Largest slope of `J_b` over the panel and the combined verdict.
fn boundedness_over_panel<T: Real, F: PickFunction<T> + ?Sized>(
    f: &F,
    expansion: &ResidueLadder<T>,
    n: usize,
    grid_for: impl Fn(&Direction<T>) -> Result<RayGrid<T>>,
) -> Result<(Membership, f64)> {
    let mut worst = f64::NEG_INFINITY;
    let mut verdicts = Vec::new();
    for b in direction_panel::<T>() {
        let grid = grid_for(&b)?;
        let r = imag_remainder_samples(f, expansion, n, &grid)?;
        let slope = growth_exponent_above(&grid, &r.values, &r.noise);
        worst = worst.max(slope.to_f64_lossy());
        verdicts.push(bound_verdict(slope));
    }
    Ok((combine(verdicts), worst))
}

fn ladder_function_route<T: Real>(ladder: &ResidueLadder<T>, n: usize) -> Membership {
    let need = OFFSETS.ladder_l.order(n);
    let real = |l: &crate::asymptotics::LadderLayer<T>| {
        l.coeffs.max_imag() <= T::of(REAL_LAYER_TOL) * (T::one() + l.coeffs.max_abs())
    };
    if ladder.layers.iter().take(need).any(|l| !real(l)) {
        return Membership::Out;
    }
    if ladder.depth() >= need {
        // o-smallness at order 2N−1: the next layer's limits exist
        return match ladder.limits_converged_at(need + 1) {
            Some(true) => Membership::In,
            _ => Membership::Indeterminate,
        };
    }
    match (ladder.status, &ladder.rejected) {
        (LadderStatus::NotPolynomialLayer(_), Some(l)) if l.fit_residual >= T::of(NOT_POLY) => Membership::Out,
        _ => Membership::Indeterminate,
    }
}

/// Full profile of a finite representation for `N = 1..=n_max`. The ladder
/// and the boundedness functional run in binary128.
pub fn loewner_profile(rep: &TypeIRep<f64>, n_max: usize) -> Result<ClassificationReport> {
    loewner_profile_with(rep, n_max, &ProfileConfig::default())
}

pub fn loewner_profile_with(rep: &TypeIRep<f64>, n_max: usize, cfg: &ProfileConfig) -> Result<ClassificationReport> {
    if n_max == 0 {
        return Err(Error::InvalidInput("N_max must be >= 1".into()));
    }
    let moments = moment_orders_tol(rep, 2 * n_max, cfg.tol_poly)?;
    let wide = rep.cast::<f128>();
    let ladder_cfg = LadderConfig {
        tol_poly: cfg.tol_poly,
        ..cfg.ladder
    };
    let ladder = residue_ladder(&wide, 2 * n_max, &ladder_cfg)?;
    let mut levels: Vec<LevelReport> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let function = ladder_function_route(&ladder, n);
        let prior = if n == 1 {
            Membership::In
        } else {
            levels[n - 2].function
        };
        let (boundedness, slope) = match prior {
            Membership::In => {
                let (m, s) = boundedness_over_panel(&wide, &ladder, n, |b| ladder_cfg.grid(&wide, *b))?;
                (m, Some(s))
            }
            other => (other, None),
        };
        levels.push(LevelReport {
            n,
            operator_scalar: moments.scalar_stop.through(OFFSETS.scalar_l.order(n)),
            operator_vector: moments.vector_stop.through(OFFSETS.vector_l.order(n)),
            function,
            operator_minus: moments.scalar_stop.through(OFFSETS.scalar_l_minus.order(n)),
            boundedness,
            boundedness_slope: slope,
        });
    }
    let mut report = ClassificationReport {
        subject: format!("type I representation, dim {}", rep.dim()),
        n_max,
        offsets: OFFSETS,
        moments,
        ladder: Some(LadderSummary::of(&ladder)),
        levels,
        discrepancies: Vec::new(),
    };
    report.discrepancies = cross_validate(&report);
    Ok(report)
}

/// Profile of a truncated measure standing in for its untruncated limit.
/// Moments come from series convergence of the partial sums; boundedness is
/// read on the window `[s_min, s_max]`, which should end well below the
/// largest atom. The function route is `Indeterminate`: a truncation has
/// residues of every order.
pub fn measure_profile(
    m: &DiscreteMeasure<f64>,
    n_max: usize,
    s_min: f64,
    s_max: f64,
    levels: usize,
) -> Result<ClassificationReport> {
    if n_max == 0 {
        return Err(Error::InvalidInput("N_max must be >= 1".into()));
    }
    let moments = measure_moment_orders(m, 2 * n_max)?;
    let depth = (2 * n_max).saturating_sub(3);
    let layers = (1..=depth)
        .map(|k| {
            let mk = m.power_sum(k as i32 - 1);
            HomogeneousLaurent::from_terms(k, &[(MultiIndex::new(k, 0), cre(-mk))])
        })
        .collect::<Result<Vec<_>>>()?;
    let expansion = ResidueLadder::from_layers(layers)?;
    let mut out: Vec<LevelReport> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let operator_scalar = moments.scalar_stop.through(OFFSETS.scalar_l.order(n));
        let prior = if n == 1 {
            Membership::In
        } else {
            out[n - 2].operator_scalar
        };
        let (boundedness, slope) = match prior {
            Membership::In => {
                let (v, s) = boundedness_over_panel(m, &expansion, n, |b| RayGrid::window(*b, s_min, s_max, levels))?;
                (v, Some(s))
            }
            other => (other, None),
        };
        out.push(LevelReport {
            n,
            operator_scalar,
            operator_vector: moments.vector_stop.through(OFFSETS.vector_l.order(n)),
            function: Membership::Indeterminate,
            operator_minus: moments.scalar_stop.through(OFFSETS.scalar_l_minus.order(n)),
            boundedness,
            boundedness_slope: slope,
        });
    }
    let mut report = ClassificationReport {
        subject: format!("discrete measure, {} atoms", m.atoms().len()),
        n_max,
        offsets: OFFSETS,
        moments,
        ladder: None,
        levels: out,
        discrepancies: Vec::new(),
    };
    report.discrepancies = cross_validate(&report);
    Ok(report)
}

fn opposed(a: Membership, b: Membership) -> bool {
    matches!(
        (a, b),
        (Membership::In, Membership::Out) | (Membership::Out, Membership::In)
    )
}

/// Route contradictions, failed inclusions `𝓛^N ⊂ 𝓛^{N−} ⊂ 𝓛^{N−1}` and
/// non-monotone routes. Empty means consistent.
pub fn cross_validate(report: &ClassificationReport) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    let ctx = format!(
        "scalar stop {:?}, vector stop {:?}, ladder depth {}",
        report.moments.scalar_stop,
        report.moments.vector_stop,
        report.ladder.as_ref().map_or("n/a".to_string(), |l| l.depth.to_string())
    );
    for (i, lv) in report.levels.iter().enumerate() {
        let n = lv.n;
        for group in [&lv.l_routes()[..], &lv.l_minus_routes()[..]] {
            for (a, ra) in group {
                for (b, rb) in group {
                    if a < b && opposed(*ra, *rb) {
                        out.push(Discrepancy {
                            n,
                            kind: "route contradiction".into(),
                            detail: format!("{a} = {ra:?}, {b} = {rb:?} ({ctx}, slope {:?})", lv.boundedness_slope),
                        });
                    }
                }
            }
        }
        for (a, ra) in lv.l_routes() {
            for (b, rb) in lv.l_minus_routes() {
                if ra == Membership::In && rb == Membership::Out {
                    out.push(Discrepancy {
                        n,
                        kind: "inclusion L^N in L^N-".into(),
                        detail: format!("{a} = In but {b} = Out ({ctx})"),
                    });
                }
            }
        }
        if i > 0 {
            let prev = &report.levels[i - 1];
            for (a, ra) in lv.l_minus_routes() {
                for (b, rb) in prev.l_routes() {
                    if ra == Membership::In && rb == Membership::Out {
                        out.push(Discrepancy {
                            n,
                            kind: "inclusion L^N- in L^(N-1)".into(),
                            detail: format!("{a} = In at N but {b} = Out at N-1 ({ctx})"),
                        });
                    }
                }
            }
            let now = lv.l_routes().into_iter().chain(lv.l_minus_routes());
            let before = prev.l_routes().into_iter().chain(prev.l_minus_routes());
            for ((a, ra), (_, rb)) in now.zip(before) {
                if ra == Membership::In && rb == Membership::Out {
                    out.push(Discrepancy {
                        n,
                        kind: "monotonicity".into(),
                        detail: format!("{a} = In at N but Out at N-1 ({ctx})"),
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{cycle_counterexample, heavy_tail_measure, random_rep, CounterexampleSpec};
    use crate::representation::diagonal_rep;
    use Membership::*;

    #[test]
    fn stop_thresholds() {
        assert_eq!(Stop::Failed(5).through(4), In);
        assert_eq!(Stop::Failed(5).through(5), Out);
        assert_eq!(Stop::Indeterminate(3).through(3), Indeterminate);
        assert_eq!(Stop::Passed(6).through(6), In);
        assert_eq!(Stop::Passed(6).through(7), Indeterminate);
        assert_eq!(Stop::Failed(1).through(0), In);
    }

    #[test]
    fn scalar_rep_is_polynomial_everywhere() {
        let rep = diagonal_rep::<f64>(&[0.7], &[1.0], &[1.0]).unwrap();
        let m = moment_orders(&rep, 6).unwrap();
        assert_eq!(m.scalar_stop, Stop::Passed(6));
        assert_eq!(m.vector_stop, Stop::Passed(3));
    }

    #[test]
    fn counterexample_first_failures() {
        for n in [3, 4] {
            let rep = cycle_counterexample::<f64>(&CounterexampleSpec::new(n, 0.5).unwrap());
            let m = moment_orders(&rep, 2 * n).unwrap();
            assert_eq!(m.scalar_stop, Stop::Failed(2 * n - 1));
            assert_eq!(m.vector_stop, Stop::Failed(n));
            assert_eq!(m.scalar.len(), 2 * n - 1);
            let flat = cycle_counterexample::<f64>(&CounterexampleSpec::new(n, 1.0).unwrap());
            assert_eq!(moment_orders(&flat, 2 * n).unwrap().scalar_stop, Stop::Passed(2 * n));
        }
    }

    #[test]
    fn offsets_reproduce_the_counterexample_calibration() {
        // L^N holds exactly for N < n on this family; each offset must agree.
        for n in 3..=5 {
            let scalar_fail = 2 * n - 1;
            let vector_fail = n;
            for level in 1..=n + 1 {
                let expected = level < n;
                assert_eq!(OFFSETS.scalar_l.order(level) < scalar_fail, expected);
                assert_eq!(OFFSETS.vector_l.order(level) < vector_fail, expected);
                assert_eq!(OFFSETS.ladder_l.order(level) <= 2 * n - 2, expected);
                assert_eq!(OFFSETS.scalar_l_minus.order(level) < scalar_fail, level <= n);
            }
        }
    }

    #[test]
    fn profile_of_counterexample() {
        let rep = cycle_counterexample::<f64>(&CounterexampleSpec::new(3, 0.5).unwrap());
        let r = loewner_profile(&rep, 4).unwrap();
        assert!(r.discrepancies.is_empty(), "{:?}", r.discrepancies);
        let row = |n: usize| {
            let l = r.level(n).unwrap();
            (l.operator_scalar, l.operator_vector, l.function, l.operator_minus, l.boundedness)
        };
        assert_eq!(row(1), (In, In, In, In, In));
        assert_eq!(row(2), (In, In, In, In, In));
        assert_eq!(row(3), (Out, Out, Out, In, In));
        assert_eq!(row(4), (Out, Out, Out, Out, Out));
        assert_eq!(r.ladder.as_ref().unwrap().depth, 4);
    }

    #[test]
    fn profile_of_scalar_and_random_reps() {
        let rep = diagonal_rep::<f64>(&[0.7], &[1.0], &[1.0]).unwrap();
        let r = loewner_profile(&rep, 3).unwrap();
        for l in &r.levels {
            assert!(l.l_routes().iter().chain(l.l_minus_routes().iter()).all(|v| v.1 == In), "{l:?}");
        }
        let r = loewner_profile(&random_rep(4, 11).unwrap(), 3).unwrap();
        assert!(r.discrepancies.is_empty());
        let l1 = r.level(1).unwrap();
        assert_eq!((l1.function, l1.operator_scalar, l1.boundedness, l1.operator_minus), (Out, Out, In, In));
        assert!(r.levels[1..].iter().all(|l| l.boundedness == Out && l.operator_minus == Out));
    }

    #[test]
    fn heavy_tail_profile() {
        let m = heavy_tail_measure::<f64>(4.0, 100_000).unwrap();
        let r = measure_profile(&m, 3, 10.0, 1e4, 15).unwrap();
        let b: Vec<Membership> = r.levels.iter().map(|l| l.boundedness).collect();
        assert_eq!(b, vec![In, In, Out]);
        assert!(r.levels[2].boundedness_slope.unwrap() >= 0.4);
        assert_eq!(r.moments.scalar_stop, Stop::Failed(4));
        assert_eq!(r.moments.vector_stop, Stop::Failed(3));
        assert!(r.discrepancies.is_empty(), "{:?}", r.discrepancies);
    }

    #[test]
    fn series_verdicts() {
        assert_eq!(series_verdict(1.0, 1.0), In);
        assert_eq!(series_verdict(1.0, 2.0), Out);
        assert_eq!(series_verdict(1.0, 1.01), Indeterminate);
    }

    #[test]
    fn cross_validate_flags_contradictions() {
        let rep = diagonal_rep::<f64>(&[0.7], &[1.0], &[1.0]).unwrap();
        let mut r = loewner_profile(&rep, 2).unwrap();
        r.levels[1].function = Out;
        let d = cross_validate(&r);
        assert!(d.iter().any(|d| d.kind == "route contradiction" && d.n == 2));
        r.levels[1].function = In;
        r.levels[0].operator_vector = Out;
        let d = cross_validate(&r);
        assert!(d.iter().any(|d| d.kind == "monotonicity"));
    }
}
