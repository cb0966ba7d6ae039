//! Parameter grids and maximisation of the coherent information.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{self, ChannelError, DensityMatrix};
use crate::lambda::{self, LambdaError, LambdaParams};
use crate::linalg::ComplexMatrix;
use crate::nelder_mead::{self, NelderMeadOptions};

/// Finite stand-in for `γt → ∞` on grid axes.
pub const GAMMA_T_CAP: f64 = 8.0;
pub const DEFAULT_FIGURE_POINTS: usize = 41;
/// Points per free axis of the coarse grid that seeds the simplex.
pub const SEED_POINTS: usize = 9;
pub const OPT_DIAMETER_TOL: f64 = 1e-8;
pub const OPT_MAX_ITERATIONS: usize = 2000;

const STATE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep specification: {0}")]
    InvalidSpec(String),
    #[error("invalid input state at {point}: {reason}")]
    InvalidStateAtPoint { point: String, reason: String },
    #[error("unknown figure '{0}' (expected fig1a, fig1b, fig2a or fig2b)")]
    UnknownFigure(String),
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error("optimizer hit the iteration cap; best so far I_c = {} at {}", .0.value, .0.describe_point())]
    NoConvergence(Box<Optimum>),
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Quantities that can be put on a sweep axis or optimised over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Theta,
    Chi,
    Phi,
    GammaT,
    Rho11,
    ReRho12,
    ImRho12,
    /// Decay asymmetry `γ23/γ13`.
    Asym,
}

impl Param {
    pub const ALL: [Param; 8] = [
        Param::Theta,
        Param::Chi,
        Param::Phi,
        Param::GammaT,
        Param::Rho11,
        Param::ReRho12,
        Param::ImRho12,
        Param::Asym,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Theta => "theta",
            Param::Chi => "chi",
            Param::Phi => "phi",
            Param::GammaT => "gamma_t",
            Param::Rho11 => "rho11",
            Param::ReRho12 => "re_rho12",
            Param::ImRho12 => "im_rho12",
            Param::Asym => "asym",
        }
    }

    /// Writes `value` into whichever of the two carriers owns this parameter.
    pub fn apply(self, value: f64, params: &mut LambdaParams, input: &mut InputState) {
        match self {
            Param::Theta => params.theta = value,
            Param::Chi => params.chi = value,
            Param::Phi => params.phi = value,
            Param::GammaT => params.gamma_t = value,
            Param::Asym => params.set_asymmetry(value),
            Param::Rho11 => input.rho11 = value,
            Param::ReRho12 => input.re_rho12 = value,
            Param::ImRho12 => input.im_rho12 = value,
        }
    }

    /// Range a value of this parameter may take.
    fn domain(self) -> (f64, f64) {
        match self {
            Param::Chi => (0.0, FRAC_PI_2),
            Param::GammaT => (0.0, f64::INFINITY),
            Param::Asym => (0.0, f64::MAX),
            Param::Rho11 => (0.0, 1.0),
            Param::ReRho12 | Param::ImRho12 => (-0.5, 0.5),
            Param::Theta | Param::Phi => (f64::MIN, f64::MAX),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().replace('-', "_");
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or(SweepError::UnknownParameter(s))
    }
}

/// Ground-pair input state `[[ρ11, ρ12], [ρ12*, 1 − ρ11]]`.
///
/// Deserialises from either `"maximally_mixed"` or an object with the three
/// real components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InputStateRepr")]
pub struct InputState {
    pub rho11: f64,
    pub re_rho12: f64,
    pub im_rho12: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InputStateRepr {
    Named(String),
    Components(InputComponents),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InputComponents {
    rho11: f64,
    #[serde(default)]
    re_rho12: f64,
    #[serde(default)]
    im_rho12: f64,
}

impl TryFrom<InputStateRepr> for InputState {
    type Error = String;

    fn try_from(repr: InputStateRepr) -> Result<Self, String> {
        match repr {
            InputStateRepr::Named(name) if name == "maximally_mixed" => Ok(Self::maximally_mixed()),
            InputStateRepr::Named(name) => Err(format!("unknown input state '{name}'")),
            InputStateRepr::Components(c) => Ok(Self {
                rho11: c.rho11,
                re_rho12: c.re_rho12,
                im_rho12: c.im_rho12,
            }),
        }
    }
}

impl Default for InputState {
    fn default() -> Self {
        Self::maximally_mixed()
    }
}

impl InputState {
    pub fn maximally_mixed() -> Self {
        Self {
            rho11: 0.5,
            re_rho12: 0.0,
            im_rho12: 0.0,
        }
    }

    pub fn diagonal(rho11: f64) -> Self {
        Self {
            rho11,
            re_rho12: 0.0,
            im_rho12: 0.0,
        }
    }

    /// Checks `0 ≤ ρ11 ≤ 1` and `|ρ12|² ≤ ρ11 ρ22`.
    pub fn check(&self) -> Result<(), String> {
        let Self {
            rho11,
            re_rho12,
            im_rho12,
        } = *self;
        if ![rho11, re_rho12, im_rho12].iter().all(|v| v.is_finite()) {
            return Err("components must be finite".into());
        }
        if !(-STATE_SLACK..=1.0 + STATE_SLACK).contains(&rho11) {
            return Err(format!("rho11 = {rho11} outside [0, 1]"));
        }
        let coherence = re_rho12 * re_rho12 + im_rho12 * im_rho12;
        let bound = rho11 * (1.0 - rho11);
        if coherence > bound + STATE_SLACK {
            return Err(format!(
                "|rho12|^2 = {coherence} exceeds rho11*rho22 = {bound}"
            ));
        }
        Ok(())
    }

    pub fn density(&self) -> Result<DensityMatrix, String> {
        self.check()?;
        let rho11 = self.rho11.clamp(0.0, 1.0);
        let rho12 = Complex64::new(self.re_rho12, self.im_rho12);
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new(rho11, 0.0), rho12],
            vec![rho12.conj(), Complex64::new(1.0 - rho11, 0.0)],
        ]);
        DensityMatrix::new(m).map_err(|e| e.to_string())
    }
}

/// One grid axis. A `gamma_t` axis may stop at infinity: its last point is
/// then `∞` and the others are evenly spaced on `[start, GAMMA_T_CAP]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Param,
    pub start: f64,
    #[serde(with = "crate::extended_real")]
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(param: Param, start: f64, stop: f64, points: usize) -> Self {
        Self {
            param,
            start,
            stop,
            points,
        }
    }

    fn validate(&self) -> Result<(), SweepError> {
        let name = self.param.name();
        if self.points < 2 {
            return Err(SweepError::InvalidSpec(format!(
                "axis {name} needs at least 2 points"
            )));
        }
        if !self.start.is_finite() {
            return Err(SweepError::InvalidSpec(format!(
                "axis {name} start must be finite"
            )));
        }
        if self.stop.is_infinite() {
            if self.param != Param::GammaT || self.stop < 0.0 {
                return Err(SweepError::InvalidSpec(format!(
                    "only a gamma_t axis may stop at +inf (axis {name})"
                )));
            }
            if self.points > 2 && self.start >= GAMMA_T_CAP {
                return Err(SweepError::InvalidSpec(format!(
                    "gamma_t axis to inf must start below {GAMMA_T_CAP}"
                )));
            }
        } else if !self.stop.is_finite() {
            return Err(SweepError::InvalidSpec(format!(
                "axis {name} stop must be a number"
            )));
        }
        let (lo, hi) = self.param.domain();
        for v in [self.start, self.stop] {
            if v < lo - 1e-12 || v > hi + 1e-12 {
                return Err(SweepError::InvalidSpec(format!(
                    "axis {name} value {v} outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.stop.is_infinite() {
            let mut v = linspace(self.start, GAMMA_T_CAP, self.points - 1);
            if self.points == 2 {
                v = vec![self.start];
            }
            v.push(f64::INFINITY);
            v
        } else {
            linspace(self.start, self.stop, self.points)
        }
    }
}

fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// A one- or two-dimensional grid over the channel parameters.
///
/// `params` and `input` hold the fixed values; each axis overrides its
/// parameter at every grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub params: LambdaParams,
    pub input: InputState,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(SweepError::InvalidSpec(format!(
                "expected 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(SweepError::InvalidSpec(
                "both axes sweep the same parameter".into(),
            ));
        }
        self.axes.iter().try_for_each(Axis::validate)
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid coordinates of flat index `idx` (row-major over axis order).
    fn point_at(&self, idx: usize, axis_values: &[Vec<f64>]) -> Vec<(Param, f64)> {
        let mut rem = idx;
        let mut coords = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            coords[k] = axis_values[k][rem % axis.points];
            rem /= axis.points;
        }
        self.axes.iter().map(|a| a.param).zip(coords).collect()
    }
}

/// Evaluated grid, values stored row-major over the axis order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub axis_values: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub argmax: Vec<(Param, f64)>,
    pub max_value: f64,
}

impl SweepResult {
    pub fn point(&self, idx: usize) -> Vec<(Param, f64)> {
        self.spec.point_at(idx, &self.axis_values)
    }

    /// Value at grid indices `(i, j)`; `j` is ignored for one-axis grids.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        match self.axis_values.len() {
            1 => self.values[i],
            _ => self.values[i * self.axis_values[1].len() + j],
        }
    }

    /// Grid indices of the maximum.
    pub fn argmax_index(&self) -> Vec<usize> {
        self.argmax
            .iter()
            .zip(&self.axis_values)
            .map(|((_, v), vals)| {
                vals.iter()
                    .position(|x| x == v)
                    .expect("argmax lies on the grid")
            })
            .collect()
    }
}

pub fn describe_point(point: &[(Param, f64)]) -> String {
    point
        .iter()
        .map(|(p, v)| format!("{p}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// `I_c` of the Λ channel for one parameter set and input state.
pub fn evaluate(params: &LambdaParams, input: &InputState) -> Result<f64, SweepError> {
    let rho = input
        .density()
        .map_err(|reason| SweepError::InvalidStateAtPoint {
            point: "input".into(),
            reason,
        })?;
    let map = lambda::channel_map(params)?;
    Ok(channel::coherent_information(&map, &rho)?)
}

fn evaluate_point(spec: &SweepSpec, point: &[(Param, f64)]) -> Result<f64, SweepError> {
    let mut params = spec.params;
    let mut input = spec.input;
    for &(p, v) in point {
        p.apply(v, &mut params, &mut input);
    }
    let rho = input
        .density()
        .map_err(|reason| SweepError::InvalidStateAtPoint {
            point: describe_point(point),
            reason,
        })?;
    let map = lambda::channel_map(&params)?;
    Ok(channel::coherent_information(&map, &rho)?)
}

/// Evaluates `I_c` at every grid point using the global rayon pool.
pub fn grid_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    grid_sweep_with_threads(spec, 0)
}

/// As [`grid_sweep`], with at most `threads` workers (`0` = automatic).
///
/// Output order is the grid order whatever the scheduling.
pub fn grid_sweep_with_threads(
    spec: &SweepSpec,
    threads: usize,
) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let n = spec.len();
    let run = || -> Vec<Result<f64, SweepError>> {
        (0..n)
            .into_par_iter()
            .map(|idx| evaluate_point(spec, &spec.point_at(idx, &axis_values)))
            .collect()
    };
    let outcomes = if threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| SweepError::InvalidSpec(format!("thread pool: {e}")))?
            .install(run)
    };
    let values = outcomes.into_iter().collect::<Result<Vec<f64>, _>>()?;

    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    Ok(SweepResult {
        argmax: spec.point_at(best, &axis_values),
        max_value: values[best],
        spec: spec.clone(),
        axis_values,
        values,
    })
}

/// A parameter left free for the optimiser, with its closed bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParam {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
}

impl FreeParam {
    pub fn new(param: Param, lower: f64, upper: f64) -> Self {
        Self {
            param,
            lower,
            upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub point: Vec<(Param, f64)>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl Optimum {
    pub fn describe_point(&self) -> String {
        describe_point(&self.point)
    }

    pub fn get(&self, param: Param) -> Option<f64> {
        self.point
            .iter()
            .find(|(p, _)| *p == param)
            .map(|(_, v)| *v)
    }
}

/// Maximises `I_c` over the free parameters.
///
/// A coarse grid of [`SEED_POINTS`] per axis picks the starting vertex, then
/// a bounded Nelder–Mead refines it. Input states violating positivity score
/// `−∞`. Hitting the iteration cap yields [`SweepError::NoConvergence`]
/// carrying the best point found.
pub fn maximize_ic(
    free: &[FreeParam],
    params: &LambdaParams,
    input: &InputState,
) -> Result<Optimum, SweepError> {
    if free.is_empty() || free.len() > 4 {
        return Err(SweepError::InvalidSpec(format!(
            "expected 1 to 4 free parameters, got {}",
            free.len()
        )));
    }
    let mut seen = HashSet::new();
    for f in free {
        if !seen.insert(f.param) {
            return Err(SweepError::InvalidSpec(format!("{} listed twice", f.param)));
        }
        if !(f.lower.is_finite() && f.upper.is_finite()) || f.lower > f.upper {
            return Err(SweepError::InvalidSpec(format!(
                "bounds for {} must be finite with lower <= upper",
                f.param
            )));
        }
        let (lo, hi) = f.param.domain();
        if f.lower < lo - 1e-12 || f.upper > hi + 1e-12 {
            return Err(SweepError::InvalidSpec(format!(
                "bounds for {} outside [{lo}, {hi}]",
                f.param
            )));
        }
    }

    let mut base_params = *params;
    let mut base_input = *input;
    // Zero-width bounds are fixed values, not search directions.
    for f in free.iter().filter(|f| f.lower == f.upper) {
        f.param.apply(f.lower, &mut base_params, &mut base_input);
    }
    let active: Vec<FreeParam> = free.iter().copied().filter(|f| f.upper > f.lower).collect();
    let full_point = |x: &[f64]| -> Vec<(Param, f64)> {
        let mut it = x.iter();
        free.iter()
            .map(|f| {
                if f.upper > f.lower {
                    (
                        f.param,
                        *it.next().expect("one coordinate per active parameter"),
                    )
                } else {
                    (f.param, f.lower)
                }
            })
            .collect()
    };
    let objective = |x: &[f64]| -> Result<f64, SweepError> {
        let mut p = base_params;
        let mut s = base_input;
        for (f, &v) in active.iter().zip(x) {
            f.param.apply(v, &mut p, &mut s);
        }
        if s.check().is_err() {
            return Ok(f64::NEG_INFINITY);
        }
        evaluate(&p, &s)
    };

    if active.is_empty() {
        return Ok(Optimum {
            point: full_point(&[]),
            value: objective(&[])?,
            iterations: 0,
            evaluations: 1,
            converged: true,
        });
    }

    // Normalised coordinates u ∈ [0, 1] per active axis.
    let to_physical = |u: &[f64]| -> Vec<f64> {
        active
            .iter()
            .zip(u)
            .map(|(f, &ui)| f.lower + ui * (f.upper - f.lower))
            .collect()
    };
    let dim = active.len();
    let mut best_u = vec![0.0; dim];
    let mut best_value = f64::NEG_INFINITY;
    let mut evaluations = 0;
    let total = SEED_POINTS.pow(dim as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut u = vec![0.0; dim];
        for k in (0..dim).rev() {
            u[k] = (rem % SEED_POINTS) as f64 / (SEED_POINTS - 1) as f64;
            rem /= SEED_POINTS;
        }
        let v = objective(&to_physical(&u))?;
        evaluations += 1;
        if v > best_value {
            best_value = v;
            best_u = u;
        }
    }
    if best_value == f64::NEG_INFINITY {
        return Err(SweepError::InvalidSpec(
            "no valid input state inside the bounds".into(),
        ));
    }

    let options = NelderMeadOptions {
        diameter_tol: OPT_DIAMETER_TOL,
        max_iterations: OPT_MAX_ITERATIONS,
        initial_step: vec![1.0 / (SEED_POINTS - 1) as f64; dim],
    };
    let outcome = nelder_mead::maximize(
        |u: &[f64]| objective(&to_physical(u)),
        &best_u,
        &vec![0.0; dim],
        &vec![1.0; dim],
        &options,
    )?;
    let optimum = Optimum {
        point: full_point(&to_physical(&outcome.point)),
        value: outcome.value,
        iterations: outcome.iterations,
        evaluations: evaluations + outcome.evaluations,
        converged: outcome.converged,
    };
    if optimum.converged {
        Ok(optimum)
    } else {
        Err(SweepError::NoConvergence(Box::new(optimum)))
    }
}

/// Preset parameter surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig2a,
        FigureId::Fig2b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
        }
    }
}

impl FromStr for FigureId {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| SweepError::UnknownFigure(s.to_string()))
    }
}

/// Grid specification reproducing one figure at `points` per axis.
///
/// All surfaces use the symmetric system except fig2b, which scans the
/// asymmetry itself.
pub fn figure_preset(id: FigureId, points: usize) -> SweepSpec {
    let symmetric = LambdaParams::default();
    let at_infinity = LambdaParams {
        gamma_t: f64::INFINITY,
        ..symmetric
    };
    let theta = Axis::new(Param::Theta, 0.0, 2.0 * PI, points);
    let chi = Axis::new(Param::Chi, 0.0, FRAC_PI_2, points);
    match id {
        FigureId::Fig1a => SweepSpec {
            axes: vec![theta, chi],
            params: at_infinity,
            input: InputState::diagonal(0.25),
        },
        FigureId::Fig1b => SweepSpec {
            axes: vec![theta, Axis::new(Param::GammaT, 0.0, GAMMA_T_CAP, points)],
            params: symmetric,
            input: InputState::maximally_mixed(),
        },
        FigureId::Fig2a => SweepSpec {
            axes: vec![theta, Axis::new(Param::Rho11, 0.0, 1.0, points)],
            params: at_infinity,
            input: InputState::diagonal(0.5),
        },
        FigureId::Fig2b => SweepSpec {
            axes: vec![Axis::new(Param::Asym, 0.0, 1.0, points), chi],
            params: LambdaParams {
                theta: PI,
                ..at_infinity
            },
            input: InputState::maximally_mixed(),
        },
    }
}

pub fn figure_preset_by_name(id: &str, points: usize) -> Result<SweepSpec, SweepError> {
    Ok(figure_preset(id.parse()?, points))
}
