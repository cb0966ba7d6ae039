//! C ABI over `lambda-capacity`.
//!
//! Channels and sweep results are opaque heap handles created by `lc_*_new`
//! / `lc_sweep_run` and released with the matching `lc_*_free`. Every
//! fallible call returns an [`LcStatus`]; on failure the message is kept in
//! thread-local storage and can be copied out with [`lc_last_error_message`].
//! Panics never cross the boundary: they are caught and reported as
//! `LC_STATUS_PANIC`.
//!
//! `gamma_t` may be `INFINITY` for the fully emitted limit.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lambda_capacity::channel::{analyze, validate_channel, ChannelMap};
use lambda_capacity::lambda::{channel_map, LambdaParams, FIELD_DIM, INPUT_DIM};
use lambda_capacity::sweep::{
    figure_preset_by_name, grid_sweep_with_threads, Axis, InputState, Param, SweepError,
    SweepResult, SweepSpec,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numeric = 3,
    BufferTooSmall = 4,
    ValidationFailed = 5,
    Panic = 6,
}

/// Sweepable parameter.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcParam {
    Theta = 0,
    Chi = 1,
    Phi = 2,
    GammaT = 3,
    Rho11 = 4,
    ReRho12 = 5,
    ImRho12 = 6,
    Asym = 7,
}

fn param_from_raw(raw: i32) -> Option<Param> {
    Some(match raw {
        x if x == LcParam::Theta as i32 => Param::Theta,
        x if x == LcParam::Chi as i32 => Param::Chi,
        x if x == LcParam::Phi as i32 => Param::Phi,
        x if x == LcParam::GammaT as i32 => Param::GammaT,
        x if x == LcParam::Rho11 as i32 => Param::Rho11,
        x if x == LcParam::ReRho12 as i32 => Param::ReRho12,
        x if x == LcParam::ImRho12 as i32 => Param::ImRho12,
        x if x == LcParam::Asym as i32 => Param::Asym,
        _ => return None,
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcParams {
    pub gamma13: f64,
    pub gamma23: f64,
    pub theta: f64,
    pub chi: f64,
    pub phi: f64,
    pub gamma_t: f64,
}

impl From<LcParams> for LambdaParams {
    fn from(p: LcParams) -> Self {
        LambdaParams {
            gamma13: p.gamma13,
            gamma23: p.gamma23,
            theta: p.theta,
            chi: p.chi,
            phi: p.phi,
            gamma_t: p.gamma_t,
            ..LambdaParams::default()
        }
    }
}

/// Qubit input state `[[rho11, rho12], [rho12*, 1 − rho11]]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcInputState {
    pub rho11: f64,
    pub re_rho12: f64,
    pub im_rho12: f64,
}

impl From<LcInputState> for InputState {
    fn from(s: LcInputState) -> Self {
        InputState {
            rho11: s.rho11,
            re_rho12: s.re_rho12,
            im_rho12: s.im_rho12,
        }
    }
}

/// Entropies in bits; spectra sorted in descending order.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcInfo {
    pub coherent_information: f64,
    pub output_entropy: f64,
    pub entropy_exchange: f64,
    pub output_spectrum: [f64; 3],
    pub joint_spectrum: [f64; 6],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcDiagnostics {
    pub max_trace_deviation: f64,
    pub max_hermiticity_deviation: f64,
    pub min_choi_eigenvalue: f64,
    /// 1 when all three checks pass, else 0.
    pub passed: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcAxis {
    /// An `LcParam` value; kept as a plain integer so foreign callers
    /// cannot hand over an out-of-range enum.
    pub param: i32,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

/// Opaque channel handle.
pub struct LcChannel {
    map: ChannelMap,
}

/// Opaque sweep result handle.
pub struct LcSweep {
    result: SweepResult,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn guard(f: impl FnOnce() -> Result<(), (LcStatus, String)>) -> LcStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            LcStatus::Panic
        }
    }
}

fn null(what: &str) -> (LcStatus, String) {
    (LcStatus::NullPointer, format!("{what} is null"))
}

fn sweep_status(e: SweepError) -> (LcStatus, String) {
    let status = match e {
        SweepError::InvalidSpec(_)
        | SweepError::UnknownFigure(_)
        | SweepError::UnknownParameter(_)
        | SweepError::InvalidStateAtPoint { .. }
        | SweepError::Lambda(_) => LcStatus::InvalidArgument,
        _ => LcStatus::Numeric,
    };
    (status, e.to_string())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the untruncated length
/// including the terminator; 1 means no error is recorded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Symmetric system, θ = π, χ = π/2, φ = 0, γt = ∞.
#[no_mangle]
pub extern "C" fn lc_params_default() -> LcParams {
    let p = LambdaParams::default();
    LcParams {
        gamma13: p.gamma13,
        gamma23: p.gamma23,
        theta: p.theta,
        chi: p.chi,
        phi: p.phi,
        gamma_t: p.gamma_t,
    }
}

#[no_mangle]
pub extern "C" fn lc_input_maximally_mixed() -> LcInputState {
    LcInputState {
        rho11: 0.5,
        re_rho12: 0.0,
        im_rho12: 0.0,
    }
}

/// Builds the channel for `params` and stores a new handle in `*out`.
///
/// # Safety
/// `params` must point to a valid `LcParams`; `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn lc_channel_new(
    params: *const LcParams,
    out: *mut *mut LcChannel,
) -> LcStatus {
    guard(|| {
        let params = params.as_ref().ok_or_else(|| null("params"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let map = channel_map(&LambdaParams::from(*params))
            .map_err(|e| (LcStatus::InvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(LcChannel { map }));
        Ok(())
    })
}

/// Releases a channel handle. Null is ignored.
///
/// # Safety
/// `channel` must be null or a handle from `lc_channel_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_channel_free(channel: *mut LcChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Copies transfer operator `ŝ_mn` (3×3, row-major, interleaved re/im:
/// 18 doubles) into `out`.
///
/// # Safety
/// `channel` must be a live handle; `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lc_channel_operator(
    channel: *const LcChannel,
    m: usize,
    n: usize,
    out: *mut f64,
    len: usize,
) -> LcStatus {
    guard(|| {
        let channel = channel.as_ref().ok_or_else(|| null("channel"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if m >= INPUT_DIM || n >= INPUT_DIM {
            return Err((
                LcStatus::InvalidArgument,
                format!("operator index ({m}, {n}) out of range"),
            ));
        }
        let need = 2 * FIELD_DIM * FIELD_DIM;
        if len < need {
            return Err((
                LcStatus::BufferTooSmall,
                format!("need {need} doubles, got {len}"),
            ));
        }
        let out = std::slice::from_raw_parts_mut(out, need);
        for (pair, z) in out.chunks_exact_mut(2).zip(channel.map.op(m, n).as_slice()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Trace, Hermiticity and Choi-positivity diagnostics. Returns
/// `LC_STATUS_VALIDATION_FAILED` (with `*out` filled) when a check fails.
///
/// # Safety
/// `channel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_channel_validate(
    channel: *const LcChannel,
    out: *mut LcDiagnostics,
) -> LcStatus {
    guard(|| {
        let channel = channel.as_ref().ok_or_else(|| null("channel"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = validate_channel(&channel.map);
        *out = LcDiagnostics {
            max_trace_deviation: d.max_trace_deviation,
            max_hermiticity_deviation: d.max_hermiticity_deviation,
            min_choi_eigenvalue: d.min_choi_eigenvalue,
            passed: d.passed() as i32,
        };
        if d.passed() {
            Ok(())
        } else {
            Err((LcStatus::ValidationFailed, format!("{:?}", d.violations)))
        }
    })
}

/// Full entropy report for `input` sent through `channel`.
///
/// # Safety
/// All pointers must be valid; `channel` a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_channel_analyze(
    channel: *const LcChannel,
    input: *const LcInputState,
    out: *mut LcInfo,
) -> LcStatus {
    guard(|| {
        let channel = channel.as_ref().ok_or_else(|| null("channel"))?;
        let input = input.as_ref().ok_or_else(|| null("input"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let rho = InputState::from(*input)
            .density()
            .map_err(|e| (LcStatus::InvalidArgument, e))?;
        let info = analyze(&channel.map, &rho).map_err(|e| (LcStatus::Numeric, e.to_string()))?;
        let mut report = LcInfo {
            coherent_information: info.coherent_information,
            output_entropy: info.output_entropy,
            entropy_exchange: info.entropy_exchange,
            output_spectrum: [0.0; 3],
            joint_spectrum: [0.0; 6],
        };
        report
            .output_spectrum
            .copy_from_slice(&info.output_spectrum);
        report.joint_spectrum.copy_from_slice(&info.joint_spectrum);
        *out = report;
        Ok(())
    })
}

/// Coherent information in bits.
///
/// # Safety
/// All pointers must be valid; `channel` a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_channel_coherent_information(
    channel: *const LcChannel,
    input: *const LcInputState,
    out: *mut f64,
) -> LcStatus {
    let mut info = std::mem::MaybeUninit::<LcInfo>::uninit();
    let status = lc_channel_analyze(channel, input, info.as_mut_ptr());
    if status == LcStatus::Ok {
        match out.as_mut() {
            Some(out) => *out = info.assume_init().coherent_information,
            None => {
                set_error("out is null");
                return LcStatus::NullPointer;
            }
        }
    }
    status
}

fn finish_sweep(
    spec: SweepSpec,
    threads: usize,
    out: &mut *mut LcSweep,
) -> Result<(), (LcStatus, String)> {
    let result = grid_sweep_with_threads(&spec, threads).map_err(sweep_status)?;
    *out = Box::into_raw(Box::new(LcSweep { result }));
    Ok(())
}

/// Evaluates I_c over one or two axes. `threads` caps the worker count
/// (0 = automatic).
///
/// # Safety
/// `params`, `input` must be valid; `axes` must point to `n_axes` entries;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_sweep_run(
    params: *const LcParams,
    input: *const LcInputState,
    axes: *const LcAxis,
    n_axes: usize,
    threads: usize,
    out: *mut *mut LcSweep,
) -> LcStatus {
    guard(|| {
        let params = params.as_ref().ok_or_else(|| null("params"))?;
        let input = input.as_ref().ok_or_else(|| null("input"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        if axes.is_null() && n_axes > 0 {
            return Err(null("axes"));
        }
        let axes = if n_axes == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(axes, n_axes)
        };
        let axes = axes
            .iter()
            .map(|a| {
                param_from_raw(a.param)
                    .map(|p| Axis::new(p, a.start, a.stop, a.points))
                    .ok_or_else(|| {
                        (
                            LcStatus::InvalidArgument,
                            format!("unknown parameter code {}", a.param),
                        )
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let spec = SweepSpec {
            axes,
            params: LambdaParams::from(*params),
            input: InputState::from(*input),
        };
        finish_sweep(spec, threads, out)
    })
}

/// Evaluates a figure preset (`"fig1a"`, `"fig1b"`, `"fig2a"`, `"fig2b"`)
/// with `points` samples per axis.
///
/// # Safety
/// `figure` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_figure_run(
    figure: *const c_char,
    points: usize,
    threads: usize,
    out: *mut *mut LcSweep,
) -> LcStatus {
    guard(|| {
        if figure.is_null() {
            return Err(null("figure"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let name = CStr::from_ptr(figure).to_str().map_err(|_| {
            (
                LcStatus::InvalidArgument,
                "figure id is not UTF-8".to_string(),
            )
        })?;
        let spec = figure_preset_by_name(name, points).map_err(sweep_status)?;
        finish_sweep(spec, threads, out)
    })
}

/// Releases a sweep handle. Null is ignored.
///
/// # Safety
/// `sweep` must be null or a live handle from `lc_sweep_run`/`lc_figure_run`.
#[no_mangle]
pub unsafe extern "C" fn lc_sweep_free(sweep: *mut LcSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Number of axes (1 or 2); 0 for a null handle.
///
/// # Safety
/// `sweep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_sweep_axis_count(sweep: *const LcSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.result.axis_values.len())
}

/// Number of grid values; 0 for a null handle.
///
/// # Safety
/// `sweep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_sweep_len(sweep: *const LcSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.result.values.len())
}

/// Copies the coordinates of axis `axis` into `out`.
///
/// # Safety
/// `sweep` must be a live handle; `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lc_sweep_axis_values(
    sweep: *const LcSweep,
    axis: usize,
    out: *mut f64,
    len: usize,
) -> LcStatus {
    guard(|| {
        let sweep = sweep.as_ref().ok_or_else(|| null("sweep"))?;
        let values = sweep
            .result
            .axis_values
            .get(axis)
            .ok_or_else(|| (LcStatus::InvalidArgument, format!("no axis {axis}")))?;
        copy_out(values, out, len)
    })
}

/// Copies I_c values in grid order (last axis fastest) into `out`.
///
/// # Safety
/// `sweep` must be a live handle; `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lc_sweep_values(
    sweep: *const LcSweep,
    out: *mut f64,
    len: usize,
) -> LcStatus {
    guard(|| {
        let sweep = sweep.as_ref().ok_or_else(|| null("sweep"))?;
        copy_out(&sweep.result.values, out, len)
    })
}

/// Largest I_c and its flat grid index (first occurrence on ties).
///
/// # Safety
/// `sweep` must be a live handle; `value` and `index` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_sweep_max(
    sweep: *const LcSweep,
    value: *mut f64,
    index: *mut usize,
) -> LcStatus {
    guard(|| {
        let sweep = sweep.as_ref().ok_or_else(|| null("sweep"))?;
        let value = value.as_mut().ok_or_else(|| null("value"))?;
        let index = index.as_mut().ok_or_else(|| null("index"))?;
        let r = &sweep.result;
        let flat = r
            .values
            .iter()
            .position(|v| *v == r.max_value)
            .ok_or_else(|| (LcStatus::Numeric, "maximum not found in grid".to_string()))?;
        *value = r.max_value;
        *index = flat;
        Ok(())
    })
}

unsafe fn copy_out(values: &[f64], out: *mut f64, len: usize) -> Result<(), (LcStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    if len < values.len() {
        return Err((
            LcStatus::BufferTooSmall,
            format!("need {} doubles, got {len}", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}
