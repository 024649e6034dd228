//! Dormand-Prince 5(4) embedded Runge-Kutta pair with step-size control and
//! cubic Hermite dense output.

use crate::error::{Error, Result};

// Node offsets are unused: the right-hand side is autonomous.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Per-step relative error bound.
    pub rtol: f64,
    /// Absolute floor of the error scale, for components passing through zero.
    pub atol: f64,
    /// Steps below this abort the integration.
    pub h_min: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn relative(tol: f64) -> Self {
        StepControl {
            rtol: tol,
            atol: 1e-30,
            h_min: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

/// Result of one integration: values at the requested output times and
/// the point where integration ended.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub outputs: Vec<(f64, [f64; N])>,
    pub end: (f64, [f64; N]),
    /// `true` when the stop predicate ended the run before `t_end`.
    pub stopped_early: bool,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let s: f64 = terms.iter().map(|(c, k)| c * k[i]).sum();
        *o += h * s;
    }
    out
}

fn hermite<const N: usize>(
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    t1: f64,
    y1: &[f64; N],
    f1: &[f64; N],
    t: f64,
) -> [f64; N] {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

fn error_norm<const N: usize>(
    err: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    ctrl: &StepControl,
) -> f64 {
    (0..N)
        .map(|i| {
            let scale = ctrl.atol + ctrl.rtol * y0[i].abs().max(y1[i].abs());
            (err[i] / scale).abs()
        })
        .fold(0.0, f64::max)
}

/// Integrates `dy/dt = f(y)` from `t0` to `t_end`.
///
/// `output_times` must be sorted; values there come from cubic Hermite
/// interpolation across the accepted step that spans them. After every
/// accepted step `stop` is consulted; when it returns true the run ends at
/// that step.
pub fn solve<const N: usize, F, S>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    output_times: &[f64],
    ctrl: &StepControl,
    mut stop: S,
) -> Result<Solution<N>>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
    S: FnMut(f64, &[f64; N]) -> bool,
{
    if !(t_end > t0) {
        return Err(Error::Domain(format!("t_end {t_end} must exceed t0 {t0}")));
    }
    let mut outputs = Vec::with_capacity(output_times.len());
    let mut pending = output_times
        .iter()
        .copied()
        .filter(|&t| t >= t0 && t <= t_end)
        .peekable();
    while let Some(&t) = pending.peek() {
        if t > t0 {
            break;
        }
        outputs.push((t, y0));
        pending.next();
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(&y)?;
    let mut h = initial_step(&mut f, &y, &k1, t_end - t0, ctrl)?;
    let mut accepted = 0;
    let mut rejected = 0;
    let mut stopped_early = false;

    while t < t_end {
        if accepted + rejected >= ctrl.max_steps {
            return Err(Error::NumericalDegeneracy(format!(
                "step budget of {} exhausted at t={t}",
                ctrl.max_steps
            )));
        }
        if h < ctrl.h_min {
            return Err(Error::StepUnderflow {
                step: h,
                t,
                beta_z: y.first().copied().unwrap_or(f64::NAN),
                beta_d: y.get(1).copied().unwrap_or(f64::NAN),
            });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = f(&axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = f(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(&axpy(
            &y,
            h,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        ))?;
        let k6 = f(&axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ))?;
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(&y_new)?;
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let norm = error_norm(&err, &y, &y_new, ctrl);
        let factor = if !norm.is_finite() {
            MIN_FACTOR
        } else if norm == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };

        if norm <= 1.0 {
            let t_new = if last { t_end } else { t + h };
            while let Some(&to) = pending.peek() {
                if to > t_new {
                    break;
                }
                outputs.push((to, hermite(t, &y, &k1, t_new, &y_new, &k7, to)));
                pending.next();
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            accepted += 1;
            if stop(t, &y) && t < t_end {
                stopped_early = true;
                break;
            }
            h *= factor;
        } else {
            rejected += 1;
            h *= factor.min(1.0);
        }
    }

    Ok(Solution {
        outputs,
        end: (t, y),
        stopped_early,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    y0: &[f64; N],
    f0: &[f64; N],
    span: f64,
    ctrl: &StepControl,
) -> Result<f64>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
{
    let scale = |i: usize| ctrl.atol + ctrl.rtol * y0[i].abs();
    let d0 = (0..N).map(|i| (y0[i] / scale(i)).abs()).fold(0.0, f64::max);
    let d1 = (0..N).map(|i| (f0[i] / scale(i)).abs()).fold(0.0, f64::max);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = f(&y1)?;
    let d2 = (0..N)
        .map(|i| ((f1[i] - f0[i]) / scale(i)).abs())
        .fold(0.0, f64::max)
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(span).max(ctrl.h_min))
}
