//! Adaptive Simpson quadrature with Richardson correction.

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Integrates a fallible integrand over `[a, b]` to absolute tolerance `tol`.
///
/// Fails with `QuadratureFailure` when a panel still misses its share of the
/// tolerance after `max_depth` bisections; errors raised by the integrand
/// are passed through unchanged.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    refine(
        &mut f,
        Panel {
            a,
            b,
            fa,
            fm,
            fb,
            whole,
        },
        tol,
        max_depth,
    )
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn refine<F>(f: &mut F, p: Panel, tol: f64, depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || lm == p.a || rm == p.b || lm == m || rm == m {
        return Err(Error::QuadratureFailure { a: p.a, b: p.b });
    }
    let l = refine(
        f,
        Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        },
        0.5 * tol,
        depth - 1,
    )?;
    let r = refine(
        f,
        Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        },
        0.5 * tol,
        depth - 1,
    )?;
    Ok(l + r)
}
