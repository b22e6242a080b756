/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integral of `f` over `[0, t]` to relative tolerance `rel_tol`, for
/// integrands concentrated near 0 on the scale `scale`.
///
/// The domain is cut into panels `[0, scale], [scale, 3 scale], ...` whose
/// widths double, and each panel is integrated adaptively. A first pass
/// estimates the magnitude that sets the absolute tolerance of the second.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(f: &F, t: f64, scale: f64, rel_tol: f64) -> f64 {
    let panels = panels(t, scale);
    let rough: f64 = panels
        .iter()
        .map(|&(a, b)| adaptive_simpson(f, a, b, 1e-6 * (b - a) * f(a).abs().max(f(b).abs())))
        .sum();
    let tol = rel_tol * rough.abs() / panels.len() as f64;
    panels.iter().map(|&(a, b)| adaptive_simpson(f, a, b, tol)).sum()
}

fn panels(t: f64, scale: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut lo = 0.0;
    let mut width = scale;
    while lo < t {
        let hi = (lo + width).min(t);
        out.push((lo, hi));
        lo = hi;
        width *= 2.0;
    }
    out
}
