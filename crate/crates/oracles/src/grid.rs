/// Result of an exhaustive scan of a function on `t = k * step`.
#[derive(Debug, Clone, Copy)]
pub struct GridScan {
    pub argmax: f64,
    pub max: f64,
    /// Strict interior local maxima: points above their left neighbour and
    /// not below their right neighbour, counting runs of ties once.
    pub local_maxima: usize,
    pub end: f64,
}

/// Scans `g` from `start` in steps of `step`, extending the domain until it
/// reaches `max(min_end, 2 * argmax + 1)` and the current value sits below the
/// running maximum.
pub fn scan<G: Fn(f64) -> f64>(g: G, start: f64, step: f64, min_end: f64) -> GridScan {
    let mut k: u64 = 0;
    let mut prev = g(start);
    let mut best = (start, prev);
    let mut rising = false;
    let mut local_maxima = 0;
    loop {
        k += 1;
        let t = start + k as f64 * step;
        let v = g(t);
        if v > prev {
            rising = true;
        } else if v < prev && rising {
            local_maxima += 1;
            rising = false;
        }
        if v > best.1 {
            best = (t, v);
        }
        prev = v;
        if t >= min_end.max(2.0 * best.0 + 1.0) && v < best.1 {
            return GridScan {
                argmax: best.0,
                max: best.1,
                local_maxima,
                end: t,
            };
        }
    }
}

/// True when `values` never increase.
pub fn non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}
