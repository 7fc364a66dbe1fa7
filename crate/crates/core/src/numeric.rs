//! One-dimensional minimization used for the attained infima `inf_s d(x, sigma(s))`.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Settings for [`minimize_bracketed`].
#[derive(Debug, Clone, Copy)]
pub struct MinimizeConfig {
    /// Largest spacing of the initial bracketing grid.
    pub grid_step: f64,
    pub min_grid: usize,
    pub max_grid: usize,
    /// Target width of the final bracket.
    pub x_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            grid_step: 0.25,
            min_grid: 64,
            max_grid: 4096,
            x_tolerance: 1e-12,
            max_iterations: 400,
        }
    }
}

/// Minimizer and minimum value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Minimizes `f` on `[lo, hi]`: a bracketing grid locates the best cell, golden
/// section refines inside it, and if golden section lands above the best grid
/// value (the function need not be unimodal) the search falls back to grid
/// refinement with step halving around the best grid point.
pub fn minimize_bracketed<F>(mut f: F, lo: f64, hi: f64, cfg: &MinimizeConfig) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Argument(format!("invalid bracket [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(Minimum { x: lo, value: f(lo)? });
    }
    let cells = (((hi - lo) / cfg.grid_step).ceil() as usize).clamp(cfg.min_grid, cfg.max_grid);
    let h = (hi - lo) / cells as f64;
    let mut best = Minimum { x: lo, value: f(lo)? };
    let mut best_index = 0usize;
    for k in 1..=cells {
        let x = if k == cells { hi } else { lo + k as f64 * h };
        let v = f(x)?;
        if v < best.value {
            best = Minimum { x, value: v };
            best_index = k;
        }
    }
    let grid_best = best;
    let a0 = lo + best_index.saturating_sub(1) as f64 * h;
    let b0 = (lo + (best_index + 1) as f64 * h).min(hi);
    let golden = golden_section(&mut f, a0, b0, cfg)?;
    if golden.value <= grid_best.value {
        return Ok(golden);
    }
    // fallback: local grid refinement with step halving
    let mut step = h;
    let mut centre = grid_best;
    let mut iterations = 0;
    while step > cfg.x_tolerance {
        iterations += 1;
        if iterations > cfg.max_iterations {
            return Err(Error::Convergence {
                what: "bracketed minimization",
                detail: format!("grid refinement did not reach width {}", cfg.x_tolerance),
            });
        }
        step *= 0.5;
        for k in -4i32..=4 {
            let x = (centre.x + k as f64 * step * 0.5).clamp(lo, hi);
            let v = f(x)?;
            if v < centre.value {
                centre = Minimum { x, value: v };
            }
        }
    }
    Ok(centre)
}

/// Golden-section search on `[a, b]`.
pub fn golden_section<F>(f: &mut F, mut a: f64, mut b: f64, cfg: &MinimizeConfig) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;
    while (b - a) > cfg.x_tolerance * (1.0 + a.abs().max(b.abs())) {
        iterations += 1;
        if iterations > cfg.max_iterations {
            return Err(Error::Convergence {
                what: "golden-section search",
                detail: format!("bracket width {} after {} iterations", b - a, cfg.max_iterations),
            });
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let (fa, fb) = (f(a)?, f(b)?);
    let mut best = Minimum { x: c, value: fc };
    for (x, v) in [(d, fd), (a, fa), (b, fb)] {
        if v < best.value {
            best = Minimum { x, value: v };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_parabola() {
        let m = minimize_bracketed(|x| Ok((x - 1.3) * (x - 1.3) + 2.0), 0.0, 5.0, &MinimizeConfig::default()).unwrap();
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn picks_global_of_two_kinks() {
        // local minima at 7 (2.25) and 8 (2.75), as for the ladder rung detour
        let f = |s: f64| Ok(2.0 + f64::min(0.25 + (s - 7.0).abs(), 0.75 + (s - 8.0).abs()));
        let m = minimize_bracketed(f, 0.0, 20.0, &MinimizeConfig::default()).unwrap();
        assert!((m.x - 7.0).abs() < 1e-9);
        assert!((m.value - 2.25).abs() < 1e-9);
    }

    #[test]
    fn degenerate_bracket() {
        let m = minimize_bracketed(|x| Ok(x * x), 2.0, 2.0, &MinimizeConfig::default()).unwrap();
        assert_eq!(m.x, 2.0);
    }
}
