//! Power-law curve fitting `y = a x^b + c` for the scaling studies.
//!
//! Levenberg-Marquardt damped Gauss-Newton, initialized from a log-log
//! linear regression with `c = 0`.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

/// Fitted model `a * x^b + c` with its residual sum of squares.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rss: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("lengths differ: {xs} xs vs {ys} ys")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("xs must be strictly increasing and positive")]
    BadAbscissae,
    #[error("ys must be positive and finite")]
    BadOrdinates,
}

fn rss_of(xs: &[f64], ys: &[f64], a: f64, b: f64, c: f64) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (a * x.powf(b) + c);
            r * r
        })
        .sum()
}

/// Solve the damped 3x3 normal equations in place.
#[allow(clippy::needless_range_loop)]
fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        m.swap(col, piv);
        if m[col][col].abs() < 1e-300 {
            return None;
        }
        for row in 0..3 {
            if row == col {
                continue;
            }
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Least-squares fit of `a x^b + c`.
///
/// Converges when the step norm drops below 1e-10 or after 200 iterations.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<FitResult, FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(FitError::TooFewPoints(xs.len()));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) || xs[0] <= 0.0 || xs.iter().any(|x| !x.is_finite()) {
        return Err(FitError::BadAbscissae);
    }
    if ys.iter().any(|&y| y <= 0.0 || !y.is_finite()) {
        return Err(FitError::BadOrdinates);
    }
    let n = xs.len();

    // log-log regression seeds (a, b); c starts at 0
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n as f64;
    let my = ly.iter().sum::<f64>() / n as f64;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let mut b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let mut a = (my - b * mx).exp();
    let mut c = 0.0;

    let mut rss = rss_of(xs, ys, a, b, c);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        // Jacobian of the residuals r_i = y_i - (a x^b + c)
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for (&x, &y) in xs.iter().zip(ys) {
            let xb = x.powf(b);
            let j = [-xb, -a * xb * x.ln(), -1.0];
            let r = y - (a * xb + c);
            for p in 0..3 {
                for q in 0..3 {
                    jtj[p][q] += j[p] * j[q];
                }
                jtr[p] += j[p] * r;
            }
        }
        let mut stepped = false;
        for _ in 0..50 {
            let mut m = [[0.0f64; 4]; 3];
            for p in 0..3 {
                for q in 0..3 {
                    m[p][q] = jtj[p][q];
                }
                m[p][p] += lambda * jtj[p][p].max(1e-12);
                m[p][3] = -jtr[p];
            }
            let Some(delta) = solve3(m) else { break };
            let (na, nb, nc) = (a + delta[0], b + delta[1], c + delta[2]);
            let new_rss = rss_of(xs, ys, na, nb, nc);
            if new_rss.is_finite() && new_rss <= rss {
                let step = (delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]).sqrt();
                a = na;
                b = nb;
                c = nc;
                rss = new_rss;
                lambda = (lambda / 3.0).max(1e-12);
                stepped = true;
                if step < 1e-10 {
                    return Ok(FitResult {
                        a,
                        b,
                        c,
                        rss,
                        points: n,
                    });
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !stepped {
            break; // damping exhausted: local minimum
        }
    }
    Ok(FitResult {
        a,
        b,
        c,
        rss,
        points: n,
    })
}
