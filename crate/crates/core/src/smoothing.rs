//! Richardson smoothing with 2D frequency-domain error analysis.
//!
//! The solver cannot start from an arbitrary vector, so smoothing runs one
//! Richardson step: transform the residual `r = b - L x0` back to the source
//! space with a truncated solve `e ~= L^+ r` and return `x1 = x0 + e`. The
//! error's 2D spectrum then shows which frequency components the truncated
//! solve damps.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Demand, Graph};
use crate::solver::{kosz_solve, SolverConfig, SolverError};

/// Errors from the frequency analysis.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SmoothingError {
    #[error("field length {got} does not match {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        got: usize,
    },
    #[error("cutoff {0} must lie strictly between 0 and 1")]
    BadCutoff(f64),
    #[error("spectrum is identically zero")]
    DegenerateSpectrum,
}

/// DC-centered 2D spectrum magnitudes of a `rows x cols` field; the zero
/// frequency sits at `(rows/2, cols/2)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum {
    pub rows: usize,
    pub cols: usize,
    /// Row-major magnitudes, `rows * cols` entries.
    pub magnitudes: Vec<f64>,
}

/// Add i.i.d. uniform noise in `[-1, 1]` to every entry.
pub fn add_noise(x: &[f64], rng_seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    x.iter().map(|&v| v + rng.random_range(-1.0..1.0)).collect()
}

/// One Richardson step `x1 = x0 + e`, where `e` approximates `L^+ r` for the
/// residual `r = b - L x0` by running the cycle-repair solver for exactly
/// `iterations` repairs (tolerance disabled).
pub fn richardson_step(
    g: &Graph,
    b: &Demand,
    x0: &[f64],
    cfg: &SolverConfig,
    iterations: u64,
) -> Result<Vec<f64>, SolverError> {
    let lx0 = g
        .laplacian_apply(x0)
        .map_err(|_| SolverError::DimensionMismatch {
            expected: g.vertex_count(),
            got: x0.len(),
        })?;
    let r: Vec<f64> = b
        .as_slice()
        .iter()
        .zip(&lx0)
        .map(|(bi, li)| bi - li)
        .collect();
    if r.iter().map(|v| v * v).sum::<f64>() == 0.0 {
        return Ok(x0.to_vec()); // x0 already solves the system
    }
    let r = Demand::new(r).expect("residual of a balanced demand stays balanced");
    let inner = SolverConfig {
        tolerance: 0.0,
        max_iterations: iterations,
        residual_check_interval: Some(iterations.max(1)),
        ..cfg.clone()
    };
    let e = kosz_solve(g, &r, &inner)?;
    Ok(x0.iter().zip(&e.x).map(|(a, b)| a + b).collect())
}

/// Direct 2D DFT magnitudes of a row-major field, DC-centered.
///
/// Evaluated separably (row pass then column pass); no FFT, which is plenty
/// at the 32x32 scale this is used for.
pub fn dft2_magnitude(field: &[f64], rows: usize, cols: usize) -> Result<Spectrum, SmoothingError> {
    if field.len() != rows * cols {
        return Err(SmoothingError::DimensionMismatch {
            rows,
            cols,
            got: field.len(),
        });
    }
    let tau = 2.0 * core::f64::consts::PI;
    // row pass: partial[r][q] = sum_c field[r][c] e^{-i tau q c / cols}
    let mut part_re = vec![0.0; rows * cols];
    let mut part_im = vec![0.0; rows * cols];
    for r in 0..rows {
        for q in 0..cols {
            let (mut re, mut im) = (0.0, 0.0);
            for c in 0..cols {
                let angle = tau * (q * c % cols) as f64 / cols as f64;
                let v = field[r * cols + c];
                re += v * angle.cos();
                im -= v * angle.sin();
            }
            part_re[r * cols + q] = re;
            part_im[r * cols + q] = im;
        }
    }
    let mut magnitudes = vec![0.0; rows * cols];
    for q in 0..cols {
        for p in 0..rows {
            let (mut re, mut im) = (0.0, 0.0);
            for r in 0..rows {
                let angle = tau * (p * r % rows) as f64 / rows as f64;
                let (c, s) = (angle.cos(), -angle.sin());
                let (ar, ai) = (part_re[r * cols + q], part_im[r * cols + q]);
                re += ar * c - ai * s;
                im += ar * s + ai * c;
            }
            // shift so the zero frequency lands in the middle
            let si = (p + rows / 2) % rows;
            let sj = (q + cols / 2) % cols;
            magnitudes[si * cols + sj] = (re * re + im * im).sqrt();
        }
    }
    Ok(Spectrum {
        rows,
        cols,
        magnitudes,
    })
}

impl Spectrum {
    /// Centered frequency index of bin `(i, j)`.
    pub fn frequency(&self, i: usize, j: usize) -> (isize, isize) {
        (
            i as isize - (self.rows / 2) as isize,
            j as isize - (self.cols / 2) as isize,
        )
    }

    /// Total spectral energy `sum |F|^2`.
    pub fn energy(&self) -> f64 {
        self.magnitudes.iter().map(|m| m * m).sum()
    }
}

/// Fraction of the spectral energy in bins whose normalized centered
/// frequency exceeds `cutoff` in the Chebyshev norm.
pub fn hf_energy_ratio(s: &Spectrum, cutoff: f64) -> Result<f64, SmoothingError> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(SmoothingError::BadCutoff(cutoff));
    }
    let fmax_r = (s.rows / 2).max(1) as f64;
    let fmax_c = (s.cols / 2).max(1) as f64;
    let mut total = 0.0;
    let mut high = 0.0;
    for i in 0..s.rows {
        for j in 0..s.cols {
            let (fi, fj) = s.frequency(i, j);
            let nu = (fi.abs() as f64 / fmax_r).max(fj.abs() as f64 / fmax_c);
            let e = s.magnitudes[i * s.cols + j];
            let e = e * e;
            total += e;
            if nu > cutoff {
                high += e;
            }
        }
    }
    if total == 0.0 {
        return Err(SmoothingError::DegenerateSpectrum);
    }
    Ok(high / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;
    use crate::solver::TreeKind;

    #[test]
    fn noise_is_bounded_deterministic_and_centered() {
        let x = vec![0.5; 100_000];
        let a = add_noise(&x, 11);
        let b = add_noise(&x, 11);
        assert_eq!(a, b);
        let c = add_noise(&x, 12);
        assert_ne!(a, c);
        let mut mean = 0.0;
        for (ai, xi) in a.iter().zip(&x) {
            assert!((ai - xi).abs() <= 1.0);
            mean += ai - xi;
        }
        mean /= x.len() as f64;
        assert!(mean.abs() < 0.01, "noise mean {mean}");
    }

    #[test]
    fn constant_field_is_all_dc() {
        let s = dft2_magnitude(&[3.0; 12], 3, 4).unwrap();
        let dc = s.magnitudes[4 + 2]; // center bin of the 3x4 layout
        assert!((dc - 36.0).abs() < 1e-9);
        let rest: f64 = s.energy() - dc * dc;
        assert!(rest.abs() < 1e-12 * dc * dc);
        assert!(hf_energy_ratio(&s, 0.5).unwrap() < 1e-20);
    }

    #[test]
    fn cosine_hits_two_symmetric_bins() {
        let (rows, cols) = (8, 8);
        let mut field = vec![0.0; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                field[r * cols + c] =
                    (2.0 * core::f64::consts::PI * 2.0 * c as f64 / cols as f64).cos();
            }
        }
        let s = dft2_magnitude(&field, rows, cols).unwrap();
        let mut freqs: Vec<(isize, isize)> = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                if s.magnitudes[i * cols + j] > 1e-6 {
                    freqs.push(s.frequency(i, j));
                }
            }
        }
        freqs.sort();
        assert_eq!(freqs, vec![(0, -2), (0, 2)]);
    }

    #[test]
    fn parseval_holds() {
        let g = grid_graph(9, 7).unwrap();
        let _ = g;
        let field = add_noise(&vec![0.0; 63], 3);
        let s = dft2_magnitude(&field, 9, 7).unwrap();
        let spatial: f64 = field.iter().map(|v| v * v).sum();
        let spectral = s.energy() / 63.0;
        assert!((spatial - spectral).abs() <= 1e-9 * spatial);
    }

    #[test]
    fn single_high_frequency_mode() {
        let (rows, cols) = (8, 8);
        let mut field = vec![0.0; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                // alternating sign pattern = Nyquist frequency on both axes
                field[r * cols + c] = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        let s = dft2_magnitude(&field, rows, cols).unwrap();
        let ratio = hf_energy_ratio(&s, 0.5).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn white_noise_hf_ratio_matches_bin_count() {
        let field = add_noise(&vec![0.0; 32 * 32], 17);
        let s = dft2_magnitude(&field, 32, 32).unwrap();
        let ratio = hf_energy_ratio(&s, 0.5).unwrap();
        // fraction of bins outside the centered half-band square
        assert!((ratio - 0.75).abs() < 0.05, "got {ratio}");
    }

    #[test]
    fn cutoff_and_degenerate_errors() {
        let s = dft2_magnitude(&[0.0; 16], 4, 4).unwrap();
        assert!(matches!(
            hf_energy_ratio(&s, 0.5),
            Err(SmoothingError::DegenerateSpectrum)
        ));
        let s = dft2_magnitude(&[1.0; 16], 4, 4).unwrap();
        assert!(matches!(
            hf_energy_ratio(&s, 0.0),
            Err(SmoothingError::BadCutoff(_))
        ));
        assert!(matches!(
            hf_energy_ratio(&s, 1.0),
            Err(SmoothingError::BadCutoff(_))
        ));
        assert!(matches!(
            dft2_magnitude(&[1.0; 10], 4, 4),
            Err(SmoothingError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn richardson_with_exact_inner_solve() {
        // on a tree the initial flow is already exact, so one Richardson
        // step fixes any starting vector
        let g = grid_graph(1, 6).unwrap();
        let x_true = vec![2.5, 1.5, 0.5, -0.5, -1.5, -2.5];
        let b = Demand::new(g.laplacian_apply(&x_true).unwrap()).unwrap();
        let x0 = add_noise(&x_true, 5);
        let cfg = SolverConfig::default();
        let x1 = richardson_step(&g, &b, &x0, &cfg, 0).unwrap();
        let res = g.relative_residual(b.as_slice(), &x1).unwrap();
        assert!(res <= 1e-12, "residual {res}");
    }

    #[test]
    fn richardson_zero_iterations_uses_initial_flow_potentials() {
        let g = grid_graph(4, 4).unwrap();
        let x_true = kosz_testutil_free_random(16);
        let b = Demand::new(g.laplacian_apply(&x_true).unwrap()).unwrap();
        let x0 = add_noise(&x_true, 9);
        let cfg = SolverConfig {
            tree: TreeKind::SpecialGrid { rows: 4, cols: 4 },
            ..SolverConfig::default()
        };
        let x1 = richardson_step(&g, &b, &x0, &cfg, 0).unwrap();
        // the raw tree-flow potentials are typically large compared to b
        let err_before: f64 = x0.iter().zip(&x_true).map(|(a, b)| (a - b) * (a - b)).sum();
        let err_after: f64 = x1.iter().zip(&x_true).map(|(a, b)| (a - b) * (a - b)).sum();
        assert!(err_after > err_before, "{err_after} vs {err_before}");
    }

    // tiny local helper: deterministic mean-zero vector
    fn kosz_testutil_free_random(n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n)
            .map(|i| ((i * 37 + 5) % 11) as f64 / 11.0 - 0.5)
            .collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        for x in &mut v {
            *x -= mean;
        }
        v
    }
}
