//! Thin helpers over `rustfft`: unnormalized 1-d transforms and a square 2-d
//! transform by rows + in-place transpose.
//!
//! All scaling conventions (`1/N`, grid steps, periods) are applied by the
//! callers, which keeps each use site's normalization visible next to its
//! derivation.

use num_complex::Complex;
use rustfft::{FftDirection, FftNum, FftPlanner};

/// Unnormalized in-place DFT of `data`; `inverse` selects the `e^{+i…}`
/// convention.
pub fn fft_in_place<T: FftNum>(data: &mut [Complex<T>], inverse: bool) {
    let dir = if inverse {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(data.len(), dir);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
}

/// Unnormalized in-place 2-d DFT of a row-major `n × n` array.
pub fn fft2_square_in_place<T: FftNum>(data: &mut [Complex<T>], n: usize, inverse: bool) {
    assert_eq!(data.len(), n * n, "array is not n × n");
    let dir = if inverse {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(n, dir);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    for r in 0..n {
        fft.process_with_scratch(&mut data[r * n..(r + 1) * n], &mut scratch);
    }
    transpose_square_in_place(data, n);
    for r in 0..n {
        fft.process_with_scratch(&mut data[r * n..(r + 1) * n], &mut scratch);
    }
    transpose_square_in_place(data, n);
}

/// In-place transpose of a row-major square array.
pub fn transpose_square_in_place<T: Copy>(data: &mut [T], n: usize) {
    for r in 0..n {
        for c in r + 1..n {
            data.swap(r * n + c, c * n + r);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_1d() {
        let n = 64;
        let orig: Vec<Complex<f64>> = (0..n)
            .map(|i| Complex::new((i as f64 * 0.31).sin(), (i as f64 * 0.17).cos()))
            .collect();
        let mut data = orig.clone();
        fft_in_place(&mut data, false);
        fft_in_place(&mut data, true);
        for (a, b) in data.iter().zip(orig.iter()) {
            assert!((a / n as f64 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn matches_direct_dft() {
        let n = 16;
        let orig: Vec<Complex<f64>> = (0..n)
            .map(|i| Complex::new((i as f64).sqrt(), -(i as f64) * 0.2))
            .collect();
        let mut data = orig.clone();
        fft_in_place(&mut data, false);
        for k in 0..n {
            let mut acc = Complex::new(0.0, 0.0);
            for (m, v) in orig.iter().enumerate() {
                let arg = -2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64;
                acc += v * Complex::new(arg.cos(), arg.sin());
            }
            assert!((data[k] - acc).norm() < 1e-11, "bin {k}");
        }
    }

    #[test]
    fn round_trip_2d() {
        let n = 32;
        let orig: Vec<Complex<f64>> = (0..n * n)
            .map(|i| Complex::new((i as f64 * 0.013).sin(), (i as f64 * 0.007).cos()))
            .collect();
        let mut data = orig.clone();
        fft2_square_in_place(&mut data, n, false);
        fft2_square_in_place(&mut data, n, true);
        let scale = (n * n) as f64;
        for (a, b) in data.iter().zip(orig.iter()) {
            assert!((a / scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn separable_input_has_separable_spectrum() {
        // rows ⊗ cols product input: the 2-d DFT is the product of 1-d DFTs.
        let n = 8;
        let row: Vec<Complex<f64>> = (0..n).map(|i| Complex::new(0.3 * i as f64, 0.1)).collect();
        let col: Vec<Complex<f64>> =
            (0..n).map(|i| Complex::new((i as f64).cos(), -0.2)).collect();
        let mut data: Vec<Complex<f64>> = (0..n * n).map(|i| row[i / n] * col[i % n]).collect();
        fft2_square_in_place(&mut data, n, false);
        let mut row_f = row.clone();
        let mut col_f = col.clone();
        fft_in_place(&mut row_f, false);
        fft_in_place(&mut col_f, false);
        for r in 0..n {
            for c in 0..n {
                assert!((data[r * n + c] - row_f[r] * col_f[c]).norm() < 1e-12);
            }
        }
    }
}
