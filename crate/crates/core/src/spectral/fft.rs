use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place unnormalized DFT over the selected axes of a row-major array.
/// `Forward` uses e^{-i...}, `Inverse` uses e^{+i...}.
pub fn fft_axes(data: &mut [Complex64], shape: &[usize], axes: &[usize], direction: FftDirection) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "data length does not match shape");
    let mut planner = FftPlanner::<f64>::new();
    for &axis in axes {
        let len = shape[axis];
        if len <= 1 {
            continue;
        }
        let fft = planner.plan_fft(len, direction);
        let stride: usize = shape[axis + 1..].iter().product();
        if stride == 1 {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for chunk in data.chunks_exact_mut(len) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = len * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for outer in 0..total / block {
            let base = outer * block;
            for inner in 0..stride {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride + inner];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride + inner] = *v;
                }
            }
        }
    }
}

/// Unnormalized 1D inverse DFT of a buffer.
pub fn ifft_1d(buf: &mut [Complex64]) {
    let n = buf.len();
    fft_axes(buf, &[n], &[0], FftDirection::Inverse);
}

pub fn fft_1d(buf: &mut [Complex64]) {
    let n = buf.len();
    fft_axes(buf, &[n], &[0], FftDirection::Forward);
}
