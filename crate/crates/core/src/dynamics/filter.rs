//! Zero-phase FIR low-pass and decimation.

use std::f64::consts::PI;

/// Kaiser window shape parameter (about 80 dB stopband).
const KAISER_BETA: f64 = 8.0;

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half = 0.5 * x;
    for k in 1..200 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Symmetric Kaiser-windowed sinc low-pass with unit DC gain.
///
/// `cutoff` and `transition` are fractions of the sample rate.
pub fn lowpass_kernel(cutoff: f64, transition: f64) -> Vec<f64> {
    let attenuation = 80.0;
    let order = ((attenuation - 8.0) / (2.285 * 2.0 * PI * transition)).ceil() as usize;
    let half = order.div_ceil(2);
    let len = 2 * half + 1;
    let norm = bessel_i0(KAISER_BETA);
    let mut taps: Vec<f64> = (0..len)
        .map(|i| {
            let m = i as f64 - half as f64;
            let sinc = if m == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * PI * cutoff * m).sin() / (PI * m)
            };
            let r = m / half as f64;
            let window = bessel_i0(KAISER_BETA * (1.0 - r * r).max(0.0).sqrt()) / norm;
            sinc * window
        })
        .collect();
    let dc: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= dc;
    }
    taps
}

/// Low-passes `signal` at `cutoff_fraction × (output rate)` with a centered
/// (zero-phase) kernel, then keeps every `factor`-th sample starting at 0.
/// Samples beyond either end are treated as zero.
pub fn decimate_zero_phase(signal: &[f64], factor: usize, cutoff_fraction: f64) -> Vec<f64> {
    assert!(factor >= 1);
    if factor == 1 {
        return signal.to_vec();
    }
    let fs_ratio = 1.0 / factor as f64;
    let kernel = lowpass_kernel(cutoff_fraction * fs_ratio, 0.1 * fs_ratio);
    let half = (kernel.len() / 2) as isize;
    let n = signal.len() as isize;
    let out_len = signal.len().div_ceil(factor);
    (0..out_len)
        .map(|k| {
            let center = (k * factor) as isize;
            let lo = (center - half).max(0);
            let hi = (center + half).min(n - 1);
            (lo..=hi)
                .map(|i| signal[i as usize] * kernel[(i - center + half) as usize])
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passband_and_stopband() {
        let factor = 8;
        let fs_in = 4000.0;
        let tone = |f: f64| -> Vec<f64> { (0..16000).map(|i| (2.0 * PI * f * i as f64 / fs_in).sin()).collect() };
        let rms_mid = |x: &[f64]| {
            let mid = &x[x.len() / 4..3 * x.len() / 4];
            (mid.iter().map(|v| v * v).sum::<f64>() / mid.len() as f64).sqrt()
        };
        // 150 Hz passes, 400 Hz (aliasing range for 500 Hz output) is rejected.
        let pass = decimate_zero_phase(&tone(150.0), factor, 0.45);
        assert!((rms_mid(&pass) - 0.5f64.sqrt()).abs() < 1e-3);
        let stop = decimate_zero_phase(&tone(400.0), factor, 0.45);
        assert!(rms_mid(&stop) < 1e-3);
    }

    #[test]
    fn zero_phase_on_smooth_signal() {
        let factor = 4;
        let x: Vec<f64> = (0..4000).map(|i| (i as f64 * 0.003).sin()).collect();
        let y = decimate_zero_phase(&x, factor, 0.45);
        for k in 200..800 {
            assert!((y[k] - x[k * factor]).abs() < 1e-4);
        }
    }
}
