use proptest::prelude::*;
use track_sentinel::wavelet::{
    coefficient_sum, cwt, cwt_with, make_scale_grid, Axis, Convolution, ScaleGrid, WaveletKind,
};

fn grid(order: u32) -> ScaleGrid {
    make_scale_grid(1.0, (0.05, 0.4), 12, WaveletKind::GaussianDerivative(order)).unwrap()
}

fn series(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

fn max_abs(rows: &[Vec<f64>]) -> f64 {
    rows.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cwt_is_linear(x in series(480), y in series(480), a in -3.0f64..3.0, b in -3.0f64..3.0, order in 1u32..5) {
        let g = grid(order);
        let z: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let wx = cwt(&x, &g, Axis::Time, 0.0).unwrap();
        let wy = cwt(&y, &g, Axis::Time, 0.0).unwrap();
        let wz = cwt(&z, &g, Axis::Time, 0.0).unwrap();
        let scale = max_abs(&wz.coefficients).max(1e-300);
        for j in 0..g.len() {
            for k in 0..z.len() {
                let expect = a * wx.coefficients[j][k] + b * wy.coefficients[j][k];
                prop_assert!((wz.coefficients[j][k] - expect).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn interior_is_shift_equivariant(x in series(200), shift in 1usize..20) {
        let g = grid(1);
        let shifted: Vec<f64> = (0..x.len()).map(|i| if i >= shift { x[i - shift] } else { 0.0 }).collect();
        let w0 = cwt(&x, &g, Axis::Time, 0.0).unwrap();
        let w1 = cwt(&shifted, &g, Axis::Time, 0.0).unwrap();
        let peak = max_abs(&w0.coefficients).max(1e-300);
        for j in 0..g.len() {
            for b in 0..x.len() - shift {
                if w0.mask[j][b] || w1.mask[j][b + shift] {
                    continue;
                }
                prop_assert!((w1.coefficients[j][b + shift] - w0.coefficients[j][b]).abs() <= 1e-8 * peak);
            }
        }
    }

    #[test]
    fn index_is_nonnegative_and_homogeneous(x in series(480), alpha in 1e-3f64..1e3) {
        let g = grid(2);
        let s = coefficient_sum(&cwt(&x, &g, Axis::Time, 0.0).unwrap());
        prop_assert!(s.values.iter().all(|&v| v >= 0.0));
        let scaled: Vec<f64> = x.iter().map(|v| -alpha * v).collect();
        let s2 = coefficient_sum(&cwt(&scaled, &g, Axis::Time, 0.0).unwrap());
        for (a, b) in s.values.iter().zip(&s2.values) {
            prop_assert!((b - alpha * a).abs() <= 1e-9 * (alpha * a).max(1e-300));
        }
        let argmax = |v: &[f64]| v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i);
        prop_assert_eq!(argmax(&s.values), argmax(&s2.values));
    }

    #[test]
    fn fft_matches_direct(x in series(2100), order in 1u32..5) {
        let g = make_scale_grid(1.0, (0.02, 0.4), 16, WaveletKind::GaussianDerivative(order)).unwrap();
        let d = cwt_with(&x, &g, Axis::Time, 0.0, Convolution::Direct).unwrap();
        let f = cwt_with(&x, &g, Axis::Time, 0.0, Convolution::Fft).unwrap();
        let scale = max_abs(&d.coefficients);
        for (rd, rf) in d.coefficients.iter().zip(&f.coefficients) {
            for (u, v) in rd.iter().zip(rf) {
                prop_assert!((u - v).abs() <= 1e-8 * scale);
            }
        }
        prop_assert_eq!(d.mask, f.mask);
    }

    #[test]
    fn impulse_is_located(pos in 40usize..120) {
        let g = grid(1);
        let mut x = vec![0.0; 160];
        x[pos] = 1.0;
        let s = coefficient_sum(&cwt(&x, &g, Axis::Time, 0.0).unwrap());
        let k = s.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        prop_assert!(k.abs_diff(pos) <= 2, "argmax {} for impulse at {}", k, pos);
    }
}

#[test]
fn fft_matches_direct_at_4096() {
    let g = make_scale_grid(0.14, (0.29, 2.9), 48, WaveletKind::default()).unwrap();
    let x: Vec<f64> = (0..4096)
        .map(|i| ((i as f64) * 0.37).sin() + ((i * i) % 97) as f64 / 97.0)
        .collect();
    let d = cwt_with(&x, &g, Axis::Space, 0.0, Convolution::Direct).unwrap();
    let f = cwt_with(&x, &g, Axis::Space, 0.0, Convolution::Fft).unwrap();
    let scale = max_abs(&d.coefficients);
    let err = d
        .coefficients
        .iter()
        .flatten()
        .zip(f.coefficients.iter().flatten())
        .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
    assert!(err <= 1e-8 * scale, "{err}");
}

#[test]
fn sinusoid_energy_peaks_at_matching_scale() {
    // Oracle: per-scale energy from an explicit sum over the sampled kernel.
    let g = make_scale_grid(1.0, (0.02, 0.4), 24, WaveletKind::default()).unwrap();
    let f0 = 0.1;
    let x: Vec<f64> = (0..1200)
        .map(|i| (2.0 * std::f64::consts::PI * f0 * i as f64).sin())
        .collect();
    let w = cwt(&x, &g, Axis::Time, 0.0).unwrap();
    let energy = |j: usize| -> f64 {
        (0..x.len())
            .filter(|&b| !w.mask[j][b])
            .map(|b| w.coefficients[j][b].powi(2))
            .sum::<f64>()
            / (0..x.len()).filter(|&b| !w.mask[j][b]).count() as f64
    };
    let best = (0..g.len()).max_by(|&a, &b| energy(a).total_cmp(&energy(b))).unwrap();
    let nearest = (0..g.len())
        .min_by(|&a, &b| {
            (g.pseudo_frequencies[a] - f0)
                .abs()
                .total_cmp(&(g.pseudo_frequencies[b] - f0).abs())
        })
        .unwrap();
    assert!(best.abs_diff(nearest) <= 1, "best {best}, nearest {nearest}");

    let kernel = g.kind.kernel(g.scales[best], 1.0);
    let half = kernel.len() / 2;
    let b = 600;
    let direct: f64 = kernel.iter().enumerate().map(|(j, k)| k * x[b + half - j]).sum();
    assert!((direct - w.coefficients[best][b]).abs() < 1e-10);
}
