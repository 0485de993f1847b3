//! E[Σ_x N_n(x)²] for the simple walk has the closed form
//! n + 2 Σ_{m=1}^{n−1} (n − m) P(S_m = 0), with P(S_{2j} = 0) = (C(2j, j)/4^j)².
//! For Gaussian scenery this is also E[Z_n²].

use rwrs_core::walk::{local_times, sample_trajectory, WalkModel};

fn exact_mean(n: usize) -> f64 {
    let mut q = 1.0;
    let mut s = 0.0;
    for j in 1..=n / 2 {
        q *= (2 * j - 1) as f64 / (2 * j) as f64;
        let m = 2 * j;
        if m < n {
            s += (n - m) as f64 * q * q;
        }
    }
    n as f64 + 2.0 * s
}

#[test]
fn monte_carlo_matches_exact_self_intersection_mean() {
    let n = 256;
    let reps = 20_000u64;
    let values: Vec<f64> = (0..reps)
        .map(|seed| local_times(&sample_trajectory(&WalkModel::simple(), n, seed).unwrap()).self_intersection() as f64)
        .collect();
    let mean = values.iter().sum::<f64>() / reps as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    let se = (var / reps as f64).sqrt();
    let exact = exact_mean(n);
    assert!((mean - exact).abs() < 4.0 * se, "mean {mean} exact {exact} se {se}");
}

#[test]
fn normalized_mean_approaches_two_over_pi_from_above() {
    let target = 2.0 / std::f64::consts::PI;
    let bias = |e: u32| {
        let n = 1usize << e;
        exact_mean(n) / (n as f64 * (n as f64).ln()) / target - 1.0
    };
    let (b10, b20) = (bias(10), bias(20));
    assert!(b10 > b20 && b20 > 0.0);
    assert!((b10 - 0.01306).abs() < 1e-4 && (b20 - 0.00619).abs() < 1e-4, "{b10} {b20}");
}
