use super::{PairedSample, StatsError};

/// Number of tied pairs given a sorted sequence, `Σ t(t-1)/2` over runs.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Stable merge sort counting inversions (strictly decreasing pairs).
fn sort_counting_swaps(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut v[..mid], &mut buf[..mid]);
    swaps += sort_counting_swaps(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Tie-corrected Kendall rank correlation, O(n log n).
///
/// `τ_b = (C − D) / √((n₀ − t_x)(n₀ − t_y))` where `t_x`, `t_y` count pairs
/// tied in each variable.
pub fn kendall_tau_b(sample: &PairedSample<'_>) -> Result<f64, StatsError> {
    let n = sample.len();
    let mut pairs: Vec<(f64, f64)> = sample.x().iter().copied().zip(sample.y().iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let tied_x = tied_pairs(&xs);
    let tied_xy = tied_pairs(&pairs);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let discordant = sort_counting_swaps(&mut ys, &mut buf);
    let tied_y = tied_pairs(&ys);

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    if tied_x == n0 {
        return Err(StatsError::AllTied("x"));
    }
    if tied_y == n0 {
        return Err(StatsError::AllTied("y"));
    }
    // C - D = (pairs untied in both) - 2D
    let untied = (n0 + tied_xy) as i64 - tied_x as i64 - tied_y as i64;
    let numerator = (untied - 2 * discordant as i64) as f64;
    let denominator = (((n0 - tied_x) as f64) * ((n0 - tied_y) as f64)).sqrt();
    Ok((numerator / denominator).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tau(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
        kendall_tau_b(&PairedSample::new(x, y).unwrap())
    }

    /// Counts C, D, t_x, t_y by enumerating every pair.
    fn brute_force(x: &[f64], y: &[f64]) -> f64 {
        let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let (dx, dy) = (x[i] - x[j], y[i] - y[j]);
                if dx == 0.0 {
                    tx += 1;
                }
                if dy == 0.0 {
                    ty += 1;
                }
                if dx * dy > 0.0 {
                    c += 1;
                } else if dx * dy < 0.0 {
                    d += 1;
                }
            }
        }
        let n0 = (x.len() * (x.len() - 1) / 2) as i64;
        (c - d) as f64 / (((n0 - tx) * (n0 - ty)) as f64).sqrt()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(tau(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!((tau(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 3.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!((brute_force(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 3.0]) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(StatsError::AllTied("x")));
        assert_eq!(tau(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]), Err(StatsError::AllTied("y")));
    }

    #[test]
    fn tied_pair_counting() {
        assert_eq!(tied_pairs(&[1, 1, 1, 2, 3, 3]), 3 + 1);
        assert_eq!(tied_pairs::<i32>(&[]), 0);
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(v in proptest::collection::vec((0u8..5, 0u8..5), 2..12)) {
            let x: Vec<f64> = v.iter().map(|p| f64::from(p.0)).collect();
            let y: Vec<f64> = v.iter().map(|p| f64::from(p.1)).collect();
            match tau(&x, &y) {
                Ok(t) => prop_assert!((t - brute_force(&x, &y)).abs() <= 1e-12),
                Err(_) => prop_assert!(x.iter().all(|&a| a == x[0]) || y.iter().all(|&b| b == y[0])),
            }
        }

        #[test]
        fn invariant_under_increasing_maps(v in proptest::collection::vec((0u8..6, 0u8..6), 3..15)) {
            let x: Vec<f64> = v.iter().map(|p| f64::from(p.0)).collect();
            let y: Vec<f64> = v.iter().map(|p| f64::from(p.1)).collect();
            let fx: Vec<f64> = x.iter().map(|a| a.powi(3) + 2.0 * a).collect();
            let gy: Vec<f64> = y.iter().map(|b| b.exp()).collect();
            if let Ok(t) = tau(&x, &y) {
                prop_assert!((t - tau(&fx, &gy).unwrap()).abs() <= 1e-12);
                prop_assert!((t - tau(&y, &x).unwrap()).abs() <= 1e-12);
            }
        }
    }
}
