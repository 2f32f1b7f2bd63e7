use crate::error::{Error, Result};

/// Pearson product-moment correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "pearson series",
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::Degenerate("pearson needs at least 2 samples".into()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if !(saa > 0.0 && sbb > 0.0) {
        return Err(Error::Degenerate("pearson of a constant series".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Mean squared error.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { context: "mse series", expected: a.len(), actual: b.len() });
    }
    if a.is_empty() {
        return Err(Error::Degenerate("mse of empty series".into()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64)
}

/// Mean of `values` over samples whose time lies in the fraction window
/// `[from, to]` of the span of `times`.
pub fn window_mean(times: &[f64], values: &[f64], from: f64, to: f64) -> f64 {
    let (t0, t1) = match (times.first(), times.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return f64::NAN,
    };
    let (lo, hi) = (t0 + from * (t1 - t0), t0 + to * (t1 - t0));
    let (mut sum, mut n) = (0.0, 0usize);
    for (t, v) in times.iter().zip(values) {
        if *t >= lo && *t <= hi {
            sum += v;
            n += 1;
        }
    }
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Average slope of a cumulative series over the fraction window
/// `[from, 1]`, using the recorded sample nearest to the window start.
pub fn tail_rate(times: &[f64], cumulative: &[f64], from: f64) -> f64 {
    let (t0, t1) = match (times.first(), times.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return f64::NAN,
    };
    let start = t0 + from * (t1 - t0);
    let k = times.partition_point(|t| *t < start).min(times.len() - 1);
    let span = t1 - times[k];
    if span > 0.0 {
        (cumulative[cumulative.len() - 1] - cumulative[k]) / span
    } else {
        f64::NAN
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pearson_examples() {
        let a = [1.0, 2.0, 3.0];
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&a, &[-1.0, -2.0, -3.0]).unwrap() + 1.0).abs() < 1e-15);
        // Two-pass definitional value, frozen from an independent evaluation.
        assert!((pearson(&a, &[2.0, 4.0, 6.2]).unwrap() - 0.999_622_285_161_218_6).abs() < 1e-14);
        assert!(pearson(&a, &[1.0, 1.0, 1.0]).is_err());
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mse(&[1.0, 2.0], &[0.0, 4.0]).unwrap(), 2.5);
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn windows() {
        let t: Vec<f64> = (0..=10).map(f64::from).collect();
        let v: Vec<f64> = t.clone();
        assert_eq!(window_mean(&t, &v, 0.0, 0.1), 0.5);
        assert_eq!(window_mean(&t, &v, 0.9, 1.0), 9.5);
        let g: Vec<f64> = t.iter().map(|x| -2.0 * x).collect();
        assert_eq!(tail_rate(&t, &g, 0.9), -2.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    proptest! {
        #[test]
        fn pearson_bounded_and_symmetric(v in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..40)) {
            let (a, b): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            if let (Ok(p), Ok(q)) = (pearson(&a, &b), pearson(&b, &a)) {
                prop_assert!((-1.0..=1.0).contains(&p));
                prop_assert!((p - q).abs() < 1e-12);
            }
        }
    }
}
