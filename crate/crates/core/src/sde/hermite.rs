use crate::error::{Error, Result};

/// Vector samples at strictly increasing instants, interpolated with cubic
/// Hermite splines whose knot slopes are backward differences.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    slopes: Vec<Vec<f64>>,
}

impl SampledSignal {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidSignal(format!("need at least 2 samples, got {}", times.len())));
        }
        if values.len() != times.len() {
            return Err(Error::DimensionMismatch {
                context: "signal samples",
                expected: times.len(),
                actual: values.len(),
            });
        }
        let dim = values[0].len();
        if let Some(bad) = values.iter().position(|v| v.len() != dim) {
            return Err(Error::InvalidSignal(format!(
                "sample {bad} has {} components, expected {dim}",
                values[bad].len()
            )));
        }
        if times.iter().chain(values.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal("non-finite sample".into()));
        }
        if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSignal(format!("times not strictly increasing at index {}", k + 1)));
        }

        let mut slopes = Vec::with_capacity(times.len());
        slopes.push(Vec::new());
        for i in 1..times.len() {
            let h = times[i] - times[i - 1];
            slopes.push(values[i].iter().zip(&values[i - 1]).map(|(a, b)| (a - b) / h).collect());
        }
        // The backward difference is undefined at the first knot.
        slopes[0] = slopes[1].clone();

        Ok(SampledSignal { times, values, slopes })
    }

    /// Scalar series convenience constructor.
    pub fn scalar(times: Vec<f64>, values: &[f64]) -> Result<Self> {
        Self::new(times, values.iter().map(|v| vec![*v]).collect())
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Interpolated value at `t`, written into `out`.
    pub fn interpolate_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        if !(t >= self.start() && t <= self.end()) {
            return Err(Error::OutOfRange { t, start: self.start(), end: self.end() });
        }
        if out.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "interpolation output",
                expected: self.dim(),
                actual: out.len(),
            });
        }
        // Index of the interval [t_k, t_{k+1}] containing t.
        let k = match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            p => (p - 1).min(self.times.len() - 2),
        };
        let h = self.times[k + 1] - self.times[k];
        let s = (t - self.times[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (v0, v1) = (&self.values[k], &self.values[k + 1]);
        let (m0, m1) = (&self.slopes[k], &self.slopes[k + 1]);
        for (j, o) in out.iter_mut().enumerate() {
            *o = h00 * v0[j] + h10 * h * m0[j] + h01 * v1[j] + h11 * h * m1[j];
        }
        Ok(())
    }

    pub fn interpolate(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.interpolate_into(t, &mut out)?;
        Ok(out)
    }
}

/// Free-function form of [`SampledSignal::interpolate`].
pub fn hermite_interpolate(signal: &SampledSignal, t: f64) -> Result<Vec<f64>> {
    signal.interpolate(t)
}
