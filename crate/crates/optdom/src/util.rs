//! Small numeric helpers used throughout the crate.

/// Neumaier-compensated sum. Exact branches of the norm computations route
/// every accumulation through this.
pub fn csum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Running compensated accumulator for coordinatewise updates.
#[derive(Clone, Debug, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// |a - b| <= tol * max(1, |a|, |b|).
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Relative gap of `a` above `b`, scaled by max(1, |b|).
pub fn rel_excess(a: f64, b: f64) -> f64 {
    (a - b) / b.abs().max(1.0)
}

/// Conjugate exponent: 1 <-> inf, otherwise q / (q - 1). Requires q >= 1.
pub fn conjugate_exponent(q: f64) -> Option<f64> {
    if q == 1.0 {
        Some(f64::INFINITY)
    } else if q.is_infinite() && q > 0.0 {
        Some(1.0)
    } else if q > 1.0 && q.is_finite() {
        Some(q / (q - 1.0))
    } else {
        None
    }
}
