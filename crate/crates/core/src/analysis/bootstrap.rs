//! The exponent recurrence `beta_{k+1} = (beta_k q + 2) / n` for
//! `det D^2 u = |u|^q`, `0 < q <= n - 2`.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapTrace {
    pub n: usize,
    pub q: f64,
    /// `beta_0 = 2/n, beta_1, ...`
    pub betas: Vec<f64>,
    pub limit: f64,
}

impl BootstrapTrace {
    /// `2/(n-q) - beta_k` from the closed form `(2q/(n(n-q))) (q/n)^k`.
    pub fn closed_form_error(&self, k: usize) -> f64 {
        let n = self.n as f64;
        2.0 * self.q / (n * (n - self.q)) * (self.q / n).powi(k as i32)
    }

    /// `2/(n-q) - beta_k` from the iterated sequence.
    pub fn error(&self, k: usize) -> f64 {
        self.limit - self.betas[k]
    }
}

fn check(n: usize, q: f64) -> Result<()> {
    if n < 3 {
        return Err(invalid("n", n as f64, "the recurrence needs n >= 3"));
    }
    if !(q > 0.0 && q <= n as f64 - 2.0) {
        return Err(invalid("q", q, "must lie in (0, n - 2]"));
    }
    Ok(())
}

/// Iterates the recurrence `steps` times from `beta_0 = 2/n`.
pub fn bootstrap(n: usize, q: f64, steps: usize) -> Result<BootstrapTrace> {
    check(n, q)?;
    let nf = n as f64;
    let mut betas = Vec::with_capacity(steps + 1);
    betas.push(2.0 / nf);
    for k in 0..steps {
        betas.push((betas[k] * q + 2.0) / nf);
    }
    Ok(BootstrapTrace {
        n,
        q,
        betas,
        limit: 2.0 / (nf - q),
    })
}

/// Smallest `k` with `(2q/(n(n-q))) (q/n)^k < 2/(n-q) - beta`.
pub fn minimal_steps(n: usize, q: f64, beta: f64) -> Result<usize> {
    check(n, q)?;
    let nf = n as f64;
    let limit = 2.0 / (nf - q);
    if !(beta > 0.0 && beta < limit) {
        return Err(invalid("beta", beta, "must lie in (0, 2/(n-q))"));
    }
    let gap = limit - beta;
    let mut err = 2.0 * q / (nf * (nf - q));
    let mut k = 0;
    while err >= gap {
        err *= q / nf;
        k += 1;
    }
    Ok(k)
}
