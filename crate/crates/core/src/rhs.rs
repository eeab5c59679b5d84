use crate::error::{invalid, Error, Result};

/// Right-hand side `f(u, Du, x)` of `det D^2 u = f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhsSpec {
    /// `|u|^{-p}`, `p > 0`.
    PowerSingular { p: f64 },
    /// `|u|^q`. `q = 0` gives the constant right-hand side 1.
    Degenerate { q: f64 },
    /// `|u|^{-n-2-k} (x . Du - u)^{-k}`, `k > 0`.
    AffineSphere { k: f64 },
}

impl RhsSpec {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(invalid("p", p, "must be positive"));
        }
        Ok(Self::PowerSingular { p })
    }

    pub fn degenerate(q: f64) -> Result<Self> {
        if !(q >= 0.0 && q.is_finite()) {
            return Err(invalid("q", q, "must be nonnegative"));
        }
        Ok(Self::Degenerate { q })
    }

    pub fn affine_sphere(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid("k", k, "must be positive"));
        }
        Ok(Self::AffineSphere { k })
    }

    pub fn needs_support(&self) -> bool {
        matches!(self, Self::AffineSphere { .. })
    }

    /// Evaluates `f` in dimension `n` from `u` and `support = x . Du - u`.
    pub fn eval(&self, n: usize, u: f64, support: f64) -> Result<f64> {
        self.eval_regularized(n, u, support, 0.0)
    }

    /// Same as [`eval`](Self::eval) with `|u|` replaced by `|u| + eps` in the
    /// singular factors.
    pub fn eval_regularized(&self, n: usize, u: f64, support: f64, eps: f64) -> Result<f64> {
        let abs_u = u.abs();
        match *self {
            Self::PowerSingular { p } => {
                let base = abs_u + eps;
                if base <= 0.0 {
                    return Err(Error::SingularSet("u = 0 in |u|^{-p}"));
                }
                Ok(base.powf(-p))
            }
            Self::Degenerate { q } => Ok(if q == 0.0 { 1.0 } else { abs_u.powf(q) }),
            Self::AffineSphere { k } => {
                if support <= 0.0 {
                    return Err(Error::NonPositiveSupport(support));
                }
                let base = abs_u + eps;
                if base <= 0.0 {
                    return Err(Error::SingularSet("u = 0 in |u|^{-n-2-k}"));
                }
                Ok(base.powf(-(n as f64) - 2.0 - k) * support.powf(-k))
            }
        }
    }
}
