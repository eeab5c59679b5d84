//! Closed-form sub- and supersolutions of singular Monge-Ampere equations.
//!
//! Every barrier has the separable form
//!
//! ```text
//! phi(x) = L s + K s^a P(rho),    s = x_n + shift,  rho = |x'|^2,
//! ```
//!
//! where `P` is either affine in `rho` (the `v_alpha` subsolution family) or
//! a power `(T - rho)^b` (the supersolution family and the explicit
//! solutions). Writing the function in terms of `rho` instead of `r = |x'|`
//! keeps the Hessian free of `1/r` factors:
//!
//! ```text
//! d_i phi    = 2 K s^a P' x_i                      (i < n)
//! d_n phi    = K a s^{a-1} P + L
//! d_ij phi   = K s^a (2 P' delta_ij + 4 P'' x_i x_j)
//! d_in phi   = 2 K a s^{a-1} P' x_i
//! d_nn phi   = K a (a - 1) s^{a-2} P
//! ```
//!
//! The determinants are evaluated from their own closed forms (not from the
//! assembled Hessian), so the two routes check each other.

const SQRT_3: f64 = 1.732_050_807_568_877_2;

use nalgebra::{DMatrix, DVector};

use crate::domain::{radial_sq, Domain};
use crate::error::{invalid, Error, Result};
use crate::jet::Jet2;
use crate::rhs::RhsSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BarrierKind {
    SubVAlpha,
    SuperW,
    SuperW2,
    SuperWt,
    SubVAlphaK,
    SuperWK,
    ExplicitP1,
    ExplicitUJL,
}

impl BarrierKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SubVAlpha => "sub_valpha",
            Self::SuperW => "super_w",
            Self::SuperW2 => "super_w2",
            Self::SuperWt => "super_wt",
            Self::SubVAlphaK => "sub_valpha_k",
            Self::SuperWK => "super_wk",
            Self::ExplicitP1 => "explicit_p1",
            Self::ExplicitUJL => "explicit_ujl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplicitKind {
    /// `-C(n,1) x_n^{2/(n+1)} (1 - |x'|^2)^{(n-1)/(n+1)}`, solves `p = 1`.
    P1Cylinder,
    /// `-sqrt(3) (x_2/2)^{1/3} (1 - x_1^2)^{1/3}`, solves `p = 4` in 2-D.
    Ujl,
}

/// Which inequality the barrier satisfies against its equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// `det D^2 v >= f`.
    Sub,
    /// `det D^2 w <= f`.
    Super,
    /// `det D^2 v = f`.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    /// `c0 + c1 rho`
    Affine { c0: f64, c1: f64 },
    /// `(cap - rho)^b`
    Power { cap: f64, b: f64 },
}

/// A closed-form barrier with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Barrier {
    kind: BarrierKind,
    n: usize,
    shift: f64,
    linear: f64,
    scale: f64,
    a: f64,
    profile: Profile,
    constant: f64,
    equation: Option<RhsSpec>,
    domain: Option<Domain>,
    gamma0: f64,
}

/// `C_alpha = (1 + 2 diam^2) / (alpha (1 - alpha))`.
pub fn c_alpha(diam: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", alpha, "must lie in (0, 1)"));
    }
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(invalid("diam", diam, "must be positive"));
    }
    Ok((1.0 + 2.0 * diam * diam) / (alpha * (1.0 - alpha)))
}

/// Largest `C` with `C^{n+p} (1-r^2)^{p-1} (2b)^{n-1} a (1-a) <= 1` for all
/// `r < 1`, where `a = 2/(n+p)` and `b = 1 - a`.
pub fn sharp_constant_suplem(n: usize, p: f64) -> Result<f64> {
    check_n(n)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid("p", p, "the supersolution w needs p >= 1"));
    }
    let nf = n as f64;
    let a = 2.0 / (nf + p);
    let b = 1.0 - a;
    Ok(((2.0 * b).powf(nf - 1.0) * a * (1.0 - a)).powf(-1.0 / (nf + p)))
}

/// Same construction with `b = (n+p-2)/(2(n+p))`; requires `p >= n + 2`.
pub fn sharp_constant_suplem2(n: usize, p: f64) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    if !(p >= nf + 2.0 && p.is_finite()) {
        return Err(invalid("p", p, "the supersolution on the sphere cap needs p >= n + 2"));
    }
    let a = 2.0 / (nf + p);
    let b = (1.0 - a) / 2.0;
    Ok(((2.0 * b).powf(nf - 1.0) * a * (1.0 - a)).powf(-1.0 / (nf + p)))
}

/// Exponent `a = (2+k)/(2n+2k+2)` of the affine-sphere equation.
pub fn affine_sphere_exponent(n: usize, k: f64) -> f64 {
    (2.0 + k) / (2.0 * n as f64 + 2.0 * k + 2.0)
}

/// `C_0 = [3^k (2b)^{n-1} a (1-a)]^{-1/(2n+2k+2)}` with `a` the affine-sphere
/// exponent and `b = 1 - a`.
pub fn sharp_constant_suplemk(n: usize, k: f64, gamma: f64) -> Result<f64> {
    check_n(n)?;
    check_k(k)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid("gamma", gamma, "must lie in (0, 1)"));
    }
    let nf = n as f64;
    let a = affine_sphere_exponent(n, k);
    let b = 1.0 - a;
    let m = 2.0 * nf + 2.0 * k + 2.0;
    Ok((3f64.powf(k) * (2.0 * b).powf(nf - 1.0) * a * (1.0 - a)).powf(-1.0 / m))
}

/// Smallest `C >= 1 + diam^2` with
/// `2^{n-1} (a gamma0)^k [(a - a^2) C - a (1 + a) d^2] [C - d^2]^{n+2k+2} >= 1`
/// at `d = diam`, the worst radius. Found by bisection to 1e-10.
pub fn vallemk_constant(n: usize, k: f64, gamma0: f64, diam: f64) -> Result<f64> {
    check_n(n)?;
    check_k(k)?;
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(invalid("gamma0", gamma0, "must be positive"));
    }
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(invalid("diam", diam, "must be positive"));
    }
    let nf = n as f64;
    let a = affine_sphere_exponent(n, k);
    let d2 = diam * diam;
    let lhs = |c: f64| {
        let first = (a - a * a) * c - a * (1.0 + a) * d2;
        if first <= 0.0 {
            return f64::NEG_INFINITY;
        }
        2f64.powf(nf - 1.0)
            * (a * gamma0).powf(k)
            * first
            * (c - d2).powf(nf + 2.0 * k + 2.0)
    };
    // Below this point the first factor is not positive.
    let positivity = (1.0 + a) / (1.0 - a) * d2;
    let mut lo = (1.0 + d2).max(positivity * (1.0 + 1e-12));
    if lhs(lo) >= 1.0 {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo;
    while lhs(hi) < 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("n", n as f64, "dimension must be at least 2"));
    }
    Ok(())
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(invalid("k", k, "must be positive"));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid("p", p, "must be positive"));
    }
    Ok(())
}

impl Barrier {
    /// `v_alpha = x_n^alpha (|x'|^2 - C_alpha)` on domains of diameter `diam`.
    pub fn sub_valpha(n: usize, alpha: f64, diam: f64) -> Result<Self> {
        check_n(n)?;
        let c = c_alpha(diam, alpha)?;
        let nf = n as f64;
        Ok(Self {
            kind: BarrierKind::SubVAlpha,
            n,
            shift: 0.0,
            linear: 0.0,
            scale: 1.0,
            a: alpha,
            profile: Profile::Affine { c0: -c, c1: 1.0 },
            constant: c,
            equation: (2.0 / alpha > nf).then_some(RhsSpec::PowerSingular { p: 2.0 / alpha - nf }),
            domain: None,
            gamma0: 0.0,
        })
    }

    /// The subsolution matched to `det D^2 u = |u|^{-p}` on `domain`:
    /// `alpha = 2/(n+p)` and `C_alpha` from the domain diameter.
    pub fn sub_valpha_for_power(domain: &Domain, p: f64) -> Result<Self> {
        check_p(p)?;
        let n = domain.dim();
        let mut b = Self::sub_valpha(n, 2.0 / (n as f64 + p), domain.diameter())?;
        b.equation = Some(RhsSpec::PowerSingular { p });
        b.domain = Some(domain.clone());
        Ok(b)
    }

    /// `w = C x_n - C x_n^{2/(n+p)} (1 - |x'|^2)^{(n+p-2)/(n+p)}` with the
    /// sharp constant.
    pub fn super_w(n: usize, p: f64) -> Result<Self> {
        let c = sharp_constant_suplem(n, p)?;
        let nf = n as f64;
        let a = 2.0 / (nf + p);
        Ok(Self::super_family(
            BarrierKind::SuperW,
            n,
            0.0,
            c,
            a,
            1.0,
            1.0 - a,
            RhsSpec::PowerSingular { p },
            Domain::parabola_cap(n, 1.0, 0.0)?,
        ))
    }

    /// Supersolution on the sphere cap with `b = (n+p-2)/(2(n+p))`.
    pub fn super_w2(n: usize, p: f64) -> Result<Self> {
        let c = sharp_constant_suplem2(n, p)?;
        let nf = n as f64;
        let a = 2.0 / (nf + p);
        Ok(Self::super_family(
            BarrierKind::SuperW2,
            n,
            0.0,
            c,
            a,
            1.0,
            (1.0 - a) / 2.0,
            RhsSpec::PowerSingular { p },
            Domain::sphere_cap(n)?,
        ))
    }

    /// `w^t = C t^{2(1-p)/(n+p)} [x_n - x_n^{2/(n+p)} (t^2 - |x'|^2)^{(n+p-2)/(n+p)}]`
    /// on the scaled cap `{|x'| < t, 0 < x_n < t^2 - |x'|^2}`.
    pub fn super_wt(n: usize, p: f64, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", t, "must be positive"));
        }
        let c = sharp_constant_suplem(n, p)?;
        let nf = n as f64;
        let a = 2.0 / (nf + p);
        let k = c * t.powf(2.0 * (1.0 - p) / (nf + p));
        Ok(Self::super_family(
            BarrierKind::SuperWt,
            n,
            0.0,
            k,
            a,
            t * t,
            1.0 - a,
            RhsSpec::PowerSingular { p },
            Domain::parabola_cap(n, t, 0.0)?,
        ))
    }

    /// `v_a = (x_n + gamma)^a (|x'|^2 - C)` with `a = (2+k)/(2n+2k+2)` and `C`
    /// from [`vallemk_constant`].
    pub fn sub_valpha_k(n: usize, k: f64, gamma: f64, gamma0: f64, diam: f64) -> Result<Self> {
        if !(gamma0 > 0.0) {
            return Err(invalid("gamma0", gamma0, "must be positive"));
        }
        if !(gamma >= gamma0 && gamma.is_finite()) {
            return Err(invalid("gamma", gamma, "must satisfy gamma >= gamma0"));
        }
        let c = vallemk_constant(n, k, gamma0, diam)?;
        let a = affine_sphere_exponent(n, k);
        let domain = Some(Domain::parabola_cap(n, 1.0, gamma)?);
        Ok(Self {
            kind: BarrierKind::SubVAlphaK,
            n,
            shift: gamma,
            linear: 0.0,
            scale: 1.0,
            a,
            profile: Profile::Affine { c0: -c, c1: 1.0 },
            constant: c,
            equation: Some(RhsSpec::AffineSphere { k }),
            domain,
            gamma0,
        })
    }

    /// `w = C_0 (x_n + gamma) - C_0 (x_n + gamma)^a (1 - |x'|^2)^{1-a}` with
    /// `a = (2+k)/(2n+2k+2)` on the shifted parabola cap.
    pub fn super_wk(n: usize, k: f64, gamma: f64) -> Result<Self> {
        let c = sharp_constant_suplemk(n, k, gamma)?;
        let a = affine_sphere_exponent(n, k);
        let mut b = Self::super_family(
            BarrierKind::SuperWK,
            n,
            gamma,
            c,
            a,
            1.0,
            1.0 - a,
            RhsSpec::AffineSphere { k },
            Domain::parabola_cap(n, 1.0, gamma)?,
        );
        b.gamma0 = gamma;
        Ok(b)
    }

    /// Explicit solutions on the half cylinder `{|x'| < 1, x_n > 0}`.
    pub fn explicit(kind: ExplicitKind, n: usize) -> Result<Self> {
        check_n(n)?;
        let nf = n as f64;
        let (bk, p, c, a, b) = match kind {
            ExplicitKind::P1Cylinder => (
                BarrierKind::ExplicitP1,
                1.0,
                (nf + 1.0) * (2.0 * (nf - 1.0)).powf(-nf / (nf + 1.0)),
                2.0 / (nf + 1.0),
                (nf - 1.0) / (nf + 1.0),
            ),
            ExplicitKind::Ujl => {
                if n != 2 {
                    return Err(Error::Unsupported(format!(
                        "the p = 4 explicit solution exists for n = 2 only, got n = {n}"
                    )));
                }
                // sqrt(3) (x_2 / 2)^{1/3} = sqrt(3) 2^{-1/3} x_2^{1/3}
                (BarrierKind::ExplicitUJL, 4.0, SQRT_3 * 2f64.powf(-1.0 / 3.0), 1.0 / 3.0, 1.0 / 3.0)
            }
        };
        Ok(Self {
            kind: bk,
            n,
            shift: 0.0,
            linear: 0.0,
            scale: -c,
            a,
            profile: Profile::Power { cap: 1.0, b },
            constant: c,
            equation: Some(RhsSpec::PowerSingular { p }),
            domain: None,
            gamma0: 0.0,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn super_family(
        kind: BarrierKind,
        n: usize,
        shift: f64,
        c: f64,
        a: f64,
        cap: f64,
        b: f64,
        equation: RhsSpec,
        domain: Domain,
    ) -> Self {
        Self {
            kind,
            n,
            shift,
            linear: c,
            scale: -c,
            a,
            profile: Profile::Power { cap, b },
            constant: c,
            equation: Some(equation),
            domain: Some(domain),
            gamma0: 0.0,
        }
    }

    /// Attaches the domain on which the barrier is compared/sampled.
    pub fn on(mut self, domain: Domain) -> Result<Self> {
        if domain.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: domain.dim(),
            });
        }
        self.domain = Some(domain);
        Ok(self)
    }

    pub fn kind(&self) -> BarrierKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Exponent of the singular factor `s^a`.
    pub fn exponent(&self) -> f64 {
        self.a
    }

    /// Exponent `b` of the `(T - |x'|^2)^b` factor, when present.
    pub fn profile_exponent(&self) -> Option<f64> {
        match self.profile {
            Profile::Power { b, .. } => Some(b),
            Profile::Affine { .. } => None,
        }
    }

    /// The admissibility constant: `C_alpha`, `C(n,p)`, `C t^{2(1-p)/(n+p)}`, `C`, or `C_0`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Downward shift `gamma` of the singular face `{x_n = -gamma}`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    /// The equation the barrier is built for.
    pub fn equation(&self) -> Option<RhsSpec> {
        self.equation
    }

    /// The bounded domain the barrier lives on, if any.
    pub fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }

    pub fn role(&self) -> Role {
        match self.kind {
            BarrierKind::SubVAlpha | BarrierKind::SubVAlphaK => Role::Sub,
            BarrierKind::SuperW | BarrierKind::SuperW2 | BarrierKind::SuperWt | BarrierKind::SuperWK => Role::Super,
            BarrierKind::ExplicitP1 | BarrierKind::ExplicitUJL => Role::Exact,
        }
    }

    fn check(&self, x: &[f64]) -> Result<(f64, f64)> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("x", f64::NAN, "point must be finite"));
        }
        let s = x[self.n - 1] + self.shift;
        if s <= 0.0 {
            return Err(Error::SingularSet("x_n + shift <= 0"));
        }
        let rho = radial_sq(x);
        if let Profile::Power { cap, .. } = self.profile {
            if cap - rho <= 0.0 {
                return Err(Error::SingularSet("|x'|^2 >= cap"));
            }
        }
        Ok((s, rho))
    }

    /// `(P, P', P'')` as functions of `rho`.
    fn profile_derivs(&self, rho: f64) -> (f64, f64, f64) {
        match self.profile {
            Profile::Affine { c0, c1 } => (c0 + c1 * rho, c1, 0.0),
            Profile::Power { cap, b } => {
                let base = cap - rho;
                let pb = base.powf(b);
                (pb, -b * pb / base, b * (b - 1.0) * pb / (base * base))
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let (s, rho) = self.check(x)?;
        let (p, _, _) = self.profile_derivs(rho);
        Ok(self.linear * s + self.scale * s.powf(self.a) * p)
    }

    /// Value of the continuous extension to the closure: `s = 0` and
    /// `|x'|^2 = T` are allowed here (the factors with positive exponents
    /// vanish there), unlike in the derivative evaluators.
    pub fn value_on_closure(&self, x: &[f64]) -> Result<f64> {
        match self.check(x) {
            Ok(_) => self.value(x),
            Err(Error::SingularSet(_)) => {
                let s = (x[self.n - 1] + self.shift).max(0.0);
                let rho = radial_sq(x);
                let p = match self.profile {
                    Profile::Affine { c0, c1 } => c0 + c1 * rho,
                    Profile::Power { cap, b } => {
                        if cap - rho < -1e-12 * cap {
                            return Err(Error::SingularSet("|x'|^2 > cap"));
                        }
                        (cap - rho).max(0.0).powf(b)
                    }
                };
                Ok(self.linear * s + self.scale * s.powf(self.a) * p)
            }
            Err(e) => Err(e),
        }
    }

    /// Short identifier with parameters, e.g. `super_w(n=2,p=1)`.
    pub fn label(&self) -> String {
        let n = self.n;
        match (self.kind, self.equation) {
            (BarrierKind::SuperWt, Some(RhsSpec::PowerSingular { p })) => match self.profile {
                Profile::Power { cap, .. } => format!("super_wt(n={n},p={p},t={})", cap.sqrt()),
                Profile::Affine { .. } => unreachable!(),
            },
            (BarrierKind::SubVAlphaK | BarrierKind::SuperWK, Some(RhsSpec::AffineSphere { k })) => {
                format!("{}(n={n},k={k},gamma={})", self.kind.name(), self.shift)
            }
            (_, Some(RhsSpec::PowerSingular { p })) => format!("{}(n={n},p={p})", self.kind.name()),
            _ => format!("{}(n={n},a={})", self.kind.name(), self.a),
        }
    }

    /// Exact value, gradient and Hessian.
    pub fn eval_jet(&self, x: &[f64]) -> Result<Jet2> {
        let (s, rho) = self.check(x)?;
        let n = self.n;
        let a = self.a;
        let (p, dp, ddp) = self.profile_derivs(rho);
        let g = s.powf(a);
        let dg = a * g / s;
        let ddg = a * (a - 1.0) * g / (s * s);
        let k = self.scale;

        let value = self.linear * s + k * g * p;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            grad[i] = 2.0 * k * g * dp * x[i];
            for j in 0..n - 1 {
                let delta = if i == j { 1.0 } else { 0.0 };
                hess[(i, j)] = k * g * (2.0 * dp * delta + 4.0 * ddp * x[i] * x[j]);
            }
            let mixed = 2.0 * k * dg * dp * x[i];
            hess[(i, n - 1)] = mixed;
            hess[(n - 1, i)] = mixed;
        }
        grad[n - 1] = k * dg * p + self.linear;
        hess[(n - 1, n - 1)] = k * ddg * p;
        Jet2::new(value, grad, hess)
    }

    /// Closed-form `det D^2 phi`.
    pub fn det_hessian(&self, x: &[f64]) -> Result<f64> {
        let (s, rho) = self.check(x)?;
        let nf = self.n as f64;
        let a = self.a;
        Ok(match self.profile {
            Profile::Affine { c0, .. } => {
                let c = -c0;
                2f64.powf(nf - 1.0) * s.powf(nf * a - 2.0) * (a * (1.0 - a) * c - (a * a + a) * rho)
            }
            Profile::Power { cap, b } => {
                let k = self.scale.abs();
                k.powf(nf)
                    * (2.0 * b).powf(nf - 1.0)
                    * a
                    * s.powf(nf * a - 2.0)
                    * (cap - rho).powf(nf * (b - 1.0))
                    * ((1.0 - a) * cap + (1.0 - 2.0 * b - a) * rho)
            }
        })
    }

    /// `x . Dv - v`.
    pub fn support(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval_jet(x)?.support(x))
    }

    /// The lower bound `(x_n + gamma)^{a-1} a gamma0 (C - |x'|^2)` for
    /// `x . Dv_a - v_a` of the affine-sphere subsolution.
    pub fn support_lower_bound(&self, x: &[f64]) -> Result<f64> {
        if self.kind != BarrierKind::SubVAlphaK {
            return Err(Error::Unsupported(format!(
                "support lower bound is defined for sub_valpha_k, not {}",
                self.kind.name()
            )));
        }
        let (s, rho) = self.check(x)?;
        Ok(s.powf(self.a - 1.0) * self.a * self.gamma0 * (self.constant - rho))
    }

    /// `det D^2 phi - f(phi, D phi, x)` with the closed-form determinant.
    pub fn residual(&self, rhs: &RhsSpec, x: &[f64]) -> Result<f64> {
        let (det, f) = self.det_and_rhs(rhs, x)?;
        Ok(det - f)
    }

    /// `det D^2 phi / f - 1`: the residual normalised by the right-hand side.
    pub fn relative_residual(&self, rhs: &RhsSpec, x: &[f64]) -> Result<f64> {
        let (det, f) = self.det_and_rhs(rhs, x)?;
        Ok(det / f - 1.0)
    }

    fn det_and_rhs(&self, rhs: &RhsSpec, x: &[f64]) -> Result<(f64, f64)> {
        let det = self.det_hessian(x)?;
        let (u, support) = if rhs.needs_support() {
            let jet = self.eval_jet(x)?;
            (jet.value, jet.support(x))
        } else {
            (self.value(x)?, 0.0)
        };
        Ok((det, rhs.eval(self.n, u, support)?))
    }
}

/// `det(Hessian) - f` for an arbitrary jet.
pub fn residual(jet: &Jet2, rhs: &RhsSpec, x: &[f64]) -> Result<f64> {
    let f = rhs.eval(jet.dim(), jet.value, jet.support(x))?;
    Ok(jet.det_hessian() - f)
}

/// `C(n) = 4^n n^{2n} |B_1|^2`, the volume-ratio constant of the sup-norm
/// lower bound under the normalisation `B_R in Omega in B_{nR}`.
pub fn volume_ratio_constant(n: usize) -> f64 {
    let nf = n as f64;
    let b1 = crate::domain::unit_ball_volume(n);
    4f64.powf(nf) * nf.powf(2.0 * nf) * b1 * b1
}

/// `c(n,p) = C(n)^{-1/(n+p)}`, so that `||u||_inf >= c(n,p) |Omega|^{2/(n+p)}`.
pub fn sup_norm_lower_constant(n: usize, p: f64) -> f64 {
    volume_ratio_constant(n).powf(-1.0 / (n as f64 + p))
}
