use crate::error::Result;
use crate::specfun::{find_root, integrate_with_points, ln_beta, trigamma, Tolerance};
use crate::{NumericError, Real};

use super::GammaApprox;

/// Law of the estimated rate `Ĉ = log₂(1 + G·P/I)` with `G` the estimated
/// access-channel gain, `I` the estimated interference-plus-noise power and
/// `P` the transmit power, `G` and `I` independent Gamma variables.
///
/// `Z = G·P/I` is a scaled beta-prime variable:
/// `f_Z(z) = z^{a₁−1} / (B(a₁, a₂) (β₁/β₂)^{a₁}) · (1 + z β₂/β₁)^{−(a₁+a₂)}`
/// with `β₁ = b_G·P`, `β₂ = b_I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityDist<T> {
    gain_approx: GammaApprox<T>,
    interf_approx: GammaApprox<T>,
    tx_power: T,
    // ln(β₂/β₁)
    ln_ratio: T,
    // −ln B(a₁, a₂)
    ln_norm: T,
    breakpoints: Vec<T>,
}

impl<T: Real> CapacityDist<T> {
    pub fn new(gain_approx: GammaApprox<T>, interf_approx: GammaApprox<T>, tx_power: T) -> Result<Self> {
        if !(tx_power > T::zero() && tx_power.is_finite()) {
            return Err(NumericError::domain(
                "CapacityDist",
                format!("transmit power must be positive, got {tx_power}"),
            ));
        }
        let a1 = gain_approx.shape();
        let a2 = interf_approx.shape();
        let ln_ratio = interf_approx.scale().ln() - (gain_approx.scale() * tx_power).ln();
        let ln_norm = -ln_beta(a1, a2);

        // ln Z is close to normal with mean ψ(a₁) − ψ(a₂) − ln(β₂/β₁) and
        // variance ψ'(a₁) + ψ'(a₂); place knots at a few of its sigmas.
        let half = T::c(0.5);
        let centre = (a1.ln() - half / a1) - (a2.ln() - half / a2) - ln_ratio;
        let spread = (trigamma(a1) + trigamma(a2)).sqrt();
        let breakpoints = [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&k| softplus(centre + T::c(k) * spread) / T::LN_2())
            .filter(|x| *x > T::zero() && x.is_finite())
            .collect();

        Ok(CapacityDist {
            gain_approx,
            interf_approx,
            tx_power,
            ln_ratio,
            ln_norm,
            breakpoints,
        })
    }

    pub fn gain_approx(&self) -> &GammaApprox<T> {
        &self.gain_approx
    }

    pub fn interf_approx(&self) -> &GammaApprox<T> {
        &self.interf_approx
    }

    pub fn tx_power(&self) -> T {
        self.tx_power
    }

    /// Rates where the density changes character, ascending.
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    fn ln_pdf(&self, x: T) -> T {
        let a1 = self.gain_approx.shape();
        let a2 = self.interf_approx.shape();
        let t = x * T::LN_2();
        // ln z with z = 2^x − 1
        let ln_z = if t > T::c(30.0) {
            t + (-(-t).exp()).ln_1p()
        } else {
            t.exp_m1().ln()
        };
        let ln_w = ln_z + self.ln_ratio;
        (a1 - T::one()) * ln_z + a1 * self.ln_ratio + self.ln_norm - (a1 + a2) * softplus(ln_w)
            + t
            + T::LN_2().ln()
    }

    /// Density of the rate at `x` bits/s/Hz.
    pub fn pdf(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(NumericError::domain("capacity_pdf", format!("rate must be > 0, got {x}")));
        }
        Ok(self.density(x))
    }

    fn density(&self, x: T) -> T {
        if x <= T::zero() || x == T::infinity() {
            return T::zero();
        }
        let v = self.ln_pdf(x).exp();
        if v.is_nan() {
            T::zero()
        } else {
            v
        }
    }

    fn knots_in(&self, lo: T, hi: T) -> Vec<T> {
        self.breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect()
    }

    /// `∫₀^∞ f(x) dx`; equals one up to quadrature error.
    pub fn total_mass(&self, tol: &Tolerance<T>) -> Result<T> {
        let q = integrate_with_points(|x| self.density(x), T::zero(), T::infinity(), &self.breakpoints, tol)?;
        Ok(q.value)
    }

    /// `P(Ĉ ≤ x)`.
    pub fn cdf(&self, x: T, tol: &Tolerance<T>) -> Result<T> {
        if x.is_nan() {
            return Err(NumericError::domain("capacity_cdf", "rate is NaN"));
        }
        if x <= T::zero() {
            return Ok(T::zero());
        }
        if x == T::infinity() {
            return Ok(T::one());
        }
        let median_knot = self.breakpoints.get(4).copied().unwrap_or(T::zero());
        let p = if x <= median_knot {
            integrate_with_points(|u| self.density(u), T::zero(), x, &self.knots_in(T::zero(), x), tol)?.value
        } else {
            let upper = integrate_with_points(
                |u| self.density(u),
                x,
                T::infinity(),
                &self.knots_in(x, T::infinity()),
                tol,
            )?;
            T::one() - upper.value
        };
        Ok(p.max(T::zero()).min(T::one()))
    }

    /// CDF at every point of the ascending slice `xs`, integrating piece by
    /// piece between consecutive points.
    pub fn cdf_many(&self, xs: &[T], tol: &Tolerance<T>) -> Result<Vec<T>> {
        if xs.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(NumericError::domain("capacity_cdf_many", "points must be ascending and not NaN"));
        }
        let mut out = Vec::with_capacity(xs.len());
        let mut acc = T::zero();
        let mut prev = T::zero();
        for &x in xs {
            if x <= T::zero() {
                out.push(T::zero());
                continue;
            }
            if x == T::infinity() {
                out.push(T::one());
                continue;
            }
            if x > prev {
                let piece = integrate_with_points(|u| self.density(u), prev, x, &self.knots_in(prev, x), tol)?;
                acc += piece.value;
                prev = x;
            }
            out.push(acc.max(T::zero()).min(T::one()));
        }
        Ok(out)
    }

    /// `E[Ĉ]`.
    pub fn mean(&self, tol: &Tolerance<T>) -> Result<T> {
        let q = integrate_with_points(|x| x * self.density(x), T::zero(), T::infinity(), &self.breakpoints, tol)?;
        Ok(q.value)
    }

    /// The rate `x` with `P(Ĉ ≤ x) = p`.
    pub fn quantile(&self, p: T, tol: &Tolerance<T>) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(NumericError::domain("capacity_quantile", format!("need 0 < p < 1, got {p}")));
        }
        let mut lo = self.breakpoints.first().copied().unwrap_or(T::c(1e-6));
        let mut hi = self.breakpoints.last().copied().unwrap_or(T::one());
        while self.cdf(lo, tol)? > p && lo > T::min_positive_value() {
            lo *= T::c(0.5);
        }
        while self.cdf(hi, tol)? < p && hi < T::max_value() / T::c(4.0) {
            hi *= T::c(2.0);
        }
        let mut failure = None;
        let root = find_root(
            |x| match self.cdf(x, tol) {
                Ok(c) => c - p,
                Err(e) => {
                    failure.get_or_insert(e);
                    T::zero()
                }
            },
            lo,
            hi,
            tol,
        );
        match failure {
            Some(e) => Err(e),
            None => root,
        }
    }
}

// ln(1 + eʸ) without overflow.
fn softplus<T: Real>(y: T) -> T {
    if y > T::zero() {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}
