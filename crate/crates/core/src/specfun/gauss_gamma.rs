use crate::error::Result;
use crate::{NumericError, Real};

/// Nodes and probability weights of an n-point Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ wᵢ f(xᵢ).
    pub fn expect<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }

    /// The same rule for `scale · X`.
    pub fn scaled(&self, scale: T) -> Self {
        GaussRule {
            nodes: self.nodes.iter().map(|&x| x * scale).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// Gauss rule for expectations under the unit-scale Gamma(`shape`) law,
/// i.e. generalized Gauss–Laguerre with α = shape − 1, normalized so the
/// weights sum to one. Built with Golub–Welsch: eigenvalues of the Jacobi
/// matrix are the nodes, squared first eigenvector components the weights.
pub fn gamma_rule<T: Real>(shape: T, n: usize) -> Result<GaussRule<T>> {
    const OP: &str = "gamma_rule";
    if !(shape > T::zero()) || !shape.is_finite() {
        return Err(NumericError::domain(OP, format!("shape must be positive, got {shape}")));
    }
    if n == 0 {
        return Err(NumericError::domain(OP, "need at least one node"));
    }
    let alpha = shape - T::one();
    let mut d: Vec<T> = (0..n)
        .map(|k| T::c(2.0) * T::from_count(k as u64) + alpha + T::one())
        .collect();
    let mut e: Vec<T> = (0..n)
        .map(|k| {
            if k + 1 < n {
                let k1 = T::from_count(k as u64 + 1);
                (k1 * (k1 + alpha)).sqrt()
            } else {
                T::zero()
            }
        })
        .collect();
    let mut z = vec![T::zero(); n];
    z[0] = T::one();
    symmetric_tridiagonal_ql(&mut d, &mut e, &mut z)?;

    let mut pairs: Vec<(T, T)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    let total = pairs.iter().fold(T::zero(), |s, p| s + p.1);
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    })
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix
/// (diagonal `d`, off-diagonal `e[i]` coupling i and i+1). Only the first
/// row `z` of the eigenvector matrix is tracked.
fn symmetric_tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T], z: &mut [T]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(NumericError::NoConvergence {
                    op: "gamma_rule",
                    iterations: iter,
                    estimate: d[l].as_f64(),
                    bound: e[l].as_f64(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (T::c(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::c(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
