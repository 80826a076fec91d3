use super::{MeasureMethod, MeasureOptions, MeasureResult};
use crate::error::{Error, Result};
use crate::linalg::sphere::{self, dual_power, SphereObjective};
use crate::linalg::{symmetric_eigenvalues, DenseMatrix, Lp};

/// Dyadic exponents of the step sequence `h = 2^{-k}`.
const FIRST_LEVEL: i32 = 4;
const LAST_LEVEL: i32 = 40;
/// Below this step the quotient gradient is replaced by its `h → 0` limit.
const SMALL_H: f64 = 1e-5;
const TRACE_SLACK: f64 = 1e-9;

/// `μ_p(A)` for `1 < p < ∞` with default settings and the chosen method.
pub fn mu_estimate(a: &DenseMatrix, p: f64, method: MeasureMethod) -> Result<MeasureResult> {
    mu_estimate_with(
        a,
        p,
        &MeasureOptions {
            method,
            ..MeasureOptions::default()
        },
    )
}

/// Lower-bound estimate of `μ_p(A)` for `1 < p < ∞`.
///
/// The h-quotient method maximizes `(‖x + hAx‖_p/‖x‖_p − 1)/h` over `x` for
/// `h = 2^{-4}, …, 2^{-40}`, warm starting each level from its neighbour, and
/// returns the last level. Because the quotient is non-increasing as `h`
/// decreases for every fixed `x`, a maximizer for a small `h` seeds the next
/// larger one; a backward sweep uses this to make the trace monotone. A trace
/// that still rises by more than `1e-9` (relative) is reported as an error.
///
/// The semi-inner method maximizes `Σ |x_i|^{p−2} x_i (Ax)_i / ‖x‖_p^p`.
pub fn mu_estimate_with(a: &DenseMatrix, p: f64, opts: &MeasureOptions) -> Result<MeasureResult> {
    let n = a.ensure_square()?;
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::UnsupportedExponent {
            p: p.to_string(),
            required: "1 < p < inf",
        });
    }
    if n == 0 {
        return Ok(MeasureResult {
            value: 0.0,
            p: Lp::Finite(p),
            exact: false,
            h_trace: Vec::new(),
        });
    }
    let mut rng = opts.ascent.rng();
    let starts = sphere::starts(n, opts.ascent.starts, p, &mut rng);
    match opts.method {
        MeasureMethod::SemiInner => {
            let obj = SemiInner::new(a, p);
            let best = sphere::ascend_multistart(&obj, p, &starts, &opts.ascent);
            Ok(MeasureResult {
                value: best.value,
                p: Lp::Finite(p),
                exact: false,
                h_trace: Vec::new(),
            })
        }
        MeasureMethod::HQuotient => h_quotient(a, p, &starts, opts),
    }
}

fn h_quotient(
    a: &DenseMatrix,
    p: f64,
    starts: &[Vec<f64>],
    opts: &MeasureOptions,
) -> Result<MeasureResult> {
    let hs: Vec<f64> = (FIRST_LEVEL..=LAST_LEVEL).map(|k| 2f64.powi(-k)).collect();
    let objs: Vec<HQuotient> = hs.iter().map(|&h| HQuotient::new(a, p, h)).collect();
    let last = objs.len() - 1;

    // forward: warm start from the previous (larger) step
    let mut best: Vec<sphere::AscentResult> = Vec::with_capacity(objs.len());
    best.push(sphere::ascend_multistart(&objs[0], p, starts, &opts.ascent));
    for obj in &objs[1..] {
        let prev = &best[best.len() - 1].point;
        best.push(sphere::ascend(obj, p, prev, &opts.ascent));
    }
    // the smallest step also gets a fresh multistart
    let fresh = sphere::ascend_multistart(&objs[last], p, starts, &opts.ascent);
    if fresh.value > best[last].value {
        best[last] = fresh;
    }
    // backward: a maximizer for h/2 is at least as good at h
    for k in (0..last).rev() {
        let r = sphere::ascend(&objs[k], p, &best[k + 1].point, &opts.ascent);
        if r.value > best[k].value {
            best[k] = r;
        }
    }

    let trace: Vec<(f64, f64)> = hs.iter().zip(&best).map(|(&h, r)| (h, r.value)).collect();
    check_monotone(&trace)?;
    Ok(MeasureResult {
        value: trace[last].1,
        p: Lp::Finite(p),
        exact: false,
        h_trace: trace,
    })
}

fn check_monotone(trace: &[(f64, f64)]) -> Result<()> {
    for w in trace.windows(2) {
        let (prev, (h, q)) = (w[0].1, w[1]);
        let excess = q - prev;
        if excess > TRACE_SLACK * prev.abs().max(1.0) {
            return Err(Error::NonMonotoneTrace {
                h,
                excess,
                trace: trace.to_vec(),
            });
        }
    }
    Ok(())
}

/// `(‖I + hA‖_p − 1)/h` evaluated exactly for `p ∈ {1, 2, ∞}`, in a form
/// that does not cancel for small `h`.
pub fn difference_quotient(a: &DenseMatrix, p: Lp, h: f64) -> Result<f64> {
    let n = a.ensure_square()?;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter {
            name: "h".into(),
            reason: format!("must be finite and > 0, got {h}"),
        });
    }
    // (|1 + hx| − 1)/h
    let ex = |x: f64| if 1.0 + h * x >= 0.0 { x } else { -2.0 / h - x };
    let fold = |f: &dyn Fn(usize) -> f64| (0..n).map(f).fold(f64::NEG_INFINITY, f64::max);
    match p {
        Lp::Infinity => Ok(fold(&|i| {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
            ex(a[(i, i)]) + off
        })),
        Lp::Finite(1.0) => Ok(fold(&|j| {
            let off: f64 = (0..n).filter(|&i| i != j).map(|i| a[(i, j)].abs()).sum();
            ex(a[(j, j)]) + off
        })),
        Lp::Finite(2.0) => {
            // ‖I + hA‖₂² = 1 + h λ_max(A + Aᵀ + h AᵀA)
            let m = a
                .add(&a.transpose())?
                .add(&a.transpose().matmul(a)?.scale(h))?;
            let s = *symmetric_eigenvalues(&m)?.last().unwrap_or(&0.0);
            Ok(((0.5 * (h * s).max(-1.0).ln_1p()).exp_m1()) / h)
        }
        other => Err(Error::UnsupportedExponent {
            p: other.to_string(),
            required: "p in {1, 2, inf}",
        }),
    }
}

/// Limit of [`difference_quotient`] over `h = 2^{-4}, …, 2^{-40}`, with a
/// final Richardson step. Serves as a definition-level oracle for the closed
/// forms.
pub fn mu_difference_quotient(a: &DenseMatrix, p: Lp) -> Result<MeasureResult> {
    let trace: Vec<(f64, f64)> = (FIRST_LEVEL..=LAST_LEVEL)
        .map(|k| {
            let h = 2f64.powi(-k);
            difference_quotient(a, p, h).map(|q| (h, q))
        })
        .collect::<Result<_>>()?;
    check_monotone(&trace)?;
    let [.., (_, coarse), (_, fine)] = trace[..] else {
        unreachable!("trace has many levels")
    };
    Ok(MeasureResult {
        value: 2.0 * fine - coarse,
        p,
        exact: false,
        h_trace: trace,
    })
}

/// `Σ dual(x_i)(Ax)_i / Σ|x_i|^p`, whose supremum on the sphere is `μ_p(A)`.
struct SemiInner<'a> {
    a: &'a DenseMatrix,
    p: f64,
}

impl<'a> SemiInner<'a> {
    fn new(a: &'a DenseMatrix, p: f64) -> Self {
        Self { a, p }
    }
}

impl SphereObjective for SemiInner<'_> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.a.matvec_into(x, &mut y);
        let num: f64 = x
            .iter()
            .zip(&y)
            .map(|(&xi, yi)| dual_power(xi, self.p) * yi)
            .sum();
        let den: f64 = x.iter().map(|v| v.abs().powf(self.p)).sum();
        num / den
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        semi_inner_gradient(self.a, self.p, x, g);
    }
}

fn semi_inner_gradient(a: &DenseMatrix, p: f64, x: &[f64], g: &mut [f64]) {
    let n = x.len();
    let mut y = vec![0.0; n];
    a.matvec_into(x, &mut y);
    let u: Vec<f64> = x.iter().map(|&v| dual_power(v, p)).collect();
    let s: f64 = x.iter().map(|v| v.abs().powf(p)).sum();
    let value = u.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / s;
    a.matvec_transpose_into(&u, g);
    for j in 0..n {
        let ax = if p < 2.0 {
            x[j].abs().max(1e-12)
        } else {
            x[j].abs()
        };
        let weight = if p == 2.0 { 1.0 } else { ax.powf(p - 2.0) };
        g[j] = (g[j] + (p - 1.0) * weight * y[j] - value * p * u[j]) / s;
    }
}

/// `(‖x + hAx‖_p / ‖x‖_p − 1)/h` at a fixed `h`.
struct HQuotient<'a> {
    a: &'a DenseMatrix,
    p: f64,
    h: f64,
}

impl<'a> HQuotient<'a> {
    fn new(a: &'a DenseMatrix, p: f64, h: f64) -> Self {
        Self { a, p, h }
    }
}

impl SphereObjective for HQuotient<'_> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (p, h) = (self.p, self.h);
        let mut y = vec![0.0; x.len()];
        self.a.matvec_into(x, &mut y);
        let mut s = 0.0;
        let mut d = 0.0;
        for (&xi, &yi) in x.iter().zip(&y) {
            let base = xi.abs().powf(p);
            s += base;
            d += if xi == 0.0 {
                (h * yi).abs().powf(p)
            } else {
                let r = h * yi / xi;
                if r > -0.5 {
                    base * (p * r.ln_1p()).exp_m1()
                } else {
                    (xi + h * yi).abs().powf(p) - base
                }
            };
        }
        let ratio = (d / s).max(-1.0);
        (ratio.ln_1p() / p).exp_m1() / h
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        let (p, h) = (self.p, self.h);
        if h < SMALL_H {
            semi_inner_gradient(self.a, p, x, g);
            return;
        }
        let n = x.len();
        let mut z = vec![0.0; n];
        self.a.matvec_into(x, &mut z);
        z.iter_mut().zip(x).for_each(|(zi, xi)| *zi = xi + h * *zi);
        let nz = crate::linalg::p_norm_finite(&z, p);
        let nx = crate::linalg::p_norm_finite(x, p);
        if nz == 0.0 {
            g.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let dz: Vec<f64> = z.iter().map(|&v| dual_power(v / nz, p)).collect();
        // (I + hA)ᵀ dz
        self.a.matvec_transpose_into(&dz, g);
        let r = nz / nx;
        for j in 0..n {
            g[j] = (dz[j] + h * g[j] - r * dual_power(x[j] / nx, p)) / nx;
        }
    }
}
