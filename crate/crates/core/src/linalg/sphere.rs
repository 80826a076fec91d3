//! Projected gradient ascent of scale-invariant objectives on the unit
//! p-sphere. Shared by the general-p operator norm and the logarithmic norm
//! estimators.

use rand::Rng;
use rand_distr::StandardNormal;

use super::norms::p_norm_finite;
use super::norms::AscentOptions;

/// A degree-zero homogeneous objective, `f(αx) = f(x)` for `α > 0`.
pub(crate) trait SphereObjective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Writes an ascent direction (the gradient, up to a positive factor).
    fn gradient(&self, x: &[f64], g: &mut [f64]);
}

#[derive(Debug, Clone)]
pub(crate) struct AscentResult {
    pub value: f64,
    pub point: Vec<f64>,
}

pub(crate) fn normalize(x: &mut [f64], p: f64) -> bool {
    let n = p_norm_finite(x, p);
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= n);
    true
}

/// Start vectors: the standard basis first, then seeded random unit vectors
/// until `count` starts exist. The basis is always included in full.
pub(crate) fn starts<R: Rng>(n: usize, count: usize, p: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count.max(n));
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        out.push(e);
    }
    while out.len() < count {
        let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if normalize(&mut x, p) {
            out.push(x);
        }
    }
    out
}

/// Ascent from a single start. Step lengths double after an accepted step
/// and halve after a rejected one; the run stops after three consecutive
/// accepted steps with relative gain below `opts.tolerance`, when the step
/// underflows, or at the iteration cap.
pub(crate) fn ascend<O: SphereObjective>(
    obj: &O,
    p: f64,
    start: &[f64],
    opts: &AscentOptions,
) -> AscentResult {
    let n = obj.dim();
    let mut x = start.to_vec();
    if !normalize(&mut x, p) {
        x = vec![0.0; n];
        x[0] = 1.0;
    }
    let mut fx = obj.value(&x);
    let mut g = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut step = 0.25;
    let mut small_gains = 0;

    for _ in 0..opts.max_iterations {
        obj.gradient(&x, &mut g);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !gnorm.is_finite() || gnorm == 0.0 {
            break;
        }
        loop {
            for ((t, xi), gi) in trial.iter_mut().zip(&x).zip(&g) {
                *t = xi + step * gi / gnorm;
            }
            let ok = normalize(&mut trial, p);
            let ft = if ok {
                obj.value(&trial)
            } else {
                f64::NEG_INFINITY
            };
            if ft > fx {
                let gain = ft - fx;
                std::mem::swap(&mut x, &mut trial);
                fx = ft;
                if gain <= opts.tolerance * fx.abs().max(1.0) {
                    small_gains += 1;
                } else {
                    small_gains = 0;
                }
                step = (step * 2.0).min(1.0);
                break;
            }
            step *= 0.5;
            if step < opts.min_step {
                break;
            }
        }
        if step < opts.min_step || small_gains >= 3 {
            break;
        }
    }
    AscentResult {
        value: fx,
        point: x,
    }
}

/// Best of several starts; ties keep the earliest start.
pub(crate) fn ascend_multistart<O: SphereObjective>(
    obj: &O,
    p: f64,
    starts: &[Vec<f64>],
    opts: &AscentOptions,
) -> AscentResult {
    let mut best: Option<AscentResult> = None;
    for s in starts {
        let r = ascend(obj, p, s, opts);
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    best.expect("at least one start")
}

/// `sign(v)|v|^{p-1}`, the (unnormalized) gradient of `‖v‖_p^p / p`.
pub(crate) fn dual_power(v: f64, p: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * v.abs().powf(p - 1.0)
    }
}
