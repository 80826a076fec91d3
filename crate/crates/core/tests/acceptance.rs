//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Built with `harness = false`.

use std::sync::Arc;
use std::time::Instant;

use diffcon::certify::{impossibility_search, search_weights, WeightSpace, DEFAULT_B_CAP};
use diffcon::graphnet::{
    assemble_network, discretize_pde, power_product_gap, DiffusionMatrix, GraphLaplacian,
    NetworkSystem, SpatialGrid,
};
use diffcon::linalg::normalized_p_mean;
use diffcon::lognorm::{
    lipschitz_constant, mu_closed_form, mu_difference_quotient, mu_estimate, mu_weighted,
    semi_inner_plus, GridSpec, MeasureMethod,
};
use diffcon::models::{
    BoxDomain, EnzymeFull, EnzymeParams, EnzymeReduced, LinearField, ShiftedField, VectorField,
};
use diffcon::sim::{integrate, verify_contraction, verify_sync, Settings};
use diffcon::{DenseMatrix, Lp, WeightedNorm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
/// Name, check and runtime budget in seconds.
type Criterion = (&'static str, fn() -> Check, f64);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(r: &mut impl Rng, n: usize, scale: f64) -> DenseMatrix {
    let data = (0..n * n).map(|_| r.random_range(-scale..scale)).collect();
    DenseMatrix::new(n, n, data).unwrap()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn enzyme() -> Arc<dyn VectorField> {
    Arc::new(EnzymeReduced::new(EnzymeParams::default()).unwrap())
}

fn certified_norm() -> WeightedNorm {
    WeightedNorm::new(Lp::ONE, vec![1.0, 1.25]).unwrap()
}

fn certificate_grid() -> GridSpec {
    let region = BoxDomain::new(vec![0.0, 0.0], vec![10.0, 2.0]).unwrap();
    GridSpec::default().with_points(65).with_region(region)
}

/// Column sums of `Q J Q⁻¹` for the reduced enzyme Jacobian, by hand.
fn enzyme_mu1_by_hand(p: &EnzymeParams, q: f64, x: f64, y: f64) -> f64 {
    let a = p.k2 * (p.s_y - y);
    let b = p.k1 + p.k2 * x;
    let col0 = -p.delta - a + (q * a).abs();
    let col1 = -b + (b / q).abs();
    col0.max(col1)
}

// Closed forms against the estimators and a definition-level oracle.
fn criterion_1() -> Check {
    let mut r = rng(1);
    let mut worst2: f64 = 0.0;
    let mut worst_dq: f64 = 0.0;
    for _ in 0..200 {
        let n = r.random_range(1..=8);
        let a = random_matrix(&mut r, n, 2.0);
        let exact = mu_closed_form(&a, Lp::TWO).map_err(err)?;
        for method in [MeasureMethod::HQuotient, MeasureMethod::SemiInner] {
            let est = mu_estimate(&a, 2.0, method).map_err(err)?.value;
            worst2 = worst2.max((est - exact).abs());
        }
        for p in [Lp::ONE, Lp::INF] {
            let exact = mu_closed_form(&a, p).map_err(err)?;
            let dq = mu_difference_quotient(&a, p).map_err(err)?.value;
            worst_dq = worst_dq.max((dq - exact).abs());
            // naive (‖I + hA‖ − 1)/h with the induced norm written out
            let h = 1e-7;
            let m = DenseMatrix::identity(n).add(&a.scale(h)).unwrap();
            let norm = (0..n)
                .map(|k| {
                    (0..n)
                        .map(|l| {
                            if p == Lp::ONE {
                                m[(l, k)].abs()
                            } else {
                                m[(k, l)].abs()
                            }
                        })
                        .sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            worst_dq = worst_dq.max(((norm - 1.0) / h - exact).abs());
        }
    }
    ensure(worst2 <= 1e-5, || format!("p=2 estimator gap {worst2:.3e}"))?;
    ensure(worst_dq <= 1e-5, || {
        format!("difference quotient gap {worst_dq:.3e}")
    })?;
    Ok(format!("max gap p=2 {worst2:.2e}, p=1/inf {worst_dq:.2e}"))
}

// The weighted counterexample: a contraction that diffusion breaks.
fn criterion_2() -> Check {
    let a = DenseMatrix::from_rows(&[[-2.0, 1.0], [1.0, -2.0]]).unwrap();
    let w2 = WeightedNorm::new(Lp::TWO, vec![3.0, 1.0]).unwrap();
    let m2 = mu_weighted(&a, &w2).map_err(err)?.value;
    ensure((m2 + 1.0 / 3.0).abs() <= 1e-10, || {
        format!("mu_2,Q(A) = {m2}")
    })?;

    let f: Arc<dyn VectorField> = Arc::new(LinearField::new(a).unwrap());
    let l = GraphLaplacian::path(2).unwrap();
    let w1 = WeightedNorm::new(Lp::ONE, vec![3.0, 1.0, 3.0, 1.0]).unwrap();
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let d = DiffusionMatrix::new(vec![r.random_range(0.01..10.0), r.random_range(0.01..10.0)])
            .unwrap();
        let net = assemble_network(f.clone(), &l, &d).map_err(err)?;
        let j = net.jacobian(&[0.0; 4], 0.0);
        let m1 = mu_weighted(&j, &w1).map_err(err)?.value;
        worst = worst.max((m1 - 1.0).abs());
    }
    ensure(worst <= 1e-10, || {
        format!("mu_1 of the coupled Jacobian off by {worst:.3e}")
    })?;
    Ok(format!(
        "mu_2,Q(A) = {m2:.15}, coupled mu_1 = 1 (max dev {worst:.1e})"
    ))
}

// Enzyme certificate on the sampling grid.
fn criterion_3() -> Check {
    let p = EnzymeParams::default();
    let f = enzyme();
    let est =
        lipschitz_constant(f.as_ref(), &certified_norm(), &certificate_grid()).map_err(err)?;

    let q = 1.25;
    let formula = f64::max(-p.delta + p.k2 * p.s_y * (q - 1.0), p.k1 * (1.0 / q - 1.0));
    let mut brute = f64::NEG_INFINITY;
    for i in 0..65 {
        for j in 0..65 {
            let (x, y) = (10.0 * i as f64 / 64.0, 2.0 * j as f64 / 64.0);
            brute = brute.max(enzyme_mu1_by_hand(&p, q, x, y));
        }
    }
    ensure((formula + 0.2).abs() <= 1e-12, || {
        format!("formula gives {formula}")
    })?;
    ensure((brute - formula).abs() <= 1e-12, || {
        format!("brute force {brute} vs {formula}")
    })?;
    ensure((est.value + 0.2).abs() <= 1e-9, || {
        format!("lipschitz constant {}", est.value)
    })?;

    let unweighted = WeightedNorm::unweighted(Lp::ONE, 2);
    let zero = lipschitz_constant(f.as_ref(), &unweighted, &certificate_grid()).map_err(err)?;
    ensure(zero.value.abs() <= 1e-12, || {
        format!("Q = I gives {}", zero.value)
    })?;
    Ok(format!("c = {} (Q = I: {})", est.value, zero.value))
}

// No diagonal weight works at p > 1.
fn criterion_4() -> Check {
    let params = EnzymeParams::default();
    let mut lowest = f64::INFINITY;
    let mut largest_b: f64 = 0.0;
    for p in [Lp::Finite(1.5), Lp::TWO, Lp::Finite(4.0), Lp::INF] {
        for q in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let w = impossibility_search(&params, p, q, DEFAULT_B_CAP)
                .map_err(|e| format!("p={p} q={q}: {e}"))?;
            let [x, y] = w.point;
            let j = EnzymeReduced::new(params).unwrap().jacobian(&[x, y], 0.0);
            let norm = WeightedNorm::new(p, vec![1.0, q]).unwrap();
            let m = mu_weighted(&j, &norm).map_err(err)?.value;
            ensure(m >= -1e-9, || {
                format!("p={p} q={q}: mu = {m} at {:?}", w.point)
            })?;
            lowest = lowest.min(m);
            largest_b = largest_b.max(w.b);
        }
    }
    Ok(format!(
        "20 witnesses, min mu {lowest:.3e}, largest b {largest_b:.3e}"
    ))
}

fn random_connected(r: &mut impl Rng, n: usize) -> GraphLaplacian {
    let mut edges = Vec::new();
    for k in 1..n {
        edges.push((r.random_range(0..k), k, r.random_range(0.1..3.0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if r.random_bool(0.3) && !edges.iter().any(|&(a, b, _)| (a, b) == (i, j)) {
                edges.push((i, j, r.random_range(0.1..3.0)));
            }
        }
    }
    GraphLaplacian::from_edges(n, &edges).unwrap()
}

// Diffusion is dissipative in every weighted norm.
fn criterion_5() -> Check {
    let mut r = rng(5);
    let zero: Arc<dyn VectorField> = Arc::new(LinearField::new(DenseMatrix::zeros(2, 2)).unwrap());
    let mut graphs = vec![
        GraphLaplacian::path(2).unwrap(),
        GraphLaplacian::path(3).unwrap(),
        GraphLaplacian::complete(3).unwrap(),
    ];
    for _ in 0..5 {
        let n = r.random_range(2..=6);
        graphs.push(random_connected(&mut r, n));
    }
    let mut worst2: f64 = 0.0;
    let mut worst3: f64 = 0.0;
    for l in &graphs {
        for _ in 0..3 {
            let n_species = r.random_range(1..=3);
            let d: Vec<f64> = (0..n_species).map(|_| r.random_range(0.01..10.0)).collect();
            let d = DiffusionMatrix::new(d).unwrap();
            let f: Arc<dyn VectorField> = if n_species == 2 {
                zero.clone()
            } else {
                Arc::new(LinearField::new(DenseMatrix::zeros(n_species, n_species)).unwrap())
            };
            let c = assemble_network(f, l, &d).map_err(err)?.coupling();
            let dim = c.rows();
            for p in [Lp::ONE, Lp::INF] {
                let m = mu_closed_form(&c, p).map_err(err)?;
                ensure(m == 0.0, || format!("{} mu_{p} = {m}", l.label()))?;
            }
            let m2 = mu_closed_form(&c, Lp::TWO).map_err(err)?;
            worst2 = worst2.max(m2.abs());
            for p in [Lp::ONE, Lp::TWO, Lp::INF] {
                let plain = mu_closed_form(&c, p).map_err(err)?;
                for _ in 0..20 {
                    let q: Vec<f64> = (0..n_species)
                        .map(|_| r.random_range(0.01..100.0))
                        .collect();
                    let w = WeightedNorm::new(p, q.repeat(dim / n_species)).unwrap();
                    let m = mu_weighted(&c, &w).map_err(err)?.value;
                    ensure(m == plain, || {
                        format!("{} weighted mu_{p} = {m} vs {plain}", l.label())
                    })?;
                }
            }
            let m3 = mu_estimate(&c, 3.0, MeasureMethod::SemiInner)
                .map_err(err)?
                .value;
            worst3 = worst3.max(m3.abs());
        }
    }
    ensure(worst2 <= 1e-10, || format!("|mu_2| = {worst2:.3e}"))?;
    ensure(worst3 <= 1e-4, || format!("|mu_3| = {worst3:.3e}"))?;
    Ok(format!(
        "{} graphs, |mu_2| <= {worst2:.1e}, |mu_3| <= {worst3:.1e}",
        graphs.len()
    ))
}

fn sample_pair(sys: &NetworkSystem, r: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    let cell = sys.cell_field().domain().clone();
    let mut profile = || -> Vec<f64> {
        (0..sys.n_nodes())
            .flat_map(|_| cell.sample_interior(r, 5.0))
            .collect()
    };
    (profile(), profile())
}

fn stable_dt(sys: &NetworkSystem) -> f64 {
    sys.max_stable_dt().map_or(0.01, |m| m.min(0.01))
}

// Two PDE solutions approach each other at the certified rate, whatever the
// diffusion.
fn criterion_6() -> Check {
    let f = enzyme();
    let w = certified_norm();
    let c = lipschitz_constant(f.as_ref(), &w, &certificate_grid())
        .map_err(err)?
        .value;
    let grid = SpatialGrid::new(1.0, 64).unwrap();
    let mut r = rng(6);
    let mut lines = Vec::new();
    for d in [0.1, 0.01, 1.0, 100.0] {
        let sys = discretize_pde(f.clone(), &DiffusionMatrix::uniform(2, d).unwrap(), &grid)
            .map_err(err)?;
        let (u0, v0) = sample_pair(&sys, &mut r);
        let dt = stable_dt(&sys);
        let dts = if d == 0.1 {
            vec![dt, dt / 2.0]
        } else {
            vec![dt]
        };
        for dt in dts {
            let rep =
                verify_contraction(&sys, &u0, &v0, &w, c, &Settings::new(20.0, dt)).map_err(err)?;
            ensure(rep.bound_ok, || {
                format!(
                    "d={d} dt={dt:.3e}: ratio {} at t={}",
                    rep.worst.ratio, rep.worst.t
                )
            })?;
            lines.push(format!(
                "d={d} dt={dt:.2e} steps={} worst={:.4}",
                rep.steps, rep.worst.ratio
            ));
        }
    }
    Ok(format!("c = {c}; {}", lines.join("; ")))
}

// The same certificate on small networks, including the Dini form.
fn criterion_7() -> Check {
    let f = enzyme();
    let w = certified_norm();
    let c = -0.2;
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    let mut dini: f64 = f64::NEG_INFINITY;
    for l in [
        GraphLaplacian::path(3).unwrap(),
        GraphLaplacian::complete(3).unwrap(),
    ] {
        let d = DiffusionMatrix::new(vec![r.random_range(0.01..10.0), r.random_range(0.01..10.0)])
            .unwrap();
        let net = assemble_network(f.clone(), &l, &d).map_err(err)?;
        for _ in 0..5 {
            let (u0, v0) = sample_pair(&net, &mut r);
            let rep =
                verify_contraction(&net, &u0, &v0, &w, c, &Settings::new(20.0, stable_dt(&net)))
                    .map_err(err)?;
            ensure(rep.bound_ok, || {
                format!("{}: ratio {}", l.label(), rep.worst.ratio)
            })?;
            ensure(rep.dini_ok, || {
                format!("{}: Dini excess {}", l.label(), rep.max_dini_excess)
            })?;
            worst = worst.max(rep.worst.ratio);
            dini = dini.max(rep.max_dini_excess);
        }
    }
    Ok(format!(
        "10 pairs, worst ratio {worst:.4}, max Dini excess {dini:.2e}"
    ))
}

// Synchronization envelopes for N = 2 and N = 3.
fn criterion_8() -> Check {
    let mut r = rng(8);
    let graphs = [
        (GraphLaplacian::path(2).unwrap(), 2.0),
        (GraphLaplacian::complete(3).unwrap(), 3.0),
        (GraphLaplacian::path(3).unwrap(), 1.0),
    ];
    let linear: Arc<dyn VectorField> = Arc::new(
        LinearField::new(DenseMatrix::from_rows(&[[-2.0, 1.0], [1.0, -2.0]]).unwrap()).unwrap(),
    );
    let mut lines = Vec::new();
    for (l, lambda) in graphs {
        let d =
            DiffusionMatrix::new(vec![r.random_range(0.1..3.0), r.random_range(0.1..3.0)]).unwrap();
        let shift = DenseMatrix::diag(&d.entries().iter().map(|x| -lambda * x).collect::<Vec<_>>());
        let shifted = ShiftedField::new(enzyme(), shift).unwrap();
        let search = search_weights(
            &shifted,
            Lp::TWO,
            &GridSpec::default(),
            &WeightSpace::default(),
        )
        .map_err(err)?;
        let mut runs = vec![(
            linear.clone(),
            WeightedNorm::unweighted(Lp::TWO, 2),
            "linear",
        )];
        if search.rate < 0.0 {
            runs.push((enzyme(), search.norm.clone(), "enzyme"));
        }
        for (f, w, which) in runs {
            let u0: Vec<f64> = (0..l.n_nodes())
                .flat_map(|_| f.domain().sample_interior(&mut r, 5.0))
                .collect();
            let settings = Settings::new(10.0, 0.01);
            let rep =
                verify_sync(f, &l, &d, &w, &u0, &settings, &GridSpec::default()).map_err(err)?;
            let label = format!("{} {which}", l.label());
            ensure((rep.lambda - lambda).abs() <= 1e-12, || {
                format!("{label}: lambda {}", rep.lambda)
            })?;
            ensure(rep.rate_c < 0.0, || format!("{label}: c = {}", rep.rate_c))?;
            ensure(rep.bound_ok, || {
                format!("{label}: ratio {} at t={}", rep.worst.ratio, rep.worst.t)
            })?;
            lines.push(format!(
                "{label} q={:?} c={:.3} worst={:.4}",
                w.q, rep.rate_c, rep.worst.ratio
            ));
        }
    }
    Ok(lines.join("; "))
}

// Inequalities, monotonicity and trace properties.
fn criterion_9() -> Check {
    let mut r = rng(9);
    for _ in 0..10_000 {
        let (a, b) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let p = r.random_range(1.0..8.0);
        let g = power_product_gap(a, b, p);
        ensure(g >= -1e-12, || format!("gap({a}, {b}, {p}) = {g}"))?;
    }

    for _ in 0..1000 {
        let n = r.random_range(1..=5);
        let (a, b) = (random_matrix(&mut r, n, 3.0), random_matrix(&mut r, n, 3.0));
        let alpha = r.random_range(0.0..5.0);
        let q: Vec<f64> = (0..n).map(|_| r.random_range(0.1..10.0)).collect();
        for p in [Lp::ONE, Lp::TWO, Lp::INF] {
            let w = WeightedNorm::new(p, q.clone()).unwrap();
            let mu = |m: &DenseMatrix| mu_weighted(m, &w).unwrap().value;
            let (ma, mb, mab) = (mu(&a), mu(&b), mu(&a.add(&b).unwrap()));
            let tol = 1e-12 * (1.0 + ma.abs() + mb.abs());
            ensure(mab <= ma + mb + tol, || {
                format!("subadditivity {mab} > {ma} + {mb}")
            })?;
            let scaled = mu(&a.scale(alpha));
            ensure(
                (scaled - alpha * ma).abs() <= 1e-12 * (1.0 + alpha * ma.abs()),
                || format!("homogeneity {scaled} vs {}", alpha * ma),
            )?;
        }
    }

    for _ in 0..1000 {
        let n = r.random_range(1..=6);
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
        if x.iter().all(|&v| v == 0.0) {
            continue;
        }
        let p = match r.random_range(0..4) {
            0 => Lp::ONE,
            1 => Lp::INF,
            _ => Lp::Finite(r.random_range(1.1..6.0)),
        };
        let q: Vec<f64> = (0..n).map(|_| r.random_range(0.1..10.0)).collect();
        let w = WeightedNorm::new(p, q).unwrap();
        let s = semi_inner_plus(&x, &y, &w).map_err(err)?;
        let bound = w.norm(&x).unwrap() * w.norm(&y).unwrap();
        ensure(s.abs() <= bound * (1.0 + 1e-9) + 1e-12, || {
            format!("|(x,y)+| = {s} > {bound}")
        })?;
    }

    for _ in 0..100 {
        let m = r.random_range(2..=20);
        let h = 1.0 / m as f64;
        let f: Vec<f64> = (0..m).map(|_| r.random_range(-3.0..3.0)).collect();
        let sup = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut prev = 0.0;
        for k in 0..=10 {
            let p = 2f64.powi(k);
            let v = normalized_p_mean(&f, Lp::Finite(p), h);
            ensure(v >= prev * (1.0 - 1e-12), || {
                format!("p-mean drops at p={p}: {v} < {prev}")
            })?;
            // sup·m^{-1/p} ≤ mean ≤ sup
            ensure(v <= sup * (1.0 + 1e-12), || {
                format!("p-mean {v} above sup {sup}")
            })?;
            ensure(v >= sup * (m as f64).powf(-1.0 / p) * (1.0 - 1e-12), || {
                format!("p-mean {v} too low")
            })?;
            prev = v;
        }
        let top = normalized_p_mean(&f, Lp::INF, h);
        ensure(top == sup, || format!("p = inf gives {top}, sup {sup}"))?;
    }

    for i in 0..200 {
        let n = r.random_range(1..=6);
        let a = random_matrix(&mut r, n, 3.0);
        let res = if i % 2 == 0 {
            let p = [Lp::ONE, Lp::TWO, Lp::INF][i / 2 % 3];
            mu_difference_quotient(&a, p)
        } else {
            mu_estimate(&a, 3.0, MeasureMethod::HQuotient)
        }
        .map_err(err)?;
        for pair in res.h_trace.windows(2) {
            let ((h0, q0), (h1, q1)) = (pair[0], pair[1]);
            ensure(h1 < h0, || "trace steps not decreasing".into())?;
            ensure(q1 <= q0 + 1e-9 * q0.abs().max(1.0), || {
                format!("trace rises at h={h1}: {q0} -> {q1}")
            })?;
        }
    }
    Ok("ab inequality 1e4, subadditivity/homogeneity 1e3, Cauchy-Schwarz 1e3, p-means 100, traces 200"
        .into())
}

// The reduced model is the full one on the conservation manifold.
fn criterion_10() -> Check {
    let params = EnzymeParams::default();
    let full = EnzymeFull::new(params).unwrap();
    let reduced = EnzymeReduced::new(params).unwrap();
    let mut r = rng(10);
    let (mut drift, mut gap): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let u0 = vec![r.random_range(0.0..5.0), r.random_range(0.0..params.s_y)];
        let a = integrate(&full, &full.lift(&u0), 10.0, 0.01).map_err(err)?;
        let b = integrate(&reduced, &u0, 10.0, 0.01).map_err(err)?;
        for (sa, sb) in a.states.iter().zip(&b.states) {
            drift = drift.max((sa[1] + sa[2] - params.s_y).abs());
            gap = gap.max((sa[0] - sb[0]).abs()).max((sa[1] - sb[1]).abs());
        }
    }
    ensure(drift <= 1e-8, || format!("conservation drift {drift:.3e}"))?;
    ensure(gap <= 1e-7, || format!("projection gap {gap:.3e}"))?;
    Ok(format!("drift {drift:.1e}, projection gap {gap:.1e}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("closed forms vs estimators", criterion_1, 10.0),
        ("weighted counterexample", criterion_2, 1.0),
        ("enzyme certificate", criterion_3, 5.0),
        ("impossibility sweep", criterion_4, 30.0),
        ("diffusion dissipativity", criterion_5, 30.0),
        ("PDE contraction envelope", criterion_6, 120.0),
        ("network contraction", criterion_7, 60.0),
        ("synchronization envelopes", criterion_8, 60.0),
        ("property suites", criterion_9, 30.0),
        ("conservation and reduction", criterion_10, 10.0),
    ];
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(_) if secs > *budget => Err(format!("took longer than {budget}s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS {name} ({detail}; {secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL {name} ({detail}; {secs:.2}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
