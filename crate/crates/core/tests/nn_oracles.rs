use ast_stress::nn::{kl_diag_gaussian, rows_to_matrix, DiagGaussian, GaussianPolicy, Mlp, ParamVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-5;

fn policy(seed: u64, state_dim: usize, action_dim: usize) -> GaussianPolicy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = GaussianPolicy::init(state_dim, &[32, 32], action_dim, &mut rng);
    // Perturb away from the near-zero output layer and unit std.
    let params: Vec<f64> = p.params().iter().map(|v| v + rng.random_range(-0.2..0.2)).collect();
    p.set_params(&ParamVector(params)).unwrap();
    p
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / na.max(nb).max(1e-12)
}

fn fd_gradient(theta: &ParamVector, f: impl Fn(&ParamVector) -> f64) -> Vec<f64> {
    (0..theta.len())
        .map(|i| {
            let mut plus = theta.clone();
            plus[i] += EPS;
            let mut minus = theta.clone();
            minus[i] -= EPS;
            (f(&plus) - f(&minus)) / (2.0 * EPS)
        })
        .collect()
}

#[test]
fn log_prob_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for seed in 0..3 {
        let p = policy(seed, 4, 6);
        let s = random_vec(&mut rng, 4, 2.0);
        let a = random_vec(&mut rng, 6, 1.5);
        let (_, g) = p.grad_log_prob(&s, &a).unwrap();
        let theta = p.params();
        let fd = fd_gradient(&theta, |t| p.with_params(t).unwrap().log_prob(&s, &a).unwrap());
        let err = rel_err(&g, &fd);
        assert!(err <= 1e-4, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn batched_paths_match_per_sample_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = policy(3, 4, 6);
    let states: Vec<Vec<f64>> = (0..25).map(|_| random_vec(&mut rng, 4, 2.0)).collect();
    let actions: Vec<Vec<f64>> = (0..25).map(|_| random_vec(&mut rng, 6, 1.0)).collect();
    let weights = random_vec(&mut rng, 25, 1.0);
    let s = rows_to_matrix(&states, 4).unwrap();
    let a = rows_to_matrix(&actions, 6).unwrap();

    let trace = p.trace_batch(&s).unwrap();
    let lp = p.log_prob_rows(trace.output(), &a);
    let mut batched = ParamVector::zeros(p.n_params());
    p.accumulate_grad_log_prob_batch(&trace, &a, &weights, &mut batched);

    let mut single = ParamVector::zeros(p.n_params());
    for (i, (st, ac)) in states.iter().zip(&actions).enumerate() {
        let mean = p.mean.forward(st).unwrap();
        for (j, m) in mean.iter().enumerate() {
            assert!((m - trace.output()[(i, j)]).abs() < 1e-12);
        }
        let l = p.accumulate_grad_log_prob(st, ac, weights[i], &mut single).unwrap();
        assert!((l - lp[i]).abs() < 1e-10);
    }
    assert!(rel_err(&batched, &single) < 1e-12);

    let v = ParamVector(random_vec(&mut rng, p.n_params(), 1.0));
    let f1 = p.fisher_vector_product(&states, &v).unwrap();
    let f2 = p.fisher_operator(&s).unwrap().apply(&v);
    assert!(rel_err(&f1, &f2) < 1e-12);
}

/// `uᵀ H v` for the Hessian of `θ ↦ mean KL(π_θ0 ‖ π_θ)` by polarization of
/// second differences along `u + v` and `u − v`.
fn kl_hessian_bilinear(p: &GaussianPolicy, states: &[Vec<f64>], u: &ParamVector, v: &ParamVector) -> f64 {
    let h = 1e-5;
    let theta = p.params();
    let quad = |w: &ParamVector| {
        let mut plus = theta.clone();
        plus.axpy(h, w);
        let mut minus = theta.clone();
        minus.axpy(-h, w);
        let kp = p.mean_kl(&p.with_params(&plus).unwrap(), states).unwrap();
        let km = p.mean_kl(&p.with_params(&minus).unwrap(), states).unwrap();
        (kp + km) / (h * h)
    };
    let mut sum = u.clone();
    sum.axpy(1.0, v);
    let mut diff = u.clone();
    diff.axpy(-1.0, v);
    (quad(&sum) - quad(&diff)) / 4.0
}

#[test]
fn fisher_vector_product_matches_kl_hessian() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = policy(5, 4, 6);
    let states: Vec<Vec<f64>> = (0..20).map(|_| random_vec(&mut rng, 4, 2.0)).collect();
    let s = rows_to_matrix(&states, 4).unwrap();
    let op = p.fisher_operator(&s).unwrap();
    for _ in 0..4 {
        let u = ParamVector(random_vec(&mut rng, p.n_params(), 1.0));
        let v = ParamVector(random_vec(&mut rng, p.n_params(), 1.0));
        let analytic = u.dot(&op.apply(&v));
        let fd = kl_hessian_bilinear(&p, &states, &u, &v);
        let err = (analytic - fd).abs() / analytic.abs().max(fd.abs());
        assert!(err <= 1e-4, "uᵀFv {analytic} vs {fd}: {err:e}");
    }
}

#[test]
fn kl_matches_quadrature() {
    let old = DiagGaussian {
        mean: vec![0.3],
        log_std: vec![-0.2],
    };
    let new = DiagGaussian {
        mean: vec![-0.4],
        log_std: vec![0.35],
    };
    let closed = kl_diag_gaussian(&old, &new);
    // Composite Simpson over ±14 old standard deviations.
    let sd = old.log_std[0].exp();
    let (lo, hi) = (old.mean[0] - 14.0 * sd, old.mean[0] + 14.0 * sd);
    let n = 20_000;
    let h = (hi - lo) / n as f64;
    let f = |x: f64| {
        let lp = old.log_prob(&[x]);
        lp.exp() * (lp - new.log_prob(&[x]))
    };
    let mut sum = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    let quad = sum * h / 3.0;
    assert!((closed - quad).abs() < 1e-6, "{closed} vs {quad}");
}

#[test]
fn kl_of_unit_mean_shift() {
    let a = DiagGaussian { mean: vec![1.0], log_std: vec![0.0] };
    let b = DiagGaussian { mean: vec![1.6], log_std: vec![0.0] };
    assert!((kl_diag_gaussian(&a, &b) - 0.18).abs() < 1e-15);
    assert_eq!(kl_diag_gaussian(&a, &a), 0.0);
}

#[test]
fn log_prob_integrates_to_one() {
    let p = GaussianPolicy::new(Mlp::zeros(&[1, 1]), vec![0.4]);
    let (lo, hi, n) = (-12.0, 12.0, 4000);
    let h = (hi - lo) / n as f64;
    let total: f64 = (0..n)
        .map(|i| {
            let x = lo + (i as f64 + 0.5) * h;
            p.log_prob(&[0.0], &[x]).unwrap().exp() * h
        })
        .sum();
    assert!((total - 1.0).abs() < 0.01, "{total}");
}

#[test]
fn sample_mean_converges() {
    let p = policy(9, 4, 6);
    let s = [0.2, -0.4, 1.0, 0.0];
    let dist = p.distribution(&s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 100_000;
    let mut sum = [0.0; 6];
    for _ in 0..n {
        for (acc, x) in sum.iter_mut().zip(p.sample(&s, &mut rng).unwrap()) {
            *acc += x;
        }
    }
    for j in 0..6 {
        let mean = sum[j] / n as f64;
        let tol = 3.0 * dist.log_std[j].exp() / (n as f64).sqrt();
        assert!((mean - dist.mean[j]).abs() <= tol, "dim {j}: {mean} vs {}", dist.mean[j]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn params_round_trip_exactly(seed in any::<u64>(), noise in prop::collection::vec(-5.0f64..5.0, 1..8)) {
        let p = policy(seed, 3, 2);
        let mut theta = p.params();
        for (i, n) in noise.iter().enumerate() {
            let k = (i * 97) % theta.len();
            theta[k] += n;
        }
        let q = p.with_params(&theta).unwrap();
        prop_assert_eq!(q.params(), theta);
    }

    #[test]
    fn small_network_gradients(seed in any::<u64>(), hidden in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = {
            let mut p = GaussianPolicy::init(3, &[hidden, hidden], 2, &mut rng);
            let params: Vec<f64> = p.params().iter().map(|v| v + rng.random_range(-0.5..0.5)).collect();
            p.set_params(&ParamVector(params)).unwrap();
            p
        };
        let s = random_vec(&mut rng, 3, 2.0);
        let a = random_vec(&mut rng, 2, 2.0);
        let (_, g) = p.grad_log_prob(&s, &a).unwrap();
        let fd = fd_gradient(&p.params(), |t| p.with_params(t).unwrap().log_prob(&s, &a).unwrap());
        prop_assert!(rel_err(&g, &fd) <= 1e-4);
    }
}
