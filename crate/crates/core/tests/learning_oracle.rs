mod common;

use common::{assignments as all_assignments, rng};
use icp_core::cp::{Assignment, Solver, VarId};
use icp_core::ml::{
    fit_linear, gradient, loss, predict, vs_init, Candidate, ConstraintBias, Dataset,
    LinearHypothesis, Relation, VersionSpace,
};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn synthetic(r: &mut ChaCha8Rng, n: usize, m: usize) -> (Dataset, Vec<f64>) {
    let truth: Vec<f64> = (0..=m).map(|_| r.random_range(-3.0..3.0)).collect();
    let mut d = Dataset::empty(m);
    for _ in 0..n {
        let x: Vec<f64> = (0..m).map(|_| r.random_range(-5.0..5.0)).collect();
        let y = x.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>() + truth[m];
        d.push(x, y).unwrap();
    }
    (d, truth)
}

#[test]
fn noiseless_weights_are_recovered() {
    let mut r = rng(1);
    for _ in 0..20 {
        let (d, truth) = synthetic(&mut r, 50, 4);
        let h = fit_linear(&d, 0.0).unwrap();
        let err = h.weights.iter().zip(&truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        for (x, y) in d.iter() {
            assert!((predict(&h, x).unwrap() - y).abs() < 1e-6);
        }
        // coarse grid around the truth never beats the fit
        let fitted = loss(&d, &h).unwrap();
        for k in 0..3usize.pow(5) {
            let mut w = truth.clone();
            let mut code = k;
            for wi in w.iter_mut() {
                *wi += (code % 3) as f64 * 0.01 - 0.01;
                code /= 3;
            }
            assert!(fitted <= loss(&d, &LinearHypothesis::new(w)).unwrap() + 1e-12);
        }
    }
}

#[test]
fn gradient_vanishes_at_fit() {
    let mut r = rng(2);
    for ridge in [0.0, 0.5] {
        let (mut d, _) = synthetic(&mut r, 50, 4);
        // noisy targets so the minimum is not a perfect fit
        let noisy: Vec<(Vec<f64>, f64)> =
            d.iter().map(|(x, y)| (x.to_vec(), y + r.random_range(-1.0..1.0))).collect();
        d = Dataset::empty(4);
        for (x, y) in noisy {
            d.push(x, y).unwrap();
        }
        let h = fit_linear(&d, ridge).unwrap();
        let objective = |w: &[f64]| {
            let h = LinearHypothesis::new(w.to_vec());
            loss(&d, &h).unwrap() + ridge * w.iter().map(|v| v * v).sum::<f64>()
        };
        let analytic = gradient(&d, &h, ridge).unwrap();
        let step = 1e-5;
        for i in 0..h.weights.len() {
            let mut up = h.weights.clone();
            let mut down = h.weights.clone();
            up[i] += step;
            down[i] -= step;
            let fd = (objective(&up) - objective(&down)) / (2.0 * step);
            assert!(analytic[i].abs() < 1e-6, "analytic {i}: {}", analytic[i]);
            assert!((fd - analytic[i]).abs() < 1e-6, "fd {i}: {fd} vs {}", analytic[i]);
        }
    }
}

#[test]
fn fit_beats_random_perturbations() {
    let mut r = rng(3);
    let (d, _) = synthetic(&mut r, 30, 3);
    let noisy = Dataset::new(
        d.rows().to_vec(),
        d.targets().iter().map(|y| y + r.random_range(-2.0..2.0)).collect(),
    )
    .unwrap();
    let h = fit_linear(&noisy, 0.0).unwrap();
    let best = loss(&noisy, &h).unwrap();
    for _ in 0..1000 {
        let w: Vec<f64> = h.weights.iter().map(|w| w + r.random_range(-0.5..0.5)).collect();
        assert!(best <= loss(&noisy, &LinearHypothesis::new(w)).unwrap());
    }
}

fn random_target(r: &mut ChaCha8Rng, bias: &ConstraintBias, k: usize, space: &[Assignment]) -> Vec<Candidate> {
    loop {
        let mut target: Vec<Candidate> = Vec::new();
        while target.len() < k {
            let c = bias.candidates()[r.random_range(0..bias.candidates().len())];
            if !target.iter().any(|t| t.first == c.first && t.second == c.second) {
                target.push(c);
            }
        }
        if space.iter().any(|e| target.iter().all(|c| c.holds(e))) {
            return target;
        }
    }
}

struct Run {
    vs: VersionSpace,
    informative: usize,
    queries: usize,
}

fn acquire(target: &[Candidate], bias: ConstraintBias, seed_example: &Assignment) -> Run {
    let label = |e: &Assignment| target.iter().all(|c| c.holds(e));
    let mut vs = vs_init(bias).unwrap();
    vs.update(seed_example, true).unwrap();
    let (mut informative, mut queries) = (0, 0);
    while let Some(q) = vs.generate_query(&Solver::default()) {
        let undecided = vs.undecided().len();
        let (confirmed, rejected) = (vs.confirmed().clone(), vs.rejected().clone());
        let positive = label(&q.assignment);
        let u = vs.update(&q.assignment, positive).unwrap();
        if q.near_miss || positive {
            assert!(u.changed(), "query {q:?} was uninformative");
        }
        assert!(confirmed.is_subset(vs.confirmed()) && rejected.is_subset(vs.rejected()));
        if u.changed() {
            assert!(vs.undecided().len() < undecided);
            informative += 1;
        }
        queries += 1;
        assert!(queries <= 200, "no convergence");
    }
    Run { vs, informative, queries }
}

#[test]
fn acquisition_converges_to_target() {
    let space = all_assignments(5, 1, 5);
    let bias = ConstraintBias::complete(5, 1, 5, &Relation::ALL);
    let mut r = rng(4);
    let mut worst = 0;
    let mut worst_inf = 0;
    for _ in 0..40 {
        let target = random_target(&mut r, &bias, 4, &space);
        let positives: Vec<&Assignment> = space.iter().filter(|e| target.iter().all(|c| c.holds(e))).collect();
        let seed = positives[r.random_range(0..positives.len())];
        let run = acquire(&target, bias.clone(), seed);
        worst_inf = worst_inf.max(run.informative);

        for t in &target {
            assert!(!run.vs.rejected().contains(t), "target {t} rejected");
        }
        let in_target = |e: &Assignment| target.iter().all(|c| c.holds(e));
        let in_confirmed = |e: &Assignment| run.vs.confirmed().iter().all(|c| c.holds(e));
        for e in &space {
            assert_eq!(in_target(e), in_confirmed(e), "target {target:?} confirmed {:?}", run.vs.confirmed());
        }
        // confirmed candidates are implied by the target, and nothing is left open
        for c in run.vs.confirmed() {
            assert!(space.iter().filter(|e| in_target(e)).all(|e| c.holds(e)), "{c} not implied");
        }
        assert!(run.vs.undecided().is_empty());
        assert!(run.informative <= 60, "{} informative queries", run.informative);
        worst = worst.max(run.queries);
    }
    println!("most queries in one run: {worst}, informative {worst_inf}");
}

#[test]
fn classic_chain_target() {
    let space = all_assignments(5, 1, 5);
    let bias = ConstraintBias::complete(5, 1, 5, &Relation::ALL);
    let c = |a, b, r| Candidate::new(VarId(a), VarId(b), r);
    let target = vec![c(0, 1, Relation::Lt), c(1, 2, Relation::Le), c(2, 3, Relation::Ne), c(3, 4, Relation::Eq)];
    let run = acquire(&target, bias, &Assignment::new(vec![1, 2, 2, 4, 4]));
    for e in &space {
        assert_eq!(
            target.iter().all(|c| c.holds(e)),
            run.vs.confirmed().iter().all(|c| c.holds(e))
        );
    }
}

proptest! {
    #[test]
    fn version_space_is_monotone(labels in proptest::collection::vec((proptest::collection::vec(1i64..=3, 3), any::<bool>()), 0..20)) {
        let mut vs = vs_init(ConstraintBias::complete(3, 1, 3, &Relation::ALL)).unwrap();
        for (values, label) in labels {
            let before = vs.clone();
            if vs.update(&Assignment::new(values), label).is_err() {
                prop_assert_eq!(vs.undecided(), before.undecided());
                continue;
            }
            prop_assert!(vs.undecided().len() <= before.undecided().len());
            prop_assert!(before.confirmed().is_subset(vs.confirmed()));
            prop_assert!(before.rejected().is_subset(vs.rejected()));
            prop_assert_eq!(vs.undecided().len() + vs.confirmed().len() + vs.rejected().len(), 18);
        }
    }
}
