//! Distributions, demonic choice and refinement degrees.

mod common;

use std::collections::BTreeSet;

use common::{op_from_mask, shape, tuples};
use proptest::prelude::*;
use refinery_core::{
    check_prob_refinement, demonic_join, mix, mix_sets, refinement_degree, Distribution, Operation, Prob, ProbOperation,
};

fn prob() -> impl Strategy<Value = Prob> {
    (0i64..=20).prop_map(|n| Prob::new(n, 20))
}

/// A distribution over `0..n` from raw positive weights.
fn dist(n: u32) -> impl Strategy<Value = Distribution<u32>> {
    prop::collection::vec(0i64..5, n as usize).prop_map(move |mut w| {
        if w.iter().all(|&x| x == 0) {
            w[0] = 1;
        }
        let total: i64 = w.iter().sum();
        Distribution::new(w.into_iter().enumerate().map(|(i, x)| (i as u32, Prob::new(x, total)))).unwrap()
    })
}

#[derive(Debug, Clone)]
enum Step {
    Mix(usize, Prob, usize),
    Join(usize, usize),
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (any::<usize>(), prob(), any::<usize>()).prop_map(|(a, p, b)| Step::Mix(a, p, b)),
        (any::<usize>(), any::<usize>()).prop_map(|(a, b)| Step::Join(a, b)),
    ]
}

/// The degree straight from its definition: the least, over target
/// precondition tuples and offered distributions, of the mass on allowed
/// outputs.
fn oracle_degree(target: &Operation, pop: &ProbOperation) -> Prob {
    let ns = target.state().len();
    let mut worst = Prob::one();
    for pre in target.pre_rows() {
        let allowed: BTreeSet<&[u32]> =
            target.rows().iter().filter(|r| target.pre_part(r) == &pre[..]).map(|r| target.output_part(r)).collect();
        for d in &pop.behavior()[&pre] {
            let mut mass = Prob::zero();
            for (post, w) in d.iter() {
                if allowed.contains(&post[ns..]) {
                    mass = mass + w.clone();
                }
            }
            if mass < worst {
                worst = mass;
            }
        }
    }
    worst
}

/// A probabilistic operation offering, at every precondition tuple, the
/// given number of random distributions over post tuples.
fn prob_op(op: &Operation, seeds: &[u64], choices: usize) -> ProbOperation {
    let mut pop = ProbOperation::new("P", op.state().to_vec(), op.inputs().to_vec(), op.outputs().to_vec()).unwrap();
    let posts = tuples(&op.post_vars());
    let mut k = 0;
    for pre in tuples(&op.pre_vars()) {
        for _ in 0..choices {
            let seed = seeds[k % seeds.len()].rotate_left(k as u32);
            k += 1;
            let raw: Vec<i64> = (0..posts.len()).map(|i| (seed >> (i % 60) & 3) as i64).collect();
            let total: i64 = raw.iter().sum();
            let d = if total == 0 {
                Distribution::point(posts[0].clone())
            } else {
                Distribution::new(posts.iter().cloned().zip(raw.into_iter().map(|w| Prob::new(w, total)))).unwrap()
            };
            pop.insert_distribution(pre.clone(), d).unwrap();
        }
    }
    pop
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixing_is_affine(d1 in dist(3), d2 in dist(3), p in prob()) {
        let m = mix(&d1, &p, &d2).unwrap();
        prop_assert!(m.is_normalized());
        for x in 0..3 {
            prop_assert_eq!(m.weight(&x), p.clone() * d1.weight(&x) + p.complement() * d2.weight(&x));
        }
        prop_assert_eq!(&mix(&d1, &Prob::one(), &d2).unwrap(), &d1);
        prop_assert_eq!(&mix(&d1, &Prob::zero(), &d2).unwrap(), &d2);
        prop_assert_eq!(&mix(&d1, &p, &d1).unwrap(), &d1);
    }

    #[test]
    fn demonic_degree_is_the_minimum(shape in shape(), mask in any::<u64>(), seeds in prop::collection::vec(any::<u64>(), 1..4)) {
        let target = op_from_mask("T", shape, "O", mask);
        let both = prob_op(&target, &seeds, 2);
        // split the two choices into two single-choice operations
        let mut first = ProbOperation::new("F", target.state().to_vec(), target.inputs().to_vec(), target.outputs().to_vec()).unwrap();
        let mut second = first.clone();
        for (pre, ds) in both.behavior() {
            let v: Vec<_> = ds.iter().cloned().collect();
            first.insert_distribution(pre.clone(), v[0].clone()).unwrap();
            second.insert_distribution(pre.clone(), v[v.len() - 1].clone()).unwrap();
        }
        let d = refinement_degree(&target, &both).unwrap();
        prop_assert_eq!(&d, &oracle_degree(&target, &both));
        let d1 = refinement_degree(&target, &first).unwrap();
        let d2 = refinement_degree(&target, &second).unwrap();
        prop_assert!(d <= d1 && d <= d2);
        if check_prob_refinement(&target, &both).unwrap().passed() {
            prop_assert!(d.is_one());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn compositions_stay_normalized(seed in prop::collection::vec(dist(4), 2..6), steps in prop::collection::vec(step(), 1000)) {
        let mut pool: Vec<BTreeSet<Distribution<u32>>> = seed.into_iter().map(|d| [d].into()).collect();
        for s in steps {
            let n = pool.len();
            let next = match s {
                Step::Mix(a, p, b) => mix_sets(&pool[a % n], &p, &pool[b % n]).unwrap(),
                Step::Join(a, b) => demonic_join(&[pool[a % n].clone(), pool[b % n].clone()]).unwrap(),
            };
            prop_assert!(next.iter().all(Distribution::is_normalized));
            // keep the pool and the sets small
            let trimmed: BTreeSet<_> = next.into_iter().take(4).collect();
            pool[n - 1 - (n / 2)] = trimmed;
        }
    }
}

#[test]
fn hedged_learning_degree_expands_demonic_choice() {
    let yes = Distribution::point("yes");
    let no = Distribution::point("no");
    let p: Prob = "0.93".parse().unwrap();
    let hedged =
        mix_sets(&[yes.clone()].into(), &p, &demonic_join(&[[yes.clone()].into(), [no.clone()].into()]).unwrap())
            .unwrap();
    let expanded: BTreeSet<_> = [mix(&yes, &p, &yes).unwrap(), mix(&yes, &p, &no).unwrap()].into();
    assert_eq!(hedged, expanded);
    let worst = hedged.iter().map(|d| d.weight(&"yes")).min().unwrap();
    assert_eq!(worst, Prob::new(93, 100));
}
