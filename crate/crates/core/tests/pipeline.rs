use wpbdd::circuit::to_circuit;
use wpbdd::compile::{compile, default_order, CompileOptions, Mode};
use wpbdd::encode::encode;
use wpbdd::infer::{brute_force_joint, conditional, Model};
use wpbdd::model::random_network;
use wpbdd::order::LiteralOrdering;

#[test]
fn any_variable_order_gives_correct_marginals() {
    for seed in 0..15u64 {
        let net = random_network(700 + seed, 5, 3, 2);
        let joint = brute_force_joint(&net).unwrap();
        let n = net.num_variables();
        let mut order: Vec<usize> = (0..n).collect();
        order.rotate_left(seed as usize % n);
        order.swap(0, n - 1);
        let enc = encode(&net);
        let ord = LiteralOrdering::from_var_order(&enc.theory, &order).unwrap();
        let model = Model::with_ordering(enc, ord, CompileOptions::default()).unwrap();
        let th = model.theory();
        for v in 0..n {
            for x in 0..th.domain_size(v) {
                let want = conditional(&joint, (v, x), &[]).unwrap();
                let got = model.query(th.atom(v, x), &[]).unwrap();
                assert!((want - got).abs() < 1e-12, "seed {seed}");
            }
        }
    }
}

#[test]
fn hybrid_and_full_agree_under_every_order_of_small_nets() {
    for seed in 0..6u64 {
        let net = random_network(900 + seed, 4, 3, 2);
        let enc = encode(&net);
        let mut perm: Vec<usize> = (0..4).collect();
        // all 24 orders via Heap's algorithm
        let mut c = [0usize; 4];
        let mut orders = vec![perm.clone()];
        let mut i = 0;
        while i < 4 {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                orders.push(perm.clone());
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        assert_eq!(orders.len(), 24);
        for order in orders {
            let ord = LiteralOrdering::from_var_order(&enc.theory, &order).unwrap();
            let full = compile(&enc.cnf, &enc.theory, &ord, CompileOptions::default()).unwrap();
            let hybrid = compile(
                &enc.cnf,
                &enc.theory,
                &ord,
                CompileOptions {
                    mode: Mode::Hybrid,
                    ..CompileOptions::default()
                },
            )
            .unwrap();
            assert_eq!(full.serialize(), hybrid.serialize());
            let omega = enc.cnf.weight_values();
            let lambda = vec![1.0; enc.theory.num_atoms() + 1];
            let z = to_circuit(&full.store, full.root).evaluate(&lambda, &omega).unwrap();
            assert!((z - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn annealed_order_is_no_larger_than_topological() {
    let net = random_network(4242, 8, 3, 3);
    let enc = encode(&net);
    let topo = default_order(&net, &enc.theory);
    let base = compile(&enc.cnf, &enc.theory, &topo, CompileOptions::default())
        .unwrap()
        .node_count();
    let r = wpbdd::compile::anneal_order(&net, 3, 40).unwrap();
    assert_eq!(r.start_cost, base);
    assert!(r.cost <= base);
    assert_eq!(r.evaluations, 40);
}
