use std::cmp::Ordering;

use ordinal_ramsey::ordinal::{mul_nat, sub_multiset};
use ordinal_ramsey::sample::{FuzzConfig, Sampler};
use ordinal_ramsey::*;
use proptest::prelude::*;

fn ctx() -> SeqCtx {
    SeqCtx::default()
}

/// Ordinals built from naturals, `Γ_0`, `Γ_1` and `ω` by sums and `φ`.
fn arb_ordinal() -> impl Strategy<Value = Ordinal> {
    let leaf = prop_oneof![
        4 => (0u64..4).prop_map(Ordinal::nat),
        1 => Just(Ordinal::omega()),
        1 => (0u64..2).prop_map(|k| gamma(BaseIdx::Fin(k))),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| veblen(&a, &b)),
            (inner.clone(), 1u64..4).prop_map(|(a, c)| omega_pow(&mul_nat(&a, c))),
            (inner.clone(), inner).prop_map(|(a, b)| add(&a, &b)),
        ]
    })
}

fn arb_set(lo: u64, hi: u64, max_len: usize) -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::btree_set(lo..hi, 0..=max_len).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_parse_round_trip(x in arb_ordinal()) {
        let back = parse_ordinal(&x.to_string(), &ctx()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn comparison_is_a_total_order(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
        prop_assert_eq!(compare(&a, &b), compare(&b, &a).reverse());
        prop_assert_eq!(compare(&a, &b) == Ordering::Equal, a == b);
        if compare(&a, &b).is_le() && compare(&b, &c).is_le() {
            prop_assert!(compare(&a, &c).is_le());
        }
    }

    #[test]
    fn natural_sum_commutes_and_associates(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
        prop_assert_eq!(nat_sum(&a, &b), nat_sum(&b, &a));
        prop_assert_eq!(nat_sum(&nat_sum(&a, &b), &c), nat_sum(&a, &nat_sum(&b, &c)));
        prop_assert!(compare(&add(&a, &b), &nat_sum(&a, &b)).is_le());
    }

    #[test]
    fn ordinal_sum_associates_and_absorbs(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
        prop_assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
        if let (Some(first), Some(lead)) = (a.terms().first(), b.terms().first()) {
            if compare(&Ordinal::from_head(first.head.clone()), &Ordinal::from_head(lead.head.clone())).is_lt() {
                prop_assert_eq!(add(&a, &b), b.clone());
            }
        }
        prop_assert!(compare(&a, &add(&a, &b)).is_le());
    }

    #[test]
    fn finite_natural_products_unfold(a in arb_ordinal(), j in 0u64..4, k in 0u64..4) {
        prop_assert_eq!(nat_prod_fin(&a, j + k), nat_sum(&nat_prod_fin(&a, j), &nat_prod_fin(&a, k)));
    }

    #[test]
    fn smaller_veblen_index_fixes_larger(a in arb_ordinal(), a2 in arb_ordinal(), b in arb_ordinal()) {
        if compare(&a2, &a).is_lt() {
            let v = veblen(&a, &b);
            prop_assert_eq!(veblen(&a2, &v), v);
        }
    }

    #[test]
    fn subterm_multisets_are_monotone(g in arb_ordinal()) {
        let sg = sub_multiset(&g);
        for (b, _) in sg.iter() {
            let sb = sub_multiset(b);
            for (x, m) in sb.iter() {
                prop_assert!(sg.multiplicity(x) >= m, "{} in Sub({}) but not in Sub({}) often enough", x, b, g);
            }
        }
    }

    #[test]
    fn fundamental_sequences_descend_and_grow(a in arb_ordinal(), n in 1u64..8) {
        let c = ctx();
        let an = fs_step(&a, n, &c);
        if !a.is_zero() {
            prop_assert!(compare(&an, &a).is_lt(), "{}[{}] = {}", a, n, an);
        }
        if a.is_limit() {
            let next = fs_step(&a, n + 1, &c);
            prop_assert!(compare(&an, &next).is_le(), "{}[{}] = {} > {}", a, n, an, next);
        }
    }

    #[test]
    fn sums_step_in_their_last_term(a in arb_ordinal(), n in 1u64..8) {
        let c = ctx();
        if let Some((b0, head)) = a.split_last() {
            let w = Ordinal::from_head(head);
            prop_assert_eq!(fs_step(&a, n, &c), add(&b0, &fs_step(&w, n, &c)));
        }
    }

    #[test]
    fn largeness_is_upward_closed(s in arb_set(2, 20, 6), extra in arb_set(2, 20, 4), k in 1u64..4) {
        let c = ctx();
        let alpha = add(&Ordinal::omega(), &Ordinal::nat(k));
        let mut t: Vec<u64> = s.iter().chain(extra.iter()).copied().collect();
        t.sort_unstable();
        t.dedup();
        if classify_large(&alpha, &s, &c).is_large() {
            prop_assert!(classify_large(&alpha, &t, &c).is_large());
        }
        if classify_large(&alpha, &t, &c).verdict == Verdict::Size && s.len() < t.len() {
            prop_assert_eq!(classify_large(&alpha, &s, &c).verdict, Verdict::Small);
        }
    }

    #[test]
    fn alpha_size_fronts_are_prefix_free(s in arb_set(2, 24, 7), which in 0usize..3) {
        let c = ctx();
        let alpha = [Ordinal::omega(), omega_pow(&Ordinal::nat(2)), omega_pow(&Ordinal::omega())][which].clone();
        let f = make_alpha_size(&alpha, BaseStream::AllFrom(2), &c).unwrap();
        let mut sizes = 0;
        for k in 0..=s.len() {
            if f.classify(&s[..k]).unwrap() == Class::Size {
                sizes += 1;
            }
        }
        prop_assert!(sizes <= 1);
        let expect = match classify_large(&alpha, &s, &c).verdict {
            Verdict::Small => Class::Small,
            Verdict::Size => Class::Size,
            Verdict::Large => Class::Large,
        };
        prop_assert_eq!(f.classify(&s).unwrap(), expect);
    }

    #[test]
    fn peeling_commutes_with_dropping_the_first_entry(seed in any::<u64>(), k in 0u64..3, c in 0u64..4) {
        let mut smp = Sampler::new(FuzzConfig { seed, max_depth: 3, ..Default::default() });
        let tuple = smp.decreasing_tuple(3, None);
        let rho = add(&omega_pow(&add(&mul_nat(&Ordinal::omega(), k), &Ordinal::nat(c))), &Ordinal::one());
        let context = ctx();
        let mut p = Peeler::new(&context);
        let full = p.peel(&rho, &tuple).unwrap();
        let rest = p.peel(&rho, &tuple[1..]).unwrap();
        prop_assert_eq!(&full[1..], &rest[..]);
    }

    #[test]
    fn sample_streams_are_reproducible(seed in any::<u64>()) {
        let cfg = FuzzConfig { seed, ..Default::default() };
        let (mut x, mut y) = (Sampler::new(cfg), Sampler::new(cfg));
        for _ in 0..10 {
            prop_assert_eq!(x.ordinal(), y.ordinal());
        }
    }
}
