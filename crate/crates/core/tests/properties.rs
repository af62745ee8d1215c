use std::collections::BTreeSet;

use permqubo::encodings::vector_values;
use permqubo::{
    build_vector_model, compose, decode_vector, encode_vector, export, import, ppp_value, Format, Kind, KernelSpec, Lambda,
    ModelFile, PartialPermutation, PppInstance, QuadraticModel, Rational, Scheme, Technique, VariableLayout,
};
use proptest::prelude::*;

type Terms = (Kind, usize, Vec<(usize, i64)>, Vec<(usize, usize, i64)>, (i64, i64));

fn terms(max_vars: usize) -> impl Strategy<Value = Terms> {
    (prop_oneof![Just(Kind::Qubo), Just(Kind::Ising)], 0..=max_vars).prop_flat_map(|(kind, n)| {
        let lin = prop::collection::vec((0..n.max(1), -20i64..=20), 0..=2 * n);
        let quad = prop::collection::vec((0..n.max(1), 0..n.max(1), -20i64..=20), 0..=3 * n);
        let off = (-50i64..=50, 1i64..=6);
        (Just(kind), Just(n), lin, quad, off).prop_map(|(k, n, l, q, o)| {
            if n == 0 {
                (k, 0, vec![], vec![], o)
            } else {
                (k, n, l, q, o)
            }
        })
    })
}

fn model_of(t: &Terms) -> QuadraticModel {
    let (kind, n, lin, quad, (p, q)) = t.clone();
    QuadraticModel::from_terms(kind, n, lin, quad, Rational::new(p, q)).unwrap()
}

/// Straight sum over the raw term lists, with `v*v` folded by hand.
fn naive_energy(t: &Terms, a: &[i8]) -> Rational {
    let (kind, _, lin, quad, (p, q)) = t;
    let mut e = Rational::new(*p, *q);
    for &(v, w) in lin {
        e += Rational::from_integer(w * a[v] as i64);
    }
    for &(i, j, w) in quad {
        let prod = if i == j {
            match kind {
                Kind::Qubo => a[i] as i64,
                Kind::Ising => 1,
            }
        } else {
            a[i] as i64 * a[j] as i64
        };
        e += Rational::from_integer(w * prod);
    }
    e
}

fn assignments(kind: Kind, n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u64..1 << n).map(move |mask| (0..n).map(|v| if mask >> v & 1 == 1 { kind.hot() } else { kind.cold() }).collect())
}

/// The same state in the other kind: `s = 2x - 1`.
fn flip_kind(a: &[i8], from: Kind) -> Vec<i8> {
    a.iter()
        .map(|&v| match from {
            Kind::Qubo => 2 * v - 1,
            Kind::Ising => (v + 1) / 2,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluate_matches_naive_sum(t in terms(8), seed in any::<u64>()) {
        let m = model_of(&t);
        let n = t.1;
        let mask = if n == 0 { 0 } else { seed % (1 << n) };
        let a: Vec<i8> = (0..n).map(|v| if mask >> v & 1 == 1 { t.0.hot() } else { t.0.cold() }).collect();
        prop_assert_eq!(m.evaluate(&a).unwrap(), naive_energy(&t, &a));
    }

    #[test]
    fn stored_terms_are_canonical(t in terms(10)) {
        let m = model_of(&t);
        prop_assert!(m.linear().windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert!(m.linear().iter().all(|&(_, w)| w != 0));
        prop_assert!(m.quadratic().iter().all(|c| c.i < c.j && c.weight != 0));
        prop_assert!(m.quadratic().windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
    }

    #[test]
    fn conversion_is_affine_and_invertible(t in terms(7)) {
        let m = model_of(&t);
        let c = m.convert().unwrap();
        prop_assert_eq!(c.model.kind(), m.kind().other());
        prop_assert_eq!(c.model.offset(), Rational::from_integer(0));
        prop_assert!(c.scale > Rational::from_integer(0));
        let back = c.model.convert().unwrap();
        prop_assert_eq!(back.model.kind(), m.kind());
        for a in assignments(m.kind(), m.num_vars()) {
            let s = flip_kind(&a, m.kind());
            let e = m.evaluate(&a).unwrap();
            prop_assert_eq!(c.scale * e, c.model.evaluate(&s).unwrap() + c.shift);
            prop_assert_eq!(back.scale * c.model.evaluate(&s).unwrap(), back.model.evaluate(&a).unwrap() + back.shift);
        }
        // Converting back gives the original up to a positive factor and a constant.
        let k = back.scale * c.scale;
        for a in assignments(m.kind(), m.num_vars()) {
            let lhs = k * m.evaluate(&a).unwrap();
            prop_assert_eq!(lhs, back.model.evaluate(&a).unwrap() + back.shift + back.scale * c.shift);
        }
    }

    #[test]
    fn conversion_preserves_argmin(t in terms(7)) {
        let m = model_of(&t);
        let c = m.convert().unwrap();
        let argmin = |model: &QuadraticModel| -> BTreeSet<Vec<i8>> {
            let all: Vec<(Rational, Vec<i8>)> =
                assignments(model.kind(), model.num_vars()).map(|a| (model.evaluate(&a).unwrap(), a)).collect();
            let best = all.iter().map(|x| x.0).min().unwrap();
            all.into_iter().filter(|x| x.0 == best).map(|x| x.1).collect()
        };
        let mapped: BTreeSet<Vec<i8>> = argmin(&m).iter().map(|a| flip_kind(a, m.kind())).collect();
        prop_assert_eq!(mapped, argmin(&c.model));
    }

    #[test]
    fn json_round_trip(t in terms(10)) {
        let m = model_of(&t);
        let file = ModelFile { layout: VariableLayout::flat(m.num_vars()), model: m, encoding: None };
        let back = import(&export(&file, Format::Json).unwrap()).unwrap();
        prop_assert_eq!(back, file);
    }

    #[test]
    fn qubo_text_round_trip(t in terms(10)) {
        let m = model_of(&t);
        let file = ModelFile { layout: VariableLayout::flat(m.num_vars()), model: m.clone(), encoding: None };
        match export(&file, Format::QuboText) {
            Ok(bytes) => prop_assert_eq!(import(&bytes).unwrap().model, m),
            Err(_) => prop_assert_eq!(m.kind(), Kind::Ising),
        }
    }

    #[test]
    fn vector_encode_decode(k in 1usize..=10, kind in prop_oneof![Just(Kind::Qubo), Just(Kind::Ising)]) {
        for scheme in Scheme::ALL {
            let (model, _) = build_vector_model(scheme, k, kind).unwrap();
            let mut energies = BTreeSet::new();
            for v in vector_values(scheme, k) {
                let a = encode_vector(scheme, v, k, kind).unwrap();
                prop_assert_eq!(decode_vector(scheme, &a).unwrap(), v);
                energies.insert(model.evaluate(&a).unwrap());
            }
            // Every valid vector sits at the same energy.
            prop_assert_eq!(energies.len(), 1);
        }
    }

    #[test]
    fn kernel_encode_decode(
        technique in prop::sample::select(Technique::ALL.to_vec()),
        kind in prop_oneof![Just(Kind::Qubo), Just(Kind::Ising)],
        n in 2usize..=7,
        m_off in 0usize..=3,
        seed in any::<u64>(),
    ) {
        let m = if technique.supports_partial() { n.saturating_sub(m_off).max(1) } else { n };
        let spec = KernelSpec::new(technique, m, n, kind).unwrap();
        let h = spec.build().unwrap();
        let p = random_injection(m, n, seed);
        let a = spec.encode(&p).unwrap();
        let decoded = spec.decode(&a);
        prop_assert_eq!(decoded.permutation(), Some(&p));
        prop_assert_eq!(h.model.evaluate(&a).unwrap(), h.optimal_value);
    }

    #[test]
    fn ppp_value_matches_reference(inst in instance(4, 5), seed in any::<u64>()) {
        let p = random_injection(inst.m(), inst.n(), seed);
        let v = p.values();
        // Sum over every ordered pair of particles, each interaction seen once.
        let mut reference = 0;
        for i in 0..inst.m() {
            reference += inst.potentials().get(&(i as u32, v[i] as u32)).copied().unwrap_or(0);
            for ip in i + 1..inst.m() {
                reference += inst.interactions().get(&(i as u32, v[i] as u32, ip as u32, v[ip] as u32)).copied().unwrap_or(0);
            }
        }
        prop_assert_eq!(ppp_value(&inst, &p).unwrap(), reference);
    }

    #[test]
    fn interactions_are_canonical(inst in instance(5, 6)) {
        for (&(i, j, ip, jp), &w) in inst.interactions() {
            prop_assert!(i < ip && j != jp && w != 0);
            prop_assert!((ip as usize) < inst.m() && (j as usize) < inst.n() && (jp as usize) < inst.n());
        }
    }

    #[test]
    fn composed_energy_is_affine_in_the_objective(
        inst in instance(3, 4),
        technique in prop::sample::select(Technique::ALL.to_vec()),
        kind in prop_oneof![Just(Kind::Qubo), Just(Kind::Ising)],
    ) {
        prop_assume!(technique.supports_partial() || inst.m() == inst.n());
        let enc = compose(&inst, technique, kind, Lambda::Auto).unwrap();
        for p in PartialPermutation::all(inst.m(), inst.n()) {
            let a = enc.spec.encode(&p).unwrap();
            prop_assert_eq!(enc.model.evaluate(&a).unwrap(), enc.feasible_energy(ppp_value(&inst, &p).unwrap()));
        }
    }
}

fn random_injection(m: usize, n: usize, seed: u64) -> PartialPermutation {
    let count = PartialPermutation::count(m, n);
    PartialPermutation::all(m, n).nth((seed % count) as usize).unwrap()
}

/// Random instance with `m <= n`, interactions given in arbitrary orientation.
fn instance(max_m: usize, max_n: usize) -> impl Strategy<Value = PppInstance> {
    (1..=max_n).prop_flat_map(move |n| (1..=n.min(max_m)).prop_map(move |m| (m, n))).prop_flat_map(|(m, n)| {
        let pot = prop::collection::vec((0..m, 0..n, -9i64..=9), 0..=m * n);
        let int = prop::collection::vec((0..m, 0..n, 0..m, 0..n, -9i64..=9), 0..=2 * m * n);
        (Just(m), Just(n), pot, int).prop_map(|(m, n, pot, int)| {
            let mut inst = PppInstance::new(m, n).unwrap();
            for (i, j, v) in pot {
                inst.add_potential(i, j, v).unwrap();
            }
            for (i, j, ip, jp, v) in int {
                if i != ip && j != jp {
                    inst.add_interaction(i, j, ip, jp, v).unwrap();
                }
            }
            inst
        })
    })
}
