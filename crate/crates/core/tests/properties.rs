use num_bigint::BigInt;
use proptest::prelude::*;

use tropdesc::exact::{determinant, IncrementalSystem, PushOutcome};
use tropdesc::{format_invariant, format_value, parse_invariant, parse_value, Codim, Insertion, Invariant, Value};

fn insertion() -> impl Strategy<Value = Insertion> {
    (0u32..=4, 0u32..=2).prop_map(|(a, b)| Insertion::new(a, Codim::from_value(b).unwrap()))
}

fn invariant() -> impl Strategy<Value = Invariant> {
    (0u32..=3, prop::collection::vec(insertion(), 0..=8)).prop_map(|(d, ins)| Invariant::new(d, ins))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn grammar_round_trip(i in invariant()) {
        let text = format_invariant(&i);
        prop_assert_eq!(parse_invariant(&text).unwrap(), i);
    }

    #[test]
    fn ungrouped_text_parses_to_the_same_invariant(i in invariant()) {
        let spelled: Vec<String> = i.insertions().iter().rev().map(|x| x.to_string()).collect();
        let text = format!("<{}>_{}", spelled.join(" "), i.degree());
        prop_assert_eq!(parse_invariant(&text).unwrap(), i);
    }

    #[test]
    fn order_does_not_matter(mut ins in prop::collection::vec(insertion(), 0..=8), d in 0u32..=3) {
        let a = Invariant::new(d, ins.clone());
        ins.reverse();
        prop_assert_eq!(Invariant::new(d, ins), a);
    }

    #[test]
    fn value_text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let v = Value::new(BigInt::from(p), BigInt::from(q));
        prop_assert_eq!(parse_value(&format_value(&v)), Some(v));
    }

    #[test]
    fn determinant_is_multiplicative(a in prop::collection::vec(-5i128..=5, 9), b in prop::collection::vec(-5i128..=5, 9)) {
        let m = |v: &[i128]| vec![v[0..3].to_vec(), v[3..6].to_vec(), v[6..9].to_vec()];
        let (ma, mb) = (m(&a), m(&b));
        let prod: Vec<Vec<i128>> = (0..3)
            .map(|r| (0..3).map(|c| (0..3).map(|k| ma[r][k] * mb[k][c]).sum()).collect())
            .collect();
        prop_assert_eq!(determinant(prod), determinant(ma) * determinant(mb));
    }

    #[test]
    fn incremental_solve_recovers_the_solution(
        rows in prop::collection::vec(prop::collection::vec(-6i128..=6, 3), 3),
        x in prop::collection::vec(-20i128..=20, 3),
    ) {
        prop_assume!(determinant(rows.clone()) != 0);
        let mut sys = IncrementalSystem::new(3);
        for r in &rows {
            let b: i128 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
            prop_assert_eq!(sys.push(r, b), PushOutcome::Independent);
        }
        for (c, &want) in x.iter().enumerate() {
            let got = sys.column_value(c).unwrap().to_value();
            prop_assert_eq!(got, Value::from_integer(want.into()));
        }
    }
}
