use bfzeta::bf::random::{random_graded_instance, RandomParams};
use bfzeta::bf::schema::{parse_instance, InstanceDoc};
use bfzeta::bf::{bf_sum_closed_form, graded_bf_sum, SumMethod};
use bfzeta::lfunction::{branch_by_interpolation, gen_bernoulli_b1, BranchSpec};
use bfzeta::padic::PrimeContext;
use bfzeta::theorem::{theorem, ClassFixture, Mode, TheoremConfig};
use bfzeta::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn instance_documents_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let params = RandomParams { bound: 1 << 12, ..RandomParams::default() };
    for _ in 0..10 {
        let inst = random_graded_instance(&mut rng, &params).unwrap();
        let text = serde_json::to_string(&InstanceDoc::from_instance(&inst)).unwrap();
        let back = parse_instance(&text).unwrap();
        assert_eq!(bf_sum_closed_form(&back).unwrap(), bf_sum_closed_form(&inst).unwrap());
        assert_eq!(
            graded_bf_sum(&back, SumMethod::ClosedForm).unwrap(),
            graded_bf_sum(&inst, SumMethod::ClosedForm).unwrap()
        );
    }
}

#[test]
fn schema_violations_are_reported() {
    let bad = [
        r#"{"p": 4, "m": 1, "groups": {"A": [1], "B": [1], "C": [1]}, "d": [[1]], "pairing": [[1]]}"#,
        r#"{"p": 3, "m": 1, "groups": {"A": [1], "B": [1], "C": [1]}, "d": [[1]], "pairing": [[1]], "extra": 1}"#,
        r#"{"p": 3, "m": 1, "groups": {"A": [1], "B": [1], "C": [1]}, "d": [[1, 1]], "pairing": [[1]]}"#,
        r#"not json"#,
    ];
    for text in bad {
        assert!(parse_instance(text).is_err(), "{}", text);
    }
    assert!(matches!(parse_instance("[]"), Err(Error::Schema(_))));
}

#[test]
fn verification_mode_uses_the_fixture() {
    let fixture = ClassFixture { p: 37, n: 0, k: 5, class_type: vec![1] };
    let r = theorem(37, 0, 5, Some(&fixture), &TheoremConfig::default()).unwrap();
    assert_eq!(r.rhs.mode, Mode::Verification);
    assert!(r.agree);
    let wrong = ClassFixture { class_type: vec![1, 1], ..fixture };
    let r = theorem(37, 0, 5, Some(&wrong), &TheoremConfig::default()).unwrap();
    assert!(!r.agree);
}

#[test]
fn constant_term_matches_generalized_bernoulli() {
    // p | B_{p−k} exactly for the irregular pairs (37, 32), (59, 44), (67, 58);
    // f(0) and B_{1,ω^{−k}} must both see it
    for (p, k, v) in [(37u64, 5i64, 1u32), (59, 15, 1), (67, 9, 1), (5, 3, 0)] {
        let ctx = PrimeContext::new(p, 6).unwrap();
        let spec = BranchSpec::new(&ctx, k, 12, 0).unwrap();
        let f = branch_by_interpolation(&spec).unwrap();
        let b = gen_bernoulli_b1(-k, &ctx).unwrap();
        assert_eq!(f.coeffs()[0].val_lower().min(3), v, "p={} k={}", p, k);
        assert_eq!(b.val_lower().min(3), v, "p={} k={}", p, k);
    }
}
