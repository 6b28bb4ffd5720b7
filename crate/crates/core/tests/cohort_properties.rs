use proptest::prelude::*;
use screen_limits::cohorts::{cohort_system_risk, dominance_decomposition, Cohort, CohortProfile};
use screen_limits::tailcore::poisson_tail;

fn profile(groups: &[(u64, f64)]) -> CohortProfile {
    CohortProfile::new(
        groups
            .iter()
            .enumerate()
            .map(|(i, &(n, p))| Cohort { label: format!("g{i}"), n, p })
            .collect(),
    )
    .unwrap()
}

fn group_strategy() -> impl Strategy<Value = Vec<(u64, f64)>> {
    prop::collection::vec((1u64..2500, 0.001f64..0.2), 1..5)
}

proptest! {
    #[test]
    fn exact_matches_person_by_person_product(groups in group_strategy(), k in 1u64..200, m in 1u64..15) {
        let risk = cohort_system_risk(&profile(&groups), k, m).unwrap();
        // multiply (1 - q_g) once per individual
        let mut none = 1.0f64;
        for &(n, p) in &groups {
            let q = poisson_tail(k as f64 * p, m).unwrap();
            for _ in 0..n {
                none *= 1.0 - q;
            }
        }
        prop_assert!((risk.exact - (1.0 - none)).abs() < 1e-12, "{} vs {}", risk.exact, 1.0 - none);
    }

    #[test]
    fn permutation_invariant(groups in group_strategy(), k in 1u64..500, m in 1u64..20, rotate in 0usize..5) {
        let a = cohort_system_risk(&profile(&groups), k, m).unwrap();
        let mut shuffled = groups.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rotate % len);
        shuffled.reverse();
        let b = cohort_system_risk(&profile(&shuffled), k, m).unwrap();
        prop_assert!((a.exact - b.exact).abs() <= 1e-12 * a.exact.max(1e-300));
        prop_assert!((a.total_mass - b.total_mass).abs() <= 1e-9 * a.total_mass.max(1e-300));
    }

    #[test]
    fn dominance_bound(groups in group_strategy(), k in 1u64..500, m in 1u64..20) {
        let prof = profile(&groups);
        let risk = cohort_system_risk(&prof, k, m).unwrap();
        let d = dominance_decomposition(&prof, k, m).unwrap();
        prop_assert!(d.main_term <= risk.exact + 1e-12);
        let gap = risk.exponential_approx - d.main_term;
        prop_assert!(gap >= -1e-12 && gap <= d.correction_bound + 1e-12, "{gap} {}", d.correction_bound);
    }
}

#[test]
fn dominant_share_grows_with_exposure_gap() {
    let m = 10u64;
    let k = 100u64;
    let mut shares = Vec::new();
    for lambda2 in [m as f64, m as f64 + 2.0, m as f64 + 5.0, m as f64 + 10.0] {
        let prof = profile(&[(10_000, 0.03), (10_000, lambda2 / k as f64)]);
        let risk = cohort_system_risk(&prof, k, m).unwrap();
        shares.push(risk.groups[1].share);
    }
    assert!(shares.windows(2).all(|w| w[1] > w[0]), "{shares:?}");
}

#[test]
fn neighborhood_example() {
    let prof = CohortProfile::new(vec![
        Cohort { label: "A".into(), n: 100_000, p: 0.005 },
        Cohort { label: "B".into(), n: 100_000, p: 0.02 },
    ])
    .unwrap();
    let risk = cohort_system_risk(&prof, 100, 3).unwrap();
    assert!((risk.groups[0].q - 0.014).abs() < 0.001);
    assert!((risk.groups[1].q - 0.323).abs() < 0.001);
    assert_eq!(risk.exact, 1.0);
    let d = dominance_decomposition(&prof, 100, 3).unwrap();
    assert_eq!(d.dominant_label, "B");
    // exact Poisson mass for A, not the product of the rounded q_A
    assert!((risk.groups[0].mass - 1438.767796697).abs() < 1e-6);
}

#[test]
fn ties_go_to_first_group() {
    let prof = profile(&[(500, 0.01), (500, 0.01)]);
    assert_eq!(dominance_decomposition(&prof, 100, 3).unwrap().dominant_label, "g0");
}
