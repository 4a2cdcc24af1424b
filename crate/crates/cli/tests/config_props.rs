use crdisc::config::EXPERIMENTS;
use crdisc::validate_config;
use proptest::prelude::*;
use serde_json::json;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_size_must_be_a_power_of_two(n in 256u64..70000, idx in 0usize..7) {
        let raw = json!({"name": EXPERIMENTS[idx].as_str(), "grid_N": n}).to_string();
        match validate_config(&raw) {
            Ok(cfg) => prop_assert!(n.is_power_of_two() && cfg.grid_N as u64 == n),
            Err(errs) => prop_assert!(!n.is_power_of_two() || n > 65536, "{errs:?}"),
        }
    }

    #[test]
    fn alpha_range_is_enforced(alpha in -1.0..2.0f64) {
        let raw = json!({"name": "composition-regularity", "sector": {"alpha": alpha}}).to_string();
        let res = validate_config(&raw);
        if alpha > 0.0 && alpha < 1.0 {
            prop_assert_eq!(res.unwrap().sector.alpha, alpha);
        } else {
            prop_assert_eq!(res.unwrap_err(), vec!["alpha in (0,1)".to_string()]);
        }
    }

    #[test]
    fn validated_configs_are_complete(idx in 0usize..7, seed in 0u64..1000) {
        let raw = json!({"name": EXPERIMENTS[idx].as_str(), "seed": seed}).to_string();
        let cfg = validate_config(&raw).unwrap();
        prop_assert_eq!(cfg.seed, seed);
        prop_assert!(cfg.model.build().is_ok());
        prop_assert!(cfg.etas[0] == 0.0 && !cfg.nu_list.is_empty());
        prop_assert!(cfg.bump.width > 0.0 && cfg.sector.alpha > 0.0 && cfg.sector.alpha < 1.0);
    }
}
