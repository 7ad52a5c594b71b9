use std::collections::BTreeMap;

use proptest::prelude::*;
use strata_cli::instance::{parse_instance, serialize, ArrowSpec, Entry, FamiliesSpec, InstanceFile, MatrixSpec, ModuleSpec, QuiverSpec};
use strata_cli::run::{run_command, Command, Options};
use strata_core::Field;

/// A Kronecker instance with random modules and a random family order.
fn kronecker_file() -> impl Strategy<Value = InstanceFile> {
    let module = (0usize..3, 0usize..3).prop_flat_map(|(d0, d1)| {
        (
            proptest::collection::vec(-200i64..200, d0 * d1),
            proptest::collection::vec(-200i64..200, d0 * d1),
        )
            .prop_map(move |(a, b)| {
                let spec = |v: Vec<i64>| MatrixSpec {
                    shape: [d1, d0],
                    entries: v.into_iter().map(Entry::Int).collect(),
                };
                ModuleSpec {
                    dims: vec![d0, d1],
                    arrows: [("a".to_string(), spec(a)), ("b".to_string(), spec(b))].into(),
                }
            })
    });
    (proptest::collection::vec(module, 1..4), any::<bool>()).prop_map(|(ms, rationals)| {
        let modules: BTreeMap<String, ModuleSpec> = ms.into_iter().enumerate().map(|(k, m)| (format!("M{k}"), m)).collect();
        let names: Vec<String> = modules.keys().cloned().collect();
        let order = (1..=names.len()).rev().collect();
        InstanceFile {
            field: if rationals { "rationals".into() } else { "101".into() },
            relations: vec![],
            quiver: QuiverSpec {
                vertices: 2,
                arrows: vec![
                    ArrowSpec { name: "a".into(), source: 1, target: 2 },
                    ArrowSpec { name: "b".into(), source: 1, target: 2 },
                ],
            },
            modules,
            families: FamiliesSpec {
                psi: Some(names),
                order: Some(order),
                ..FamiliesSpec::default()
            },
            config: Default::default(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialized_instances_parse_back(file in kronecker_file()) {
        let first = parse_instance(&serialize(&file), None).unwrap();
        let second = parse_instance(&first.serialize(), None).unwrap();
        prop_assert_eq!(&second.file, &first.file);
        prop_assert_eq!(second.modules.len(), file.modules.len());
        for (name, m) in &first.modules {
            prop_assert_eq!(m.gens(), second.modules[name].gens());
        }
    }

    #[test]
    fn echoed_config_reproduces_the_report(file in kronecker_file(), seed in 0u64..5) {
        let inst = parse_instance(&serialize(&file), None).unwrap();
        let opts = Options { seed: Some(seed), ..Options::default() };
        let first = run_command(Command::VerifyPpcs, &inst, "fuzzed", &opts).unwrap();
        let echo = &first.config;
        let replay = Options {
            field: Some(echo.field.parse::<Field>().unwrap()),
            budget: Some(echo.budget),
            cap: Some(echo.cap),
            seed: Some(echo.seed),
            order: Some(echo.order.clone()),
        };
        let again = run_command(Command::VerifyPpcs, &inst, "fuzzed", &replay).unwrap();
        prop_assert_eq!(
            strata_cli::report::without_timing(&first),
            strata_cli::report::without_timing(&again)
        );
    }
}
