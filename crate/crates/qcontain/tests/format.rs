use std::collections::BTreeMap;

use proptest::prelude::*;
use qcontain::{parse_instance_file, serialize_instance_file, InstanceFile};
use qcontain_core::{generate_random_instance, RandomInstanceParams};

fn random_file() -> impl Strategy<Value = InstanceFile> {
    (1usize..8, 0.0f64..=1.0, any::<u64>(), 0.0f64..=1.0, any::<bool>()).prop_map(|(n, edge_prob, seed, lambda, label)| {
        let params = RandomInstanceParams { n_nodes: n, edge_prob, n_seeds: 1 + (seed as usize % n), lambda, ..Default::default() };
        let instance = generate_random_instance(&params, seed).unwrap();
        let names = if label { (0..n).map(|i| (i, format!("host{i}"))).collect() } else { BTreeMap::new() };
        InstanceFile { instance, names }
    })
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(file in random_file()) {
        let text = serialize_instance_file(&file);
        let back = parse_instance_file(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(serialize_instance_file(&back), text);
    }
}

#[test]
fn shipped_instances_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../instances");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        parse_instance_file(&text).unwrap();
        seen += 1;
    }
    assert!(seen >= 4);
}
