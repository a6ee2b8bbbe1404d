mod common;

use cdt::oracle::hsig::h_signature;
use cdt::tcs::{tcs_preprocess, IndexFile};
use cdt::{dissect, maps, ConfigSet, Encoding, Polyline};
use common::*;
use proptest::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn round_trip<T: Serialize + DeserializeOwned>(x: &T) -> T {
    serde_json::from_str(&serde_json::to_string(x).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn results_survive_json(seed in any::<u64>()) {
        let g = dissect(&maps::two_obstacles()).unwrap();
        let mut r = rng(seed);
        let anchor = free_point(g.env(), &mut r);
        let idx = tcs_preprocess(&g, anchor, 8.0).unwrap();
        let set = idx.configs_at(free_point(g.env(), &mut r)).unwrap();
        prop_assert_eq!(round_trip::<ConfigSet>(&set), set.clone());
        for c in &set.configs {
            prop_assert_eq!(round_trip::<Polyline>(&c.path), c.path.clone());
            let h = h_signature(g.env(), &c.path);
            prop_assert_eq!(round_trip(&h), h);
        }
        let e = random_encoding(&g, 10, &mut r);
        prop_assert_eq!(round_trip::<Encoding>(&e), e.clone());
        let f = idx.to_file();
        prop_assert_eq!(round_trip::<IndexFile>(&f), f);
    }
}

#[test]
fn encoding_layout() {
    let g = dissect(&maps::ring()).unwrap();
    let e = Encoding::new(cdt::Point::new(0.5, 1.5), cdt::NodeSeq::from_ids(&[0, 2]), cdt::Point::new(1.5, 2.5));
    e.check(&g).unwrap();
    assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"start":[0.5,1.5],"seq":[0,2],"end":[1.5,2.5]}"#);
}
