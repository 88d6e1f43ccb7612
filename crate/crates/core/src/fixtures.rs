//! The bundled example systems, embedded at compile time.

use crate::model::MultiSystem;
use crate::spec_file::parse_system;

pub const ALL: &[(&str, &str)] = &[
    ("walker", include_str!("../fixtures/walker.spec")),
    ("pingpong", include_str!("../fixtures/pingpong.spec")),
    ("pingpong-noaccept", include_str!("../fixtures/pingpong-noaccept.spec")),
    ("even", include_str!("../fixtures/even.spec")),
    ("drift3", include_str!("../fixtures/drift3.spec")),
    ("zigzag", include_str!("../fixtures/zigzag.spec")),
    ("mod3", include_str!("../fixtures/mod3.spec")),
    ("late", include_str!("../fixtures/late.spec")),
    ("bouncer", include_str!("../fixtures/bouncer.spec")),
    ("pair", include_str!("../fixtures/pair.spec")),
    ("trio", include_str!("../fixtures/trio.spec")),
    ("backdrift", include_str!("../fixtures/backdrift.spec")),
];

/// Text of the invalid fixture (missing inner transition).
pub const BROKEN: &str = include_str!("../fixtures/broken.spec");

pub fn by_name(name: &str) -> MultiSystem {
    let (_, text) = ALL
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no fixture named {name}"));
    parse_system(text).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn all() -> Vec<(&'static str, MultiSystem)> {
    ALL.iter().map(|(n, _)| (*n, by_name(n))).collect()
}

pub fn walker() -> MultiSystem {
    by_name("walker")
}

pub fn pingpong() -> MultiSystem {
    by_name("pingpong")
}

pub fn pingpong_noaccept() -> MultiSystem {
    by_name("pingpong-noaccept")
}

pub fn even() -> MultiSystem {
    by_name("even")
}

pub fn drift3() -> MultiSystem {
    by_name("drift3")
}

pub fn zigzag() -> MultiSystem {
    by_name("zigzag")
}
