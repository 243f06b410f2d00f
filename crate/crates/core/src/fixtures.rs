//! Example documents shipped inside the library.

pub const ALL: &[(&str, &str)] = &[
    ("diag2.json", include_str!("../fixtures/diag2.json")),
    ("flip1.json", include_str!("../fixtures/flip1.json")),
    ("flip2.json", include_str!("../fixtures/flip2.json")),
    ("heisenberg_base.json", include_str!("../fixtures/heisenberg_base.json")),
    ("hopf_k0.json", include_str!("../fixtures/hopf_k0.json")),
    ("hopf_k1.json", include_str!("../fixtures/hopf_k1.json")),
    ("hopf_k2.json", include_str!("../fixtures/hopf_k2.json")),
    ("hopf_k3.json", include_str!("../fixtures/hopf_k3.json")),
    ("hopf_km1.json", include_str!("../fixtures/hopf_km1.json")),
    ("point_triple.json", include_str!("../fixtures/point_triple.json")),
    ("s2xs1_gen.json", include_str!("../fixtures/s2xs1_gen.json")),
    ("s3_trivial.json", include_str!("../fixtures/s3_trivial.json")),
    ("s3_trivial_gen.json", include_str!("../fixtures/s3_trivial_gen.json")),
    ("shear2.json", include_str!("../fixtures/shear2.json")),
    ("surface2_rank2.json", include_str!("../fixtures/surface2_rank2.json")),
    ("t3_base_c12.json", include_str!("../fixtures/t3_base_c12.json")),
    ("t3_base_flux2.json", include_str!("../fixtures/t3_base_flux2.json")),
    ("t3_base_rank2.json", include_str!("../fixtures/t3_base_rank2.json")),
    ("t3_over_s1_vol.json", include_str!("../fixtures/t3_over_s1_vol.json")),
    ("t3_over_t2_k1.json", include_str!("../fixtures/t3_over_t2_k1.json")),
    ("t3_over_t2_k2.json", include_str!("../fixtures/t3_over_t2_k2.json")),
    ("t3_over_t2_k3.json", include_str!("../fixtures/t3_over_t2_k3.json")),
];

/// Pair documents.
pub const PAIRS: &[&str] = &[
    "heisenberg_base.json",
    "hopf_k0.json",
    "hopf_k1.json",
    "hopf_k2.json",
    "hopf_k3.json",
    "hopf_km1.json",
    "s2xs1_gen.json",
    "s3_trivial.json",
    "s3_trivial_gen.json",
    "surface2_rank2.json",
    "t3_base_c12.json",
    "t3_base_flux2.json",
    "t3_base_rank2.json",
    "t3_over_s1_vol.json",
    "t3_over_t2_k1.json",
    "t3_over_t2_k2.json",
    "t3_over_t2_k3.json",
];

/// Triple documents.
pub const TRIPLES: &[&str] = &[
    "point_triple.json",
];

/// O(n,n) matrices.
pub const ONN: &[&str] = &[
    "diag2.json",
    "flip1.json",
    "flip2.json",
    "shear2.json",
];

/// Looks a fixture up by file name, ignoring any directory part.
pub fn get(name: &str) -> Option<&'static str> {
    let base = name.rsplit(['/', '\\']).next().unwrap_or(name);
    ALL.iter().find(|(n, _)| *n == base).map(|(_, t)| *t)
}
