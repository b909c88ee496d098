//! Built-in scenarios, embedded at compile time.

use anyhow::Result;

use crate::scenario::{parse_scenario, Scenario};

/// Names and sources of the built-in scenarios, in run order.
pub fn gallery_sources() -> Vec<(&'static str, &'static str)> {
    vec![
        ("contact_r3", include_str!("../scenarios/contact_r3.toml")),
        (
            "so3_lie_poisson",
            include_str!("../scenarios/so3_lie_poisson.toml"),
        ),
        (
            "c2_holomorphic",
            include_str!("../scenarios/c2_holomorphic.toml"),
        ),
        ("pn_identity", include_str!("../scenarios/pn_identity.toml")),
        (
            "magri_morosi_suite",
            include_str!("../scenarios/magri_morosi_suite.toml"),
        ),
        (
            "jacobi_nijenhuis_suite",
            include_str!("../scenarios/jacobi_nijenhuis_suite.toml"),
        ),
        (
            "pair_groupoid_symplectic",
            include_str!("../scenarios/pair_groupoid_symplectic.toml"),
        ),
        (
            "cotangent_groupoid_zero_poisson",
            include_str!("../scenarios/cotangent_groupoid_zero_poisson.toml"),
        ),
        (
            "scaling_extension_euler",
            include_str!("../scenarios/scaling_extension_euler.toml"),
        ),
        (
            "homogenization_roundtrip",
            include_str!("../scenarios/homogenization_roundtrip.toml"),
        ),
    ]
}

/// Parses every built-in scenario.
pub fn gallery() -> Result<Vec<Scenario>> {
    gallery_sources()
        .into_iter()
        .map(|(name, text)| parse_scenario(text, name))
        .collect()
}
