//! Scenario files shipped with the crate.

use crate::error::{Error, Result};
use crate::scenario::{load_scenario, Scenario};

const FIXTURES: &[(&str, &str)] = &[
    (
        "prop1_counterexample",
        include_str!("../fixtures/prop1_counterexample.toml"),
    ),
    ("example4", include_str!("../fixtures/example4.toml")),
    ("equilibrium", include_str!("../fixtures/equilibrium.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

pub fn text(name: &str) -> Result<&'static str> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

pub fn load(name: &str) -> Result<Scenario> {
    load_scenario(text(name)?)
}
