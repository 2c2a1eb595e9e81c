//! Built-in model fixtures.
//!
//! The bathtub-at-equilibrium model is the crate's canonical worked example:
//! five endogenous variables (drain size, inflow, pressure, outflow, water
//! level), seven exogenous variables, and five loglinear equilibrium
//! equations. Its multiplicative structure is exactly linear in log space,
//! so solutions are monomials in the exogenous variables.

use std::collections::BTreeMap;

use crate::mixed_graph::DirectedMixedGraph;
use crate::system::{
    ConstraintDecl, ConstraintForm, Domain, ExogenousDistribution, SystemOfConstraints,
    VariableDecl,
};

/// Gravitational constant used by the bathtub pressure equation.
pub const GRAVITY: f64 = 9.81;

fn positive_variable(id: &str, exogenous: bool) -> VariableDecl {
    VariableDecl {
        id: id.to_string(),
        exogenous,
        domain: Domain::PositiveReal,
        distribution: exogenous.then_some(ExogenousDistribution::Lognormal {
            mean: 0.0,
            sigma: 0.8,
        }),
    }
}

fn loglinear(id: &str, coefficients: &[(&str, f64)], extra_variables: &[&str], constant: f64) -> ConstraintDecl {
    ConstraintDecl {
        id: id.to_string(),
        variables: coefficients
            .iter()
            .map(|(v, _)| v.to_string())
            .chain(extra_variables.iter().map(|v| v.to_string()))
            .collect(),
        form: ConstraintForm::Loglinear,
        coefficients: coefficients
            .iter()
            .map(|(v, c)| (v.to_string(), *c))
            .collect(),
        constant: Some(constant),
    }
}

/// The bathtub system at equilibrium.
///
/// In log space the equations read:
///
/// * `f_K`: `log v_K - log w_K = 0`
/// * `f_I`: `log v_I - log w_I = 0`
/// * `f_P`: `log v_D - log v_P + log w_2 + log g = 0` (w_1 is a structural
///   factor that cancels from every solution)
/// * `f_O`: `log v_K + log v_P - log v_O + log w_4 = 0` (w_3 cancels)
/// * `f_D`: `log v_I - log v_O = 0` (w_5 cancels)
pub fn bathtub() -> SystemOfConstraints {
    let variables = vec![
        positive_variable("v_D", false),
        positive_variable("v_I", false),
        positive_variable("v_K", false),
        positive_variable("v_O", false),
        positive_variable("v_P", false),
        positive_variable("w_1", true),
        positive_variable("w_2", true),
        positive_variable("w_3", true),
        positive_variable("w_4", true),
        positive_variable("w_5", true),
        positive_variable("w_I", true),
        positive_variable("w_K", true),
    ];
    let constraints = vec![
        loglinear("f_K", &[("v_K", 1.0), ("w_K", -1.0)], &[], 0.0),
        loglinear("f_I", &[("v_I", 1.0), ("w_I", -1.0)], &[], 0.0),
        loglinear(
            "f_P",
            &[("v_D", 1.0), ("v_P", -1.0), ("w_2", 1.0)],
            &["w_1"],
            GRAVITY.ln(),
        ),
        loglinear(
            "f_O",
            &[("v_K", 1.0), ("v_P", 1.0), ("v_O", -1.0), ("w_4", 1.0)],
            &["w_3"],
            0.0,
        ),
        loglinear("f_D", &[("v_I", 1.0), ("v_O", -1.0)], &["w_5"], 0.0),
    ];
    let system = SystemOfConstraints {
        variables,
        constraints,
    };
    system.validate().expect("bathtub fixture is valid");
    system
}

/// Closed-form bathtub solutions, observed and under the three classic
/// perfect interventions. `exo` maps exogenous ids to values; `pinned`
/// supplies the intervened value when applicable.
pub mod bathtub_closed_form {
    use super::*;

    pub fn observed(exo: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
        let g = GRAVITY;
        let mut out = BTreeMap::new();
        out.insert("v_K".into(), exo["w_K"]);
        out.insert("v_I".into(), exo["w_I"]);
        out.insert("v_O".into(), exo["w_I"]);
        out.insert("v_P".into(), exo["w_I"] / (exo["w_4"] * exo["w_K"]));
        out.insert(
            "v_D".into(),
            exo["w_I"] / (exo["w_4"] * exo["w_K"] * g * exo["w_2"]),
        );
        out
    }

    /// do(f_P, v_D, xi): the water level is pinned; nothing else moves.
    pub fn do_water_level_via_pressure(
        exo: &BTreeMap<String, f64>,
        pinned: f64,
    ) -> BTreeMap<String, f64> {
        let mut out = observed(exo);
        out.insert("v_D".into(), pinned);
        out
    }

    /// do(f_D, v_O, xi): the outflow is pinned; pressure and level follow.
    pub fn do_outflow(exo: &BTreeMap<String, f64>, pinned: f64) -> BTreeMap<String, f64> {
        let g = GRAVITY;
        let mut out = BTreeMap::new();
        out.insert("v_K".into(), exo["w_K"]);
        out.insert("v_I".into(), exo["w_I"]);
        out.insert("v_O".into(), pinned);
        out.insert("v_P".into(), pinned / (exo["w_4"] * exo["w_K"]));
        out.insert(
            "v_D".into(),
            pinned / (exo["w_4"] * exo["w_K"] * g * exo["w_2"]),
        );
        out
    }

    /// do(f_D, v_D, xi): the water level is pinned by the drain equation;
    /// pressure and outflow follow it downstream.
    pub fn do_water_level_via_drain(
        exo: &BTreeMap<String, f64>,
        pinned: f64,
    ) -> BTreeMap<String, f64> {
        let g = GRAVITY;
        let mut out = BTreeMap::new();
        out.insert("v_K".into(), exo["w_K"]);
        out.insert("v_I".into(), exo["w_I"]);
        out.insert("v_P".into(), g * exo["w_2"] * pinned);
        out.insert(
            "v_O".into(),
            exo["w_4"] * exo["w_K"] * g * exo["w_2"] * pinned,
        );
        out.insert("v_D".into(), pinned);
        out
    }
}

fn real_variable(id: &str, exogenous: bool) -> VariableDecl {
    VariableDecl {
        id: id.to_string(),
        exogenous,
        domain: Domain::Real,
        distribution: exogenous.then_some(ExogenousDistribution::Normal {
            mean: 0.0,
            sigma: 1.0,
        }),
    }
}

fn linear(id: &str, coefficients: &[(&str, f64)], extra_variables: &[&str], constant: f64) -> ConstraintDecl {
    ConstraintDecl {
        id: id.to_string(),
        variables: coefficients
            .iter()
            .map(|(v, _)| v.to_string())
            .chain(extra_variables.iter().map(|v| v.to_string()))
            .collect(),
        form: ConstraintForm::Linear,
        coefficients: coefficients
            .iter()
            .map(|(v, c)| (v.to_string(), *c))
            .collect(),
        constant: Some(constant),
    }
}

/// The smallest interesting system: one equation fixes `v_1` from `w_1`,
/// a second derives `v_2` from `v_1` and `w_2`.
pub fn two_equations() -> SystemOfConstraints {
    let system = SystemOfConstraints {
        variables: vec![
            real_variable("v_1", false),
            real_variable("v_2", false),
            real_variable("w_1", true),
            real_variable("w_2", true),
        ],
        constraints: vec![
            linear("f_1", &[("v_1", 1.0), ("w_1", -1.0)], &[], 0.0),
            linear(
                "f_2",
                &[("v_2", 1.0), ("v_1", -1.0), ("w_2", -1.0)],
                &[],
                0.0,
            ),
        ],
    };
    system.validate().expect("fixture is valid");
    system
}

/// A linear system whose middle three variables form a feedback loop, so
/// the matched directed graph is cyclic while the causal ordering graph
/// clusters the loop.
pub fn linear_feedback() -> SystemOfConstraints {
    let system = SystemOfConstraints {
        variables: vec![
            real_variable("v_1", false),
            real_variable("v_2", false),
            real_variable("v_3", false),
            real_variable("v_4", false),
            real_variable("v_5", false),
            real_variable("w_1", true),
            real_variable("w_2", true),
            real_variable("w_3", true),
            real_variable("w_4", true),
            real_variable("w_5", true),
            real_variable("w_6", true),
        ],
        constraints: vec![
            linear("f_1", &[("v_1", 1.0), ("w_1", -1.0)], &[], 0.0),
            linear(
                "f_2",
                &[
                    ("v_2", 1.0),
                    ("v_1", -1.0),
                    ("v_3", 1.0),
                    ("w_2", 1.0),
                    ("w_3", -1.0),
                ],
                &[],
                0.0,
            ),
            linear("f_3", &[("w_4", 1.0), ("v_3", -1.0), ("v_4", 1.0)], &[], 0.0),
            linear("f_4", &[("w_5", 1.0), ("v_2", 1.0), ("v_4", -1.0)], &[], 0.0),
            linear("f_5", &[("w_6", 1.0), ("v_4", -1.0), ("v_5", 1.0)], &[], 0.0),
        ],
    };
    system.validate().expect("fixture is valid");
    system
}

/// A linear system whose endogenous part is not self-contained: `v_1` is
/// overdetermined (two constraints, one numerically vacuous) and `f_5`
/// underdetermines `{v_4, v_5}`.
pub fn underdetermined() -> SystemOfConstraints {
    let system = SystemOfConstraints {
        variables: vec![
            real_variable("v_1", false),
            real_variable("v_2", false),
            real_variable("v_3", false),
            real_variable("v_4", false),
            real_variable("v_5", false),
            real_variable("w_1", true),
            real_variable("w_2", true),
            real_variable("w_3", true),
            real_variable("w_4", true),
            real_variable("w_5", true),
        ],
        constraints: vec![
            linear("f_1", &[("v_1", 1.0), ("w_1", -1.0)], &[], 0.0),
            linear("f_2", &[], &["v_1", "w_2"], 0.0),
            linear(
                "f_3",
                &[("v_2", 1.0), ("v_1", -0.8), ("w_3", -1.0)],
                &[],
                0.0,
            ),
            linear(
                "f_4",
                &[("v_3", 1.0), ("v_2", -1.2), ("w_4", -1.0)],
                &[],
                0.0,
            ),
            linear(
                "f_5",
                &[("v_3", 1.0), ("v_4", 1.0), ("v_5", 1.0), ("w_5", -1.0)],
                &[],
                0.0,
            ),
        ],
    };
    system.validate().expect("fixture is valid");
    system
}

fn opaque(id: &str, variables: &[&str]) -> ConstraintDecl {
    ConstraintDecl {
        id: id.to_string(),
        variables: variables.iter().map(|v| v.to_string()).collect(),
        form: ConstraintForm::Opaque,
        coefficients: Default::default(),
        constant: None,
    }
}

/// Four opaque constraints over four variables with a two-variable feedback
/// block in the middle; purely structural, for graph-level work.
pub fn middle_block() -> SystemOfConstraints {
    let system = SystemOfConstraints {
        variables: vec![
            real_variable("v_1", false),
            real_variable("v_2", false),
            real_variable("v_3", false),
            real_variable("v_4", false),
        ],
        constraints: vec![
            opaque("f_1", &["v_1"]),
            opaque("f_2", &["v_1", "v_2", "v_3"]),
            opaque("f_3", &["v_2", "v_3"]),
            opaque("f_4", &["v_3", "v_4"]),
        ],
    };
    system.validate().expect("fixture is valid");
    system
}

/// The cyclic graph of the structural-equation formulation of the bathtub,
/// self-cycle at the water level included. Ships as a hard-coded comparison
/// fixture; it is not derived from equations.
pub fn bathtub_scm_graph() -> DirectedMixedGraph {
    DirectedMixedGraph::from_edges(
        &["v_D", "v_I", "v_K", "v_O", "v_P"],
        &[
            ("v_I", "v_D"),
            ("v_D", "v_D"),
            ("v_D", "v_P"),
            ("v_P", "v_O"),
            ("v_O", "v_D"),
            ("v_K", "v_O"),
        ],
        &[],
    )
    .expect("fixture graph is well-formed")
}
