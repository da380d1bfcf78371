//! Named experiment setups with desk-scale (`ci`) and long (`full`) time
//! spans, plus resolution of command-line overrides into a runnable spec.

use std::path::Path;

use triwave::{ArkTableau, ConserveMode, GRAY_ONE_HALF_WIDTH, GRAY_TWO_HALF_WIDTH};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    Bbm,
    Kdv,
    Nls,
    HypNls,
}

impl Equation {
    pub fn name(self) -> &'static str {
        match self {
            Equation::Bbm => "bbm",
            Equation::Kdv => "kdv",
            Equation::Nls => "nls",
            Equation::HypNls => "hypnls",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bbm" => Some(Equation::Bbm),
            "kdv" => Some(Equation::Kdv),
            "nls" => Some(Equation::Nls),
            "hypnls" => Some(Equation::HypNls),
            _ => None,
        }
    }
}

/// Initial data of a scenario, evaluated on the grid nodes at `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// Superposition of two solitary waves on the unit background.
    BbmTwoWave,
    /// Single solitary wave with speed `c` centered at `x0`.
    BbmSolitary { x0: f64, c: f64 },
    /// Single soliton with wavenumber `k` centered at `x0`.
    KdvSingle { k: f64, x0: f64 },
    /// Interacting soliton pair, `k = (0.75, 0.5)` at `x0 = (-50, 50)`.
    KdvTwo,
    /// Interacting soliton triple, `k = (0.75, 0.5, 0.25)`.
    KdvThree,
    /// Bright soliton `sech(x + 4t) exp(-i(2x + 3t))` at `t0`.
    NlsBright,
    /// Two bright pulses with opposite group velocities.
    NlsTwoBright,
    /// Three bright pulses with distinct speeds and phases.
    NlsThreeBright,
    /// Moving single gray soliton on the defocusing background.
    NlsGrayOne,
    /// Colliding gray soliton pair in a moving frame.
    NlsGrayTwo,
}

/// Where the per-row discrete `L^2` error is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// No reference; the error column is NaN.
    None,
    /// Validated closed-form solution evaluated at the relaxed times.
    ClosedForm,
    /// Refined uncorrected run (4x modes, dt/100) advanced alongside.
    FineReference,
}

impl Reference {
    pub fn name(self) -> &'static str {
        match self {
            Reference::None => "none",
            Reference::ClosedForm => "closed-form",
            Reference::FineReference => "fine-reference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Ci,
    Full,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Ci => "ci",
            Tier::Full => "full",
        }
    }
}

/// A registered experiment: equation, discretization, time spans, policy,
/// initial data, and reference. Rows are logged every `cadence` steps, so
/// the step size always divides the output cadence.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub equation: Equation,
    pub xmin: f64,
    pub xmax: f64,
    pub n_modes: usize,
    pub dt: f64,
    pub t_span_ci: (f64, f64),
    pub t_span_full: (f64, f64),
    pub tableau: &'static str,
    pub conserve: ConserveMode,
    pub beta: f64,
    pub tau: f64,
    pub initial: InitialData,
    pub reference: Reference,
    pub cadence: usize,
    pub blurb: &'static str,
}

pub static REGISTRY: &[Scenario] = &[
    Scenario {
        name: "fig1-bbm",
        equation: Equation::Bbm,
        xmin: -100.0,
        xmax: 100.0,
        n_modes: 32,
        dt: 5e-3,
        t_span_ci: (0.0, 5.0),
        t_span_full: (0.0, 400.0),
        tableau: "ark548",
        conserve: ConserveMode::None,
        beta: 0.0,
        tau: 0.0,
        initial: InitialData::BbmTwoWave,
        reference: Reference::None,
        cadence: 10,
        blurb: "semidiscrete conservation, two interacting solitary waves",
    },
    Scenario {
        name: "fig1-kdv",
        equation: Equation::Kdv,
        xmin: -200.0,
        xmax: 200.0,
        n_modes: 31,
        dt: 1e-2,
        t_span_ci: (0.0, 10.0),
        t_span_full: (0.0, 350.0),
        tableau: "ark548",
        conserve: ConserveMode::None,
        beta: 0.0,
        tau: 0.0,
        initial: InitialData::KdvTwo,
        reference: Reference::ClosedForm,
        cadence: 10,
        blurb: "semidiscrete conservation, two interacting solitons",
    },
    Scenario {
        name: "fig1-nls",
        equation: Equation::Nls,
        xmin: -35.0,
        xmax: 35.0,
        n_modes: 32,
        dt: 1e-4,
        t_span_ci: (0.0, 0.1),
        t_span_full: (0.0, 10.0),
        tableau: "ark548",
        conserve: ConserveMode::None,
        beta: 2.0,
        tau: 0.0,
        initial: InitialData::NlsTwoBright,
        reference: Reference::None,
        cadence: 10,
        blurb: "semidiscrete conservation, two bright pulses",
    },
    Scenario {
        name: "fig2-bbm",
        equation: Equation::Bbm,
        xmin: -100.0,
        xmax: 100.0,
        n_modes: 256,
        dt: 0.5,
        t_span_ci: (0.0, 500.0),
        t_span_full: (0.0, 5000.0),
        tableau: "ark548",
        conserve: ConserveMode::MassMomentumEnergy,
        beta: 0.0,
        tau: 0.0,
        initial: InitialData::BbmTwoWave,
        reference: Reference::None,
        cadence: 10,
        blurb: "fully discrete conservation at large steps, two waves",
    },
    Scenario {
        name: "fig2-kdv",
        equation: Equation::Kdv,
        xmin: -200.0,
        xmax: 200.0,
        n_modes: 256,
        dt: 0.1,
        t_span_ci: (0.0, 100.0),
        t_span_full: (0.0, 1000.0),
        tableau: "ark548",
        conserve: ConserveMode::MassMomentumEnergy,
        beta: 0.0,
        tau: 0.0,
        initial: InitialData::KdvTwo,
        reference: Reference::ClosedForm,
        cadence: 10,
        blurb: "fully discrete conservation at large steps, two solitons",
    },
    Scenario {
        name: "fig2-nls",
        equation: Equation::Nls,
        xmin: -35.0,
        xmax: 35.0,
        n_modes: 256,
        dt: 0.01,
        t_span_ci: (0.0, 10.0),
        t_span_full: (0.0, 100.0),
        tableau: "ark548",
        conserve: ConserveMode::MassMomentumEnergy,
        beta: 2.0,
        tau: 0.0,
        initial: InitialData::NlsTwoBright,
        reference: Reference::None,
        cadence: 10,
        blurb: "fully discrete conservation at large steps, two bright pulses",
    },
    Scenario {
        name: "fig3-bbm",
        equation: Equation::Bbm,
        xmin: -100.0,
        xmax: 100.0,
        n_modes: 256,
        dt: 0.25,
        t_span_ci: (0.0, 250.0),
        t_span_full: (0.0, 2500.0),
        tableau: "ark436",
        conserve: ConserveMode::MassEnergy,
        beta: 0.0,
        tau: 0.0,
        initial: InitialData::BbmSolitary { x0: -20.0, c: 1.3 },
        reference: Reference::ClosedForm,
        cadence: 10,
        blurb: "single solitary wave under mass-energy relaxation",
    },
    Scenario {
        name: "fig3-kdv",
        equation: Equation::Kdv,
        xmin: -200.0,
        xmax: 200.0,
        n_modes: 256,
        dt: 0.05,
        t_span_ci: (0.0, 50.0),
        t_span_full: (0.0, 500.0),
        tableau: "ark436",
        conserve: ConserveMode::MassEnergy,
        beta: 0.0,
        tau: 0.0,
        initial: InitialData::KdvSingle { k: 0.75, x0: -50.0 },
        reference: Reference::ClosedForm,
        cadence: 10,
        blurb: "single soliton under mass-energy relaxation",
    },
    Scenario {
        name: "fig3-nls",
        equation: Equation::Nls,
        xmin: -40.0,
        xmax: 40.0,
        n_modes: 256,
        dt: 0.01,
        t_span_ci: (0.0, 10.0),
        t_span_full: (0.0, 100.0),
        tableau: "ark436",
        conserve: ConserveMode::MassEnergy,
        beta: 2.0,
        tau: 0.0,
        initial: InitialData::NlsBright,
        reference: Reference::ClosedForm,
        cadence: 10,
        blurb: "single bright soliton under mass-energy relaxation",
    },
    Scenario {
        name: "kdv-convergence",
        equation: Equation::Kdv,
        xmin: -50.0,
        xmax: 50.0,
        n_modes: 256,
        dt: 0.02,
        t_span_ci: (0.0, 0.4),
        t_span_full: (0.0, 0.4),
        tableau: "ark548",
        conserve: ConserveMode::MassMomentumEnergy,
        beta: 0.0,
        tau: 0.0,
        initial: InitialData::KdvSingle { k: 0.75, x0: 0.0 },
        reference: Reference::FineReference,
        cadence: 1,
        blurb: "order-measurement run; halve --dt to build a convergence table",
    },
    Scenario {
        name: "fig4-kdv-two",
        equation: Equation::Kdv,
        xmin: -200.0,
        xmax: 200.0,
        n_modes: 1024,
        dt: 0.1,
        t_span_ci: (0.0, 350.0),
        t_span_full: (0.0, 350.0),
        tableau: "ark548",
        conserve: ConserveMode::None,
        beta: 0.0,
        tau: 0.0,
        initial: InitialData::KdvTwo,
        reference: Reference::ClosedForm,
        cadence: 5,
        blurb: "error growth across a two-soliton interaction",
    },
    Scenario {
        name: "fig4-kdv-three",
        equation: Equation::Kdv,
        xmin: -400.0,
        xmax: 400.0,
        n_modes: 2048,
        dt: 0.1,
        t_span_ci: (0.0, 50.0),
        t_span_full: (0.0, 1500.0),
        tableau: "ark548",
        conserve: ConserveMode::None,
        beta: 0.0,
        tau: 0.0,
        initial: InitialData::KdvThree,
        reference: Reference::ClosedForm,
        cadence: 10,
        blurb: "error growth across three-soliton interactions",
    },
    Scenario {
        name: "fig4-nls-two",
        equation: Equation::Nls,
        xmin: -35.0,
        xmax: 35.0,
        n_modes: 1024,
        dt: 0.01,
        t_span_ci: (0.0, 0.5),
        t_span_full: (0.0, 10.0),
        tableau: "ark548",
        conserve: ConserveMode::None,
        beta: 2.0,
        tau: 0.0,
        initial: InitialData::NlsTwoBright,
        reference: Reference::FineReference,
        cadence: 10,
        blurb: "error growth for colliding bright pulses",
    },
    Scenario {
        name: "fig4-nls-three",
        equation: Equation::Nls,
        xmin: -35.0,
        xmax: 35.0,
        n_modes: 1024,
        dt: 0.001,
        t_span_ci: (0.0, 0.05),
        t_span_full: (0.0, 10.0),
        tableau: "ark548",
        conserve: ConserveMode::MassEnergy,
        beta: 2.0,
        tau: 0.0,
        initial: InitialData::NlsThreeBright,
        reference: Reference::FineReference,
        cadence: 10,
        blurb: "error growth for three bright pulses",
    },
    Scenario {
        name: "gray-one",
        equation: Equation::Nls,
        xmin: -GRAY_ONE_HALF_WIDTH,
        xmax: GRAY_ONE_HALF_WIDTH,
        n_modes: 256,
        dt: 0.04,
        t_span_ci: (0.0, 40.0),
        t_span_full: (0.0, 140.0),
        tableau: "ark548",
        conserve: ConserveMode::MassMomentumEnergy,
        beta: -1.0,
        tau: 0.0,
        initial: InitialData::NlsGrayOne,
        reference: Reference::ClosedForm,
        cadence: 5,
        blurb: "moving single gray soliton, defocusing background",
    },
    Scenario {
        name: "gray-two",
        equation: Equation::Nls,
        xmin: -GRAY_TWO_HALF_WIDTH,
        xmax: GRAY_TWO_HALF_WIDTH,
        n_modes: 2048,
        dt: 0.04,
        t_span_ci: (-70.0, 70.0),
        t_span_full: (-70.0, 70.0),
        tableau: "ark548",
        conserve: ConserveMode::MassMomentumEnergy,
        beta: -1.0,
        tau: 0.0,
        initial: InitialData::NlsGrayTwo,
        reference: Reference::ClosedForm,
        cadence: 10,
        blurb: "gray soliton pair colliding at t = 0 in a moving frame",
    },
    Scenario {
        name: "hyp-bright",
        equation: Equation::HypNls,
        xmin: -40.0,
        xmax: 40.0,
        n_modes: 256,
        dt: 1e-3,
        t_span_ci: (0.0, 1.0),
        t_span_full: (0.0, 1.0),
        tableau: "ark548",
        conserve: ConserveMode::MassEnergy,
        beta: 2.0,
        tau: 1e-9,
        initial: InitialData::NlsBright,
        reference: Reference::ClosedForm,
        cadence: 10,
        blurb: "hyperbolic approximation driven to the stiff limit",
    },
];

pub fn find(name: &str) -> Result<&'static Scenario, CliError> {
    REGISTRY
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| CliError::UnknownScenario(name.to_string()))
}

/// Builtin tableau key, or a path to a coefficient file.
pub fn resolve_tableau(name: &str) -> Result<ArkTableau, CliError> {
    if let Some(t) = ArkTableau::builtin(name) {
        return Ok(t);
    }
    let path = Path::new(name);
    if path.is_file() {
        return ArkTableau::from_file(path)
            .map_err(|e| CliError::InvalidConfig(format!("tableau file {name}: {e}")));
    }
    Err(CliError::UnknownTableau(name.to_string()))
}

/// Command-line overrides applied on top of a registered scenario.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub tableau: Option<String>,
    pub conserve: Option<ConserveMode>,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
}

/// A fully resolved, runnable configuration.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub name: String,
    pub equation: Equation,
    pub xmin: f64,
    pub xmax: f64,
    pub n: usize,
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub tableau: String,
    pub conserve: ConserveMode,
    pub beta: f64,
    pub tau: f64,
    pub initial: InitialData,
    pub reference: Reference,
    pub cadence: usize,
    pub tier: Tier,
}

impl Scenario {
    pub fn resolve(&self, tier: Tier, ov: &Overrides) -> Result<RunSpec, CliError> {
        let n = ov.n.unwrap_or(self.n_modes);
        let dt = ov.dt.unwrap_or(self.dt);
        if dt <= 0.0 || !dt.is_finite() {
            return Err(CliError::InvalidConfig(format!(
                "step size must be positive and finite, got {dt}"
            )));
        }
        let span = match tier {
            Tier::Ci => self.t_span_ci,
            Tier::Full => self.t_span_full,
        };
        let t0 = span.0;
        let t1 = ov.t_final.unwrap_or(span.1);
        if t1 <= t0 || !t1.is_finite() {
            return Err(CliError::InvalidConfig(format!(
                "final time {t1} must lie beyond the start time {t0}"
            )));
        }
        let steps = ((t1 - t0) / dt).round();
        if steps < 1.0 || ((t1 - t0) - steps * dt).abs() > 1e-6 * dt {
            return Err(CliError::InvalidConfig(format!(
                "the span [{t0}, {t1}] is not a whole number of steps of size {dt}"
            )));
        }
        let beta = ov.beta.unwrap_or(self.beta);
        let tau = ov.tau.unwrap_or(self.tau);
        if self.equation == Equation::HypNls && (tau <= 0.0 || !tau.is_finite()) {
            return Err(CliError::InvalidConfig(format!(
                "the relaxation time must be positive, got {tau}"
            )));
        }
        Ok(RunSpec {
            name: self.name.to_string(),
            equation: self.equation,
            xmin: self.xmin,
            xmax: self.xmax,
            n,
            dt,
            t0,
            t1,
            steps: steps as usize,
            tableau: ov.tableau.clone().unwrap_or_else(|| self.tableau.to_string()),
            conserve: ov.conserve.unwrap_or(self.conserve),
            beta,
            tau,
            initial: self.initial,
            reference: self.reference,
            cadence: self.cadence.max(1),
            tier,
        })
    }
}
