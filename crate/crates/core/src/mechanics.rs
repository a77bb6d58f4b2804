//! Nominal (first Piola-Kirchhoff) stresses of incompressible isotropic
//! materials under homogeneous coaxial biaxial deformation.
//!
//! All deformations are diagonal, so tensors reduce to principal values.
//! Direction 3 is the traction-free thickness direction of a thin sheet and
//! the hydrostatic pressure is eliminated from `σ₃ = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::expr::{diff_program, EvalOutcome, ExprTree, InvalidCause, Program};
use crate::{Error, Result};

/// Tolerance on `λ₁λ₂λ₃ = 1`.
pub const INCOMPRESSIBILITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeformationMode {
    /// Uniaxial tension.
    #[serde(rename = "UT")]
    Uniaxial,
    /// Pure shear (planar tension).
    #[serde(rename = "PS")]
    PureShear,
    /// Equibiaxial tension.
    #[serde(rename = "EBT")]
    Equibiaxial,
    /// General biaxial tension with independent in-plane stretches.
    #[serde(rename = "BIAXIAL")]
    Biaxial,
}

impl DeformationMode {
    pub const ALL: [DeformationMode; 4] = [
        DeformationMode::Uniaxial,
        DeformationMode::PureShear,
        DeformationMode::Equibiaxial,
        DeformationMode::Biaxial,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DeformationMode::Uniaxial => "UT",
            DeformationMode::PureShear => "PS",
            DeformationMode::Equibiaxial => "EBT",
            DeformationMode::Biaxial => "BIAXIAL",
        }
    }
}

impl fmt::Display for DeformationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DeformationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "UT" => Ok(DeformationMode::Uniaxial),
            "PS" => Ok(DeformationMode::PureShear),
            "EBT" => Ok(DeformationMode::Equibiaxial),
            "BIAXIAL" => Ok(DeformationMode::Biaxial),
            _ => Err(Error::Parse(format!("unknown deformation mode `{s}`"))),
        }
    }
}

/// Principal stretches of an isochoric diagonal deformation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl Kinematics {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        if !(l1 > 0.0 && l2 > 0.0 && l3 > 0.0) || !(l1 * l2 * l3).is_finite() {
            return Err(Error::Kinematics(format!(
                "stretches must be positive, got ({l1}, {l2}, {l3})"
            )));
        }
        if ((l1 * l2 * l3) - 1.0).abs() > INCOMPRESSIBILITY_TOL {
            return Err(Error::Kinematics(format!(
                "det F = {} violates incompressibility",
                l1 * l2 * l3
            )));
        }
        Ok(Self { l1, l2, l3 })
    }

    pub fn identity() -> Self {
        Self {
            l1: 1.0,
            l2: 1.0,
            l3: 1.0,
        }
    }

    pub fn invariants(&self) -> InvariantState {
        invariants(self)
    }
}

/// Stretches for a test mode. `lambda2` is required for
/// [`DeformationMode::Biaxial`] and ignored otherwise.
pub fn stretches_from_mode(
    mode: DeformationMode,
    lambda: f64,
    lambda2: Option<f64>,
) -> Result<Kinematics> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Kinematics(format!("non-positive stretch {lambda}")));
    }
    let (l1, l2, l3) = match mode {
        DeformationMode::Uniaxial => {
            let t = 1.0 / lambda.sqrt();
            (lambda, t, t)
        }
        DeformationMode::PureShear => (lambda, 1.0, 1.0 / lambda),
        DeformationMode::Equibiaxial => (lambda, lambda, 1.0 / (lambda * lambda)),
        DeformationMode::Biaxial => {
            let l2 = lambda2.ok_or_else(|| {
                Error::Kinematics("biaxial deformation needs a second stretch".into())
            })?;
            if !(l2 > 0.0) || !l2.is_finite() {
                return Err(Error::Kinematics(format!("non-positive stretch {l2}")));
            }
            (lambda, l2, 1.0 / (lambda * l2))
        }
    };
    Kinematics::new(l1, l2, l3)
}

/// `I_C`, `II_C` of `C = diag(λ²)`; `III_C = 1` by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantState {
    pub i1: f64,
    pub i2: f64,
}

impl InvariantState {
    pub const III: f64 = 1.0;
}

pub fn invariants(k: &Kinematics) -> InvariantState {
    let (a, b, c) = (k.l1 * k.l1, k.l2 * k.l2, k.l3 * k.l3);
    InvariantState {
        i1: a + b + c,
        i2: a * b + a * c + b * c,
    }
}

/// Which argument set a strain-energy expression is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// `Ψ(I_C, II_C)` with inputs `x0 = I_C`, `x1 = II_C`.
    Invariant,
    /// `Ψ = ω(λ₁) + ω(λ₂) + ω(λ₃)` with input `x0 = λ`.
    Stretch,
}

impl Formulation {
    pub fn n_inputs(self) -> usize {
        match self {
            Formulation::Invariant => 2,
            Formulation::Stretch => 1,
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Invariant => "invariant",
            Formulation::Stretch => "stretch",
        })
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "invariant" => Ok(Formulation::Invariant),
            "stretch" => Ok(Formulation::Stretch),
            _ => Err(Error::Parse(format!("unknown formulation `{s}`"))),
        }
    }
}

/// Nominal stresses along the two loaded directions, MPa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressResponse {
    pub p11: f64,
    pub p22: f64,
}

/// Column layout of many kinematic states, prepared once per dataset.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KinematicsBatch {
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
    pub l3: Vec<f64>,
    pub i1: Vec<f64>,
    pub i2: Vec<f64>,
}

impl KinematicsBatch {
    pub fn new(states: &[Kinematics]) -> Self {
        let mut b = KinematicsBatch::default();
        for k in states {
            let inv = invariants(k);
            b.l1.push(k.l1);
            b.l2.push(k.l2);
            b.l3.push(k.l3);
            b.i1.push(inv.i1);
            b.i2.push(inv.i2);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.l1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l1.is_empty()
    }
}

/// An energy expression with its stress-relevant derivatives compiled.
#[derive(Clone, Debug)]
pub struct StressPredictor {
    formulation: Formulation,
    tree: ExprTree,
    energy: Program,
    /// Invariant form: `[∂Ψ/∂I_C, ∂Ψ/∂II_C]`; stretch form: `[ω']`.
    derivatives: Vec<Program>,
    normalization: Option<f64>,
}

impl StressPredictor {
    pub fn build(tree: &ExprTree, formulation: Formulation) -> Result<Self> {
        if tree.n_inputs() > formulation.n_inputs() {
            return Err(Error::FormulationMismatch(format!(
                "{formulation} energy takes {} input(s) but the expression uses {}",
                formulation.n_inputs(),
                tree.n_inputs()
            )));
        }
        let derivatives = (0..formulation.n_inputs() as u8)
            .map(|v| diff_program(tree, v))
            .collect();
        let mut p = StressPredictor {
            formulation,
            tree: tree.clone(),
            energy: Program::compile(tree),
            derivatives,
            normalization: None,
        };
        p.normalization = p.raw_reference_energy(tree.constants()).ok();
        Ok(p)
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn tree(&self) -> &ExprTree {
        &self.tree
    }

    /// Energy at the undeformed state: `Ψ(3, 3)` or `3ω(1)`. Subtracting it
    /// makes reported energies vanish at `F = I`; stresses do not depend on
    /// it.
    pub fn normalization(&self) -> Option<f64> {
        self.normalization
    }

    fn raw_reference_energy(&self, params: &[f64]) -> EvalOutcome {
        match self.formulation {
            Formulation::Invariant => self.energy.eval(params, &[3.0, 3.0]),
            Formulation::Stretch => Ok(3.0 * self.energy.eval(params, &[1.0])?),
        }
    }

    /// The derivative expressions as standalone trees.
    pub fn derivative_trees(&self) -> Vec<ExprTree> {
        (0..self.formulation.n_inputs() as u8)
            .map(|v| crate::expr::differentiate(&self.tree, v))
            .collect()
    }

    /// Same structure with different constants.
    pub fn with_constants(&self, constants: &[f64]) -> Result<Self> {
        let mut p = self.clone();
        p.tree = self.tree.with_constants(constants)?;
        p.normalization = p.raw_reference_energy(constants).ok();
        Ok(p)
    }

    /// Normalised strain energy at `k`.
    pub fn energy(&self, k: &Kinematics) -> EvalOutcome {
        let params = self.tree.constants();
        let raw = match self.formulation {
            Formulation::Invariant => {
                let inv = invariants(k);
                self.energy.eval(params, &[inv.i1, inv.i2])?
            }
            Formulation::Stretch => {
                self.energy.eval(params, &[k.l1])?
                    + self.energy.eval(params, &[k.l2])?
                    + self.energy.eval(params, &[k.l3])?
            }
        };
        Ok(raw - self.normalization.ok_or(InvalidCause::Nan)?)
    }

    /// Stresses at one state.
    pub fn stress(&self, k: &Kinematics) -> Result<StressResponse, InvalidCause> {
        let batch = KinematicsBatch::new(std::slice::from_ref(k));
        let (mut p11, mut p22) = ([0.0], [0.0]);
        self.stress_batch(self.tree.constants(), &batch, &mut p11, &mut p22)?;
        Ok(StressResponse {
            p11: p11[0],
            p22: p22[0],
        })
    }

    /// Stresses for every state of `batch` using `params` as the constant
    /// values. The energy itself is evaluated too, so an expression whose
    /// energy is undefined at a state is rejected even if its derivatives
    /// exist there.
    pub fn stress_batch(
        &self,
        params: &[f64],
        batch: &KinematicsBatch,
        p11: &mut [f64],
        p22: &mut [f64],
    ) -> Result<(), InvalidCause> {
        let n = batch.len();
        let mut scratch = vec![0.0; n];
        match self.formulation {
            Formulation::Invariant => {
                let cols: [&[f64]; 2] = [&batch.i1, &batch.i2];
                self.energy.eval_columns(params, &cols, &mut scratch)?;
                let mut psi1 = vec![0.0; n];
                let mut psi2 = vec![0.0; n];
                self.derivatives[0].eval_columns(params, &cols, &mut psi1)?;
                self.derivatives[1].eval_columns(params, &cols, &mut psi2)?;
                for i in 0..n {
                    let k = Kinematics {
                        l1: batch.l1[i],
                        l2: batch.l2[i],
                        l3: batch.l3[i],
                    };
                    let s = nominal_from_invariant_derivs(&k, psi1[i], psi2[i]);
                    p11[i] = s.p11;
                    p22[i] = s.p22;
                }
            }
            Formulation::Stretch => {
                let mut w = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
                for (col, out) in [&batch.l1, &batch.l2, &batch.l3].into_iter().zip(&mut w) {
                    self.energy.eval_columns(params, &[col], &mut scratch)?;
                    self.derivatives[0].eval_columns(params, &[col], out)?;
                }
                for i in 0..n {
                    let k = Kinematics {
                        l1: batch.l1[i],
                        l2: batch.l2[i],
                        l3: batch.l3[i],
                    };
                    let s = nominal_from_stretch_derivs(&k, [w[0][i], w[1][i], w[2][i]]);
                    p11[i] = s.p11;
                    p22[i] = s.p22;
                }
            }
        }
        if p11.iter().chain(p22.iter()).any(|v| !v.is_finite()) {
            return Err(InvalidCause::Overflow);
        }
        Ok(())
    }
}

/// Plane-stress nominal stresses from `Ψ1 = ∂Ψ/∂I_C`, `Ψ2 = ∂Ψ/∂II_C`:
/// `P_i = (2/λ_i)[Ψ1(λ_i² − λ3²) − Ψ2(λ_i⁻² − λ3⁻²)]`.
pub fn nominal_from_invariant_derivs(k: &Kinematics, psi1: f64, psi2: f64) -> StressResponse {
    let (a3, b3) = (k.l3 * k.l3, 1.0 / (k.l3 * k.l3));
    let p = |l: f64| 2.0 / l * (psi1 * (l * l - a3) - psi2 * (1.0 / (l * l) - b3));
    StressResponse {
        p11: p(k.l1),
        p22: p(k.l2),
    }
}

/// Plane-stress nominal stresses from `ω'(λ_i)`:
/// `P_i = ω'(λ_i) − λ3 ω'(λ3) / λ_i`.
pub fn nominal_from_stretch_derivs(k: &Kinematics, dw: [f64; 3]) -> StressResponse {
    let p = k.l3 * dw[2];
    StressResponse {
        p11: dw[0] - p / k.l1,
        p22: dw[1] - p / k.l2,
    }
}

/// Compile an energy into a predictor.
pub fn build_predictor(tree: &ExprTree, formulation: Formulation) -> Result<StressPredictor> {
    StressPredictor::build(tree, formulation)
}

/// Stresses from `Ψ(I_C, II_C)`.
pub fn stress_invariant(pred: &StressPredictor, k: &Kinematics) -> Result<StressResponse> {
    if pred.formulation() != Formulation::Invariant {
        return Err(Error::FormulationMismatch("expected an invariant predictor".into()));
    }
    Ok(pred.stress(k)?)
}

/// Stresses from a Valanis-Landel `ω(λ)`.
pub fn stress_stretch(pred: &StressPredictor, k: &Kinematics) -> Result<StressResponse> {
    if pred.formulation() != Formulation::Stretch {
        return Err(Error::FormulationMismatch("expected a stretch predictor".into()));
    }
    Ok(pred.stress(k)?)
}
