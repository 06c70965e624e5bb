use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the three variables of a triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    X,
    Y,
    Z,
}

impl Variable {
    pub const ALL: [Variable; 3] = [Variable::X, Variable::Y, Variable::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Null hypotheses the crate can test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisKind {
    /// `(X,Y) ⫫ Z`
    JointPairIndepXyZ,
    /// `(X,Z) ⫫ Y`
    JointPairIndepXzY,
    /// `(Y,Z) ⫫ X`
    JointPairIndepYzX,
    /// `Δ₍X₎P = 0`: `X` left uncentered.
    IncompleteLancasterX,
    /// `Δ₍Y₎P = 0`
    IncompleteLancasterY,
    /// `Δ₍Z₎P = 0`
    IncompleteLancasterZ,
    /// `Δ_L P = 0`
    Lancaster,
    /// `P_XYZ = P_X P_Y P_Z`
    TotalIndep3,
    /// Total independence of every variable in the sample.
    TotalIndepD,
    PairwiseIndepXy,
    PairwiseIndepXz,
    PairwiseIndepYz,
    /// Some bivariate factorization holds: a disjunction of the three joint-pair hypotheses.
    Factorization,
}

impl HypothesisKind {
    pub fn name(self) -> &'static str {
        use HypothesisKind::*;
        match self {
            JointPairIndepXyZ => "xy_z",
            JointPairIndepXzY => "xz_y",
            JointPairIndepYzX => "yz_x",
            IncompleteLancasterX => "dx",
            IncompleteLancasterY => "dy",
            IncompleteLancasterZ => "dz",
            Lancaster => "lancaster",
            TotalIndep3 => "total3",
            TotalIndepD => "totald",
            PairwiseIndepXy => "xy",
            PairwiseIndepXz => "xz",
            PairwiseIndepYz => "yz",
            Factorization => "factorization",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        use HypothesisKind::*;
        [
            JointPairIndepXyZ,
            JointPairIndepXzY,
            JointPairIndepYzX,
            IncompleteLancasterX,
            IncompleteLancasterY,
            IncompleteLancasterZ,
            Lancaster,
            TotalIndep3,
            TotalIndepD,
            PairwiseIndepXy,
            PairwiseIndepXz,
            PairwiseIndepYz,
            Factorization,
        ]
        .into_iter()
        .find(|h| h.name() == name)
    }

    pub fn is_composite(self) -> bool {
        self == HypothesisKind::Factorization
    }

    /// The three atomic hypotheses whose disjunction is [`HypothesisKind::Factorization`],
    /// in the order `(Y,Z)⫫X`, `(X,Z)⫫Y`, `(X,Y)⫫Z`.
    pub fn factorization_parts() -> [HypothesisKind; 3] {
        [
            HypothesisKind::JointPairIndepYzX,
            HypothesisKind::JointPairIndepXzY,
            HypothesisKind::JointPairIndepXyZ,
        ]
    }

    /// The variable split off from the other two, for joint-pair hypotheses.
    pub fn singled_out(self) -> Option<Variable> {
        match self {
            HypothesisKind::JointPairIndepYzX => Some(Variable::X),
            HypothesisKind::JointPairIndepXzY => Some(Variable::Y),
            HypothesisKind::JointPairIndepXyZ => Some(Variable::Z),
            _ => None,
        }
    }

    /// Which of `(K, L, M)` are centered in the Gram-matrix V-statistic of a
    /// hypothesis, for the kinds that have one.
    pub fn centering_pattern(self) -> Option<[bool; 3]> {
        use HypothesisKind::*;
        match self {
            JointPairIndepXyZ => Some([false, false, true]),
            JointPairIndepXzY => Some([false, true, false]),
            JointPairIndepYzX => Some([true, false, false]),
            IncompleteLancasterX => Some([false, true, true]),
            IncompleteLancasterY => Some([true, false, true]),
            IncompleteLancasterZ => Some([true, true, false]),
            Lancaster => Some([true, true, true]),
            _ => None,
        }
    }
}

impl fmt::Display for HypothesisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
