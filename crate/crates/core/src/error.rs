use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared identifier `{name}` at byte {pos}")]
    Undeclared { pos: usize, name: String },
    #[error("argument of `{func}` at byte {pos} is not affine-linear in the coordinates")]
    NonLinearArgument { pos: usize, func: String },
    #[error("exponent at byte {pos} is not an integer")]
    NonIntegerExponent { pos: usize },
    #[error("division by zero at byte {pos}")]
    DivisionByZero { pos: usize },
}

impl ParseError {
    pub fn pos(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Undeclared { pos, .. }
            | ParseError::NonLinearArgument { pos, .. }
            | ParseError::NonIntegerExponent { pos }
            | ParseError::DivisionByZero { pos } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishes,
    #[error("result lost all significant bits at the requested precision")]
    PrecisionLoss,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("charts differ")]
    ChartMismatch,
    #[error("metric is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("degenerate metric: determinant vanishes identically")]
    Degenerate,
    #[error("connection is not torsion-free at Γ^{0}_({1}{2})")]
    Torsion(usize, usize, usize),
    #[error("wrong shape: {0}")]
    Shape(String),
    #[error("operation requires dimension {expected}, got {got}")]
    Dimension { expected: String, got: usize },
    #[error("no usable base point: {0}")]
    BasePoint(String),
    #[error("signature changes between base point and perturbed point")]
    UnstableSignature,
}
