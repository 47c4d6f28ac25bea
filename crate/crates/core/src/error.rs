use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on vertex {0}")]
    SelfLoop(u64),
    #[error("malformed edge-list line {0}")]
    Malformed(usize),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("composite family undefined for c = {0}: the 4-pyramid coefficient is nonnegative")]
    CompositeUndefined(u32),
    #[error("graph has no triangles")]
    NoTriangles,
    #[error("graph has no edges")]
    NoEdges,
    #[error("connected triangle configurations exceed budget of {budget}")]
    BudgetExceeded { budget: u64 },
    #[error("exhaustive enumeration needs {colorings} colorings, cap is {cap}")]
    TooLarge { colorings: String, cap: u64 },
    #[error("empty sample")]
    EmptySample,
    #[error("no reference law for family {0}")]
    UnsupportedFamily(String),
}

impl Error {
    /// Domain errors are failures of a well-formed request on a particular
    /// input; everything else is a usage problem.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::NoTriangles
                | Error::NoEdges
                | Error::BudgetExceeded { .. }
                | Error::TooLarge { .. }
                | Error::EmptySample
                | Error::CompositeUndefined(_)
                | Error::UnsupportedFamily(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
