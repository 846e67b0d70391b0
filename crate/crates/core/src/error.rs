use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("network must contain at least one neuron")]
    EmptyNetwork,
    #[error("requested {what} of {elements} elements overflows the address space")]
    CapacityOverflow { what: &'static str, elements: u128 },
    #[error("allocation of {bytes} bytes for {what} failed")]
    AllocationFailed { what: &'static str, bytes: u128 },
    #[error("invalid topology: {0}")]
    InvalidTopology(&'static str),
    #[error("adjacency width {0} is not a multiple of 32 entries")]
    UnalignedWidth(usize),
    #[error("adjacency has {rows} rows but the network has {neurons} neurons")]
    RowMismatch { rows: usize, neurons: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),
}

pub type CoreResult<T> = Result<T, CoreError>;
