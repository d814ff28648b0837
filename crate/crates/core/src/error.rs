//! Error types, one enum per pipeline stage.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("{file}:{line}: syntax error: {message}")]
    Syntax {
        file: String,
        line: u32,
        message: String,
    },
    #[error("{file}:{line}: bad trip annotation: {message}")]
    Annotation {
        file: String,
        line: u32,
        message: String,
    },
    #[error("loop inventory: {0}")]
    Inventory(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum IntensityError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error)]
pub enum CodegenError {
    #[error("loop {loop_id}: unresolvable symbol `{name}`")]
    UnresolvedSymbol { loop_id: u64, name: String },
    #[error("loop {loop_id}: unsupported loop: {reason}")]
    UnsupportedLoop { loop_id: u64, reason: String },
    #[error("unroll: induction variable `{var}` is mutated inside the body")]
    NonUniformInduction { var: String },
    #[error("no loops given for artifact generation")]
    EmptyPattern,
}

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("cost model: {0}")]
    Model(String),
    #[error("resource report: {0}")]
    ReportParse(String),
    #[error("resource fraction must be positive, got {0}")]
    Domain(f64),
    #[error("no offload candidate fits the device cap")]
    EmptyCandidates,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("sidecar: {0}")]
    Sidecar(String),
    #[error("compile failed (exit {code:?}): {stderr}")]
    Compile { code: Option<i32>, stderr: String },
    #[error("command timed out after {0} s")]
    Timeout(u64),
    #[error("run failed (exit {code:?}): {stderr}")]
    Run { code: Option<i32>, stderr: String },
    #[error("cannot parse measurement output: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("backend config: {0}")]
    Config(String),
}

#[derive(Debug, Error)]
pub enum ExplorerError {
    #[error("oracle supports at most {max} candidates, got {got}")]
    TooManyCandidates { max: usize, got: usize },
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Intensity(#[from] IntensityError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error(transparent)]
    Resources(#[from] ResourceError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Explorer(#[from] ExplorerError),
    #[error("report: {0}")]
    Report(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
