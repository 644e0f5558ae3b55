//! Order-preserving batch execution with an optional rayon backend.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch operation runs. Results are identical either way. The
/// default is parallel when the `parallel` feature is enabled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

/// Map `f` over `items`, keeping input order in the output.
pub fn map_ordered<T, U, F>(mode: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match mode {
        Execution::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
    }
}
