//! Order-preserving map over a slice, parallel under the `parallel` feature.
use alloc::vec::Vec;

use crate::Error;

#[cfg(feature = "parallel")]
pub(crate) fn try_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>, Error>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, Error> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>, Error>
where
    F: Fn(&T) -> Result<R, Error>,
{
    items.iter().map(f).collect()
}
