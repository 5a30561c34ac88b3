//! Row-wise evaluation helpers. With the `parallel` feature rows are handed to
//! rayon; every row is computed independently so results do not depend on
//! scheduling.

/// Fills `out` (row-major, `width` items per row) by calling `f(row, row_slice)`.
pub(crate) fn for_each_row<T, F>(out: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(width)
            .enumerate()
            .for_each(|(r, row)| f(r, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        out.chunks_mut(width)
            .enumerate()
            .for_each(|(r, row)| f(r, row));
    }
}

/// Like [`for_each_row`] but each row may fail; the first failing row (in row
/// order) wins.
pub(crate) fn try_for_each_row<T, E, F>(out: &mut [T], width: usize, f: F) -> Result<(), E>
where
    T: Send,
    E: Send,
    F: Fn(usize, &mut [T]) -> Result<(), E> + Sync + Send,
{
    if width == 0 {
        return Ok(());
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let errors: alloc::vec::Vec<(usize, E)> = out
            .par_chunks_mut(width)
            .enumerate()
            .filter_map(|(r, row)| f(r, row).err().map(|e| (r, e)))
            .collect();
        match errors.into_iter().min_by_key(|(r, _)| *r) {
            Some((_, e)) => Err(e),
            None => Ok(()),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (r, row) in out.chunks_mut(width).enumerate() {
            f(r, row)?;
        }
        Ok(())
    }
}
