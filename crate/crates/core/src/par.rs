//! Order-preserving batched parallel map shared by the filter and tokenize
//! stages.

use std::collections::VecDeque;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

const ITEMS_PER_WORKER: usize = 64;

/// Maps `f` over an ordered stream using `workers` threads. Items are pulled
/// in batches, each batch is mapped in parallel and emitted in input order.
/// An upstream error is emitted after the items that preceded it.
pub(crate) struct OrderedMap<I, T, F, R> {
    inner: I,
    f: F,
    pool: Option<ThreadPool>,
    batch_size: usize,
    ready: VecDeque<Result<R>>,
    pending: Vec<T>,
    done: bool,
}

impl<I, T, F, R> OrderedMap<I, T, F, R>
where
    I: Iterator<Item = Result<T>>,
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Sync,
{
    pub(crate) fn new(inner: I, workers: usize, f: F) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let pool = if workers > 1 {
            Some(
                ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Self {
            inner,
            f,
            pool,
            batch_size: workers * ITEMS_PER_WORKER,
            ready: VecDeque::new(),
            pending: Vec::new(),
            done: false,
        })
    }

    fn fill(&mut self) {
        let mut upstream_err = None;
        while self.pending.len() < self.batch_size {
            match self.inner.next() {
                Some(Ok(item)) => self.pending.push(item),
                Some(Err(e)) => {
                    upstream_err = Some(e);
                    self.done = true;
                    break;
                }
                None => {
                    self.done = true;
                    break;
                }
            }
        }
        let batch = std::mem::take(&mut self.pending);
        let f = &self.f;
        let mapped: Vec<Result<R>> = match &self.pool {
            Some(pool) => pool.install(|| batch.into_par_iter().map(f).collect()),
            None => batch.into_iter().map(f).collect(),
        };
        self.ready.extend(mapped);
        if let Some(e) = upstream_err {
            self.ready.push_back(Err(e));
        }
    }
}

impl<I, T, F, R> Iterator for OrderedMap<I, T, F, R>
where
    I: Iterator<Item = Result<T>>,
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Sync,
{
    type Item = Result<R>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.ready.is_empty() && !self.done {
            self.fill();
        }
        let item = self.ready.pop_front()?;
        if item.is_err() {
            // nothing after an error is meaningful to the consumer
            self.ready.clear();
            self.done = true;
        }
        Some(item)
    }
}
