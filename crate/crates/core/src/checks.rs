//! Runtime bound checks shared by the evaluation algorithms.
//!
//! With the `checked` feature (on by default) every check is evaluated and
//! counted; a failing check turns into [`Error::Internal`]. Without the
//! feature the checks compile to nothing.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

const BOUNDS: usize = 4;

static PERFORMED: [AtomicU64; BOUNDS] = [const { AtomicU64::new(0) }; BOUNDS];
static FAILED: [AtomicU64; BOUNDS] = [const { AtomicU64::new(0) }; BOUNDS];

/// Which bound a check guards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    /// A CRT-recombined integer stays below its magnitude bound.
    CrtMagnitude,
    /// An interpolated polynomial stays below its degree bound.
    HermiteDegree,
    /// Node differences of a Hermite instance are units.
    UnitDifference,
    /// Curve degree times total degree fits the interpolation capacity.
    DegreeBudget,
}

/// Counters since process start (or the last [`reset`]).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub performed: u64,
    pub failed: u64,
}

impl Bound {
    pub const ALL: [Bound; BOUNDS] = [
        Bound::CrtMagnitude,
        Bound::HermiteDegree,
        Bound::UnitDifference,
        Bound::DegreeBudget,
    ];

    fn slot(self) -> usize {
        self as usize
    }
}

/// Counters for all bounds together.
pub fn stats() -> CheckStats {
    Bound::ALL.iter().fold(CheckStats::default(), |acc, &b| {
        let s = stats_for(b);
        CheckStats { performed: acc.performed + s.performed, failed: acc.failed + s.failed }
    })
}

pub fn stats_for(bound: Bound) -> CheckStats {
    CheckStats {
        performed: PERFORMED[bound.slot()].load(Ordering::Relaxed),
        failed: FAILED[bound.slot()].load(Ordering::Relaxed),
    }
}

pub fn reset() {
    for b in Bound::ALL {
        PERFORMED[b.slot()].store(0, Ordering::Relaxed);
        FAILED[b.slot()].store(0, Ordering::Relaxed);
    }
}

pub const fn enabled() -> bool {
    cfg!(feature = "checked")
}

#[inline]
pub fn check(bound: Bound, ok: impl FnOnce() -> bool, what: impl FnOnce() -> String) -> Result<()> {
    if !enabled() {
        return Ok(());
    }
    PERFORMED[bound.slot()].fetch_add(1, Ordering::Relaxed);
    if ok() {
        Ok(())
    } else {
        FAILED[bound.slot()].fetch_add(1, Ordering::Relaxed);
        Err(Error::Internal(format!("{bound:?} check failed: {}", what())))
    }
}
