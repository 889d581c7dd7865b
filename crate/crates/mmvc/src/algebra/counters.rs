//! Operation counters for the instrumented cost model.
//!
//! Every counted group or field operation tallies into the innermost active
//! [`counter_scope`] on the current thread. Scopes nest additively: when an
//! inner scope closes, its totals fold into the enclosing scope, so a phase
//! total always equals the sum of its parts. Threads do not share scopes;
//! parallel workloads must collect per-thread counters and [`OpCounters::merge`]
//! them explicitly.

use std::cell::RefCell;
use std::fmt;

/// Tally of the five operation classes in the cost model.
///
/// `rng` counts logical random draws (one per sampled scalar or element,
/// regardless of how many raw bytes the backend consumes). `add_p` and
/// `mul_p` count arithmetic in the exponent field Z_p. `mul_g` and `exp_g`
/// count group multiplications and exponentiations.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounters {
    pub rng: u64,
    pub add_p: u64,
    pub mul_p: u64,
    pub mul_g: u64,
    pub exp_g: u64,
}

impl OpCounters {
    /// Adds `other` into `self` field by field.
    pub fn merge(&mut self, other: &OpCounters) {
        self.rng += other.rng;
        self.add_p += other.add_p;
        self.mul_p += other.mul_p;
        self.mul_g += other.mul_g;
        self.exp_g += other.exp_g;
    }

    /// True when every counter is zero.
    pub fn is_zero(&self) -> bool {
        *self == OpCounters::default()
    }

    /// Total operations of all classes; used only for coarse reporting.
    pub fn total(&self) -> u64 {
        self.rng + self.add_p + self.mul_p + self.mul_g + self.exp_g
    }
}

impl fmt::Display for OpCounters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rng={} add_p={} mul_p={} mul_G={} exp_G={}",
            self.rng, self.add_p, self.mul_p, self.mul_g, self.exp_g
        )
    }
}

thread_local! {
    static SCOPES: RefCell<Vec<OpCounters>> = const { RefCell::new(Vec::new()) };
}

/// Adds to the innermost open scope on this thread, if any.
///
/// Counting is free when no scope is open, so library code can tally
/// unconditionally.
pub(crate) fn tally(f: impl FnOnce(&mut OpCounters)) {
    SCOPES.with(|stack| {
        if let Some(top) = stack.borrow_mut().last_mut() {
            f(top);
        }
    });
}

/// Pops the scope this guard opened even if the closure panics, keeping the
/// thread-local stack balanced for subsequent scopes.
struct ScopeGuard;

impl Drop for ScopeGuard {
    fn drop(&mut self) {
        let popped = SCOPES.with(|stack| stack.borrow_mut().pop());
        if let Some(counts) = popped {
            // Fold into the parent so nested scopes sum correctly.
            SCOPES.with(|stack| {
                if let Some(parent) = stack.borrow_mut().last_mut() {
                    parent.merge(&counts);
                }
            });
            LAST_CLOSED.with(|slot| *slot.borrow_mut() = Some(counts));
        }
    }
}

thread_local! {
    static LAST_CLOSED: RefCell<Option<OpCounters>> = const { RefCell::new(None) };
}

/// Runs `f` with a fresh counter scope and returns its result together with
/// the operations counted while it ran.
///
/// `label` is carried only into trace logs; it has no effect on counting.
pub fn counter_scope<R>(label: &str, f: impl FnOnce() -> R) -> (R, OpCounters) {
    SCOPES.with(|stack| stack.borrow_mut().push(OpCounters::default()));
    let guard = ScopeGuard;
    let out = f();
    drop(guard);
    let counts = LAST_CLOSED
        .with(|slot| slot.borrow_mut().take())
        .expect("scope guard always records the closed scope");
    log::trace!("counter scope {label}: {counts}");
    (out, counts)
}
