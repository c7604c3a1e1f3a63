//! Time-dependent scalar controls `p(t)`.

use serde::Serialize;

/// A scalar control on the real line.
///
/// `value` must be defined everywhere (zero outside the support). The
/// integrators never step across a breakpoint, so piecewise-smooth controls are
/// integrated with full order on every piece.
pub trait Control {
    fn value(&self, t: f64) -> f64;

    /// Times where the control may be discontinuous.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// True if `p ≡ 0` on `[a, b]`; enables exact free-flow steps.
    fn vanishes_on(&self, _a: f64, _b: f64) -> bool {
        false
    }
}

/// `p ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroControl;

impl Control for ZeroControl {
    fn value(&self, _t: f64) -> f64 {
        0.0
    }

    fn vanishes_on(&self, _a: f64, _b: f64) -> bool {
        true
    }
}

/// `p ≡ c`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantControl(pub f64);

impl Control for ConstantControl {
    fn value(&self, _t: f64) -> f64 {
        self.0
    }

    fn vanishes_on(&self, _a: f64, _b: f64) -> bool {
        self.0 == 0.0
    }
}

/// Concatenation of window controls with disjoint supports; zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PiecewiseControl<C> {
    pub pieces: Vec<C>,
}

impl<C> Default for PiecewiseControl<C> {
    fn default() -> Self {
        PiecewiseControl { pieces: Vec::new() }
    }
}

/// A control supported on a single closed interval.
pub trait Windowed: Control {
    fn support(&self) -> (f64, f64);
}

impl<C: Windowed> PiecewiseControl<C> {
    pub fn new(pieces: Vec<C>) -> Self {
        PiecewiseControl { pieces }
    }

    /// End of the last window, or `None` for the zero control.
    pub fn support_end(&self) -> Option<f64> {
        self.pieces.last().map(|p| p.support().1)
    }

    fn piece_at(&self, t: f64) -> Option<&C> {
        // Half-open pieces [a, b) with the final piece closed on the right.
        let n = self.pieces.len();
        self.pieces.iter().enumerate().find_map(|(i, p)| {
            let (a, b) = p.support();
            let inside = t >= a && (t < b || (i + 1 == n && t <= b));
            inside.then_some(p)
        })
    }
}

impl<C: Windowed> Control for PiecewiseControl<C> {
    fn value(&self, t: f64) -> f64 {
        self.piece_at(t).map_or(0.0, |p| p.value(t))
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| {
                let (a, b) = p.support();
                [a, b]
            })
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn vanishes_on(&self, a: f64, b: f64) -> bool {
        self.pieces.iter().all(|p| {
            let (s, e) = p.support();
            e <= a || s >= b || p.vanishes_on(a.max(s), b.min(e))
        })
    }
}
