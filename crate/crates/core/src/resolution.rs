//! Geometric resolution on dyadic boxes.
//!
//! Two boxes resolve on dimension ℓ when their ℓ-components are siblings
//! `x·0` / `x·1` of a common stem `x` and every other pair of components is
//! prefix-comparable. The resolvent keeps the stem at ℓ and the longer (more
//! specific) component everywhere else; its point set is always contained in
//! the union of the two inputs.
//!
//! A resolution instance is *ordered* when both inputs are λ in every
//! dimension after ℓ — the shape the engine's split strategy guarantees.

use crate::dyadic::{DyadicBox, DyadicInterval};
use crate::{Error, Result};

/// Whether a resolvent's ancestry involves any output box.
///
/// Inputs (gap boxes) start `Gap`; reported output points are `Output`; a
/// resolvent is `Gap` iff both parents are `Gap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Taint {
    Gap,
    Output,
}

impl Taint {
    /// Taint of a resolvent from its parents' taints.
    #[must_use]
    pub fn combine(a: Taint, b: Taint) -> Taint {
        if a == Taint::Gap && b == Taint::Gap {
            Taint::Gap
        } else {
            Taint::Output
        }
    }

    /// Stable text form used in run traces.
    #[must_use]
    pub fn label(self) -> &'static str {
        match self {
            Taint::Gap => "gap",
            Taint::Output => "output",
        }
    }

    /// Inverse of [`Taint::label`].
    #[must_use]
    pub fn from_label(s: &str) -> Option<Taint> {
        match s {
            "gap" => Some(Taint::Gap),
            "output" => Some(Taint::Output),
            _ => None,
        }
    }
}

/// One resolution step: the resulting box, its parents, the resolved
/// dimension, and the combined taint.
#[derive(Clone, Debug)]
pub struct Resolvent {
    pub result: DyadicBox,
    pub parents: (DyadicBox, DyadicBox),
    pub dim: usize,
    pub taint: Taint,
}

/// Checks whether dimension `dim` qualifies for resolving `w1` with `w2`.
fn resolvable_at(w1: &DyadicBox, w2: &DyadicBox, dim: usize) -> bool {
    if !w1.comp(dim).is_sibling_of(w2.comp(dim)) {
        return false;
    }
    (0..w1.n()).all(|j| {
        let (a, b) = (w1.comp(j), w2.comp(j));
        j == dim || a.contains(b) || b.contains(a)
    })
}

/// The smallest dimension on which `w1` and `w2` resolve, if any: sibling
/// components there, prefix-comparable components everywhere else.
#[must_use]
pub fn can_resolve(w1: &DyadicBox, w2: &DyadicBox) -> Option<usize> {
    debug_assert!(w1.n() == w2.n() && w1.d() == w2.d());
    (0..w1.n()).find(|&dim| resolvable_at(w1, w2, dim))
}

/// Resolves `w1` and `w2` on dimension `dim`: the stem of the two siblings
/// there, the longer of the two components everywhere else.
pub fn resolve(w1: &DyadicBox, w2: &DyadicBox, dim: usize) -> Result<DyadicBox> {
    debug_assert!(w1.n() == w2.n() && w1.d() == w2.d());
    if dim >= w1.n() || !resolvable_at(w1, w2, dim) {
        return Err(Error::NotResolvable { dim });
    }
    let comps = (0..w1.n())
        .map(|j| {
            let (a, b) = (w1.comp(j), w2.comp(j));
            if j == dim {
                let (stem, _) = a.split_last().expect("sibling components are non-empty");
                stem
            } else if a.len() >= b.len() {
                a
            } else {
                b
            }
        })
        .collect::<Vec<DyadicInterval>>();
    Ok(DyadicBox::new(w1.d(), comps))
}

/// True iff the instance has the ordered format: both inputs are λ in every
/// dimension after `dim`. (Callers establish resolvability separately.)
#[must_use]
pub fn is_ordered_instance(w1: &DyadicBox, w2: &DyadicBox, dim: usize) -> bool {
    (dim + 1..w1.n()).all(|j| w1.comp(j).is_lambda() && w2.comp(j).is_lambda())
}
